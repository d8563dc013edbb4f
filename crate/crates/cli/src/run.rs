//! Dispatch of a parsed configuration to the library.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qshift::classifier::{classify, Conclusion, TheoremPart};
use qshift::continuation::{evaluate_continued, ContinuationOptions, DEFAULT_EPS_POLE};
use qshift::exppoly::{leading_witness, residual, ExpPoly, Term};
use qshift::nevanlinna::{verify_first_main, verify_mokhonko, verify_q_shift, RationalFunction, DEFAULT_NODES};
use qshift::poles::pole_orbit;
use qshift::poly::Poly;
use qshift::residual::SeriesResidual;
use qshift::solver::{
    check_forced_uniqueness, enumerate_family, solve_entire, solve_laurent_at, solve_laurent_origin, solve_linear,
    EquationParams, SolutionSeries, Variable,
};
use qshift::{Complex64, Precision, DEFAULT_ORDER};
use serde::Serialize;

use crate::config::{
    complex, Command, NevanlinnaCheck, Pair, RunConfig, SeriesConfig, SeriesKind, SolveMode,
};
use crate::error::CliError;

/// Which command reaches each library operation.
pub const REACHABILITY: &[(&str, Command)] = &[
    ("series::add", Command::Residual),
    ("series::mul", Command::Residual),
    ("series::differentiate", Command::Residual),
    ("series::dilate", Command::Residual),
    ("series::evaluate", Command::Residual),
    ("solver::solve_entire", Command::Solve),
    ("solver::solve_linear", Command::Solve),
    ("solver::solve_laurent_origin", Command::Laurent),
    ("solver::solve_laurent_at", Command::Laurent),
    ("solver::enumerate_family", Command::Solve),
    ("solver::check_forced_uniqueness", Command::Solve),
    ("continuation::jet_from_series", Command::Continue),
    ("continuation::continue_step", Command::Continue),
    ("continuation::evaluate_continued", Command::Continue),
    ("exppoly::normalize", Command::ExpolyCheck),
    ("exppoly::derivative", Command::ExpolyCheck),
    ("exppoly::dilate", Command::ExpolyCheck),
    ("exppoly::mul", Command::ExpolyCheck),
    ("exppoly::residual", Command::ExpolyCheck),
    ("exppoly::leading_witness", Command::ExpolyCheck),
    ("poles::propagate_order", Command::PoleOrbit),
    ("poles::growth_lower_bound", Command::PoleOrbit),
    ("poles::meromorphy_verdict", Command::PoleOrbit),
    ("nevanlinna::proximity", Command::Nevanlinna),
    ("nevanlinna::counting", Command::Nevanlinna),
    ("nevanlinna::characteristic", Command::Nevanlinna),
    ("nevanlinna::verify_q_shift", Command::Nevanlinna),
    ("nevanlinna::verify_mokhonko", Command::Nevanlinna),
    ("nevanlinna::verify_first_main", Command::Nevanlinna),
    ("classifier::classify", Command::Classify),
];

/// Command-line settings that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub precision: Option<Precision>,
    pub order: Option<usize>,
    pub output: Option<PathBuf>,
}

/// Rendered output plus informational notes for standard error.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub notes: Vec<String>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn params(cfg: &RunConfig, ov: &Overrides) -> Result<EquationParams, CliError> {
    let p = cfg.section(&cfg.params)?.build()?;
    Ok(match ov.precision {
        Some(pr) => p.with_precision(pr),
        None => p,
    })
}

fn forbid(name: &str, present: bool, context: &str) -> Result<(), CliError> {
    if present {
        return Err(CliError::validation(format!("`{name}` is not used {context}")));
    }
    Ok(())
}

fn require<T: Copy>(name: &str, v: Option<T>, context: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::validation(format!("`{name}` is required {context}")))
}

fn coefficient_csv(s: &SolutionSeries) -> String {
    let mut out = String::from("n,re,im\n");
    for (n, c) in s.series.iter() {
        let _ = writeln!(out, "{n},{},{}", num(c.re), num(c.im));
    }
    out
}

fn in_variable(s: SolutionSeries, v: Variable) -> Result<SolutionSeries, CliError> {
    Ok(match v {
        Variable::F => s.to_f()?,
        Variable::G => s.to_g()?,
    })
}

fn solve(cfg: &RunConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    let p = params(cfg, ov)?;
    let sc = cfg.solve.clone().unwrap_or_default();
    let order = ov.order.or(sc.order).unwrap_or(DEFAULT_ORDER);
    let a0 = sc.a0.map(complex).unwrap_or_default();
    let variable = sc.variable.unwrap_or(if p.b.re == 0.0 && p.b.im == 0.0 { Variable::F } else { Variable::G });
    if sc.mode != SolveMode::Family {
        forbid("seeds", sc.seeds.is_some(), "outside family mode")?;
    }
    let s = match sc.mode {
        SolveMode::Entire => solve_entire(&p, a0, order)?,
        SolveMode::Linear => solve_linear(&p, a0, order)?,
        SolveMode::Forced => {
            forbid("a0", sc.a0.is_some(), "in forced mode")?;
            check_forced_uniqueness(&p, order)?
        }
        SolveMode::Family => {
            forbid("a0", sc.a0.is_some(), "in family mode")?;
            let seeds: Vec<Complex64> =
                sc.seeds.as_deref().ok_or_else(|| CliError::validation("family mode needs `seeds`"))?.iter().map(|s| complex(*s)).collect();
            let mut out = String::from("member,re_a0,im_a0,zero_count\n");
            for (i, (m, a)) in enumerate_family(&p, &seeds, order)?.iter().zip(&seeds).enumerate() {
                let _ = writeln!(out, "{i},{},{},{}", num(a.re), num(a.im), m.zero_count);
            }
            return Ok(Outcome { body: out, notes: Vec::new() });
        }
    };
    Ok(Outcome { body: coefficient_csv(&in_variable(s, variable)?), notes: Vec::new() })
}

fn laurent(cfg: &RunConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    let p = params(cfg, ov)?;
    let lc = cfg.laurent.clone().unwrap_or_default();
    let order = ov.order.or(lc.order).unwrap_or(DEFAULT_ORDER);
    let z0 = lc.z0.map(complex).unwrap_or_default();
    let mut notes = Vec::new();
    let s = if z0 == Complex64::default() {
        forbid("b0", lc.b0.is_some(), "at the origin")?;
        forbid("b1", lc.b1.is_some(), "at the origin")?;
        solve_laurent_origin(&p, order)?
    } else {
        let b0 = require("b0", lc.b0.map(complex), "away from the origin")?;
        notes.push(format!("formal expansion about z0 = {z0}: not a verified solution"));
        solve_laurent_at(&p, z0, b0, lc.b1.map(complex), order)?
    };
    Ok(Outcome { body: coefficient_csv(&in_variable(s, lc.variable.unwrap_or(Variable::G))?), notes })
}

fn series_from(sc: &SeriesConfig, p: &EquationParams, ov: &Overrides) -> Result<SolutionSeries, CliError> {
    let order = ov.order.or(sc.order).unwrap_or(DEFAULT_ORDER);
    let ctx = "for this series kind";
    let uses = match sc.kind {
        SeriesKind::Entire | SeriesKind::Linear => [true, false, false, false],
        SeriesKind::Forced | SeriesKind::LaurentOrigin => [false; 4],
        SeriesKind::LaurentAt => [false, true, true, true],
    };
    for ((name, present), used) in
        [("a0", sc.a0.is_some()), ("z0", sc.z0.is_some()), ("b0", sc.b0.is_some()), ("b1", sc.b1.is_some())].into_iter().zip(uses)
    {
        if !used {
            forbid(name, present, ctx)?;
        }
    }
    let a0 = sc.a0.map(complex).unwrap_or_default();
    let s = match sc.kind {
        SeriesKind::Entire => solve_entire(p, a0, order)?,
        SeriesKind::Linear => solve_linear(p, a0, order)?,
        SeriesKind::Forced => check_forced_uniqueness(p, order)?,
        SeriesKind::LaurentOrigin => solve_laurent_origin(p, order)?,
        SeriesKind::LaurentAt => solve_laurent_at(
            p,
            require("z0", sc.z0.map(complex), ctx)?,
            require("b0", sc.b0.map(complex), ctx)?,
            sc.b1.map(complex),
            order,
        )?,
    };
    Ok(match sc.radius {
        Some(r) if r > 0.0 => s.with_radius(r),
        Some(r) => return Err(CliError::validation(format!("radius must be positive, got {r}"))),
        None => s,
    })
}

fn residual_cmd(cfg: &RunConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    let p = params(cfg, ov)?;
    let rc = cfg.section(&cfg.residual)?;
    let s = series_from(&rc.series, &p, ov)?;
    let points: Vec<Complex64> = match (&rc.points, &rc.ring) {
        (Some(pts), None) => pts.iter().map(|z| complex(*z)).collect(),
        (None, Some(ring)) => (0..ring.count)
            .map(|k| Complex64::from_polar(ring.radius, std::f64::consts::TAU * k as f64 / ring.count as f64))
            .collect(),
        _ => return Err(CliError::validation("residual takes exactly one of `points` or `ring`")),
    };
    let r = SeriesResidual::new(&s)?;
    let mut out = String::from("re_z,im_z,re_residual,im_residual,abs_residual\n");
    for z in points {
        let v = r.at(z)?;
        let _ = writeln!(out, "{},{},{},{},{}", num(z.re), num(z.im), num(v.re), num(v.im), num(v.norm()));
    }
    Ok(Outcome { body: out, notes: Vec::new() })
}

fn continue_cmd(cfg: &RunConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    let p = params(cfg, ov)?;
    let cc = cfg.section(&cfg.continue_)?;
    let s = series_from(&cc.series, &p, ov)?;
    let opts = ContinuationOptions {
        radius: None,
        eps_pole: cc.eps_pole.unwrap_or(DEFAULT_EPS_POLE),
        known_poles: cc.known_poles.iter().map(|z| complex(*z)).collect(),
    };
    let mut out = String::from("re_z,im_z,re_f,im_f\n");
    for z in cc.targets.iter().map(|z| complex(*z)) {
        let v = evaluate_continued(&s, z, cc.steps, &opts)?;
        let _ = writeln!(out, "{},{},{},{}", num(z.re), num(z.im), num(v.re), num(v.im));
    }
    Ok(Outcome { body: out, notes: Vec::new() })
}

fn poly(coeffs: &[Pair]) -> Poly {
    Poly::new(coeffs.iter().map(|c| complex(*c)).collect())
}

fn pairs(p: &Poly) -> Vec<Pair> {
    p.coeffs().iter().map(|c| [c.re, c.im]).collect()
}

#[derive(Serialize)]
struct Witness {
    exponent: Vec<Pair>,
    prefactor: Vec<Pair>,
}

#[derive(Serialize)]
struct ExpolyReport {
    candidate_terms: usize,
    residual_terms: usize,
    residual_zero: bool,
    witness: Option<Witness>,
}

fn expoly_cmd(cfg: &RunConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    let p = params(cfg, ov)?;
    let ec = cfg.section(&cfg.expoly_check)?;
    let f = ExpPoly::normalize(ec.terms.iter().map(|t| Term::new(poly(&t.prefactor), poly(&t.exponent))).collect())?;
    let r = residual(&p, &f)?;
    let witness = if r.is_zero() {
        None
    } else {
        let (exponent, prefactor) = leading_witness(&r)?;
        Some(Witness { exponent: pairs(&exponent), prefactor: pairs(&prefactor) })
    };
    let report = ExpolyReport {
        candidate_terms: f.terms().len(),
        residual_terms: r.terms().len(),
        residual_zero: r.is_zero(),
        witness,
    };
    Ok(Outcome { body: json(&report)?, notes: Vec::new() })
}

fn pole_orbit_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let pc = cfg.section(&cfg.pole_orbit)?;
    let orbit = pole_orbit(pc.degrees()?, pc.kind, pc.order.into(), complex(pc.z0), complex(pc.q), pc.steps)?;
    let mut out = String::from("n,re,im,order\n");
    for s in &orbit.steps {
        let _ = writeln!(out, "{},{},{},{}", s.n, num(s.point.re), num(s.point.im), s.order);
    }
    let mut notes = vec![format!("verdict: {:?}", orbit.verdict)];
    if let Some(b) = orbit.growth_bound {
        notes.push(format!("order lower bound: {}", num(b)));
    }
    if !orbit.tie_steps.is_empty() {
        notes.push(format!("tied steps (generic coefficients assumed): {:?}", orbit.tie_steps));
    }
    Ok(Outcome { body: out, notes })
}

fn nevanlinna_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let nc = cfg.section(&cfg.nevanlinna)?;
    let f = RationalFunction::new(poly(&nc.numerator), poly(&nc.denominator))?;
    let grid = nc.grid.radii()?;
    let nodes = nc.nodes.unwrap_or(DEFAULT_NODES);
    let check = nc.check;
    let ctx = "by this check";
    forbid("q", nc.q.is_some() && check != NevanlinnaCheck::QShift, ctx)?;
    forbid("a", nc.a.is_some() && check != NevanlinnaCheck::FirstMain, ctx)?;
    let rhs = nc.rhs_numerator.is_some() || nc.rhs_denominator.is_some();
    forbid("rhs_numerator/rhs_denominator", rhs && check != NevanlinnaCheck::Mokhonko, ctx)?;
    let body = match check {
        NevanlinnaCheck::Curve => {
            let mut out = String::from("r,m,N,T\n");
            for s in f.curve(&grid, nodes)? {
                let _ = writeln!(out, "{},{},{},{}", num(s.r), num(s.m), num(s.n), num(s.t));
            }
            out
        }
        NevanlinnaCheck::QShift => {
            let q = require("q", nc.q.map(complex), ctx)?;
            format!("quantity,value\nmax_deviation,{}\n", num(verify_q_shift(&f, q, &grid, nodes)?))
        }
        NevanlinnaCheck::FirstMain => {
            let a = require("a", nc.a.map(complex), ctx)?;
            format!("quantity,value\nmax_deviation,{}\n", num(verify_first_main(&f, a, &grid, nodes)?))
        }
        NevanlinnaCheck::Mokhonko => {
            let (Some(pn), Some(pd)) = (&nc.rhs_numerator, &nc.rhs_denominator) else {
                return Err(CliError::validation("mokhonko needs `rhs_numerator` and `rhs_denominator`"));
            };
            let rep = verify_mokhonko(&f, &poly(pn), &poly(pd), &grid, nodes)?;
            format!(
                "quantity,value\nr,{}\nratio,{}\nexpected,{}\ncomposite_degree,{}\n",
                num(rep.r),
                num(rep.ratio),
                rep.expected,
                rep.composite_degree
            )
        }
    };
    Ok(Outcome { body, notes: Vec::new() })
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    conclusions: &'a [Conclusion],
    citations: &'a [TheoremPart],
    flags: Vec<&'static str>,
}

fn classify_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let h = cfg.section(&cfg.classify)?;
    let v = classify(h);
    let flags = if v.no_solution_of_this_kind { vec!["NO-SOLUTION-OF-THIS-KIND"] } else { Vec::new() };
    let report = ClassifyReport { conclusions: &v.conclusions, citations: &v.citations, flags };
    Ok(Outcome { body: json(&report)?, notes: Vec::new() })
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Runs a parsed configuration and renders its output.
pub fn execute(cfg: &RunConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    if ov.order == Some(0) {
        return Err(CliError::validation("--order must be at least 1"));
    }
    match cfg.command {
        Command::Solve => solve(cfg, ov),
        Command::Laurent => laurent(cfg, ov),
        Command::Continue => continue_cmd(cfg, ov),
        Command::Residual => residual_cmd(cfg, ov),
        Command::ExpolyCheck => expoly_cmd(cfg, ov),
        Command::PoleOrbit => pole_orbit_cmd(cfg),
        Command::Nevanlinna => nevanlinna_cmd(cfg),
        Command::Classify => classify_cmd(cfg),
    }
}

/// Reads, runs and writes; returns the notes.
pub fn run(path: &Path, ov: &Overrides) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    let cfg = RunConfig::parse(&text)?;
    let outcome = execute(&cfg, ov)?;
    let target = ov.output.clone().or_else(|| {
        cfg.output.as_ref().map(|o| path.parent().map_or_else(|| o.clone(), |dir| dir.join(o)))
    });
    match target {
        Some(file) => fs::write(file, &outcome.body)?,
        None => print!("{}", outcome.body),
    }
    Ok(outcome.notes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_operation_reached_by_exactly_one_command() {
        let mut names: Vec<_> = REACHABILITY.iter().map(|(n, _)| *n).collect();
        names.sort_unstable();
        let len = names.len();
        names.dedup();
        assert_eq!(names.len(), len, "an operation is listed twice");
        for cmd in Command::ALL {
            assert!(REACHABILITY.iter().any(|(_, c)| *c == cmd), "{} reaches nothing", cmd.name());
        }
    }
}

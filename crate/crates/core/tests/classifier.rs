use qshift::classifier::{classify, Hypotheses, QRegime, SolutionKind, TheoremPart, Verdict, TABLE};
use qshift::poles::RhsDegrees;

const MANIFEST: &str = include_str!("data/theorem_parts.txt");

fn manifest() -> Vec<&'static str> {
    MANIFEST.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect()
}

#[test]
fn manifest_rows_appear_exactly_once() {
    let parts = manifest();
    assert_eq!(parts.len(), TABLE.len());
    for tag in &parts {
        let n = TABLE.iter().filter(|r| r.part.tag() == *tag).count();
        assert_eq!(n, 1, "{tag}");
    }
    for row in &TABLE {
        assert!(parts.contains(&row.part.tag()), "{} missing from manifest", row.part);
    }
}

#[test]
fn entire_inside_without_factor() {
    let h = Hypotheses {
        solution_kind: Some(SolutionKind::Entire),
        q_regime: Some(QRegime::Inside),
        f_divides_p: Some(false),
        ..Default::default()
    };
    let v = classify(&h);
    let c = v.get(TheoremPart::T3ib).expect("row fires");
    assert_eq!(c.statement, "deg_f(P) <= 2 and deg_f(Q) <= 1");
    assert_eq!(c.satisfied, None);
    assert!(v.get(TheoremPart::T3ia).is_none());
    assert!(!v.no_solution_of_this_kind);
}

#[test]
fn zero_b_outside_has_no_entire_solutions() {
    let h = Hypotheses { b_zero: Some(true), q_regime: Some(QRegime::Outside), ..Default::default() };
    let v = classify(&h);
    assert_eq!(v.citations, vec![TheoremPart::T2i]);
    assert_eq!(v.conclusions[0].statement, "no entire solutions");
}

#[test]
fn cubic_numerator_over_constant_is_ruled_out() {
    let h = Hypotheses {
        solution_kind: Some(SolutionKind::TranscendentalMeromorphicOrder0),
        rational_coeffs: Some(true),
        degrees: Some(RhsDegrees { p: 3, s: 0 }),
        ..Default::default()
    };
    let v = classify(&h);
    assert_eq!(v.get(TheoremPart::T3iiia).unwrap().satisfied, Some(false));
    assert!(v.no_solution_of_this_kind);
}

#[test]
fn every_conclusion_is_cited_once() {
    let h = Hypotheses {
        q_regime: Some(QRegime::Inside),
        b_zero: Some(false),
        d_zero: Some(false),
        ..Default::default()
    };
    let v = classify(&h);
    let tags: Vec<_> = v.conclusions.iter().map(|c| c.part).collect();
    assert_eq!(tags, v.citations);
}

fn bools() -> [Option<bool>; 3] {
    [None, Some(false), Some(true)]
}

fn lattice() -> Vec<Hypotheses> {
    let regimes = [None, Some(QRegime::Inside), Some(QRegime::Outside)];
    let kinds = [
        None,
        Some(SolutionKind::Entire),
        Some(SolutionKind::MeromorphicOrder0),
        Some(SolutionKind::TranscendentalMeromorphicOrder0),
    ];
    let mut degrees = vec![None];
    for p in 0..=4 {
        for s in 0..=2 {
            degrees.push(Some(RhsDegrees { p, s }));
        }
    }
    let mut out = Vec::new();
    for q_regime in regimes {
        for solution_kind in kinds {
            for &degrees in &degrees {
                for mask in 0..3usize.pow(7) {
                    let mut m = mask;
                    let mut next = || {
                        let v = bools()[m % 3];
                        m /= 3;
                        v
                    };
                    out.push(Hypotheses {
                        q_regime,
                        solution_kind,
                        degrees,
                        b_zero: next(),
                        d_zero: next(),
                        f_divides_p: next(),
                        n_small: next(),
                        rational_coeffs: next(),
                        f0_zero: next(),
                        positive_real: next(),
                    });
                }
            }
        }
    }
    out
}

/// Single-field refinements of `h`.
fn refinements(h: &Hypotheses) -> Vec<Hypotheses> {
    let mut out = Vec::new();
    if h.q_regime.is_none() {
        out.extend([QRegime::Inside, QRegime::Outside].map(|r| Hypotheses { q_regime: Some(r), ..*h }));
    }
    if h.solution_kind.is_none() {
        out.extend(
            [SolutionKind::Entire, SolutionKind::MeromorphicOrder0, SolutionKind::TranscendentalMeromorphicOrder0]
                .map(|k| Hypotheses { solution_kind: Some(k), ..*h }),
        );
    }
    if h.degrees.is_none() {
        for p in 0..=4 {
            for s in 0..=2 {
                out.push(Hypotheses { degrees: Some(RhsDegrees { p, s }), ..*h });
            }
        }
    }
    type Field = fn(&mut Hypotheses) -> &mut Option<bool>;
    let fields: [Field; 7] = [
        |h| &mut h.b_zero,
        |h| &mut h.d_zero,
        |h| &mut h.f_divides_p,
        |h| &mut h.n_small,
        |h| &mut h.rational_coeffs,
        |h| &mut h.f0_zero,
        |h| &mut h.positive_real,
    ];
    for field in fields {
        let mut probe = *h;
        if field(&mut probe).is_none() {
            for b in [false, true] {
                let mut r = *h;
                *field(&mut r) = Some(b);
                out.push(r);
            }
        }
    }
    out
}

/// A conclusion may only vanish when the refined fact contradicts its own clause.
fn contradicted(part: TheoremPart, h: &Hypotheses) -> bool {
    match part {
        TheoremPart::T1iia => h.f0_zero == Some(false),
        TheoremPart::T1iib => h.f0_zero == Some(true),
        _ => false,
    }
}

fn check_refinement(h: &Hypotheses, v: &Verdict, r: &Hypotheses) {
    let w = classify(r);
    for c in &v.conclusions {
        match w.get(c.part) {
            Some(d) => {
                if c.satisfied.is_some() {
                    assert_eq!(c.satisfied, d.satisfied, "{h:?} -> {r:?} at {}", c.part);
                }
            }
            None => assert!(contradicted(c.part, r), "{} lost: {h:?} -> {r:?}", c.part),
        }
    }
    assert!(!v.no_solution_of_this_kind || w.no_solution_of_this_kind, "{h:?} -> {r:?}");
}

#[test]
fn refinement_is_monotone_over_the_lattice() {
    for h in lattice() {
        let v = classify(&h);
        for r in refinements(&h) {
            check_refinement(&h, &v, &r);
        }
    }
}

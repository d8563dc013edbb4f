//! Decision table of the structural theorems.
//!
//! Every field of [`Hypotheses`] is three-valued: `None` means unknown and
//! never satisfies a row. The only exception is the `f(0)` split for the
//! forced case, where an unknown initial value reports both branches.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::poles::RhsDegrees;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QRegime {
    /// `0 < |q| < 1`
    Inside,
    /// `|q| > 1`
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionKind {
    Entire,
    #[serde(rename = "meromorphic-order-0")]
    MeromorphicOrder0,
    #[serde(rename = "transcendental-meromorphic-order-0")]
    TranscendentalMeromorphicOrder0,
}

impl SolutionKind {
    fn is_order_zero_meromorphic(self) -> bool {
        matches!(self, Self::MeromorphicOrder0 | Self::TranscendentalMeromorphicOrder0)
    }
}

/// What is known about the equation and a putative solution.
///
/// `b_zero`, `d_zero`, `f0_zero` and `positive_real` refer to the
/// constant-coefficient quadratic form; `f_divides_p`, `n_small`,
/// `rational_coeffs` and `degrees` to the general rational right-hand side.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hypotheses {
    #[serde(default)]
    pub q_regime: Option<QRegime>,
    #[serde(default)]
    pub b_zero: Option<bool>,
    #[serde(default)]
    pub d_zero: Option<bool>,
    #[serde(default)]
    pub solution_kind: Option<SolutionKind>,
    /// `f` divides `P(z, f)`.
    #[serde(default)]
    pub f_divides_p: Option<bool>,
    /// `N(r, f) = S(r, f)`.
    #[serde(default)]
    pub n_small: Option<bool>,
    /// `a(z)` and all coefficients of `R` are rational.
    #[serde(default)]
    pub rational_coeffs: Option<bool>,
    #[serde(default)]
    pub degrees: Option<RhsDegrees>,
    #[serde(default)]
    pub f0_zero: Option<bool>,
    /// `q > 1` real, `A, B, C, D > 0`, and a solution with a pole at some
    /// `z0` whose regular part starts with real `s0, s1`.
    #[serde(default)]
    pub positive_real: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremPart {
    T1i,
    T1iia,
    T1iib,
    T1iii,
    T1iva,
    T1ivb,
    T1v,
    T2i,
    T2ii,
    T3ia,
    T3ib,
    T3iia,
    T3iib,
    T3iic,
    T3iiia,
    T3iiib,
}

impl TheoremPart {
    pub const ALL: [TheoremPart; 16] = [
        Self::T1i,
        Self::T1iia,
        Self::T1iib,
        Self::T1iii,
        Self::T1iva,
        Self::T1ivb,
        Self::T1v,
        Self::T2i,
        Self::T2ii,
        Self::T3ia,
        Self::T3ib,
        Self::T3iia,
        Self::T3iib,
        Self::T3iic,
        Self::T3iiia,
        Self::T3iiib,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::T1i => "T1(i)",
            Self::T1iia => "T1(ii)(a)",
            Self::T1iib => "T1(ii)(b)",
            Self::T1iii => "T1(iii)",
            Self::T1iva => "T1(iv)(a)",
            Self::T1ivb => "T1(iv)(b)",
            Self::T1v => "T1(v)",
            Self::T2i => "T2(i)",
            Self::T2ii => "T2(ii)",
            Self::T3ia => "T3(i)(a)",
            Self::T3ib => "T3(i)(b)",
            Self::T3iia => "T3(ii)(a)",
            Self::T3iib => "T3(ii)(b)",
            Self::T3iic => "T3(ii)(c)",
            Self::T3iiia => "T3(iii)(a)",
            Self::T3iiib => "T3(iii)(b)",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.tag() == tag)
    }
}

impl fmt::Display for TheoremPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl Serialize for TheoremPart {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConclusionKind {
    Existence,
    NonExistence,
    /// A necessary condition on the degrees of `P` and `Q`.
    DegreeCondition,
    Structure,
    Note,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conclusion {
    pub part: TheoremPart,
    pub kind: ConclusionKind,
    pub statement: &'static str,
    /// Whether the supplied data meet the condition; `None` when not checkable.
    pub satisfied: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub conclusions: Vec<Conclusion>,
    pub citations: Vec<TheoremPart>,
    /// Some entailed necessary condition contradicts the hypotheses.
    pub no_solution_of_this_kind: bool,
}

impl Verdict {
    pub fn get(&self, part: TheoremPart) -> Option<&Conclusion> {
        self.conclusions.iter().find(|c| c.part == part)
    }
}

type Rule = fn(&Hypotheses) -> Option<(ConclusionKind, &'static str, Option<bool>)>;

/// One row of the table: the theorem part and its rule.
pub struct Row {
    pub part: TheoremPart,
    rule: Rule,
}

fn is(v: Option<bool>) -> bool {
    v == Some(true)
}

fn is_not(v: Option<bool>) -> bool {
    v == Some(false)
}

fn inside(h: &Hypotheses) -> bool {
    h.q_regime == Some(QRegime::Inside)
}

fn quadratic(h: &Hypotheses) -> bool {
    is_not(h.b_zero)
}

fn kind_is(h: &Hypotheses, k: SolutionKind) -> bool {
    h.solution_kind == Some(k)
}

fn order_zero(h: &Hypotheses) -> bool {
    h.solution_kind.is_some_and(SolutionKind::is_order_zero_meromorphic)
}

fn degree_check(h: &Hypotheses, ok: impl Fn(u32, u32) -> bool) -> Option<bool> {
    h.degrees.map(|d| ok(d.p, d.s))
}

use ConclusionKind::*;

pub static TABLE: [Row; 16] = [
    Row {
        part: TheoremPart::T1i,
        rule: |h| {
            (quadratic(h) && inside(h) && is(h.d_zero))
                .then_some((Existence, "uncountably many transcendental entire solutions", None))
        },
    },
    Row {
        part: TheoremPart::T1iia,
        rule: |h| {
            (quadratic(h) && inside(h) && is_not(h.d_zero) && h.f0_zero != Some(false))
                .then_some((Existence, "with f(0) = 0: exactly one transcendental entire solution", None))
        },
    },
    Row {
        part: TheoremPart::T1iib,
        rule: |h| {
            (quadratic(h) && inside(h) && is_not(h.d_zero) && h.f0_zero != Some(true)).then_some((
                Existence,
                "with f(0) != 0: uncountably many transcendental entire solutions",
                None,
            ))
        },
    },
    Row {
        part: TheoremPart::T1iii,
        rule: |h| (quadratic(h) && inside(h)).then_some((NonExistence, "no exponential polynomial solutions", None)),
    },
    Row {
        part: TheoremPart::T1iva,
        rule: |h| {
            (quadratic(h) && inside(h)).then_some((
                Structure,
                "all poles are simple; the unique local meromorphic solution at 0 extends to the plane \
                 (equal to -1/(Bz) when C = -A/q and D = 0)",
                None,
            ))
        },
    },
    Row {
        part: TheoremPart::T1ivb,
        rule: |h| {
            quadratic(h).then_some((Existence, "a local meromorphic solution with simple poles near every z0 != 0", None))
        },
    },
    Row {
        part: TheoremPart::T1v,
        rule: |h| {
            (quadratic(h) && h.q_regime == Some(QRegime::Outside) && is(h.positive_real)).then_some((
                Structure,
                "every meromorphic solution of order 0 is -1/(B(z - z0)) + s0",
                h.solution_kind.map(|k| k != SolutionKind::TranscendentalMeromorphicOrder0),
            ))
        },
    },
    Row {
        part: TheoremPart::T2i,
        rule: |h| match (is(h.b_zero), h.q_regime) {
            (true, Some(QRegime::Inside)) => {
                Some((Existence, "uncountably many transcendental entire solutions", None))
            }
            (true, Some(QRegime::Outside)) => Some((
                NonExistence,
                "no entire solutions",
                h.solution_kind.map(|k| k != SolutionKind::Entire),
            )),
            _ => None,
        },
    },
    Row {
        part: TheoremPart::T2ii,
        rule: |h| (is(h.b_zero) && inside(h)).then_some((NonExistence, "no meromorphic solution with poles", None)),
    },
    Row {
        part: TheoremPart::T3ia,
        rule: |h| {
            (inside(h) && kind_is(h, SolutionKind::Entire) && is(h.f_divides_p)).then(|| {
                (DegreeCondition, "deg_f(P) <= 3 and deg_f(Q) <= 2", degree_check(h, |p, s| p <= 3 && s <= 2))
            })
        },
    },
    Row {
        part: TheoremPart::T3ib,
        rule: |h| {
            (inside(h) && kind_is(h, SolutionKind::Entire) && is_not(h.f_divides_p)).then(|| {
                (DegreeCondition, "deg_f(P) <= 2 and deg_f(Q) <= 1", degree_check(h, |p, s| p <= 2 && s <= 1))
            })
        },
    },
    Row {
        part: TheoremPart::T3iia,
        rule: |h| {
            let d = h.degrees?;
            (order_zero(h) && d.p > d.s + 1).then_some((
                DegreeCondition,
                "deg_f(Q) <= 1 and deg_f(P) >= 2 deg_f(Q)",
                Some(d.s <= 1 && d.p >= 2 * d.s),
            ))
        },
    },
    Row {
        part: TheoremPart::T3iib,
        rule: |h| {
            let d = h.degrees?;
            (order_zero(h) && d.p <= d.s + 1).then_some((
                DegreeCondition,
                "deg_f(Q) <= 1 and deg_f(P) <= 2",
                Some(d.s <= 1 && d.p <= 2),
            ))
        },
    },
    Row {
        part: TheoremPart::T3iic,
        rule: |h| {
            (order_zero(h) && is(h.n_small)).then(|| {
                (DegreeCondition, "deg_f(Q) = 0 and deg_f(P) <= 1", degree_check(h, |p, s| s == 0 && p <= 1))
            })
        },
    },
    Row {
        part: TheoremPart::T3iiia,
        rule: |h| {
            (kind_is(h, SolutionKind::TranscendentalMeromorphicOrder0) && is(h.rational_coeffs)).then(|| {
                (
                    DegreeCondition,
                    "deg_f(Q) = 1 and deg_f(P) = 3, or deg_f(Q) = 0 and deg_f(P) <= 2",
                    degree_check(h, |p, s| (s == 1 && p == 3) || (s == 0 && p <= 2)),
                )
            })
        },
    },
    Row {
        part: TheoremPart::T3iiib,
        rule: |h| {
            let d = h.degrees?;
            (kind_is(h, SolutionKind::TranscendentalMeromorphicOrder0) && is(h.rational_coeffs) && d.p == d.s + 2)
                .then_some((Note, "distinct poles carry the full characteristic: Nbar(r,f) = T(r,f) + S(r,f)", None))
        },
    },
];

/// Every row whose hypotheses are entailed by `h`, in table order.
pub fn classify(h: &Hypotheses) -> Verdict {
    let mut v = Verdict::default();
    for row in &TABLE {
        if let Some((kind, statement, satisfied)) = (row.rule)(h) {
            v.no_solution_of_this_kind |= satisfied == Some(false);
            v.citations.push(row.part);
            v.conclusions.push(Conclusion { part: row.part, kind, statement, satisfied });
        }
    }
    v
}

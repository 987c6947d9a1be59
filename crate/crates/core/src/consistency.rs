//! Consistency: does a diagram admit at least one conforming architecture?
//!
//! Simple diagrams use three per-motif conditions: every multiplicity fits
//! the cardinality, all matching factors `n·d/m` are one common integer `s`,
//! and `s` does not exceed the number of distinct connectors the motif can
//! form. Interval diagrams generalise this with choice functions: `sc`
//! intervals pick one value, `mc` intervals are kept whole, and the
//! per-port matching factors become intervals that must intersect.
//!
//! A motif whose ports all admit zero connectors (`n·d_lo = 0` everywhere)
//! is always satisfiable by the empty sub-configuration, so `s = 0` is
//! accepted before the other conditions are evaluated.

use std::fmt;

use itertools::Itertools;
use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::model::{
    binomial, is_simple, matching_factor, Cardinalities, ConnectorMotif, Diagram, GenericPortRef,
    Interval,
};
use crate::par;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConsistencyError {
    #[error("diagram `{0}` is not simple")]
    NotSimple(String),
}

/// Which consistency condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    MultiplicityVsCardinality,
    MatchingFactorMismatch,
    ConnectorCountBound,
}

impl Condition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::MultiplicityVsCardinality => "multiplicity-vs-cardinality",
            Condition::MatchingFactorMismatch => "matching-factor-mismatch",
            Condition::ConnectorCountBound => "connector-count-bound",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Values chosen for one port of a motif.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PortChoice {
    pub port: GenericPortRef,
    pub cardinality: u32,
    pub multiplicity: Interval,
    pub degree: Interval,
    /// Admissible connector counts for this port, e.g. `[2,4]` or `[3,inf)`.
    pub matching_factors: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MotifWitness {
    pub motif: usize,
    pub ports: Vec<PortChoice>,
    /// Common matching factor: the number of connectors of the motif.
    pub matching_factor: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub cardinalities: Cardinalities,
    pub motifs: Vec<MotifWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnosis {
    pub condition: Condition,
    pub motif: usize,
    pub port: Option<GenericPortRef>,
    pub cardinalities: Cardinalities,
    pub detail: String,
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "motif {}: {}: {}",
            self.motif, self.condition, self.detail
        )
    }
}

/// Exactly one of `witness` / `diagnosis` is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub witness: Option<Witness>,
    pub diagnosis: Option<Diagnosis>,
}

impl ConsistencyReport {
    fn ok(witness: Witness) -> Self {
        Self {
            consistent: true,
            witness: Some(witness),
            diagnosis: None,
        }
    }

    fn failed(diagnosis: Diagnosis) -> Self {
        Self {
            consistent: false,
            witness: None,
            diagnosis: Some(diagnosis),
        }
    }
}

/// Picks the simple or interval check depending on the diagram.
pub fn check(d: &Diagram) -> ConsistencyReport {
    match check_simple(d) {
        Ok(r) => r,
        Err(_) => check_interval(d),
    }
}

/// Consistency of a simple diagram.
pub fn check_simple(d: &Diagram) -> Result<ConsistencyReport, ConsistencyError> {
    if !is_simple(d) {
        return Err(ConsistencyError::NotSimple(d.name.clone()));
    }
    let cards = d.lower_cardinalities();
    let mut motifs = Vec::with_capacity(d.motifs.len());
    for (j, motif) in d.motifs.iter().enumerate() {
        match simple_motif(j, motif, &cards) {
            Ok(w) => motifs.push(w),
            Err(diag) => return Ok(ConsistencyReport::failed(diag)),
        }
    }
    Ok(ConsistencyReport::ok(Witness {
        cardinalities: cards,
        motifs,
    }))
}

fn simple_motif(
    j: usize,
    motif: &ConnectorMotif,
    cards: &Cardinalities,
) -> Result<MotifWitness, Diagnosis> {
    let diag = |condition, port: Option<&GenericPortRef>, detail: String| Diagnosis {
        condition,
        motif: j,
        port: port.cloned(),
        cardinalities: cards.clone(),
        detail,
    };
    let mut rows = Vec::new();
    for (p, c) in &motif.ports {
        let n = cards[&p.type_name];
        let (m, deg) = (c.multiplicity.lo, c.degree.lo);
        let s = matching_factor(n, m, deg).expect("validated multiplicity");
        rows.push((p, n, m, deg, s));
    }
    let choice = |&(p, n, m, deg, s): &(&GenericPortRef, u32, u32, u32, Ratio<u64>)| PortChoice {
        port: p.clone(),
        cardinality: n,
        multiplicity: Interval::exact(m),
        degree: Interval::exact(deg),
        matching_factors: s.to_string(),
    };

    if rows.iter().all(|r| *r.4.numer() == 0) {
        return Ok(MotifWitness {
            motif: j,
            ports: rows.iter().map(choice).collect(),
            matching_factor: 0,
        });
    }
    for &(p, n, m, _, _) in &rows {
        if m > n {
            return Err(diag(
                Condition::MultiplicityVsCardinality,
                Some(p),
                format!("multiplicity {m} of {p} exceeds cardinality {n}"),
            ));
        }
    }
    let first = rows[0].4;
    for &(p, n, m, deg, s) in &rows {
        if !s.is_integer() {
            return Err(diag(
                Condition::MatchingFactorMismatch,
                Some(p),
                format!("matching factor of {p} is {n}*{deg}/{m} = {s}, not an integer"),
            ));
        }
        if s != first {
            return Err(diag(
                Condition::MatchingFactorMismatch,
                Some(p),
                format!("matching factors {first} ≠ {s}"),
            ));
        }
    }
    let s = first.to_integer();
    let bound = rows.iter().fold(1u128, |acc, &(_, n, m, _, _)| {
        acc.saturating_mul(binomial(n, m))
    });
    if u128::from(s) > bound {
        return Err(diag(
            Condition::ConnectorCountBound,
            None,
            format!("matching factor {s} exceeds the {bound} distinct connectors available"),
        ));
    }
    Ok(MotifWitness {
        motif: j,
        ports: rows.iter().map(choice).collect(),
        matching_factor: s,
    })
}

/// Set of admissible connector counts: `[lo, hi]` or `[lo, ∞)`, or empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Counts {
    Empty,
    Range(u64, u64),
    From(u64),
}

impl Counts {
    fn range(lo: u64, hi: u64) -> Self {
        if lo <= hi {
            Counts::Range(lo, hi)
        } else {
            Counts::Empty
        }
    }

    fn intersect(self, other: Counts) -> Counts {
        use Counts::*;
        match (self, other) {
            (Empty, _) | (_, Empty) => Empty,
            (From(a), From(b)) => From(a.max(b)),
            (From(a), Range(lo, hi)) | (Range(lo, hi), From(a)) => Counts::range(lo.max(a), hi),
            (Range(a, b), Range(c, e)) => Counts::range(a.max(c), b.min(e)),
        }
    }

    fn min(self) -> Option<u64> {
        match self {
            Counts::Empty => None,
            Counts::Range(lo, _) | Counts::From(lo) => Some(lo),
        }
    }

    fn contains(self, v: u64) -> bool {
        match self {
            Counts::Empty => false,
            Counts::Range(lo, hi) => lo <= v && v <= hi,
            Counts::From(lo) => lo <= v,
        }
    }
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counts::Empty => f.write_str("{}"),
            Counts::Range(lo, hi) => write!(f, "[{lo},{hi}]"),
            Counts::From(lo) => write!(f, "[{lo},inf)"),
        }
    }
}

/// Matching-factor interval of one port for chosen multiplicity `[ml, mu]`
/// and degree `[dl, du]`, intersected with the naturals.
fn port_counts(n: u32, (ml, mu): (u32, u32), (dl, du): (u32, u32)) -> Counts {
    let (n, ml, mu, dl, du) = (
        u64::from(n),
        u64::from(ml),
        u64::from(mu),
        u64::from(dl),
        u64::from(du),
    );
    if mu == 0 {
        // The port never appears: any number of connectors, provided no
        // instance needs one.
        return if n * dl == 0 {
            Counts::From(0)
        } else {
            Counts::Empty
        };
    }
    let lo = Ratio::new(n * dl, mu).ceil().to_integer();
    if ml == 0 {
        Counts::From(lo)
    } else {
        Counts::range(lo, Ratio::new(n * du, ml).floor().to_integer())
    }
}

/// Consistency of an interval diagram (simple diagrams embed as singleton
/// intervals). Cardinalities are chosen once for the whole diagram; choice
/// functions are chosen per motif. The witness is the first satisfying
/// assignment in lexicographic order.
pub fn check_interval(d: &Diagram) -> ConsistencyReport {
    let assignments = d.cardinality_assignments();
    let outcomes = par::map(&assignments, |cards| {
        d.motifs
            .iter()
            .enumerate()
            .map(|(j, m)| interval_motif(j, m, cards))
            .collect::<Result<Vec<_>, _>>()
    });
    let mut first_failure = None;
    for (cards, outcome) in assignments.into_iter().zip(outcomes) {
        match outcome {
            Ok(motifs) => {
                return ConsistencyReport::ok(Witness {
                    cardinalities: cards,
                    motifs,
                })
            }
            Err(diag) => {
                first_failure.get_or_insert(diag);
            }
        }
    }
    ConsistencyReport::failed(first_failure.expect("at least one cardinality assignment"))
}

/// Chosen (multiplicity, degree) bounds of one port.
type Choice = ((u32, u32), (u32, u32));

fn interval_motif(
    j: usize,
    motif: &ConnectorMotif,
    cards: &Cardinalities,
) -> Result<MotifWitness, Diagnosis> {
    let ports: Vec<(&GenericPortRef, u32)> = motif
        .ports
        .keys()
        .map(|p| (p, cards[&p.type_name]))
        .collect();
    let per_port: Vec<Vec<Choice>> = motif
        .ports
        .values()
        .map(|c| {
            c.multiplicity
                .choices()
                .into_iter()
                .cartesian_product(c.degree.choices())
                .collect()
        })
        .collect();

    let mut first_failure = None;
    for combo in per_port.into_iter().multi_cartesian_product() {
        match evaluate_choice(j, &ports, &combo, cards) {
            Ok(w) => return Ok(w),
            Err(diag) => {
                first_failure.get_or_insert(diag);
            }
        }
    }
    Err(first_failure.expect("every interval offers at least one choice"))
}

fn evaluate_choice(
    j: usize,
    ports: &[(&GenericPortRef, u32)],
    combo: &[Choice],
    cards: &Cardinalities,
) -> Result<MotifWitness, Diagnosis> {
    let diag = |condition, port: Option<&GenericPortRef>, detail: String| Diagnosis {
        condition,
        motif: j,
        port: port.cloned(),
        cardinalities: cards.clone(),
        detail,
    };
    let counts: Vec<Counts> = ports
        .iter()
        .zip(combo)
        .map(|(&(_, n), &(m, deg))| port_counts(n, m, deg))
        .collect();
    let witness = |s: u64| MotifWitness {
        motif: j,
        ports: ports
            .iter()
            .zip(combo)
            .zip(&counts)
            .map(|((&(p, n), &(m, deg)), c)| PortChoice {
                port: p.clone(),
                cardinality: n,
                multiplicity: Interval::new(m.0, m.1),
                degree: Interval::new(deg.0, deg.1),
                matching_factors: c.to_string(),
            })
            .collect(),
        matching_factor: s,
    };

    let common = counts
        .iter()
        .fold(Counts::From(0), |acc, &c| acc.intersect(c));
    if common.contains(0) {
        return Ok(witness(0));
    }
    for (&(p, n), &((ml, _), _)) in ports.iter().zip(combo) {
        if ml > n {
            return Err(diag(
                Condition::MultiplicityVsCardinality,
                Some(p),
                format!("multiplicity lower bound {ml} of {p} exceeds cardinality {n}"),
            ));
        }
    }
    if common == Counts::Empty {
        let shown = ports
            .iter()
            .zip(&counts)
            .map(|((p, _), c)| format!("{p}: {c}"))
            .join(", ");
        let detail = match counts.as_slice() {
            [Counts::Range(a, b), Counts::Range(c, e)] if a == b && c == e => {
                format!("matching factors {a} ≠ {c}")
            }
            _ => format!("matching factor intervals do not intersect ({shown})"),
        };
        return Err(diag(Condition::MatchingFactorMismatch, None, detail));
    }
    let bound = ports
        .iter()
        .zip(combo)
        .fold(1u128, |acc, (&(_, n), &((ml, mu), _))| {
            let sum = (ml..=mu).fold(0u128, |s, m| s.saturating_add(binomial(n, m)));
            acc.saturating_mul(sum)
        });
    let bound = u64::try_from(bound).unwrap_or(u64::MAX);
    match common.intersect(Counts::range(1, bound)).min() {
        Some(s) => Ok(witness(s)),
        None => Err(diag(
            Condition::ConnectorCountBound,
            None,
            format!("no common matching factor in {common} is within the {bound} distinct connectors available"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ComponentType, PortConstraint, TypedInterval};

    fn two_types(n1: Interval, n2: Interval, p: PortConstraint, q: PortConstraint) -> Diagram {
        Diagram::new(
            "D",
            vec![
                ComponentType::new("T1", ["p"], n1),
                ComponentType::new("T2", ["q"], n2),
            ],
            vec![ConnectorMotif::new([
                (GenericPortRef::new("T1", "p"), p),
                (GenericPortRef::new("T2", "q"), q),
            ])],
        )
    }

    fn simple(n1: u32, mp: u32, dp: u32, n2: u32, mq: u32, dq: u32) -> Diagram {
        two_types(
            Interval::exact(n1),
            Interval::exact(n2),
            PortConstraint::exact(mp, dp),
            PortConstraint::exact(mq, dq),
        )
    }

    #[test]
    fn mismatched_matching_factors() {
        let r = check_simple(&simple(3, 1, 1, 2, 1, 1)).unwrap();
        assert!(!r.consistent);
        assert!(r.witness.is_none());
        let diag = r.diagnosis.unwrap();
        assert_eq!(diag.condition, Condition::MatchingFactorMismatch);
        assert_eq!(diag.detail, "matching factors 3 ≠ 2");
    }

    #[test]
    fn quaternary_synchronisation_is_consistent() {
        let r = check_simple(&simple(1, 1, 1, 3, 3, 1)).unwrap();
        assert!(r.consistent);
        assert_eq!(r.witness.unwrap().motifs[0].matching_factor, 1);
    }

    #[test]
    fn multiplicity_above_cardinality() {
        let r = check_simple(&simple(4, 5, 5, 4, 1, 1)).unwrap();
        assert_eq!(
            r.diagnosis.unwrap().condition,
            Condition::MultiplicityVsCardinality
        );
    }

    #[test]
    fn too_few_distinct_connectors() {
        // s = 2 but only one connector p1p2q1q2 exists.
        let r = check_simple(&simple(2, 2, 2, 2, 2, 2)).unwrap();
        assert_eq!(
            r.diagnosis.unwrap().condition,
            Condition::ConnectorCountBound
        );
    }

    #[test]
    fn non_integer_matching_factor() {
        let r = check_simple(&simple(4, 3, 1, 4, 3, 1)).unwrap();
        let diag = r.diagnosis.unwrap();
        assert_eq!(diag.condition, Condition::MatchingFactorMismatch);
        assert!(diag.detail.contains("4/3"), "{}", diag.detail);
    }

    #[test]
    fn zero_degrees_admit_the_empty_configuration() {
        // Multiplicity exceeds cardinality, but nothing needs a connector.
        let r = check_simple(&simple(1, 2, 0, 1, 1, 0)).unwrap();
        assert!(r.consistent);
        assert_eq!(r.witness.unwrap().motifs[0].matching_factor, 0);
        assert!(check_interval(&simple(1, 2, 0, 1, 1, 0)).consistent);
    }

    #[test]
    fn check_simple_rejects_interval_diagrams() {
        let d = two_types(
            Interval::exact(2),
            Interval::exact(2),
            PortConstraint::new(TypedInterval::exact(1), TypedInterval::mc(0, 2)),
            PortConstraint::exact(1, 1),
        );
        assert!(check_simple(&d).is_err());
    }

    #[test]
    fn master_slave_interval_diagrams() {
        // sc[1,5] master degree, mc[0,1] slave degree, n = 2, 5.
        let uniform = two_types(
            Interval::exact(2),
            Interval::exact(5),
            PortConstraint::new(TypedInterval::exact(1), TypedInterval::sc(1, 5)),
            PortConstraint::new(TypedInterval::exact(1), TypedInterval::mc(0, 1)),
        );
        let r = check_interval(&uniform);
        assert!(r.consistent, "{r:?}");

        let one_master = two_types(
            Interval::exact(2),
            Interval::exact(2),
            PortConstraint::new(TypedInterval::exact(1), TypedInterval::mc(0, 2)),
            PortConstraint::exact(1, 1),
        );
        let r = check_interval(&one_master);
        assert_eq!(r.witness.unwrap().motifs[0].matching_factor, 2);
    }

    #[test]
    fn singleton_embedding_agrees() {
        let d = simple(3, 1, 1, 2, 1, 1);
        let r = check_interval(&d);
        assert!(!r.consistent);
        assert_eq!(r.diagnosis.unwrap().detail, "matching factors 3 ≠ 2");
        assert!(check_interval(&simple(1, 1, 1, 3, 3, 1)).consistent);
    }

    #[test]
    fn cardinality_search_finds_a_fit() {
        // Needs n1 = n2; only (2,2) and (3,3) among the choices.
        let d = two_types(
            Interval::new(2, 3),
            Interval::new(1, 2),
            PortConstraint::exact(1, 1),
            PortConstraint::exact(1, 1),
        );
        let r = check_interval(&d);
        let w = r.witness.unwrap();
        assert_eq!(w.cardinalities["T1"], 2);
        assert_eq!(w.cardinalities["T2"], 2);
    }

    #[test]
    fn counts_arithmetic() {
        assert_eq!(port_counts(4, (2, 2), (2, 2)), Counts::Range(4, 4));
        assert_eq!(port_counts(2, (0, 1), (1, 1)), Counts::From(2));
        assert_eq!(port_counts(4, (3, 3), (1, 1)), Counts::Empty);
        assert_eq!(port_counts(3, (0, 0), (0, 2)), Counts::From(0));
        assert_eq!(port_counts(3, (0, 0), (1, 2)), Counts::Empty);
        assert_eq!(
            Counts::From(3).intersect(Counts::Range(1, 2)),
            Counts::Empty
        );
    }
}

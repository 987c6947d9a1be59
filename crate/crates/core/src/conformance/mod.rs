//! Conformance of an architecture to a diagram.
//!
//! [`verify`] runs three stages: component counts against cardinalities,
//! partition of the configuration by connector multiplicities, and per-motif
//! degree checks. For simple diagrams every connector matches at most one
//! motif, so the partition is found greedily and the whole check is
//! polynomial. Interval diagrams add membership tests, uniformity checks for
//! `sc` intervals, and a backtracking search for connectors that match more
//! than one motif (only possible with multiplicity lower bound 0).
//!
//! Degrees are checked for every instance of every motif port, including
//! instances that appear in no connector of the motif.

mod semantic;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::model::{
    Architecture, ChoiceKind, Configuration, Connector, ConnectorMotif, Diagram, GenericPortRef,
    PortInstance,
};

pub use semantic::{semantic_conforms, OracleLimit, SEMANTIC_ASSIGNMENT_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Cardinality,
    MultiplicityPartition,
    Degree,
    ScUniformity,
    DisjointPartition,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Cardinality => "cardinality",
            Stage::MultiplicityPartition => "multiplicity-partition",
            Stage::Degree => "degree",
            Stage::ScUniformity => "sc-uniformity",
            Stage::DisjointPartition => "disjoint-partition",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub stage: Stage,
    /// Offending type, connector, or port instance.
    pub entity: String,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}: expected {}, found {}",
            self.stage, self.entity, self.expected, self.actual
        )
    }
}

/// How the partition was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchPath {
    Greedy,
    Backtracking,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConformanceVerdict {
    pub conforms: bool,
    pub failure: Option<Failure>,
    /// Sub-configuration assigned to each motif, by motif index.
    pub partition: Option<Vec<Configuration>>,
    pub path: SearchPath,
}

impl ConformanceVerdict {
    fn fail(failure: Failure, path: SearchPath) -> Self {
        Self {
            conforms: false,
            failure: Some(failure),
            partition: None,
            path,
        }
    }
}

/// Checks that every type of `d` has an admissible number of components and
/// that every component has a type known to `d`.
pub fn verify_cardinality(
    components: &BTreeMap<String, String>,
    d: &Diagram,
) -> Result<(), Failure> {
    let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
    for (id, t) in components {
        if d.component_type(t).is_none() {
            return Err(Failure {
                stage: Stage::Cardinality,
                entity: id.clone(),
                expected: "a component type of the diagram".into(),
                actual: format!("unknown type `{t}`"),
            });
        }
        *counts.entry(t.as_str()).or_default() += 1;
    }
    for t in &d.types {
        let count = counts.get(t.name.as_str()).copied().unwrap_or(0);
        if !t.cardinality.contains(count) {
            return Err(Failure {
                stage: Stage::Cardinality,
                entity: t.name.clone(),
                expected: t.cardinality.to_string(),
                actual: count.to_string(),
            });
        }
    }
    Ok(())
}

/// Number of instances of every generic port in a connector, or `None` if
/// some port instance does not resolve.
fn port_counts(
    conn: &Connector,
    a: &Architecture,
    d: &Diagram,
) -> Option<BTreeMap<GenericPortRef, u32>> {
    let mut counts = BTreeMap::new();
    for p in conn.iter() {
        let g = a.generic(p)?;
        if !d.has_port(&g) {
            return None;
        }
        *counts.entry(g).or_default() += 1;
    }
    Some(counts)
}

fn matches(counts: &BTreeMap<GenericPortRef, u32>, motif: &ConnectorMotif) -> bool {
    counts.iter().all(|(g, &k)| {
        motif
            .ports
            .get(g)
            .is_some_and(|c| c.multiplicity.contains(k))
    }) && motif
        .ports
        .iter()
        .all(|(g, c)| counts.contains_key(g) || c.multiplicity.lo == 0)
}

/// Motifs whose multiplicity constraints a connector satisfies.
pub fn candidate_motifs(conn: &Connector, a: &Architecture, d: &Diagram) -> Vec<usize> {
    let Some(counts) = port_counts(conn, a, d) else {
        return Vec::new();
    };
    d.motifs
        .iter()
        .enumerate()
        .filter(|(_, m)| matches(&counts, m))
        .map(|(j, _)| j)
        .collect()
}

/// Greedy partition: every connector goes to the first motif whose
/// multiplicities it satisfies. `None` if some connector matches no motif.
pub fn verify_multiplicity(a: &Architecture, d: &Diagram) -> Option<Vec<Configuration>> {
    let mut partition = vec![Configuration::new(); d.motifs.len()];
    for conn in &a.configuration {
        let j = *candidate_motifs(conn, a, d).first()?;
        partition[j].insert(conn.clone());
    }
    Some(partition)
}

/// Degree and `sc`-uniformity checks of one motif's sub-configuration.
pub fn verify_degree(
    gamma: &Configuration,
    motif: &ConnectorMotif,
    a: &Architecture,
) -> Result<(), Failure> {
    let mut degrees: BTreeMap<PortInstance, u32> = BTreeMap::new();
    for conn in gamma {
        for p in conn.iter() {
            *degrees.entry(p.clone()).or_default() += 1;
        }
    }
    let instance_degrees = |g: &GenericPortRef| -> Vec<(PortInstance, u32)> {
        a.instances_of(&g.type_name)
            .map(|id| {
                let p = PortInstance::new(id, g.port_name.clone());
                let k = degrees.get(&p).copied().unwrap_or(0);
                (p, k)
            })
            .collect()
    };

    for (g, c) in &motif.ports {
        for (p, k) in instance_degrees(g) {
            if !c.degree.contains(k) {
                return Err(Failure {
                    stage: Stage::Degree,
                    entity: p.to_string(),
                    expected: c.degree.to_string(),
                    actual: k.to_string(),
                });
            }
        }
    }
    for (g, c) in &motif.ports {
        if c.degree.kind == ChoiceKind::Sc {
            let ds = instance_degrees(g);
            if let Some((p, k)) = ds.iter().find(|(_, k)| *k != ds[0].1) {
                return Err(Failure {
                    stage: Stage::ScUniformity,
                    entity: p.to_string(),
                    expected: format!("degree {} shared by every instance of {g}", ds[0].1),
                    actual: k.to_string(),
                });
            }
        }
        if c.multiplicity.kind == ChoiceKind::Sc {
            let mut seen: Option<(u32, &Connector)> = None;
            for conn in gamma {
                let k = conn
                    .iter()
                    .filter(|p| {
                        a.type_of(&p.component) == Some(g.type_name.as_str())
                            && p.port == g.port_name
                    })
                    .count() as u32;
                match seen {
                    None => seen = Some((k, conn)),
                    Some((k0, _)) if k0 != k => {
                        return Err(Failure {
                            stage: Stage::ScUniformity,
                            entity: conn.to_string(),
                            expected: format!("multiplicity {k0} of {g} in every connector"),
                            actual: k.to_string(),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(())
}

fn check_all(partition: &[Configuration], a: &Architecture, d: &Diagram) -> Result<(), Failure> {
    for (gamma, motif) in partition.iter().zip(&d.motifs) {
        verify_degree(gamma, motif, a)?;
    }
    Ok(())
}

/// Full conformance check.
pub fn verify(a: &Architecture, d: &Diagram) -> ConformanceVerdict {
    if let Err(f) = verify_cardinality(&a.components, d) {
        return ConformanceVerdict::fail(f, SearchPath::Greedy);
    }

    let mut candidates = Vec::with_capacity(a.configuration.len());
    for conn in &a.configuration {
        let c = candidate_motifs(conn, a, d);
        if c.is_empty() {
            return ConformanceVerdict::fail(
                Failure {
                    stage: Stage::MultiplicityPartition,
                    entity: conn.to_string(),
                    expected: "a connector satisfying the multiplicities of some motif".into(),
                    actual: describe_counts(conn, a),
                },
                SearchPath::Greedy,
            );
        }
        candidates.push((conn, c));
    }

    if candidates.iter().all(|(_, c)| c.len() == 1) {
        let mut partition = vec![Configuration::new(); d.motifs.len()];
        for (conn, c) in candidates {
            partition[c[0]].insert(conn.clone());
        }
        return match check_all(&partition, a, d) {
            Ok(()) => ConformanceVerdict {
                conforms: true,
                failure: None,
                partition: Some(partition),
                path: SearchPath::Greedy,
            },
            Err(f) => ConformanceVerdict::fail(f, SearchPath::Greedy),
        };
    }

    let mut partition = vec![Configuration::new(); d.motifs.len()];
    let mut ambiguous = Vec::new();
    for (conn, c) in candidates {
        if c.len() == 1 {
            partition[c[0]].insert(conn.clone());
        } else {
            ambiguous.push((conn, c));
        }
    }
    let mut search = Backtrack {
        a,
        d,
        ambiguous: &ambiguous,
        partition,
    };
    match search.run(0) {
        Some(partition) => ConformanceVerdict {
            conforms: true,
            failure: None,
            partition: Some(partition),
            path: SearchPath::Backtracking,
        },
        None => ConformanceVerdict::fail(
            Failure {
                stage: Stage::DisjointPartition,
                entity: format!("{} connectors matching several motifs", ambiguous.len()),
                expected: "an assignment to motifs meeting every degree constraint".into(),
                actual: "none".into(),
            },
            SearchPath::Backtracking,
        ),
    }
}

fn describe_counts(conn: &Connector, a: &Architecture) -> String {
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for p in conn.iter() {
        let key = match a.generic(p) {
            Some(g) => g.to_string(),
            None => format!("{p} (unresolved)"),
        };
        *counts.entry(key).or_default() += 1;
    }
    counts
        .iter()
        .map(|(g, k)| format!("{k} x {g}"))
        .collect::<Vec<_>>()
        .join(", ")
}

struct Backtrack<'a> {
    a: &'a Architecture,
    d: &'a Diagram,
    ambiguous: &'a [(&'a Connector, Vec<usize>)],
    partition: Vec<Configuration>,
}

impl Backtrack<'_> {
    fn degree_overflow(&self, j: usize) -> bool {
        let motif = &self.d.motifs[j];
        let mut degrees: BTreeMap<&PortInstance, u32> = BTreeMap::new();
        for conn in &self.partition[j] {
            for p in conn.iter() {
                *degrees.entry(p).or_default() += 1;
            }
        }
        degrees.iter().any(|(p, &k)| {
            self.a
                .generic(p)
                .and_then(|g| motif.ports.get(&g))
                .is_some_and(|c| k > c.degree.hi)
        })
    }

    fn run(&mut self, k: usize) -> Option<Vec<Configuration>> {
        if k == self.ambiguous.len() {
            return check_all(&self.partition, self.a, self.d)
                .is_ok()
                .then(|| self.partition.clone());
        }
        let (conn, cands) = &self.ambiguous[k];
        for &j in cands {
            self.partition[j].insert((*conn).clone());
            if !self.degree_overflow(j) {
                if let Some(p) = self.run(k + 1) {
                    return Some(p);
                }
            }
            self.partition[j].remove(*conn);
        }
        None
    }
}

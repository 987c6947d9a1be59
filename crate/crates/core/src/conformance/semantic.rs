//! Conformance decided straight from the definition, by trying every
//! assignment of connectors to motifs. Exponential; used as a test oracle for
//! [`super::verify`] and by the brute-force enumerator.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{Architecture, ChoiceKind, Diagram};

/// Largest number of connector-to-motif assignments tried.
pub const SEMANTIC_ASSIGNMENT_LIMIT: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("oracle limit: {assignments} assignments of {connectors} connectors exceed {limit}")]
pub struct OracleLimit {
    pub connectors: usize,
    pub assignments: u128,
    pub limit: u128,
}

/// True iff the architecture conforms to the diagram.
///
/// Instances whose connector fits no motif make the answer false at once.
/// Up to 15 connectors are always searched; beyond that the number of
/// assignments must stay within [`SEMANTIC_ASSIGNMENT_LIMIT`].
pub fn semantic_conforms(a: &Architecture, d: &Diagram) -> Result<bool, OracleLimit> {
    // Component counts.
    for t in a.components.values() {
        if !d.types.iter().any(|ty| &ty.name == t) {
            return Ok(false);
        }
    }
    for ty in &d.types {
        let n = a.components.values().filter(|t| **t == ty.name).count() as u32;
        if n < ty.cardinality.lo || n > ty.cardinality.hi {
            return Ok(false);
        }
    }

    let connectors: Vec<_> = a.configuration.iter().collect();
    // For every connector, the motifs it may belong to: same generic ports
    // (ports with zero instances may be missing), counts within multiplicity.
    let mut options: Vec<Vec<usize>> = Vec::with_capacity(connectors.len());
    for conn in &connectors {
        let mut per_port: BTreeMap<(String, String), u32> = BTreeMap::new();
        for p in conn.iter() {
            let Some(t) = a.components.get(&p.component) else {
                return Ok(false);
            };
            *per_port.entry((t.clone(), p.port.clone())).or_insert(0) += 1;
        }
        let mut fits = Vec::new();
        'motifs: for (j, motif) in d.motifs.iter().enumerate() {
            for ((t, port), k) in &per_port {
                let hit = motif
                    .ports
                    .iter()
                    .find(|(g, _)| &g.type_name == t && &g.port_name == port);
                match hit {
                    Some((_, c)) if c.multiplicity.lo <= *k && *k <= c.multiplicity.hi => {}
                    _ => continue 'motifs,
                }
            }
            for (g, c) in &motif.ports {
                if !per_port.contains_key(&(g.type_name.clone(), g.port_name.clone()))
                    && c.multiplicity.lo > 0
                {
                    continue 'motifs;
                }
            }
            fits.push(j);
        }
        if fits.is_empty() {
            return Ok(false);
        }
        options.push(fits);
    }

    let total = options
        .iter()
        .fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128));
    if connectors.len() > 15 && total > SEMANTIC_ASSIGNMENT_LIMIT {
        return Err(OracleLimit {
            connectors: connectors.len(),
            assignments: total,
            limit: SEMANTIC_ASSIGNMENT_LIMIT,
        });
    }

    // Odometer over all assignments.
    let mut choice = vec![0usize; connectors.len()];
    loop {
        let assignment: Vec<usize> = choice.iter().zip(&options).map(|(&c, o)| o[c]).collect();
        if assignment_ok(a, d, &connectors, &assignment) {
            return Ok(true);
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(false);
            }
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn assignment_ok(
    a: &Architecture,
    d: &Diagram,
    connectors: &[&crate::model::Connector],
    assignment: &[usize],
) -> bool {
    for (j, motif) in d.motifs.iter().enumerate() {
        let mine: Vec<_> = connectors
            .iter()
            .zip(assignment)
            .filter(|(_, &m)| m == j)
            .map(|(c, _)| *c)
            .collect();
        for (g, c) in &motif.ports {
            let instances: Vec<&String> = a
                .components
                .iter()
                .filter(|(_, t)| **t == g.type_name)
                .map(|(id, _)| id)
                .collect();
            // Multiplicity uniformity for single choice.
            if c.multiplicity.kind == ChoiceKind::Sc {
                let sizes: Vec<usize> = mine
                    .iter()
                    .map(|conn| {
                        conn.iter()
                            .filter(|p| instances.contains(&&p.component) && p.port == g.port_name)
                            .count()
                    })
                    .collect();
                if sizes.windows(2).any(|w| w[0] != w[1]) {
                    return false;
                }
            }
            let degrees: Vec<u32> = instances
                .iter()
                .map(|id| {
                    mine.iter()
                        .filter(|conn| {
                            conn.iter()
                                .any(|p| &&p.component == id && p.port == g.port_name)
                        })
                        .count() as u32
                })
                .collect();
            if degrees.iter().any(|&k| k < c.degree.lo || k > c.degree.hi) {
                return false;
            }
            if c.degree.kind == ChoiceKind::Sc && degrees.windows(2).any(|w| w[0] != w[1]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        ComponentType, Connector, ConnectorMotif, GenericPortRef, Interval, PortConstraint,
        PortInstance,
    };

    fn quaternary_diagram() -> Diagram {
        Diagram::new(
            "Quaternary",
            vec![
                ComponentType::new("T1", ["p"], Interval::exact(1)),
                ComponentType::new("T2", ["q"], Interval::exact(3)),
            ],
            vec![ConnectorMotif::new([
                (GenericPortRef::new("T1", "p"), PortConstraint::exact(1, 1)),
                (GenericPortRef::new("T2", "q"), PortConstraint::exact(3, 1)),
            ])],
        )
    }

    fn quaternary() -> Architecture {
        let cards = [("T1".to_string(), 1), ("T2".to_string(), 3)].into();
        let conn = Connector::new([
            PortInstance::new("T1#1", "p"),
            PortInstance::new("T2#1", "q"),
            PortInstance::new("T2#2", "q"),
            PortInstance::new("T2#3", "q"),
        ])
        .unwrap();
        Architecture::with_instances("A", "Quaternary", &cards, [conn].into())
    }

    #[test]
    fn quaternary_conforms() {
        assert_eq!(
            semantic_conforms(&quaternary(), &quaternary_diagram()),
            Ok(true)
        );
    }

    #[test]
    fn stray_connector_breaks_conformance() {
        let mut a = quaternary();
        a.configuration
            .insert(Connector::new([PortInstance::new("T2#1", "q")]).unwrap());
        assert_eq!(semantic_conforms(&a, &quaternary_diagram()), Ok(false));
    }

    #[test]
    fn wrong_counts() {
        let mut a = quaternary();
        a.components.insert("T2#4".into(), "T2".into());
        assert_eq!(semantic_conforms(&a, &quaternary_diagram()), Ok(false));
    }
}

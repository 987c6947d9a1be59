//! Brute-force enumeration of conforming architectures.
//!
//! The universe is every connector that fits the multiplicities of some
//! motif. Every subset of the universe is tested with
//! [`semantic_conforms`]. This shares nothing with the synthesis or the
//! polynomial checker beyond the model types, which is what makes it useful
//! as ground truth.

use std::collections::BTreeSet;
use std::sync::Mutex;

use thiserror::Error;

use crate::conformance::{semantic_conforms, OracleLimit};
use crate::model::{
    instance_id, Architecture, Cardinalities, Configuration, Connector, Diagram, PortInstance,
};
use crate::par;

/// Largest universe enumerated by default (`2^20` subsets).
pub const DEFAULT_UNIVERSE_LIMIT: usize = 20;

/// Environment variable overriding [`DEFAULT_UNIVERSE_LIMIT`] in the CLI.
pub const LIMIT_ENV: &str = "ARCHDIA_ORACLE_LIMIT";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle limit: universe of {size} connectors exceeds limit {limit}")]
    UniverseTooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Assignments(#[from] OracleLimit),
    #[error("no cardinality given for type `{0}`")]
    MissingCardinality(String),
}

/// Every candidate connector, in canonical order.
pub fn universe(d: &Diagram, cards: &Cardinalities) -> Result<Vec<Connector>, OracleError> {
    let mut all = BTreeSet::new();
    for motif in &d.motifs {
        // Per port: every subset of its instances with an admissible size.
        let mut per_port: Vec<Vec<Vec<PortInstance>>> = Vec::new();
        for (g, c) in &motif.ports {
            let n = *cards
                .get(&g.type_name)
                .ok_or_else(|| OracleError::MissingCardinality(g.type_name.clone()))?;
            let mut subsets = Vec::new();
            for mask in 0u64..(1u64 << n) {
                let k = mask.count_ones();
                if k < c.multiplicity.lo || k > c.multiplicity.hi {
                    continue;
                }
                subsets.push(
                    (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| {
                            PortInstance::new(
                                instance_id(&g.type_name, i as usize + 1),
                                g.port_name.clone(),
                            )
                        })
                        .collect(),
                );
            }
            per_port.push(subsets);
        }
        let mut partial: Vec<Vec<PortInstance>> = vec![Vec::new()];
        for subsets in &per_port {
            let mut next = Vec::new();
            for p in &partial {
                for s in subsets {
                    let mut v = p.clone();
                    v.extend(s.iter().cloned());
                    next.push(v);
                }
            }
            partial = next;
        }
        for ports in partial {
            if let Ok(c) = Connector::new(ports) {
                all.insert(c);
            }
        }
    }
    Ok(all.into_iter().collect())
}

pub fn brute_force(d: &Diagram, cards: &Cardinalities) -> Result<Vec<Architecture>, OracleError> {
    brute_force_with_limit(d, cards, DEFAULT_UNIVERSE_LIMIT)
}

/// All conforming architectures with the given cardinalities, in canonical
/// order. Fails if the universe has more than `limit` connectors.
pub fn brute_force_with_limit(
    d: &Diagram,
    cards: &Cardinalities,
    limit: usize,
) -> Result<Vec<Architecture>, OracleError> {
    let universe = universe(d, cards)?;
    if universe.len() > limit || universe.len() >= 64 {
        return Err(OracleError::UniverseTooLarge {
            size: universe.len(),
            limit,
        });
    }
    let base =
        Architecture::with_instances(String::new(), d.name.clone(), cards, Configuration::new());

    // Cheap necessary condition: an instance's total degree is bounded by the
    // sums of the degree bounds over the motifs containing its port.
    let mut bounds: Vec<(u64, u32, u32)> = Vec::new();
    for (id, t) in &base.components {
        let ty = d.component_type(t).expect("cards name diagram types");
        for port in &ty.ports {
            let (mut lo, mut hi) = (0u32, 0u32);
            for m in &d.motifs {
                if let Some((_, c)) = m
                    .ports
                    .iter()
                    .find(|(g, _)| &g.type_name == t && &g.port_name == port)
                {
                    lo += c.degree.lo;
                    hi += c.degree.hi;
                }
            }
            let p = PortInstance::new(id.clone(), port.clone());
            let mask = universe
                .iter()
                .enumerate()
                .filter(|(_, c)| c.contains(&p))
                .fold(0u64, |acc, (k, _)| acc | 1 << k);
            bounds.push((mask, lo, hi));
        }
    }

    let error: Mutex<Option<OracleLimit>> = Mutex::new(None);
    let hits = par::filter_range(1u64 << universe.len(), |subset| {
        let plausible = bounds.iter().all(|&(mask, lo, hi)| {
            let k = (mask & subset).count_ones();
            lo <= k && k <= hi
        });
        if !plausible {
            return false;
        }
        let mut a = base.clone();
        a.configuration = universe
            .iter()
            .enumerate()
            .filter(|(k, _)| subset >> k & 1 == 1)
            .map(|(_, c)| c.clone())
            .collect();
        match semantic_conforms(&a, d) {
            Ok(v) => v,
            Err(e) => {
                error.lock().expect("oracle error lock").get_or_insert(e);
                false
            }
        }
    });
    if let Some(e) = error.into_inner().expect("oracle error lock") {
        return Err(e.into());
    }

    let mut out: Vec<Architecture> = hits
        .into_iter()
        .map(|subset| {
            let mut a = base.clone();
            a.configuration = universe
                .iter()
                .enumerate()
                .filter(|(k, _)| subset >> k & 1 == 1)
                .map(|(_, c)| c.clone())
                .collect();
            a
        })
        .collect();
    out.sort_by(|a, b| a.shape_key().cmp(&b.shape_key()));
    for (k, a) in out.iter_mut().enumerate() {
        a.name = format!("{}_{}", d.name, k + 1);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        ComponentType, ConnectorMotif, GenericPortRef, Interval, PortConstraint, TypedInterval,
    };

    fn pq(n1: u32, p: PortConstraint, n2: u32, q: PortConstraint) -> (Diagram, Cardinalities) {
        let d = Diagram::new(
            "D",
            vec![
                ComponentType::new("T1", ["p"], Interval::exact(n1)),
                ComponentType::new("T2", ["q"], Interval::exact(n2)),
            ],
            vec![ConnectorMotif::new([
                (GenericPortRef::new("T1", "p"), p),
                (GenericPortRef::new("T2", "q"), q),
            ])],
        );
        let cards = d.lower_cardinalities();
        (d, cards)
    }

    #[test]
    fn master_slave_universe_and_configurations() {
        let (d, cards) = pq(
            2,
            PortConstraint::new(TypedInterval::exact(1), TypedInterval::mc(0, 2)),
            2,
            PortConstraint::exact(1, 1),
        );
        assert_eq!(universe(&d, &cards).unwrap().len(), 4);
        assert_eq!(brute_force(&d, &cards).unwrap().len(), 4);
    }

    #[test]
    fn quaternary_is_unique() {
        let (d, cards) = pq(
            1,
            PortConstraint::exact(1, 1),
            3,
            PortConstraint::exact(3, 1),
        );
        let got = brute_force(&d, &cards).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].configuration.len(), 1);
    }

    #[test]
    fn inconsistent_diagram_has_no_architecture() {
        let (d, cards) = pq(
            3,
            PortConstraint::exact(1, 1),
            2,
            PortConstraint::exact(1, 1),
        );
        assert!(brute_force(&d, &cards).unwrap().is_empty());
    }

    #[test]
    fn universe_limit() {
        let (d, cards) = pq(
            3,
            PortConstraint::exact(1, 1),
            3,
            PortConstraint::exact(1, 1),
        );
        assert_eq!(
            brute_force_with_limit(&d, &cards, 8),
            Err(OracleError::UniverseTooLarge { size: 9, limit: 8 })
        );
    }
}

//! Synthesis of every conforming architecture at a fixed scale.
//!
//! For each motif, every port first gets its regular configurations (count
//! vectors `X` over that port's support index, see [`crate::regular`]). One
//! vector is picked per port and the vectors are fused through a 0/1 tensor
//! `E` whose axis marginals equal the chosen vectors: every 1-entry
//! `(i_1, …, i_v)` is the connector `a¹_{i_1} ∪ … ∪ aᵛ_{i_v}`. Because `E` is
//! 0/1 the fused connectors are pairwise distinct. Required and forbidden
//! connectors fix entries of `E` to 1 and 0.
//!
//! Motif configurations are then combined across motifs, keeping only
//! pairwise disjoint combinations, for every admissible cardinality
//! assignment.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use thiserror::Error;

use crate::model::{
    instance_id, split_instance_id, Architecture, Cardinalities, Configuration, Connector,
    ConnectorMotif, Diagram, GenericPortRef, Interval, PortInstance,
};
use crate::par;
use crate::regular::{enumerate_regular, RegularConfig, Support};

/// Set of connectors contributed by one motif.
pub type MotifConfiguration = Configuration;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("connector `{0}` is both required and forbidden")]
    Conflict(Connector),
    #[error("constraint outside motif shape: `{0}`")]
    OutsideMotif(Connector),
    #[error("unknown component type `{0}`")]
    UnknownType(String),
    #[error("cardinality {n} for `{type_name}` is outside the diagram interval {interval}")]
    CardinalityOutOfRange {
        type_name: String,
        n: u32,
        interval: Interval,
    },
}

/// Extra constraints on synthesis: connectors that must or must not appear,
/// and optionally fixed cardinalities for some types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynthesisConstraints {
    required: BTreeSet<Connector>,
    forbidden: BTreeSet<Connector>,
    cardinalities: Cardinalities,
}

impl SynthesisConstraints {
    pub fn new(
        required: impl IntoIterator<Item = Connector>,
        forbidden: impl IntoIterator<Item = Connector>,
    ) -> Result<Self, SynthesisError> {
        let required: BTreeSet<_> = required.into_iter().collect();
        let forbidden: BTreeSet<_> = forbidden.into_iter().collect();
        if let Some(c) = required.intersection(&forbidden).next() {
            return Err(SynthesisError::Conflict(c.clone()));
        }
        Ok(Self {
            required,
            forbidden,
            cardinalities: Cardinalities::new(),
        })
    }

    pub fn with_cardinalities(mut self, cards: Cardinalities) -> Self {
        self.cardinalities = cards;
        self
    }

    pub fn required(&self) -> &BTreeSet<Connector> {
        &self.required
    }

    pub fn forbidden(&self) -> &BTreeSet<Connector> {
        &self.forbidden
    }

    pub fn cardinalities(&self) -> &Cardinalities {
        &self.cardinalities
    }
}

/// A 0/1 tensor, stored as the sorted list of its 1-entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FusionTensor {
    pub shape: Vec<usize>,
    pub ones: Vec<Vec<usize>>,
}

impl FusionTensor {
    pub fn get(&self, cell: &[usize]) -> bool {
        self.ones
            .binary_search_by(|c| c.as_slice().cmp(cell))
            .is_ok()
    }

    /// Sum over all axes but `axis`, for every index of `axis`.
    pub fn marginal(&self, axis: usize) -> Vec<u32> {
        let mut m = vec![0u32; self.shape[axis]];
        for c in &self.ones {
            m[c[axis]] += 1;
        }
        m
    }

    pub fn total(&self) -> usize {
        self.ones.len()
    }
}

/// Every 0/1 tensor whose marginal along axis `j` equals `axes[j].counts`,
/// with `forced_one` entries set and `forced_zero` entries cleared.
///
/// An axis index holding the empty support has a free marginal; entries
/// whose coordinates are all empty supports are excluded (a connector has at
/// least one port instance).
pub fn fuse(
    axes: &[&RegularConfig],
    forced_one: &[Vec<usize>],
    forced_zero: &[Vec<usize>],
) -> Vec<FusionTensor> {
    let shape: Vec<usize> = axes.iter().map(|a| a.index.len()).collect();
    let free: Vec<Option<usize>> = axes
        .iter()
        .map(|a| a.index.has_empty().then_some(0))
        .collect();
    let usable = |j: usize, i: usize| free[j] == Some(i) || axes[j].counts[i] > 0;
    let forced_zero: BTreeSet<&[usize]> = forced_zero.iter().map(Vec::as_slice).collect();

    let cells: Vec<Vec<usize>> = shape
        .iter()
        .map(|&w| 0..w)
        .multi_cartesian_product()
        .filter(|cell| cell.iter().enumerate().all(|(j, &i)| usable(j, i)))
        .filter(|cell| cell.iter().enumerate().any(|(j, &i)| free[j] != Some(i)))
        .filter(|cell| !forced_zero.contains(cell.as_slice()))
        .collect();
    // `multi_cartesian_product` of zero axes yields nothing; a motif always
    // has at least one port, so `cells` is well defined.

    let mut required: Vec<usize> = Vec::with_capacity(forced_one.len());
    for f in forced_one {
        match cells.binary_search(f) {
            Ok(k) => required.push(k),
            Err(_) => return Vec::new(),
        }
    }
    required.sort_unstable();
    required.dedup();

    let residual: Vec<Vec<u32>> = axes.iter().map(|a| a.counts.clone()).collect();
    let remaining: u64 = axes
        .iter()
        .enumerate()
        .map(|(j, a)| {
            a.counts
                .iter()
                .enumerate()
                .filter(|&(i, _)| free[j] != Some(i))
                .map(|(_, &c)| u64::from(c))
                .sum::<u64>()
        })
        .sum();

    let mut search = FusionSearch {
        cells: &cells,
        free: &free,
        required: &required,
        residual,
        remaining,
        chosen: Vec::new(),
        out: Vec::new(),
    };
    search.extend(0, 0);
    search
        .out
        .into_iter()
        .map(|ks| FusionTensor {
            shape: shape.clone(),
            ones: ks.into_iter().map(|k| cells[k].clone()).collect(),
        })
        .collect()
}

struct FusionSearch<'a> {
    cells: &'a [Vec<usize>],
    free: &'a [Option<usize>],
    /// Positions in `cells` forced to 1, ascending.
    required: &'a [usize],
    residual: Vec<Vec<u32>>,
    /// Sum of the residuals of all bounded axis indices.
    remaining: u64,
    chosen: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl FusionSearch<'_> {
    fn bounded(&self, j: usize, i: usize) -> bool {
        self.free[j] != Some(i)
    }

    fn extend(&mut self, start: usize, next_required: usize) {
        if self.remaining == 0 {
            if next_required == self.required.len() {
                self.out.push(self.chosen.clone());
            }
            return;
        }
        let end = match self.required.get(next_required) {
            Some(&r) => r + 1,
            None => self.cells.len(),
        };
        for k in start..end {
            let cell = &self.cells[k];
            // Cells are in lexicographic order, so axis-0 indices below the
            // current one can no longer be covered.
            let first = cell[0];
            let stranded = (0..first).any(|i| self.bounded(0, i) && self.residual[0][i] > 0);
            if stranded {
                break;
            }
            let fits = cell
                .iter()
                .enumerate()
                .all(|(j, &i)| !self.bounded(j, i) || self.residual[j][i] > 0);
            if !fits {
                continue;
            }
            let taken: u64 = cell
                .iter()
                .enumerate()
                .filter(|&(j, &i)| self.bounded(j, i))
                .count() as u64;
            for (j, &i) in cell.iter().enumerate() {
                if self.bounded(j, i) {
                    self.residual[j][i] -= 1;
                }
            }
            self.remaining -= taken;
            self.chosen.push(k);
            let nr = if Some(&k) == self.required.get(next_required) {
                next_required + 1
            } else {
                next_required
            };
            self.extend(k + 1, nr);
            self.chosen.pop();
            self.remaining += taken;
            for (j, &i) in cell.iter().enumerate() {
                if self.bounded(j, i) {
                    self.residual[j][i] += 1;
                }
            }
        }
    }
}

/// Splits a connector into per-port supports of `motif`, or `None` if it
/// does not have the motif's shape under `cards`.
fn decompose(
    conn: &Connector,
    motif: &ConnectorMotif,
    cards: &Cardinalities,
) -> Option<Vec<Support>> {
    let ports: Vec<&GenericPortRef> = motif.ports.keys().collect();
    let mut parts: Vec<Vec<u32>> = vec![Vec::new(); ports.len()];
    for p in conn.iter() {
        let (ty, k) = split_instance_id(&p.component)?;
        if k as u64 > u64::from(*cards.get(ty)?) {
            return None;
        }
        let j = ports
            .iter()
            .position(|g| g.type_name == ty && g.port_name == p.port)?;
        parts[j].push(k as u32 - 1);
    }
    let fits = motif
        .ports
        .values()
        .zip(&parts)
        .all(|(c, part)| c.multiplicity.contains(part.len() as u32));
    fits.then(|| parts.into_iter().map(Support::new).collect())
}

/// Like [`decompose`] but ignoring instance ranges: could the connector
/// belong to the motif at some scale?
fn fits_shape(conn: &Connector, motif: &ConnectorMotif) -> bool {
    let mut counts: BTreeMap<&GenericPortRef, u32> = BTreeMap::new();
    for p in conn.iter() {
        let Some((ty, _)) = split_instance_id(&p.component) else {
            return false;
        };
        let Some((g, _)) = motif
            .ports
            .iter()
            .find(|(g, _)| g.type_name == ty && g.port_name == p.port)
        else {
            return false;
        };
        *counts.entry(g).or_default() += 1;
    }
    motif
        .ports
        .iter()
        .all(|(g, c)| c.multiplicity.contains(counts.get(g).copied().unwrap_or(0)))
}

fn to_connector(cell: &[usize], axes: &[&RegularConfig], ports: &[&GenericPortRef]) -> Connector {
    let instances = cell
        .iter()
        .zip(axes)
        .zip(ports)
        .flat_map(|((&i, axis), g)| {
            axis.index.get(i).members().iter().map(move |&k| {
                PortInstance::new(
                    instance_id(&g.type_name, k as usize + 1),
                    g.port_name.clone(),
                )
            })
        });
    Connector::new(instances).expect("fused connectors are non-empty")
}

/// Every configuration of one motif at fixed cardinalities.
///
/// All required connectors must have the motif's shape; forbidden connectors
/// of any other shape are ignored. The result is in canonical order.
pub fn enumerate_motif(
    motif: &ConnectorMotif,
    cards: &Cardinalities,
    cons: &SynthesisConstraints,
) -> Result<Vec<MotifConfiguration>, SynthesisError> {
    let required: Vec<Vec<Support>> = cons
        .required
        .iter()
        .map(|c| decompose(c, motif, cards).ok_or_else(|| SynthesisError::OutsideMotif(c.clone())))
        .collect::<Result<_, _>>()?;
    let forbidden: Vec<Vec<Support>> = cons
        .forbidden
        .iter()
        .filter_map(|c| decompose(c, motif, cards))
        .collect();

    let ports: Vec<&GenericPortRef> = motif.ports.keys().collect();
    let options: Vec<Vec<RegularConfig>> = motif
        .ports
        .iter()
        .map(|(g, c)| {
            let n = cards
                .get(&g.type_name)
                .copied()
                .ok_or_else(|| SynthesisError::UnknownType(g.type_name.clone()))?;
            Ok(enumerate_regular(n, c.multiplicity, c.degree))
        })
        .collect::<Result<_, SynthesisError>>()?;

    let combos: Vec<Vec<&RegularConfig>> = options
        .iter()
        .map(|o| o.iter())
        .multi_cartesian_product()
        .collect();

    let per_combo = par::map(&combos, |axes| {
        let locate = |parts: &Vec<Support>| -> Option<Vec<usize>> {
            parts
                .iter()
                .zip(axes)
                .map(|(s, a)| a.index.position(s))
                .collect()
        };
        let Some(forced_one) = required.iter().map(locate).collect::<Option<Vec<_>>>() else {
            return Vec::new();
        };
        let forced_zero: Vec<Vec<usize>> = forbidden.iter().filter_map(locate).collect();
        fuse(axes, &forced_one, &forced_zero)
            .into_iter()
            .map(|e| {
                for (j, axis) in axes.iter().enumerate() {
                    let marginal = e.marginal(j);
                    for (i, (&got, &want)) in marginal.iter().zip(&axis.counts).enumerate() {
                        assert!(
                            (axis.index.has_empty() && i == 0) || got == want,
                            "fusion marginal mismatch on axis {j}"
                        );
                    }
                }
                let config: Configuration = e
                    .ones
                    .iter()
                    .map(|cell| to_connector(cell, axes, &ports))
                    .collect();
                assert_eq!(config.len(), e.total(), "fused connectors must be distinct");
                config
            })
            .collect::<Vec<_>>()
    });

    let all: BTreeSet<Configuration> = per_combo.into_iter().flatten().collect();
    Ok(all.into_iter().collect())
}

/// Can connectors of two different motifs coincide? Only when some port
/// admits multiplicity 0.
fn motifs_may_collide(d: &Diagram) -> bool {
    d.motifs
        .iter()
        .any(|m| m.ports.values().any(|c| c.multiplicity.lo == 0))
}

fn assignments(
    d: &Diagram,
    cons: &SynthesisConstraints,
) -> Result<Vec<Cardinalities>, SynthesisError> {
    for (t, &n) in &cons.cardinalities {
        let interval = d
            .cardinality(t)
            .ok_or_else(|| SynthesisError::UnknownType(t.clone()))?;
        if !interval.contains(n) {
            return Err(SynthesisError::CardinalityOutOfRange {
                type_name: t.clone(),
                n,
                interval,
            });
        }
    }
    Ok(d.cardinality_assignments()
        .into_iter()
        .filter(|a| cons.cardinalities.iter().all(|(t, n)| a[t] == *n))
        .collect())
}

fn check_shapes(d: &Diagram, cons: &SynthesisConstraints) -> Result<(), SynthesisError> {
    for c in &cons.required {
        if !d.motifs.iter().any(|m| fits_shape(c, m)) {
            return Err(SynthesisError::OutsideMotif(c.clone()));
        }
    }
    Ok(())
}

/// Per-motif configuration sets, plus required connectors every result must contain.
type MotifSets = (Vec<Vec<MotifConfiguration>>, Vec<Connector>);

/// Per-motif configuration sets for one cardinality assignment, plus the
/// required connectors that could belong to several motifs (checked after
/// combination). `None` if some required connector fits no motif here.
fn motif_sets(
    d: &Diagram,
    cards: &Cardinalities,
    cons: &SynthesisConstraints,
) -> Result<Option<MotifSets>, SynthesisError> {
    let mut own: Vec<Vec<Connector>> = vec![Vec::new(); d.motifs.len()];
    let mut shared = Vec::new();
    for c in &cons.required {
        let homes: Vec<usize> = d
            .motifs
            .iter()
            .enumerate()
            .filter(|(_, m)| decompose(c, m, cards).is_some())
            .map(|(j, _)| j)
            .collect();
        match homes.as_slice() {
            [] => return Ok(None),
            [j] => own[*j].push(c.clone()),
            _ => shared.push(c.clone()),
        }
    }
    let mut sets = Vec::with_capacity(d.motifs.len());
    for (motif, req) in d.motifs.iter().zip(own) {
        let local = SynthesisConstraints {
            required: req.into_iter().collect(),
            forbidden: cons.forbidden.clone(),
            cardinalities: Cardinalities::new(),
        };
        sets.push(enumerate_motif(motif, cards, &local)?);
    }
    Ok(Some((sets, shared)))
}

/// Pairwise-disjoint unions of one configuration per motif.
fn combine(
    sets: &[Vec<MotifConfiguration>],
    check_disjoint: bool,
    shared: &[Connector],
) -> Vec<Configuration> {
    let mut partial: Vec<Configuration> = vec![Configuration::new()];
    for set in sets {
        let mut next = Vec::new();
        for acc in &partial {
            for conf in set {
                if check_disjoint && !acc.is_disjoint(conf) {
                    continue;
                }
                next.push(acc.union(conf).cloned().collect());
            }
        }
        partial = next;
    }
    partial.retain(|c| shared.iter().all(|s| c.contains(s)));
    if check_disjoint {
        // Different partitions may have the same union.
        partial.sort();
        partial.dedup();
    }
    partial
}

/// Every architecture conforming to `d`, in canonical order, for every
/// cardinality assignment admitted by the diagram and the constraints.
/// Component ids are `T#1..T#n`.
pub fn enumerate_diagram(
    d: &Diagram,
    cons: &SynthesisConstraints,
) -> Result<Vec<Architecture>, SynthesisError> {
    check_shapes(d, cons)?;
    let assignments = assignments(d, cons)?;
    let collide = motifs_may_collide(d);
    let per_assignment = par::map(
        &assignments,
        |cards| -> Result<Vec<Architecture>, SynthesisError> {
            let Some((sets, shared)) = motif_sets(d, cards, cons)? else {
                return Ok(Vec::new());
            };
            Ok(combine(&sets, collide, &shared)
                .into_iter()
                .map(|conf| {
                    Architecture::with_instances(String::new(), d.name.clone(), cards, conf)
                })
                .collect())
        },
    );
    let mut all = Vec::new();
    for r in per_assignment {
        all.extend(r?);
    }
    all.sort_by(|a, b| a.shape_key().cmp(&b.shape_key()));
    all.dedup_by(|a, b| a.shape_key() == b.shape_key());
    for (k, a) in all.iter_mut().enumerate() {
        a.name = format!("{}_{}", d.name, k + 1);
    }
    Ok(all)
}

/// `enumerate_diagram(d, cons).len()`, without building architectures when
/// motifs cannot share connectors.
pub fn count_configs(d: &Diagram, cons: &SynthesisConstraints) -> Result<u128, SynthesisError> {
    check_shapes(d, cons)?;
    let assignments = assignments(d, cons)?;
    let collide = motifs_may_collide(d);
    let counts = par::map(&assignments, |cards| -> Result<u128, SynthesisError> {
        let Some((sets, shared)) = motif_sets(d, cards, cons)? else {
            return Ok(0);
        };
        if !collide && shared.is_empty() {
            Ok(sets
                .iter()
                .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128)))
        } else {
            Ok(combine(&sets, collide, &shared).len() as u128)
        }
    });
    let mut total = 0u128;
    for c in counts {
        total = total.saturating_add(c?);
    }
    Ok(total)
}

//! Regular configurations of a single generic port.
//!
//! For `n` instances of a port, every candidate sub-connector is a subset of
//! the instances (a *support*). Supports are indexed in canonical order (by
//! size, then lexicographically by members), which fixes the meaning of the
//! positions of a count vector `X`. With the `n × w` incidence matrix `G`, a
//! regular configuration is a non-negative integer solution of `G·X = D`,
//! where `D` holds the per-instance degrees.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::model::{ChoiceKind, TypedInterval};

/// A set of instance indices (0-based internally, printed 1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support(Vec<u32>);

impl Support {
    pub fn new(mut members: Vec<u32>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self(members)
    }

    pub fn members(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: u32) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().map(|i| i + 1).join(","))
    }
}

/// Canonically ordered list of supports over `n` instances.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportIndex {
    n: u32,
    supports: Vec<Support>,
}

impl SupportIndex {
    /// All supports whose size lies in `sizes`, ordered by (size, members).
    pub fn for_sizes(n: u32, lo: u32, hi: u32) -> Self {
        let mut supports = Vec::new();
        for m in lo..=hi.min(n) {
            supports.extend((0..n).combinations(m as usize).map(Support));
        }
        Self { n, supports }
    }

    pub fn instances(&self) -> u32 {
        self.n
    }

    pub fn supports(&self) -> &[Support] {
        &self.supports
    }

    pub fn get(&self, j: usize) -> &Support {
        &self.supports[j]
    }

    /// Number of supports (the length `w` of a count vector).
    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    pub fn position(&self, s: &Support) -> Option<usize> {
        self.supports.iter().position(|x| x == s)
    }

    pub fn has_empty(&self) -> bool {
        self.supports.first().is_some_and(Support::is_empty)
    }
}

/// Support index for a multiplicity constraint. For `sc` multiplicities this
/// still spans every size; callers that need the per-size disjunction use
/// [`SupportIndex::for_sizes`] with a fixed size.
pub fn enumerate_supports(n: u32, mult: TypedInterval) -> SupportIndex {
    SupportIndex::for_sizes(n, mult.lo, mult.hi)
}

/// 0/1 incidence matrix: `g[i][j] = 1` iff instance `i` belongs to support `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: Vec<Vec<u8>>,
    cols: usize,
}

impl IncidenceMatrix {
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.rows[i]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols)
    }

    pub fn column_sums(&self) -> Vec<u32> {
        (0..self.cols)
            .map(|j| self.rows.iter().map(|r| u32::from(r[j])).sum())
            .collect()
    }

    /// `G·X`.
    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(&g, &v)| u32::from(g) * v).sum())
            .collect()
    }
}

pub fn build_incidence(n: u32, index: &SupportIndex) -> IncidenceMatrix {
    let rows = (0..n)
        .map(|i| {
            index
                .supports
                .iter()
                .map(|s| u8::from(s.contains(i)))
                .collect()
        })
        .collect();
    IncidenceMatrix {
        rows,
        cols: index.len(),
    }
}

/// One solution of `G·X = D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularConfig {
    pub index: Arc<SupportIndex>,
    /// Occurrence count of every support in `index`.
    pub counts: Vec<u32>,
    /// Realised degree of every instance, `G·X`.
    pub degrees: Vec<u32>,
}

impl RegularConfig {
    /// Number of sub-connectors counted with multiplicity.
    pub fn connector_count(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// `(support, count)` pairs with a positive count.
    pub fn entries(&self) -> impl Iterator<Item = (&Support, u32)> {
        self.index
            .supports()
            .iter()
            .zip(&self.counts)
            .filter(|(_, &c)| c > 0)
            .map(|(s, &c)| (s, c))
    }
}

impl fmt::Display for RegularConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.iter().all(|&c| c < 10) {
            write!(f, "[{}]", self.counts.iter().join(""))
        } else {
            write!(f, "[{}]", self.counts.iter().join(","))
        }
    }
}

/// Every regular configuration of `n` instances under the given multiplicity
/// and degree constraints.
///
/// `sc` multiplicity is the union over each fixed size `m` of the solutions
/// over that size's own index; `mc` multiplicity is one system over the
/// combined index. `sc` degree forces one common degree for all instances;
/// `mc` degree bounds each instance independently. The count of the empty
/// support (present when the multiplicity admits 0) is fixed to 0 here since
/// it does not appear in `G·X`.
pub fn enumerate_regular(n: u32, mult: TypedInterval, deg: TypedInterval) -> Vec<RegularConfig> {
    let indices: Vec<Arc<SupportIndex>> = match mult.kind {
        ChoiceKind::Mc => vec![Arc::new(enumerate_supports(n, mult))],
        ChoiceKind::Sc => mult
            .values()
            .map(|m| Arc::new(SupportIndex::for_sizes(n, m, m)))
            .collect(),
    };
    let bounds: Vec<(u32, u32)> = match deg.kind {
        ChoiceKind::Mc => vec![(deg.lo, deg.hi)],
        ChoiceKind::Sc => deg.values().map(|d| (d, d)).collect(),
    };

    let mut out = Vec::new();
    for index in &indices {
        for &(lo, hi) in &bounds {
            for counts in solve_bounded(index, lo, hi) {
                let degrees = degree_vector(index, &counts);
                out.push(RegularConfig {
                    index: Arc::clone(index),
                    counts,
                    degrees,
                });
            }
        }
    }
    out
}

fn degree_vector(index: &SupportIndex, counts: &[u32]) -> Vec<u32> {
    let mut deg = vec![0u32; index.instances() as usize];
    for (s, &c) in index.supports().iter().zip(counts) {
        for &i in s.members() {
            deg[i as usize] += c;
        }
    }
    deg
}

/// All `X ≥ 0` with `lo ≤ (G·X)_i ≤ hi` for every instance `i`, in
/// lexicographic order of `X`.
pub fn solve_bounded(index: &SupportIndex, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    let n = index.instances() as usize;
    let w = index.len();
    // Column after which no support touches instance i any more.
    let mut last_col: Vec<Option<usize>> = vec![None; n];
    for (j, s) in index.supports().iter().enumerate() {
        for &i in s.members() {
            last_col[i as usize] = Some(j);
        }
    }
    if lo > 0 && last_col.iter().any(Option::is_none) {
        return Vec::new();
    }
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); w];
    for (i, c) in last_col.iter().enumerate() {
        if let Some(j) = c {
            closing[*j].push(i);
        }
    }

    let mut search = Search {
        index,
        lo,
        hi,
        closing,
        current: vec![0; n],
        x: vec![0; w],
        out: Vec::new(),
    };
    search.column(0);
    search.out
}

struct Search<'a> {
    index: &'a SupportIndex,
    lo: u32,
    hi: u32,
    closing: Vec<Vec<usize>>,
    current: Vec<u32>,
    x: Vec<u32>,
    out: Vec<Vec<u32>>,
}

impl Search<'_> {
    fn column(&mut self, j: usize) {
        if j == self.x.len() {
            self.out.push(self.x.clone());
            return;
        }
        let support = self.index.get(j).members().to_vec();
        let cap = if support.is_empty() {
            0
        } else {
            support
                .iter()
                .map(|&i| self.hi - self.current[i as usize])
                .min()
                .unwrap_or(0)
        };
        for v in 0..=cap {
            self.x[j] = v;
            for &i in &support {
                self.current[i as usize] += v;
            }
            let closed_ok = self.closing[j].iter().all(|&i| self.current[i] >= self.lo);
            if closed_ok {
                self.column(j + 1);
            }
            for &i in &support {
                self.current[i as usize] -= v;
            }
        }
        self.x[j] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vectors(v: &[RegularConfig]) -> Vec<String> {
        v.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn supports_of_four_choose_two() {
        let idx = enumerate_supports(4, TypedInterval::exact(2));
        let shown: Vec<String> = idx.supports().iter().map(ToString::to_string).collect();
        assert_eq!(
            shown,
            ["{1,2}", "{1,3}", "{1,4}", "{2,3}", "{2,4}", "{3,4}"]
        );
    }

    #[test]
    fn supports_edge_cases() {
        assert_eq!(enumerate_supports(3, TypedInterval::exact(3)).len(), 1);
        let idx = enumerate_supports(2, TypedInterval::mc(0, 1));
        let shown: Vec<String> = idx.supports().iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["{}", "{1}", "{2}"]);
        assert!(idx.has_empty());
        assert!(enumerate_supports(2, TypedInterval::exact(3)).is_empty());
    }

    #[test]
    fn incidence_matrices() {
        let g = build_incidence(2, &enumerate_supports(2, TypedInterval::exact(1)));
        assert_eq!(g.row(0), [1, 0]);
        assert_eq!(g.row(1), [0, 1]);

        let g = build_incidence(4, &enumerate_supports(4, TypedInterval::exact(2)));
        assert_eq!(g.shape(), (4, 6));
        assert_eq!(g.column_sums(), vec![2; 6]);
        // Row-wise equations x1+x2+x3, x1+x4+x5, x2+x4+x6, x3+x5+x6.
        assert_eq!(g.row(0), [1, 1, 1, 0, 0, 0]);
        assert_eq!(g.row(1), [1, 0, 0, 1, 1, 0]);
        assert_eq!(g.row(2), [0, 1, 0, 1, 0, 1]);
        assert_eq!(g.row(3), [0, 0, 1, 0, 1, 1]);
    }

    #[test]
    fn table_of_regular_configurations() {
        let one = |d| enumerate_regular(4, TypedInterval::exact(2), TypedInterval::exact(d));
        let mut d1 = vectors(&one(1));
        d1.sort();
        assert_eq!(d1, ["[001100]", "[010010]", "[100001]"]);
        let mut d2 = vectors(&one(2));
        d2.sort();
        assert_eq!(
            d2,
            ["[002200]", "[011110]", "[020020]", "[101101]", "[110011]", "[200002]"]
        );
        let mut d3 = vectors(&one(3));
        d3.sort();
        assert_eq!(
            d3,
            [
                "[003300]", "[012210]", "[021120]", "[030030]", "[102201]", "[111111]", "[120021]",
                "[201102]", "[210012]", "[300003]"
            ]
        );
    }

    #[test]
    fn three_of_four() {
        let got = enumerate_regular(4, TypedInterval::exact(3), TypedInterval::sc(3, 3));
        assert_eq!(vectors(&got), ["[1111]"]);
        assert!(enumerate_regular(4, TypedInterval::exact(3), TypedInterval::exact(1)).is_empty());
    }

    #[test]
    fn interval_degrees() {
        // sc[1,3]: one common degree; mc[1,3]: independent degrees.
        let sc = enumerate_regular(4, TypedInterval::exact(2), TypedInterval::sc(1, 3));
        assert_eq!(sc.len(), 3 + 6 + 10);
        let mc = enumerate_regular(4, TypedInterval::exact(2), TypedInterval::mc(1, 3));
        assert!(mc.len() > sc.len());
        assert!(mc
            .iter()
            .all(|r| r.degrees.iter().all(|&d| (1..=3).contains(&d))));
        assert!(mc.iter().any(|r| r
            .degrees
            .iter()
            .collect::<std::collections::BTreeSet<_>>()
            .len()
            > 1));
    }

    #[test]
    fn interval_multiplicity() {
        // mc[0,1] over two instances, degree 1: only {1},{2} once each.
        let got = enumerate_regular(2, TypedInterval::mc(0, 1), TypedInterval::exact(1));
        assert_eq!(vectors(&got), ["[011]"]);
        // sc[1,2] is a disjunction over separate indices.
        let got = enumerate_regular(2, TypedInterval::sc(1, 2), TypedInterval::exact(1));
        assert_eq!(vectors(&got), ["[11]", "[1]"]);
        // mc[1,2]: a combined system.
        let got = enumerate_regular(2, TypedInterval::mc(1, 2), TypedInterval::exact(1));
        assert_eq!(vectors(&got), ["[001]", "[110]"]);
    }

    #[test]
    fn no_instances() {
        let got = enumerate_regular(0, TypedInterval::exact(1), TypedInterval::exact(2));
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].connector_count(), 0);
    }

    #[test]
    fn solutions_are_lexicographic() {
        let idx = enumerate_supports(4, TypedInterval::exact(2));
        let sols = solve_bounded(&idx, 2, 2);
        let mut sorted = sols.clone();
        sorted.sort();
        assert_eq!(sols, sorted);
    }
}

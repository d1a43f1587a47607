//! Skeleton graphs, their incidence matrices and complete blow-ups.
//!
//! Nodes are indexed from 0 internally. The text formats in [`crate::io`]
//! use 1-based node numbers.

use std::collections::HashSet;
use std::ops::Range;

use crate::error::{check_len, Error, Result};

/// An undirected skeleton edge with `a <= b`; `a == b` is a self-loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkeletonEdge {
    pub a: usize,
    pub b: usize,
}

impl SkeletonEdge {
    pub fn new(u: usize, v: usize) -> Self {
        Self {
            a: u.min(v),
            b: u.max(v),
        }
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    /// The endpoint opposite to `v`. For a loop this is `v` itself.
    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

/// Undirected graph on `q` nodes, self-loops allowed, no parallel edges.
///
/// The edge order is the construction order and is part of the public
/// contract: every [`EdgeCoefficients`] on this graph is indexed by it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonGraph {
    node_count: usize,
    edges: Vec<SkeletonEdge>,
}

impl SkeletonGraph {
    /// Builds a skeleton from 0-based node pairs. Duplicate edges are rejected.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if node_count == 0 {
            return Err(Error::InvalidGraph(
                "skeleton needs at least one node".into(),
            ));
        }
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) references a node outside 1..={node_count}",
                    u + 1,
                    v + 1
                )));
            }
            let e = SkeletonEdge::new(u, v);
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.a + 1,
                    e.b + 1
                )));
            }
            list.push(e);
        }
        Ok(Self {
            node_count,
            edges: list,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[SkeletonEdge] {
        &self.edges
    }

    pub fn edge(&self, j: usize) -> SkeletonEdge {
        self.edges[j]
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_loop()).count()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&SkeletonEdge::new(u, v))
    }

    /// `(edge index, other endpoint)` pairs per node, in edge order.
    pub fn incidence_lists(&self) -> Vec<Vec<(usize, usize)>> {
        let mut lists = vec![Vec::new(); self.node_count];
        for (j, e) in self.edges.iter().enumerate() {
            lists[e.a].push((j, e.b));
            if !e.is_loop() {
                lists[e.b].push((j, e.a));
            }
        }
        lists
    }
}

/// Nonnegative integer vector indexed by nodes (part sizes `x`, LP values `y`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NodeAllocation(Vec<u64>);

impl NodeAllocation {
    pub fn new(values: Vec<u64>) -> Self {
        Self(values)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0[i]
    }

    /// `true` when `self <= other` entrywise.
    pub fn le(&self, other: &NodeAllocation) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn scaled(&self, k: u64) -> Self {
        Self(self.0.iter().map(|v| v * k).collect())
    }

    /// The doubled vector `(x; x)` used as capacity on the double cover.
    pub fn doubled(&self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&self.0);
        Self(v)
    }
}

impl From<Vec<u64>> for NodeAllocation {
    fn from(values: Vec<u64>) -> Self {
        Self(values)
    }
}

/// Which graph an [`EdgeCoefficients`] vector is indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Host {
    Skeleton,
    DoubleCover,
}

/// Nonnegative integer vector indexed by the edge list of its host graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeCoefficients {
    values: Vec<u64>,
    host: Host,
}

impl EdgeCoefficients {
    pub fn new(host: Host, values: Vec<u64>) -> Self {
        Self { values, host }
    }

    pub fn on_skeleton(values: Vec<u64>) -> Self {
        Self::new(Host::Skeleton, values)
    }

    pub fn zeros(host: Host, len: usize) -> Self {
        Self::new(host, vec![0; len])
    }

    pub fn host(&self) -> Host {
        self.host
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [u64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }

    pub fn get(&self, j: usize) -> u64 {
        self.values[j]
    }

    pub(crate) fn expect_on(&self, host: Host, len: usize) -> Result<()> {
        if self.host != host {
            return Err(Error::Dimension {
                what: "edge coefficients host",
                expected: len,
                found: self.values.len(),
            });
        }
        check_len("edge coefficients", len, self.values.len())
    }
}

/// A vector whose entries are multiples of ½, stored doubled so arithmetic
/// stays exact in integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfIntegral {
    doubled: Vec<u64>,
}

impl HalfIntegral {
    pub fn from_doubled(doubled: Vec<u64>) -> Self {
        Self { doubled }
    }

    pub fn doubled(&self) -> &[u64] {
        &self.doubled
    }

    pub fn len(&self) -> usize {
        self.doubled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doubled.is_empty()
    }

    /// Twice the entry sum.
    pub fn total_doubled(&self) -> u64 {
        self.doubled.iter().sum()
    }

    /// Indices whose value is an odd multiple of ½, ascending.
    pub fn half_integer_nodes(&self) -> Vec<usize> {
        (0..self.doubled.len())
            .filter(|&i| self.doubled[i] % 2 == 1)
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.doubled.iter().all(|v| v % 2 == 0)
    }

    pub fn to_integral(&self) -> Option<Vec<u64>> {
        self.is_integral()
            .then(|| self.doubled.iter().map(|v| v / 2).collect())
    }

    /// Entry `i` as a float, for display only.
    pub fn value(&self, i: usize) -> f64 {
        self.doubled[i] as f64 / 2.0
    }
}

/// The `q × m` matrix whose column `j` is `½(e_k + e_l)` for edge `(u_k, u_l)`.
/// Entries are stored doubled, so they lie in `{0, 1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    doubled: Vec<u8>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Twice the `(i, j)` entry.
    pub fn entry_doubled(&self, i: usize, j: usize) -> u8 {
        self.doubled[i * self.cols + j]
    }

    /// Twice the sum of column `j`.
    pub fn column_sum_doubled(&self, j: usize) -> u32 {
        (0..self.rows)
            .map(|i| self.entry_doubled(i, j) as u32)
            .sum()
    }

    pub fn column_nonzeros(&self, j: usize) -> usize {
        (0..self.rows)
            .filter(|&i| self.entry_doubled(i, j) != 0)
            .count()
    }
}

pub fn build_incidence_matrix(s: &SkeletonGraph) -> IncidenceMatrix {
    let (rows, cols) = (s.node_count(), s.edge_count());
    let mut doubled = vec![0u8; rows * cols];
    for (j, e) in s.edges().iter().enumerate() {
        doubled[e.a * cols + j] += 1;
        doubled[e.b * cols + j] += 1;
    }
    IncidenceMatrix {
        rows,
        cols,
        doubled,
    }
}

/// Computes `y = Zc` exactly.
pub fn apply_incidence(z: &IncidenceMatrix, c: &EdgeCoefficients) -> Result<HalfIntegral> {
    c.expect_on(Host::Skeleton, z.cols)?;
    let mut y = vec![0u64; z.rows];
    for (i, yi) in y.iter_mut().enumerate() {
        for j in 0..z.cols {
            *yi += z.entry_doubled(i, j) as u64 * c.get(j);
        }
    }
    Ok(HalfIntegral::from_doubled(y))
}

/// `2·Zc` computed from the edge list, without materialising `Z`.
pub(crate) fn doubled_load(s: &SkeletonGraph, c: &[u64]) -> Vec<u64> {
    let mut y = vec![0u64; s.node_count()];
    for (e, &v) in s.edges().iter().zip(c) {
        y[e.a] += v;
        y[e.b] += v;
    }
    y
}

/// The complete S-partite graph `K_x`.
///
/// Vertices are numbered part by part: part `i` owns the contiguous range
/// `offsets[i]..offsets[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupGraph {
    skeleton: SkeletonGraph,
    allocation: NodeAllocation,
    offsets: Vec<usize>,
}

pub fn blow_up(s: &SkeletonGraph, x: &NodeAllocation) -> Result<BlowupGraph> {
    check_len("allocation", s.node_count(), x.len())?;
    let mut offsets = Vec::with_capacity(x.len() + 1);
    offsets.push(0usize);
    for &xi in x.values() {
        let last = *offsets.last().unwrap();
        offsets.push(last + xi as usize);
    }
    Ok(BlowupGraph {
        skeleton: s.clone(),
        allocation: x.clone(),
        offsets,
    })
}

impl BlowupGraph {
    pub fn skeleton(&self) -> &SkeletonGraph {
        &self.skeleton
    }

    pub fn allocation(&self) -> &NodeAllocation {
        &self.allocation
    }

    pub fn vertex_count(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn part_range(&self, part: usize) -> Range<usize> {
        self.offsets[part]..self.offsets[part + 1]
    }

    /// The projection `π`: the part containing vertex `v`.
    pub fn part_of(&self, v: usize) -> usize {
        debug_assert!(v < self.vertex_count());
        self.offsets.partition_point(|&o| o <= v) - 1
    }

    pub fn is_edge(&self, v: usize, w: usize) -> bool {
        let n = self.vertex_count();
        v != w && v < n && w < n && self.skeleton.has_edge(self.part_of(v), self.part_of(w))
    }

    /// Number of edges, counted from the part sizes.
    pub fn edge_count(&self) -> u64 {
        self.skeleton
            .edges()
            .iter()
            .map(|e| {
                let (xa, xb) = (self.allocation.get(e.a), self.allocation.get(e.b));
                if e.is_loop() {
                    xa * xa.saturating_sub(1) / 2
                } else {
                    xa * xb
                }
            })
            .sum()
    }

    /// All edges `(v, w)` with `v < w`, grouped by skeleton edge in skeleton
    /// order and lexicographic within each group.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.skeleton.edges().iter().flat_map(move |e| {
            let left = self.part_range(e.a);
            let right = self.part_range(e.b);
            let is_loop = e.is_loop();
            left.flat_map(move |v| {
                let lo = if is_loop { v + 1 } else { right.start };
                (lo..right.end).map(move |w| (v, w))
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SkeletonGraph {
        SkeletonGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn incidence_of_triangle() {
        let z = build_incidence_matrix(&triangle());
        let cols: Vec<Vec<u8>> = (0..3)
            .map(|j| (0..3).map(|i| z.entry_doubled(i, j)).collect())
            .collect();
        assert_eq!(cols, vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
    }

    #[test]
    fn incidence_with_loop() {
        // loop at u_i, then (i,j), (j,k), (k,i)
        let s = SkeletonGraph::new(3, [(0, 0), (0, 1), (1, 2), (2, 0)]).unwrap();
        let z = build_incidence_matrix(&s);
        let expected = [[2, 1, 0, 1], [0, 1, 1, 0], [0, 0, 1, 1]];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(z.entry_doubled(i, j), v);
            }
        }
        for j in 0..4 {
            assert_eq!(z.column_sum_doubled(j), 2);
            assert!(z.column_nonzeros(j) <= 2);
        }
    }

    #[test]
    fn single_loop_incidence_is_one() {
        let s = SkeletonGraph::new(1, [(0, 0)]).unwrap();
        let z = build_incidence_matrix(&s);
        assert_eq!(z.entry_doubled(0, 0), 2);
    }

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        assert!(SkeletonGraph::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(SkeletonGraph::new(2, [(0, 2)]).is_err());
        assert!(SkeletonGraph::new(0, []).is_err());
    }

    #[test]
    fn apply_incidence_example_one() {
        let z = build_incidence_matrix(&triangle());
        let y = apply_incidence(&z, &EdgeCoefficients::on_skeleton(vec![4, 2, 2])).unwrap();
        assert_eq!(y.to_integral(), Some(vec![3, 3, 2]));

        let y = apply_incidence(&z, &EdgeCoefficients::on_skeleton(vec![0, 0, 0])).unwrap();
        assert_eq!(y.to_integral(), Some(vec![0, 0, 0]));

        let y = apply_incidence(&z, &EdgeCoefficients::on_skeleton(vec![1, 0, 0])).unwrap();
        assert_eq!(y.doubled(), &[1, 1, 0]);
        assert_eq!(y.half_integer_nodes(), vec![0, 1]);
    }

    #[test]
    fn apply_incidence_rejects_wrong_host() {
        let z = build_incidence_matrix(&triangle());
        let c = EdgeCoefficients::new(Host::DoubleCover, vec![0, 0, 0]);
        assert!(matches!(
            apply_incidence(&z, &c),
            Err(Error::Dimension { .. })
        ));
        let c = EdgeCoefficients::on_skeleton(vec![0, 0]);
        assert!(matches!(
            apply_incidence(&z, &c),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn blow_up_triangle_counts_admissible_pairs() {
        let k = blow_up(&triangle(), &NodeAllocation::new(vec![3, 3, 2])).unwrap();
        assert_eq!(k.vertex_count(), 8);
        // brute-force count over all vertex pairs
        let mut brute = 0;
        for v in 0..8 {
            for w in v + 1..8 {
                if k.skeleton().has_edge(k.part_of(v), k.part_of(w)) {
                    brute += 1;
                }
            }
        }
        assert_eq!(brute, 21);
        assert_eq!(k.edge_count(), 21);
        assert_eq!(k.edges().count(), 21);
    }

    #[test]
    fn loop_blows_up_to_clique_and_empty_stays_empty() {
        let s = SkeletonGraph::new(1, [(0, 0)]).unwrap();
        let k = blow_up(&s, &NodeAllocation::new(vec![4])).unwrap();
        assert_eq!(k.edges().count(), 6);
        assert!(k.edges().all(|(v, w)| v != w));

        let s = SkeletonGraph::new(1, []).unwrap();
        let k = blow_up(&s, &NodeAllocation::new(vec![5])).unwrap();
        assert_eq!(k.vertex_count(), 5);
        assert_eq!(k.edge_count(), 0);
    }

    #[test]
    fn blow_up_rejects_length_mismatch() {
        assert!(blow_up(&triangle(), &NodeAllocation::new(vec![1, 2])).is_err());
    }

    #[test]
    fn empty_parts_have_empty_ranges() {
        let k = blow_up(&triangle(), &NodeAllocation::new(vec![2, 0, 3])).unwrap();
        assert!(k.part_range(1).is_empty());
        assert_eq!(k.part_of(2), 2);
        assert_eq!(k.part_of(1), 0);
    }
}

//! Cycle-cover witnesses for an integer LP solution.
//!
//! Each nontrivial component of the support graph `S_c` becomes an Eulerian
//! pseudograph with `c(f)` parallel copies of every active edge. An Euler
//! circuit of it visits part `p` exactly `y_p` times, so assigning those
//! visits to distinct vertices of `V_p` lifts the circuit to a Hamilton
//! cycle of the component's blow-up.

use crate::error::{check_len, Error, Result};
use crate::lp::LpSolution;
use crate::skeleton::{
    blow_up, doubled_load, BlowupGraph, EdgeCoefficients, Host, NodeAllocation, SkeletonGraph,
};

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// The subgraph `S_c` of edges with positive coefficient, with its
/// connected components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportGraph {
    active: Vec<bool>,
    component_of: Vec<usize>,
    components: Vec<Vec<usize>>,
    nontrivial: Vec<usize>,
}

impl SupportGraph {
    pub fn is_active(&self, edge: usize) -> bool {
        self.active[edge]
    }

    pub fn active_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.active.len()).filter(|&j| self.active[j])
    }

    /// Components as ascending node lists, ordered by their smallest node.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, node: usize) -> usize {
        self.component_of[node]
    }

    /// Indices into [`Self::components`] of the components carrying at least
    /// one active edge.
    pub fn nontrivial(&self) -> &[usize] {
        &self.nontrivial
    }
}

pub fn build_support_graph(s: &SkeletonGraph, c: &EdgeCoefficients) -> Result<SupportGraph> {
    c.expect_on(Host::Skeleton, s.edge_count())?;
    let q = s.node_count();
    let active: Vec<bool> = c.values().iter().map(|&v| v > 0).collect();
    let mut uf = UnionFind::new(q);
    for (j, e) in s.edges().iter().enumerate() {
        if active[j] {
            uf.union(e.a, e.b);
        }
    }
    let mut label = vec![usize::MAX; q];
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut component_of = vec![0; q];
    for (v, slot) in component_of.iter_mut().enumerate() {
        let root = uf.find(v);
        if label[root] == usize::MAX {
            label[root] = components.len();
            components.push(Vec::new());
        }
        *slot = label[root];
        components[label[root]].push(v);
    }
    let mut has_edge = vec![false; components.len()];
    for (j, e) in s.edges().iter().enumerate() {
        if active[j] {
            has_edge[component_of[e.a]] = true;
        }
    }
    let nontrivial = (0..components.len()).filter(|&k| has_edge[k]).collect();
    Ok(SupportGraph {
        active,
        component_of,
        components,
        nontrivial,
    })
}

/// Multigraph on one support component with `c(f)` copies of each active
/// edge `f`. Edge copies are stored in skeleton edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerPseudograph {
    nodes: Vec<usize>,
    edges: Vec<(usize, usize)>,
    origin: Vec<usize>,
}

impl EulerPseudograph {
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Endpoints of each multi-edge, as skeleton node indices.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Skeleton edge behind each multi-edge.
    pub fn origin(&self, e: usize) -> usize {
        self.origin[e]
    }

    /// `L`, the number of multi-edges.
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Degree of a skeleton node, loops counted twice.
    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == node) + usize::from(b == node))
            .sum()
    }
}

pub fn build_pseudograph(
    s: &SkeletonGraph,
    support: &SupportGraph,
    component: usize,
    c: &EdgeCoefficients,
) -> Result<EulerPseudograph> {
    c.expect_on(Host::Skeleton, s.edge_count())?;
    let nodes = support.components[component].clone();
    let mut edges = Vec::new();
    let mut origin = Vec::new();
    let mut degree = vec![0u64; s.node_count()];
    for (j, e) in s.edges().iter().enumerate() {
        if support.active[j] && support.component_of[e.a] == component {
            let copies = c.get(j) as usize;
            edges.extend(std::iter::repeat_n((e.a, e.b), copies));
            origin.extend(std::iter::repeat_n(j, copies));
            degree[e.a] += c.get(j);
            degree[e.b] += c.get(j);
        }
    }
    if let Some(&v) = nodes.iter().find(|&&v| degree[v] == 0) {
        return Err(Error::Internal(format!(
            "node {} lies in a nontrivial support component but has degree zero",
            v + 1
        )));
    }
    Ok(EulerPseudograph {
        nodes,
        edges,
        origin,
    })
}

/// Closed walk `u_{i_0} e_1 u_{i_1} … e_L u_{i_L}` using every multi-edge once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerCircuit {
    /// `L + 1` nodes; the last equals the first.
    pub nodes: Vec<usize>,
    /// `L` multi-edge indices; `edges[k]` joins `nodes[k]` and `nodes[k + 1]`.
    pub edges: Vec<usize>,
}

impl EulerCircuit {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Checks closure, edge/node consistency and that every edge of `m` is
    /// used exactly once.
    pub fn is_valid_for(&self, m: &EulerPseudograph) -> bool {
        if self.nodes.len() != self.edges.len() + 1 || self.edges.len() != m.size() {
            return false;
        }
        if self.nodes.first() != self.nodes.last() {
            return false;
        }
        let mut used = vec![false; m.size()];
        for (k, &e) in self.edges.iter().enumerate() {
            if e >= m.size() || std::mem::replace(&mut used[e], true) {
                return false;
            }
            let (a, b) = m.edges[e];
            let (u, v) = (self.nodes[k], self.nodes[k + 1]);
            if !((a == u && b == v) || (a == v && b == u)) {
                return false;
            }
        }
        true
    }
}

/// Hierholzer's algorithm from the lowest node, consuming parallel copies in
/// storage order and splicing sub-circuits.
pub fn euler_circuit(m: &EulerPseudograph) -> Result<EulerCircuit> {
    let Some(&start) = m.nodes.first() else {
        return Err(Error::Precondition("pseudograph has no nodes".into()));
    };
    let max_node = m.nodes.iter().copied().max().unwrap_or(0);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); max_node + 1];
    let mut degree = vec![0usize; max_node + 1];
    for (e, &(a, b)) in m.edges.iter().enumerate() {
        adj[a].push((e, b));
        if a != b {
            adj[b].push((e, a));
        }
        degree[a] += 1;
        degree[b] += 1;
    }
    if let Some(&v) = m.nodes.iter().find(|&&v| degree[v] % 2 == 1) {
        return Err(Error::Precondition(format!(
            "node {} has odd degree {}",
            v + 1,
            degree[v]
        )));
    }

    let mut used = vec![false; m.size()];
    let mut next = vec![0usize; max_node + 1];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
    let mut nodes = Vec::with_capacity(m.size() + 1);
    let mut edges = Vec::with_capacity(m.size());
    while let Some(&(v, _)) = stack.last() {
        while next[v] < adj[v].len() && used[adj[v][next[v]].0] {
            next[v] += 1;
        }
        if let Some(&(e, w)) = adj[v].get(next[v]) {
            used[e] = true;
            stack.push((w, Some(e)));
        } else {
            let (v, via) = stack.pop().unwrap();
            nodes.push(v);
            if let Some(e) = via {
                edges.push(e);
            }
        }
    }
    if edges.len() != m.size() {
        return Err(Error::Precondition(
            "pseudograph is disconnected; no Euler circuit covers all edges".into(),
        ));
    }
    nodes.reverse();
    edges.reverse();
    Ok(EulerCircuit { nodes, edges })
}

/// The bijection `τ` between circuit positions and blown-up vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartAssignment {
    /// `(part, positions)` for every part the circuit visits, ascending by part.
    pub index_sets: Vec<(usize, Vec<usize>)>,
    /// `tau[j]` is the vertex assigned to circuit position `j`.
    pub tau: Vec<usize>,
}

/// A Hamilton cycle of one component's blow-up, with the assignment behind it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedCycle {
    pub cycle: Vec<usize>,
    pub assignment: PartAssignment,
}

/// Lifts an Euler circuit to the Hamilton cycle `τ(0) τ(1) … τ(L−1) τ(0)`.
///
/// Position `j` visiting part `p` is sent to the `r`-th vertex of `V_p` in
/// `host`, where `r` is the rank of `j` among the visits to `p`. `y` is the
/// full LP vector; only the parts visited by the circuit are used.
pub fn lift_to_hamilton(
    circuit: &EulerCircuit,
    y: &NodeAllocation,
    host: &BlowupGraph,
) -> Result<LiftedCycle> {
    check_len("LP vector", host.skeleton().node_count(), y.len())?;
    let len = circuit.len();
    let positions = &circuit.nodes[..len];
    let mut parts: Vec<usize> = positions.to_vec();
    parts.sort_unstable();
    parts.dedup();
    let order: u64 = parts.iter().map(|&p| y.get(p)).sum();
    if order < 3 {
        return Err(Error::Precondition(format!(
            "component blow-up has {order} vertices; a Hamilton cycle needs at least 3"
        )));
    }

    let mut index_sets: Vec<(usize, Vec<usize>)> = parts.iter().map(|&p| (p, Vec::new())).collect();
    let slot = |p: usize| parts.binary_search(&p).unwrap();
    for (j, &p) in positions.iter().enumerate() {
        index_sets[slot(p)].1.push(j);
    }
    for (p, set) in &index_sets {
        if set.len() as u64 != y.get(*p) {
            return Err(Error::Internal(format!(
                "part {} is visited {} times but y = {}",
                p + 1,
                set.len(),
                y.get(*p)
            )));
        }
        if set.len() > host.part_range(*p).len() {
            return Err(Error::Precondition(format!(
                "part {} has fewer vertices than circuit visits",
                p + 1
            )));
        }
    }

    let mut tau = vec![0usize; len];
    for (p, set) in &index_sets {
        let base = host.part_range(*p).start;
        for (rank, &j) in set.iter().enumerate() {
            tau[j] = base + rank;
        }
    }
    // tau is injective, so consecutive positions (including the wrap) are
    // distinct vertices; adjacency follows from the circuit's edges.
    for j in 0..len {
        let (v, w) = (tau[j], tau[(j + 1) % len]);
        if !host.is_edge(v, w) {
            return Err(Error::Internal(format!(
                "lifted step {v} -> {w} is not an edge of the blow-up"
            )));
        }
    }
    Ok(LiftedCycle {
        cycle: tau.clone(),
        assignment: PartAssignment { index_sets, tau },
    })
}

/// Node-disjoint cycles in a blow-up, each of length at least 3.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CycleCover {
    pub cycles: Vec<Vec<usize>>,
}

impl CycleCover {
    pub fn covered(&self) -> usize {
        self.cycles.iter().map(Vec::len).sum()
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// One line per cycle, vertex indices of `K_x` in traversal order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for cycle in &self.cycles {
            let line: Vec<String> = cycle.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Builds a cover of `K_y ⊆ K_x` with one Hamilton cycle per nontrivial
/// support component of `sol.c`. Requires `x_i >= 3` for every part.
pub fn build_cycle_cover(
    s: &SkeletonGraph,
    x: &NodeAllocation,
    sol: &LpSolution,
) -> Result<CycleCover> {
    check_len("allocation", s.node_count(), x.len())?;
    check_len("LP vector", s.node_count(), sol.y.len())?;
    if let Some(i) = (0..x.len()).find(|&i| x.get(i) < 3) {
        return Err(Error::Precondition(format!(
            "part {} has x = {}; a cycle cover with at most q cycles needs x_i >= 3",
            i + 1,
            x.get(i)
        )));
    }
    sol.c.expect_on(Host::Skeleton, s.edge_count())?;
    let y2 = doubled_load(s, sol.c.values());
    if y2.iter().zip(sol.y.values()).any(|(&a, &b)| a != 2 * b) {
        return Err(Error::Precondition("solution y does not equal Zc".into()));
    }
    if !sol.y.le(x) {
        return Err(Error::Precondition("solution y exceeds x".into()));
    }

    let host = blow_up(s, x)?;
    let support = build_support_graph(s, &sol.c)?;
    let mut cover = CycleCover::default();
    for &k in support.nontrivial() {
        let order: u64 = support.components()[k].iter().map(|&v| sol.y.get(v)).sum();
        if order < 3 {
            return Err(Error::Internal(format!(
                "support component with {order} vertices; the LP solution is not optimal"
            )));
        }
        let m = build_pseudograph(s, &support, k, &sol.c)?;
        let circuit = euler_circuit(&m)?;
        cover
            .cycles
            .push(lift_to_hamilton(&circuit, &sol.y, &host)?.cycle);
    }
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_lp;

    fn triangle() -> SkeletonGraph {
        SkeletonGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn loop_path() -> SkeletonGraph {
        SkeletonGraph::new(3, [(0, 0), (0, 1), (1, 2)]).unwrap()
    }

    fn coeffs(v: &[u64]) -> EdgeCoefficients {
        EdgeCoefficients::on_skeleton(v.to_vec())
    }

    #[test]
    fn support_of_loop_path() {
        let sup = build_support_graph(&loop_path(), &coeffs(&[3, 0, 6])).unwrap();
        let nontrivial: Vec<_> = sup
            .nontrivial()
            .iter()
            .map(|&k| sup.components()[k].clone())
            .collect();
        assert_eq!(nontrivial, vec![vec![0], vec![1, 2]]);
        assert!(!sup.is_active(1));
    }

    #[test]
    fn support_trivial_and_connected() {
        let sup = build_support_graph(&loop_path(), &coeffs(&[0, 0, 0])).unwrap();
        assert!(sup.nontrivial().is_empty());
        assert_eq!(sup.components().len(), 3);

        let sup = build_support_graph(&triangle(), &coeffs(&[4, 2, 2])).unwrap();
        assert_eq!(sup.nontrivial().len(), 1);
        assert_eq!(sup.components()[0], vec![0, 1, 2]);
    }

    #[test]
    fn pseudograph_degrees_are_twice_y() {
        let s = triangle();
        let c = coeffs(&[4, 2, 2]);
        let sup = build_support_graph(&s, &c).unwrap();
        let m = build_pseudograph(&s, &sup, 0, &c).unwrap();
        assert_eq!(m.size(), 8);
        assert_eq!([m.degree(0), m.degree(1), m.degree(2)], [6, 6, 4]);

        let s = loop_path();
        let c = coeffs(&[3, 0, 6]);
        let sup = build_support_graph(&s, &c).unwrap();
        let loops = build_pseudograph(&s, &sup, sup.nontrivial()[0], &c).unwrap();
        assert_eq!(loops.size(), 3);
        assert_eq!(loops.degree(0), 6);
        let pair = build_pseudograph(&s, &sup, sup.nontrivial()[1], &c).unwrap();
        assert_eq!(pair.size(), 6);
        assert_eq!((pair.degree(1), pair.degree(2)), (6, 6));
    }

    #[test]
    fn circuits_are_valid() {
        let s = triangle();
        let c = coeffs(&[4, 2, 2]);
        let sup = build_support_graph(&s, &c).unwrap();
        let m = build_pseudograph(&s, &sup, 0, &c).unwrap();
        let e = euler_circuit(&m).unwrap();
        assert_eq!(e.len(), 8);
        assert!(e.is_valid_for(&m));

        let s = SkeletonGraph::new(1, [(0, 0)]).unwrap();
        let c = coeffs(&[1]);
        let sup = build_support_graph(&s, &c).unwrap();
        let m = build_pseudograph(&s, &sup, 0, &c).unwrap();
        let e = euler_circuit(&m).unwrap();
        assert_eq!(e.nodes, vec![0, 0]);

        let s = SkeletonGraph::new(2, [(0, 1)]).unwrap();
        let c = coeffs(&[6]);
        let sup = build_support_graph(&s, &c).unwrap();
        let m = build_pseudograph(&s, &sup, 0, &c).unwrap();
        let e = euler_circuit(&m).unwrap();
        assert_eq!(e.nodes, vec![0, 1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn circuit_rejects_odd_degree() {
        let s = SkeletonGraph::new(2, [(0, 1)]).unwrap();
        let c = coeffs(&[3]);
        let sup = build_support_graph(&s, &c).unwrap();
        let m = build_pseudograph(&s, &sup, 0, &c).unwrap();
        assert!(matches!(euler_circuit(&m), Err(Error::Precondition(_))));
    }

    #[test]
    fn lift_example_one_and_index_sets() {
        let s = triangle();
        let c = coeffs(&[4, 2, 2]);
        let y = NodeAllocation::new(vec![3, 3, 2]);
        let host = blow_up(&s, &y).unwrap();
        let sup = build_support_graph(&s, &c).unwrap();
        let m = build_pseudograph(&s, &sup, 0, &c).unwrap();
        let e = euler_circuit(&m).unwrap();
        let lifted = lift_to_hamilton(&e, &y, &host).unwrap();
        assert_eq!(lifted.cycle.len(), 8);
        let mut sorted = lifted.cycle.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..8).collect::<Vec<_>>());
        for (p, set) in &lifted.assignment.index_sets {
            assert_eq!(set.len() as u64, y.get(*p));
            assert_eq!(2 * set.len(), m.degree(*p));
        }
        for (j, &v) in lifted.cycle.iter().enumerate() {
            assert_eq!(host.part_of(v), e.nodes[j]);
        }
    }

    #[test]
    fn lift_rejects_tiny_component() {
        let s = SkeletonGraph::new(1, [(0, 0)]).unwrap();
        let c = coeffs(&[2]);
        let y = NodeAllocation::new(vec![2]);
        let host = blow_up(&s, &y).unwrap();
        let sup = build_support_graph(&s, &c).unwrap();
        let m = build_pseudograph(&s, &sup, 0, &c).unwrap();
        let e = euler_circuit(&m).unwrap();
        assert!(matches!(
            lift_to_hamilton(&e, &y, &host),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cover_of_loop_path() {
        let s = loop_path();
        let x = NodeAllocation::new(vec![3, 3, 3]);
        let sol = solve_lp(&s, &x).unwrap();
        let cover = build_cycle_cover(&s, &x, &sol).unwrap();
        assert_eq!(cover.cycle_count(), 2);
        assert_eq!(cover.covered(), 9);
        assert_eq!(cover.cycles[0], vec![0, 1, 2]);
        assert_eq!(cover.cycles[1].len(), 6);
    }

    #[test]
    fn cover_of_triangle_is_one_cycle() {
        let s = triangle();
        let x = NodeAllocation::new(vec![3, 3, 3]);
        let sol = solve_lp(&s, &x).unwrap();
        let cover = build_cycle_cover(&s, &x, &sol).unwrap();
        assert_eq!(cover.cycle_count(), 1);
        assert_eq!(cover.covered(), 9);
    }

    #[test]
    fn cover_requires_three_per_part() {
        let s = triangle();
        let x = NodeAllocation::new(vec![3, 2, 3]);
        let sol = solve_lp(&s, &x).unwrap();
        assert!(matches!(
            build_cycle_cover(&s, &x, &sol),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cover_rejects_suboptimal_tiny_component() {
        // a lone loop with c = 1 yields a one-vertex component
        let s = SkeletonGraph::new(1, [(0, 0)]).unwrap();
        let x = NodeAllocation::new(vec![3]);
        let sol = LpSolution {
            y: NodeAllocation::new(vec![1]),
            c: coeffs(&[1]),
            objective: 1,
            rounds: 0,
        };
        assert!(matches!(
            build_cycle_cover(&s, &x, &sol),
            Err(Error::Internal(_))
        ));
    }
}

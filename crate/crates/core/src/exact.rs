//! Exact order `n(G)` of a largest 2-regular subgraph of an arbitrary simple
//! graph.
//!
//! [`exact_solve`] deletes vertices of degree below two, splits what is left
//! into connected components and runs a branch-and-bound per component over
//! the 0/1 program
//!
//! ```text
//! max Σ s_v   s.t.   Σ_{e ∋ v} h_e = 2 s_v,   h_e <= s_u, h_e <= s_v,   s, h ∈ {0,1}.
//! ```
//!
//! A component the search cannot close quickly is handed to a reduction to
//! maximum-weight perfect matching: every vertex becomes a gadget whose
//! perfect matchings leave exactly zero or two of its edges to be matched
//! across, so a heaviest perfect matching picks a largest subgraph with all
//! degrees in `{0, 2}`.
//!
//! [`brute_force_n`] is an independent subset-enumeration oracle for small
//! graphs.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::matching::max_weight_matching;

/// Simple undirected graph; `labels[v]` names vertex `v` in whatever graph
/// this one was cut out of.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<usize>,
}

impl GeneralGraph {
    /// Builds a graph from 0-based pairs; loops and duplicates are rejected.
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {vertex_count} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            list.push(e);
        }
        Ok(Self {
            vertex_count,
            edges: list,
            labels: (0..vertex_count).collect(),
        })
    }

    pub fn empty(vertex_count: usize) -> Self {
        Self {
            vertex_count,
            edges: Vec::new(),
            labels: (0..vertex_count).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Subgraph induced by `keep` (ascending), renumbered `0..keep.len()`.
    fn induced(&self, keep: &[usize]) -> GeneralGraph {
        let mut index = vec![usize::MAX; self.vertex_count];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]))
            .collect();
        GeneralGraph {
            vertex_count: keep.len(),
            edges,
            labels: keep.iter().map(|&v| self.labels[v]).collect(),
        }
    }

    /// Per-vertex neighbour bitmasks; only meaningful for at most 64 vertices.
    fn masks(&self) -> Vec<u64> {
        let mut m = vec![0u64; self.vertex_count];
        for &(u, v) in &self.edges {
            m[u] |= 1 << v;
            m[v] |= 1 << u;
        }
        m
    }
}

fn surviving_after_pruning(g: &GeneralGraph) -> Vec<usize> {
    let adj = g.adjacency();
    let mut deg = g.degrees();
    let mut removed = vec![false; g.vertex_count];
    let mut stack: Vec<usize> = (0..g.vertex_count).filter(|&v| deg[v] < 2).collect();
    for &v in &stack {
        removed[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !removed[w] {
                deg[w] -= 1;
                if deg[w] < 2 {
                    removed[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    (0..g.vertex_count).filter(|&v| !removed[v]).collect()
}

/// Repeatedly deletes vertices of degree below two. The result has minimum
/// degree at least two or no vertices.
pub fn prune_low_degree(g: &GeneralGraph) -> GeneralGraph {
    g.induced(&surviving_after_pruning(g))
}

fn component_vertex_sets(g: &GeneralGraph) -> Vec<Vec<usize>> {
    let adj = g.adjacency();
    let mut seen = vec![false; g.vertex_count];
    let mut out = Vec::new();
    for s in 0..g.vertex_count {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Connected components, ordered by their smallest vertex.
pub fn components(g: &GeneralGraph) -> Vec<GeneralGraph> {
    component_vertex_sets(g)
        .iter()
        .map(|keep| g.induced(keep))
        .collect()
}

/// Largest graph [`brute_force_n`] accepts.
pub const BRUTE_FORCE_CAP: usize = 20;

/// `n(G)` by enumerating vertex subsets from largest to smallest and testing
/// each induced subgraph for a 2-factor.
pub fn brute_force_n(g: &GeneralGraph) -> Result<usize> {
    let n = g.vertex_count;
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge {
            size: n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let masks = g.masks();
    for k in (3..=n).rev() {
        let mut subset: u64 = (1 << k) - 1;
        let limit: u64 = 1 << n;
        while subset < limit {
            let ok_degrees = (0..n)
                .filter(|&v| subset >> v & 1 == 1)
                .all(|v| (masks[v] & subset).count_ones() >= 2);
            if ok_degrees && has_two_factor(&masks, subset) {
                return Ok(k);
            }
            // next subset with the same popcount (Gosper)
            let c = subset & subset.wrapping_neg();
            let r = subset + c;
            subset = (((r ^ subset) >> 2) / c) | r;
        }
    }
    Ok(0)
}

fn has_two_factor(masks: &[u64], subset: u64) -> bool {
    let n = masks.len();
    let mut deg = vec![0u8; n];
    let mut used = vec![0u64; n];
    extend_two_factor(masks, subset, &mut deg, &mut used)
}

fn extend_two_factor(masks: &[u64], subset: u64, deg: &mut [u8], used: &mut [u64]) -> bool {
    let Some(v) = (0..masks.len()).find(|&v| subset >> v & 1 == 1 && deg[v] < 2) else {
        return true;
    };
    let open: u64 = (0..masks.len())
        .filter(|&w| subset >> w & 1 == 1 && deg[w] < 2)
        .fold(0, |acc, w| acc | 1 << w);
    let candidates = masks[v] & open & !used[v];
    let need = 2 - deg[v];
    if (candidates.count_ones() as u8) < need {
        return false;
    }
    let list: Vec<usize> = (0..masks.len())
        .filter(|&w| candidates >> w & 1 == 1)
        .collect();
    let pick = |ws: &[usize], deg: &mut [u8], used: &mut [u64], on: bool| {
        for &w in ws {
            if on {
                deg[v] += 1;
                deg[w] += 1;
                used[v] |= 1 << w;
                used[w] |= 1 << v;
            } else {
                deg[v] -= 1;
                deg[w] -= 1;
                used[v] &= !(1 << w);
                used[w] &= !(1 << v);
            }
        }
    };
    if need == 1 {
        for &w in &list {
            pick(&[w], deg, used, true);
            let found = extend_two_factor(masks, subset, deg, used);
            pick(&[w], deg, used, false);
            if found {
                return true;
            }
        }
    } else {
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                pick(&[a, b], deg, used, true);
                let found = extend_two_factor(masks, subset, deg, used);
                pick(&[a, b], deg, used, false);
                if found {
                    return true;
                }
            }
        }
    }
    false
}

const DIVE_NODES_PER_VERTEX: u64 = 8;

/// Limits for [`exact_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    /// Total branch-and-bound nodes allowed across all components.
    pub node_budget: u64,
    /// Finish a component with the matching reduction once the search has
    /// spent `8 * vertices` nodes on it. Without it the search runs until
    /// the budget is gone.
    pub matching_fallback: bool,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            node_budget: 20_000_000,
            matching_fallback: true,
        }
    }
}

/// `n(G)` with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    pub order: usize,
    /// Edges of a 2-regular subgraph on `order` vertices, in `G`'s numbering.
    pub edges: Vec<(usize, usize)>,
    pub nodes_explored: u64,
}

pub fn exact_n(g: &GeneralGraph) -> Result<usize> {
    exact_solve(g, &ExactConfig::default()).map(|s| s.order)
}

pub fn exact_solve(g: &GeneralGraph, config: &ExactConfig) -> Result<ExactSolution> {
    let kept = surviving_after_pruning(g);
    let pruned = g.induced(&kept);
    let mut solution = ExactSolution {
        order: 0,
        edges: Vec::new(),
        nodes_explored: 0,
    };
    for keep in component_vertex_sets(&pruned) {
        let comp = pruned.induced(&keep);
        let remaining = config.node_budget.saturating_sub(solution.nodes_explored);
        let limit = if config.matching_fallback {
            remaining.min(DIVE_NODES_PER_VERTEX * comp.vertex_count as u64)
        } else {
            remaining
        };
        let mut search = Search::new(&comp, limit);
        let closed = search.run();
        solution.nodes_explored += search.nodes;
        let chosen = if closed {
            search.best_edges
        } else if config.matching_fallback {
            two_regular_by_matching(&comp)
        } else {
            return Err(Error::Budget {
                budget: config.node_budget,
                best: solution.order + search.best,
                bound: solution.order + search.root_bound,
            });
        };
        solution.order += chosen.len();
        solution.edges.extend(
            chosen
                .iter()
                .map(|&e| comp.edges[e])
                .map(|(u, v)| (kept[keep[u]], kept[keep[v]])),
        );
    }
    Ok(solution)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeState {
    Free,
    In,
    Out,
}

#[derive(Debug, Clone, Copy)]
enum Child {
    Extend(usize),
    Select(usize),
    Exclude,
}

#[derive(Debug, Clone, Copy)]
enum Change {
    Edge(usize, EdgeState),
    Exclude(usize),
}

/// Branch-and-bound over edge variables with degree propagation.
///
/// A vertex is excluded once it cannot reach degree two; a vertex with one
/// chosen edge and a single free edge left takes it; a vertex with two
/// chosen edges drops the rest. The bound is the smaller of the number of
/// non-excluded vertices and the chosen edges plus half the fractional
/// simple 2-matching on the free edges, computed as a max-flow on the
/// bipartite double cover.
struct Search<'a> {
    g: &'a GeneralGraph,
    adj: Vec<Vec<(usize, usize)>>,
    state: Vec<EdgeState>,
    in_deg: Vec<u8>,
    free_deg: Vec<usize>,
    excluded: Vec<bool>,
    alive: usize,
    chosen: usize,
    trail: Vec<Change>,
    queue: Vec<usize>,
    best: usize,
    best_edges: Vec<usize>,
    root_bound: usize,
    nodes: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(g: &'a GeneralGraph, budget: u64) -> Self {
        let n = g.vertex_count;
        let mut adj = vec![Vec::new(); n];
        for (e, &(u, v)) in g.edges.iter().enumerate() {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        let free_deg = adj.iter().map(Vec::len).collect();
        Self {
            g,
            adj,
            state: vec![EdgeState::Free; g.edges.len()],
            in_deg: vec![0; n],
            free_deg,
            excluded: vec![false; n],
            alive: n,
            chosen: 0,
            trail: Vec::new(),
            queue: (0..n).collect(),
            best: 0,
            best_edges: Vec::new(),
            root_bound: n,
            nodes: 0,
            budget,
        }
    }

    /// Returns `false` when the node budget ran out.
    fn run(&mut self) -> bool {
        if !self.propagate() {
            return true;
        }
        self.root_bound = self.bound().0;
        self.branch()
    }

    fn set_in(&mut self, e: usize) -> bool {
        match self.state[e] {
            EdgeState::In => return true,
            EdgeState::Out => return false,
            EdgeState::Free => {}
        }
        let (u, v) = self.g.edges[e];
        self.trail.push(Change::Edge(e, EdgeState::Free));
        self.state[e] = EdgeState::In;
        self.chosen += 1;
        for w in [u, v] {
            self.in_deg[w] += 1;
            self.free_deg[w] -= 1;
            self.queue.push(w);
        }
        !self.excluded[u] && !self.excluded[v] && self.in_deg[u] <= 2 && self.in_deg[v] <= 2
    }

    fn set_out(&mut self, e: usize) {
        if self.state[e] != EdgeState::Free {
            return;
        }
        let (u, v) = self.g.edges[e];
        self.trail.push(Change::Edge(e, EdgeState::Free));
        self.state[e] = EdgeState::Out;
        for w in [u, v] {
            self.free_deg[w] -= 1;
            self.queue.push(w);
        }
    }

    fn exclude(&mut self, v: usize) -> bool {
        if self.excluded[v] {
            return true;
        }
        self.trail.push(Change::Exclude(v));
        self.excluded[v] = true;
        self.alive -= 1;
        for i in 0..self.adj[v].len() {
            let e = self.adj[v][i].1;
            self.set_out(e);
        }
        self.in_deg[v] == 0
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Change::Edge(e, prev) => {
                    let (u, v) = self.g.edges[e];
                    if self.state[e] == EdgeState::In {
                        self.chosen -= 1;
                        self.in_deg[u] -= 1;
                        self.in_deg[v] -= 1;
                    }
                    self.free_deg[u] += 1;
                    self.free_deg[v] += 1;
                    self.state[e] = prev;
                }
                Change::Exclude(v) => {
                    self.excluded[v] = false;
                    self.alive += 1;
                }
            }
        }
    }

    fn free_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v]
            .iter()
            .map(|&(_, e)| e)
            .filter(move |&e| self.state[e] == EdgeState::Free)
    }

    fn propagate(&mut self) -> bool {
        while let Some(v) = self.queue.pop() {
            if self.excluded[v] {
                if self.in_deg[v] > 0 {
                    self.queue.clear();
                    return false;
                }
                continue;
            }
            let ok = match self.in_deg[v] {
                2 => {
                    let rest: Vec<usize> = self.free_edges(v).collect();
                    rest.into_iter().for_each(|e| self.set_out(e));
                    true
                }
                1 => match self.free_deg[v] {
                    0 => false,
                    1 => {
                        let e = self.free_edges(v).next().unwrap();
                        self.set_in(e)
                    }
                    _ => true,
                },
                0 if self.free_deg[v] < 2 => self.exclude(v),
                0 => true,
                _ => false,
            };
            if !ok {
                self.queue.clear();
                return false;
            }
        }
        true
    }

    /// Upper bound and per-edge flow hints (0..=2) for child ordering.
    fn bound(&self) -> (usize, Vec<u8>) {
        let cheap = self.alive;
        let n = self.g.vertex_count;
        let source = 2 * n;
        let sink = 2 * n + 1;
        let mut net = FlowNetwork::new(2 * n + 2);
        for v in 0..n {
            if !self.excluded[v] && self.in_deg[v] < 2 && self.free_deg[v] > 0 {
                let cap = (2 - self.in_deg[v]) as i64;
                net.add_arc(source, v, cap);
                net.add_arc(n + v, sink, cap);
            }
        }
        let mut arcs = Vec::new();
        for (e, &(u, v)) in self.g.edges.iter().enumerate() {
            if self.state[e] == EdgeState::Free {
                arcs.push((e, net.add_arc(u, n + v, 1), net.add_arc(v, n + u, 1)));
            }
        }
        let flow = net.max_flow(source, sink) as usize;
        let mut hints = vec![0u8; self.g.edges.len()];
        for (e, a, b) in arcs {
            hints[e] = (net.flow(a) + net.flow(b)) as u8;
        }
        (cheap.min(self.chosen + flow / 2), hints)
    }

    fn record_leaf(&mut self) {
        if self.chosen > self.best {
            self.best = self.chosen;
            self.best_edges = (0..self.state.len())
                .filter(|&e| self.state[e] == EdgeState::In)
                .collect();
        }
    }

    fn apply(&mut self, v: usize, options: &[(usize, usize)], child: Child) -> bool {
        let ok = match child {
            Child::Extend(e) => self.set_in(e),
            Child::Select(k) => {
                for &(_, e) in &options[..k] {
                    self.set_out(e);
                }
                self.set_in(options[k].1)
            }
            Child::Exclude => self.exclude(v),
        };
        if !ok {
            self.queue.clear();
        }
        ok && self.propagate()
    }

    fn branch(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        if self.alive <= self.best {
            return true;
        }
        let (bound, hints) = self.bound();
        if bound <= self.best {
            return true;
        }

        let n = self.g.vertex_count;
        let endpoint = (0..n)
            .filter(|&v| !self.excluded[v] && self.in_deg[v] == 1)
            .min_by_key(|&v| self.free_deg[v]);
        let pick = endpoint.or_else(|| {
            (0..n)
                .filter(|&v| !self.excluded[v] && self.in_deg[v] == 0 && self.free_deg[v] >= 2)
                .max_by_key(|&v| (self.free_deg[v], std::cmp::Reverse(v)))
        });
        let Some(v) = pick else {
            self.record_leaf();
            return true;
        };

        let mut options: Vec<(usize, usize)> = self.adj[v]
            .iter()
            .filter(|&&(_, e)| self.state[e] == EdgeState::Free)
            .map(|&(w, e)| (w, e))
            .collect();
        options.sort_by_key(|&(w, e)| (std::cmp::Reverse(hints[e]), w));

        let children: Vec<Child> = if self.in_deg[v] == 1 {
            options.iter().map(|&(_, e)| Child::Extend(e)).collect()
        } else {
            (0..options.len())
                .map(Child::Select)
                .chain(std::iter::once(Child::Exclude))
                .collect()
        };
        for child in children {
            if self.best >= self.root_bound {
                break;
            }
            let mark = self.trail.len();
            if self.apply(v, &options, child) && !self.branch() {
                return false;
            }
            self.undo_to(mark);
        }
        true
    }
}

/// Edge indices of a largest subgraph of `g` whose degrees are all 0 or 2.
///
/// Vertex `v` of degree `d` becomes `d` ports, one per incident edge, plus
/// `d` inner vertices: `d - 2` fillers and a joined pair `a`, `b`. Every
/// port is adjacent to every inner vertex. In a perfect matching either the
/// pair takes two ports and all ports stay inside (degree 0), or `a` and `b`
/// match each other and two ports match across to a neighbour (degree 2).
/// Cross edges weigh one and everything else zero.
fn two_regular_by_matching(g: &GeneralGraph) -> Vec<usize> {
    let mut port_base = Vec::with_capacity(g.vertex_count);
    let mut next = 0;
    let degrees = g.degrees();
    for &d in &degrees {
        port_base.push(next);
        next += 2 * d;
    }
    let mut weighted = Vec::new();
    let mut used = vec![0usize; g.vertex_count];
    let mut cross = Vec::with_capacity(g.edges.len());
    for &(u, v) in &g.edges {
        let pu = port_base[u] + used[u];
        let pv = port_base[v] + used[v];
        used[u] += 1;
        used[v] += 1;
        cross.push((pu, pv));
        weighted.push((pu, pv, 1));
    }
    for (v, &d) in degrees.iter().enumerate() {
        if d == 0 {
            continue;
        }
        debug_assert!(d >= 2, "low-degree vertices are pruned first");
        let inner = port_base[v] + d;
        for port in port_base[v]..inner {
            for w in inner..inner + d {
                weighted.push((port, w, 0));
            }
        }
        weighted.push((inner + d - 2, inner + d - 1, 0));
    }
    let mate = max_weight_matching(next, &weighted, true);
    debug_assert!(
        mate.iter().all(Option::is_some),
        "the all-inner matching is perfect"
    );
    cross
        .iter()
        .enumerate()
        .filter(|&(_, &(pu, pv))| mate[pu] == Some(pv))
        .map(|(e, _)| e)
        .collect()
}

//! Integer optimum of `max 1ᵀy  s.t.  y = Zc, c >= 0, y <= x`.
//!
//! The LP is lifted to a b-matching on the bipartite double cover of the
//! skeleton, solved as an integer max-flow, projected back to skeleton edge
//! coefficients and finally cleaned of half-integer nodes by alternating
//! updates along even paths of the support graph.

use std::collections::VecDeque;

use crate::error::{check_len, Error, Result};
use crate::flow::FlowNetwork;
use crate::skeleton::{
    doubled_load, EdgeCoefficients, HalfIntegral, Host, NodeAllocation, SkeletonGraph,
};

/// Edge `(u'_left, u''_right)` of the double cover, remembering the skeleton
/// edge it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverEdge {
    pub left: usize,
    pub right: usize,
    pub origin: usize,
}

/// Bipartite graph on `u'_1..u'_q` and `u''_1..u''_q`: a loop `(u_i, u_i)`
/// yields `(u'_i, u''_i)`; a non-loop `(u_i, u_j)` yields `(u'_i, u''_j)`
/// followed by `(u'_j, u''_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteDoubleCover {
    side: usize,
    skeleton_edges: usize,
    edges: Vec<CoverEdge>,
    capacity: NodeAllocation,
}

pub fn build_double_cover(s: &SkeletonGraph, x: &NodeAllocation) -> Result<BipartiteDoubleCover> {
    check_len("allocation", s.node_count(), x.len())?;
    let mut edges = Vec::with_capacity(2 * s.edge_count());
    for (j, e) in s.edges().iter().enumerate() {
        edges.push(CoverEdge {
            left: e.a,
            right: e.b,
            origin: j,
        });
        if !e.is_loop() {
            edges.push(CoverEdge {
                left: e.b,
                right: e.a,
                origin: j,
            });
        }
    }
    Ok(BipartiteDoubleCover {
        side: s.node_count(),
        skeleton_edges: s.edge_count(),
        edges,
        capacity: x.doubled(),
    })
}

impl BipartiteDoubleCover {
    /// Nodes per side (`q`).
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn edges(&self) -> &[CoverEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `x̂ = (x; x)`.
    pub fn capacity(&self) -> &NodeAllocation {
        &self.capacity
    }

    /// Node loads `(y'; y'') = Ẑd`, as one vector of length `2q`.
    pub fn load(&self, d: &EdgeCoefficients) -> Result<Vec<u64>> {
        d.expect_on(Host::DoubleCover, self.edges.len())?;
        let mut load = vec![0u64; 2 * self.side];
        for (e, &v) in self.edges.iter().zip(d.values()) {
            load[e.left] += v;
            load[self.side + e.right] += v;
        }
        Ok(load)
    }

    /// `c(u_i,u_i) = d(u'_i,u''_i)` and `c(u_i,u_j) = d(u'_i,u''_j) + d(u'_j,u''_i)`.
    pub fn phi(&self, d: &EdgeCoefficients) -> Result<EdgeCoefficients> {
        d.expect_on(Host::DoubleCover, self.edges.len())?;
        Ok(EdgeCoefficients::on_skeleton(
            self.fold_to_skeleton(d.values()),
        ))
    }

    /// `φ` applied to a half-integral vector on the cover (values doubled).
    pub fn phi_doubled(&self, d: &HalfIntegral) -> Result<HalfIntegral> {
        check_len("doubled cover coefficients", self.edges.len(), d.len())?;
        Ok(HalfIntegral::from_doubled(
            self.fold_to_skeleton(d.doubled()),
        ))
    }

    fn fold_to_skeleton(&self, d: &[u64]) -> Vec<u64> {
        let mut c = vec![0u64; self.skeleton_edges];
        for (e, &v) in self.edges.iter().zip(d) {
            c[e.origin] += v;
        }
        c
    }

    /// `d(u'_i,u''_i) = c(u_i,u_i)` and `d(u'_i,u''_j) = ½c(u_i,u_j)` for `i != j`.
    /// The result may be half-integral and is returned doubled.
    pub fn psi(&self, c: &EdgeCoefficients) -> Result<HalfIntegral> {
        c.expect_on(Host::Skeleton, self.skeleton_edges)?;
        let doubled = self
            .edges
            .iter()
            .map(|e| {
                if e.left == e.right {
                    2 * c.get(e.origin)
                } else {
                    c.get(e.origin)
                }
            })
            .collect();
        Ok(HalfIntegral::from_doubled(doubled))
    }
}

/// Maximum b-matching on the double cover, as an integer max-flow.
///
/// Source arcs carry `x_i` into `u'_i`, sink arcs carry `x_j` out of `u''_j`,
/// and each cover edge has capacity `min(x_i, x_j)`.
pub fn solve_b_matching(b: &BipartiteDoubleCover) -> EdgeCoefficients {
    let q = b.side;
    let cap = b.capacity.values();
    let source = 2 * q;
    let sink = 2 * q + 1;
    let mut net = FlowNetwork::new(2 * q + 2);
    for (i, &c) in cap[..q].iter().enumerate() {
        net.add_arc(source, i, c as i64);
    }
    let arcs: Vec<_> = b
        .edges
        .iter()
        .map(|e| {
            let c = cap[e.left].min(cap[q + e.right]);
            net.add_arc(e.left, q + e.right, c as i64)
        })
        .collect();
    for j in 0..q {
        net.add_arc(q + j, sink, cap[q + j] as i64);
    }
    net.max_flow(source, sink);
    EdgeCoefficients::new(
        Host::DoubleCover,
        arcs.iter().map(|&a| net.flow(a) as u64).collect(),
    )
}

/// Result of [`eliminate_half_integers`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub c: EdgeCoefficients,
    pub y: Vec<u64>,
    pub rounds: usize,
}

/// Turns an optimal integer `c` whose load `y = Zc` has half-integer nodes
/// into one with integer load, keeping `1ᵀc` and `y <= x`.
///
/// Each round runs a BFS in the support graph from the lowest half-integer
/// node, never passing through another half-integer node, and stops at the
/// first half-integer node reached. Along that path the coefficients
/// alternate `+1, -1, +1, ...`; on an even path this moves the start node up
/// by ½ and the end node down by ½. An odd path would raise `1ᵀy`, which
/// certifies that the input was not optimal.
pub fn eliminate_half_integers(
    s: &SkeletonGraph,
    x: &NodeAllocation,
    c: &EdgeCoefficients,
) -> Result<Elimination> {
    check_len("allocation", s.node_count(), x.len())?;
    c.expect_on(Host::Skeleton, s.edge_count())?;
    let mut coeffs = c.values().to_vec();
    let mut y2 = doubled_load(s, &coeffs);
    if let Some(i) = (0..y2.len()).find(|&i| y2[i] > 2 * x.get(i)) {
        return Err(Error::Precondition(format!(
            "load at node {} exceeds its allocation",
            i + 1
        )));
    }

    let mut rounds = 0;
    loop {
        let half: Vec<usize> = (0..y2.len()).filter(|&i| y2[i] % 2 == 1).collect();
        let Some(&start) = half.first() else {
            break;
        };
        let path = shortest_half_path(s, &coeffs, &y2, start).ok_or_else(|| {
            Error::Internal(format!(
                "half-integer node {} has no half-integer partner in its support component",
                start + 1
            ))
        })?;
        // path holds edge indices along start -> end
        if path.len() % 2 == 1 {
            return Err(Error::Internal(format!(
                "odd path of length {} between half-integer nodes; the coefficients are not optimal",
                path.len()
            )));
        }
        for (l, &j) in path.iter().enumerate() {
            if l % 2 == 0 {
                coeffs[j] += 1;
            } else {
                coeffs[j] -= 1;
            }
        }
        y2 = doubled_load(s, &coeffs);
        rounds += 1;
    }

    Ok(Elimination {
        c: EdgeCoefficients::on_skeleton(coeffs),
        y: y2.iter().map(|v| v / 2).collect(),
        rounds,
    })
}

fn shortest_half_path(
    s: &SkeletonGraph,
    coeffs: &[u64],
    y2: &[u64],
    start: usize,
) -> Option<Vec<usize>> {
    let q = s.node_count();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); q];
    for (j, e) in s.edges().iter().enumerate() {
        if coeffs[j] > 0 && !e.is_loop() {
            adj[e.a].push((e.b, j));
            adj[e.b].push((e.a, j));
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }

    let mut parent: Vec<Option<(usize, usize)>> = vec![None; q];
    let mut seen = vec![false; q];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if u != start && y2[u] % 2 == 1 {
            let mut path = Vec::new();
            let mut v = u;
            while let Some((p, j)) = parent[v] {
                path.push(j);
                v = p;
            }
            path.reverse();
            return Some(path);
        }
        for &(w, j) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((u, j));
                queue.push_back(w);
            }
        }
    }
    None
}

/// An integer optimum of the LP together with the coefficients realising it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub y: NodeAllocation,
    pub c: EdgeCoefficients,
    pub objective: u64,
    /// Half-integer elimination rounds that were needed.
    pub rounds: usize,
}

impl LpSolution {
    /// Three-line text record: objective, `y`, `c` in edge order.
    pub fn to_record(&self) -> String {
        format!(
            "{}\n{}\n{}\n",
            self.objective,
            join(self.y.values()),
            join(self.c.values())
        )
    }
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

/// Double cover, flow, `φ`, then half-integer elimination.
pub fn solve_lp(s: &SkeletonGraph, x: &NodeAllocation) -> Result<LpSolution> {
    let b = build_double_cover(s, x)?;
    let d = solve_b_matching(&b);
    let c = b.phi(&d)?;
    let Elimination { c, y, rounds } = eliminate_half_integers(s, x, &c)?;
    let objective = c.total();
    debug_assert_eq!(objective, y.iter().sum::<u64>());
    Ok(LpSolution {
        y: NodeAllocation::new(y),
        c,
        objective,
        rounds,
    })
}

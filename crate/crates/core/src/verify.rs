//! Independent checks of solver output.
//!
//! Nothing here calls back into the constructions being checked: incidence
//! sums, part membership and adjacency are recomputed from the raw skeleton
//! and allocation.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::cover::CycleCover;
use crate::exact::GeneralGraph;
use crate::lp::LpSolution;
use crate::skeleton::{BlowupGraph, NodeAllocation, SkeletonGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub overall: bool,
    /// Covered vertex count, for reports about vertex-disjoint cycles.
    pub covered: Option<usize>,
}

impl VerificationReport {
    fn new() -> Self {
        Self {
            checks: Vec::new(),
            overall: true,
            covered: None,
        }
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.overall &= passed;
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        write!(f, "{}", if self.overall { "OK" } else { "FAILED" })
    }
}

/// Largest `1ᵀc` over integer `c >= 0` with `Zc <= x`, or `None` when
/// `q > 4` or some `x_i > 4`.
pub fn brute_force_lp_optimum(s: &SkeletonGraph, x: &NodeAllocation) -> Option<u64> {
    if s.node_count() > 4 || x.len() != s.node_count() || x.values().iter().any(|&v| v > 4) {
        return None;
    }
    let edges: Vec<(usize, usize)> = s.edges().iter().map(|e| (e.a, e.b)).collect();
    let room: Vec<u8> = x.values().iter().map(|&v| 2 * v as u8).collect();
    let mut memo = HashMap::new();
    Some(best_from(&edges, 0, room, &mut memo))
}

/// Doubled capacities: a loop at `i` uses 2 of `room[i]`, an edge `(i, j)`
/// uses 1 of each.
fn best_from(
    edges: &[(usize, usize)],
    j: usize,
    room: Vec<u8>,
    memo: &mut HashMap<(usize, Vec<u8>), u64>,
) -> u64 {
    if j == edges.len() {
        return 0;
    }
    if let Some(&v) = memo.get(&(j, room.clone())) {
        return v;
    }
    let (a, b) = edges[j];
    let mut best = 0;
    let mut r = room.clone();
    let mut k = 0;
    loop {
        best = best.max(k + best_from(edges, j + 1, r.clone(), memo));
        let fits = if a == b {
            r[a] >= 2
        } else {
            r[a] >= 1 && r[b] >= 1
        };
        if !fits {
            break;
        }
        if a == b {
            r[a] -= 2;
        } else {
            r[a] -= 1;
            r[b] -= 1;
        }
        k += 1;
    }
    memo.insert((j, room), best);
    best
}

/// Checks `y = Zc`, `c >= 0`, `y <= x`, `1ᵀc = 1ᵀy` and integrality of `y`.
/// With `check_optimality`, small instances are also compared against
/// [`brute_force_lp_optimum`].
pub fn verify_lp_solution(
    s: &SkeletonGraph,
    x: &NodeAllocation,
    sol: &LpSolution,
    check_optimality: bool,
) -> VerificationReport {
    let mut report = VerificationReport::new();
    let q = s.node_count();
    let dims = sol.c.len() == s.edge_count() && sol.y.len() == q && x.len() == q;
    report.push(
        "dimensions",
        dims,
        format!(
            "q={q}, m={}, |x|={}, |y|={}, |c|={}",
            s.edge_count(),
            x.len(),
            sol.y.len(),
            sol.c.len()
        ),
    );
    if !dims {
        return report;
    }

    let mut twice_zc = vec![0u64; q];
    for (e, &cj) in s.edges().iter().zip(sol.c.values()) {
        twice_zc[e.a] += cj;
        twice_zc[e.b] += cj;
    }
    let twice_y: Vec<u64> = sol.y.values().iter().map(|&v| 2 * v).collect();
    report.push(
        "y = Zc",
        twice_zc == twice_y,
        format!("2Zc = {twice_zc:?}, 2y = {twice_y:?}"),
    );
    report.push("c >= 0", true, "coefficients are unsigned");
    let over: Vec<usize> = (0..q).filter(|&i| sol.y.get(i) > x.get(i)).collect();
    report.push(
        "y <= x",
        over.is_empty(),
        if over.is_empty() {
            "holds".to_string()
        } else {
            format!("exceeded at nodes {over:?}")
        },
    );
    let sum_c: u64 = sol.c.values().iter().sum();
    let sum_y: u64 = sol.y.values().iter().sum();
    report.push(
        "1'c = 1'y",
        sum_c == sum_y && sol.objective == sum_y,
        format!(
            "1'c = {sum_c}, 1'y = {sum_y}, objective = {}",
            sol.objective
        ),
    );
    let odd: Vec<usize> = (0..q).filter(|&i| twice_zc[i] % 2 == 1).collect();
    report.push(
        "y integral",
        odd.is_empty(),
        if odd.is_empty() {
            "all entries integral".to_string()
        } else {
            format!("half-integer at nodes {odd:?}")
        },
    );
    if check_optimality {
        match brute_force_lp_optimum(s, x) {
            Some(best) => report.push(
                "optimal",
                sol.objective == best,
                format!("objective {} vs brute force {best}", sol.objective),
            ),
            None => report.push("optimal", true, "skipped: instance above oracle cap"),
        }
    }
    report
}

/// Checks that `cover` is a set of vertex-disjoint cycles of `K` of length
/// at least 3 covering `expected_order` vertices with at most `q` cycles.
pub fn verify_cycle_cover(
    k: &BlowupGraph,
    cover: &CycleCover,
    expected_order: usize,
) -> VerificationReport {
    let mut report = VerificationReport::new();
    let s = k.skeleton();
    let sizes = k.allocation().values();
    let mut part = Vec::new();
    for (p, &size) in sizes.iter().enumerate() {
        part.extend(std::iter::repeat_n(p, size as usize));
    }
    let adjacent: HashSet<(usize, usize)> = s
        .edges()
        .iter()
        .flat_map(|e| [(e.a, e.b), (e.b, e.a)])
        .collect();
    let n = part.len();

    let out_of_range: Vec<usize> = cover
        .cycles
        .iter()
        .flatten()
        .copied()
        .filter(|&v| v >= n)
        .collect();
    report.push(
        "vertex range",
        out_of_range.is_empty(),
        format!("{n} vertices; out of range: {out_of_range:?}"),
    );

    let mut seen = HashSet::new();
    let repeated: Vec<usize> = cover
        .cycles
        .iter()
        .flatten()
        .copied()
        .filter(|&v| !seen.insert(v))
        .collect();
    report.push(
        "disjoint",
        repeated.is_empty(),
        format!("repeated vertices: {repeated:?}"),
    );

    let short: Vec<usize> = (0..cover.cycles.len())
        .filter(|&i| cover.cycles[i].len() < 3)
        .collect();
    report.push(
        "length >= 3",
        short.is_empty(),
        format!("short cycles: {short:?}"),
    );

    let mut bad_edges = Vec::new();
    for cycle in &cover.cycles {
        for i in 0..cycle.len() {
            let (v, w) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            let ok = v < n && w < n && v != w && adjacent.contains(&(part[v], part[w]));
            if !ok && cycle.len() >= 2 {
                bad_edges.push((v, w));
            }
        }
    }
    report.push(
        "edges in K_x",
        bad_edges.is_empty(),
        format!("non-edges: {bad_edges:?}"),
    );

    let covered: usize = cover.cycles.iter().map(Vec::len).sum();
    report.covered = Some(covered);
    report.push(
        "covered",
        covered == expected_order,
        format!("covered {covered}, expected {expected_order}"),
    );
    report.push(
        "cycles <= q",
        cover.cycles.len() <= s.node_count(),
        format!("{} cycles, q = {}", cover.cycles.len(), s.node_count()),
    );
    report
}

/// Checks that every vertex touched by `edges` has exactly two of them.
pub fn verify_2_regular_subgraph(g: &GeneralGraph, edges: &[(usize, usize)]) -> VerificationReport {
    let mut report = VerificationReport::new();
    let present: HashSet<(usize, usize)> = g.edges().iter().copied().collect();
    let foreign: Vec<(usize, usize)> = edges
        .iter()
        .copied()
        .filter(|&(u, v)| !present.contains(&(u.min(v), u.max(v))))
        .collect();
    report.push(
        "edges in G",
        foreign.is_empty(),
        format!("foreign edges: {foreign:?}"),
    );
    let mut unique = HashSet::new();
    let duplicates = edges
        .iter()
        .filter(|&&(u, v)| !unique.insert((u.min(v), u.max(v))))
        .count();
    report.push(
        "distinct edges",
        duplicates == 0,
        format!("{duplicates} repeated"),
    );
    let mut degree: HashMap<usize, usize> = HashMap::new();
    for &(u, v) in edges {
        *degree.entry(u).or_default() += 1;
        *degree.entry(v).or_default() += 1;
    }
    let mut wrong: Vec<(usize, usize)> = degree
        .iter()
        .filter(|&(_, &d)| d != 2)
        .map(|(&v, &d)| (v, d))
        .collect();
    wrong.sort_unstable();
    report.push(
        "degree 2",
        wrong.is_empty(),
        format!("vertices with other degrees: {wrong:?}"),
    );
    report.covered = Some(degree.len());
    report.push("covered", true, format!("{}", degree.len()));
    report
}

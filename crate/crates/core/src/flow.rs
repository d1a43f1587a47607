//! Integer maximum flow by blocking flows on BFS level graphs (Dinic).

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
    rev: usize,
}

/// Handle to an arc added with [`FlowNetwork::add_arc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcId {
    node: usize,
    slot: usize,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    graph: Vec<Vec<Arc>>,
    original: Vec<Vec<i64>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            graph: vec![Vec::new(); nodes],
            original: vec![Vec::new(); nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.graph.len()
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> ArcId {
        debug_assert!(cap >= 0);
        let from_slot = self.graph[from].len();
        let to_slot = self.graph[to].len() + usize::from(from == to);
        self.graph[from].push(Arc {
            to,
            cap,
            rev: to_slot,
        });
        self.original[from].push(cap);
        self.graph[to].push(Arc {
            to: from,
            cap: 0,
            rev: from_slot,
        });
        self.original[to].push(0);
        ArcId {
            node: from,
            slot: from_slot,
        }
    }

    /// Flow currently routed through `arc`.
    pub fn flow(&self, arc: ArcId) -> i64 {
        self.original[arc.node][arc.slot] - self.graph[arc.node][arc.slot].cap
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> i64 {
        if source == sink {
            return 0;
        }
        let n = self.graph.len();
        let mut level = vec![-1i32; n];
        let mut next = vec![0usize; n];
        let mut total = 0;
        while self.levels(source, sink, &mut level) {
            next.iter_mut().for_each(|s| *s = 0);
            loop {
                let pushed = self.augment(source, sink, i64::MAX, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    fn levels(&self, source: usize, sink: usize, level: &mut [i32]) -> bool {
        level.fill(-1);
        level[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for arc in &self.graph[u] {
                if arc.cap > 0 && level[arc.to] < 0 {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        level[sink] >= 0
    }

    fn augment(
        &mut self,
        u: usize,
        sink: usize,
        limit: i64,
        level: &[i32],
        next: &mut [usize],
    ) -> i64 {
        if u == sink {
            return limit;
        }
        while next[u] < self.graph[u].len() {
            let i = next[u];
            let Arc { to, cap, rev } = self.graph[u][i];
            if cap > 0 && level[to] == level[u] + 1 {
                let pushed = self.augment(to, sink, limit.min(cap), level, next);
                if pushed > 0 {
                    self.graph[u][i].cap -= pushed;
                    self.graph[to][rev].cap += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0
    }
}

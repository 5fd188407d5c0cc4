//! Dinic max-flow with floating-point capacities.

use std::collections::VecDeque;

/// Capacities below this are treated as saturated.
const FLOW_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinCut {
    pub value: f64,
    /// Nodes reachable from the source in the final residual graph.
    pub source_side: Vec<bool>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Adds a directed edge; negative capacities are clamped to zero.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) {
        let cap = if cap.is_finite() { cap.max(0.0) } else { f64::MAX / 4.0 };
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0.0 });
    }

    fn bfs(&self, s: usize, level: &mut [i64]) {
        level.fill(-1);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > FLOW_EPS && level[to] < 0 {
                    level[to] = level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: f64, level: &[i64], it: &mut [usize]) -> f64 {
        if u == t {
            return pushed;
        }
        while it[u] < self.adj[u].len() {
            let e = self.adj[u][it[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > FLOW_EPS && level[to] == level[u] + 1 {
                let got = self.dfs(to, t, pushed.min(cap), level, it);
                if got > 0.0 {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            it[u] += 1;
        }
        0.0
    }

    /// Maximum s-t flow and the source side of a minimum cut. Consumes the
    /// residual capacities.
    pub fn max_flow(&mut self, s: usize, t: usize) -> MinCut {
        let mut total = 0.0;
        let mut level = vec![-1i64; self.n];
        if s != t {
            loop {
                self.bfs(s, &mut level);
                if level[t] < 0 {
                    break;
                }
                let mut it = vec![0usize; self.n];
                loop {
                    let f = self.dfs(s, t, f64::INFINITY, &level, &mut it);
                    if f <= 0.0 {
                        break;
                    }
                    total += f;
                }
            }
        }
        self.bfs(s, &mut level);
        MinCut {
            value: total,
            source_side: level.iter().map(|&l| l >= 0).collect(),
        }
    }
}

/// Min s-t cut of a graph given by `(tail, head)` arcs and per-arc capacities.
pub fn min_cut(nodes: usize, arcs: &[(usize, usize)], caps: &[f64], s: usize, t: usize) -> MinCut {
    let mut g = FlowNetwork::new(nodes);
    for (&(u, v), &c) in arcs.iter().zip(caps) {
        g.add_edge(u, v, c);
    }
    g.max_flow(s, t)
}

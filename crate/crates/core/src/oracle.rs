//! Brute-force references for the planner: per-terminal Dijkstra, metric
//! completion, Kruskal, and exact small-instance MGPF by Held-Karp.
//!
//! Nothing here reuses the planner's priority queue or union-find.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::roadmap::{NodeId, Roadmap};

/// Largest instance [`optimal_mgpf`] accepts.
pub const MAX_EXACT_TERMINALS: usize = 12;

/// Symmetric terminal-to-terminal cost matrix, `+inf` when disconnected.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(n: usize) -> Self {
        let mut data = vec![f64::INFINITY; n * n];
        (0..n).for_each(|i| data[i * n + i] = 0.0);
        Self { n, data }
    }

    /// Builds a matrix from a row-major slice, which must be square.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }
}

/// Shortest-path distance from every terminal to every roadmap node.
pub fn terminal_distance_fields(rm: &Roadmap) -> Vec<Vec<f64>> {
    rm.terminal_ids().map(|t| dijkstra(rm, t)).collect()
}

fn dijkstra(rm: &Roadmap, source: NodeId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; rm.len()];
    let mut done = vec![false; rm.len()];
    let mut heap = BinaryHeap::new();
    dist[source.index()] = 0.0;
    // nonnegative floats order like their bit patterns
    heap.push(Reverse((0f64.to_bits(), source.index())));
    while let Some(Reverse((bits, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        let du = f64::from_bits(bits);
        for &(v, w) in rm.adj(NodeId::from(u)) {
            let nd = du + w;
            if nd < dist[v.index()] {
                dist[v.index()] = nd;
                heap.push(Reverse((nd.to_bits(), v.index())));
            }
        }
    }
    dist
}

/// Exact roadmap shortest-path costs between every pair of terminals.
pub fn metric_completion(rm: &Roadmap) -> CostMatrix {
    let n = rm.num_terminals();
    let fields = terminal_distance_fields(rm);
    let mut m = CostMatrix::new(n);
    for i in 0..n {
        for j in i + 1..n {
            // row i is computed from i; use the smaller of the two runs
            m.set(i, j, fields[i][j].min(fields[j][i]));
        }
    }
    m
}

/// Minimum spanning tree of a cost matrix, `None` when the finite entries do
/// not connect every vertex.
pub fn kruskal(costs: &CostMatrix) -> Option<(Vec<(usize, usize)>, f64)> {
    let n = costs.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = costs.get(i, j);
            if c.is_finite() {
                edges.push((c, i, j));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut uf = UnionFind::new(n);
    let mut tree = Vec::new();
    let mut weight = 0.0;
    for (c, i, j) in edges {
        if uf.merge(i, j) {
            tree.push((i, j));
            weight += c;
        }
    }
    (tree.len() + 1 == n || n == 0).then_some((tree, weight))
}

struct UnionFind {
    up: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            up: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn root(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.up[r] != r {
            r = self.up[r];
        }
        let mut cur = x;
        while self.up[cur] != r {
            let next = self.up[cur];
            self.up[cur] = r;
            cur = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.root(a), self.root(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.up[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Cheapest walk from `s` to `d` through every vertex of a metric cost
/// matrix, as a Hamiltonian path (Held-Karp over subsets).
pub fn optimal_mgpf(costs: &CostMatrix, s: usize, d: usize) -> Result<(Vec<usize>, f64)> {
    let n = costs.len();
    if n > MAX_EXACT_TERMINALS {
        return Err(Error::TooManyTerminals(n, MAX_EXACT_TERMINALS));
    }
    if n < 2 {
        return Err(Error::TooFewTerminals(n));
    }
    if s >= n || d >= n || s == d {
        return Err(Error::InvalidParameter(format!("bad endpoints {s}, {d}")));
    }
    let full = (1usize << n) - 1;
    let mut best = vec![f64::INFINITY; (1 << n) * n];
    let mut from = vec![usize::MAX; (1 << n) * n];
    best[(1 << s) * n + s] = 0.0;
    for mask in 1..=full {
        if mask & (1 << s) == 0 {
            continue;
        }
        for last in 0..n {
            let cur = best[mask * n + last];
            if mask & (1 << last) == 0 || !cur.is_finite() {
                continue;
            }
            for next in 0..n {
                if mask & (1 << next) != 0 {
                    continue;
                }
                // d may only be entered as the final vertex
                let next_mask = mask | (1 << next);
                if next == d && next_mask != full {
                    continue;
                }
                let cand = cur + costs.get(last, next);
                let slot = next_mask * n + next;
                if cand < best[slot] {
                    best[slot] = cand;
                    from[slot] = last;
                }
            }
        }
    }
    let total = best[full * n + d];
    if !total.is_finite() {
        return Err(Error::InvalidParameter("cost matrix has infinite entries".into()));
    }
    let mut order = vec![d];
    let (mut mask, mut last) = (full, d);
    while last != s {
        let prev = from[mask * n + last];
        mask &= !(1 << last);
        last = prev;
        order.push(last);
    }
    order.reverse();
    Ok((order, total))
}

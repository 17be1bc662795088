//! The terminal graph: best-known path costs between terminals, the active
//! edge set, the spanning tree over terminals and the sampling distribution.
//!
//! The tree is kept a minimum spanning tree of the finite-cost active edges
//! through cycle-property swaps. Pruning removes a non-tree edge once its
//! Euclidean lower bound exceeds the heaviest edge on the tree cycle it would
//! close; such an edge can never enter the MST again.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::roadmap::NodeId;
use crate::space::{euclidean, Config};

/// Unordered terminal pair, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TerminalPair {
    pub a: usize,
    pub b: usize,
}

impl TerminalPair {
    pub fn new(u: usize, v: usize) -> Self {
        debug_assert_ne!(u, v);
        if u < v {
            Self { a: u, b: v }
        } else {
            Self { a: v, b: u }
        }
    }
}

impl std::fmt::Display for TerminalPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// Sampling distribution over active terminal pairs. Pairs with zero
/// probability have no entry.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbabilityTable {
    entries: Vec<(TerminalPair, f64)>,
}

impl ProbabilityTable {
    /// Builds a table from nonnegative weights, normalizing them. Zero
    /// weights are dropped.
    pub fn from_weights<I>(weights: I) -> Self
    where
        I: IntoIterator<Item = (TerminalPair, f64)>,
    {
        let mut entries: Vec<_> = weights.into_iter().filter(|(_, w)| *w > 0.0).collect();
        entries.sort_by_key(|e| e.0);
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        if total > 0.0 && total.is_finite() {
            entries.iter_mut().for_each(|(_, w)| *w /= total);
        } else {
            entries.clear();
        }
        Self { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, pair: TerminalPair) -> f64 {
        self.entries
            .binary_search_by(|(p, _)| p.cmp(&pair))
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (TerminalPair, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Inverse-CDF lookup for `u` in `[0, 1)`.
    pub fn pick(&self, u: f64) -> Option<TerminalPair> {
        let mut acc = 0.0;
        for &(pair, p) in &self.entries {
            acc += p;
            if u < acc {
                return Some(pair);
            }
        }
        self.entries.last().map(|(pair, _)| *pair)
    }
}

#[derive(Debug, Clone)]
pub struct TerminalGraph {
    n: usize,
    cost: Vec<f64>,
    lower: Vec<f64>,
    witness: Vec<Option<(NodeId, NodeId)>>,
    active: BTreeSet<TerminalPair>,
    tree: BTreeSet<TerminalPair>,
    pruned: BTreeSet<TerminalPair>,
}

impl TerminalGraph {
    /// Terminal graph over `terminals`: every pair active with infinite
    /// cost, Euclidean lower bounds, empty tree.
    pub fn new(terminals: &[Config]) -> Self {
        let n = terminals.len();
        let mut lower = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                lower[i * n + j] = euclidean(terminals[i].coords(), terminals[j].coords());
            }
        }
        Self::with_lower_bounds(n, lower)
    }

    /// Terminal graph with an explicit row-major lower-bound matrix.
    pub fn with_lower_bounds(n: usize, lower: Vec<f64>) -> Self {
        assert_eq!(lower.len(), n * n);
        let mut cost = vec![f64::INFINITY; n * n];
        for i in 0..n {
            cost[i * n + i] = 0.0;
        }
        let active = all_pairs(n).collect();
        Self {
            n,
            cost,
            lower,
            witness: vec![None; n * n],
            active,
            tree: BTreeSet::new(),
            pruned: BTreeSet::new(),
        }
    }

    pub fn num_terminals(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> usize {
        0
    }

    pub fn destination(&self) -> usize {
        self.n - 1
    }

    pub fn num_pairs(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    #[inline]
    pub fn cost(&self, p: TerminalPair) -> f64 {
        self.cost[p.a * self.n + p.b]
    }

    #[inline]
    pub fn lower_bound(&self, p: TerminalPair) -> f64 {
        self.lower[p.a * self.n + p.b]
    }

    pub fn witness(&self, p: TerminalPair) -> Option<(NodeId, NodeId)> {
        self.witness[p.a * self.n + p.b]
    }

    /// Overwrites a cost (used by batch planners that recompute every pair).
    pub fn set_cost(&mut self, p: TerminalPair, cost: f64) {
        self.cost[p.a * self.n + p.b] = cost;
        self.cost[p.b * self.n + p.a] = cost;
        self.witness[p.a * self.n + p.b] = None;
    }

    /// Lowers the cost of `p` to `cost` if that is an improvement. Returns
    /// whether the cost changed.
    pub fn offer_cost(&mut self, p: TerminalPair, cost: f64, via: Option<(NodeId, NodeId)>) -> bool {
        if cost < self.cost(p) {
            self.cost[p.a * self.n + p.b] = cost;
            self.cost[p.b * self.n + p.a] = cost;
            self.witness[p.a * self.n + p.b] = via;
            true
        } else {
            false
        }
    }

    pub fn active(&self) -> &BTreeSet<TerminalPair> {
        &self.active
    }

    pub fn tree(&self) -> &BTreeSet<TerminalPair> {
        &self.tree
    }

    pub fn pruned(&self) -> &BTreeSet<TerminalPair> {
        &self.pruned
    }

    pub fn pruned_fraction(&self) -> f64 {
        if self.num_pairs() == 0 {
            return 0.0;
        }
        self.pruned.len() as f64 / self.num_pairs() as f64
    }

    /// Whether the tree spans every terminal.
    pub fn is_spanning(&self) -> bool {
        self.n >= 1 && self.tree.len() + 1 == self.n && self.tree_is_connected()
    }

    fn tree_is_connected(&self) -> bool {
        let adj = self.tree_adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Total tree cost, `+inf` while no spanning tree exists.
    pub fn tree_weight(&self) -> f64 {
        if self.tree.is_empty() {
            return f64::INFINITY;
        }
        self.tree.iter().map(|&p| self.cost(p)).sum()
    }

    /// Replaces the tree wholesale (used by batch planners).
    pub fn install_tree(&mut self, tree: BTreeSet<TerminalPair>) {
        self.tree = tree;
    }

    pub(crate) fn tree_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for p in &self.tree {
            adj[p.a].push(p.b);
            adj[p.b].push(p.a);
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        adj
    }

    /// Tree edges on the unique tree path from `u` to `v`.
    pub fn tree_path(&self, u: usize, v: usize) -> Result<Vec<TerminalPair>> {
        tree_path_in(&self.tree_adjacency(), u, v).ok_or(Error::TreeNotSpanning)
    }

    /// Heaviest tree edge on the cycle that `e` closes with the tree. Ties go
    /// to the lexicographically smallest pair.
    pub fn cycle_max_edge(&self, e: TerminalPair) -> Result<(TerminalPair, f64)> {
        if !self.is_spanning() {
            return Err(Error::TreeNotSpanning);
        }
        let path = self.tree_path(e.a, e.b)?;
        self.max_on_path(&path).ok_or(Error::TreeNotSpanning)
    }

    fn max_on_path(&self, path: &[TerminalPair]) -> Option<(TerminalPair, f64)> {
        let mut best: Option<(TerminalPair, f64)> = None;
        for &p in path {
            let c = self.cost(p);
            best = match best {
                Some((bp, bc)) if bc > c || (bc == c && bp < p) => Some((bp, bc)),
                _ => Some((p, c)),
            };
        }
        best
    }

    /// Kruskal over every finite-cost active pair. `None` when the finite
    /// edges do not connect all terminals.
    pub fn kruskal(&self) -> Option<BTreeSet<TerminalPair>> {
        let mut edges: Vec<_> = self
            .active
            .iter()
            .copied()
            .filter(|&p| self.cost(p).is_finite())
            .collect();
        edges.sort_by(|x, y| self.cost(*x).total_cmp(&self.cost(*y)).then(x.cmp(y)));
        let mut sets = DisjointSets::new(self.n);
        let mut tree = BTreeSet::new();
        for p in edges {
            if sets.union(p.a, p.b) {
                tree.insert(p);
            }
        }
        (tree.len() + 1 == self.n).then_some(tree)
    }

    /// One maintenance pass over the active non-tree edges in lexicographic
    /// order.
    pub fn update_tree(&mut self) {
        let order: Vec<_> = self.active.difference(&self.tree).copied().collect();
        self.update_tree_in_order(&order);
    }

    /// Like [`update_tree`](Self::update_tree) with an explicit scan order.
    /// Pairs that are not active or already in the tree are skipped.
    pub fn update_tree_in_order(&mut self, order: &[TerminalPair]) {
        if self.tree.is_empty() {
            if let Some(tree) = self.kruskal() {
                self.tree = tree;
            }
            return;
        }
        let mut adj = self.tree_adjacency();
        for &e in order {
            if !self.active.contains(&e) || self.tree.contains(&e) {
                continue;
            }
            let Some(path) = tree_path_in(&adj, e.a, e.b) else {
                continue;
            };
            let path_cost: f64 = path.iter().map(|&p| self.cost(p)).sum();
            let (heaviest, heaviest_cost) = self
                .max_on_path(&path)
                .expect("distinct endpoints have a nonempty tree path");
            if heaviest_cost > self.cost(e) {
                self.tree.remove(&heaviest);
                self.tree.insert(e);
                adj = self.tree_adjacency();
            } else if path_cost < self.cost(e) {
                // a cheaper route exists through the tree
                let i = e.a * self.n + e.b;
                self.cost[i] = path_cost;
                self.cost[e.b * self.n + e.a] = path_cost;
                self.witness[i] = None;
            }
        }
    }

    /// Removes active non-tree edges whose lower bound exceeds the heaviest
    /// edge of their tree cycle. No-op while the tree does not span.
    pub fn prune_edges(&mut self) -> Vec<TerminalPair> {
        if !self.is_spanning() {
            return Vec::new();
        }
        let adj = self.tree_adjacency();
        let removed: Vec<_> = self
            .active
            .difference(&self.tree)
            .copied()
            .filter(|&e| {
                let path = tree_path_in(&adj, e.a, e.b).expect("spanning tree");
                let (_, heaviest) = self.max_on_path(&path).expect("nonempty path");
                self.lower_bound(e) > heaviest
            })
            .collect();
        for e in &removed {
            self.active.remove(e);
            self.pruned.insert(*e);
        }
        removed
    }

    /// Initial distribution: proportional to the lower bounds of the active
    /// pairs.
    pub fn lower_bound_probability(&self) -> ProbabilityTable {
        ProbabilityTable::from_weights(self.active.iter().map(|&p| (p, self.lower_bound(p))))
    }

    /// Recomputes the sampling distribution from cost gaps. Returns `prior`
    /// unchanged while there is no tree.
    pub fn update_probability(&self, prior: &ProbabilityTable) -> ProbabilityTable {
        if self.tree.is_empty() {
            return prior.clone();
        }
        let adj = self.tree_adjacency();
        let mst_part: Vec<(TerminalPair, f64)> = self
            .tree
            .iter()
            .map(|&e| (e, self.cost(e) - self.lower_bound(e)))
            .filter(|(_, gap)| *gap > 0.0)
            .collect();
        let non_mst_part: Vec<(TerminalPair, f64)> = self
            .active
            .difference(&self.tree)
            .filter_map(|&e| {
                let path = tree_path_in(&adj, e.a, e.b)?;
                let (_, heaviest) = self.max_on_path(&path)?;
                Some((e, self.cost(e) - heaviest))
            })
            .filter(|(_, gap)| *gap > 0.0)
            .collect();

        let (n1, n2) = (mst_part.len() as f64, non_mst_part.len() as f64);
        if n1 + n2 == 0.0 {
            return ProbabilityTable::from_weights(self.active.iter().map(|&p| (p, 1.0)));
        }
        let sum1: f64 = mst_part.iter().map(|(_, g)| g).sum();
        let sum2: f64 = non_mst_part.iter().map(|(_, g)| g).sum();
        let weights = mst_part
            .iter()
            .map(|&(e, g)| (e, n1 / (n1 + n2) * g / sum1))
            .chain(non_mst_part.iter().map(|&(e, g)| (e, n2 / (n1 + n2) * g / sum2)));
        ProbabilityTable::from_weights(weights)
    }
}

pub(crate) fn all_pairs(n: usize) -> impl Iterator<Item = TerminalPair> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| TerminalPair { a, b }))
}

fn tree_path_in(adj: &[Vec<usize>], from: usize, to: usize) -> Option<Vec<TerminalPair>> {
    if from == to {
        return Some(Vec::new());
    }
    let mut parent = vec![usize::MAX; adj.len()];
    parent[from] = from;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        if u == to {
            break;
        }
        for &v in &adj[u] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                stack.push(v);
            }
        }
    }
    if parent[to] == usize::MAX {
        return None;
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        path.push(TerminalPair::new(cur, parent[cur]));
        cur = parent[cur];
    }
    path.reverse();
    Some(path)
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: usize, b: usize) -> TerminalPair {
        TerminalPair::new(a, b)
    }

    /// Three terminals a=0, b=1, c=2 with the given lower bounds.
    fn triangle(h_ab: f64, h_bc: f64, h_ac: f64) -> TerminalGraph {
        let lower = vec![0.0, h_ab, h_ac, h_ab, 0.0, h_bc, h_ac, h_bc, 0.0];
        TerminalGraph::with_lower_bounds(3, lower)
    }

    #[test]
    fn kruskal_on_empty_tree() {
        let mut tg = triangle(0.5, 0.5, 0.5);
        tg.offer_cost(pair(0, 1), 1.0, None);
        tg.offer_cost(pair(1, 2), 2.0, None);
        tg.offer_cost(pair(0, 2), 4.0, None);
        tg.update_tree();
        assert_eq!(
            tg.tree().iter().copied().collect::<Vec<_>>(),
            vec![pair(0, 1), pair(1, 2)]
        );
        assert_eq!(tg.tree_weight(), 3.0);
    }

    #[test]
    fn disconnected_costs_leave_tree_empty() {
        let mut tg = triangle(0.5, 0.5, 0.5);
        tg.offer_cost(pair(0, 1), 1.0, None);
        tg.update_tree();
        assert!(tg.tree().is_empty());
        assert_eq!(tg.tree_weight(), f64::INFINITY);
    }

    #[test]
    fn cycle_max_on_path() {
        let mut tg = triangle(0.5, 0.5, 0.5);
        tg.offer_cost(pair(0, 1), 1.0, None);
        tg.offer_cost(pair(1, 2), 2.0, None);
        tg.update_tree();
        assert_eq!(tg.cycle_max_edge(pair(0, 2)).unwrap(), (pair(1, 2), 2.0));
        let empty = triangle(1.0, 1.0, 1.0);
        assert_eq!(empty.cycle_max_edge(pair(0, 2)), Err(Error::TreeNotSpanning));
    }

    #[test]
    fn star_leaf_pair_cycle_max() {
        let lower = vec![0.0; 16];
        let mut tg = TerminalGraph::with_lower_bounds(4, lower);
        tg.offer_cost(pair(0, 1), 1.0, None);
        tg.offer_cost(pair(0, 2), 3.0, None);
        tg.offer_cost(pair(0, 3), 2.0, None);
        tg.install_tree([pair(0, 1), pair(0, 2), pair(0, 3)].into_iter().collect());
        assert_eq!(tg.cycle_max_edge(pair(1, 3)).unwrap(), (pair(0, 3), 2.0));
        assert_eq!(tg.cycle_max_edge(pair(2, 3)).unwrap(), (pair(0, 2), 3.0));
    }

    #[test]
    fn swap_on_cheaper_cycle_edge() {
        let mut tg = triangle(0.5, 0.5, 0.5);
        tg.offer_cost(pair(0, 1), 1.0, None);
        tg.offer_cost(pair(1, 2), 2.0, None);
        tg.update_tree();
        tg.offer_cost(pair(0, 2), 1.5, None);
        tg.update_tree();
        assert_eq!(
            tg.tree().iter().copied().collect::<Vec<_>>(),
            vec![pair(0, 1), pair(0, 2)]
        );
        assert_eq!(tg.tree_weight(), 2.5);
    }

    #[test]
    fn path_cost_lowers_non_tree_edge() {
        let mut tg = triangle(0.5, 0.5, 0.5);
        tg.offer_cost(pair(0, 1), 1.0, None);
        tg.offer_cost(pair(1, 2), 1.0, None);
        tg.update_tree();
        tg.offer_cost(pair(0, 2), 5.0, None);
        tg.update_tree();
        assert_eq!(tg.cost(pair(0, 2)), 2.0);
        assert_eq!(tg.tree().len(), 2);
        assert!(!tg.tree().contains(&pair(0, 2)));
    }

    #[test]
    fn pruning_uses_lower_bound() {
        let mut tg = triangle(1.0, 1.0, 3.0);
        tg.offer_cost(pair(0, 1), 1.0, None);
        tg.offer_cost(pair(1, 2), 2.0, None);
        assert!(tg.prune_edges().is_empty(), "no tree yet");
        tg.update_tree();
        assert_eq!(tg.prune_edges(), vec![pair(0, 2)]);
        assert!(!tg.active().contains(&pair(0, 2)));
        assert_eq!(tg.pruned_fraction(), 1.0 / 3.0);

        let mut kept = triangle(1.0, 1.0, 1.5);
        kept.offer_cost(pair(0, 1), 1.0, None);
        kept.offer_cost(pair(1, 2), 2.0, None);
        kept.update_tree();
        assert!(kept.prune_edges().is_empty());
    }

    #[test]
    fn probability_from_tree_gaps_only() {
        // tree gaps 1 and 3; the non-tree edge has no positive gap
        let mut tg = triangle(1.0, 1.0, 1.0);
        tg.offer_cost(pair(0, 1), 2.0, None);
        tg.offer_cost(pair(1, 2), 4.0, None);
        tg.offer_cost(pair(0, 2), 4.0, None);
        tg.update_tree();
        assert!(tg.tree().contains(&pair(0, 1)));
        let prob = tg.update_probability(&ProbabilityTable::default());
        let in_tree: Vec<_> = tg.tree().iter().copied().collect();
        let gaps: Vec<f64> = in_tree.iter().map(|&e| tg.cost(e) - 1.0).collect();
        assert_eq!(gaps, vec![1.0, 3.0]);
        assert!((prob.get(in_tree[0]) - 0.25).abs() < 1e-15);
        assert!((prob.get(in_tree[1]) - 0.75).abs() < 1e-15);
        assert_eq!(prob.len(), 2);
    }

    #[test]
    fn probability_balances_partitions() {
        // two terminals in the tree with gap 2, one non-tree edge with gap 2
        let lower = vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        let mut tg = TerminalGraph::with_lower_bounds(3, lower);
        tg.offer_cost(pair(0, 1), 3.0, None);
        tg.offer_cost(pair(1, 2), 1.0, None);
        tg.offer_cost(pair(0, 2), 5.0, None);
        tg.install_tree([pair(0, 1), pair(1, 2)].into_iter().collect());
        // pair(1,2) has gap 0; pair(0,2) has gap 5 - 3 = 2
        let prob = tg.update_probability(&ProbabilityTable::default());
        assert!((prob.get(pair(0, 1)) - 0.5).abs() < 1e-15);
        assert!((prob.get(pair(0, 2)) - 0.5).abs() < 1e-15);
        assert_eq!(prob.get(pair(1, 2)), 0.0);
    }

    #[test]
    fn converged_graph_falls_back_to_uniform() {
        let mut tg = triangle(1.0, 1.0, 2.0);
        tg.offer_cost(pair(0, 1), 1.0, None);
        tg.offer_cost(pair(1, 2), 1.0, None);
        tg.offer_cost(pair(0, 2), 2.0, None);
        tg.update_tree();
        assert_eq!(tg.prune_edges(), vec![pair(0, 2)]);
        let prob = tg.update_probability(&ProbabilityTable::default());
        assert_eq!(prob.len(), 2);
        assert!((prob.get(pair(0, 1)) - 0.5).abs() < 1e-15);
        assert!((prob.get(pair(1, 2)) - 0.5).abs() < 1e-15);
        assert_eq!(prob.get(pair(0, 2)), 0.0);
    }

    #[test]
    fn prior_kept_without_tree() {
        let tg = triangle(1.0, 2.0, 1.0);
        let prior = tg.lower_bound_probability();
        assert!((prior.get(pair(1, 2)) - 0.5).abs() < 1e-15);
        assert_eq!(tg.update_probability(&prior), prior);
    }

    #[test]
    fn inverse_cdf_pick() {
        let table = ProbabilityTable::from_weights([(pair(0, 1), 1.0), (pair(0, 2), 3.0)]);
        assert_eq!(table.pick(0.0), Some(pair(0, 1)));
        assert_eq!(table.pick(0.2499), Some(pair(0, 1)));
        assert_eq!(table.pick(0.25), Some(pair(0, 2)));
        assert_eq!(table.pick(0.999_999), Some(pair(0, 2)));
        assert_eq!(ProbabilityTable::default().pick(0.5), None);
    }
}

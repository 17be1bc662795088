//! Incremental shortest-path forest rooted at the terminals.
//!
//! Every roadmap node carries its distance `g` to the closest terminal, its
//! parent on that shortest path and the terminal (root) the path ends at.
//! Inserting a sample attaches it to its best rooted neighbor and then runs a
//! Dijkstra-style relaxation outward from it. Whenever an expansion reaches a
//! node owned by a different root without improving it, the two half-paths
//! plus the connecting edge form a feasible path between the two roots; its
//! cost is offered to the terminal graph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::informed::SampleBatch;
use crate::oracle;
use crate::roadmap::{NodeId, Roadmap};
use crate::space::Env;
use crate::terminal_graph::{TerminalGraph, TerminalPair};

/// Tolerance used by [`verify_forest`].
pub const FOREST_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    g: Vec<f64>,
    parent: Vec<Option<NodeId>>,
    root: Vec<Option<NodeId>>,
}

impl Forest {
    /// Forest holding only the terminals, each its own root and parent.
    pub fn new(num_terminals: usize) -> Self {
        let ids: Vec<_> = (0..num_terminals).map(|i| Some(NodeId::from(i))).collect();
        Self {
            g: vec![0.0; num_terminals],
            parent: ids.clone(),
            root: ids,
        }
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn g(&self, id: NodeId) -> f64 {
        self.g[id.index()]
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.parent[id.index()]
    }

    pub fn root(&self, id: NodeId) -> Option<NodeId> {
        self.root[id.index()]
    }

    fn push_rootless(&mut self) {
        self.g.push(f64::INFINITY);
        self.parent.push(None);
        self.root.push(None);
    }

    /// Overwrites the distance of a node. Intended for tests that corrupt a
    /// forest on purpose.
    pub fn set_g(&mut self, id: NodeId, g: f64) {
        self.g[id.index()] = g;
    }

    /// Edges `(u, parent(u))` for every rooted non-terminal `u`.
    pub fn tree_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent.iter().enumerate().filter_map(|(i, p)| {
            let u = NodeId::from(i);
            p.filter(|&p| p != u).map(|p| (u, p))
        })
    }

    /// Node sequence from `id` up to its root, both ends included.
    pub fn chain_to_root(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            if p == cur {
                break;
            }
            out.push(p);
            cur = p;
        }
        out
    }
}

/// A feasible path between two roots found at a forest boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeetRecord {
    pub terminals: TerminalPair,
    pub cost: f64,
    pub via: (NodeId, NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct QueueEntry {
    key: f64,
    node: NodeId,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on key, then on node id
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Records the direct terminal-to-terminal edges present after the roadmap
/// was seeded with the terminals. Must run once before the first batch.
pub fn seed_terminals(rm: &Roadmap, forest: &mut Forest, tg: &mut TerminalGraph) -> Vec<MeetRecord> {
    let mut queue: BinaryHeap<QueueEntry> = rm
        .terminal_ids()
        .map(|t| QueueEntry { key: 0.0, node: t })
        .collect();
    let mut meets = Vec::new();
    propagate(rm, forest, tg, &mut queue, &mut meets);
    meets
}

/// Inserts every sample of `batch` into the roadmap and repairs the forest.
pub fn ripple(
    rm: &mut Roadmap,
    env: &Env,
    forest: &mut Forest,
    tg: &mut TerminalGraph,
    batch: &SampleBatch,
) -> Result<Vec<MeetRecord>> {
    let mut meets = Vec::new();
    let mut queue = BinaryHeap::new();
    for x in batch.points() {
        let (s, _) = rm.add_node(env, x)?;
        forest.push_rootless();
        debug_assert_eq!(forest.len(), rm.len());

        let best = rm
            .adj(s)
            .iter()
            .filter(|(n, _)| forest.root(*n).is_some())
            .map(|&(n, c)| (forest.g(n) + c, n))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let Some((g, n)) = best else {
            continue;
        };
        forest.g[s.index()] = g;
        forest.root[s.index()] = forest.root(n);
        forest.parent[s.index()] = Some(n);
        queue.push(QueueEntry { key: g, node: s });
        propagate(rm, forest, tg, &mut queue, &mut meets);
    }
    Ok(meets)
}

fn propagate(
    rm: &Roadmap,
    forest: &mut Forest,
    tg: &mut TerminalGraph,
    queue: &mut BinaryHeap<QueueEntry>,
    meets: &mut Vec<MeetRecord>,
) {
    while let Some(QueueEntry { key, node: u }) = queue.pop() {
        let gu = forest.g(u);
        if key > gu {
            continue;
        }
        let ru = forest.root(u).expect("queued nodes are rooted");
        for &(n, c) in rm.adj(u) {
            let through = gu + c;
            if through < forest.g(n) {
                forest.g[n.index()] = through;
                forest.root[n.index()] = Some(ru);
                forest.parent[n.index()] = Some(u);
                queue.push(QueueEntry {
                    key: through,
                    node: n,
                });
            } else if let Some(rn) = forest.root(n).filter(|&rn| rn != ru) {
                let cost = forest.g(n) + c + gu;
                let terminals = TerminalPair::new(rn.index(), ru.index());
                tg.offer_cost(terminals, cost, Some((n, u)));
                meets.push(MeetRecord {
                    terminals,
                    cost,
                    via: (n, u),
                });
            }
        }
    }
}

/// Checks the forest against multi-source Dijkstra from all terminals: every
/// distance must match and every root must be one of the closest terminals.
/// Unreachable nodes must be rootless with infinite distance.
pub fn verify_forest(rm: &Roadmap, forest: &Forest) -> bool {
    if forest.len() != rm.len() {
        return false;
    }
    let fields = oracle::terminal_distance_fields(rm);
    (0..rm.len()).all(|i| {
        let id = NodeId::from(i);
        let nearest = fields.iter().map(|f| f[i]).fold(f64::INFINITY, f64::min);
        let g = forest.g(id);
        match forest.root(id) {
            None => nearest.is_infinite() && g.is_infinite(),
            Some(r) => {
                nearest.is_finite()
                    && (g - nearest).abs() <= FOREST_TOLERANCE
                    && (fields[r.index()][i] - nearest).abs() <= FOREST_TOLERANCE
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadmap::RadiusRule;
    use crate::space::Config;

    fn c(v: &[f64]) -> Config {
        Config::new(v.to_vec()).unwrap()
    }

    fn setup(terminals: &[Config], radius: f64) -> (Env, Roadmap, Forest, TerminalGraph) {
        let env = Env::empty(2).unwrap();
        let mut rm = Roadmap::with_rule(2, RadiusRule::Fixed(radius));
        rm.add_terminals(&env, terminals).unwrap();
        let mut forest = Forest::new(terminals.len());
        let mut tg = TerminalGraph::new(terminals);
        seed_terminals(&rm, &mut forest, &mut tg);
        (env, rm, forest, tg)
    }

    #[test]
    fn single_attachment() {
        let (env, mut rm, mut forest, mut tg) = setup(&[c(&[0.0, 0.0])], 0.5);
        let batch = SampleBatch::new(vec![c(&[0.3, 0.0])]);
        ripple(&mut rm, &env, &mut forest, &mut tg, &batch).unwrap();
        let s = NodeId(1);
        assert!((forest.g(s) - 0.3).abs() < 1e-15);
        assert_eq!(forest.root(s), Some(NodeId(0)));
        assert_eq!(forest.parent(s), Some(NodeId(0)));
        assert_eq!(forest.tree_edges().collect::<Vec<_>>(), vec![(s, NodeId(0))]);
        assert!(verify_forest(&rm, &forest));
    }

    #[test]
    fn terminals_only_forest_is_valid() {
        let (_, rm, forest, _) = setup(&[c(&[0.0, 0.0]), c(&[1.0, 1.0])], 0.5);
        assert!(verify_forest(&rm, &forest));
    }

    #[test]
    fn direct_terminal_edge_is_seeded() {
        let (_, _, _, tg) = setup(&[c(&[0.0, 0.0]), c(&[0.3, 0.4])], 0.6);
        assert!((tg.cost(TerminalPair::new(0, 1)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn corrupted_forest_is_detected() {
        let (env, mut rm, mut forest, mut tg) = setup(&[c(&[0.0, 0.0])], 0.5);
        let batch = SampleBatch::new(vec![c(&[0.3, 0.0]), c(&[0.5, 0.1])]);
        ripple(&mut rm, &env, &mut forest, &mut tg, &batch).unwrap();
        assert!(verify_forest(&rm, &forest));
        forest.set_g(NodeId(2), forest.g(NodeId(2)) + 0.1);
        assert!(!verify_forest(&rm, &forest));
    }

    #[test]
    fn meeting_two_terminals() {
        let (env, mut rm, mut forest, mut tg) = setup(&[c(&[0.0, 0.0]), c(&[1.0, 0.0])], 0.6);
        assert!(rm.neighbors(NodeId(0)).unwrap().is_empty(), "no direct edge");
        assert_eq!(tg.cost(TerminalPair::new(0, 1)), f64::INFINITY);
        let batch = SampleBatch::new(vec![c(&[0.5, 0.0])]);
        let meets = ripple(&mut rm, &env, &mut forest, &mut tg, &batch).unwrap();
        assert!((forest.g(NodeId(2)) - 0.5).abs() < 1e-15);
        assert_eq!(forest.root(NodeId(2)), Some(NodeId(0)));
        assert_eq!(meets.len(), 1);
        assert_eq!(meets[0].via, (NodeId(1), NodeId(2)));
        assert_eq!(tg.cost(TerminalPair::new(0, 1)), 1.0);
        assert!(verify_forest(&rm, &forest));
    }

    #[test]
    fn rewiring_through_new_sample() {
        // t and a are 0.5 apart, beyond the 0.46 radius; d is 0.45 from both.
        let t = c(&[0.3, 0.3]);
        let (env, mut rm, mut forest, mut tg) = setup(&[t], 0.46);
        let off = (0.45f64 * 0.45 - 0.25 * 0.25).sqrt();
        let d = c(&[0.5 - 0.6 * off, 0.45 + 0.8 * off]);
        let detour = SampleBatch::new(vec![d, c(&[0.7, 0.6])]);
        ripple(&mut rm, &env, &mut forest, &mut tg, &detour).unwrap();
        let (d, a) = (NodeId(1), NodeId(2));
        assert!((forest.g(a) - 0.9).abs() < 1e-12);
        assert_eq!(forest.parent(a), Some(d));

        let s = SampleBatch::new(vec![c(&[0.5, 0.45])]);
        ripple(&mut rm, &env, &mut forest, &mut tg, &s).unwrap();
        assert!((forest.g(a) - 0.5).abs() < 1e-12);
        assert_eq!(forest.parent(a), Some(NodeId(3)));
        assert!(verify_forest(&rm, &forest));
    }

    #[test]
    fn rootless_sample_is_claimed_later() {
        let (env, mut rm, mut forest, mut tg) = setup(&[c(&[0.0, 0.0])], 0.3);
        let far = SampleBatch::new(vec![c(&[0.5, 0.0])]);
        ripple(&mut rm, &env, &mut forest, &mut tg, &far).unwrap();
        assert_eq!(forest.root(NodeId(1)), None);
        assert!(verify_forest(&rm, &forest));
        let bridge = SampleBatch::new(vec![c(&[0.25, 0.0])]);
        ripple(&mut rm, &env, &mut forest, &mut tg, &bridge).unwrap();
        assert_eq!(forest.root(NodeId(1)), Some(NodeId(0)));
        assert!((forest.g(NodeId(1)) - 0.5).abs() < 1e-15);
        assert!(verify_forest(&rm, &forest));
    }
}

//! Anytime multi-goal planners and Steiner-tree path extraction.
//!
//! [`IstStar`] interleaves informed batch sampling with incremental forest
//! repair, tree maintenance, pruning and probability updates. [`Baseline`]
//! grows the same roadmap with uniform samples and recomputes the terminal
//! MST from scratch after every batch. Both consume `n_s` samples per
//! iteration so their traces line up row by row.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::informed::{add_samples, SampleBatch};
use crate::ripple::{ripple, seed_terminals, Forest};
use crate::roadmap::{NodeId, Roadmap};
use crate::space::{euclidean, Config, Env};
use crate::terminal_graph::{all_pairs, ProbabilityTable, TerminalGraph, TerminalPair};

pub const DEFAULT_BATCH_SIZE: usize = 200;
pub const DEFAULT_ETA: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerParams {
    /// Samples per batch.
    pub n_s: usize,
    /// Number of batches.
    pub n_b: usize,
    pub eta: f64,
    pub seed: u64,
    /// Disable to keep every terminal pair active (diagnostics only).
    pub prune: bool,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            n_s: DEFAULT_BATCH_SIZE,
            n_b: 20,
            eta: DEFAULT_ETA,
            seed: 0,
            prune: true,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_s == 0 || self.n_b == 0 {
            return Err(Error::InvalidParameter(
                "batch size and batch count must be positive".into(),
            ));
        }
        if !(self.eta > 1.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eta must exceed 1, got {}",
                self.eta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub samples_total: usize,
    pub edges_active: usize,
    pub edges_pruned_cum: usize,
    pub tree_cost: f64,
    pub path_cost: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlannerTrace {
    pub rows: Vec<TraceRow>,
}

impl PlannerTrace {
    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn final_tree_cost(&self) -> f64 {
        self.last().map_or(f64::INFINITY, |r| r.tree_cost)
    }
}

/// A walk from the origin through every terminal to the destination.
#[derive(Debug, Clone, PartialEq)]
pub struct MgpfPath {
    /// Terminal indices in first-visit order, origin first, destination last.
    pub visit_order: Vec<usize>,
    /// Roadmap nodes of the walk; consecutive entries share a roadmap edge.
    pub nodes: Vec<NodeId>,
    pub waypoints: Vec<Config>,
    pub cost: f64,
}

/// Common driver interface of the two planners.
pub trait Planner {
    /// Runs one batch and returns its trace row.
    fn step(&mut self) -> Result<TraceRow>;

    fn params(&self) -> &PlannerParams;

    fn iteration(&self) -> usize;

    fn roadmap(&self) -> &Roadmap;

    fn terminal_graph(&self) -> &TerminalGraph;

    /// Best path on the current roadmap, if a spanning tree exists.
    fn path(&self) -> Result<MgpfPath> {
        extract_path(self.terminal_graph(), self.roadmap())
    }

    /// Runs the remaining batches, calling `observer` after each one.
    fn run(&mut self, observer: &mut dyn FnMut(&TraceRow)) -> Result<PlannerTrace> {
        let mut trace = PlannerTrace::default();
        while self.iteration() < self.params().n_b {
            let row = self.step()?;
            observer(&row);
            trace.rows.push(row);
        }
        Ok(trace)
    }
}

fn validate_terminals(env: &Env, terminals: &[Config]) -> Result<()> {
    if terminals.len() < 2 {
        return Err(Error::TooFewTerminals(terminals.len()));
    }
    for t in terminals {
        if !env.is_state_valid(t)? {
            return Err(Error::InvalidState(t.coords().to_vec()));
        }
    }
    for i in 0..terminals.len() {
        for j in i + 1..terminals.len() {
            if euclidean(terminals[i].coords(), terminals[j].coords()) == 0.0 {
                return Err(Error::DuplicateTerminal(i, j));
            }
        }
    }
    Ok(())
}

#[cfg(not(target_arch = "wasm32"))]
struct Stopwatch(std::time::Instant);

#[cfg(not(target_arch = "wasm32"))]
impl Stopwatch {
    fn start() -> Self {
        Self(std::time::Instant::now())
    }

    fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

// no monotonic clock in the browser sandbox without JS bindings
#[cfg(target_arch = "wasm32")]
struct Stopwatch;

#[cfg(target_arch = "wasm32")]
impl Stopwatch {
    fn start() -> Self {
        Self
    }

    fn seconds(&self) -> f64 {
        0.0
    }
}

/// Informed-sampling Steiner tree planner.
pub struct IstStar {
    env: Env,
    terminals: Vec<Config>,
    params: PlannerParams,
    roadmap: Roadmap,
    forest: Forest,
    tg: TerminalGraph,
    prob: ProbabilityTable,
    rng: ChaCha8Rng,
    iteration: usize,
    samples_total: usize,
    elapsed: f64,
    last_batch: SampleBatch,
}

impl IstStar {
    /// Seeds the roadmap with the terminals (first is the origin, last the
    /// destination) and their mutual edges.
    pub fn new(env: Env, terminals: Vec<Config>, params: PlannerParams) -> Result<Self> {
        params.validate()?;
        validate_terminals(&env, &terminals)?;
        let clock = Stopwatch::start();
        let mut roadmap = Roadmap::for_env(&env, params.eta)?;
        roadmap.add_terminals(&env, &terminals)?;
        let mut forest = Forest::new(terminals.len());
        let mut tg = TerminalGraph::new(&terminals);
        seed_terminals(&roadmap, &mut forest, &mut tg);
        let prob = tg.lower_bound_probability();
        Ok(Self {
            env,
            terminals,
            params,
            roadmap,
            forest,
            tg,
            prob,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            iteration: 0,
            samples_total: 0,
            elapsed: clock.seconds(),
            last_batch: SampleBatch::default(),
        })
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn terminals(&self) -> &[Config] {
        &self.terminals
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn probabilities(&self) -> &ProbabilityTable {
        &self.prob
    }

    pub fn last_batch(&self) -> &SampleBatch {
        &self.last_batch
    }
}

impl Planner for IstStar {
    fn step(&mut self) -> Result<TraceRow> {
        let clock = Stopwatch::start();
        let batch = add_samples(
            &self.prob,
            &self.tg,
            &self.terminals,
            &self.env,
            self.params.n_s,
            &mut self.rng,
        )?;
        ripple(
            &mut self.roadmap,
            &self.env,
            &mut self.forest,
            &mut self.tg,
            &batch,
        )?;
        self.tg.update_tree();
        if self.params.prune {
            self.tg.prune_edges();
        }
        self.prob = self.tg.update_probability(&self.prob);
        let path_cost = path_cost_or_inf(&self.tg, &self.roadmap);

        self.iteration += 1;
        self.samples_total += batch.len();
        self.last_batch = batch;
        self.elapsed += clock.seconds();
        Ok(TraceRow {
            iteration: self.iteration,
            samples_total: self.samples_total,
            edges_active: self.tg.active().len(),
            edges_pruned_cum: self.tg.pruned().len(),
            tree_cost: self.tg.tree_weight(),
            path_cost,
            wall_time: self.elapsed,
        })
    }

    fn params(&self) -> &PlannerParams {
        &self.params
    }

    fn iteration(&self) -> usize {
        self.iteration
    }

    fn roadmap(&self) -> &Roadmap {
        &self.roadmap
    }

    fn terminal_graph(&self) -> &TerminalGraph {
        &self.tg
    }
}

/// Uniform-sampling roadmap densification with a from-scratch terminal MST
/// after every batch.
pub struct Baseline {
    env: Env,
    terminals: Vec<Config>,
    params: PlannerParams,
    roadmap: Roadmap,
    tg: TerminalGraph,
    rng: ChaCha8Rng,
    iteration: usize,
    samples_total: usize,
    elapsed: f64,
}

impl Baseline {
    pub fn new(env: Env, terminals: Vec<Config>, params: PlannerParams) -> Result<Self> {
        params.validate()?;
        validate_terminals(&env, &terminals)?;
        let clock = Stopwatch::start();
        let mut roadmap = Roadmap::for_env(&env, params.eta)?;
        roadmap.add_terminals(&env, &terminals)?;
        let tg = TerminalGraph::new(&terminals);
        Ok(Self {
            env,
            terminals,
            params,
            roadmap,
            tg,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            iteration: 0,
            samples_total: 0,
            elapsed: clock.seconds(),
        })
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn terminals(&self) -> &[Config] {
        &self.terminals
    }

    fn recompute_tree(&mut self) {
        let n = self.terminals.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|t| shortest_distances(&self.roadmap, NodeId::from(t)))
            .collect();
        for p in all_pairs(n) {
            self.tg.set_cost(p, rows[p.a][p.b]);
        }
        self.tg.install_tree(Default::default());
        if let Some(tree) = self.tg.kruskal() {
            self.tg.install_tree(tree);
        }
    }
}

impl Planner for Baseline {
    fn step(&mut self) -> Result<TraceRow> {
        let clock = Stopwatch::start();
        for _ in 0..self.params.n_s {
            let x = self.env.sample_uniform_free(&mut self.rng)?;
            self.roadmap.add_node(&self.env, &x)?;
        }
        self.recompute_tree();
        let path_cost = path_cost_or_inf(&self.tg, &self.roadmap);
        self.iteration += 1;
        self.samples_total += self.params.n_s;
        self.elapsed += clock.seconds();
        Ok(TraceRow {
            iteration: self.iteration,
            samples_total: self.samples_total,
            edges_active: self.tg.active().len(),
            edges_pruned_cum: 0,
            tree_cost: self.tg.tree_weight(),
            path_cost,
            wall_time: self.elapsed,
        })
    }

    fn params(&self) -> &PlannerParams {
        &self.params
    }

    fn iteration(&self) -> usize {
        self.iteration
    }

    fn roadmap(&self) -> &Roadmap {
        &self.roadmap
    }

    fn terminal_graph(&self) -> &TerminalGraph {
        &self.tg
    }
}

fn path_cost_or_inf(tg: &TerminalGraph, rm: &Roadmap) -> f64 {
    if tg.is_spanning() {
        extract_path(tg, rm).map_or(f64::INFINITY, |p| p.cost)
    } else {
        f64::INFINITY
    }
}

/// Terminal visit order of a depth-first walk of the tree from the origin
/// that ends at the destination: at every node on the origin-destination
/// tree path, the child leading to the destination is entered last, and the
/// destination's own subtrees are walked before it is visited for good.
pub fn tree_visit_order(tg: &TerminalGraph) -> Result<Vec<usize>> {
    if !tg.is_spanning() {
        return Err(Error::TreeNotSpanning);
    }
    let adj = tg.tree_adjacency();
    let (s, d) = (tg.origin(), tg.destination());
    let on_path: Vec<bool> = {
        let mut mark = vec![false; tg.num_terminals()];
        mark[s] = true;
        for p in tg.tree_path(s, d)? {
            mark[p.a] = true;
            mark[p.b] = true;
        }
        mark
    };

    fn preorder(adj: &[Vec<usize>], u: usize, parent: usize, out: &mut Vec<usize>) {
        out.push(u);
        for &v in &adj[u] {
            if v != parent {
                preorder(adj, v, u, out);
            }
        }
    }

    let mut order = Vec::with_capacity(tg.num_terminals());
    let (mut u, mut parent) = (s, usize::MAX);
    loop {
        if u == d {
            for &v in &adj[u] {
                if v != parent {
                    preorder(&adj, v, u, &mut order);
                }
            }
            order.push(d);
            break;
        }
        order.push(u);
        let mut next = None;
        for &v in &adj[u] {
            if v == parent {
                continue;
            }
            if on_path[v] {
                next = Some(v);
            } else {
                preorder(&adj, v, u, &mut order);
            }
        }
        parent = u;
        u = next.expect("destination reachable along the tree path");
    }
    Ok(order)
}

/// Shortcut of the doubled Steiner tree: terminals in [`tree_visit_order`],
/// joined by roadmap shortest paths. The cost never exceeds twice the tree
/// weight.
pub fn extract_path(tg: &TerminalGraph, rm: &Roadmap) -> Result<MgpfPath> {
    let visit_order = tree_visit_order(tg)?;
    let mut nodes = vec![NodeId::from(visit_order[0])];
    let mut cost = 0.0;
    for w in visit_order.windows(2) {
        let (leg, leg_cost) =
            shortest_path(rm, NodeId::from(w[0]), NodeId::from(w[1])).ok_or(Error::TreeNotSpanning)?;
        nodes.extend_from_slice(&leg[1..]);
        cost += leg_cost;
    }
    let waypoints = nodes
        .iter()
        .map(|&id| rm.config(id))
        .collect::<Result<Vec<_>>>()?;
    Ok(MgpfPath {
        visit_order,
        nodes,
        waypoints,
        cost,
    })
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier {
    dist: f64,
    node: NodeId,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(rm: &Roadmap, source: NodeId, target: Option<NodeId>) -> (Vec<f64>, Vec<Option<NodeId>>) {
    let mut dist = vec![f64::INFINITY; rm.len()];
    let mut prev = vec![None; rm.len()];
    let mut heap = BinaryHeap::new();
    dist[source.index()] = 0.0;
    heap.push(Frontier {
        dist: 0.0,
        node: source,
    });
    while let Some(Frontier { dist: du, node: u }) = heap.pop() {
        if du > dist[u.index()] {
            continue;
        }
        if Some(u) == target {
            break;
        }
        for &(v, w) in rm.adj(u) {
            let nd = du + w;
            if nd < dist[v.index()] {
                dist[v.index()] = nd;
                prev[v.index()] = Some(u);
                heap.push(Frontier { dist: nd, node: v });
            }
        }
    }
    (dist, prev)
}

fn shortest_distances(rm: &Roadmap, source: NodeId) -> Vec<f64> {
    dijkstra(rm, source, None).0
}

/// Roadmap shortest path between two nodes.
pub fn shortest_path(rm: &Roadmap, from: NodeId, to: NodeId) -> Option<(Vec<NodeId>, f64)> {
    let (dist, prev) = dijkstra(rm, from, Some(to));
    let total = dist[to.index()];
    if !total.is_finite() {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    while let Some(p) = prev[cur.index()] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    Some((path, total))
}

/// Terminal pair helper for callers that index terminals by position.
pub fn pair(a: usize, b: usize) -> TerminalPair {
    TerminalPair::new(a, b)
}

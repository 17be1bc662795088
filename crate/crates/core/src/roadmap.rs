//! The roadmap graph: sampled configurations joined by collision-checked
//! straight-line edges within a shrinking connection radius.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kdtree::KdTree;
use crate::space::{euclidean, Config, Env};

/// Dense node index, assigned in insertion order. Terminals come first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusParams {
    pub eta: f64,
    pub free_measure: f64,
    pub dim: usize,
}

impl RadiusParams {
    pub fn new(eta: f64, free_measure: f64, dim: usize) -> Result<Self> {
        if !(eta > 1.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta must exceed 1, got {eta}")));
        }
        if !(free_measure > 0.0 && free_measure <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "free measure must lie in (0, 1], got {free_measure}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            eta,
            free_measure,
            dim,
        })
    }
}

/// Volume of the unit ball in `dim` dimensions.
pub fn unit_ball_volume(dim: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_d = V_{d-2} * 2 pi / d
    let mut v = if dim.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut d = if dim.is_multiple_of(2) { 2 } else { 3 };
    while d <= dim {
        v *= 2.0 * PI / d as f64;
        d += 2;
    }
    v
}

/// PRM* connection radius for a roadmap of `q >= 2` nodes:
/// `eta * (2 (1 + 1/d) (free / zeta_d) (ln q / q))^(1/d)`.
pub fn connection_radius(q: usize, params: &RadiusParams) -> f64 {
    debug_assert!(q >= 2);
    let d = params.dim as f64;
    let q = q as f64;
    let gamma = 2.0 * (1.0 + 1.0 / d) * params.free_measure / unit_ball_volume(params.dim);
    params.eta * (gamma * q.ln() / q).powf(1.0 / d)
}

/// How the neighbor radius is chosen for each insertion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusRule {
    /// Shrinking PRM* radius.
    Adaptive(RadiusParams),
    /// Constant radius, for hand-built examples.
    Fixed(f64),
}

impl RadiusRule {
    /// Radius used when the roadmap reaches `q` nodes.
    pub fn radius(&self, q: usize) -> f64 {
        match self {
            RadiusRule::Adaptive(p) => connection_radius(q.max(2), p),
            RadiusRule::Fixed(r) => *r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct Roadmap {
    dim: usize,
    coords: Vec<f64>,
    adjacency: Vec<Vec<(NodeId, f64)>>,
    num_terminals: usize,
    num_edges: usize,
    rule: RadiusRule,
    index: KdTree,
    scratch: Vec<usize>,
}

impl Roadmap {
    pub fn new(params: RadiusParams) -> Self {
        Self::with_rule(params.dim, RadiusRule::Adaptive(params))
    }

    pub fn with_rule(dim: usize, rule: RadiusRule) -> Self {
        Self {
            dim,
            coords: Vec::new(),
            adjacency: Vec::new(),
            num_terminals: 0,
            num_edges: 0,
            rule,
            index: KdTree::new(dim),
            scratch: Vec::new(),
        }
    }

    pub fn for_env(env: &Env, eta: f64) -> Result<Self> {
        Ok(Self::new(RadiusParams::new(eta, env.free_measure(), env.dim())?))
    }

    /// Inserts the terminal set into an empty roadmap.
    pub fn add_terminals(&mut self, env: &Env, terminals: &[Config]) -> Result<()> {
        if !self.is_empty() {
            return Err(Error::InvalidParameter(
                "terminals must be inserted into an empty roadmap".into(),
            ));
        }
        for t in terminals {
            self.add_node(env, t)?;
        }
        self.num_terminals = terminals.len();
        Ok(())
    }

    /// Inserts `x` and connects it to every node within the current radius
    /// whose straight-line motion is collision free.
    pub fn add_node(&mut self, env: &Env, x: &Config) -> Result<(NodeId, Vec<Edge>)> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        if !env.is_state_valid(x)? {
            return Err(Error::InvalidState(x.coords().to_vec()));
        }
        let id = NodeId::from(self.len());
        let q = self.len() + 1;
        let mut candidates = std::mem::take(&mut self.scratch);
        if q >= 2 {
            let radius = self.rule.radius(q);
            let coords = &self.coords;
            let dim = self.dim;
            self.index.within(
                x.coords(),
                radius,
                |j| &coords[j * dim..(j + 1) * dim],
                &mut candidates,
            );
            candidates.sort_unstable();
        } else {
            candidates.clear();
        }

        self.coords.extend_from_slice(x.coords());
        self.adjacency.push(Vec::new());
        let mut edges = Vec::new();
        let dim = self.dim;
        for &j in &candidates {
            let other = &self.coords[j * dim..(j + 1) * dim];
            if !env.motion_valid_coords(x.coords(), other) {
                continue;
            }
            let cost = euclidean(x.coords(), other);
            let to = NodeId::from(j);
            self.adjacency[id.index()].push((to, cost));
            self.adjacency[j].push((id, cost));
            edges.push(Edge { from: id, to, cost });
        }
        self.num_edges += edges.len();
        self.scratch = candidates;
        let coords = &self.coords;
        self.index.insert(id.index(), |j| &coords[j * dim..(j + 1) * dim]);
        Ok((id, edges))
    }

    pub fn neighbors(&self, id: NodeId) -> Result<&[(NodeId, f64)]> {
        self.adjacency
            .get(id.index())
            .map(Vec::as_slice)
            .ok_or(Error::UnknownNode(id.index()))
    }

    #[inline]
    pub(crate) fn adj(&self, id: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[id.index()]
    }

    #[inline]
    pub fn coords_of(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn config(&self, id: NodeId) -> Result<Config> {
        if id.index() >= self.len() {
            return Err(Error::UnknownNode(id.index()));
        }
        Config::new(self.coords_of(id.index()).to_vec())
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn num_terminals(&self) -> usize {
        self.num_terminals
    }

    pub fn terminal_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.num_terminals).map(NodeId::from)
    }

    pub fn is_terminal(&self, id: NodeId) -> bool {
        id.index() < self.num_terminals
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius_rule(&self) -> &RadiusRule {
        &self.rule
    }

    /// Radius that the next insertion will use.
    pub fn current_radius(&self) -> f64 {
        self.rule.radius(self.len() + 1)
    }

    /// All undirected edges, each reported once with `from < to`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, adj)| {
            adj.iter()
                .filter(move |(j, _)| j.index() > i)
                .map(move |&(to, cost)| Edge {
                    from: NodeId::from(i),
                    to,
                    cost,
                })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[f64]) -> Config {
        Config::new(v.to_vec()).unwrap()
    }

    #[test]
    fn radius_reference_value() {
        let p = RadiusParams::new(1.1, 0.19, 2).unwrap();
        // 1.1 * sqrt(3 * 0.19 / pi * ln(100) / 100)
        let by_hand = 1.1 * (3.0 * 0.19 / PI * 100f64.ln() / 100.0).sqrt();
        let r = connection_radius(100, &p);
        assert!((r - by_hand).abs() < 1e-15);
        assert!((r - 0.1005).abs() < 5e-4);
    }

    #[test]
    fn radius_monotone_and_linear_in_eta() {
        let p = RadiusParams::new(1.1, 0.5, 2).unwrap();
        let mut prev = connection_radius(3, &p);
        for q in 4..2000 {
            let r = connection_radius(q, &p);
            assert!(r < prev);
            prev = r;
        }
        let p2 = RadiusParams::new(2.2, 0.5, 2).unwrap();
        let ratio = connection_radius(50, &p2) / connection_radius(50, &p);
        assert!((ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * PI).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_eta() {
        assert!(RadiusParams::new(1.0, 0.5, 2).is_err());
        assert!(RadiusParams::new(f64::NAN, 0.5, 2).is_err());
    }

    #[test]
    fn add_node_connects_free_neighbors() {
        let env = Env::empty(2).unwrap();
        let mut rm = Roadmap::for_env(&env, 1.1).unwrap();
        let (a, e) = rm.add_node(&env, &c(&[0.0, 0.0])).unwrap();
        assert!(e.is_empty());
        let (b, e) = rm.add_node(&env, &c(&[0.05, 0.0])).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e[0].cost - 0.05).abs() < 1e-15);
        assert_eq!(rm.neighbors(a).unwrap(), &[(b, e[0].cost)]);
        assert_eq!(rm.neighbors(b).unwrap(), &[(a, e[0].cost)]);
        assert!(rm.neighbors(NodeId(7)).is_err());
    }

    #[test]
    fn blocked_motion_creates_no_edge() {
        let env = Env::center_obstacle(2).unwrap();
        let mut rm = Roadmap::for_env(&env, 50.0).unwrap();
        rm.add_node(&env, &c(&[0.04, 0.5])).unwrap();
        let (_, e) = rm.add_node(&env, &c(&[0.5, 0.04])).unwrap();
        assert!(e.is_empty());
        assert!(rm.add_node(&env, &c(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn isolated_node_has_no_neighbors() {
        let env = Env::empty(2).unwrap();
        let mut rm = Roadmap::for_env(&env, 1.1).unwrap();
        let (a, _) = rm.add_node(&env, &c(&[0.1, 0.1])).unwrap();
        assert!(rm.neighbors(a).unwrap().is_empty());
    }
}

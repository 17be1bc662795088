//! Unit-hypercube configuration spaces with axis-aligned box obstacles.
//!
//! Obstacles are closed: a configuration on an obstacle face is in collision.
//! Motion validation is a discretized straight-line check at a fixed
//! resolution. [`Env::is_motion_valid`] computes the same answer as the
//! state-by-state reference [`Env::is_motion_valid_discrete`] but only
//! evaluates states whose interpolation parameter falls near an obstacle.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Maximum rejection-sampling attempts before giving up.
pub const MAX_SAMPLING_ATTEMPTS: usize = 1_000_000;

/// Default step length for motion checks.
pub const DEFAULT_COLLISION_RESOLUTION: f64 = 1e-4;

const MONTE_CARLO_VOLUME_SAMPLES: usize = 1_000_000;
const MONTE_CARLO_VOLUME_SEED: u64 = 0x5eed_f4ee;

/// A point in the unit hypercube.
#[derive(Debug, Clone, PartialEq)]
pub struct Config(Vec<f64>);

impl Config {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidState(coords));
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Config> for Vec<f64> {
    fn from(c: Config) -> Self {
        c.0
    }
}

impl AsRef<[f64]> for Config {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Straight-line piece of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSegment {
    pub from: Config,
    pub to: Config,
    pub length: f64,
}

impl PathSegment {
    pub fn new(from: Config, to: Config) -> Result<Self> {
        let length = heuristic(&from, &to)?;
        Ok(Self { from, to, length })
    }
}

/// Euclidean distance between two equal-length coordinate slices.
#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Euclidean lower bound between two configurations.
pub fn heuristic(a: &Config, b: &Config) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(euclidean(a.coords(), b.coords()))
}

/// Closed axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct AaBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AaBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(lo, hi)| (hi - lo).max(0.0))
            .product()
    }

    fn overlaps(&self, other: &AaBox) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((alo, ahi), (blo, bhi))| alo.max(*blo) < ahi.min(*bhi))
    }

    /// Parameter interval of `a + t (b - a)`, `t` in `[0, 1]`, inside the box.
    fn segment_interval(&self, a: &[f64], delta: &[f64]) -> Option<(f64, f64)> {
        let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
        for k in 0..a.len() {
            let (s, e) = slab_interval(a[k], delta[k], self.lo[k], self.hi[k])?;
            t0 = t0.max(s);
            t1 = t1.min(e);
            if t0 > t1 {
                return None;
            }
        }
        Some((t0, t1))
    }
}

/// Parameter interval where `a + t d` lies in `[lo, hi]`, clipped to `[0, 1]`.
fn slab_interval(a: f64, d: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if d == 0.0 {
        return (lo <= a && a <= hi).then_some((0.0, 1.0));
    }
    let (mut s, mut e) = ((lo - a) / d, (hi - a) / d);
    if s > e {
        std::mem::swap(&mut s, &mut e);
    }
    let (s, e) = (s.max(0.0), e.min(1.0));
    (s <= e).then_some((s, e))
}

/// Regular grid of identical boxes: along every axis, cell `k` contributes the
/// slab `[k * period + offset, k * period + offset + width]`, and the obstacle
/// set is the Cartesian product of those slabs.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub cells_per_axis: usize,
    pub period: f64,
    pub offset: f64,
    pub width: f64,
}

impl Lattice {
    fn slab(&self, k: usize) -> (f64, f64) {
        let lo = k as f64 * self.period + self.offset;
        (lo, lo + self.width)
    }

    fn axis_inside(&self, x: f64) -> bool {
        if x < 0.0 {
            return false;
        }
        let k = ((x / self.period).floor() as usize).min(self.cells_per_axis - 1);
        let (lo, hi) = self.slab(k);
        lo <= x && x <= hi
    }

    fn contains(&self, p: &[f64]) -> bool {
        p.iter().all(|&x| self.axis_inside(x))
    }

    /// Sorted, disjoint parameter intervals where one coordinate of the
    /// segment lies inside some slab.
    fn axis_intervals(&self, a: f64, d: f64) -> Vec<(f64, f64)> {
        if d == 0.0 {
            return if self.axis_inside(a) {
                vec![(0.0, 1.0)]
            } else {
                Vec::new()
            };
        }
        let (lo, hi) = if d > 0.0 { (a, a + d) } else { (a + d, a) };
        let first = ((lo / self.period).floor().max(0.0) as usize).min(self.cells_per_axis - 1);
        let last = ((hi / self.period).floor().max(0.0) as usize).min(self.cells_per_axis - 1);
        let mut out: Vec<(f64, f64)> = (first..=last)
            .filter_map(|k| {
                let (slo, shi) = self.slab(k);
                slab_interval(a, d, slo, shi)
            })
            .collect();
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }

    fn segment_intervals(&self, a: &[f64], delta: &[f64]) -> Vec<(f64, f64)> {
        let mut acc = vec![(0.0, 1.0)];
        for k in 0..a.len() {
            let axis = self.axis_intervals(a[k], delta[k]);
            acc = intersect_sorted(&acc, &axis);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }
}

fn intersect_sorted(xs: &[(f64, f64)], ys: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < xs.len() && j < ys.len() {
        let lo = xs[i].0.max(ys[j].0);
        let hi = xs[i].1.min(ys[j].1);
        if lo <= hi {
            out.push((lo, hi));
        }
        if xs[i].1 < ys[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Obstacles {
    Boxes(Vec<AaBox>),
    Lattice(Lattice),
}

/// A configuration space `[0,1]^dim` with its obstacle set.
#[derive(Debug, Clone, PartialEq)]
pub struct Env {
    dim: usize,
    obstacles: Obstacles,
    free_measure: f64,
    collision_resolution: f64,
}

impl Env {
    /// Obstacle-free unit hypercube.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::from_boxes(dim, Vec::new())
    }

    /// One box of side 0.9 centered in the hypercube.
    pub fn center_obstacle(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let obstacle = AaBox::new(vec![0.05; dim], vec![0.95; dim]);
        Ok(Self {
            dim,
            obstacles: Obstacles::Boxes(vec![obstacle]),
            free_measure: 1.0 - 0.9_f64.powi(dim as i32),
            collision_resolution: DEFAULT_COLLISION_RESOLUTION,
        })
    }

    /// `10^dim` boxes of width 0.075 on a period-0.1 grid, with the 0.025
    /// gaps centered on cell boundaries.
    pub fn uniform_hypercubes(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let lattice = Lattice {
            cells_per_axis: 10,
            period: 0.1,
            offset: 0.0125,
            width: 0.075,
        };
        Ok(Self {
            dim,
            obstacles: Obstacles::Lattice(lattice),
            free_measure: 1.0 - 0.75_f64.powi(dim as i32),
            collision_resolution: DEFAULT_COLLISION_RESOLUTION,
        })
    }

    /// Custom box world. Overlapping boxes make the free volume
    /// non-additive; it is then estimated by Monte Carlo.
    pub fn from_boxes(dim: usize, boxes: Vec<AaBox>) -> Result<Self> {
        check_dim(dim)?;
        for (i, b) in boxes.iter().enumerate() {
            let ok = b.lo.len() == dim
                && b.hi.len() == dim
                && b.lo
                    .iter()
                    .zip(&b.hi)
                    .all(|(lo, hi)| lo.is_finite() && hi.is_finite() && 0.0 <= *lo && lo <= hi && *hi <= 1.0);
            if !ok {
                return Err(Error::InvalidObstacle(i));
            }
        }
        let overlapping = boxes
            .iter()
            .enumerate()
            .any(|(i, a)| boxes[i + 1..].iter().any(|b| a.overlaps(b)));
        let mut env = Self {
            dim,
            obstacles: Obstacles::Boxes(boxes),
            free_measure: 1.0,
            collision_resolution: DEFAULT_COLLISION_RESOLUTION,
        };
        env.free_measure = if overlapping {
            env.estimate_free_measure(MONTE_CARLO_VOLUME_SAMPLES, MONTE_CARLO_VOLUME_SEED)
        } else {
            match &env.obstacles {
                Obstacles::Boxes(b) => 1.0 - b.iter().map(AaBox::volume).sum::<f64>(),
                Obstacles::Lattice(_) => unreachable!(),
            }
        };
        if env.free_measure <= 0.0 {
            return Err(Error::InvalidParameter("obstacles leave no free space".into()));
        }
        Ok(env)
    }

    pub fn with_collision_resolution(mut self, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "collision resolution must be positive, got {resolution}"
            )));
        }
        self.collision_resolution = resolution;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn free_measure(&self) -> f64 {
        self.free_measure
    }

    pub fn collision_resolution(&self) -> f64 {
        self.collision_resolution
    }

    pub fn obstacles(&self) -> &Obstacles {
        &self.obstacles
    }

    pub fn obstacle_count(&self) -> usize {
        match &self.obstacles {
            Obstacles::Boxes(b) => b.len(),
            Obstacles::Lattice(l) => l.cells_per_axis.pow(self.dim as u32),
        }
    }

    /// Every obstacle as an explicit box. Lattices are expanded lazily.
    pub fn obstacle_boxes(&self) -> Box<dyn Iterator<Item = AaBox> + '_> {
        match &self.obstacles {
            Obstacles::Boxes(b) => Box::new(b.iter().cloned()),
            Obstacles::Lattice(l) => {
                let n = l.cells_per_axis;
                let dim = self.dim;
                Box::new((0..self.obstacle_count()).map(move |mut idx| {
                    let mut lo = Vec::with_capacity(dim);
                    let mut hi = Vec::with_capacity(dim);
                    for _ in 0..dim {
                        let (a, b) = l.slab(idx % n);
                        lo.push(a);
                        hi.push(b);
                        idx /= n;
                    }
                    AaBox::new(lo, hi)
                }))
            }
        }
    }

    fn check_dim_of(&self, x: &Config) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(())
    }

    fn collides(&self, p: &[f64]) -> bool {
        match &self.obstacles {
            Obstacles::Boxes(boxes) => boxes.iter().any(|b| b.contains(p)),
            Obstacles::Lattice(l) => l.contains(p),
        }
    }

    pub(crate) fn is_valid_coords(&self, p: &[f64]) -> bool {
        p.iter().all(|x| (0.0..=1.0).contains(x)) && !self.collides(p)
    }

    pub fn is_state_valid(&self, x: &Config) -> Result<bool> {
        self.check_dim_of(x)?;
        Ok(self.is_valid_coords(x.coords()))
    }

    fn check_endpoints(&self, a: &Config, b: &Config) -> Result<()> {
        for x in [a, b] {
            if !self.is_state_valid(x)? {
                return Err(Error::InvalidState(x.coords().to_vec()));
            }
        }
        Ok(())
    }

    /// Straight-line motion check at `collision_resolution`.
    pub fn is_motion_valid(&self, a: &Config, b: &Config) -> Result<bool> {
        self.check_endpoints(a, b)?;
        Ok(self.motion_valid_coords(a.coords(), b.coords()))
    }

    /// Reference motion check: evaluates all `m + 1` interpolated states,
    /// alternating between the two ends.
    pub fn is_motion_valid_discrete(&self, a: &Config, b: &Config) -> Result<bool> {
        self.check_endpoints(a, b)?;
        let seg = Discretization::new(a.coords(), b.coords(), self.collision_resolution);
        let mut buf = vec![0.0; self.dim];
        let (mut lo, mut hi) = (0usize, seg.steps);
        while lo <= hi {
            seg.state(lo, &mut buf);
            if !self.is_valid_coords(&buf) {
                return Ok(false);
            }
            if hi != lo {
                seg.state(hi, &mut buf);
                if !self.is_valid_coords(&buf) {
                    return Ok(false);
                }
            }
            lo += 1;
            if hi == 0 {
                break;
            }
            hi -= 1;
        }
        Ok(true)
    }

    pub(crate) fn motion_valid_coords(&self, a: &[f64], b: &[f64]) -> bool {
        let seg = Discretization::new(a, b, self.collision_resolution);
        let intervals = match &self.obstacles {
            Obstacles::Boxes(boxes) => boxes
                .iter()
                .filter_map(|bx| bx.segment_interval(&seg.start, &seg.delta))
                .collect::<Vec<_>>(),
            Obstacles::Lattice(l) => l.segment_intervals(&seg.start, &seg.delta),
        };
        let mut buf = vec![0.0; self.dim];
        intervals
            .iter()
            .all(|&(t0, t1)| !self.any_state_hits(&seg, t0, t1, &mut buf))
    }

    /// Whether any discretized state with parameter near `[t0, t1]` is in
    /// collision. Candidates are tested directly, so the result matches the
    /// state-by-state check exactly.
    fn any_state_hits(&self, seg: &Discretization, t0: f64, t1: f64, buf: &mut [f64]) -> bool {
        const SLACK: f64 = 1e-9;
        let m = seg.steps as f64;
        let first = ((t0 - SLACK) * m).floor().max(0.0) as usize;
        let last = (((t1 + SLACK) * m).ceil().min(m)) as usize;
        if first > last {
            return false;
        }
        if last - first > 8 {
            seg.state((first + last) / 2, buf);
            if !self.is_valid_coords(buf) {
                return true;
            }
        }
        (first..=last).any(|i| {
            seg.state(i, buf);
            !self.is_valid_coords(buf)
        })
    }

    /// Uniform sample of the free space by rejection.
    pub fn sample_uniform_free<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Config> {
        let mut buf = vec![0.0; self.dim];
        for _ in 0..MAX_SAMPLING_ATTEMPTS {
            buf.iter_mut().for_each(|x| *x = rng.random::<f64>());
            if !self.collides(&buf) {
                return Ok(Config(buf));
            }
        }
        Err(Error::SamplingFailed(MAX_SAMPLING_ATTEMPTS))
    }

    /// Fraction of `samples` uniform points that are collision free.
    pub fn estimate_free_measure(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut buf = vec![0.0; self.dim];
        let hits = (0..samples)
            .filter(|_| {
                buf.iter_mut().for_each(|x| *x = rng.random::<f64>());
                !self.collides(&buf)
            })
            .count();
        hits as f64 / samples as f64
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(())
}

/// `m + 1` evenly spaced states of a segment, endpoints in canonical order
/// so that the state set does not depend on argument order.
struct Discretization {
    start: Vec<f64>,
    end: Vec<f64>,
    delta: Vec<f64>,
    steps: usize,
}

impl Discretization {
    fn new(a: &[f64], b: &[f64], resolution: f64) -> Self {
        let swap = a
            .iter()
            .zip(b)
            .find_map(|(x, y)| match x.total_cmp(y) {
                std::cmp::Ordering::Equal => None,
                o => Some(o == std::cmp::Ordering::Greater),
            })
            .unwrap_or(false);
        let (start, end) = if swap { (b, a) } else { (a, b) };
        let length = euclidean(start, end);
        let steps = (length / resolution).ceil() as usize;
        Self {
            start: start.to_vec(),
            end: end.to_vec(),
            delta: start.iter().zip(end).map(|(s, e)| e - s).collect(),
            steps,
        }
    }

    fn state(&self, i: usize, out: &mut [f64]) {
        if i == 0 {
            out.copy_from_slice(&self.start);
        } else if i >= self.steps {
            out.copy_from_slice(&self.end);
        } else {
            let t = i as f64 / self.steps as f64;
            for k in 0..out.len() {
                out[k] = (self.start[k] + t * self.delta[k]).clamp(0.0, 1.0);
            }
        }
    }
}

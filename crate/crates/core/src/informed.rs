//! Informed sampling: uniform samples from the prolate hyperspheroid of
//! points that could shorten the path between two terminals, and the
//! per-batch sampler that picks terminal pairs from the probability table.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::space::{euclidean, Config, Env, MAX_SAMPLING_ATTEMPTS};
use crate::terminal_graph::{ProbabilityTable, TerminalGraph, TerminalPair};

/// Below this slack between `c_best` and `c_min` the ellipsoid is treated as
/// the focal segment.
const SEGMENT_SLACK: f64 = 1e-12;

/// Orthogonal map with determinant +1, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    dim: usize,
    m: Vec<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut m = vec![0.0; dim * dim];
        (0..dim).for_each(|i| m[i * dim + i] = 1.0);
        Self { dim, m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.m[row * self.dim + col]
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.m[r * self.dim..(r + 1) * self.dim]
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum();
        }
    }

    /// Left-multiplies by the Householder reflection `I - 2 w w^T / |w|^2`.
    fn reflect(&mut self, w: &[f64]) {
        let ww: f64 = w.iter().map(|x| x * x).sum();
        let d = self.dim;
        for col in 0..d {
            let dot: f64 = (0..d).map(|r| w[r] * self.m[r * d + col]).sum();
            let f = 2.0 * dot / ww;
            for r in 0..d {
                self.m[r * d + col] -= f * w[r];
            }
        }
    }
}

/// Rotation taking the first basis vector onto the unit direction from `a`
/// to `b`.
///
/// Built as a product of two Householder reflections, each with a
/// reflection vector of norm at least 1: the first flips a fixed axis, the
/// second maps the (possibly flipped) first axis onto the target direction.
pub fn rotation_to_world(a: &Config, b: &Config) -> Result<Rotation> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let len = euclidean(a.coords(), b.coords());
    if len == 0.0 {
        return Err(Error::DegenerateFoci);
    }
    let dir: Vec<f64> = a
        .coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| (y - x) / len)
        .collect();
    Ok(rotation_from_direction(&dir))
}

fn rotation_from_direction(dir: &[f64]) -> Rotation {
    let dim = dir.len();
    let mut rot = Rotation::identity(dim);
    let mut w = dir.to_vec();
    if dir[0] >= 0.0 {
        // first reflection sends e1 to -e1; second sends -e1 to dir
        let mut flip = vec![0.0; dim];
        flip[0] = 1.0;
        rot.reflect(&flip);
        w.iter_mut().for_each(|x| *x = -*x);
        w[0] -= 1.0;
    } else {
        // first reflection fixes e1; second sends e1 to dir
        let mut flip = vec![0.0; dim];
        flip[1] = 1.0;
        rot.reflect(&flip);
        w.iter_mut().for_each(|x| *x = -*x);
        w[0] += 1.0;
    }
    rot.reflect(&w);
    rot
}

/// The set `{x : |x - a| + |x - b| <= c_best}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InformedSet {
    focus_a: Config,
    focus_b: Config,
    c_best: f64,
    c_min: f64,
    center: Vec<f64>,
    rotation: Rotation,
}

impl InformedSet {
    pub fn new(focus_a: Config, focus_b: Config, c_best: f64) -> Result<Self> {
        let rotation = rotation_to_world(&focus_a, &focus_b)?;
        let c_min = euclidean(focus_a.coords(), focus_b.coords());
        if c_best.is_nan() || c_best < c_min - 1e-9 * c_min.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "best cost {c_best} undercuts the focal distance {c_min}"
            )));
        }
        let center = focus_a
            .coords()
            .iter()
            .zip(focus_b.coords())
            .map(|(x, y)| 0.5 * (x + y))
            .collect();
        Ok(Self {
            focus_a,
            focus_b,
            c_best,
            c_min,
            center,
            rotation,
        })
    }

    pub fn c_best(&self) -> f64 {
        self.c_best
    }

    pub fn c_min(&self) -> f64 {
        self.c_min
    }

    pub fn foci(&self) -> (&Config, &Config) {
        (&self.focus_a, &self.focus_b)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rotation
    }

    /// Semi-axis along the focal line and the common transverse semi-axis.
    pub fn semi_axes(&self) -> (f64, f64) {
        let major = self.c_best / 2.0;
        let slack = self.c_best - self.c_min;
        let minor = if slack <= SEGMENT_SLACK {
            0.0
        } else {
            (self.c_best * self.c_best - self.c_min * self.c_min)
                .max(0.0)
                .sqrt()
                / 2.0
        };
        (major, minor)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        euclidean(x, self.focus_a.coords()) + euclidean(x, self.focus_b.coords()) <= self.c_best
    }
}

fn unit_ball_point<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for x in out.iter_mut() {
            *x = StandardNormal.sample(rng);
            norm2 += *x * *x;
        }
        if norm2 > 0.0 {
            let radius = rng.random::<f64>().powf(1.0 / out.len() as f64);
            let scale = radius / norm2.sqrt();
            out.iter_mut().for_each(|x| *x *= scale);
            return;
        }
    }
}

/// Uniform collision-free sample of the informed set. An infinite best cost
/// makes the set the whole space.
pub fn sample_informed<R: Rng + ?Sized>(set: &InformedSet, env: &Env, rng: &mut R) -> Result<Config> {
    if !set.c_best.is_finite() {
        return env.sample_uniform_free(rng);
    }
    let dim = env.dim();
    let (major, minor) = set.semi_axes();
    let mut ball = vec![0.0; dim];
    let mut x = vec![0.0; dim];
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        unit_ball_point(rng, &mut ball);
        ball[0] *= major;
        ball[1..].iter_mut().for_each(|v| *v *= minor);
        set.rotation.apply(&ball, &mut x);
        x.iter_mut().zip(&set.center).for_each(|(v, c)| *v += c);
        if env.is_valid_coords(&x) {
            return Config::new(x);
        }
    }
    Err(Error::SamplingFailed(MAX_SAMPLING_ATTEMPTS))
}

/// Samples drawn in one iteration, each with the terminal pair whose informed
/// set produced it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleBatch {
    points: Vec<Config>,
    sources: Vec<Option<TerminalPair>>,
}

impl SampleBatch {
    pub fn new(points: Vec<Config>) -> Self {
        let sources = vec![None; points.len()];
        Self { points, sources }
    }

    pub fn points(&self) -> &[Config] {
        &self.points
    }

    pub fn sources(&self) -> &[Option<TerminalPair>] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, x: Config, source: Option<TerminalPair>) {
        self.points.push(x);
        self.sources.push(source);
    }
}

/// Draws `n_s` samples: each picks a terminal pair from `prob` and samples
/// its informed set bounded by the pair's current cost.
pub fn add_samples<R: Rng + ?Sized>(
    prob: &ProbabilityTable,
    tg: &TerminalGraph,
    terminals: &[Config],
    env: &Env,
    n_s: usize,
    rng: &mut R,
) -> Result<SampleBatch> {
    if n_s == 0 {
        return Err(Error::InvalidParameter("batch size must be positive".into()));
    }
    if prob.is_empty() {
        return Err(Error::NoActiveEdges);
    }
    let mut batch = SampleBatch::default();
    for _ in 0..n_s {
        let pair = prob.pick(rng.random::<f64>()).ok_or(Error::NoActiveEdges)?;
        let c_best = tg.cost(pair);
        let x = if c_best.is_finite() {
            let set = InformedSet::new(terminals[pair.a].clone(), terminals[pair.b].clone(), c_best)?;
            sample_informed(&set, env, rng)?
        } else {
            env.sample_uniform_free(rng)?
        };
        batch.push(x, Some(pair));
    }
    Ok(batch)
}

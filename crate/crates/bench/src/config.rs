//! Instance configuration files.

use std::path::Path;

use anyhow::{bail, ensure, Context};
use ist_core::{generate_terminals, AaBox, Baseline, Config, Env, IstStar, Planner, PlannerParams};
use serde::Deserialize;

pub const MIN_TERMINALS: usize = 2;
pub const MAX_TERMINALS: usize = 64;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub env: EnvSpec,
    pub terminals: TerminalSpec,
    pub planner: PlannerKind,
    #[serde(default)]
    pub params: ParamSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Empty,
    CenterObstacle,
    UniformHypercubes,
    Boxes,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSpec {
    pub kind: EnvKind,
    pub dim: usize,
    #[serde(default)]
    pub boxes: Vec<BoxSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Either explicit coordinates or a generated set of `count` terminals.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalSpec {
    pub points: Option<Vec<Vec<f64>>>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    Ist,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamSpec {
    pub n_s: usize,
    pub n_b: usize,
    pub eta: f64,
    pub seed: u64,
    pub prune: bool,
}

impl Default for ParamSpec {
    fn default() -> Self {
        let p = PlannerParams::default();
        Self {
            n_s: p.n_s,
            n_b: p.n_b,
            eta: p.eta,
            seed: p.seed,
            prune: p.prune,
        }
    }
}

impl From<ParamSpec> for PlannerParams {
    fn from(p: ParamSpec) -> Self {
        PlannerParams {
            n_s: p.n_s,
            n_b: p.n_b,
            eta: p.eta,
            seed: p.seed,
            prune: p.prune,
        }
    }
}

impl InstanceConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("invalid config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if self.env.kind != EnvKind::Boxes && !self.env.boxes.is_empty() {
            bail!("env.boxes is only allowed with kind \"boxes\"");
        }
        let t = &self.terminals;
        match (&t.points, t.count) {
            (Some(_), Some(_)) => bail!("terminals: give either points or count, not both"),
            (Some(_), None) if t.seed.is_some() => bail!("terminals.seed needs terminals.count"),
            (None, None) => bail!("terminals: points or count required"),
            _ => {}
        }
        let n = t.points.as_ref().map_or_else(|| t.count.unwrap_or(0), Vec::len);
        ensure!(
            (MIN_TERMINALS..=MAX_TERMINALS).contains(&n),
            "terminal count {n} outside {MIN_TERMINALS}..={MAX_TERMINALS}"
        );
        PlannerParams::from(self.params).validate()?;
        Ok(())
    }

    pub fn build_env(&self) -> anyhow::Result<Env> {
        let dim = self.env.dim;
        let env = match self.env.kind {
            EnvKind::Empty => Env::empty(dim)?,
            EnvKind::CenterObstacle => Env::center_obstacle(dim)?,
            EnvKind::UniformHypercubes => Env::uniform_hypercubes(dim)?,
            EnvKind::Boxes => {
                let boxes = self
                    .env
                    .boxes
                    .iter()
                    .map(|b| AaBox::new(b.lo.clone(), b.hi.clone()))
                    .collect();
                Env::from_boxes(dim, boxes)?
            }
        };
        Ok(env)
    }

    pub fn build_terminals(&self, env: &Env) -> anyhow::Result<Vec<Config>> {
        match &self.terminals.points {
            Some(points) => points
                .iter()
                .map(|p| Config::new(p.clone()).map_err(Into::into))
                .collect(),
            None => {
                let count = self.terminals.count.unwrap_or(0);
                Ok(generate_terminals(env, count, self.terminals.seed.unwrap_or(0))?)
            }
        }
    }

    /// Copy of this config for run `i` of a sweep: the run seed and any
    /// generated terminal set are offset by `i`.
    pub fn for_sweep_run(&self, i: u64) -> Self {
        let mut cfg = self.clone();
        cfg.params.seed = cfg.params.seed.wrapping_add(i);
        if cfg.terminals.count.is_some() {
            cfg.terminals.seed = Some(cfg.terminals.seed.unwrap_or(0).wrapping_add(i));
        }
        cfg
    }

    pub fn build_planner(&self) -> anyhow::Result<Box<dyn Planner + Send>> {
        let env = self.build_env()?;
        let terminals = self.build_terminals(&env)?;
        let params = self.params.into();
        Ok(match self.planner {
            PlannerKind::Ist => Box::new(IstStar::new(env, terminals, params)?),
            PlannerKind::Baseline => Box::new(Baseline::new(env, terminals, params)?),
        })
    }
}

//! Executing configured instances.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;

use crate::config::{InstanceConfig, PlannerKind};
use crate::trace_csv::{write_footer, write_row, Footer, HEADER};
use ist_core::{IstStar, Planner, Scene};

/// Why a command failed; decides the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or configuration.
    Usage(anyhow::Error),
    /// The planner or its output failed at run time.
    Planner(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Planner(_) => 2,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Planner(e) => e,
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;

pub fn load_config(path: &Path) -> Outcome<InstanceConfig> {
    InstanceConfig::load(path).map_err(Failure::Usage)
}

/// Runs `cfg`, streaming one CSV row per batch to `out`, then the footer.
pub fn run_instance<W: Write>(cfg: &InstanceConfig, out: &mut W, wall_time: bool) -> Outcome<Footer> {
    let mut planner = cfg.build_planner().map_err(Failure::Planner)?;
    let io = |e: std::io::Error| Failure::Planner(anyhow::Error::new(e).context("writing trace"));
    writeln!(out, "{HEADER}").map_err(io)?;
    let mut write_err = None;
    let trace = planner
        .run(&mut |row| {
            if write_err.is_none() {
                write_err = write_row(out, row, wall_time).err();
            }
        })
        .map_err(|e| Failure::Planner(e.into()))?;
    if let Some(e) = write_err {
        return Err(io(e));
    }
    let last = trace.last();
    let footer = Footer {
        final_tree_cost: trace.final_tree_cost(),
        final_path_cost: last.map_or(f64::INFINITY, |r| r.path_cost),
        pruned_fraction: planner.terminal_graph().pruned_fraction(),
    };
    write_footer(out, &footer).map_err(io)?;
    out.flush().map_err(io)?;
    Ok(footer)
}

pub fn run_to_file(cfg: &InstanceConfig, path: &Path, wall_time: bool) -> Outcome<Footer> {
    let file = File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(Failure::Planner)?;
    run_instance(cfg, &mut BufWriter::new(file), wall_time)
}

pub fn sweep_file_name(i: u64) -> String {
    format!("run_{i:04}.csv")
}

/// Runs seeds `0..seeds` of `cfg` in parallel, one CSV per run.
pub fn sweep(cfg: &InstanceConfig, seeds: u64, out_dir: &Path, wall_time: bool) -> Outcome<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))
        .map_err(Failure::Planner)?;
    (0..seeds)
        .into_par_iter()
        .map(|i| {
            let path = out_dir.join(sweep_file_name(i));
            run_to_file(&cfg.for_sweep_run(i), &path, wall_time).map(|_| path)
        })
        .collect()
}

/// SVG of the planner state after `iterations` batches.
pub fn snapshot(cfg: &InstanceConfig, iterations: usize) -> Outcome<String> {
    if cfg.env.dim != 2 {
        return Err(Failure::Usage(anyhow::anyhow!(
            "snapshots need a two-dimensional environment, got dim {}",
            cfg.env.dim
        )));
    }
    let planner_err = |e: ist_core::Error| Failure::Planner(e.into());
    let env = cfg.build_env().map_err(Failure::Usage)?;
    let terminals = cfg.build_terminals(&env).map_err(Failure::Planner)?;
    let params = cfg.params.into();
    match cfg.planner {
        PlannerKind::Ist => {
            let mut p = IstStar::new(env.clone(), terminals, params).map_err(planner_err)?;
            for _ in 0..iterations {
                p.step().map_err(planner_err)?;
            }
            let path = p.path().ok();
            let mut scene = Scene::new(&env)
                .roadmap(p.roadmap())
                .forest(p.forest())
                .terminal_graph(p.terminal_graph())
                .probabilities(p.probabilities());
            if let Some(path) = &path {
                scene = scene.path(path);
            }
            scene.render().map_err(planner_err)
        }
        PlannerKind::Baseline => {
            let mut p = ist_core::Baseline::new(env.clone(), terminals, params).map_err(planner_err)?;
            for _ in 0..iterations {
                p.step().map_err(planner_err)?;
            }
            let path = p.path().ok();
            let mut scene = Scene::new(&env)
                .roadmap(p.roadmap())
                .terminal_graph(p.terminal_graph());
            if let Some(path) = &path {
                scene = scene.path(path);
            }
            scene.render().map_err(planner_err)
        }
    }
}

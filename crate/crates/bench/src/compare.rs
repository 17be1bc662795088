//! Aggregation of trace sets into mean and confidence-interval tables.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};

use crate::trace_csv::{read_trace, real, Trace};

/// Two-sided 99% quantile of the standard normal distribution.
pub const Z_99: f64 = 2.576;

pub const COMPARE_HEADER: &str = "iteration,mean_a,ci_lo_a,ci_hi_a,mean_b,ci_lo_b,ci_hi_b";

/// Mean and normal-approximation 99% interval of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.iter().any(|v| !v.is_finite()) {
            let inf = f64::INFINITY;
            return Self {
                mean: inf,
                lo: inf,
                hi: inf,
            };
        }
        let mean = values.iter().sum::<f64>() / n;
        if values.len() < 2 {
            return Self {
                mean,
                lo: mean,
                hi: mean,
            };
        }
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let half = Z_99 * (var / n).sqrt();
        Self {
            mean,
            lo: mean - half,
            hi: mean + half,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<(usize, Interval, Interval)>,
    /// Mean final tree cost of set `a` over that of set `b`.
    pub final_cost_ratio: f64,
}

/// Every `.csv` file in `dir`, in name order.
pub fn load_traces(dir: &Path) -> anyhow::Result<Vec<Trace>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let f = std::fs::File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
            read_trace(io::BufReader::new(f)).with_context(|| format!("in {}", p.display()))
        })
        .collect()
}

fn iterations(set: &[Trace], name: &str) -> anyhow::Result<Vec<usize>> {
    ensure!(
        set.len() >= 2,
        "set {name} needs at least 2 runs, found {}",
        set.len()
    );
    let its: Vec<usize> = set[0].rows.iter().map(|r| r.iteration).collect();
    for t in &set[1..] {
        if t.rows.iter().map(|r| r.iteration).ne(its.iter().copied()) {
            bail!("set {name}: runs cover different iterations");
        }
    }
    Ok(its)
}

pub fn compare(a: &[Trace], b: &[Trace]) -> anyhow::Result<Comparison> {
    let its = iterations(a, "a")?;
    if iterations(b, "b")? != its {
        bail!("sets a and b cover different iterations");
    }
    ensure!(!its.is_empty(), "traces are empty");
    let column = |set: &[Trace], i: usize| -> Vec<f64> { set.iter().map(|t| t.rows[i].tree_cost).collect() };
    let rows: Vec<_> = its
        .iter()
        .enumerate()
        .map(|(i, &it)| (it, Interval::of(&column(a, i)), Interval::of(&column(b, i))))
        .collect();
    let (_, fa, fb) = rows[rows.len() - 1];
    Ok(Comparison {
        final_cost_ratio: fa.mean / fb.mean,
        rows,
    })
}

pub fn write_comparison<W: Write>(out: &mut W, cmp: &Comparison) -> io::Result<()> {
    writeln!(out, "{COMPARE_HEADER}")?;
    for (it, a, b) in &cmp.rows {
        writeln!(
            out,
            "{it},{},{},{},{},{},{}",
            real(a.mean),
            real(a.lo),
            real(a.hi),
            real(b.mean),
            real(b.lo),
            real(b.hi)
        )?;
    }
    writeln!(out, "# final_cost_ratio,{}", real(cmp.final_cost_ratio))
}

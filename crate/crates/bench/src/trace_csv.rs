//! CSV trace format.

use std::io::{self, BufRead, Write};

use anyhow::{bail, ensure, Context};
use ist_core::TraceRow;

pub const HEADER: &str =
    "iteration,samples_total,edges_active,edges_pruned_cum,tree_cost,path_cost,wall_time_s";

/// Formats a real with `sig` significant digits in the style of C's `%g`.
/// Infinities are written as `inf` and `-inf`.
pub fn format_real(v: f64, sig: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sig = sig.max(1);
    // the exponent after rounding to `sig` digits decides the style
    let sci = format!("{:.*e}", sig - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn real(v: f64) -> String {
    format_real(v, 9)
}

pub fn parse_real(s: &str) -> anyhow::Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().with_context(|| format!("not a number: {s:?}")),
    }
}

pub fn write_row<W: Write>(out: &mut W, row: &TraceRow, wall_time: bool) -> io::Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        row.iteration,
        row.samples_total,
        row.edges_active,
        row.edges_pruned_cum,
        real(row.tree_cost),
        real(row.path_cost),
        real(if wall_time { row.wall_time } else { 0.0 }),
    )
}

/// Summary lines written after the last row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footer {
    pub final_tree_cost: f64,
    pub final_path_cost: f64,
    pub pruned_fraction: f64,
}

pub fn write_footer<W: Write>(out: &mut W, footer: &Footer) -> io::Result<()> {
    writeln!(out, "# final_tree_cost,{}", real(footer.final_tree_cost))?;
    writeln!(out, "# final_path_cost,{}", real(footer.final_path_cost))?;
    writeln!(out, "# pruned_fraction,{}", real(footer.pruned_fraction))
}

/// A trace read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    pub footer: Vec<(String, String)>,
}

impl Trace {
    pub fn footer_value(&self, key: &str) -> Option<f64> {
        self.footer
            .iter()
            .find(|(k, _)| k == key)
            .and_then(|(_, v)| parse_real(v).ok())
    }
}

pub fn read_trace<R: BufRead>(input: R) -> anyhow::Result<Trace> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header != HEADER {
        bail!("unexpected header {header:?}");
    }
    let mut rows = Vec::new();
    let mut footer = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest.split_once(',').unwrap_or((rest, ""));
            footer.push((k.to_string(), v.to_string()));
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        ensure!(fields.len() == 7, "line {}: expected 7 fields", n + 2);
        rows.push(TraceRow {
            iteration: fields[0].parse()?,
            samples_total: fields[1].parse()?,
            edges_active: fields[2].parse()?,
            edges_pruned_cum: fields[3].parse()?,
            tree_cost: parse_real(fields[4])?,
            path_cost: parse_real(fields[5])?,
            wall_time: parse_real(fields[6])?,
        });
    }
    Ok(Trace { rows, footer })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (1.0, "1"),
            (0.5, "0.5"),
            (3.0, "3"),
            (1.0 / 3.0, "0.333333333"),
            (2.0 / 3.0, "0.666666667"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (999999999.5, "1e+09"),
            (-4.25, "-4.25"),
            (4.71171234567, "4.71171235"),
            (1e100, "1e+100"),
        ];
        for (v, want) in cases {
            assert_eq!(format_real(v, 9), want, "{v}");
        }
        assert_eq!(real(f64::INFINITY), "inf");
        assert_eq!(real(0.0), "0");
    }

    #[test]
    fn round_trip_row() {
        let row = TraceRow {
            iteration: 3,
            samples_total: 600,
            edges_active: 40,
            edges_pruned_cum: 5,
            tree_cost: f64::INFINITY,
            path_cost: 2.5,
            wall_time: 0.25,
        };
        let mut buf = Vec::new();
        writeln!(buf, "{HEADER}").unwrap();
        write_row(&mut buf, &row, true).unwrap();
        write_footer(
            &mut buf,
            &Footer {
                final_tree_cost: 1.5,
                final_path_cost: 2.5,
                pruned_fraction: 0.1,
            },
        )
        .unwrap();
        let trace = read_trace(&buf[..]).unwrap();
        assert_eq!(trace.rows, vec![row]);
        assert_eq!(trace.footer_value("pruned_fraction"), Some(0.1));
    }
}

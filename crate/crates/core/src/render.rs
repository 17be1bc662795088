//! SVG snapshots of two-dimensional planner state.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::informed::InformedSet;
use crate::planner::MgpfPath;
use crate::ripple::Forest;
use crate::roadmap::{NodeId, Roadmap};
use crate::space::{Config, Env};
use crate::terminal_graph::{ProbabilityTable, TerminalGraph};

const MARGIN: f64 = 12.0;

/// Layers to draw; everything except the environment is optional.
#[derive(Clone, Copy)]
pub struct Scene<'a> {
    env: &'a Env,
    roadmap: Option<&'a Roadmap>,
    forest: Option<&'a Forest>,
    terminal_graph: Option<&'a TerminalGraph>,
    probabilities: Option<&'a ProbabilityTable>,
    path: Option<&'a MgpfPath>,
    size: f64,
}

impl<'a> Scene<'a> {
    pub fn new(env: &'a Env) -> Self {
        Self {
            env,
            roadmap: None,
            forest: None,
            terminal_graph: None,
            probabilities: None,
            path: None,
            size: 600.0,
        }
    }

    pub fn roadmap(mut self, rm: &'a Roadmap) -> Self {
        self.roadmap = Some(rm);
        self
    }

    pub fn forest(mut self, forest: &'a Forest) -> Self {
        self.forest = Some(forest);
        self
    }

    pub fn terminal_graph(mut self, tg: &'a TerminalGraph) -> Self {
        self.terminal_graph = Some(tg);
        self
    }

    pub fn probabilities(mut self, prob: &'a ProbabilityTable) -> Self {
        self.probabilities = Some(prob);
        self
    }

    pub fn path(mut self, path: &'a MgpfPath) -> Self {
        self.path = Some(path);
        self
    }

    /// Side length of the drawing area in user units.
    pub fn size(mut self, size: f64) -> Self {
        self.size = size;
        self
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + v * self.size
    }

    fn y(&self, v: f64) -> f64 {
        MARGIN + (1.0 - v) * self.size
    }

    fn pt(&self, p: &[f64]) -> (f64, f64) {
        (self.x(p[0]), self.y(p[1]))
    }

    pub fn render(&self) -> Result<String> {
        if self.env.dim() != 2 {
            return Err(Error::UnsupportedDimension(self.env.dim()));
        }
        let full = self.size + 2.0 * MARGIN;
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{full:.0}" height="{full:.0}" viewBox="0 0 {full:.2} {full:.2}">"#
        );
        let _ = writeln!(
            s,
            r##"<rect x="{m:.2}" y="{m:.2}" width="{w:.2}" height="{w:.2}" fill="#ffffff" stroke="#222222" stroke-width="1"/>"##,
            m = MARGIN,
            w = self.size
        );
        self.obstacles(&mut s);
        self.ellipses(&mut s);
        self.roadmap_edges(&mut s);
        self.forest_edges(&mut s);
        self.tree(&mut s);
        self.walk(&mut s);
        self.nodes(&mut s);
        s.push_str("</svg>\n");
        Ok(s)
    }

    fn obstacles(&self, s: &mut String) {
        s.push_str(r##"<g id="obstacles" fill="#5a5a5a">"##);
        s.push('\n');
        for b in self.env.obstacle_boxes() {
            let (x0, y1) = self.pt(&b.lo);
            let (x1, y0) = self.pt(&b.hi);
            let _ = writeln!(
                s,
                r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}"/>"#,
                x1 - x0,
                y1 - y0
            );
        }
        s.push_str("</g>\n");
    }

    fn ellipses(&self, s: &mut String) {
        let (Some(rm), Some(tg), Some(prob)) = (self.roadmap, self.terminal_graph, self.probabilities) else {
            return;
        };
        if rm.num_terminals() < tg.num_terminals() {
            return;
        }
        let max_p = prob.iter().map(|(_, p)| p).fold(0.0, f64::max);
        if max_p <= 0.0 {
            return;
        }
        s.push_str(r##"<g id="informed-sets" fill="#f28e2b" stroke="#f28e2b">"##);
        s.push('\n');
        for (pair, p) in prob.iter() {
            let c_best = tg.cost(pair);
            if !c_best.is_finite() {
                continue;
            }
            let (Ok(a), Ok(b)) = (rm.config(NodeId::from(pair.a)), rm.config(NodeId::from(pair.b))) else {
                continue;
            };
            let Ok(set) = InformedSet::new(a.clone(), b.clone(), c_best) else {
                continue;
            };
            let opacity = 0.45 * p / max_p;
            let (major, minor) = set.semi_axes();
            let (cx, cy) = self.pt(set.center());
            let (ax, ay) = (a.coords(), b.coords());
            // screen y points down, so the angle flips sign
            let angle = -(ay[1] - ax[1]).atan2(ay[0] - ax[0]).to_degrees();
            if minor == 0.0 {
                let (x0, y0) = self.pt(a.coords());
                let (x1, y1) = self.pt(b.coords());
                let _ = writeln!(
                    s,
                    r#"<line class="degenerate" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke-width="3" stroke-opacity="{opacity:.3}"/>"#
                );
            } else {
                let _ = writeln!(
                    s,
                    r#"<ellipse cx="{cx:.2}" cy="{cy:.2}" rx="{:.2}" ry="{:.2}" transform="rotate({angle:.3} {cx:.2} {cy:.2})" fill-opacity="{opacity:.3}" stroke-opacity="0"/>"#,
                    major * self.size,
                    minor * self.size
                );
            }
        }
        s.push_str("</g>\n");
    }

    fn roadmap_edges(&self, s: &mut String) {
        let Some(rm) = self.roadmap else { return };
        s.push_str(r##"<g id="roadmap" stroke="#c8c8c8" stroke-width="0.4">"##);
        s.push('\n');
        for e in rm.edges() {
            self.segment(s, rm.coords_of(e.from.index()), rm.coords_of(e.to.index()));
        }
        s.push_str("</g>\n");
    }

    fn forest_edges(&self, s: &mut String) {
        let (Some(rm), Some(forest)) = (self.roadmap, self.forest) else {
            return;
        };
        let n = rm.num_terminals().max(1);
        s.push_str(r#"<g id="forest" stroke-width="0.9">"#);
        s.push('\n');
        for (u, p) in forest.tree_edges() {
            let hue = forest.root(u).map_or(0, |r| r.index() * 360 / n);
            let (x0, y0) = self.pt(rm.coords_of(u.index()));
            let (x1, y1) = self.pt(rm.coords_of(p.index()));
            let _ = writeln!(
                s,
                r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="hsl({hue},65%,55%)"/>"#
            );
        }
        s.push_str("</g>\n");
    }

    fn tree(&self, s: &mut String) {
        let (Some(rm), Some(tg)) = (self.roadmap, self.terminal_graph) else {
            return;
        };
        s.push_str(r##"<g id="steiner-tree" stroke="#1f4e9c" stroke-width="2.2" fill="none">"##);
        s.push('\n');
        for &pair in tg.tree() {
            let realized = match (tg.witness(pair), self.forest) {
                (Some((n, u)), Some(forest)) => {
                    let mut chain = forest.chain_to_root(n);
                    chain.reverse();
                    chain.extend(forest.chain_to_root(u));
                    Some(chain)
                }
                _ => None,
            };
            match realized {
                Some(chain) => self.polyline(s, chain.iter().map(|id| rm.coords_of(id.index())), None),
                None => {
                    let a = rm.coords_of(pair.a);
                    let b = rm.coords_of(pair.b);
                    self.polyline(s, [a, b].into_iter(), Some("4 3"));
                }
            }
        }
        s.push_str("</g>\n");
    }

    fn walk(&self, s: &mut String) {
        let Some(path) = self.path else { return };
        s.push_str(r##"<g id="path" stroke="#d62728" stroke-width="1.4" fill="none" stroke-opacity="0.8">"##);
        s.push('\n');
        self.polyline(s, path.waypoints.iter().map(Config::coords), None);
        s.push_str("</g>\n");
    }

    fn nodes(&self, s: &mut String) {
        let Some(rm) = self.roadmap else { return };
        s.push_str(r##"<g id="samples" fill="#444444">"##);
        s.push('\n');
        for i in rm.num_terminals()..rm.len() {
            let (x, y) = self.pt(rm.coords_of(i));
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1"/>"#);
        }
        s.push_str("</g>\n");
        let n = rm.num_terminals();
        s.push_str(r##"<g id="terminals" stroke="#000000" stroke-width="1">"##);
        s.push('\n');
        for i in 0..n {
            let color = if i == 0 {
                "#2ca02c"
            } else if i + 1 == n {
                "#d62728"
            } else {
                "#1f77b4"
            };
            let (x, y) = self.pt(rm.coords_of(i));
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{color}"/>"#);
        }
        s.push_str("</g>\n");
    }

    fn segment(&self, s: &mut String, a: &[f64], b: &[f64]) {
        let (x0, y0) = self.pt(a);
        let (x1, y1) = self.pt(b);
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}"/>"#
        );
    }

    fn polyline<'p>(&self, s: &mut String, pts: impl Iterator<Item = &'p [f64]>, dash: Option<&str>) {
        let mut points = String::new();
        for p in pts {
            let (x, y) = self.pt(p);
            let _ = write!(points, "{x:.2},{y:.2} ");
        }
        match dash {
            Some(d) => {
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" stroke-dasharray="{d}"/>"#,
                    points.trim_end()
                );
            }
            None => {
                let _ = writeln!(s, r#"<polyline points="{}"/>"#, points.trim_end());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obstacles_only_document() {
        let env = Env::center_obstacle(2).unwrap();
        let svg = Scene::new(&env).render().unwrap();
        assert!(svg.contains(r#"<g id="obstacles""#));
        assert_eq!(svg.matches("<rect").count(), 2);
        assert!(!svg.contains("<circle"));
    }

    #[test]
    fn higher_dimensions_rejected() {
        let env = Env::center_obstacle(3).unwrap();
        assert_eq!(Scene::new(&env).render(), Err(Error::UnsupportedDimension(3)));
    }
}

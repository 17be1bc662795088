//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function wraps a plain Rust function of the same purpose so
//! the logic can be tested natively.

use ist_core::{
    generate_terminals, informed, sample_informed, Config, Env, InformedSet, IstStar, Planner, PlannerParams,
    RadiusParams, Scene,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

const CANVAS: f64 = 600.0;

pub fn env_by_name(kind: &str) -> Result<Env, String> {
    let env = match kind {
        "empty" => Env::empty(2),
        "center_obstacle" => Env::center_obstacle(2),
        "uniform_hypercubes" => Env::uniform_hypercubes(2),
        other => return Err(format!("unknown environment {other:?}")),
    };
    env.map_err(|e| e.to_string())
}

/// IST* on a random planar instance, advanced one batch at a time.
pub struct Session {
    env: Env,
    planner: IstStar,
}

impl Session {
    pub fn new(kind: &str, terminals: usize, batch: usize, seed: u32) -> Result<Self, String> {
        let env = env_by_name(kind)?;
        let ts = generate_terminals(&env, terminals, seed as u64).map_err(|e| e.to_string())?;
        let params = PlannerParams {
            n_s: batch,
            n_b: usize::MAX,
            seed: seed as u64,
            ..PlannerParams::default()
        };
        let planner = IstStar::new(env.clone(), ts, params).map_err(|e| e.to_string())?;
        Ok(Self { env, planner })
    }

    /// Runs one batch and returns its statistics as a JSON object.
    pub fn step(&mut self) -> Result<String, String> {
        let row = self.planner.step().map_err(|e| e.to_string())?;
        let num = |v: f64| {
            if v.is_finite() {
                format!("{v}")
            } else {
                "null".into()
            }
        };
        Ok(format!(
            r#"{{"iteration":{},"samples":{},"active":{},"pruned":{},"tree_cost":{},"path_cost":{}}}"#,
            row.iteration,
            row.samples_total,
            row.edges_active,
            row.edges_pruned_cum,
            num(row.tree_cost),
            num(row.path_cost)
        ))
    }

    pub fn svg(&self) -> Result<String, String> {
        let p = &self.planner;
        let path = p.path().ok();
        let mut scene = Scene::new(&self.env)
            .roadmap(p.roadmap())
            .forest(p.forest())
            .terminal_graph(p.terminal_graph())
            .probabilities(p.probabilities())
            .size(CANVAS);
        if let Some(path) = &path {
            scene = scene.path(path);
        }
        scene.render().map_err(|e| e.to_string())
    }

    pub fn planner(&self) -> &IstStar {
        &self.planner
    }
}

fn config(x: f64, y: f64) -> Result<Config, String> {
    Config::new(vec![x, y]).map_err(|e| e.to_string())
}

/// `count` samples from the informed set of foci `a`, `b` and cost `c_best`
/// in the empty unit square, flattened as `x0, y0, x1, y1, ...`.
pub fn informed_points(
    a: (f64, f64),
    b: (f64, f64),
    c_best: f64,
    count: usize,
    seed: u32,
) -> Result<Vec<f64>, String> {
    let env = Env::empty(2).map_err(|e| e.to_string())?;
    let set = InformedSet::new(config(a.0, a.1)?, config(b.0, b.1)?, c_best).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let mut out = Vec::with_capacity(2 * count);
    for _ in 0..count {
        let x = sample_informed(&set, &env, &mut rng).map_err(|e| e.to_string())?;
        out.extend_from_slice(x.coords());
    }
    Ok(out)
}

pub fn radius(q: usize, eta: f64, free_measure: f64, dim: usize) -> Result<f64, String> {
    if q < 2 {
        return Err("node count must be at least 2".into());
    }
    let params = RadiusParams::new(eta, free_measure, dim).map_err(|e| e.to_string())?;
    Ok(ist_core::connection_radius(q, &params))
}

#[wasm_bindgen]
pub struct Demo {
    session: Session,
}

#[wasm_bindgen]
impl Demo {
    /// `kind` is one of `empty`, `center_obstacle`, `uniform_hypercubes`.
    #[wasm_bindgen(constructor)]
    pub fn new(kind: &str, terminals: usize, batch: usize, seed: u32) -> Result<Demo, JsError> {
        Session::new(kind, terminals, batch, seed)
            .map(|session| Demo { session })
            .map_err(|e| JsError::new(&e))
    }

    pub fn step(&mut self) -> Result<String, JsError> {
        self.session.step().map_err(|e| JsError::new(&e))
    }

    pub fn svg(&self) -> Result<String, JsError> {
        self.session.svg().map_err(|e| JsError::new(&e))
    }
}

#[wasm_bindgen(js_name = informedSamples)]
pub fn informed_samples(
    ax: f64,
    ay: f64,
    bx: f64,
    by: f64,
    c_best: f64,
    count: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    informed_points((ax, ay), (bx, by), c_best, count, seed).map_err(|e| JsError::new(&e))
}

/// Semi-axes of the informed set, `[major, minor]`.
#[wasm_bindgen(js_name = informedAxes)]
pub fn informed_axes(ax: f64, ay: f64, bx: f64, by: f64, c_best: f64) -> Result<Vec<f64>, JsError> {
    let set =
        (|| informed::InformedSet::new(config(ax, ay)?, config(bx, by)?, c_best).map_err(|e| e.to_string()))(
        )
        .map_err(|e| JsError::new(&e))?;
    let (major, minor) = set.semi_axes();
    Ok(vec![major, minor])
}

#[wasm_bindgen(js_name = connectionRadius)]
pub fn connection_radius(q: usize, eta: f64, free_measure: f64, dim: usize) -> Result<f64, JsError> {
    radius(q, eta, free_measure, dim).map_err(|e| JsError::new(&e))
}

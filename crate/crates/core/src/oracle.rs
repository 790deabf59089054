//! Brute-force minimizer of the ratio-difference objective over a planar
//! grid with zooming refinement. Slow and independent of the solver's
//! geometry, which makes it a cross-check rather than a localizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::Point;
use crate::solver::objective;
use crate::taxonomy::Scenario;

/// Grid nodes closer than this to a sensor are skipped.
const SENSOR_EXCLUSION: f64 = 1e-6;

/// Each refinement round shrinks the window by this factor.
const ZOOM: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn contains(&self, p: Point) -> bool {
        (self.x_min..=self.x_max).contains(&p.x) && (self.y_min..=self.y_max).contains(&p.y)
    }

    fn around(center: Point, half_w: f64, half_h: f64) -> Bounds {
        Bounds {
            x_min: center.x - half_w,
            x_max: center.x + half_w,
            y_min: center.y - half_h,
            y_max: center.y + half_h,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub bounds: Bounds,
    /// Nodes per axis.
    pub resolution: usize,
    pub refine_rounds: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            bounds: Bounds {
                x_min: -1.0,
                x_max: 2.0,
                y_min: -1.0,
                y_max: 2.0,
            },
            resolution: 512,
            refine_rounds: 3,
        }
    }
}

impl GridSpec {
    pub fn new(bounds: Bounds, resolution: usize, refine_rounds: usize) -> Result<Self> {
        if resolution < 16 {
            return Err(Error::InvalidInput(format!("grid resolution must be >= 16, got {resolution}")));
        }
        let ok = [bounds.x_min, bounds.x_max, bounds.y_min, bounds.y_max]
            .iter()
            .all(|v| v.is_finite())
            && bounds.x_max > bounds.x_min
            && bounds.y_max > bounds.y_min;
        if !ok {
            return Err(Error::InvalidInput(format!("invalid grid bounds {bounds:?}")));
        }
        Ok(Self {
            bounds,
            resolution,
            refine_rounds,
        })
    }

    /// Default grid, widened if needed so every sensor lies inside with a margin.
    pub fn covering(s: &Scenario) -> Self {
        let mut grid = Self::default();
        let b = &mut grid.bounds;
        for z in s.sensors() {
            b.x_min = b.x_min.min(z.x - 1.0);
            b.x_max = b.x_max.max(z.x + 1.0);
            b.y_min = b.y_min.min(z.y - 1.0);
            b.y_max = b.y_max.max(z.y + 1.0);
        }
        grid
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub point: Point,
    pub objective: f64,
    /// Best objective after the initial scan and after each refinement.
    pub round_best: Vec<f64>,
    /// Node-spacing diagonal of the finest grid scanned.
    pub cell_diagonal: f64,
}

type Candidate = (Point, f64);

/// Smaller objective wins; exact ties go to the lexicographically smaller point.
fn better(a: Candidate, b: Candidate) -> Candidate {
    match a.1.total_cmp(&b.1).then_with(|| a.0.lex_cmp(&b.0)) {
        std::cmp::Ordering::Greater => b,
        _ => a,
    }
}

fn node(b: &Bounds, n: usize, i: usize, j: usize) -> Point {
    let t = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / (n - 1) as f64;
    Point::new(t(b.x_min, b.x_max, i), t(b.y_min, b.y_max, j))
}

fn scan(s: &Scenario, b: &Bounds, n: usize, exec: Execution) -> Option<Candidate> {
    let rows = exec.map_indexed(n, |i| {
        let mut best: Option<Candidate> = None;
        for j in 0..n {
            let p = node(b, n, i, j);
            if s.sensors().iter().any(|z| z.distance(p) < SENSOR_EXCLUSION) {
                continue;
            }
            if let Ok(v) = objective(p, s) {
                let c = (p, v);
                best = Some(best.map_or(c, |cur| better(cur, c)));
            }
        }
        best
    });
    rows.into_iter().flatten().reduce(better)
}

/// Grid minimum of the objective with the default execution mode.
pub fn grid_minimize(s: &Scenario, g: &GridSpec) -> OracleResult {
    grid_minimize_with(s, g, Execution::default())
}

pub fn grid_minimize_with(s: &Scenario, g: &GridSpec, exec: Execution) -> OracleResult {
    let n = g.resolution.max(2);
    let mut bounds = g.bounds;
    let mut best = scan(s, &bounds, n, exec).unwrap_or((Point::new(f64::NAN, f64::NAN), f64::INFINITY));
    let mut round_best = vec![best.1];
    let spacing = |b: &Bounds| {
        let step = (n - 1) as f64;
        ((b.x_max - b.x_min) / step).hypot((b.y_max - b.y_min) / step)
    };
    let mut cell_diagonal = spacing(&bounds);
    for _ in 0..g.refine_rounds {
        let half_w = (bounds.x_max - bounds.x_min) / (2.0 * ZOOM);
        let half_h = (bounds.y_max - bounds.y_min) / (2.0 * ZOOM);
        bounds = Bounds::around(best.0, half_w, half_h);
        if let Some(c) = scan(s, &bounds, n, exec) {
            best = better(best, c);
        }
        round_best.push(best.1);
        cell_diagonal = spacing(&bounds);
    }
    OracleResult {
        point: best.0,
        objective: best.1,
        round_best,
        cell_diagonal,
    }
}

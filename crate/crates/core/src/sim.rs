//! Monte-Carlo noise sweep: random sensor layouts around a fixed source,
//! multiplicative Gaussian range noise of growing strength, and per-level
//! error statistics.
//!
//! Every trial draws from its own ChaCha stream selected by
//! `(eta index, sample index)`, so results are identical however the trials
//! are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::{collinear, Point};
use crate::solver::{solve, SolverConfig};
use crate::taxonomy::{normalize, Scenario};

/// Sensor layouts with a pair closer than this are redrawn.
const MIN_SENSOR_GAP: f64 = 1e-9;
/// Relative area below which a layout counts as collinear and is redrawn.
const LAYOUT_COLLINEAR_TOL: f64 = 1e-12;

pub const STD_ESTIMATOR: &str = "population";
pub const LAYOUT_POLICY: &str = "sensors redrawn for every trial";
pub const FAILURE_POLICY: &str = "solver errors counted as failures and excluded from statistics";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub true_source: Point,
    pub samples_per_eta: usize,
    pub eta_max: f64,
    pub eta_step: f64,
    pub range_floor: f64,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            true_source: Point::new(0.5, 0.5),
            samples_per_eta: 50,
            eta_max: 1.0,
            eta_step: 0.02,
            range_floor: 0.01,
            seed: 42,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_step > 0.0 && self.eta_step <= self.eta_max && self.eta_max <= 2.0) {
            return Err(Error::InvalidInput(format!(
                "need 0 < eta_step <= eta_max <= 2, got step {} max {}",
                self.eta_step, self.eta_max
            )));
        }
        if self.samples_per_eta == 0 {
            return Err(Error::InvalidInput("samples_per_eta must be at least 1".into()));
        }
        if !(self.range_floor > 0.0 && self.range_floor.is_finite()) {
            return Err(Error::InvalidInput(format!("range floor must be positive, got {}", self.range_floor)));
        }
        if !self.true_source.is_finite() {
            return Err(Error::InvalidInput("true source is not finite".into()));
        }
        Ok(())
    }

    /// Noise levels `0, step, 2 step, ...` up to `eta_max`.
    pub fn etas(&self) -> Vec<f64> {
        let count = (self.eta_max / self.eta_step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| i as f64 * self.eta_step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eta: f64,
    pub mean_error: f64,
    pub std_error: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub config: SweepConfig,
    pub std_estimator: String,
    pub layout_policy: String,
    pub failure_policy: String,
    /// Noise levels removed by [`drop_top_std`].
    pub dropped_etas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

/// Box-Muller: `sqrt(-2 ln u1) cos(2 pi u2)` for `u1` in `(0, 1]`.
pub fn box_muller(u1: f64, u2: f64) -> f64 {
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Standard normal draw consuming two uniforms from `rng`.
pub fn gaussian_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    box_muller(u1, u2)
}

/// `max(floor, |z_j - x0| (1 + eta g_j))` for each sensor.
pub fn observed_ranges(sensors: &[Point; 3], source: Point, eta: f64, floor: f64, g: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|j| floor.max(sensors[j].distance(source) * (1.0 + eta * g[j])))
}

fn well_spread(z: &[Point; 3]) -> bool {
    let apart = z[0].distance(z[1]) >= MIN_SENSOR_GAP
        && z[0].distance(z[2]) >= MIN_SENSOR_GAP
        && z[1].distance(z[2]) >= MIN_SENSOR_GAP;
    apart && !collinear(z[0], z[1], z[2], LAYOUT_COLLINEAR_TOL)
}

/// One random trial: uniform sensors on the unit square (redrawn while
/// degenerate), then noisy floored ranges.
pub fn generate_trial<R: Rng + ?Sized>(rng: &mut R, cfg: &SweepConfig, eta: f64) -> Scenario {
    loop {
        let sensors = [(); 3].map(|_| Point::new(rng.random(), rng.random()));
        if !well_spread(&sensors) {
            continue;
        }
        let g = [(); 3].map(|_| gaussian_sample(rng));
        let ranges = observed_ranges(&sensors, cfg.true_source, eta, cfg.range_floor, g);
        if let Ok(s) = normalize(sensors, ranges) {
            return s;
        }
    }
}

/// Generator for trial `(eta_index, sample_index)`.
pub fn trial_rng(seed: u64, eta_index: usize, sample_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((eta_index as u64) << 32) | sample_index as u64);
    rng
}

/// Localization error of one trial, `None` if the solver failed.
fn run_trial(cfg: &SweepConfig, eta_index: usize, sample_index: usize, eta: f64) -> Option<f64> {
    let mut rng = trial_rng(cfg.seed, eta_index, sample_index);
    let s = generate_trial(&mut rng, cfg, eta);
    solve(&s, &SolverConfig::default())
        .ok()
        .map(|sol| sol.source.distance(cfg.true_source))
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(cfg, Execution::default())
}

pub fn run_sweep_with(cfg: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    cfg.validate()?;
    let etas = cfg.etas();
    let per = cfg.samples_per_eta;
    let errors = exec.map_indexed(etas.len() * per, |t| {
        let (ei, si) = (t / per, t % per);
        run_trial(cfg, ei, si, etas[ei])
    });
    let rows = etas
        .iter()
        .zip(errors.chunks(per))
        .map(|(&eta, trials)| {
            let ok: Vec<f64> = trials.iter().flatten().copied().collect();
            let (mean_error, std_error) = mean_std(&ok);
            SweepRow {
                eta,
                mean_error,
                std_error,
                failures: per - ok.len(),
            }
        })
        .collect();
    Ok(SweepResult {
        rows,
        metadata: SweepMetadata {
            config: *cfg,
            std_estimator: STD_ESTIMATOR.into(),
            layout_policy: LAYOUT_POLICY.into(),
            failure_policy: FAILURE_POLICY.into(),
            dropped_etas: Vec::new(),
        },
    })
}

/// Arithmetic mean and population standard deviation; NaN for no data.
fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Removes the `n` rows with the largest standard deviation (ties drop the
/// larger eta first), keeping the rest in order.
pub fn drop_top_std(r: &SweepResult, n: usize) -> Result<SweepResult> {
    if n >= r.rows.len() {
        return Err(Error::InvalidInput(format!(
            "cannot drop {n} of {} rows",
            r.rows.len()
        )));
    }
    let mut order: Vec<usize> = (0..r.rows.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&r.rows[a], &r.rows[b]);
        rb.std_error
            .total_cmp(&ra.std_error)
            .then_with(|| rb.eta.total_cmp(&ra.eta))
    });
    let mut drop = order[..n].to_vec();
    drop.sort_unstable();
    let mut out = r.clone();
    out.rows = r
        .rows
        .iter()
        .enumerate()
        .filter(|(i, _)| drop.binary_search(i).is_err())
        .map(|(_, row)| *row)
        .collect();
    out.metadata.dropped_etas.extend(drop.iter().map(|&i| r.rows[i].eta));
    Ok(out)
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (rx, ry) = (average_ranks(xs), average_ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

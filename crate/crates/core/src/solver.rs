//! End-to-end localization: classify, intersect, repair by minimal range
//! scaling when no common-noise source exists, pick among candidates and
//! recover the per-sensor multiplicative noise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    apollonius_unchecked, circle_circle_intersection, circumcenter, line_circle_intersection,
    perpendicular_bisector, Circle, Point, COINCIDENT_TOL,
};
use crate::scaling::{GapFunction, GapKind};
use crate::taxonomy::{classify, CaseLabel, Scenario, DEFAULT_TAU_EQ};

/// Residual differences at or below this are ties in candidate selection.
const SELECTION_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Relative equality band for ranges.
    pub tau_eq: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau_eq: DEFAULT_TAU_EQ,
        }
    }
}

/// Range scale factors applied during repair; `1.0` means untouched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scalings {
    /// Factor on `d1`.
    pub k1: f64,
    /// Factor on `d2`.
    pub k2: f64,
    /// Second-stage factor on `d1` after `d2` was raised to `d3`.
    pub l: f64,
}

impl Default for Scalings {
    fn default() -> Self {
        Self {
            k1: 1.0,
            k2: 1.0,
            l: 1.0,
        }
    }
}

impl Scalings {
    pub fn is_identity(&self) -> bool {
        self.k1 == 1.0 && self.k2 == 1.0 && self.l == 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub source: Point,
    /// Every geometric intersection point considered.
    pub candidates: Vec<Point>,
    /// `eps_j = d0_j / |x - z_j| - 1` against the observed ranges, input order.
    pub epsilon: [f64; 3],
    /// Same against the repaired working ranges, input order.
    pub working_epsilon: [f64; 3],
    /// Relative ratio error of the observed-range noise, normalized order.
    pub rre: f64,
    pub objective: f64,
    /// Classification of the observed scenario followed by the label of each
    /// rescaled scenario.
    pub case_trace: Vec<CaseLabel>,
    /// Flow-chart case name, e.g. `112+013`.
    pub case: String,
    pub scalings: Scalings,
    /// Final working ranges `(k d1, k d2, d3)` in normalized order.
    pub working_ranges: [f64; 3],
}

/// Runs the full strategy on a normalized scenario.
pub fn solve(s: &Scenario, config: &SolverConfig) -> Result<Solution> {
    let (label, _) = classify(s, config.tau_eq);
    let mut run = Run {
        tau_eq: config.tau_eq,
        trace: vec![label],
        scalings: Scalings::default(),
    };
    let (candidates, work) = run.locate(s, label)?;
    let source = select_candidate(&candidates, s).map_err(|e| run.internal(e.to_string()))?;
    let eps = recover_epsilon(source, s)?;
    let working = recover_epsilon(source, &work)?;
    Ok(Solution {
        source,
        candidates,
        epsilon: s.to_input_order(eps),
        working_epsilon: s.to_input_order(working),
        rre: rre(eps)?,
        objective: objective(source, s)?,
        case: case_name(&run.trace),
        case_trace: run.trace,
        scalings: run.scalings,
        working_ranges: *work.ranges(),
    })
}

/// Flow-chart case name for a trace.
pub fn case_name(trace: &[CaseLabel]) -> String {
    use CaseLabel::*;
    match trace {
        [C012013, ..] => "012013".into(),
        [C112Minus, ..] => "112-113".into(),
        [C112Plus, C113] => "112+113".into(),
        [C112Plus, ..] => "112+013".into(),
        [first, ..] => first.code().into(),
        [] => String::new(),
    }
}

struct Run {
    tau_eq: f64,
    trace: Vec<CaseLabel>,
    scalings: Scalings,
}

impl Run {
    fn internal(&self, reason: impl Into<String>) -> Error {
        Error::Internal {
            trace: self.trace.clone(),
            reason: reason.into(),
        }
    }

    /// Candidates for `work` (already labelled `label`) and the final working scenario.
    fn locate(&mut self, work: &Scenario, label: CaseLabel) -> Result<(Vec<Point>, Scenario)> {
        let [z1, z2, z3] = *work.sensors();
        let [d1, d2, d3] = *work.ranges();
        let candidates = match label {
            CaseLabel::CollinearEqual => {
                return Err(Error::NoSolution {
                    reason: "all three ranges are equal and the sensors are collinear".into(),
                })
            }
            CaseLabel::C003 => vec![circumcenter(z1, z2, z3).map_err(|e| self.internal(e.to_string()))?],
            CaseLabel::C013 => {
                let (b13, r13) = apollonius_unchecked(z1, z3, d1 / d3);
                let circle = Circle::new(b13, r13).map_err(|e| self.internal(e.to_string()))?;
                let line = perpendicular_bisector(z2, z3)?;
                line_circle_intersection(&line, &circle)
            }
            CaseLabel::C113 => {
                let (b23, r23) = apollonius_unchecked(z2, z3, d2 / d3);
                let (b13, r13) = apollonius_unchecked(z1, z3, d1 / d3);
                let a = Circle::new(b23, r23).map_err(|e| self.internal(e.to_string()))?;
                let b = Circle::new(b13, r13).map_err(|e| self.internal(e.to_string()))?;
                circle_circle_intersection(&a, &b).map_err(|e| self.internal(e.to_string()))?
            }
            CaseLabel::C012013 => return self.repair_bisector(work),
            CaseLabel::C112Minus => {
                let k = self.root(GapKind::E, work)?;
                self.scalings.k1 = k;
                let next = work.with_ranges([k * d1, d2, d3]);
                self.relabel(&next)?;
                let (b23, r23) = apollonius_unchecked(z2, z3, d2 / d3);
                let (b13, _) = apollonius_unchecked(z1, z3, k * d1 / d3);
                let dir = unit(b13 - b23).ok_or_else(|| self.internal("concentric circles at tangency"))?;
                return Ok((vec![b23 + dir * r23], next));
            }
            CaseLabel::C112Plus => {
                let gap = GapFunction::new(GapKind::FDiag, work)?;
                let root = gap.find_min_root()?;
                if let Some(k) = root.k_star {
                    self.scalings.k1 = k;
                    self.scalings.k2 = k;
                    let next = work.with_ranges([k * d1, k * d2, d3]);
                    self.relabel(&next)?;
                    let (b23, r23) = apollonius_unchecked(z2, z3, k * d2 / d3);
                    let (b13, _) = apollonius_unchecked(z1, z3, k * d1 / d3);
                    let dir = unit(b13 - b23).ok_or_else(|| self.internal("concentric circles at tangency"))?;
                    return Ok((vec![b23 + dir * r23], next));
                }
                // No diagonal root: raise d2 to d3 exactly and continue on the bisector.
                let k_f = d3 / d2;
                self.scalings.k1 = k_f;
                self.scalings.k2 = k_f;
                let next = work.with_ranges([(k_f * d1).min(d3), d3, d3]);
                let next_label = self.relabel_any(&next);
                return self.locate(&next, next_label);
            }
        };
        if candidates.is_empty() {
            return Err(self.internal(format!("case {label} produced no intersection")));
        }
        Ok((candidates, work.clone()))
    }

    /// `d3 = d2 > d1` with the bisector missing the 1-3 circle.
    fn repair_bisector(&mut self, work: &Scenario) -> Result<(Vec<Point>, Scenario)> {
        let [z1, z2, z3] = *work.sensors();
        let [d1, d2, d3] = *work.ranges();
        let k = self.root(GapKind::D, work)?;
        if self.scalings.k2 == 1.0 {
            self.scalings.k1 = k;
        } else {
            self.scalings.l = k;
        }
        let next = work.with_ranges([k * d1, d2, d3]);
        self.relabel(&next)?;
        let (b13, _) = apollonius_unchecked(z1, z3, k * d1 / d3);
        let line = perpendicular_bisector(z2, z3)?;
        Ok((vec![line.project(b13)], next))
    }

    fn root(&self, kind: GapKind, work: &Scenario) -> Result<f64> {
        let gap = GapFunction::new(kind, work)?;
        gap.find_min_root()?
            .k_star
            .ok_or_else(|| self.internal(format!("gap {kind:?} has no root before the interval end")))
    }

    fn relabel_any(&mut self, next: &Scenario) -> CaseLabel {
        let (label, _) = classify(next, self.tau_eq);
        self.trace.push(label);
        label
    }

    /// Records the label of a tangency-repaired scenario, which must be solvable.
    fn relabel(&mut self, next: &Scenario) -> Result<()> {
        let label = self.relabel_any(next);
        if !label.is_solvable() {
            return Err(self.internal(format!("repaired scenario classified as {label}")));
        }
        Ok(())
    }
}

fn unit(v: Point) -> Option<Point> {
    let n = v.norm();
    (n > 0.0 && n.is_finite()).then(|| v * (1.0 / n))
}

/// Picks the candidate whose distances best match the observed ranges with
/// zero noise: `argmin sum_j | |z_j - x| - d0_j |`. Ties go to the
/// lexicographically smaller point.
pub fn select_candidate(candidates: &[Point], s: &Scenario) -> Result<Point> {
    let residual = |x: &Point| -> f64 {
        s.sensors()
            .iter()
            .zip(s.ranges())
            .map(|(z, d)| (z.distance(*x) - d).abs())
            .sum()
    };
    let mut best: Option<(Point, f64)> = None;
    for &c in candidates {
        let r = residual(&c);
        best = match best {
            None => Some((c, r)),
            Some((b, rb)) => {
                let better = if (r - rb).abs() <= SELECTION_TIE {
                    c.lex_cmp(&b).is_lt()
                } else {
                    r < rb
                };
                Some(if better { (c, r) } else { (b, rb) })
            }
        };
    }
    best.map(|(p, _)| p)
        .ok_or_else(|| Error::InvalidInput("no candidates to select from".into()))
}

fn distances(x: Point, s: &Scenario) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (j, z) in s.sensors().iter().enumerate() {
        let r = z.distance(x);
        if r < COINCIDENT_TOL {
            return Err(Error::DegenerateSource { sensor: s.permutation()[j] + 1 });
        }
        out[j] = r;
    }
    Ok(out)
}

/// Per-sensor noise `d_j / |x - z_j| - 1` in normalized order.
pub fn recover_epsilon(x: Point, s: &Scenario) -> Result<[f64; 3]> {
    let r = distances(x, s)?;
    let d = s.ranges();
    Ok([0, 1, 2].map(|j| d[j] / r[j] - 1.0))
}

/// `(|e3 - e2| + |e3 - e1|) / (1 + e3)` with `eps` in normalized order.
pub fn rre(eps: [f64; 3]) -> Result<f64> {
    let [e1, e2, e3] = eps;
    let denom = 1.0 + e3;
    if !(denom > 0.0) {
        return Err(Error::InvalidNoise(denom));
    }
    Ok(((e3 - e2).abs() + (e3 - e1).abs()) / denom)
}

/// Ratio-difference objective `|a3 - a2| + |a3 - a1|` with `a_j = d0_j / |z_j - x|`.
pub fn objective(x: Point, s: &Scenario) -> Result<f64> {
    let r = distances(x, s)?;
    let d = s.ranges();
    let a = [0, 1, 2].map(|j| d[j] / r[j]);
    Ok((a[2] - a[1]).abs() + (a[2] - a[0]).abs())
}

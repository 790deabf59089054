//! Scenario normalization and existence classification.
//!
//! A scenario is three sensors with their observed ranges, reordered so the
//! ranges ascend. Classification decides whether a common multiplicative
//! noise admits a source and, if not, which repair path applies.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    self, apollonius_unchecked, collinear, perpendicular_bisector, point_line_distance,
    relative_gap, tangency_tol, Point, COINCIDENT_TOL,
};

/// Default relative equality band for ranges.
pub const DEFAULT_TAU_EQ: f64 = 1e-9;

/// Relative area tolerance for the equal-range collinearity test.
pub const COLLINEAR_TOL: f64 = 1e-12;

/// Slack allowed when checking that scaled ranges keep ascending order.
const ORDER_SLACK: f64 = 1e-12;

/// Three sensors and their observed ranges in ascending-range order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    sensors: [Point; 3],
    ranges: [f64; 3],
    /// `permutation[i]` is the input index of normalized slot `i`.
    permutation: [usize; 3],
}

impl Scenario {
    pub fn sensors(&self) -> &[Point; 3] {
        &self.sensors
    }

    pub fn ranges(&self) -> &[f64; 3] {
        &self.ranges
    }

    pub fn permutation(&self) -> &[usize; 3] {
        &self.permutation
    }

    /// Reorders normalized-slot values back into input order.
    pub fn to_input_order<T: Copy>(&self, values: [T; 3]) -> [T; 3] {
        let mut out = values;
        for (slot, &orig) in self.permutation.iter().enumerate() {
            out[orig] = values[slot];
        }
        out
    }

    /// Reorders input-order values into normalized slots.
    pub fn to_normalized_order<T: Copy>(&self, values: [T; 3]) -> [T; 3] {
        let mut out = values;
        for (slot, &orig) in self.permutation.iter().enumerate() {
            out[slot] = values[orig];
        }
        out
    }

    /// Same sensors and permutation with replacement working ranges.
    ///
    /// The caller guarantees positivity and ascending order.
    pub(crate) fn with_ranges(&self, ranges: [f64; 3]) -> Scenario {
        debug_assert!(ranges[0] > 0.0 && ranges[0] <= ranges[1] && ranges[1] <= ranges[2]);
        Scenario {
            sensors: self.sensors,
            ranges,
            permutation: self.permutation,
        }
    }
}

/// Existence-taxonomy branch of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    /// All ranges equal, sensors form a triangle: circumcenter.
    C003,
    /// `d3 = d2 > d1`, the bisector meets the 1-3 circle.
    C013,
    /// `d3 = d2 > d1`, the bisector misses the 1-3 circle.
    C012013,
    /// `d3 > d2 >= d1`, the two Apollonius circles meet.
    C113,
    /// `d3 > d2 >= d1`, the circles are disjoint and apart.
    C112Plus,
    /// `d3 > d2 >= d1`, one circle strictly contains the other.
    C112Minus,
    /// All ranges equal and sensors collinear: no source exists.
    CollinearEqual,
}

impl CaseLabel {
    pub fn code(&self) -> &'static str {
        match self {
            CaseLabel::C003 => "003",
            CaseLabel::C013 => "013",
            CaseLabel::C012013 => "012013",
            CaseLabel::C113 => "113",
            CaseLabel::C112Plus => "112+",
            CaseLabel::C112Minus => "112-",
            CaseLabel::CollinearEqual => "collinear-equal",
        }
    }

    /// True for labels with at least one common-noise source.
    pub fn is_solvable(&self) -> bool {
        matches!(self, CaseLabel::C003 | CaseLabel::C013 | CaseLabel::C113)
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Numeric values behind a classification.
///
/// Optional fields are `None` exactly when their defining construction is
/// degenerate because the two ranges involved are equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseDiagnostics {
    /// Distance from the 1-3 Apollonius center to the bisector of `z2 z3`.
    pub bisector_distance: Option<f64>,
    pub r13: Option<f64>,
    pub r23: Option<f64>,
    /// `|b23 - b13|`.
    pub center_gap: Option<f64>,
    pub d3_eq_d2: bool,
    pub d2_eq_d1: bool,
    pub d3_eq_d1: bool,
    /// `cross(z2 - z1, z3 - z1)`.
    pub collinearity: f64,
}

/// Validates raw input and sorts sensors and ranges jointly by range.
///
/// Ties keep input order.
pub fn normalize(raw_sensors: [Point; 3], raw_ranges: [f64; 3]) -> Result<Scenario> {
    for (i, &d) in raw_ranges.iter().enumerate() {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidInput(format!(
                "range {} must be positive and finite, got {d}",
                i + 1
            )));
        }
    }
    for (i, z) in raw_sensors.iter().enumerate() {
        if !z.is_finite() {
            return Err(Error::InvalidInput(format!("sensor {} is not finite", i + 1)));
        }
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if raw_sensors[i].distance(raw_sensors[j]) <= COINCIDENT_TOL {
            return Err(Error::InvalidInput(format!(
                "sensors {} and {} coincide",
                i + 1,
                j + 1
            )));
        }
    }
    let mut perm = [0usize, 1, 2];
    perm.sort_by(|&a, &b| raw_ranges[a].total_cmp(&raw_ranges[b]));
    Ok(Scenario {
        sensors: perm.map(|i| raw_sensors[i]),
        ranges: perm.map(|i| raw_ranges[i]),
        permutation: perm,
    })
}

fn effective_tol(tau_eq: f64) -> f64 {
    tau_eq.max(geom::RANGE_EQ_TOL)
}

fn diagnostics_for(sensors: &[Point; 3], ranges: [f64; 3], tau_eq: f64) -> CaseDiagnostics {
    let tol = effective_tol(tau_eq);
    let [d1, d2, d3] = ranges;
    let flags = (
        relative_gap(d3, d2) <= tol,
        relative_gap(d2, d1) <= tol,
        relative_gap(d3, d1) <= tol,
    );
    conditions(sensors, ranges, flags)
}

/// Shared evaluator. `eq = (d3 == d2, d2 == d1, d3 == d1)` decides which
/// constructions are degenerate; everything else is computed from the ranges.
fn conditions(sensors: &[Point; 3], ranges: [f64; 3], eq: (bool, bool, bool)) -> CaseDiagnostics {
    let (d3_eq_d2, d2_eq_d1, d3_eq_d1) = eq;
    let [z1, z2, z3] = *sensors;
    let [d1, d2, d3] = ranges;
    let c13 = (!d3_eq_d1).then(|| apollonius_unchecked(z1, z3, d1 / d3));
    let c23 = (!d3_eq_d2).then(|| apollonius_unchecked(z2, z3, d2 / d3));
    let bisector = perpendicular_bisector(z2, z3).expect("sensors are distinct");
    let bisector_distance = c13.map(|(b, _)| point_line_distance(b, &bisector));
    let center_gap = match (c13, c23) {
        (Some((b13, _)), Some((b23, _))) => Some(b13.distance(b23)),
        _ => None,
    };
    CaseDiagnostics {
        bisector_distance,
        r13: c13.map(|(_, r)| r),
        r23: c23.map(|(_, r)| r),
        center_gap,
        d3_eq_d2,
        d2_eq_d1,
        d3_eq_d1,
        collinearity: (z2 - z1).cross(z3 - z1),
    }
}

/// Conditions for ranges `(scale_d1 d1, scale_d2 d2, d3)` with no equality
/// band: a construction is absent only when its two ranges are exactly equal.
/// Used by the gap functions, whose arguments approach equality by design.
pub(crate) fn scaled_conditions(s: &Scenario, scale_d1: f64, scale_d2: f64) -> CaseDiagnostics {
    let [d1, d2, d3] = s.ranges;
    let r = [scale_d1 * d1, scale_d2 * d2, d3];
    conditions(&s.sensors, r, (r[2] == r[1], r[1] == r[0], r[2] == r[0]))
}

fn label_for(sensors: &[Point; 3], diag: &CaseDiagnostics) -> CaseLabel {
    if diag.d3_eq_d1 {
        let [z1, z2, z3] = *sensors;
        return if collinear(z1, z2, z3, COLLINEAR_TOL) {
            CaseLabel::CollinearEqual
        } else {
            CaseLabel::C003
        };
    }
    let r13 = diag.r13.expect("d1 < d3 defines r13");
    if diag.d3_eq_d2 {
        let dist = diag.bisector_distance.expect("d1 < d3 defines b13");
        return if dist <= r13 + tangency_tol(r13) {
            CaseLabel::C013
        } else {
            CaseLabel::C012013
        };
    }
    let r23 = diag.r23.expect("d2 < d3 defines r23");
    let gap = diag.center_gap.expect("both circles defined");
    let tol = tangency_tol(r13 + r23);
    if gap > r23 + r13 + tol {
        CaseLabel::C112Plus
    } else if gap < (r23 - r13).abs() - tol {
        CaseLabel::C112Minus
    } else {
        CaseLabel::C113
    }
}

/// Classifies a normalized scenario. Tangency counts as intersecting.
pub fn classify(s: &Scenario, tau_eq: f64) -> (CaseLabel, CaseDiagnostics) {
    let diag = diagnostics_for(&s.sensors, s.ranges, tau_eq);
    (label_for(&s.sensors, &diag), diag)
}

/// Diagnostics with ranges `(k1 d1, k2 d2, d3)`.
pub fn condition_values(s: &Scenario, scale: (f64, f64), tau_eq: f64) -> Result<CaseDiagnostics> {
    let (k1, k2) = scale;
    let [d1, d2, d3] = s.ranges;
    if !(k1.is_finite() && k2.is_finite() && k1 >= 1.0 && k2 >= 1.0) {
        return Err(Error::InvalidScale(format!("factors must be >= 1, got ({k1}, {k2})")));
    }
    let (s1, s2) = (k1 * d1, k2 * d2);
    if s2 > d3 * (1.0 + ORDER_SLACK) || s1 > s2 * (1.0 + ORDER_SLACK) {
        return Err(Error::InvalidScale(format!(
            "scaled ranges ({s1}, {s2}, {d3}) are not ascending"
        )));
    }
    Ok(diagnostics_for(&s.sensors, [s1, s2.min(d3), d3], tau_eq))
}

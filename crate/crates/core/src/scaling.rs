//! Gap functions measuring how far scaled constructions are from tangency,
//! and a bisection root finder for the minimal admissible scale factor.
//!
//! All three gaps are decreasing in `k` on their admissible interval
//! `[1, k_max)`, so the first sign change from positive to nonpositive is the
//! smallest scaling that restores a common-noise solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taxonomy::{condition_values, scaled_conditions, Scenario, DEFAULT_TAU_EQ};

/// Relative end guard: evaluations stop at `k_max - EDGE_REL * (k_max - 1)`.
pub const EDGE_REL: f64 = 1e-9;

/// Relative bisection width: the bracket shrinks to `ROOT_REL * k_max`.
pub const ROOT_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    /// Bisector of `z2 z3` versus the 1-3 circle as `d1` grows (`d3 = d2`).
    D,
    /// Containment of the 1-3 circle in the 2-3 circle as `d1` grows.
    E,
    /// Separation of the two circles as `d1` and `d2` grow together.
    FDiag,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    /// Smallest `k` with `gap(k) <= 0`, if one exists before the end guard.
    pub k_star: Option<f64>,
    /// Gap at `k_star`, or at the guarded right end when there is no root.
    pub gap_at_root: f64,
    pub evaluations: usize,
}

fn check_domain(k: f64, k_max: f64) -> Result<()> {
    if !(k >= 1.0 && k < k_max) {
        return Err(Error::OutOfDomain { k, k_max });
    }
    Ok(())
}

/// `D(k)`: distance from `b13(k, 1)` to the bisector of `z2 z3`, minus `r13(k, 1)`.
pub fn gap_d(k: f64, s: &Scenario) -> Result<f64> {
    GapFunction::new(GapKind::D, s)?.eval(k)
}

/// `E(k) = (r23 - r13(k, 1)) - |b23 - b13(k, 1)|`.
pub fn gap_e(k: f64, s: &Scenario) -> Result<f64> {
    GapFunction::new(GapKind::E, s)?.eval(k)
}

/// `F(k1, k2) = |b23(k1, 1) - b13(k2, 1)| - (r23(k1, 1) + r13(k2, 1))`,
/// where `k1` scales `d2` and `k2` scales `d1`.
pub fn gap_f(k1: f64, k2: f64, s: &Scenario) -> Result<f64> {
    let [d1, d2, d3] = *s.ranges();
    let k_f = d3 / d2;
    if !(k2 >= 1.0) {
        return Err(Error::InvalidScale(format!("factor for d1 must be >= 1, got {k2}")));
    }
    check_domain(k1, k_f)?;
    if k2 * d1 > k1 * d2 {
        return Err(Error::InvalidScale(format!(
            "scaled d1 = {} exceeds scaled d2 = {}",
            k2 * d1,
            k1 * d2
        )));
    }
    Ok(f_value(s, k2, k1))
}

/// Diagonal `F(k) = F(k, k)`.
pub fn gap_f_diag(k: f64, s: &Scenario) -> Result<f64> {
    GapFunction::new(GapKind::FDiag, s)?.eval(k)
}

fn f_value(s: &Scenario, scale_d1: f64, scale_d2: f64) -> f64 {
    let c = scaled_conditions(s, scale_d1, scale_d2);
    c.center_gap.unwrap() - (c.r23.unwrap() + c.r13.unwrap())
}

/// A gap function bound to a scenario.
#[derive(Debug, Clone, Copy)]
pub struct GapFunction<'a> {
    kind: GapKind,
    scenario: &'a Scenario,
    k_max: f64,
}

impl<'a> GapFunction<'a> {
    /// Binds `kind` to `s`, checking the range pattern the gap needs.
    pub fn new(kind: GapKind, s: &'a Scenario) -> Result<Self> {
        let diag = condition_values(s, (1.0, 1.0), DEFAULT_TAU_EQ)?;
        let [d1, d2, d3] = *s.ranges();
        let ok = match kind {
            GapKind::D => diag.d3_eq_d2 && !diag.d3_eq_d1,
            GapKind::E => !diag.d3_eq_d2 && d2 > d1,
            GapKind::FDiag => !diag.d3_eq_d2,
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "gap {kind:?} is undefined for ranges ({d1}, {d2}, {d3})"
            )));
        }
        let k_max = match kind {
            GapKind::D | GapKind::E => d2 / d1,
            GapKind::FDiag => d3 / d2,
        };
        Ok(Self { kind, scenario: s, k_max })
    }

    pub fn kind(&self) -> GapKind {
        self.kind
    }

    /// Right end of the admissible interval (exclusive).
    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    /// Largest `k` the root finder evaluates.
    pub fn k_guarded(&self) -> f64 {
        self.k_max - EDGE_REL * (self.k_max - 1.0)
    }

    pub fn eval(&self, k: f64) -> Result<f64> {
        check_domain(k, self.k_max)?;
        let s = self.scenario;
        Ok(match self.kind {
            GapKind::D => {
                let c = scaled_conditions(s, k, 1.0);
                c.bisector_distance.unwrap() - c.r13.unwrap()
            }
            GapKind::E => {
                let c = scaled_conditions(s, k, 1.0);
                (c.r23.unwrap() - c.r13.unwrap()) - c.center_gap.unwrap()
            }
            GapKind::FDiag => f_value(s, k, k),
        })
    }

    /// Minimal root with the default tolerance `ROOT_REL * k_max`.
    pub fn find_min_root(&self) -> Result<RootResult> {
        find_min_root_by(|k| self.eval(k), self.k_max, ROOT_REL * self.k_max)
    }
}

/// Bisection for the first nonpositive value of a decreasing `gap` on `[1, k_max)`.
///
/// Returns `k_star = None` when the gap is still positive at the guarded right
/// end. The returned `k_star` is the right end of the final bracket, so
/// `gap(k_star) <= 0` while the gap is positive less than `tau_root` below it.
pub fn find_min_root_by<F>(mut gap: F, k_max: f64, tau_root: f64) -> Result<RootResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut evaluations = 1;
    let g1 = gap(1.0)?;
    if !(g1 > 0.0) {
        return Err(Error::RootPrecondition { gap_at_one: g1 });
    }
    let mut hi = k_max - EDGE_REL * (k_max - 1.0);
    let mut g_hi = gap(hi)?;
    evaluations += 1;
    if g_hi > 0.0 {
        return Ok(RootResult {
            k_star: None,
            gap_at_root: g_hi,
            evaluations,
        });
    }
    let mut lo = 1.0;
    while hi - lo > tau_root {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = gap(mid)?;
        evaluations += 1;
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
            g_hi = g;
        }
    }
    Ok(RootResult {
        k_star: Some(hi),
        gap_at_root: g_hi,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::taxonomy::{classify, normalize, CaseLabel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    /// Dense-grid oracle: first grid cell where the gap turns nonpositive.
    fn grid_sign_change(g: &GapFunction, n: usize) -> Option<(f64, f64)> {
        let hi = g.k_guarded();
        let step = (hi - 1.0) / (n - 1) as f64;
        let mut prev = 1.0;
        for i in 1..n {
            let k = 1.0 + step * i as f64;
            if g.eval(k).unwrap() <= 0.0 {
                return Some((prev, k));
            }
            prev = k;
        }
        None
    }

    fn d_fixture() -> Scenario {
        // d3 = d2 = 1 and a small 1-3 circle just off the bisector of z2 z3.
        normalize([p(0., 0.), p(0.5, 0.9), p(1., 0.)], [0.02, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn synthetic_linear_gap() {
        let r = find_min_root_by(|k| Ok(2.0 - k), 3.0, 1e-12 * 3.0).unwrap();
        assert!((r.k_star.unwrap() - 2.0).abs() <= 1e-10);
        assert!(r.gap_at_root <= 0.0);
        // no root before the end guard
        let r = find_min_root_by(|k| Ok(5.0 - k), 3.0, 1e-12).unwrap();
        assert!(r.k_star.is_none());
        assert!(matches!(
            find_min_root_by(|k| Ok(1.0 - k), 3.0, 1e-12),
            Err(Error::RootPrecondition { .. })
        ));
    }

    #[test]
    fn gap_d_fixture_matches_grid() {
        let s = d_fixture();
        let (label, diag) = classify(&s, DEFAULT_TAU_EQ);
        assert_eq!(label, CaseLabel::C012013);
        let g = GapFunction::new(GapKind::D, &s).unwrap();
        let g1 = g.eval(1.0).unwrap();
        assert!(g1 > 0.0);
        assert!((g1 - (diag.bisector_distance.unwrap() - diag.r13.unwrap())).abs() < 1e-15);
        let root = g.find_min_root().unwrap();
        let k = root.k_star.unwrap();
        let (lo, hi) = grid_sign_change(&g, 10_000).unwrap();
        assert!(k > lo - 1e-8 && k <= hi + 1e-8, "{k} not in [{lo}, {hi}]");
        // bisector distance shrinks as d1 grows
        let at = |k: f64| scaled_conditions(&s, k, 1.0).bisector_distance.unwrap();
        assert!(at(1.2) < at(1.0));
    }

    #[test]
    fn gap_domain_errors() {
        let s = d_fixture();
        assert!(matches!(gap_d(0.5, &s), Err(Error::OutOfDomain { .. })));
        assert!(matches!(gap_d(50.0, &s), Err(Error::OutOfDomain { .. })));
        assert!(gap_d(49.9, &s).unwrap().is_finite());
        // D needs d3 = d2; E and F need d3 > d2.
        assert!(gap_e(1.0, &s).is_err());
        assert!(gap_f_diag(1.0, &s).is_err());
        let t = normalize([p(0., 0.), p(1., 0.), p(0.5, 0.9)], [0.2, 0.5, 1.0]).unwrap();
        assert!(gap_d(1.0, &t).is_err());
        assert!(matches!(gap_f(1.0, 3.0, &t), Err(Error::InvalidScale(_))));
        assert!(matches!(gap_f(2.0, 1.0, &t), Err(Error::OutOfDomain { .. })));
        assert_eq!(gap_f(1.5, 1.5, &t).unwrap(), gap_f_diag(1.5, &t).unwrap());
    }

    fn find_case(rng: &mut ChaCha8Rng, want: CaseLabel) -> Scenario {
        loop {
            let z = [(); 3].map(|_| p(rng.random(), rng.random()));
            let d = [(); 3].map(|_| rng.random_range(0.05..1.0));
            if let Ok(s) = normalize(z, d) {
                if classify(&s, DEFAULT_TAU_EQ).0 == want {
                    return s;
                }
            }
        }
    }

    #[test]
    fn gap_e_fixture_matches_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = find_case(&mut rng, CaseLabel::C112Minus);
        let diag = classify(&s, DEFAULT_TAU_EQ).1;
        let g = GapFunction::new(GapKind::E, &s).unwrap();
        let e1 = g.eval(1.0).unwrap();
        let expect = (diag.r23.unwrap() - diag.r13.unwrap()) - diag.center_gap.unwrap();
        assert!((e1 - expect).abs() < 1e-12);
        assert!(e1 > 0.0);
        let k = g.find_min_root().unwrap().k_star.unwrap();
        let (lo, hi) = grid_sign_change(&g, 10_000).unwrap();
        assert!(k > lo - 1e-8 && k <= hi + 1e-8);
    }

    #[test]
    fn f_at_one_matches_classifier() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = find_case(&mut rng, CaseLabel::C112Plus);
        let diag = classify(&s, DEFAULT_TAU_EQ).1;
        let f1 = gap_f(1.0, 1.0, &s).unwrap();
        let expect = diag.center_gap.unwrap() - (diag.r23.unwrap() + diag.r13.unwrap());
        assert!((f1 - expect).abs() < 1e-12);
        assert!(f1 > 0.0);
    }

    #[test]
    fn gaps_stay_finite_up_to_the_guard() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for want in [CaseLabel::C112Minus, CaseLabel::C112Plus] {
            for _ in 0..20 {
                let s = find_case(&mut rng, want);
                let kind = if want == CaseLabel::C112Minus { GapKind::E } else { GapKind::FDiag };
                let g = GapFunction::new(kind, &s).unwrap();
                for i in 0..=200 {
                    let k = 1.0 + (g.k_guarded() - 1.0) * i as f64 / 200.0;
                    assert!(g.eval(k).unwrap().is_finite());
                }
            }
        }
        let s = d_fixture();
        let g = GapFunction::new(GapKind::D, &s).unwrap();
        assert!(g.eval(g.k_guarded()).unwrap().is_finite());
        assert!(g.eval(g.k_guarded()).unwrap() < 0.0);
    }
}

//! Locating a single planar source from three range measurements corrupted by
//! multiplicative noise `d0_j = |x - z_j| (1 + eps_j)`.
//!
//! The pipeline normalizes the measurements ([`taxonomy::normalize`]), decides
//! whether a common noise level admits a source ([`taxonomy::classify`]) using
//! Apollonius circles, and otherwise raises the shorter ranges by the smallest
//! factor that restores a tangency ([`scaling`]). [`solver::solve`] runs the
//! whole flow; [`oracle`] is a brute-force cross-check and [`sim`] the
//! Monte-Carlo noise sweep.
//!
//! ```
//! use triloc::geom::Point;
//! use triloc::solver::{solve, SolverConfig};
//! use triloc::taxonomy::normalize;
//!
//! let sensors = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
//! let x0 = Point::new(0.3, 0.4);
//! let ranges = sensors.map(|z| 1.25 * z.distance(x0));
//! let scenario = normalize(sensors, ranges).unwrap();
//! let sol = solve(&scenario, &SolverConfig::default()).unwrap();
//! assert!(sol.candidates.iter().any(|c| c.distance(x0) < 1e-9));
//! ```

pub mod cli;
pub mod error;
pub mod exec;
pub mod geom;
pub mod oracle;
pub mod scaling;
pub mod sim;
pub mod solver;
pub mod taxonomy;

pub use error::{Error, Result};
pub use exec::Execution;

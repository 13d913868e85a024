//! Scaled total least squares: solution, exact normwise condition numbers
//! and matrix-free condition estimators.
//!
//! ```
//! use stlscond_core::{condition, generator, stls};
//!
//! let spec = generator::GeneratorSpec { m: 10, n: 6, lambda: 1.0, e_p: 0.1, seed: 5 };
//! let g = generator::generate(&spec).unwrap();
//! let sol = stls::solve_stls(&g.problem).unwrap();
//! let f1 = condition::kappa_f1(&sol, g.problem.a()).unwrap();
//! let f2 = condition::kappa_f2(&sol, g.problem.a()).unwrap();
//! assert!((f1.absolute - f2.absolute).abs() <= 1e-9 * f2.absolute);
//! ```

pub mod condition;
pub mod error;
pub mod estimators;
pub mod generator;
pub mod io;
pub mod numerics;
pub mod stls;

pub use condition::{ConditionReport, Diagnostics, Method};
pub use error::{Error, Result};
pub use stls::{solve_stls, StlsProblem, StlsSolution};

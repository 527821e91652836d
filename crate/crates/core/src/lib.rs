//! Numerical laboratory for Polya frequency functions, the Laguerre-Polya
//! class and total-positivity experiments on the Riemann xi function.
//!
//! All numbers are [`Ball`]s (certified enclosures) or exact rationals, and every
//! positivity test returns a three-valued verdict.

pub mod ball;
pub mod error;
pub mod function;
pub mod linalg;
pub mod lp_class;
pub mod moments;
pub mod numerics;
pub mod pff_catalog;
pub mod polyzero;
pub mod scalar;
pub mod series;
pub mod tp_tester;
pub mod transforms;
pub mod verdict;

pub use ball::Ball;
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use series::PowerSeries;
pub use verdict::Verdict;

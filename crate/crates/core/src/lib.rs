//! Exact l0 robustness for truncated linear classifiers.
//!
//! A truncated linear classifier predicts the sign of the truncated inner
//! product `<w, x>_k`: sort the coordinate-wise product `w ⊙ x`, drop the
//! k largest and k smallest values, and sum the rest. Against an
//! adversary that may rewrite up to k input coordinates arbitrarily, this
//! crate computes the adversarial 0-1 loss of such classifiers *exactly*
//! (no attack heuristics, no certification gap), trains them on the
//! closed-form worst case, and evaluates the matching distribution-free
//! generalization bound.
//!
//! Modules:
//! - [`truncation`]: order statistics, truncated sums and inner products
//! - [`oracle`]: exact robust loss, worst-case witnesses, brute-force
//!   reference oracle
//! - [`coding`]: signs of truncated sums encoded by conventional inner
//!   products against a fixed alpha/beta basis
//! - [`growth`]: growth-function bounds and an empirical pattern census
//! - [`bounds`]: generalization-bound calculator and sample-complexity
//!   inversion
//! - [`train`]: subgradient training on order-statistic margins
//! - [`data`] / [`experiment`]: synthetic mixtures, dataset CSV I/O, and
//!   the generalization-gap harness

pub mod bounds;
pub mod coding;
pub mod combinatorics;
pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod growth;
pub mod model;
pub mod oracle;
pub mod train;
pub mod truncation;

pub use config::TruncationConfig;
pub use error::{Error, Result};
pub use truncation::{Sign, WeightVector};

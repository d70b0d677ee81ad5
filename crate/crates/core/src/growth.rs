//! Growth-function bounds for truncated-sign classes and an empirical
//! sign-pattern census that validates them at desk scale.
//!
//! For n > d+1 the number of distinct +/-1 patterns realizable on n
//! points is at most (e n m / d)^d with m = C(d,2k) + C(d,2); composing
//! with the adversarial 0-1 loss adds one extra pattern (the constant
//! pattern produced by weight vectors with at most k nonzeros). The
//! census samples weight vectors and counts distinct patterns actually
//! observed, a lower bound on the true growth function rather than an
//! estimate of it.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::config::TruncationConfig;
use crate::error::{Error, Result};
use crate::oracle::robust_misclassified;
use crate::truncation::{trunc_inner, Sign, WeightVector};

/// A bound computed in log-space: `value` is `exp(log_value)`, which may
/// overflow to infinity while `log_value` stays finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthBound {
    pub log_value: f64,
    pub value: f64,
}

fn check_growth_preconditions(n: usize, d: usize, k: usize) -> Result<()> {
    if k == 0 || 2 * k >= d {
        return Err(Error::Precondition(format!(
            "need 0 < 2k < d, got d = {d}, k = {k}"
        )));
    }
    if n <= d + 1 {
        return Err(Error::Precondition(format!(
            "need n > d + 1, got n = {n}, d = {d}"
        )));
    }
    Ok(())
}

/// Number of coded inner products m = C(d,2k) + C(d,2).
pub fn code_width(d: usize, k: usize) -> Result<u128> {
    Ok(binomial(d, 2 * k)? + binomial(d, 2)?)
}

/// Growth bound (e n m / d)^d for the truncated-sign class.
pub fn growth_bound_t(n: usize, d: usize, k: usize) -> Result<GrowthBound> {
    check_growth_preconditions(n, d, k)?;
    let m = code_width(d, k)? as f64;
    let log_value = d as f64 * (1.0 + (n as f64).ln() + m.ln() - (d as f64).ln());
    Ok(GrowthBound {
        log_value,
        value: log_value.exp(),
    })
}

/// Growth bound 1 + (e n m / d)^d for the class composed with the
/// adversarial 0-1 loss.
pub fn growth_bound_ttilde(n: usize, d: usize, k: usize) -> Result<GrowthBound> {
    let t = growth_bound_t(n, d, k)?;
    // log(1 + e^L) = L + log(1 + e^-L), stable for large L
    let log_value = t.log_value + (-t.log_value).exp().ln_1p();
    Ok(GrowthBound {
        log_value,
        value: 1.0 + t.value,
    })
}

/// Census output: observed distinct sign patterns next to the bounds.
/// Observed counts are lower bounds on the growth function; sampling
/// cannot overcount distinct patterns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthReport {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub bound_t_log: f64,
    pub bound_t: f64,
    pub bound_ttilde_log: f64,
    pub bound_ttilde: f64,
    pub observed_patterns_t: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_patterns_ttilde: Option<usize>,
    pub trials: usize,
    pub sampler_seed: u64,
}

/// Weight sampler mixing three families: dense Gaussian, Gaussian with
/// coordinates zeroed at random (reaching the constant-pattern branch of
/// sparse weights), and +/-1 lattice points.
fn sample_weight(rng: &mut ChaCha8Rng, d: usize, family: usize) -> Vec<f64> {
    match family % 3 {
        0 => (0..d).map(|_| StandardNormal.sample(rng)).collect(),
        1 => (0..d)
            .map(|_| {
                if rng.random::<bool>() {
                    0.0
                } else {
                    StandardNormal.sample(rng)
                }
            })
            .collect(),
        _ => (0..d)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect(),
    }
}

fn derive_seed(seed: u64, trial: u64) -> u64 {
    // splitmix64 step keyed by trial, so trials are schedule-independent
    let mut z = seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sample `trials` weight vectors and count the distinct sign patterns
/// they induce on the given points (and, when labels are supplied, the
/// distinct adversarial-loss patterns).
pub fn census_patterns(
    xs: &[Vec<f64>],
    ys: Option<&[Sign]>,
    cfg: &TruncationConfig,
    trials: usize,
    seed: u64,
) -> Result<GrowthReport> {
    if xs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    for x in xs {
        cfg.check_dim(x.len())?;
    }
    if let Some(ys) = ys {
        if ys.len() != xs.len() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                actual: ys.len(),
            });
        }
    }
    let n = xs.len();
    let d = cfg.d();
    let k = cfg.k();

    let (pat_t, pat_tt) = (0..trials as u64)
        .into_par_iter()
        .fold(
            || (HashSet::new(), HashSet::new()),
            |(mut set_t, mut set_tt): (HashSet<Vec<u8>>, HashSet<Vec<u8>>), trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, trial));
                let w = WeightVector::new(sample_weight(&mut rng, d, trial as usize))
                    .expect("finite weights");
                let mut pattern_t = Vec::with_capacity(n);
                for x in xs {
                    let s = Sign::of(trunc_inner(&w, x, cfg).expect("dims checked"))
                        .expect("finite");
                    pattern_t.push((s == Sign::Plus) as u8);
                }
                set_t.insert(pattern_t);
                if let Some(ys) = ys {
                    let pattern_tt: Vec<u8> = xs
                        .iter()
                        .zip(ys)
                        .map(|(x, &y)| {
                            robust_misclassified(&w, x, y, cfg).expect("dims checked") as u8
                        })
                        .collect();
                    set_tt.insert(pattern_tt);
                }
                (set_t, set_tt)
            },
        )
        .reduce(
            || (HashSet::new(), HashSet::new()),
            |(mut a_t, mut a_tt), (b_t, b_tt)| {
                a_t.extend(b_t);
                a_tt.extend(b_tt);
                (a_t, a_tt)
            },
        );

    // no finite bound is asserted at n <= d+1 (or k = 0); report infinity
    let vacuous = GrowthBound {
        log_value: f64::INFINITY,
        value: f64::INFINITY,
    };
    let (bound_t, bound_tt) = if n > d + 1 && k > 0 {
        (growth_bound_t(n, d, k)?, growth_bound_ttilde(n, d, k)?)
    } else {
        (vacuous, vacuous)
    };
    Ok(GrowthReport {
        n,
        d,
        k,
        bound_t_log: bound_t.log_value,
        bound_t: bound_t.value,
        bound_ttilde_log: bound_tt.log_value,
        bound_ttilde: bound_tt.value,
        observed_patterns_t: pat_t.len(),
        observed_patterns_ttilde: ys.map(|_| pat_tt.len()),
        trials,
        sampler_seed: seed,
    })
}

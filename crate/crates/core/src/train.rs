//! Adversarial training by projected subgradient descent on the robust
//! hinge surrogate, with exact 0-1 robust-loss model selection.
//!
//! The robust margin of (x, y) is `lower_sum(w ⊙ x)` for y = +1 and
//! `-upper_sum(w ⊙ x)` for y = -1: the worst value the adversary can
//! push the truncated inner product to, signed so that positive margins
//! certify robust correctness (for y = +1, margin >= 0 already suffices
//! because sgn(0) = +1). The margin is a minimum of linear functions of
//! w, hence concave, so the hinge surrogate `max(0, 1 - margin)` is
//! convex and subgradient descent applies. After every epoch the exact
//! empirical robust 0-1 loss is evaluated through the oracle and the best
//! iterate across all restarts is returned.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::TruncationConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::oracle::empirical_robust_loss;
use crate::truncation::{ProductVector, Sign, WeightVector};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Optimizer settings. The step at epoch t is `step_size / sqrt(t)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub step_size: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Optional l2 projection radius for w (scale safeguard).
    pub l2_cap: Option<f64>,
    /// Append a constant-1 coordinate before training. The appended
    /// coordinate is perturbable and truncatable like any other.
    pub bias: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            step_size: 1.0,
            restarts: 3,
            seed: 0,
            l2_cap: None,
            bias: false,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if !(self.step_size > 0.0) {
            return Err(Error::InvalidConfig("step size must be positive".into()));
        }
        if let Some(cap) = self.l2_cap {
            if !(cap > 0.0) {
                return Err(Error::InvalidConfig("l2 cap must be positive".into()));
            }
        }
        Ok(())
    }
}

/// One epoch snapshot: surrogate loss and exact robust 0-1 loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub epoch: usize,
    pub surrogate_loss: f64,
    pub exact_robust_loss: f64,
}

/// Training outcome. `best_empirical_robust_loss` is re-evaluated on the
/// returned weights at the end, so it exactly matches
/// `empirical_robust_loss(w_hat, training set)`.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub w_hat: WeightVector,
    pub best_empirical_robust_loss: f64,
    /// Trajectory of the restart that produced the returned weights.
    pub loss_trajectory: Vec<TrajectoryPoint>,
    pub restarts_used: usize,
}

/// Worst-case margin of one sample; positive iff robustly correct
/// whenever w has more than k nonzeros.
pub fn robust_margin(
    w: &WeightVector,
    x: &[f64],
    y: Sign,
    cfg: &TruncationConfig,
) -> Result<f64> {
    cfg.check_dim(w.dim())?;
    cfg.check_dim(x.len())?;
    let pv = ProductVector::new(w.as_slice(), x)?;
    Ok(match y {
        Sign::Plus => pv.range_sum(0, cfg.kept()),
        Sign::Minus => -pv.range_sum(2 * cfg.k(), cfg.d()),
    })
}

/// A subgradient of [`robust_margin`] in w: the margin is a sum of
/// d - 2k order statistics of w ⊙ x, so the gradient places x_i (or
/// -x_i) on the coordinates selected under the canonical tie-broken
/// order and zero elsewhere.
pub fn margin_subgradient(
    w: &WeightVector,
    x: &[f64],
    y: Sign,
    cfg: &TruncationConfig,
) -> Result<Vec<f64>> {
    cfg.check_dim(w.dim())?;
    cfg.check_dim(x.len())?;
    let pv = ProductVector::new(w.as_slice(), x)?;
    let mut g = vec![0.0; cfg.d()];
    match y {
        Sign::Plus => {
            for &i in &pv.sorted_index()[..cfg.kept()] {
                g[i] = x[i];
            }
        }
        Sign::Minus => {
            for &i in &pv.sorted_index()[2 * cfg.k()..] {
                g[i] = -x[i];
            }
        }
    }
    Ok(g)
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

struct RestartOutcome {
    w: Vec<f64>,
    best_loss: f64,
    trajectory: Vec<TrajectoryPoint>,
    restart: usize,
}

fn run_restart(
    dataset: &Dataset,
    cfg: &TruncationConfig,
    tc: &TrainConfig,
    restart: usize,
) -> Result<RestartOutcome> {
    let d = cfg.d();
    let n = dataset.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(tc.seed.wrapping_add(restart as u64));
    let mut w: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    if let Some(cap) = tc.l2_cap {
        let norm = l2_norm(&w);
        if norm > cap {
            w.iter_mut().for_each(|v| *v *= cap / norm);
        }
    }

    let eval = |w: &[f64]| -> Result<f64> {
        empirical_robust_loss(&WeightVector::new(w.to_vec())?, dataset, cfg)
    };

    let mut best_w = w.clone();
    let mut best_loss = eval(&w)?;
    let mut trajectory = Vec::with_capacity(tc.epochs);

    for epoch in 1..=tc.epochs {
        let wv = WeightVector::new(w.clone())?;
        let mut grad = vec![0.0; d];
        let mut surrogate = 0.0;
        for s in dataset.iter() {
            let margin = robust_margin(&wv, &s.x, s.y, cfg)?;
            if margin < 1.0 {
                surrogate += 1.0 - margin;
                let g = margin_subgradient(&wv, &s.x, s.y, cfg)?;
                for i in 0..d {
                    grad[i] -= g[i];
                }
            }
        }
        surrogate /= n;
        let step = tc.step_size / (epoch as f64).sqrt();
        for i in 0..d {
            w[i] -= step * grad[i] / n;
        }
        if let Some(cap) = tc.l2_cap {
            let norm = l2_norm(&w);
            if norm > cap {
                w.iter_mut().for_each(|v| *v *= cap / norm);
            }
        }
        let exact = eval(&w)?;
        if exact < best_loss {
            best_loss = exact;
            best_w = w.clone();
        }
        trajectory.push(TrajectoryPoint {
            epoch,
            surrogate_loss: surrogate,
            exact_robust_loss: exact,
        });
    }

    Ok(RestartOutcome {
        w: best_w,
        best_loss,
        trajectory,
        restart,
    })
}

/// Adversarial training: `restarts` independent seeded runs of projected
/// subgradient descent on the robust hinge surrogate, returning the
/// iterate with the smallest exact empirical robust loss.
pub fn train(dataset: &Dataset, cfg: &TruncationConfig, tc: &TrainConfig) -> Result<TrainReport> {
    tc.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (dataset, cfg) = if tc.bias {
        (
            dataset.with_bias_column(),
            TruncationConfig::new(cfg.d() + 1, cfg.k())?,
        )
    } else {
        cfg.check_dim(dataset.d())?;
        (dataset.clone(), *cfg)
    };

    if dataset
        .iter()
        .all(|s| s.x.iter().all(|&v| v == 0.0))
    {
        log::warn!("all-zero feature matrix: returning the zero vector");
        let w = WeightVector::new(vec![0.0; cfg.d()])?;
        let loss = empirical_robust_loss(&w, &dataset, &cfg)?;
        return Ok(TrainReport {
            w_hat: w,
            best_empirical_robust_loss: loss,
            loss_trajectory: Vec::new(),
            restarts_used: 0,
        });
    }

    let outcomes: Vec<RestartOutcome> = (0..tc.restarts)
        .into_par_iter()
        .map(|r| run_restart(&dataset, &cfg, &tc, r))
        .collect::<Result<_>>()?;
    let best = outcomes
        .into_iter()
        .min_by(|a, b| {
            a.best_loss
                .partial_cmp(&b.best_loss)
                .unwrap()
                .then(a.restart.cmp(&b.restart))
        })
        .expect("restarts >= 1");

    let w_hat = WeightVector::new(best.w)?;
    // re-evaluate so the reported loss is exactly that of the returned w
    let final_loss = empirical_robust_loss(&w_hat, &dataset, &cfg)?;
    debug_assert_eq!(final_loss, best.best_loss);
    Ok(TrainReport {
        w_hat,
        best_empirical_robust_loss: final_loss,
        loss_trajectory: best.trajectory,
        restarts_used: tc.restarts,
    })
}

/// Robust error of a fixed model on held-out data; identical to
/// [`empirical_robust_loss`].
pub fn eval_robust_error(
    w: &WeightVector,
    dataset: &Dataset,
    cfg: &TruncationConfig,
) -> Result<f64> {
    empirical_robust_loss(w, dataset, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::robust_misclassified;
    use rand::Rng;

    fn cfg(d: usize, k: usize) -> TruncationConfig {
        TruncationConfig::new(d, k).unwrap()
    }

    fn wv(w: &[f64]) -> WeightVector {
        WeightVector::new(w.to_vec()).unwrap()
    }

    #[test]
    fn margin_examples() {
        let c = cfg(3, 1);
        let w = wv(&[1.0, 1.0, 1.0]);
        assert_eq!(
            robust_margin(&w, &[5.0, 6.0, 7.0], Sign::Plus, &c).unwrap(),
            5.0
        );
        assert_eq!(
            robust_margin(&w, &[10.0, 9.0, -100.0], Sign::Plus, &c).unwrap(),
            -100.0
        );
        let wn = wv(&[-1.0, -1.0, -1.0]);
        assert_eq!(
            robust_margin(&wn, &[5.0, 6.0, 7.0], Sign::Minus, &c).unwrap(),
            5.0
        );
    }

    #[test]
    fn positive_margin_certifies_robust_correctness() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2000 {
            let d = rng.random_range(3..=7);
            let k = rng.random_range(1..=(d - 1) / 2);
            let c = cfg(d, k);
            let w: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            let w = wv(&w);
            if w.support_size() <= k {
                continue;
            }
            let y = if rng.random::<bool>() {
                Sign::Plus
            } else {
                Sign::Minus
            };
            let margin = robust_margin(&w, &x, y, &c).unwrap();
            if margin > 0.0 {
                assert!(!robust_misclassified(&w, &x, y, &c).unwrap());
            }
            if y == Sign::Plus && margin >= 0.0 {
                assert!(!robust_misclassified(&w, &x, y, &c).unwrap());
            }
        }
    }

    #[test]
    fn subgradient_zero_for_zero_x() {
        let c = cfg(4, 1);
        let w = wv(&[1.0, -2.0, 3.0, 0.5]);
        let g = margin_subgradient(&w, &[0.0; 4], Sign::Plus, &c).unwrap();
        assert_eq!(g, vec![0.0; 4]);
    }

    #[test]
    fn subgradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let h = 1e-6;
        let mut checked = 0;
        while checked < 300 {
            let d = rng.random_range(3..=7);
            let k = rng.random_range(1..=(d - 1) / 2);
            let c = cfg(d, k);
            let w: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            // demand distinct products so the selection is locally constant
            let mut u: Vec<f64> = w.iter().zip(&x).map(|(a, b)| a * b).collect();
            u.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if u.windows(2).any(|p| (p[1] - p[0]).abs() < 1e-3) {
                continue;
            }
            checked += 1;
            let y = if rng.random::<bool>() {
                Sign::Plus
            } else {
                Sign::Minus
            };
            let wv0 = wv(&w);
            let g = margin_subgradient(&wv0, &x, y, &c).unwrap();
            let dir: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut wp = w.clone();
            let mut wm = w.clone();
            for i in 0..d {
                wp[i] += h * dir[i];
                wm[i] -= h * dir[i];
            }
            let fp = robust_margin(&wv(&wp), &x, y, &c).unwrap();
            let fm = robust_margin(&wv(&wm), &x, y, &c).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            let lin: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
            let scale = 1.0f64.max(fd.abs());
            assert!(
                (fd - lin).abs() / scale < 1e-6,
                "fd {fd} vs linearization {lin}"
            );
        }
    }

    #[test]
    fn subgradient_brackets_with_ties() {
        // duplicate u-values: one-sided differences bracket the
        // linearization of the canonical selection
        let c = cfg(4, 1);
        let w = [1.0, 1.0, 1.0, 1.0];
        let x = [2.0, 2.0, 2.0, 2.0];
        let y = Sign::Plus;
        let g = margin_subgradient(&wv(&w), &x, y, &c).unwrap();
        let h = 1e-6;
        let dir = [1.0, -0.5, 0.25, -0.125];
        let lin: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        let mut wp = w;
        let mut wm = w;
        for i in 0..4 {
            wp[i] += h * dir[i];
            wm[i] -= h * dir[i];
        }
        let f0 = robust_margin(&wv(&w), &x, y, &c).unwrap();
        let fp = robust_margin(&wv(&wp), &x, y, &c).unwrap();
        let fm = robust_margin(&wv(&wm), &x, y, &c).unwrap();
        let right = (fp - f0) / h;
        let left = (f0 - fm) / h;
        // concavity: one-sided slopes bracket any supergradient's value
        assert!(right <= lin + 1e-9 && lin <= left + 1e-9);
    }

    fn separable_dataset(d: usize, n: usize, seed: u64) -> Dataset {
        // margin-generous mixture built from the all-ones reference vector
        let mix = crate::data::GaussianMixtureConfig {
            mu: vec![3.0; d],
            sigma_diag: vec![0.04; d],
            n,
            seed,
        };
        crate::data::sample_mixture(&mix).unwrap()
    }

    #[test]
    fn trains_separable_toy_set_to_zero() {
        let d = 5;
        let c = cfg(d, 1);
        let ds = separable_dataset(d, 60, 4);
        // sanity: the reference vector has robust margins > 1 throughout
        let w0 = wv(&vec![1.0; d]);
        for s in ds.iter() {
            assert!(robust_margin(&w0, &s.x, s.y, &c).unwrap() > 1.0);
        }
        let tc = TrainConfig {
            epochs: 80,
            step_size: 1.0,
            restarts: 2,
            seed: 9,
            l2_cap: None,
            bias: false,
        };
        let report = train(&ds, &c, &tc).unwrap();
        assert_eq!(report.best_empirical_robust_loss, 0.0);
        assert_eq!(
            report.best_empirical_robust_loss,
            empirical_robust_loss(&report.w_hat, &ds, &c).unwrap()
        );
    }

    #[test]
    fn single_positive_sample_reaches_zero() {
        let c = cfg(4, 1);
        let mut ds = Dataset::new(4);
        ds.push(vec![1.0; 4], Sign::Plus).unwrap();
        let tc = TrainConfig {
            epochs: 50,
            step_size: 1.0,
            restarts: 1,
            seed: 1,
            ..Default::default()
        };
        let report = train(&ds, &c, &tc).unwrap();
        assert_eq!(report.best_empirical_robust_loss, 0.0);
    }

    #[test]
    fn contradictory_duplicates_floor_the_loss() {
        let c = cfg(3, 1);
        let mut ds = Dataset::new(3);
        for _ in 0..5 {
            ds.push(vec![1.0, 2.0, 3.0], Sign::Plus).unwrap();
            ds.push(vec![1.0, 2.0, 3.0], Sign::Minus).unwrap();
        }
        let tc = TrainConfig {
            epochs: 40,
            step_size: 0.5,
            restarts: 2,
            seed: 2,
            ..Default::default()
        };
        let report = train(&ds, &c, &tc).unwrap();
        assert!(report.best_empirical_robust_loss >= 0.5);
    }

    #[test]
    fn all_zero_features_return_zero_vector() {
        let c = cfg(3, 1);
        let mut ds = Dataset::new(3);
        ds.push(vec![0.0; 3], Sign::Plus).unwrap();
        ds.push(vec![0.0; 3], Sign::Minus).unwrap();
        ds.push(vec![0.0; 3], Sign::Minus).unwrap();
        let tc = TrainConfig::default();
        let report = train(&ds, &c, &tc).unwrap();
        assert_eq!(report.w_hat.as_slice(), &[0.0, 0.0, 0.0]);
        assert!((report.best_empirical_robust_loss - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic_given_seed() {
        let d = 4;
        let c = cfg(d, 1);
        let ds = separable_dataset(d, 30, 12);
        let tc = TrainConfig {
            epochs: 25,
            step_size: 1.0,
            restarts: 3,
            seed: 77,
            ..Default::default()
        };
        let a = train(&ds, &c, &tc).unwrap();
        let b = train(&ds, &c, &tc).unwrap();
        assert_eq!(a.w_hat.as_slice(), b.w_hat.as_slice());
        assert_eq!(a.loss_trajectory, b.loss_trajectory);
        assert_eq!(
            a.best_empirical_robust_loss,
            b.best_empirical_robust_loss
        );
    }

    #[test]
    fn bias_training_expands_dimension() {
        let c = cfg(3, 1);
        let mut ds = Dataset::new(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y = if x.iter().sum::<f64>() > 0.3 {
                Sign::Plus
            } else {
                Sign::Minus
            };
            ds.push(x, y).unwrap();
        }
        let tc = TrainConfig {
            epochs: 10,
            bias: true,
            ..Default::default()
        };
        let report = train(&ds, &c, &tc).unwrap();
        assert_eq!(report.w_hat.dim(), 4);
    }

    #[test]
    fn best_loss_non_increasing_within_run() {
        let d = 4;
        let c = cfg(d, 1);
        let ds = separable_dataset(d, 40, 3);
        let tc = TrainConfig {
            epochs: 30,
            restarts: 1,
            seed: 5,
            ..Default::default()
        };
        let report = train(&ds, &c, &tc).unwrap();
        let mut best = f64::INFINITY;
        for p in &report.loss_trajectory {
            best = best.min(p.exact_robust_loss);
        }
        assert_eq!(best, report.best_empirical_robust_loss);
    }

    #[test]
    fn surrogate_dominates_exact_loss() {
        // margin > 1 implies robustly correct on every sample
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..500 {
            let d = rng.random_range(3..=6);
            let k = rng.random_range(1..=(d - 1) / 2);
            let c = cfg(d, k);
            let w: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            let w = wv(&w);
            if w.support_size() <= k {
                continue;
            }
            for y in [Sign::Plus, Sign::Minus] {
                if robust_margin(&w, &x, y, &c).unwrap() > 1.0 {
                    assert!(!robust_misclassified(&w, &x, y, &c).unwrap());
                }
            }
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let c = cfg(3, 1);
        let mut ds = Dataset::new(3);
        ds.push(vec![1.0, 2.0, 3.0], Sign::Plus).unwrap();
        assert!(train(&Dataset::new(3), &c, &TrainConfig::default()).is_err());
        let bad = TrainConfig {
            epochs: 0,
            ..Default::default()
        };
        assert!(train(&ds, &c, &bad).is_err());
        let bad = TrainConfig {
            step_size: 0.0,
            ..Default::default()
        };
        assert!(train(&ds, &c, &bad).is_err());
    }
}

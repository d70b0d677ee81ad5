//! Generalization-gap experiment: train on growing sample sizes drawn
//! from a Gaussian mixture, measure the train/test robust-loss gap, and
//! place it next to the computed bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::generalization_bound;
use crate::config::TruncationConfig;
use crate::data::{sample_mixture, GaussianMixtureConfig};
use crate::error::{Error, Result};
use crate::train::{eval_robust_error, train, TrainConfig};

/// Default confidence parameter echoed in reports.
pub const DEFAULT_DELTA: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mix: GaussianMixtureConfig,
    pub cfg: TruncationConfig,
    pub tc: TrainConfig,
    pub n_grid: Vec<usize>,
    pub n_test: usize,
    pub trials: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub trial: usize,
    pub train_loss: f64,
    pub test_loss: f64,
    pub gap: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentGroup {
    pub n: usize,
    pub median_train_loss: f64,
    pub median_test_loss: f64,
    pub median_gap: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub summary: Vec<ExperimentGroup>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn derive_seed(base: u64, n: usize, trial: usize, stream: u64) -> u64 {
    let mut z = base
        ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (trial as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
        ^ stream.wrapping_mul(0x1656_67B1_9E37_79F9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Run the harness: per (n, trial), draw disjoint train/test sets, train,
/// and record train loss, test loss, their gap, and the bound at that n.
pub fn generalization_experiment(ec: &ExperimentConfig) -> Result<ExperimentReport> {
    let d = ec.cfg.d();
    if ec.mix.mu.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: ec.mix.mu.len(),
        });
    }
    if ec.n_test == 0 {
        return Err(Error::Precondition("n_test must be at least 1".into()));
    }
    if ec.trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    if ec.tc.bias {
        return Err(Error::Precondition(
            "the harness trains on raw mixture coordinates; bias is not supported here".into(),
        ));
    }
    for &n in &ec.n_grid {
        // bounds require n > d+1; fail fast before any training
        generalization_bound(n, d, ec.cfg.k(), ec.delta)?;
    }

    let jobs: Vec<(usize, usize)> = ec
        .n_grid
        .iter()
        .flat_map(|&n| (0..ec.trials).map(move |t| (n, t)))
        .collect();

    let mut rows: Vec<ExperimentRow> = jobs
        .into_par_iter()
        .map(|(n, trial)| -> Result<ExperimentRow> {
            let train_mix = GaussianMixtureConfig {
                mu: ec.mix.mu.clone(),
                sigma_diag: ec.mix.sigma_diag.clone(),
                n,
                seed: derive_seed(ec.mix.seed, n, trial, 0),
            };
            let test_mix = GaussianMixtureConfig {
                n: ec.n_test,
                seed: derive_seed(ec.mix.seed, n, trial, 1),
                ..train_mix.clone()
            };
            let train_set = sample_mixture(&train_mix)?;
            let test_set = sample_mixture(&test_mix)?;
            let tc = TrainConfig {
                seed: derive_seed(ec.tc.seed, n, trial, 2),
                ..ec.tc.clone()
            };
            let report = train(&train_set, &ec.cfg, &tc)?;
            let train_loss = report.best_empirical_robust_loss;
            let test_loss = eval_robust_error(&report.w_hat, &test_set, &ec.cfg)?;
            let bound = generalization_bound(n, d, ec.cfg.k(), ec.delta)?.total;
            Ok(ExperimentRow {
                n,
                trial,
                train_loss,
                test_loss,
                gap: test_loss - train_loss,
                bound,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| (r.n, r.trial));

    let mut summary = Vec::new();
    for &n in &ec.n_grid {
        let group: Vec<&ExperimentRow> = rows.iter().filter(|r| r.n == n).collect();
        let mut trains: Vec<f64> = group.iter().map(|r| r.train_loss).collect();
        let mut tests: Vec<f64> = group.iter().map(|r| r.test_loss).collect();
        let mut gaps: Vec<f64> = group.iter().map(|r| r.gap).collect();
        summary.push(ExperimentGroup {
            n,
            median_train_loss: median(&mut trains),
            median_test_loss: median(&mut tests),
            median_gap: median(&mut gaps),
            bound: group[0].bound,
        });
    }
    Ok(ExperimentReport { rows, summary })
}

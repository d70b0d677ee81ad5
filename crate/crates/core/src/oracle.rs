//! Exact evaluation of the adversarial 0-1 loss for truncated linear
//! classifiers under an l0-bounded adversary.
//!
//! With `u = w ⊙ x`, the truncated inner product over the ball
//! `B0(x, k)` ranges inside `[lower_sum(u), upper_sum(u)]`. Both ends are
//! attained when every weight is nonzero; with zero weights the ends are
//! attained under an explicit count condition on the signs of `u` over the
//! support. The classifier is robustly fooled iff its clean prediction is
//! already wrong or the two extreme sums disagree in sign, provided `w`
//! has more than `k` nonzero coordinates. With at most `k` nonzeros the
//! truncated inner product is identically zero and the prediction is the
//! constant `+1`.
//!
//! A brute-force reference oracle enumerates perturbations of up to `k`
//! support coordinates over a finite candidate set; coordinate-wise
//! monotonicity of the truncated sum makes those candidates exhaustive
//! for range and sign reachability.

use crate::config::TruncationConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::truncation::{trunc_inner, ProductVector, Sign, WeightVector};

/// Largest dimension the brute-force oracle will enumerate.
pub const BRUTE_FORCE_DIM_LIMIT: usize = 10;

/// Extremes of the truncated inner product over the perturbation ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncRange {
    /// Outer lower bound: sum of the d-2k smallest order statistics.
    pub lo: f64,
    /// Outer upper bound: sum of the d-2k largest order statistics.
    pub hi: f64,
    /// True iff `lo` is attained by some perturbation of x.
    pub lo_attained: bool,
    /// True iff `hi` is attained by some perturbation of x.
    pub hi_attained: bool,
}

/// Full robust evaluation of one sample.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RobustEvaluation {
    pub clean_value: f64,
    pub clean_sign: Sign,
    pub lo: f64,
    pub hi: f64,
    pub lo_attained: bool,
    pub hi_attained: bool,
    pub support_size: usize,
    pub misclassified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
}

fn count_support_where(w: &WeightVector, u: &[f64], pred: impl Fn(f64) -> bool) -> usize {
    w.support().iter().filter(|&&i| pred(u[i])).count()
}

/// Range of the truncated inner product over `B0(x, k)` with attainability
/// flags for both ends.
pub fn robust_range(w: &WeightVector, x: &[f64], cfg: &TruncationConfig) -> Result<TruncRange> {
    cfg.check_dim(w.dim())?;
    cfg.check_dim(x.len())?;
    let pv = ProductVector::new(w.as_slice(), x)?;
    let u = pv.values();
    let all_nonzero = w.support_size() == cfg.d();
    let k = cfg.k();
    Ok(TruncRange {
        lo: pv.range_sum(0, cfg.kept()),
        hi: pv.range_sum(2 * k, cfg.d()),
        lo_attained: all_nonzero || count_support_where(w, u, |v| v >= 0.0) >= k,
        hi_attained: all_nonzero || count_support_where(w, u, |v| v <= 0.0) >= k,
    })
}

/// Exact adversarial 0-1 loss indicator: can an adversary with budget k
/// force the prediction on `x` away from `y` (or is it already wrong)?
pub fn robust_misclassified(
    w: &WeightVector,
    x: &[f64],
    y: Sign,
    cfg: &TruncationConfig,
) -> Result<bool> {
    cfg.check_dim(w.dim())?;
    cfg.check_dim(x.len())?;
    if w.support_size() <= cfg.k() {
        // the truncated inner product is identically zero: constant +1
        return Ok(y == Sign::Minus);
    }
    let pv = ProductVector::new(w.as_slice(), x)?;
    let clean = Sign::of(pv.range_sum(cfg.k(), cfg.d() - cfg.k()))?;
    if clean != y {
        return Ok(true);
    }
    let lo = Sign::of(pv.range_sum(0, cfg.kept()))?;
    let hi = Sign::of(pv.range_sum(2 * cfg.k(), cfg.d()))?;
    Ok(lo != hi)
}

/// Construct a perturbation `x'` with `||x' - x||_0 <= k` that flips the
/// prediction away from `y`, whenever one exists. Returns `None` iff the
/// sample is robustly correct.
///
/// Every witness is re-verified by direct evaluation before being
/// returned; on verification failure a bounded exhaustive search is tried,
/// and only if that also fails does this return an inconsistency error.
pub fn worst_case_witness(
    w: &WeightVector,
    x: &[f64],
    y: Sign,
    cfg: &TruncationConfig,
) -> Result<Option<Vec<f64>>> {
    if !robust_misclassified(w, x, y, cfg)? {
        return Ok(None);
    }
    let pv = ProductVector::new(w.as_slice(), x)?;
    let u = pv.values();
    let clean = Sign::of(pv.range_sum(cfg.k(), cfg.d() - cfg.k()))?;
    if clean != y {
        return Ok(Some(x.to_vec()));
    }

    let candidate = build_flip_candidate(w, x, u, &pv, y, cfg);
    if let Some(xp) = candidate {
        if verify_witness(w, x, &xp, y, cfg)? {
            return Ok(Some(xp));
        }
    }
    // construction failed verification: fall back to exhaustive search
    if cfg.d() <= BRUTE_FORCE_DIM_LIMIT {
        if let Some(xp) = brute_force_witness(w, x, y, cfg)? {
            return Ok(Some(xp));
        }
    }
    Err(Error::Inconsistency(format!(
        "witness construction failed for w = {:?}, x = {:?}, y = {y}",
        w.as_slice(),
        x
    )))
}

/// The constructive case analysis. `y` is the true label, and the clean
/// prediction equals `y`, so the flip target is the opposite sign.
fn build_flip_candidate(
    w: &WeightVector,
    x: &[f64],
    u: &[f64],
    pv: &ProductVector,
    y: Sign,
    cfg: &TruncationConfig,
) -> Option<Vec<f64>> {
    let d = cfg.d();
    let k = cfg.k();
    let all_nonzero = w.support_size() == d;
    let ws = w.as_slice();
    let mut xp = x.to_vec();
    match y {
        Sign::Plus => {
            // need a strictly negative truncated value
            if all_nonzero || count_support_where(w, u, |v| v >= 0.0) >= k {
                // rewrite the k largest u-coordinates to u_(1) - 1, picking
                // an ordering that places support coordinates on top among
                // ties so the rewrite stays within the support
                let mut order: Vec<usize> = (0..d).collect();
                order.sort_by(|&a, &b| {
                    u[a]
                        .partial_cmp(&u[b])
                        .unwrap()
                        .then((ws[a] != 0.0).cmp(&(ws[b] != 0.0)))
                        .then(a.cmp(&b))
                });
                let target = pv.order_stat(0) - 1.0;
                for &i in &order[d - k..] {
                    if ws[i] == 0.0 {
                        return None;
                    }
                    xp[i] = target / ws[i];
                }
            } else {
                // zero-weight regime: make every support coordinate of u
                // negative; more than k negatives survive truncation
                for &i in w.support() {
                    if u[i] >= 0.0 {
                        xp[i] = -ws[i];
                    }
                }
            }
        }
        Sign::Minus => {
            // need a non-negative truncated value (sgn(0) = +1)
            if all_nonzero || count_support_where(w, u, |v| v <= 0.0) >= k {
                let mut order: Vec<usize> = (0..d).collect();
                order.sort_by(|&a, &b| {
                    u[a]
                        .partial_cmp(&u[b])
                        .unwrap()
                        .then((ws[a] == 0.0).cmp(&(ws[b] == 0.0)))
                        .then(a.cmp(&b))
                });
                let target = pv.order_stat(d - 1) + 1.0;
                for &i in &order[..k] {
                    if ws[i] == 0.0 {
                        return None;
                    }
                    xp[i] = target / ws[i];
                }
            } else {
                for &i in w.support() {
                    if u[i] <= 0.0 {
                        xp[i] = ws[i];
                    }
                }
            }
        }
    }
    Some(xp)
}

fn hamming(a: &[f64], b: &[f64]) -> usize {
    a.iter().zip(b).filter(|(p, q)| p != q).count()
}

fn verify_witness(
    w: &WeightVector,
    x: &[f64],
    xp: &[f64],
    y: Sign,
    cfg: &TruncationConfig,
) -> Result<bool> {
    if hamming(x, xp) > cfg.k() {
        return Ok(false);
    }
    Ok(Sign::of(trunc_inner(w, xp, cfg)?)? != y)
}

/// Candidate u-space targets for one perturbed coordinate.
fn candidate_values(u: &[f64], wi: f64) -> [f64; 3] {
    let umin = u.iter().cloned().fold(f64::INFINITY, f64::min);
    let umax = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    [umin - 1.0, umax + 1.0, -wi * wi]
}

/// Visit the truncated sums of every enumerated perturbation: subsets of
/// the support of size at most k, each coordinate set to a candidate value.
fn enumerate_perturbations(
    w: &WeightVector,
    x: &[f64],
    cfg: &TruncationConfig,
    mut visit: impl FnMut(f64, &[f64]) -> bool,
) -> Result<()> {
    cfg.check_dim(w.dim())?;
    cfg.check_dim(x.len())?;
    if cfg.d() > BRUTE_FORCE_DIM_LIMIT {
        return Err(Error::DimensionLimit {
            d: cfg.d(),
            limit: BRUTE_FORCE_DIM_LIMIT,
        });
    }
    let pv = ProductVector::new(w.as_slice(), x)?;
    let base = pv.values().to_vec();
    // unperturbed point
    if !visit(pv.range_sum(cfg.k(), cfg.d() - cfg.k()), &base) {
        return Ok(());
    }
    let support = w.support();
    let k = cfg.k().min(support.len());
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut u = base.clone();

    fn rec(
        support: &[usize],
        start: usize,
        left: usize,
        chosen: &mut Vec<usize>,
        u: &mut Vec<f64>,
        base: &[f64],
        w: &WeightVector,
        cfg: &TruncationConfig,
        visit: &mut impl FnMut(f64, &[f64]) -> bool,
    ) -> bool {
        if !chosen.is_empty() {
            // assign every combination of candidate values to the chosen set
            let cands: Vec<[f64; 3]> = chosen
                .iter()
                .map(|&i| candidate_values(base, w.as_slice()[i]))
                .collect();
            let mut idx = vec![0usize; chosen.len()];
            loop {
                for (slot, &i) in chosen.iter().enumerate() {
                    u[i] = cands[slot][idx[slot]];
                }
                let pv = ProductVector::from_values(u.clone()).expect("finite");
                let t = pv.range_sum(cfg.k(), cfg.d() - cfg.k());
                if !visit(t, u) {
                    return false;
                }
                // odometer increment
                let mut slot = 0;
                loop {
                    if slot == idx.len() {
                        for &i in chosen.iter() {
                            u[i] = base[i];
                        }
                        // all assignments done
                        idx.clear();
                        break;
                    }
                    idx[slot] += 1;
                    if idx[slot] < 3 {
                        break;
                    }
                    idx[slot] = 0;
                    slot += 1;
                }
                if idx.is_empty() {
                    break;
                }
            }
        }
        if left == 0 {
            return true;
        }
        for pos in start..support.len() {
            chosen.push(support[pos]);
            if !rec(support, pos + 1, left - 1, chosen, u, base, w, cfg, visit) {
                return false;
            }
            chosen.pop();
        }
        true
    }

    rec(
        support, 0, k, &mut chosen, &mut u, &base, w, cfg, &mut visit,
    );
    Ok(())
}

/// Reference oracle: exact attained minimum and maximum of the truncated
/// inner product over `B0(x, k)`, by enumeration. Requires
/// `d <= BRUTE_FORCE_DIM_LIMIT`.
pub fn brute_force_range(
    w: &WeightVector,
    x: &[f64],
    cfg: &TruncationConfig,
) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    enumerate_perturbations(w, x, cfg, |t, _| {
        lo = lo.min(t);
        hi = hi.max(t);
        true
    })?;
    Ok((lo, hi))
}

/// Reference oracle: does any enumerated perturbation produce a sign
/// different from `y`?
pub fn brute_force_robust(
    w: &WeightVector,
    x: &[f64],
    y: Sign,
    cfg: &TruncationConfig,
) -> Result<bool> {
    let mut found = false;
    enumerate_perturbations(w, x, cfg, |t, _| {
        if Sign::of(t).expect("finite") != y {
            found = true;
            return false;
        }
        true
    })?;
    Ok(found)
}

/// Exhaustive witness recovery in x-space, used as the fallback when the
/// constructive witness fails verification.
fn brute_force_witness(
    w: &WeightVector,
    x: &[f64],
    y: Sign,
    cfg: &TruncationConfig,
) -> Result<Option<Vec<f64>>> {
    let mut witness: Option<Vec<f64>> = None;
    let ws = w.as_slice().to_vec();
    let base: Vec<f64> = ws.iter().zip(x).map(|(a, b)| a * b).collect();
    enumerate_perturbations(w, x, cfg, |t, u| {
        if Sign::of(t).expect("finite") != y {
            // recover x' from the u-space targets on perturbed coordinates
            let xp: Vec<f64> = u
                .iter()
                .enumerate()
                .map(|(i, &ui)| if ui == base[i] { x[i] } else { ui / ws[i] })
                .collect();
            witness = Some(xp);
            return false;
        }
        true
    })?;
    if let Some(ref xp) = witness {
        if !verify_witness(w, x, xp, y, cfg)? {
            return Ok(None);
        }
    }
    Ok(witness)
}

/// Mean adversarial 0-1 loss over a dataset.
pub fn empirical_robust_loss(
    w: &WeightVector,
    dataset: &Dataset,
    cfg: &TruncationConfig,
) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut errors = 0usize;
    for s in dataset.iter() {
        if robust_misclassified(w, &s.x, s.y, cfg)? {
            errors += 1;
        }
    }
    Ok(errors as f64 / dataset.len() as f64)
}

/// Full per-sample evaluation: clean value and sign, range with
/// attainability, verdict, and a verified witness when fooled.
pub fn evaluate(
    w: &WeightVector,
    x: &[f64],
    y: Sign,
    cfg: &TruncationConfig,
) -> Result<RobustEvaluation> {
    let range = robust_range(w, x, cfg)?;
    let clean_value = trunc_inner(w, x, cfg)?;
    let misclassified = robust_misclassified(w, x, y, cfg)?;
    let witness = worst_case_witness(w, x, y, cfg)?;
    debug_assert_eq!(misclassified, witness.is_some());
    Ok(RobustEvaluation {
        clean_value,
        clean_sign: Sign::of(clean_value)?,
        lo: range.lo,
        hi: range.hi,
        lo_attained: range.lo_attained,
        hi_attained: range.hi_attained,
        support_size: w.support_size(),
        misclassified,
        witness,
    })
}

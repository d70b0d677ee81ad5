//! Order statistics, truncated sums, and truncated inner products.
//!
//! Everything here is built on one ordering convention: vectors are sorted
//! non-decreasingly with ties broken by ascending original index, and the
//! sign convention is `sgn(a) = +1` for `a >= 0` (including `+inf`), `-1`
//! otherwise. The truncated sum of a d-vector keeps the middle `d - 2k`
//! order statistics; the truncated inner product of `w` and `x` is the
//! truncated sum of the coordinate-wise product `w ⊙ x`.

use serde::{Deserialize, Serialize};

use crate::config::TruncationConfig;
use crate::error::{Error, Result};

/// A sign in {+1, -1}, with zero mapped to +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Sign of a real number: +1 iff `a >= 0` (so `sgn(0) = +1` and
    /// `sgn(+inf) = +1`), -1 otherwise. NaN is rejected.
    pub fn of(a: f64) -> Result<Sign> {
        if a.is_nan() {
            return Err(Error::InvalidNumber("in sign"));
        }
        Ok(if a >= 0.0 { Sign::Plus } else { Sign::Minus })
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(v: i8) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::InvalidLabel(other.to_string())),
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        Sign::from_i8(v).map_err(serde::de::Error::custom)
    }
}

/// Sign of a real number; see [`Sign::of`].
pub fn sign(a: f64) -> Result<Sign> {
    Sign::of(a)
}

/// Permutation sorting `u` non-decreasingly, ties broken by ascending
/// index. Returns 0-based indices: `u[order[0]] <= u[order[1]] <= ...`.
pub fn sorted_order(u: &[f64]) -> Result<Vec<usize>> {
    if u.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidNumber("in sorted_order"));
    }
    let mut order: Vec<usize> = (0..u.len()).collect();
    // stable sort on a total order: values are NaN-free
    order.sort_by(|&a, &b| u[a].partial_cmp(&u[b]).unwrap().then(a.cmp(&b)));
    Ok(order)
}

/// A coordinate-wise product `u = w ⊙ x` together with its sorting
/// permutation.
#[derive(Debug, Clone)]
pub struct ProductVector {
    values: Vec<f64>,
    sorted_index: Vec<usize>,
}

impl ProductVector {
    pub fn new(w: &[f64], x: &[f64]) -> Result<Self> {
        if w.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: w.len(),
                actual: x.len(),
            });
        }
        let values: Vec<f64> = w.iter().zip(x).map(|(a, b)| a * b).collect();
        Self::from_values(values)
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let sorted_index = sorted_order(&values)?;
        Ok(Self {
            values,
            sorted_index,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sorted_index(&self) -> &[usize] {
        &self.sorted_index
    }

    /// The i-th smallest value (0-based), i.e. the order statistic
    /// u_(i+1) in 1-based notation.
    pub fn order_stat(&self, i: usize) -> f64 {
        self.values[self.sorted_index[i]]
    }

    /// Sum of order statistics at 0-based sorted positions `[from, to)`,
    /// accumulated in sorted order.
    pub fn range_sum(&self, from: usize, to: usize) -> f64 {
        self.sorted_index[from..to]
            .iter()
            .map(|&i| self.values[i])
            .sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A weight vector with its support (indices of nonzero coordinates).
/// The support is recomputed at construction and never cached stale.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
    support: Vec<usize>,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidNumber("in weight vector"));
        }
        let support = w
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        Ok(Self { w, support })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.w
    }
}

/// Truncated sum: the middle `d - 2k` order statistics of `u` summed,
/// i.e. `u_(k+1) + ... + u_(d-k)` in 1-based notation.
pub fn tsum(u: &[f64], cfg: &TruncationConfig) -> Result<f64> {
    cfg.check_dim(u.len())?;
    let pv = ProductVector::from_values(u.to_vec())?;
    Ok(pv.range_sum(cfg.k(), cfg.d() - cfg.k()))
}

/// Truncated inner product `<w, x>_k = tsum(w ⊙ x)`.
pub fn trunc_inner(w: &WeightVector, x: &[f64], cfg: &TruncationConfig) -> Result<f64> {
    cfg.check_dim(w.dim())?;
    cfg.check_dim(x.len())?;
    let pv = ProductVector::new(w.as_slice(), x)?;
    Ok(pv.range_sum(cfg.k(), cfg.d() - cfg.k()))
}

/// Sum of the `d - 2k` smallest order statistics: the minimum of the
/// truncated sum over the l0 ball of radius k around `u`.
pub fn lower_sum(u: &[f64], cfg: &TruncationConfig) -> Result<f64> {
    cfg.check_dim(u.len())?;
    let pv = ProductVector::from_values(u.to_vec())?;
    Ok(pv.range_sum(0, cfg.kept()))
}

/// Sum of the `d - 2k` largest order statistics: the maximum of the
/// truncated sum over the l0 ball of radius k around `u`.
pub fn upper_sum(u: &[f64], cfg: &TruncationConfig) -> Result<f64> {
    cfg.check_dim(u.len())?;
    let pv = ProductVector::from_values(u.to_vec())?;
    Ok(pv.range_sum(2 * cfg.k(), cfg.d()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, k: usize) -> TruncationConfig {
        TruncationConfig::new(d, k).unwrap()
    }

    fn wv(w: &[f64]) -> WeightVector {
        WeightVector::new(w.to_vec()).unwrap()
    }

    #[test]
    fn sign_convention() {
        assert_eq!(Sign::of(0.0).unwrap(), Sign::Plus);
        assert_eq!(Sign::of(-5.0).unwrap(), Sign::Minus);
        assert_eq!(Sign::of(f64::INFINITY).unwrap(), Sign::Plus);
        assert_eq!(Sign::of(f64::NEG_INFINITY).unwrap(), Sign::Minus);
        assert_eq!(Sign::of(-0.0).unwrap(), Sign::Plus); // -0.0 >= 0.0
        assert!(Sign::of(f64::NAN).is_err());
    }

    #[test]
    fn sorted_order_tie_break() {
        // (3,1,1) -> positions of the two tied 1s by ascending index
        assert_eq!(sorted_order(&[3.0, 1.0, 1.0]).unwrap(), vec![1, 2, 0]);
        // w1x1 <= w4x4 <= w3x3 <= w2x2 for u = (-5, 4, -2, -3)
        assert_eq!(
            sorted_order(&[-5.0, 4.0, -2.0, -3.0]).unwrap(),
            vec![0, 3, 2, 1]
        );
        let sorted = vec![1.0, 2.0, 3.0];
        assert_eq!(sorted_order(&sorted).unwrap(), vec![0, 1, 2]);
        assert!(sorted_order(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn tsum_examples() {
        // middle two sorted values of (-5, 4, -2, -3) are -3 and -2
        assert_eq!(tsum(&[-5.0, 4.0, -2.0, -3.0], &cfg(4, 1)).unwrap(), -5.0);
        // k = 0 is the full sum
        assert_eq!(tsum(&[1.0, 2.0, 3.0], &cfg(3, 0)).unwrap(), 6.0);
        // single surviving middle order statistic
        assert_eq!(tsum(&[3.0, 1.0, 1.0], &cfg(3, 1)).unwrap(), 1.0);
        assert!(tsum(&[1.0, 2.0], &cfg(3, 1)).is_err());
    }

    #[test]
    fn trunc_inner_examples() {
        let w = wv(&[1.0, 1.0, 1.0]);
        let c = cfg(3, 1);
        assert_eq!(trunc_inner(&w, &[10.0, 9.0, -100.0], &c).unwrap(), 9.0);
        assert_eq!(trunc_inner(&w, &[-90.0, 10.0, -98.0], &c).unwrap(), -90.0);
        // at most k nonzero weights: truncation removes every nonzero term
        let sparse = wv(&[1.0, 0.0, 0.0]);
        assert_eq!(trunc_inner(&sparse, &[7.0, 8.0, 9.0], &c).unwrap(), 0.0);
    }

    #[test]
    fn lower_upper_sums() {
        let c = cfg(3, 1);
        assert_eq!(lower_sum(&[10.0, 9.0, -100.0], &c).unwrap(), -100.0);
        assert_eq!(upper_sum(&[10.0, 9.0, -100.0], &c).unwrap(), 10.0);
        // constant vector: both equal (d - 2k) * value
        let c52 = cfg(5, 2);
        assert_eq!(lower_sum(&[4.0; 5], &c52).unwrap(), 4.0);
        assert_eq!(upper_sum(&[4.0; 5], &c52).unwrap(), 4.0);
        // k = 0: both equal the full sum
        let c30 = cfg(3, 0);
        assert_eq!(lower_sum(&[1.0, 2.0, 3.0], &c30).unwrap(), 6.0);
        assert_eq!(upper_sum(&[1.0, 2.0, 3.0], &c30).unwrap(), 6.0);
    }

    #[test]
    fn nonlinearity_regression() {
        // truncated inner product is not linear, and its value on a sum is
        // not a function of the values on the summands
        let w = wv(&[1.0, 1.0, 1.0]);
        let c = cfg(3, 1);
        let x1 = [10.0, 9.0, -100.0];
        let x2 = [-100.0, 1.0, 2.0];
        let x12: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a + b).collect();
        assert_eq!(trunc_inner(&w, &x1, &c).unwrap(), 9.0);
        assert_eq!(trunc_inner(&w, &x2, &c).unwrap(), 1.0);
        assert_eq!(trunc_inner(&w, &x12, &c).unwrap(), -90.0);

        let x1t = [0.0, 9.0, 10.0];
        let x2t = [0.0, 1.0, 10.0];
        let x12t: Vec<f64> = x1t.iter().zip(&x2t).map(|(a, b)| a + b).collect();
        assert_eq!(trunc_inner(&w, &x1t, &c).unwrap(), 9.0);
        assert_eq!(trunc_inner(&w, &x2t, &c).unwrap(), 1.0);
        assert_eq!(trunc_inner(&w, &x12t, &c).unwrap(), 10.0);
    }

    #[test]
    fn weight_vector_support() {
        let w = wv(&[0.0, 2.0, 0.0, -1.0]);
        assert_eq!(w.support(), &[1, 3]);
        assert_eq!(w.support_size(), 2);
        let z = wv(&[0.0, 0.0]);
        assert_eq!(w.dim(), 4);
        assert!(z.support().is_empty());
    }

    #[test]
    fn product_vector_invariants() {
        let pv = ProductVector::new(&[1.0, -2.0, 3.0], &[4.0, 5.0, -6.0]).unwrap();
        assert_eq!(pv.values(), &[4.0, -10.0, -18.0]);
        let idx = pv.sorted_index();
        let mut seen = idx.to_vec();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2]);
        for i in 1..pv.len() {
            assert!(pv.order_stat(i - 1) <= pv.order_stat(i));
        }
    }
}

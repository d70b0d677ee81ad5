//! Sign coding for truncated sums.
//!
//! The sign of any sum of `d - 2k` order statistics of `u = w ⊙ x` is
//! determined by the signs of finitely many conventional inner products:
//! one per size-(d-2k) subset indicator (the alpha vectors, C(d, 2k) of
//! them) and one per coordinate pair (the beta vectors, C(d, 2) of them,
//! each +1 at the smaller index and -1 at the larger). The beta signs
//! recover an ordering of `u`; mapping the requested sorted positions
//! through that ordering selects the alpha row whose sign answers the
//! query.

use crate::combinatorics::{binomial, subset_lex_rank, subsets_lex};
use crate::config::TruncationConfig;
use crate::error::{Error, Result};
use crate::truncation::{Sign, WeightVector};

/// The fixed alpha/beta basis for one (d, k).
#[derive(Debug, Clone)]
pub struct CodeBasis {
    cfg: TruncationConfig,
    /// Size-(d-2k) subsets of {0..d-1} in lexicographic order.
    alphas: Vec<Vec<usize>>,
    /// Index pairs (a, b) with a < b, in lexicographic order.
    betas: Vec<(usize, usize)>,
}

impl CodeBasis {
    pub fn new(cfg: &TruncationConfig) -> Result<Self> {
        let d = cfg.d();
        // refuse bases that cannot be indexed exactly
        binomial(d, 2 * cfg.k())?;
        let alphas = subsets_lex(d, cfg.kept());
        let mut betas = Vec::with_capacity(d * (d - 1) / 2);
        for a in 0..d {
            for b in a + 1..d {
                betas.push((a, b));
            }
        }
        Ok(Self {
            cfg: *cfg,
            alphas,
            betas,
        })
    }

    pub fn cfg(&self) -> &TruncationConfig {
        &self.cfg
    }

    pub fn alpha_count(&self) -> usize {
        self.alphas.len()
    }

    pub fn beta_count(&self) -> usize {
        self.betas.len()
    }

    /// Total number of coded inner products, C(d,2k) + C(d,2).
    pub fn code_len(&self) -> usize {
        self.alphas.len() + self.betas.len()
    }

    pub fn alpha_subset(&self, i: usize) -> &[usize] {
        &self.alphas[i]
    }

    pub fn beta_pair(&self, j: usize) -> (usize, usize) {
        self.betas[j]
    }

    /// The alpha basis vector as a 0/1 indicator.
    pub fn alpha_vector(&self, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.cfg.d()];
        for &j in &self.alphas[i] {
            v[j] = 1.0;
        }
        v
    }

    /// The beta basis vector: +1 at the smaller index, -1 at the larger.
    pub fn beta_vector(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.cfg.d()];
        let (a, b) = self.betas[j];
        v[a] = 1.0;
        v[b] = -1.0;
        v
    }

    /// Signs of all basis inner products for (w, x).
    pub fn encode(&self, w: &WeightVector, x: &[f64]) -> Result<SignCode> {
        self.cfg.check_dim(w.dim())?;
        self.cfg.check_dim(x.len())?;
        let ws = w.as_slice();
        let alpha_signs = self
            .alphas
            .iter()
            .map(|subset| Sign::of(subset.iter().map(|&i| ws[i] * x[i]).sum()))
            .collect::<Result<Vec<_>>>()?;
        let beta_signs = self
            .betas
            .iter()
            .map(|&(a, b)| Sign::of(ws[a] * x[a] - ws[b] * x[b]))
            .collect::<Result<Vec<_>>>()?;
        Ok(SignCode {
            alpha_signs,
            beta_signs,
        })
    }

    /// Ordering of {0..d-1} consistent with the beta comparisons: along
    /// the returned sequence the underlying values are non-decreasing.
    ///
    /// Each pair contributes one dominance: sign +1 ranks the smaller
    /// index above the larger, sign -1 the reverse. Counting dominances
    /// ranks every coordinate; codes produced by a real vector yield
    /// distinct counts, so duplicate counts mean no ordering satisfies
    /// the comparisons. Remaining ties (impossible for well-formed codes)
    /// break by ascending index.
    fn comparison_order(&self, code: &SignCode) -> Result<Vec<usize>> {
        let d = self.cfg.d();
        let mut wins = vec![0usize; d];
        for (j, &(a, b)) in self.betas.iter().enumerate() {
            match code.beta_signs[j] {
                Sign::Plus => wins[a] += 1,
                Sign::Minus => wins[b] += 1,
            }
        }
        let mut seen = vec![false; d];
        for &c in &wins {
            if seen[c] {
                return Err(Error::MalformedCode(
                    "comparisons admit no consistent ordering".into(),
                ));
            }
            seen[c] = true;
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by_key(|&i| (wins[i], i));
        Ok(order)
    }

    /// Sign of the sum of order statistics at the 0-based sorted
    /// positions `j_set` (|j_set| = d - 2k), read off the code alone.
    pub fn decode(&self, code: &SignCode, j_set: &[usize]) -> Result<Sign> {
        let d = self.cfg.d();
        if code.alpha_signs.len() != self.alphas.len() || code.beta_signs.len() != self.betas.len()
        {
            return Err(Error::MalformedCode("code length mismatch".into()));
        }
        if j_set.len() != self.cfg.kept() {
            return Err(Error::DimensionMismatch {
                expected: self.cfg.kept(),
                actual: j_set.len(),
            });
        }
        let mut marks = vec![false; d];
        for &j in j_set {
            if j >= d || marks[j] {
                return Err(Error::MalformedCode(format!(
                    "invalid sorted-position set {j_set:?}"
                )));
            }
            marks[j] = true;
        }
        let order = self.comparison_order(code)?;
        let mut mapped: Vec<usize> = j_set.iter().map(|&j| order[j]).collect();
        mapped.sort_unstable();
        let rank = subset_lex_rank(d, &mapped)?;
        Ok(code.alpha_signs[rank])
    }

    /// Sign of the truncated inner product via encode + decode of the
    /// middle positions {k, .., d-k-1}.
    pub fn trunc_sign(&self, w: &WeightVector, x: &[f64]) -> Result<Sign> {
        let code = self.encode(w, x)?;
        let middle: Vec<usize> = (self.cfg.k()..self.cfg.d() - self.cfg.k()).collect();
        self.decode(&code, &middle)
    }
}

/// One row of the sign matrix: alpha signs then beta signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignCode {
    pub alpha_signs: Vec<Sign>,
    pub beta_signs: Vec<Sign>,
}

/// Convenience wrapper building a fresh basis; prefer [`CodeBasis`] when
/// encoding repeatedly at the same (d, k).
pub fn encode(w: &WeightVector, x: &[f64], cfg: &TruncationConfig) -> Result<SignCode> {
    CodeBasis::new(cfg)?.encode(w, x)
}

/// Sign of the truncated inner product computed only through the code.
pub fn trunc_sign_via_code(w: &WeightVector, x: &[f64], cfg: &TruncationConfig) -> Result<Sign> {
    CodeBasis::new(cfg)?.trunc_sign(w, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truncation::{lower_sum, trunc_inner, upper_sum, ProductVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(d: usize, k: usize) -> TruncationConfig {
        TruncationConfig::new(d, k).unwrap()
    }

    fn wv(w: &[f64]) -> WeightVector {
        WeightVector::new(w.to_vec()).unwrap()
    }

    fn signs(v: &[i8]) -> Vec<Sign> {
        v.iter().map(|&s| Sign::from_i8(s).unwrap()).collect()
    }

    #[test]
    fn basis_cardinalities() {
        for (d, k) in [(3, 1), (4, 1), (5, 2), (7, 3)] {
            let basis = CodeBasis::new(&cfg(d, k)).unwrap();
            assert_eq!(basis.alpha_count() as u128, binomial(d, 2 * k).unwrap());
            assert_eq!(basis.beta_count(), d * (d - 1) / 2);
            assert_eq!(
                basis.code_len() as u128,
                binomial(d, 2 * k).unwrap() + binomial(d, 2).unwrap()
            );
        }
    }

    #[test]
    fn reference_tables_d4_k1() {
        // x = (1,-1,2,-3), w = (-5,-4,-1,1)
        let basis = CodeBasis::new(&cfg(4, 1)).unwrap();
        let w = wv(&[-5.0, -4.0, -1.0, 1.0]);
        let x = [1.0, -1.0, 2.0, -3.0];
        let code = basis.encode(&w, &x).unwrap();
        assert_eq!(code.alpha_signs, signs(&[-1, -1, -1, 1, 1, -1]));
        assert_eq!(code.beta_signs, signs(&[-1, -1, -1, 1, 1, 1]));
        // middle pair decodes through the (0,0,1,1) indicator row
        assert_eq!(basis.decode(&code, &[1, 2]).unwrap(), Sign::Minus);
        assert_eq!(basis.trunc_sign(&w, &x).unwrap(), Sign::Minus);
    }

    #[test]
    fn zero_vectors_code_all_plus() {
        let basis = CodeBasis::new(&cfg(4, 1)).unwrap();
        let zero_w = wv(&[0.0; 4]);
        let code = basis.encode(&zero_w, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(code.alpha_signs.iter().all(|&s| s == Sign::Plus));
        assert!(code.beta_signs.iter().all(|&s| s == Sign::Plus));
        let w = wv(&[1.0, -2.0, 3.0, -4.0]);
        let code = basis.encode(&w, &[0.0; 4]).unwrap();
        assert!(code.alpha_signs.iter().all(|&s| s == Sign::Plus));
        assert!(code.beta_signs.iter().all(|&s| s == Sign::Plus));
    }

    #[test]
    fn worked_values_via_code() {
        let c = cfg(3, 1);
        let w = wv(&[1.0, 1.0, 1.0]);
        assert_eq!(
            trunc_sign_via_code(&w, &[10.0, 9.0, -100.0], &c).unwrap(),
            Sign::Plus
        );
        // at most k nonzeros: truncated product is zero, sign +1
        let sparse = wv(&[1.0, 0.0, 0.0]);
        assert_eq!(
            trunc_sign_via_code(&sparse, &[-5.0, -5.0, -5.0], &c).unwrap(),
            Sign::Plus
        );
    }

    #[test]
    fn decode_matches_direct_on_named_position_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..500 {
            let d = rng.random_range(3..=7);
            let k = rng.random_range(1..=(d - 1) / 2);
            let c = cfg(d, k);
            let basis = CodeBasis::new(&c).unwrap();
            let w: Vec<f64> = (0..d)
                .map(|_| {
                    if trial % 3 == 0 {
                        [0.0, 1.0, -1.0][rng.random_range(0..3)]
                    } else {
                        rng.random_range(-2.0..2.0)
                    }
                })
                .collect();
            let x: Vec<f64> = (0..d)
                .map(|_| [-2.0, -1.0, 0.0, 1.0, 2.0][rng.random_range(0..5)])
                .collect();
            let w = wv(&w);
            let code = basis.encode(&w, &x).unwrap();
            let u: Vec<f64> = w.as_slice().iter().zip(&x).map(|(a, b)| a * b).collect();
            let middle: Vec<usize> = (k..d - k).collect();
            let low: Vec<usize> = (0..d - 2 * k).collect();
            let high: Vec<usize> = (2 * k..d).collect();
            assert_eq!(
                basis.decode(&code, &middle).unwrap(),
                Sign::of(trunc_inner(&w, &x, &c).unwrap()).unwrap()
            );
            assert_eq!(
                basis.decode(&code, &low).unwrap(),
                Sign::of(lower_sum(&u, &c).unwrap()).unwrap()
            );
            assert_eq!(
                basis.decode(&code, &high).unwrap(),
                Sign::of(upper_sum(&u, &c).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn decode_matches_direct_on_every_subset() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..300 {
            let d = rng.random_range(3..=6);
            let k = rng.random_range(1..=(d - 1) / 2);
            let c = cfg(d, k);
            let basis = CodeBasis::new(&c).unwrap();
            let w: Vec<f64> = (0..d)
                .map(|_| [0.0, 1.0, -1.0, 2.0][rng.random_range(0..4)])
                .collect();
            let x: Vec<f64> = (0..d)
                .map(|_| {
                    if trial % 2 == 0 {
                        [-1.0, 0.0, 1.0][rng.random_range(0..3)]
                    } else {
                        rng.random_range(-3.0..3.0)
                    }
                })
                .collect();
            let w = wv(&w);
            let code = basis.encode(&w, &x).unwrap();
            let pv = ProductVector::new(w.as_slice(), &x).unwrap();
            for j_set in subsets_lex(d, d - 2 * k) {
                let direct: f64 = j_set.iter().map(|&j| pv.order_stat(j)).sum();
                assert_eq!(
                    basis.decode(&code, &j_set).unwrap(),
                    Sign::of(direct).unwrap(),
                    "d={d} k={k} J={j_set:?} w={:?} x={x:?}",
                    w.as_slice()
                );
            }
        }
    }

    #[test]
    fn constant_positive_vector_low_block() {
        // sign of (d-2k) copies of the minimum of a positive constant vector
        let c = cfg(5, 1);
        let basis = CodeBasis::new(&c).unwrap();
        let w = wv(&[1.0; 5]);
        let code = basis.encode(&w, &[2.0; 5]).unwrap();
        assert_eq!(basis.decode(&code, &[0, 1, 2]).unwrap(), Sign::Plus);
    }

    #[test]
    fn inconsistent_code_detected() {
        let c = cfg(3, 1);
        let basis = CodeBasis::new(&c).unwrap();
        // a cyclic tournament: 0 beats 1, 1 beats 2, 2 beats 0
        let code = SignCode {
            alpha_signs: signs(&[1, 1, 1]),
            beta_signs: signs(&[1, -1, 1]),
        };
        assert!(matches!(
            basis.decode(&code, &[1]),
            Err(Error::MalformedCode(_))
        ));
        // length mismatch
        let short = SignCode {
            alpha_signs: signs(&[1]),
            beta_signs: signs(&[1, 1, 1]),
        };
        assert!(basis.decode(&short, &[1]).is_err());
        // bad position set
        let ok = SignCode {
            alpha_signs: signs(&[1, 1, 1]),
            beta_signs: signs(&[1, 1, 1]),
        };
        assert!(basis.decode(&ok, &[3]).is_err());
        assert!(basis.decode(&ok, &[0, 1]).is_err());
    }
}

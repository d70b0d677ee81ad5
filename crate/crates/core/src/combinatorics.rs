//! Binomial coefficients and lexicographic subset ranking
//! (combinatorial number system).

use crate::error::{Error, Result};

/// C(n, k) with overflow detection.
pub fn binomial(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 1..=k {
        let num = (n - k + i) as u128;
        result = result
            .checked_mul(num)
            .ok_or_else(|| Error::Precondition(format!("binomial({n}, {k}) overflows u128")))?
            / i as u128;
    }
    Ok(result)
}

/// Subsets of {0, .., n-1} of size k in lexicographic order.
pub fn subsets_lex(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance to the next subset in lex order
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Position of a sorted k-subset of {0, .., n-1} within the lexicographic
/// enumeration of all k-subsets.
pub fn subset_lex_rank(n: usize, subset: &[usize]) -> Result<usize> {
    let k = subset.len();
    let mut rank: u128 = 0;
    let mut prev = 0usize;
    for (pos, &c) in subset.iter().enumerate() {
        debug_assert!(c < n);
        for v in prev..c {
            rank += binomial(n - v - 1, k - pos - 1)?;
        }
        prev = c + 1;
    }
    Ok(rank as usize)
}

//! The James norm on finitely supported sequences.
//!
//! For `x = (a_1, ..., a_L)` the norm is `(1/sqrt 2) * sup_P V(P)^(1/2)`
//! where `P = (p_1 < ... < p_k)`, `k >= 2`, ranges over index patterns and
//! `V(P) = sum_i (a_{p_i} - a_{p_{i+1}})^2 + (a_{p_k} - a_{p_1})^2` is the
//! cyclic quadratic variation. Every coordinate past the support is zero, so
//! all indices beyond `L` collapse onto one sentinel index `L + 1` carrying
//! the value 0: several adjacent zeros in a cycle contribute nothing more
//! than one.
//!
//! Interior zeros are *not* collapsible (`e_1 + e_3` needs the zero at index
//! 2 to reach `sqrt 2`), so patterns range over every index `1..=L` and the
//! sentinel.
//!
//! Two evaluators are provided. [`max_variation_exhaustive`] walks every
//! subset and is the reference. [`max_variation_dp`] fixes the first index of
//! the cycle and runs a longest-path recursion over the remaining indices in
//! increasing order, closing the cycle at the end. Both fold each pattern's
//! terms left to right and add the closing term last, and IEEE rounding is
//! monotone, so the two agree bit for bit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};

/// Sections below this length use exhaustive enumeration by default.
pub const EXHAUSTIVE_BELOW: usize = 12;

/// Strictly increasing list of 1-based indices, length at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern(Vec<usize>);

impl Pattern {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.len() < 2 {
            return Err(Error::invalid("a pattern needs at least two indices"));
        }
        if indices[0] == 0 {
            return Err(Error::invalid("pattern indices are 1-based"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "pattern indices must be strictly increasing",
            ));
        }
        Ok(Pattern(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|i| i - 1)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, idx) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{idx}")?;
        }
        f.write_str(")")
    }
}

/// All patterns drawn from `support` plus the sentinel `max(support) + 1`.
///
/// Ordered by length, then lexicographically: `{1,2}` gives
/// `(1,2), (1,3), (2,3), (1,2,3)`.
pub fn james_patterns(support: &[usize]) -> Result<Vec<Pattern>> {
    let mut base: Vec<usize> = support.to_vec();
    base.sort_unstable();
    base.dedup();
    if base.is_empty() {
        return Err(Error::invalid("pattern support must be nonempty"));
    }
    if base[0] == 0 {
        return Err(Error::invalid("pattern support indices are 1-based"));
    }
    Budget::check("james pattern support", base.len(), Budget::current().james)?;
    let sentinel = base[base.len() - 1] + 1;
    base.push(sentinel);

    let n = base.len();
    let mut out = Vec::with_capacity((1usize << n) - n - 1);
    let mut combo: Vec<usize> = Vec::with_capacity(n);
    for k in 2..=n {
        // lexicographic k-combinations of 0..n
        combo.clear();
        combo.extend(0..k);
        loop {
            out.push(Pattern(combo.iter().map(|&c| base[c]).collect()));
            let mut i = k;
            while i > 0 && combo[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    Ok(out)
}

#[inline]
fn sq_diff(a: f64, b: f64) -> f64 {
    let d = a - b;
    d * d
}

/// Cyclic quadratic variation of `values` over 0-based `positions`.
/// Positions equal to `values.len()` or beyond read as zero.
pub fn cyclic_variation(values: &[f64], positions: &[usize]) -> f64 {
    let at = |p: usize| values.get(p).copied().unwrap_or(0.0);
    let mut sum = 0.0;
    for w in positions.windows(2) {
        sum += sq_diff(at(w[0]), at(w[1]));
    }
    if let (Some(&first), Some(&last)) = (positions.first(), positions.last()) {
        sum += sq_diff(at(last), at(first));
    }
    sum
}

/// Value vector over positions `0..=L` with the zero sentinel appended,
/// where `L` is the index of the last nonzero entry plus one.
fn with_sentinel(values: &[f64]) -> Vec<f64> {
    let len = values.iter().rposition(|v| *v != 0.0).map_or(0, |p| p + 1);
    let mut v = values[..len].to_vec();
    v.push(0.0);
    v
}

pub(crate) fn variation_to_norm(variation: f64) -> f64 {
    (0.5 * variation).sqrt()
}

/// Maximum cyclic variation by enumerating every subset of positions.
pub fn max_variation_exhaustive(values: &[f64]) -> Result<f64> {
    let v = with_sentinel(values);
    let n = v.len();
    if n < 2 {
        return Ok(0.0);
    }
    Budget::check(
        "james exhaustive enumeration",
        n - 1,
        Budget::current().james,
    )?;
    let mut best = 0.0f64;
    let mut positions = Vec::with_capacity(n);
    for mask in 1u64..(1u64 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        positions.clear();
        positions.extend((0..n).filter(|i| mask >> i & 1 == 1));
        let s = cyclic_variation(&v, &positions);
        if s > best {
            best = s;
        }
    }
    Ok(best)
}

/// Maximum cyclic variation and a maximizing pattern, in `O(L^3)`.
///
/// Ties keep the first pattern found scanning first index, then closing index,
/// in increasing order. The returned positions are 0-based and may include the
/// sentinel position `L`.
pub fn max_variation_dp(values: &[f64]) -> (f64, Vec<usize>) {
    let v = with_sentinel(values);
    let n = v.len();
    if n < 2 {
        return (0.0, vec![0, 1]);
    }
    let mut best_total = -1.0f64;
    let mut best_first = 0;
    let mut best_last = 1;
    let mut best_pred: Vec<usize> = Vec::new();

    let mut chain = vec![0.0f64; n];
    let mut pred = vec![usize::MAX; n];
    for first in 0..n - 1 {
        for j in first + 1..n {
            let mut b = sq_diff(v[first], v[j]);
            let mut p = first;
            for i in first + 1..j {
                let cand = chain[i] + sq_diff(v[i], v[j]);
                if cand > b {
                    b = cand;
                    p = i;
                }
            }
            chain[j] = b;
            pred[j] = p;
        }
        for last in first + 1..n {
            let total = chain[last] + sq_diff(v[last], v[first]);
            if total > best_total {
                best_total = total;
                best_first = first;
                best_last = last;
                best_pred = pred.clone();
            }
        }
    }

    let mut positions = vec![best_last];
    let mut cur = best_last;
    while cur != best_first {
        cur = best_pred[cur];
        positions.push(cur);
    }
    positions.reverse();
    (best_total.max(0.0), positions)
}

/// The James norm, by exhaustive enumeration for short supports and by the
/// DP otherwise.
pub fn james_norm(values: &[f64]) -> Result<f64> {
    let len = values.iter().rposition(|v| *v != 0.0).map_or(0, |p| p + 1);
    Budget::check("james section", len, Budget::current().james)?;
    let variation = if len < EXHAUSTIVE_BELOW {
        max_variation_exhaustive(values)?
    } else {
        max_variation_dp(values).0
    };
    Ok(variation_to_norm(variation))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(ix: &[usize]) -> Pattern {
        Pattern::new(ix.to_vec()).unwrap()
    }

    #[test]
    fn patterns_of_small_supports() {
        assert_eq!(james_patterns(&[1]).unwrap(), vec![p(&[1, 2])]);
        assert_eq!(
            james_patterns(&[1, 2]).unwrap(),
            vec![p(&[1, 2]), p(&[1, 3]), p(&[2, 3]), p(&[1, 2, 3])]
        );
        assert!(james_patterns(&[]).is_err());
        assert_eq!(james_patterns(&[2, 5, 9]).unwrap().len(), 11);
    }

    #[test]
    fn patterns_reject_bad_input() {
        assert!(Pattern::new(vec![3]).is_err());
        assert!(Pattern::new(vec![2, 2]).is_err());
        assert!(Pattern::new(vec![0, 1]).is_err());
        assert!(james_patterns(&(1..=25).collect::<Vec<_>>()).is_err());
    }

    #[test]
    fn known_norms() {
        assert_eq!(james_norm(&[1.0; 7]).unwrap(), 1.0);
        assert_eq!(james_norm(&[0.0, 0.0, 1.0]).unwrap(), 1.0);
        // (1,2): 2*(1-(-1))^2 = 8 -> sqrt(4)
        assert_eq!(james_norm(&[1.0, -1.0]).unwrap(), 2.0);
        assert_eq!(james_norm(&[1.0, 0.0, 1.0]).unwrap(), 2f64.sqrt());
        assert_eq!(james_norm(&[]).unwrap(), 0.0);
        assert_eq!(james_norm(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn dp_pattern_realizes_its_value() {
        let x = [0.3, -1.2, 0.7, 0.0, 2.5, -0.4];
        let (s, pos) = max_variation_dp(&x);
        assert_eq!(cyclic_variation(&x, &pos), s);
        assert_eq!(s, max_variation_exhaustive(&x).unwrap());
    }

    #[test]
    fn two_sentinels_never_beat_one() {
        // Oracle: append an explicit zero so two positions past the support are available.
        let x = [0.5, -0.25, 1.0, 0.75];
        let mut padded = x.to_vec();
        padded.push(0.0);
        let positions: Vec<usize> = (0..=padded.len()).collect();
        let mut best = 0.0f64;
        for mask in 1u32..(1 << positions.len()) {
            if mask.count_ones() < 2 {
                continue;
            }
            let pos: Vec<usize> = positions
                .iter()
                .copied()
                .filter(|i| mask >> i & 1 == 1)
                .collect();
            best = best.max(cyclic_variation(&padded, &pos));
        }
        assert_eq!(best, max_variation_exhaustive(&x).unwrap());
    }
}

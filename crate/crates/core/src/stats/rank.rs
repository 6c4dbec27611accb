use std::cmp::Ordering;

use crate::Scalar;

pub(crate) fn cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Twice the 1-based mid-rank of each element; integral even with ties.
pub fn doubled_midranks<T: Scalar>(v: &[T]) -> Vec<i64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| cmp(&v[a], &v[b]));
    let mut ranks = vec![0i64; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && v[order[j]] == v[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) share rank ((i+1) + j) / 2.
        let doubled = (i + 1 + j) as i64;
        for &k in &order[i..j] {
            ranks[k] = doubled;
        }
        i = j;
    }
    ranks
}

/// 1-based ranks, ties receiving the average rank.
pub fn midranks<T: Scalar>(v: &[T]) -> Vec<T> {
    doubled_midranks(v)
        .into_iter()
        .map(|r| T::lit(r as f64 / 2.0))
        .collect()
}

/// `|rank_x(i) - rank_y(i)|` divided by the largest such gap; all zeros
/// when the rankings agree.
pub fn rank_discrepancy<T: Scalar>(x: &[T], y: &[T]) -> Result<Vec<T>, super::StatsError> {
    if x.len() != y.len() {
        return Err(super::StatsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    let gaps: Vec<i64> = doubled_midranks(x)
        .into_iter()
        .zip(doubled_midranks(y))
        .map(|(a, b)| (a - b).abs())
        .collect();
    let max = gaps.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return Ok(vec![T::zero(); gaps.len()]);
    }
    Ok(gaps.into_iter().map(|g| T::lit(g as f64 / max as f64)).collect())
}

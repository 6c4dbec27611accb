use std::collections::BTreeMap;

use crate::Scalar;

use super::rank::cmp;

/// Largest sample size for which the exact permutation p-value is used.
pub const KENDALL_EXACT_MAX_N: usize = 10;

/// Pair counts behind a τ-b value.
#[derive(Debug, Clone, PartialEq)]
pub struct KendallStatistic {
    pub tau: f64,
    /// Concordant minus discordant pairs.
    pub s: i64,
    pub n: usize,
    /// Tie-group sizes (> 1) in each margin.
    pub x_ties: Vec<u64>,
    pub y_ties: Vec<u64>,
}

impl KendallStatistic {
    /// Two-sided p-value from the normal approximation with the
    /// tie-corrected variance of S.
    pub fn normal_p_value(&self) -> f64 {
        let n = self.n as i128;
        if n < 3 {
            return 1.0;
        }
        let sum = |t: &[u64], f: fn(i128) -> i128| t.iter().map(|&v| f(v as i128)).sum::<i128>();
        let v0 = n * (n - 1) * (2 * n + 5);
        let vt = sum(&self.x_ties, |t| t * (t - 1) * (2 * t + 5));
        let vu = sum(&self.y_ties, |t| t * (t - 1) * (2 * t + 5));
        let v1 = sum(&self.x_ties, |t| t * (t - 1)) * sum(&self.y_ties, |t| t * (t - 1));
        let v2 = sum(&self.x_ties, |t| t * (t - 1) * (t - 2)) * sum(&self.y_ties, |t| t * (t - 1) * (t - 2));
        let var = (v0 - vt - vu) as f64 / 18.0
            + v1 as f64 / (2 * n * (n - 1)) as f64
            + v2 as f64 / (9 * n * (n - 1) * (n - 2)) as f64;
        if var <= 0.0 {
            return 1.0;
        }
        let z = self.s as f64 / var.sqrt();
        statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2)
    }
}

fn tie_groups<T: Scalar>(sorted: impl Iterator<Item = T>) -> Vec<u64> {
    let mut groups = Vec::new();
    let mut prev: Option<T> = None;
    let mut run = 0u64;
    for v in sorted {
        if prev == Some(v) {
            run += 1;
        } else {
            if run > 1 {
                groups.push(run);
            }
            run = 1;
            prev = Some(v);
        }
    }
    if run > 1 {
        groups.push(run);
    }
    groups
}

/// Sorts `v` in place (stable merge sort) and returns the number of
/// inversions removed.
fn merge_count<T: Scalar>(v: &mut [T], buf: &mut Vec<T>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], buf) + merge_count(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            swaps += (mid - i) as u64;
            buf.push(v[j]);
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Kendall τ-b in O(n log n) (Knight's algorithm). Inputs must be finite
/// and of equal length.
pub fn kendall_tau_b<T: Scalar>(x: &[T], y: &[T]) -> KendallStatistic {
    let n = x.len();
    let mut pairs: Vec<(T, T)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| cmp(&a.0, &b.0).then(cmp(&a.1, &b.1)));

    let x_ties = tie_groups(pairs.iter().map(|p| p.0));
    let mut joint = 0u64;
    let mut run = 1u64;
    for w in pairs.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            joint += run * (run - 1) / 2;
            run = 1;
        }
    }
    joint += run * (run - 1) / 2;

    let mut ys: Vec<T> = pairs.iter().map(|p| p.1).collect();
    let swaps = merge_count(&mut ys, &mut Vec::with_capacity(n));
    let y_ties = tie_groups(ys.iter().copied());

    let pairs_of = |t: &[u64]| t.iter().map(|&v| v * (v - 1) / 2).sum::<u64>();
    let n0 = (n as u64) * (n as u64).saturating_sub(1) / 2;
    let (n1, n2) = (pairs_of(&x_ties), pairs_of(&y_ties));
    let s = n0 as i64 - n1 as i64 - n2 as i64 + joint as i64 - 2 * swaps as i64;
    let denom = ((n0 - n1) as f64 * (n0 - n2) as f64).sqrt();
    let tau = if denom > 0.0 { (s as f64 / denom).clamp(-1.0, 1.0) } else { f64::NAN };
    KendallStatistic { tau, s, n, x_ties, y_ties }
}

fn group_sizes<T: Scalar>(v: &[T]) -> Vec<usize> {
    let mut sorted = v.to_vec();
    sorted.sort_by(cmp);
    let mut sizes = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let j = (i..sorted.len()).find(|&j| sorted[j] != sorted[i]).unwrap_or(sorted.len());
        sizes.push(j - i);
        i = j;
    }
    sizes
}

/// Exact two-sided p-value `P(|S| >= |S_obs|)` over all `n!` pairings,
/// ties in either margin allowed.
///
/// Rather than enumerating permutations, the y values are placed into the
/// x tie-blocks one distinct value at a time (ascending); each placed copy
/// is concordant with every earlier (smaller) value in a lower x-block and
/// discordant with those in a higher one. The state is the fill level of
/// each block, so the work is bounded by `prod(t_b + 1)` states.
pub fn kendall_exact_p_value<T: Scalar>(x: &[T], y: &[T]) -> f64 {
    let n = x.len();
    let observed = kendall_tau_b(x, y).s.abs();
    let blocks = group_sizes(x);
    let values = group_sizes(y);

    let mut strides = Vec::with_capacity(blocks.len());
    let mut states = 1usize;
    for &t in &blocks {
        strides.push(states);
        states *= t + 1;
    }
    let decode = |mut code: usize| -> Vec<usize> {
        blocks
            .iter()
            .map(|&t| {
                let f = code % (t + 1);
                code /= t + 1;
                f
            })
            .collect()
    };

    let mut fact = vec![1u64; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i as u64;
    }

    // dist[state] maps S -> weighted count.
    let mut dist: Vec<BTreeMap<i64, u64>> = vec![BTreeMap::new(); states];
    dist[0].insert(0, 1);
    for &u in &values {
        let mut next: Vec<BTreeMap<i64, u64>> = vec![BTreeMap::new(); states];
        for (code, table) in dist.iter().enumerate() {
            if table.is_empty() {
                continue;
            }
            let fill = decode(code);
            // Score of one copy placed in block b: earlier elements below minus above.
            let total: usize = fill.iter().sum();
            let mut below = 0usize;
            let scores: Vec<i64> = fill
                .iter()
                .map(|&f| {
                    let above = total - below - f;
                    let score = below as i64 - above as i64;
                    below += f;
                    score
                })
                .collect();
            let mut counts = vec![0usize; blocks.len()];
            distribute(0, u, &blocks, &fill, &mut counts, &mut |counts| {
                let mut weight = fact[u];
                let mut delta = 0i64;
                let mut target = code;
                for (b, &c) in counts.iter().enumerate() {
                    weight /= fact[c];
                    delta += c as i64 * scores[b];
                    target += c * strides[b];
                }
                let out = &mut next[target];
                for (&s, &w) in table {
                    *out.entry(s + delta).or_insert(0) += w * weight;
                }
            });
        }
        dist = next;
    }

    let final_table = &dist[states - 1];
    let total: u64 = final_table.values().sum();
    let extreme: u64 = final_table.iter().filter(|(s, _)| s.abs() >= observed).map(|(_, w)| w).sum();
    extreme as f64 / total as f64
}

/// Enumerates every way to put `remaining` copies into blocks `b..` without
/// exceeding capacity.
fn distribute(
    b: usize,
    remaining: usize,
    blocks: &[usize],
    fill: &[usize],
    counts: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if b == blocks.len() {
        if remaining == 0 {
            emit(counts);
        }
        return;
    }
    let room = blocks[b] - fill[b];
    let spare_after: usize = blocks[b + 1..].iter().zip(&fill[b + 1..]).map(|(t, f)| t - f).sum();
    let lo = remaining.saturating_sub(spare_after);
    for c in lo..=room.min(remaining) {
        counts[b] = c;
        distribute(b + 1, remaining - c, blocks, fill, counts, emit);
    }
    counts[b] = 0;
}

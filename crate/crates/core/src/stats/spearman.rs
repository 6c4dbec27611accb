use crate::Scalar;

use super::rank::doubled_midranks;
use super::t_test_p_value;

/// Largest sample size for which the exact permutation p-value is used.
pub const SPEARMAN_EXACT_MAX_N: usize = 8;

/// Mid-rank deviations from the mean rank, doubled so they stay integral.
fn centered(v: &[i64]) -> Vec<i64> {
    let n1 = v.len() as i64 + 1;
    v.iter().map(|r| r - n1).collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Spearman ρ as Pearson correlation of mid-ranks. NaN for constant input.
pub fn spearman_rho<T: Scalar>(x: &[T], y: &[T]) -> T {
    let (cx, cy) = (centered(&doubled_midranks(x)), centered(&doubled_midranks(y)));
    let denom = ((dot(&cx, &cx) as f64) * (dot(&cy, &cy) as f64)).sqrt();
    if denom == 0.0 {
        return T::nan();
    }
    T::lit((dot(&cx, &cy) as f64 / denom).clamp(-1.0, 1.0))
}

/// Fraction of the `n!` permutations of `cy` whose statistic is at least
/// as extreme as the observed one.
fn exact_p_value(cx: &[i64], cy: &[i64]) -> f64 {
    let observed = dot(cx, cy).abs();
    let mut perm = cy.to_vec();
    let n = perm.len();
    let mut extreme = 0u64;
    let mut total = 0u64;
    // Heap's algorithm, iterative form.
    let mut c = vec![0usize; n];
    let mut visit = |p: &[i64]| {
        total += 1;
        if dot(cx, p).abs() >= observed {
            extreme += 1;
        }
    };
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    extreme as f64 / total as f64
}

pub(super) fn spearman_with_p<T: Scalar>(x: &[T], y: &[T]) -> (f64, f64) {
    let (cx, cy) = (centered(&doubled_midranks(x)), centered(&doubled_midranks(y)));
    let denom = ((dot(&cx, &cx) as f64) * (dot(&cy, &cy) as f64)).sqrt();
    let rho = (dot(&cx, &cy) as f64 / denom).clamp(-1.0, 1.0);
    let p = if x.len() <= SPEARMAN_EXACT_MAX_N {
        exact_p_value(&cx, &cy)
    } else {
        t_test_p_value(rho, x.len())
    };
    (rho, p)
}

//! Paired-vector correlation: Kendall τ-b, Spearman ρ and Pearson r with
//! two-sided p-values, plus rank-discrepancy vectors.

mod kendall;
mod pearson;
mod rank;
mod spearman;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::Scalar;

pub use kendall::{kendall_exact_p_value, kendall_tau_b, KendallStatistic, KENDALL_EXACT_MAX_N};
pub use pearson::pearson_r;
pub use rank::{doubled_midranks, midranks, rank_discrepancy};
pub use spearman::{spearman_rho, SPEARMAN_EXACT_MAX_N};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("vectors differ in length: {x} vs {y}")]
    LengthMismatch { x: usize, y: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Kendall,
    Spearman,
    Pearson,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Kendall, Method::Spearman, Method::Pearson];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Kendall => "kendall",
            Method::Spearman => "spearman",
            Method::Pearson => "pearson",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "kendall" => Ok(Method::Kendall),
            "spearman" => Ok(Method::Spearman),
            "pearson" => Ok(Method::Pearson),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transform {
    Raw,
    Log10,
}

impl Transform {
    pub fn as_str(self) -> &'static str {
        match self {
            Transform::Raw => "raw",
            Transform::Log10 => "log10",
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Transform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "raw" => Ok(Transform::Raw),
            "log10" => Ok(Transform::Log10),
            other => Err(format!("unknown transform `{other}`")),
        }
    }
}

/// Why a coefficient could not be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// Fewer than two usable pairs.
    TooFewPairs,
    /// One of the vectors has no variation.
    ConstantInput,
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Degeneracy::TooFewPairs => "too_few_pairs",
            Degeneracy::ConstantInput => "constant_input",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult<T = f64> {
    pub method: Method,
    pub transform: Transform,
    /// NaN when `degenerate` is set.
    pub coefficient: T,
    /// Two-sided; NaN when `degenerate` is set.
    pub p_value: T,
    /// Pairs used.
    pub n: usize,
    /// Pairs dropped: non-finite values, or non-positive values under log10.
    pub excluded: usize,
    pub degenerate: Option<Degeneracy>,
}

impl<T: Scalar> CorrelationResult<T> {
    pub fn degenerate(method: Method, transform: Transform, n: usize, excluded: usize, why: Degeneracy) -> Self {
        Self {
            method,
            transform,
            coefficient: T::nan(),
            p_value: T::nan(),
            n,
            excluded,
            degenerate: Some(why),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate.is_some()
    }
}

/// Drops pairs that are unusable under `transform` and applies it.
fn prepare<T: Scalar>(x: &[T], y: &[T], transform: Transform) -> (Vec<T>, Vec<T>, usize) {
    let usable = |v: T| match transform {
        Transform::Raw => v.is_finite(),
        Transform::Log10 => v.is_finite() && v > T::zero(),
    };
    let apply = |v: T| match transform {
        Transform::Raw => v,
        Transform::Log10 => v.log10(),
    };
    let (mut xs, mut ys) = (Vec::with_capacity(x.len()), Vec::with_capacity(y.len()));
    for (&a, &b) in x.iter().zip(y) {
        if usable(a) && usable(b) {
            xs.push(apply(a));
            ys.push(apply(b));
        }
    }
    let excluded = x.len() - xs.len();
    (xs, ys, excluded)
}

fn is_constant<T: Scalar>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

/// Correlates two paired vectors.
///
/// Kendall is τ-b; its p-value is exact for `n <= 10` and otherwise uses
/// the normal approximation with tie-adjusted variance. Spearman is Pearson
/// on mid-ranks, with an exact permutation p-value for `n <= 8` and a
/// t-approximation beyond. Pearson uses a t-distribution with `n - 2`
/// degrees of freedom.
pub fn correlate<T: Scalar>(x: &[T], y: &[T], method: Method, transform: Transform) -> Result<CorrelationResult<T>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    let (xs, ys, excluded) = prepare(x, y, transform);
    let n = xs.len();
    if n < 2 {
        return Ok(CorrelationResult::degenerate(method, transform, n, excluded, Degeneracy::TooFewPairs));
    }
    if is_constant(&xs) || is_constant(&ys) {
        return Ok(CorrelationResult::degenerate(method, transform, n, excluded, Degeneracy::ConstantInput));
    }
    let (coefficient, p_value) = match method {
        Method::Kendall => {
            let k = kendall_tau_b(&xs, &ys);
            let p = if n <= KENDALL_EXACT_MAX_N {
                kendall_exact_p_value(&xs, &ys)
            } else {
                k.normal_p_value()
            };
            (T::lit(k.tau), p)
        }
        Method::Spearman => {
            let (rho, p) = spearman::spearman_with_p(&xs, &ys);
            (T::lit(rho), p)
        }
        Method::Pearson => {
            let r = pearson_r(&xs, &ys);
            (r, t_test_p_value(r.as_f64(), n))
        }
    };
    Ok(CorrelationResult {
        method,
        transform,
        coefficient,
        p_value: T::lit(p_value.clamp(0.0, 1.0)),
        n,
        excluded,
        degenerate: None,
    })
}

/// Two-sided p-value of a correlation coefficient under a t-distribution
/// with `n - 2` degrees of freedom.
pub(crate) fn t_test_p_value(r: f64, n: usize) -> f64 {
    use statrs::distribution::{ContinuousCDF, StudentsT};
    if n <= 2 {
        return 1.0;
    }
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / ((1.0 - r) * (1.0 + r))).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    2.0 * dist.sf(t.abs())
}

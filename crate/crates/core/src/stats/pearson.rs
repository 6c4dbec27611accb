use crate::Scalar;

/// Sample Pearson correlation (two-pass, centered). Returns NaN when either
/// vector has zero variance.
pub fn pearson_r<T: Scalar>(x: &[T], y: &[T]) -> T {
    let n = T::from_usize(x.len()).unwrap_or_else(T::nan);
    let mx = x.iter().fold(T::zero(), |a, &v| a + v) / n;
    let my = y.iter().fold(T::zero(), |a, &v| a + v) / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    let denom = (sxx * syy).sqrt();
    if denom == T::zero() {
        return T::nan();
    }
    (sxy / denom).max(-T::one()).min(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_linear() {
        assert!((pearson_r::<f64>(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 1.0).abs() < 1e-15);
        assert!((pearson_r::<f64>(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn known_value() {
        // sum(dx*dy) = 8, sum(dx^2) = sum(dy^2) = 10
        let r = pearson_r::<f64>(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0]);
        assert!((r - 0.8).abs() < 1e-12, "{r}");
    }

    #[test]
    fn zero_variance_is_nan() {
        assert!(pearson_r::<f64>(&[1.0, 1.0], &[1.0, 2.0]).is_nan());
    }
}

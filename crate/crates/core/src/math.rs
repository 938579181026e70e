//! Thin wrappers over `libm` plus the log-space helpers used by the
//! probability tables. Kept crate-private; callers outside see only f64s.

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// ln(1 + x), accurate near zero.
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// 1 / (1 + e^{-x}). Saturates cleanly to 0 and 1 at the f64 limits.
pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + exp(-x))
    } else {
        let e = exp(x);
        e / (1.0 + e)
    }
}

/// ln sum_i e^{x_i}. Empty input and all-(-inf) input both give -inf.
pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for &x in xs {
        if x > max {
            max = x;
        }
    }
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut sum = 0.0;
    for &x in xs {
        sum += exp(x - max);
    }
    max + ln(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let xs: [f64; 4] = [0.0, -1.0, -2.5, 3.0];
        let direct: f64 = xs.iter().map(|x| x.exp()).sum();
        assert!((log_sum_exp(&xs) - direct.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_handles_extreme_magnitudes() {
        // Direct summation would overflow e^800.
        let xs = [800.0, 800.0];
        assert!((log_sum_exp(&xs) - (800.0 + 2f64.ln())).abs() < 1e-12);
        let lo = [-800.0, -800.0];
        assert!((log_sum_exp(&lo) - (-800.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_empty_and_degenerate() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 0.0]), 0.0);
    }

    #[test]
    fn logistic_symmetry_and_range() {
        for &x in &[-50.0, -3.0, -0.1, 0.0, 0.1, 3.0, 50.0] {
            let p = logistic(x);
            assert!((0.0..=1.0).contains(&p));
            assert!((p + logistic(-x) - 1.0).abs() < 1e-15);
        }
        assert!((logistic(0.0) - 0.5).abs() < 1e-15);
        // Far tails saturate instead of producing NaN.
        assert_eq!(logistic(-1e4), 0.0);
        assert_eq!(logistic(1e4), 1.0);
    }
}

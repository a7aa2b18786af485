//! Overflow-free ratios of hyperbolic functions.
//!
//! The closed forms on the circle are all built from `cosh(x u) / sinh(x / 2)`
//! and `sinh(x u) / sinh(x / 2)` with `|u| <= 1/2`. Written in terms of
//! decaying exponentials these stay finite for any `x > 0`.

/// `cosh(x u) / sinh(x / 2)` for `x > 0`, `|u| <= 1/2`.
pub(crate) fn cosh_over_sinh_half(x: f64, u: f64) -> f64 {
    ((x * (u - 0.5)).exp() + (-x * (u + 0.5)).exp()) / -(-x).exp_m1()
}

/// `sinh(x u) / sinh(x / 2)` for `x > 0`, `|u| <= 1/2`.
pub(crate) fn sinh_over_sinh_half(x: f64, u: f64) -> f64 {
    ((x * (u - 0.5)).exp() - (-x * (u + 0.5)).exp()) / -(-x).exp_m1()
}

pub(crate) fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// Offset of a lag fraction from the antipode, `theta - 1/2`, after reducing
/// `theta` into `[0, 1]`.
pub(crate) fn centered(theta: f64) -> f64 {
    reduce_lag(theta) - 0.5
}

/// Reduces a lag fraction into `[0, 1]`. Values already in `[0, 1]` are kept
/// as is so that `theta = 1` stays the same point as `theta = 0`
/// without leaving the interval.
pub(crate) fn reduce_lag(theta: f64) -> f64 {
    if (0.0..=1.0).contains(&theta) {
        theta
    } else {
        theta.rem_euclid(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_match_direct_evaluation() {
        for &x in &[0.1_f64, 1.0, 7.5, 30.0] {
            for &u in &[-0.5_f64, -0.2, 0.0, 0.3, 0.5] {
                let c = (x * u).cosh() / (x / 2.0).sinh();
                let s = (x * u).sinh() / (x / 2.0).sinh();
                assert!((cosh_over_sinh_half(x, u) - c).abs() <= 1e-13 * c.abs().max(1.0));
                assert!((sinh_over_sinh_half(x, u) - s).abs() <= 1e-13 * c.abs().max(1.0));
            }
        }
    }

    #[test]
    fn ratios_stay_finite_for_huge_arguments() {
        assert!(cosh_over_sinh_half(5000.0, 0.5).is_finite());
        assert!((cosh_over_sinh_half(5000.0, 0.5) - 1.0).abs() < 1e-12);
        assert_eq!(cosh_over_sinh_half(5000.0, 0.0), 0.0);
    }

    #[test]
    fn lag_reduction() {
        assert_eq!(reduce_lag(0.25), 0.25);
        assert_eq!(reduce_lag(1.0), 1.0);
        assert!((reduce_lag(1.25) - 0.25).abs() < 1e-15);
        assert!((reduce_lag(-0.25) - 0.75).abs() < 1e-15);
    }
}

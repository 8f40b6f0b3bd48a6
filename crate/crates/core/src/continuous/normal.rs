//! Standard normal distribution function and density.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `Φ(x)`, through the complementary error function so both tails keep
/// full relative precision.
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `φ(x)`.
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_and_centered() {
        assert_eq!(cdf(0.0), 0.5);
        for x in [0.1, 0.7, 1.0, 2.5, 6.0] {
            assert!((cdf(x) + cdf(-x) - 1.0).abs() < 1e-15);
        }
        assert!((pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-16);
    }

    #[test]
    fn derivative_matches_density() {
        let h = 1e-5;
        for x in [-1.5, 0.0, 0.3, 2.0] {
            let slope = (cdf(x + h) - cdf(x - h)) / (2.0 * h);
            assert!((slope - pdf(x)).abs() < 1e-9);
        }
    }
}

//! Thin wrappers around the gamma function.

/// Gamma function, exact at small positive integers.
///
/// The limit laws evaluate `Gamma(1 - rho)`, and `rho = -1` (the most
/// common second-order case) must hit `Gamma(2) = 1` without Lanczos
/// rounding, since downstream identities (the equal-bias point of the
/// Hill/RBM comparison) are tested exactly there. Factorials stay exact in
/// f64 through 18!.
pub(crate) fn gamma(x: f64) -> f64 {
    if x > 0.0 && x <= 19.0 && x.fract() == 0.0 {
        let mut acc = 1.0;
        let mut i = 2.0;
        while i < x {
            acc *= i;
            i += 1.0;
        }
        acc
    } else {
        statrs::function::gamma::gamma(x)
    }
}

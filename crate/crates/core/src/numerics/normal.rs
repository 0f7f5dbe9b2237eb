//! Gaussian Q function and its inverse.

use super::gamma::{ln_gamma_p, ln_gamma_q};
use super::{lse2, NumericsError, Result};

/// ln Q(x) for the standard normal tail Q(x) = P(Z > x), exact far into
/// the tail via the incomplete-gamma representation Q(x) = Q(1/2, x²/2)/2.
pub fn ln_gaussian_q(x: f64) -> f64 {
    if x == 0.0 {
        return -std::f64::consts::LN_2;
    }
    let half_x2 = 0.5 * x * x;
    if x > 0.0 {
        ln_gamma_q(0.5, half_x2).expect("domain is valid") - std::f64::consts::LN_2
    } else {
        // Q(x) = 1 - Q(-x) = 1/2 + P(1/2, x^2/2)/2
        let ln_p = ln_gamma_p(0.5, half_x2).expect("domain is valid");
        lse2(-std::f64::consts::LN_2, ln_p - std::f64::consts::LN_2)
    }
}

/// Gaussian Q function (linear domain; underflows to 0 for x ≳ 38).
pub fn gaussian_q(x: f64) -> f64 {
    ln_gaussian_q(x).exp()
}

/// Q⁻¹(ε) for ε ∈ (0, 1), accurate to ~1e-13 relative.
pub fn q_inv(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(NumericsError::Domain(format!(
            "q_inv requires epsilon in (0, 1), got {epsilon}"
        )));
    }
    if epsilon == 0.5 {
        return Ok(0.0);
    }
    if epsilon > 0.5 {
        return Ok(-q_inv(1.0 - epsilon)?);
    }
    // bisection on ln Q(x) = ln eps over [0, 42]; monotone decreasing
    let target = epsilon.ln();
    let (mut lo, mut hi) = (0.0f64, 42.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_gaussian_q(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn q_inv_oracle_values() {
        // (epsilon, x) with Q(x) = epsilon, 40-digit oracle
        let cases: [(f64, f64); 7] = [
            (1e-6, 4.7534243088228989),
            (1e-3, 3.0902323061678135),
            (0.1, 1.2815515655446005),
            (0.5, 0.0),
            (0.9, -1.2815515655446005),
            (0.2, 0.84162123357291421),
            (1e-9, 5.9978070150076869),
        ];
        for (eps, expect) in cases {
            let got = q_inv(eps).unwrap();
            let tol = 1e-12 * expect.abs().max(1.0);
            assert!((got - expect).abs() < tol, "eps={eps}: {got} vs {expect}");
        }
    }

    #[test]
    fn q_of_q_inv_round_trip() {
        for eps in [1e-6, 1e-3, 0.1, 0.5, 0.9] {
            let x = q_inv(eps).unwrap();
            assert!((gaussian_q(x) - eps).abs() < 1e-10, "eps={eps}");
        }
    }

    #[test]
    fn symmetry() {
        let p = 0.2;
        let diff = q_inv(1.0 - p).unwrap() + q_inv(p).unwrap();
        assert!(diff.abs() < 1e-12, "asymmetry {diff:e}");
    }

    #[test]
    fn domain_errors() {
        assert!(q_inv(0.0).is_err());
        assert!(q_inv(1.0).is_err());
        assert!(q_inv(-0.1).is_err());
    }
}

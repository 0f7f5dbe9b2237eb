//! Special functions and quadrature shared by every bound: log-domain
//! modified Bessel functions, the Gaussian Q function and its inverse,
//! log-sum-exp reduction, and adaptive quadrature of unimodal
//! log-integrands on the half-line.
//!
//! All probability-like quantities are carried as natural logarithms
//! end-to-end; `LogValue` is the carrier type.

mod bessel;
mod gamma;
mod normal;
mod quad;

pub use bessel::log_bessel_i;
pub use gamma::{gamma_p, gamma_q, ln_factorial, ln_gamma, ln_gamma_p, ln_gamma_q};
pub use normal::{gaussian_q, ln_gaussian_q, q_inv};
pub use quad::{integrate_halfline_log, QuadratureSpec};

use thiserror::Error;

/// Errors from the numerics layer.
#[derive(Debug, Clone, Error)]
pub enum NumericsError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("convergence failure: {what} (panels used: {panels}, achieved ~{achieved:.3e}, requested {requested:.3e})")]
    Convergence {
        what: String,
        panels: usize,
        achieved: f64,
        requested: f64,
    },
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Natural logarithm of a nonnegative quantity; `-inf` encodes zero.
///
/// Products of the underlying quantities are sums of logs (`*`), sums are
/// log-sum-exp (`+`), so chains of either never overflow for operand
/// magnitudes up to `e^±700`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogValue(f64);

impl LogValue {
    /// log(0)
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    /// log(1)
    pub const ONE: LogValue = LogValue(0.0);

    /// Wraps a value that is already a natural logarithm.
    pub fn from_ln(ln: f64) -> Self {
        LogValue(ln)
    }

    /// Takes the log of a nonnegative linear-domain value.
    pub fn from_linear(x: f64) -> Result<Self> {
        if x < 0.0 || x.is_nan() {
            return Err(NumericsError::Domain(format!(
                "LogValue requires a nonnegative quantity, got {x}"
            )));
        }
        Ok(LogValue(x.ln()))
    }

    /// The stored natural logarithm.
    pub fn ln(self) -> f64 {
        self.0
    }

    /// Back to linear domain (may underflow to 0 or overflow to inf).
    pub fn linear(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl std::ops::Mul for LogValue {
    type Output = LogValue;
    /// Product of the underlying quantities.
    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            return LogValue::ZERO;
        }
        LogValue(self.0 + rhs.0)
    }
}

impl std::ops::Add for LogValue {
    type Output = LogValue;
    /// Sum of the underlying quantities via shifted log-sum-exp.
    fn add(self, rhs: LogValue) -> LogValue {
        LogValue(lse2(self.0, rhs.0))
    }
}

/// Two-operand log-sum-exp, safe for `-inf` operands.
pub(crate) fn lse2(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// log(sum of exp(v_i)) over a nonempty sequence, exact under shifting by
/// the maximum.
pub fn log_sum_exp(values: &[LogValue]) -> Result<LogValue> {
    if values.is_empty() {
        return Err(NumericsError::Usage(
            "log_sum_exp requires a nonempty sequence".into(),
        ));
    }
    Ok(LogValue(lse_slice(values.iter().map(|v| v.0))))
}

pub(crate) fn lse_slice(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

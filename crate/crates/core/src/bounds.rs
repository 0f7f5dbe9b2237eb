//! Rate bounds computed from batches of information-density sums: the
//! dependence-testing achievability bound, the min-max converse, the
//! pilot-assisted achievability variant, and the AWGN normal
//! approximation.

use crate::numerics::q_inv;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum BoundsError {
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, BoundsError>;

/// One-sided 95% normal quantile used for the conservative brackets.
const Z95: f64 = 1.6448536269514722;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Dt,
    Converse,
    PilotDt,
    NormalApprox,
}

impl BoundKind {
    pub fn label(&self) -> &'static str {
        match self {
            BoundKind::Dt => "dt",
            BoundKind::Converse => "converse",
            BoundKind::PilotDt => "pilot-dt",
            BoundKind::NormalApprox => "normal-approx",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dt" => Ok(BoundKind::Dt),
            "converse" => Ok(BoundKind::Converse),
            "pilot-dt" => Ok(BoundKind::PilotDt),
            "normal-approx" => Ok(BoundKind::NormalApprox),
            other => Err(BoundsError::Usage(format!(
                "unknown bound kind '{other}' (expected dt, converse, pilot-dt, normal-approx)"
            ))),
        }
    }
}

/// Seeded, reproducible batch of information-density sums T = Σ_k S_k
/// (nats), one entry per codeword draw.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub sums: Vec<f64>,
    pub master_seed: u64,
}

impl SampleBatch {
    pub fn new(sums: Vec<f64>, master_seed: u64) -> Result<Self> {
        if sums.len() < 2 {
            return Err(BoundsError::Usage(format!(
                "a batch needs at least 2 samples, got {}",
                sums.len()
            )));
        }
        if let Some(bad) = sums.iter().find(|v| !v.is_finite()) {
            return Err(BoundsError::Usage(format!(
                "batch contains a non-finite sum: {bad}"
            )));
        }
        Ok(SampleBatch { sums, master_seed })
    }

    pub fn count(&self) -> usize {
        self.sums.len()
    }
}

/// A computed bound with its optimizer state.
#[derive(Debug, Clone)]
pub struct BoundResult {
    pub kind: BoundKind,
    /// Bits per channel use; +inf for a vacuous converse.
    pub rate_bpcu: f64,
    pub epsilon: f64,
    pub stderr_rate: f64,
    pub lambda_star: Option<f64>,
    pub log2_m_star: Option<f64>,
    pub n_p: Option<usize>,
    /// False when even M = 2 violates the error target (achievability) or
    /// the empirical CDF never clears epsilon (converse).
    pub feasible: bool,
}

impl BoundResult {
    pub fn aux(&self) -> Option<f64> {
        self.log2_m_star.or(self.lambda_star)
    }
}

/// Estimate of the dependence-testing error upper bound at codebook size M.
#[derive(Debug, Clone, Copy)]
pub struct DtErrorEstimate {
    pub epsilon_ub: f64,
    pub stderr: f64,
    /// True when M <= 1 made the threshold degenerate (ε_ub = 0).
    pub degenerate: bool,
}

/// ln((M-1)/2) from log2(M), stable for large M.
fn dt_threshold_nats(log2_m: f64) -> f64 {
    log2_m * std::f64::consts::LN_2 + (-(2f64).powf(-log2_m)).ln_1p()
        - std::f64::consts::LN_2
}

/// Sample mean of exp(-[T - ln((M-1)/2)]^+) over a fixed batch; exactly
/// nondecreasing in M on that batch.
pub fn dt_error(batch: &SampleBatch, log2_m: f64) -> DtErrorEstimate {
    if log2_m <= 0.0 {
        return DtErrorEstimate {
            epsilon_ub: 0.0,
            stderr: 0.0,
            degenerate: true,
        };
    }
    let tau = dt_threshold_nats(log2_m);
    let n = batch.sums.len() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &t in &batch.sums {
        let v = if t <= tau { 1.0 } else { (tau - t).exp() };
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / n;
    let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
    DtErrorEstimate {
        epsilon_ub: mean,
        stderr: (var / n).sqrt(),
        degenerate: false,
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(BoundsError::Usage(format!(
            "epsilon must be in (0,1), got {epsilon}"
        )));
    }
    Ok(())
}

/// Largest log2(M) with ε_ub(M) <= ε on the fixed batch, by bisection
/// (the reused batch makes ε_ub exactly monotone in M). `conservative`
/// applies the upper 95% confidence bound to ε_ub.
fn dt_search(batch: &SampleBatch, epsilon: f64, hi_cap: f64, conservative: bool) -> Option<f64> {
    let feasible = |log2_m: f64| {
        let est = dt_error(batch, log2_m);
        let val = if conservative {
            est.epsilon_ub + Z95 * est.stderr
        } else {
            est.epsilon_ub
        };
        val <= epsilon
    };
    if !feasible(1.0) {
        return None;
    }
    let mut lo = 1.0f64;
    let mut hi = hi_cap.max(2.0);
    if feasible(hi) {
        return Some(hi);
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Dependence-testing achievability: max rate with error target ε.
pub fn dt_max_rate(
    batch: &SampleBatch,
    epsilon: f64,
    n_c: usize,
    ell: usize,
    rho: f64,
) -> Result<BoundResult> {
    dt_rate_inner(batch, epsilon, n_c, ell, rho, BoundKind::Dt, None)
}

/// Pilot-assisted achievability; identical search, the rate denominator
/// stays n_c·ell so the pilot overhead is charged.
pub fn pilot_dt_max_rate(
    batch: &SampleBatch,
    epsilon: f64,
    n_c: usize,
    ell: usize,
    rho: f64,
    n_p: usize,
) -> Result<BoundResult> {
    dt_rate_inner(batch, epsilon, n_c, ell, rho, BoundKind::PilotDt, Some(n_p))
}

fn dt_rate_inner(
    batch: &SampleBatch,
    epsilon: f64,
    n_c: usize,
    ell: usize,
    rho: f64,
    kind: BoundKind,
    n_p: Option<usize>,
) -> Result<BoundResult> {
    check_epsilon(epsilon)?;
    let n = (n_c * ell) as f64;
    let hi_cap = n * (1.0 + rho).log2() + 64.0;
    let conservative = dt_search(batch, epsilon, hi_cap, true);
    let Some(log2_m) = conservative else {
        return Ok(BoundResult {
            kind,
            rate_bpcu: 0.0,
            epsilon,
            stderr_rate: 0.0,
            lambda_star: None,
            log2_m_star: Some(0.0),
            n_p,
            feasible: false,
        });
    };
    let central = dt_search(batch, epsilon, hi_cap, false).unwrap_or(log2_m);
    let rate = log2_m / n;
    Ok(BoundResult {
        kind,
        rate_bpcu: rate,
        epsilon,
        stderr_rate: ((central - log2_m) / n / Z95).max(0.0),
        lambda_star: None,
        log2_m_star: Some(log2_m),
        n_p,
        feasible: true,
    })
}

/// Min-max converse: inf over λ ≥ 0 of (λ − ln[Pr{T ≤ λ} − ε]^+)/(n ln 2).
///
/// On a fixed batch the empirical CDF is piecewise constant, so the
/// infimum is attained at an order statistic (or at λ = 0); the CDF gets a
/// lower-confidence adjustment to keep the reported bracket conservative.
pub fn converse_rate(
    batch: &SampleBatch,
    epsilon: f64,
    n_c: usize,
    ell: usize,
) -> Result<BoundResult> {
    check_epsilon(epsilon)?;
    let n_nats = (n_c * ell) as f64 * std::f64::consts::LN_2;
    let count = batch.sums.len() as f64;
    let mut sorted = batch.sums.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sums"));

    let objective = |lambda: f64, cdf: f64| -> f64 {
        if cdf > epsilon {
            (lambda - (cdf - epsilon).ln()) / n_nats
        } else {
            f64::INFINITY
        }
    };
    let lcb = |cdf: f64| -> f64 {
        (cdf - Z95 * (cdf * (1.0 - cdf) / count).sqrt()).max(0.0)
    };

    // candidate λ = 0 with the CDF just below the first positive sum
    let below_zero = sorted.partition_point(|&t| t <= 0.0);
    let mut best = (objective(0.0, lcb(below_zero as f64 / count)), 0.0);
    let mut best_central = objective(0.0, below_zero as f64 / count);
    for (i, &t) in sorted.iter().enumerate().skip(below_zero) {
        let cdf = (i + 1) as f64 / count;
        let cons = objective(t, lcb(cdf));
        if cons < best.0 {
            best = (cons, t);
        }
        let cent = objective(t, cdf);
        if cent < best_central {
            best_central = cent;
        }
    }

    let (rate, lambda_star) = best;
    let feasible = rate.is_finite();
    Ok(BoundResult {
        kind: BoundKind::Converse,
        rate_bpcu: rate,
        epsilon,
        stderr_rate: if feasible {
            ((rate - best_central) / Z95).max(0.0)
        } else {
            0.0
        },
        lambda_star: if feasible { Some(lambda_star) } else { None },
        log2_m_star: None,
        n_p: None,
        feasible,
    })
}

/// AWGN normal approximation: (C − √(V/n)·Q⁻¹(ε))/ln 2 bits per channel
/// use with C = ln(1+ρ) and V = ρ(2+ρ)/(1+ρ)², floored at zero.
pub fn normal_approx(rho: f64, n: usize, epsilon: f64) -> Result<BoundResult> {
    check_epsilon(epsilon)?;
    if !(rho > 0.0 && rho.is_finite()) || n == 0 {
        return Err(BoundsError::Usage(format!(
            "normal approximation needs rho > 0 and n >= 1, got rho={rho}, n={n}"
        )));
    }
    let capacity = (1.0 + rho).ln();
    let dispersion = rho * (2.0 + rho) / ((1.0 + rho) * (1.0 + rho));
    let qi = q_inv(epsilon).map_err(|e| BoundsError::Usage(e.to_string()))?;
    let rate = ((capacity - (dispersion / n as f64).sqrt() * qi) / std::f64::consts::LN_2)
        .max(0.0);
    Ok(BoundResult {
        kind: BoundKind::NormalApprox,
        rate_bpcu: rate,
        epsilon,
        stderr_rate: 0.0,
        lambda_star: None,
        log2_m_star: None,
        n_p: None,
        feasible: true,
    })
}

//! Channel and code parameterization.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("usage error: {0}")]
    Usage(String),
}

/// Largest accepted Rician factor; beyond this the scattered-component
/// variance drops below 1e-6 and the output-density integrand becomes
/// numerically singular.
pub const KAPPA_MAX: f64 = 1e6;

/// SISO Rician block-fading channel parameters.
///
/// The fading coefficient of each coherence block is CN(mu_h, sigma_h2)
/// with mu_h = sqrt(kappa/(1+kappa)) and sigma_h2 = 1/(1+kappa), so the
/// average channel gain is one. A codeword spans `ell` blocks of `n_c`
/// channel uses; per-block subcodewords carry energy `n_c * rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub kappa: f64,
    /// SNR, linear scale.
    pub rho: f64,
    /// Channel uses per coherence block.
    pub n_c: usize,
    /// Diversity branches (blocks per codeword).
    pub ell: usize,
    /// LOS mean sqrt(kappa/(1+kappa)).
    pub mu_h: f64,
    /// NLOS variance 1/(1+kappa).
    pub sigma_h2: f64,
}

impl ChannelParams {
    pub fn new(kappa: f64, rho: f64, n_c: usize, ell: usize) -> Result<Self, ModelError> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(ModelError::Usage(format!(
                "kappa must be finite and >= 0, got {kappa}"
            )));
        }
        if kappa > KAPPA_MAX {
            return Err(ModelError::Usage(format!(
                "kappa = {kappa} exceeds the supported maximum {KAPPA_MAX} \
                 (sigma_h^2 would be below 1e-6)"
            )));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(ModelError::Usage(format!("rho must be positive, got {rho}")));
        }
        if n_c < 2 {
            return Err(ModelError::Usage(format!(
                "n_c must be at least 2 (a length-1 shell code carries \
                 information only in phase), got {n_c}"
            )));
        }
        if ell < 1 {
            return Err(ModelError::Usage("ell must be at least 1".into()));
        }
        Ok(ChannelParams {
            kappa,
            rho,
            n_c,
            ell,
            mu_h: (kappa / (1.0 + kappa)).sqrt(),
            sigma_h2: 1.0 / (1.0 + kappa),
        })
    }

    /// Total blocklength n = n_c * ell.
    pub fn n_total(&self) -> usize {
        self.n_c * self.ell
    }
}

/// Builds parameters from a total blocklength and a divisor count of
/// diversity branches, with the SNR given in dB.
pub fn derive_params(
    kappa: f64,
    rho_db: f64,
    n_total: usize,
    ell: usize,
) -> Result<ChannelParams, ModelError> {
    if !rho_db.is_finite() {
        return Err(ModelError::Usage(format!("rho_db must be finite, got {rho_db}")));
    }
    if ell == 0 || !n_total.is_multiple_of(ell) {
        return Err(ModelError::Usage(format!(
            "ell = {ell} does not divide n = {n_total}; valid divisors: {:?}",
            valid_ell_values(n_total)
        )));
    }
    let rho = 10f64.powf(rho_db / 10.0);
    ChannelParams::new(kappa, rho, n_total / ell, ell)
}

/// Divisors of `n_total` usable as diversity-branch counts (n_c >= 2).
pub fn valid_ell_values(n_total: usize) -> Vec<usize> {
    (1..=n_total)
        .filter(|ell| n_total.is_multiple_of(*ell) && n_total / ell >= 2)
        .collect()
}

/// Pilot configuration: `n_p` known symbols per coherence block, leaving
/// `n_d = n_c - n_p` for data. The per-block ML channel estimate has
/// error variance 1/(n_p * rho).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotConfig {
    pub n_p: usize,
    pub n_d: usize,
}

impl PilotConfig {
    /// `n_p = 0` selects the noncoherent path; otherwise at least two data
    /// dimensions must remain in the block.
    pub fn new(n_p: usize, n_c: usize) -> Result<Self, ModelError> {
        if n_p > 0 && n_p + 2 > n_c {
            return Err(ModelError::Usage(format!(
                "n_p = {n_p} leaves fewer than two data symbols in a block \
                 of n_c = {n_c}"
            )));
        }
        Ok(PilotConfig {
            n_p,
            n_d: n_c - n_p,
        })
    }

    /// Channel-estimation error variance; only defined for n_p >= 1.
    pub fn sigma_e2(&self, rho: f64) -> Result<f64, ModelError> {
        if self.n_p == 0 {
            return Err(ModelError::Usage(
                "sigma_e^2 is undefined in noncoherent mode (n_p = 0)".into(),
            ));
        }
        Ok(1.0 / (self.n_p as f64 * rho))
    }
}

/// Codebook size and target average error probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeSpec {
    pub log2_m: f64,
    pub epsilon: f64,
}

impl CodeSpec {
    pub fn new(log2_m: f64, epsilon: f64) -> Result<Self, ModelError> {
        if !(log2_m > 0.0 && log2_m.is_finite()) {
            return Err(ModelError::Usage(format!(
                "log2(M) must be positive, got {log2_m}"
            )));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ModelError::Usage(format!(
                "epsilon must be in (0,1), got {epsilon}"
            )));
        }
        Ok(CodeSpec { log2_m, epsilon })
    }

    /// Rate in bits per channel use over `ell` blocks of `n_c` uses.
    pub fn rate_bpcu(&self, n_c: usize, ell: usize) -> f64 {
        self.log2_m / (n_c as f64 * ell as f64)
    }
}

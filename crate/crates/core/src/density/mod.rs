//! Shell-code-induced output density and Monte-Carlo sampling of the
//! per-block information density, in noncoherent and pilot-conditioned
//! variants.

mod cheb;
mod samplers;

pub use samplers::{BlockSampler, NoncoherentSampler, PilotSampler};

use crate::model::{ChannelParams, PilotConfig};
use crate::numerics::{
    integrate_halfline_log, ln_factorial, log_bessel_i, LogValue, NumericsError, QuadratureSpec,
};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum DensityError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, DensityError>;

/// Arguments of the half-line integral G(p, a, b, ν) =
/// ∫ e^{-pz} (az)^{-ν/2} I_0(2√(bz)) I_ν(2√(az)) dz.
///
/// For the output density: p = ρ n_c + σ⁻², a = ‖y‖² ρ n_c, b = |μ|²/σ⁴,
/// ν = n_c − 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GIntegralArgs {
    pub p: f64,
    pub a: f64,
    pub b: f64,
    pub nu: u32,
}

impl GIntegralArgs {
    pub fn new(p: f64, a: f64, b: f64, nu: u32) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) || !(a >= 0.0 && a.is_finite()) || !(b >= 0.0 && b.is_finite())
        {
            return Err(DensityError::Usage(format!(
                "G integral requires p > 0, a >= 0, b >= 0, all finite; \
                 got p={p}, a={a}, b={b}"
            )));
        }
        if nu < 1 {
            return Err(DensityError::Usage(
                "G integral requires nu >= 1 (coherence blocks of n_c >= 2)".into(),
            ));
        }
        Ok(GIntegralArgs { p, a, b, nu })
    }
}

/// ln[(az)^{-ν/2} I_ν(2√(az))] with the removable az → 0 limit 1/Γ(ν+1).
fn ln_scaled_bessel_ratio(nu: u32, az: f64) -> std::result::Result<f64, NumericsError> {
    if az < 1e-12 {
        return Ok(-ln_factorial(nu as usize) + (az / (nu as f64 + 1.0)).ln_1p());
    }
    Ok(log_bessel_i(nu, 2.0 * az.sqrt())? - 0.5 * nu as f64 * az.ln())
}

/// Laplace-approximation stationary point of the integrand's log, used as
/// a mode-bracket hint.
fn laplace_bracket(args: &GIntegralArgs) -> (f64, f64) {
    let s_lin = args.a.sqrt() + args.b.sqrt();
    let disc = s_lin * s_lin - 2.0 * args.p * args.nu as f64;
    if disc > 0.0 {
        let s = (s_lin + disc.sqrt()) / (2.0 * args.p);
        let z = s * s;
        (z / 8.0, 4.0 * z + 1e-3)
    } else {
        (0.0, 2.0 / args.p)
    }
}

/// log G via adaptive half-line quadrature with every factor in log domain.
pub fn log_g(args: &GIntegralArgs, spec: &QuadratureSpec) -> Result<LogValue> {
    // closed form as the data argument vanishes:
    // G -> e^{b/p} / (p Γ(ν+1))
    if args.a < 1e-280 {
        return Ok(LogValue::from_ln(
            args.b / args.p - args.p.ln() - ln_factorial(args.nu as usize),
        ));
    }
    let (lo, hi) = laplace_bracket(args);
    let quad_spec = QuadratureSpec {
        mode_bracket: (lo, hi),
        ..spec.clone()
    };
    let GIntegralArgs { p, a, b, nu } = *args;
    let mut failure: Option<NumericsError> = None;
    let value = integrate_halfline_log(
        |z| {
            let mut l = -p * z;
            match ln_scaled_bessel_ratio(nu, a * z) {
                Ok(v) => l += v,
                Err(e) => {
                    failure.get_or_insert(e);
                    return f64::NEG_INFINITY;
                }
            }
            if b > 0.0 {
                match log_bessel_i(0, 2.0 * (b * z).sqrt()) {
                    Ok(v) => l += v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        return f64::NEG_INFINITY;
                    }
                }
            }
            l
        },
        &quad_spec,
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(LogValue::from_ln(value))
}

/// log of the output pdf induced by a per-block shell code, evaluated at
/// squared output norm `y_norm2` (the density depends on y only through
/// ‖y‖², which realizes its unitary invariance structurally).
pub fn log_output_pdf(
    y_norm2: f64,
    params: &ChannelParams,
    spec: &QuadratureSpec,
) -> Result<LogValue> {
    if !(y_norm2 >= 0.0 && y_norm2.is_finite()) {
        return Err(DensityError::Usage(format!(
            "y_norm2 must be finite and nonnegative, got {y_norm2}"
        )));
    }
    let law = EffectiveBlockLaw::noncoherent(params);
    Ok(LogValue::from_ln(law.ln_output_pdf(y_norm2, spec)?))
}

/// One realization of the per-block information density, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoDensitySample {
    pub value: f64,
}

/// Per-block channel law after reducing to a single coherence block:
/// fading mean magnitude `mu_abs`, scattered variance `sigma2`, block
/// length `n_blk`, SNR `rho`. Covers both the plain channel
/// (μ_H, σ_H², n_c) and the pilot posterior (|μ_p|, σ_p², n_d).
#[derive(Debug, Clone, Copy)]
pub struct EffectiveBlockLaw {
    pub mu_abs: f64,
    pub sigma2: f64,
    pub n_blk: usize,
    pub rho: f64,
}

impl EffectiveBlockLaw {
    pub fn noncoherent(params: &ChannelParams) -> Self {
        EffectiveBlockLaw {
            mu_abs: params.mu_h,
            sigma2: params.sigma_h2,
            n_blk: params.n_c,
            rho: params.rho,
        }
    }

    /// Exponential rate of the G integrand: ρ n + σ⁻².
    pub fn p(&self) -> f64 {
        self.rho * self.n_blk as f64 + 1.0 / self.sigma2
    }

    /// LOS Bessel argument scale |μ|²/σ⁴.
    pub fn b(&self) -> f64 {
        self.mu_abs * self.mu_abs / (self.sigma2 * self.sigma2)
    }

    /// Variance of the first (signal-direction) output coordinate.
    pub fn c2(&self) -> f64 {
        self.sigma2 * self.n_blk as f64 * self.rho + 1.0
    }

    pub fn nu(&self) -> u32 {
        (self.n_blk - 1) as u32
    }

    /// ln f_Y at squared norm t.
    fn ln_output_pdf(&self, t: f64, spec: &QuadratureSpec) -> Result<f64> {
        let args = GIntegralArgs::new(self.p(), t * self.rho * self.n_blk as f64, self.b(), self.nu())?;
        let lg = log_g(&args, spec)?;
        let mu2 = self.mu_abs * self.mu_abs;
        Ok(ln_factorial(self.n_blk - 1) - self.sigma2.ln()
            - self.n_blk as f64 * std::f64::consts::PI.ln()
            - t
            - mu2 / self.sigma2
            + lg.ln())
    }

    /// Constant part of the information density:
    /// |μ|²/σ² + ln σ² − ln c² − ln Γ(n).
    pub fn affine_term(&self) -> f64 {
        self.mu_abs * self.mu_abs / self.sigma2 + self.sigma2.ln() - self.c2().ln()
            - ln_factorial(self.n_blk - 1)
    }

    /// The deterministic map (‖W‖², ‖W̃‖²) → S: the information density of
    /// the block given the squared noise norm and the squared norm of the
    /// induced output.
    pub fn s_from_norms(&self, w_norm2: f64, wt_norm2: f64, spec: &QuadratureSpec) -> Result<f64> {
        let args = GIntegralArgs::new(
            self.p(),
            wt_norm2 * self.rho * self.n_blk as f64,
            self.b(),
            self.nu(),
        )?;
        let lg = log_g(&args, spec)?;
        Ok(self.affine_term() + wt_norm2 - w_norm2 - lg.ln())
    }

    /// ‖W‖² and ‖W̃‖² from a block noise vector, where
    /// W̃ = [μ√(nρ) + √(σ²nρ+1)·W₁; W₂ … W_n] is the induced output when
    /// the first unit vector is transmitted.
    pub fn norms_from_noise(&self, noise: &[Complex64]) -> Result<(f64, f64)> {
        if noise.len() != self.n_blk {
            return Err(DensityError::Usage(format!(
                "noise vector has {} entries, block needs {}",
                noise.len(),
                self.n_blk
            )));
        }
        let w_norm2: f64 = noise.iter().map(|w| w.norm_sqr()).sum();
        let wt1 = Complex64::new(
            self.mu_abs * (self.n_blk as f64 * self.rho).sqrt(),
            0.0,
        ) + self.c2().sqrt() * noise[0];
        let tail: f64 = noise[1..].iter().map(|w| w.norm_sqr()).sum();
        Ok((w_norm2, wt1.norm_sqr() + tail))
    }
}

/// One draw of the per-block information density of the noncoherent
/// shell-code scheme; deterministic given the injected noise.
pub fn sample_info_density(
    params: &ChannelParams,
    noise: &[Complex64],
    spec: &QuadratureSpec,
) -> Result<InfoDensitySample> {
    let law = EffectiveBlockLaw::noncoherent(params);
    let (w_norm2, wt_norm2) = law.norms_from_noise(noise)?;
    Ok(InfoDensitySample {
        value: law.s_from_norms(w_norm2, wt_norm2, spec)?,
    })
}

/// Posterior per-block fading law given a channel estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotPosterior {
    pub mu_p: Complex64,
    pub sigma_p2: f64,
    pub n_d: usize,
}

/// Posterior LOS mean and variance of the fading coefficient given the
/// per-block ML estimate `h_hat`, plus the data dimension.
pub fn pilot_effective_params(
    h_hat: Complex64,
    params: &ChannelParams,
    pilots: &PilotConfig,
) -> Result<PilotPosterior> {
    let sigma_e2 = pilots
        .sigma_e2(params.rho)
        .map_err(|e| DensityError::Usage(e.to_string()))?;
    let s2 = params.sigma_h2;
    let denom = s2 + sigma_e2;
    Ok(PilotPosterior {
        mu_p: (s2 * h_hat + sigma_e2 * params.mu_h) / denom,
        sigma_p2: s2 * sigma_e2 / denom,
        n_d: pilots.n_d,
    })
}

impl PilotPosterior {
    /// The Rician block law of the data symbols given the estimate; the
    /// complex posterior mean enters only through its magnitude.
    pub fn block_law(&self, rho: f64) -> EffectiveBlockLaw {
        EffectiveBlockLaw {
            mu_abs: self.mu_p.norm(),
            sigma2: self.sigma_p2,
            n_blk: self.n_d,
            rho,
        }
    }
}

/// One draw of the pilot-conditioned information density: the estimate is
/// formed from `estimate_draw` (a CN(0,1) variate), and the data block is
/// then sampled exactly like the noncoherent case with (n_d, μ_p, σ_p²)
/// in place of (n_c, μ_H, σ_H²).
pub fn sample_pilot_info_density(
    params: &ChannelParams,
    pilots: &PilotConfig,
    estimate_draw: Complex64,
    noise: &[Complex64],
    spec: &QuadratureSpec,
) -> Result<InfoDensitySample> {
    if pilots.n_p == 0 {
        return Err(DensityError::Usage(
            "n_p = 0 is the noncoherent path; use sample_info_density".into(),
        ));
    }
    if pilots.n_d < 2 {
        return Err(DensityError::Usage(format!(
            "pilot sampling needs n_d >= 2, got {}",
            pilots.n_d
        )));
    }
    let sigma_e2 = pilots
        .sigma_e2(params.rho)
        .map_err(|e| DensityError::Usage(e.to_string()))?;
    // marginal law of the estimate: CN(mu_h, sigma_h2 + sigma_e2)
    let h_hat = params.mu_h + (params.sigma_h2 + sigma_e2).sqrt() * estimate_draw;
    let posterior = pilot_effective_params(h_hat, params, pilots)?;
    let law = posterior.block_law(params.rho);
    let (w_norm2, wt_norm2) = law.norms_from_noise(noise)?;
    Ok(InfoDensitySample {
        value: law.s_from_norms(w_norm2, wt_norm2, spec)?,
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const QUAD: fn() -> QuadratureSpec = QuadratureSpec::default;

    #[test]
    fn log_g_incomplete_gamma_identity() {
        // b = 0, p = a = 1, nu = 1: G = e·P(1,1) = e - 1
        let args = GIntegralArgs::new(1.0, 1.0, 0.0, 1).unwrap();
        let v = log_g(&args, &QUAD()).unwrap().ln();
        assert!((v - 0.54132485461291811).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn log_g_vanishing_a_series_limit() {
        // a -> 0+, p=1, nu=2: G -> 1/Γ(3)
        let args = GIntegralArgs::new(1.0, 1e-12, 0.0, 2).unwrap();
        let v = log_g(&args, &QUAD()).unwrap().ln();
        assert!((v - (-0.69314718055961198)).abs() < 1e-9, "got {v}");
        // exactly zero takes the closed form
        let args0 = GIntegralArgs::new(3.0, 0.0, 0.0, 1).unwrap();
        let v0 = log_g(&args0, &QUAD()).unwrap().ln();
        assert!((v0 + 3.0f64.ln()).abs() < 1e-12, "got {v0}");
    }

    #[test]
    fn log_g_double_series_anchor() {
        // 40-digit double-series oracle values
        for (p, a, b, nu, expect) in [
            (2.0, 3.0, 1.5, 4u32, -2.5202970778672283),
            (6.5, 30.0, 2.0, 2, 0.68617665024056192),
            (13.0, 55.0, 110.0, 11, -7.7431988644177337),
            (337.4, 1.2e5, 0.0, 83, -137.70049428345438),
        ] {
            let args = GIntegralArgs::new(p, a, b, nu).unwrap();
            let v = log_g(&args, &QUAD()).unwrap().ln();
            assert!(
                ((v - expect) / expect).abs() < 1e-8,
                "G({p},{a},{b},{nu}): got {v}, expect {expect}"
            );
        }
    }

    #[test]
    fn output_pdf_anchors() {
        let p0 = ChannelParams::new(0.0, 1.0, 2, 1).unwrap();
        let v = log_output_pdf(2.0, &p0, &QUAD()).unwrap().ln();
        assert!((v - (-4.6483987427985337)).abs() < 1e-9, "got {v}");

        let p1 = ChannelParams::new(1.0, 1.5, 3, 1).unwrap();
        let v = log_output_pdf(4.0, &p1, &QUAD()).unwrap().ln();
        assert!((v - (-7.7492326189226397)).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn info_density_anchors() {
        let noise = [c(0.3, 0.4), c(-0.2, 0.1)];
        let p0 = ChannelParams::new(0.0, 1.0, 2, 1).unwrap();
        let s = sample_info_density(&p0, &noise, &QUAD()).unwrap().value;
        assert!((s - 0.22150944859166129).abs() < 1e-9, "got {s}");

        let p1 = ChannelParams::new(1.0, 1.0, 2, 1).unwrap();
        let s = sample_info_density(&p1, &noise, &QUAD()).unwrap().value;
        assert!((s - 1.6035117827071668).abs() < 1e-9, "got {s}");

        let noise3 = [c(0.1, -0.7), c(0.5, 0.2), c(-0.3, 0.9)];
        let p10 = ChannelParams::new(10.0, 3.981071705534972, 3, 1).unwrap();
        let s = sample_info_density(&p10, &noise3, &QUAD()).unwrap().value;
        assert!((s - 5.0377150392021799).abs() < 1e-9, "got {s}");
    }

    #[test]
    fn all_zero_noise_value() {
        // kappa=0, n_c=2, rho=1, W=0: ||W||^2 = ||W~||^2 = 0 and
        // S = -ln3 - lnΓ(2) - logG(3,0,0,1) = -ln3 + ln3 = 0
        let p0 = ChannelParams::new(0.0, 1.0, 2, 1).unwrap();
        let s = sample_info_density(&p0, &[c(0.0, 0.0), c(0.0, 0.0)], &QUAD())
            .unwrap()
            .value;
        assert!(s.abs() < 1e-12, "got {s}");
    }

    #[test]
    fn wrong_noise_length_is_usage_error() {
        let p0 = ChannelParams::new(0.0, 1.0, 2, 1).unwrap();
        assert!(matches!(
            sample_info_density(&p0, &[c(0.0, 0.0)], &QUAD()),
            Err(DensityError::Usage(_))
        ));
    }

    #[test]
    fn pilot_posterior_values() {
        // kappa=0, rho=1, n_p=1, hhat=1: sigma_e2=1, mu_p=1/2, sigma_p2=1/2
        let params = ChannelParams::new(0.0, 1.0, 4, 1).unwrap();
        let pilots = PilotConfig::new(1, 4).unwrap();
        let post = pilot_effective_params(c(1.0, 0.0), &params, &pilots).unwrap();
        assert!((post.mu_p - c(0.5, 0.0)).norm() < 1e-15);
        assert!((post.sigma_p2 - 0.5).abs() < 1e-15);
        assert_eq!(post.n_d, 3);
    }

    #[test]
    fn pilot_posterior_limits() {
        let params = ChannelParams::new(4.0, 1.0, 8, 1).unwrap();
        // near-perfect estimation: huge n_p·rho via big rho
        let sharp = ChannelParams::new(4.0, 1e9, 8, 1).unwrap();
        let pilots = PilotConfig::new(2, 8).unwrap();
        let h = c(0.3, -0.8);
        let post = pilot_effective_params(h, &sharp, &pilots).unwrap();
        assert!((post.mu_p - h).norm() < 1e-8);
        assert!(post.sigma_p2 < 1e-9);
        // uninformative estimate: rho -> 0
        let blunt = ChannelParams::new(4.0, 1e-9, 8, 1).unwrap();
        let post = pilot_effective_params(h, &blunt, &pilots).unwrap();
        assert!((post.mu_p.re - params.mu_h).abs() < 1e-8);
        assert!(post.mu_p.im.abs() < 1e-8);
        assert!((post.sigma_p2 - params.sigma_h2).abs() < 1e-8);
        // posterior variance below both prior and estimation variance
        let mid = pilot_effective_params(h, &params, &pilots).unwrap();
        let sigma_e2 = pilots.sigma_e2(params.rho).unwrap();
        assert!(mid.sigma_p2 < params.sigma_h2.min(sigma_e2));
    }

    #[test]
    fn pilot_anchor_value() {
        // kappa=0, n_p=1, n_c=4, rho=1, fixed estimate and noise draws;
        // oracle is a straight-line 40-digit reimplementation
        let params = ChannelParams::new(0.0, 1.0, 4, 1).unwrap();
        let pilots = PilotConfig::new(1, 4).unwrap();
        // estimate_draw such that h_hat = (0.8, -0.6): h_hat = sqrt(2) * z
        let z = c(0.8, -0.6) / 2.0f64.sqrt();
        let noise = [c(0.4, 0.1), c(-0.5, 0.3), c(0.2, -0.2)];
        let s = sample_pilot_info_density(&params, &pilots, z, &noise, &QUAD())
            .unwrap()
            .value;
        assert!((s - 1.6493795421072604).abs() < 1e-9, "got {s}");
    }

    #[test]
    fn pilot_rejects_noncoherent_mode() {
        let params = ChannelParams::new(0.0, 1.0, 4, 1).unwrap();
        let pilots = PilotConfig::new(0, 4).unwrap();
        assert!(matches!(
            sample_pilot_info_density(&params, &pilots, c(0.0, 0.0), &[], &QUAD()),
            Err(DensityError::Usage(_))
        ));
    }
}

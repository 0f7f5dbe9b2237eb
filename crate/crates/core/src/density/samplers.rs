//! Per-parameter-point samplers for batch generation. The per-block
//! integral depends on a draw only through ‖W̃‖² (and, with pilots, the
//! posterior mean magnitude), so each sampler precomputes a Chebyshev
//! table of log G over the reachable range and falls back to direct
//! quadrature for draws outside it.

use super::cheb::{Cheb1d, Cheb2d};
use super::{log_g, DensityError, EffectiveBlockLaw, GIntegralArgs, Result};
use crate::model::{ChannelParams, PilotConfig};
use crate::numerics::QuadratureSpec;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

const TABLE_PIECES_1D: usize = 48;
const TABLE_DEGREE_1D: usize = 12;
const TABLE_PIECES_U: usize = 12;
const TABLE_DEGREE_U: usize = 10;
const TABLE_PIECES_V: usize = 6;
const TABLE_DEGREE_V: usize = 8;

fn draw_cn(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Upper bound on ‖W̃‖² that a batch will essentially never exceed
/// (per-draw excess probability below ~1e-17; excursions take the
/// quadrature fallback).
fn wt_norm2_bound(law: &EffectiveBlockLaw, mu_max: f64) -> f64 {
    let n = law.n_blk as f64;
    let first = {
        let m = mu_max * (n * law.rho).sqrt();
        let s = law.c2().sqrt();
        (m + 9.0 * s) * (m + 9.0 * s)
    };
    first + (n - 1.0) + 9.0 * (n - 1.0).sqrt() + 60.0
}

/// Noncoherent per-block sampler: 1-D table of log G over u = √a.
pub struct NoncoherentSampler {
    law: EffectiveBlockLaw,
    table: Cheb1d,
    quad: QuadratureSpec,
    affine: f64,
}

impl NoncoherentSampler {
    pub fn new(params: &ChannelParams, quad: &QuadratureSpec) -> Result<Self> {
        let law = EffectiveBlockLaw::noncoherent(params);
        let u_max = (wt_norm2_bound(&law, law.mu_abs) * law.rho * law.n_blk as f64).sqrt();
        let (p, b, nu) = (law.p(), law.b(), law.nu());
        let table = Cheb1d::fit(0.0, u_max, TABLE_PIECES_1D, TABLE_DEGREE_1D, |u| {
            log_g(&GIntegralArgs::new(p, u * u, b, nu)?, quad).map(|v| v.ln())
        })?;
        Ok(NoncoherentSampler {
            law,
            table,
            quad: quad.clone(),
            affine: law.affine_term(),
        })
    }

    pub fn law(&self) -> &EffectiveBlockLaw {
        &self.law
    }

    /// S from the squared norms, via the table where possible.
    pub fn s_from_norms(&self, w_norm2: f64, wt_norm2: f64) -> Result<f64> {
        let a = wt_norm2 * self.law.rho * self.law.n_blk as f64;
        if let Some(lg) = self.table.eval(a.sqrt()) {
            Ok(self.affine + wt_norm2 - w_norm2 - lg)
        } else {
            self.law.s_from_norms(w_norm2, wt_norm2, &self.quad)
        }
    }

    pub fn draw_block(&self, rng: &mut impl Rng) -> Result<f64> {
        let w1 = draw_cn(rng);
        let mut tail = 0.0;
        for _ in 1..self.law.n_blk {
            tail += draw_cn(rng).norm_sqr();
        }
        let w_norm2 = w1.norm_sqr() + tail;
        let wt1 = Complex64::new(
            self.law.mu_abs * (self.law.n_blk as f64 * self.law.rho).sqrt(),
            0.0,
        ) + self.law.c2().sqrt() * w1;
        self.s_from_norms(w_norm2, wt1.norm_sqr() + tail)
    }
}

/// Pilot-conditioned per-block sampler: the posterior variance is fixed,
/// the posterior mean varies with the estimate, so the table is 2-D over
/// (u = √a, v = |μ_p|).
pub struct PilotSampler {
    sigma_p2: f64,
    n_d: usize,
    rho: f64,
    mu_h: f64,
    est_std: f64,
    post_coef: f64,
    table: Cheb2d,
    quad: QuadratureSpec,
}

impl PilotSampler {
    pub fn new(params: &ChannelParams, pilots: &PilotConfig, quad: &QuadratureSpec) -> Result<Self> {
        if pilots.n_p == 0 {
            return Err(DensityError::Usage(
                "n_p = 0 is the noncoherent path; use NoncoherentSampler".into(),
            ));
        }
        if pilots.n_d < 2 {
            return Err(DensityError::Usage(format!(
                "pilot sampler needs n_d >= 2, got {}",
                pilots.n_d
            )));
        }
        let sigma_e2 = pilots
            .sigma_e2(params.rho)
            .map_err(|e| DensityError::Usage(e.to_string()))?;
        let s2 = params.sigma_h2;
        let sigma_p2 = s2 * sigma_e2 / (s2 + sigma_e2);
        // mu_p ~ CN(mu_h, s2^2/(s2 + sigma_e2)) under the estimate marginal
        let mu_p_std = (s2 * s2 / (s2 + sigma_e2)).sqrt();
        let v_max = params.mu_h + 9.0 * mu_p_std;
        let probe = EffectiveBlockLaw {
            mu_abs: v_max,
            sigma2: sigma_p2,
            n_blk: pilots.n_d,
            rho: params.rho,
        };
        let u_max = (wt_norm2_bound(&probe, v_max) * params.rho * pilots.n_d as f64).sqrt();
        let (p, nu) = (probe.p(), probe.nu());
        let s4 = sigma_p2 * sigma_p2;
        let table = Cheb2d::fit(
            (0.0, u_max, TABLE_PIECES_U, TABLE_DEGREE_U),
            (0.0, v_max, TABLE_PIECES_V, TABLE_DEGREE_V),
            |u, v| {
                log_g(&GIntegralArgs::new(p, u * u, v * v / s4, nu)?, quad).map(|lv| lv.ln())
            },
        )?;
        Ok(PilotSampler {
            sigma_p2,
            n_d: pilots.n_d,
            rho: params.rho,
            mu_h: params.mu_h,
            est_std: (s2 + sigma_e2).sqrt(),
            post_coef: s2 / (s2 + sigma_e2),
            table,
            quad: quad.clone(),
        })
    }

    fn law_for(&self, mu_abs: f64) -> EffectiveBlockLaw {
        EffectiveBlockLaw {
            mu_abs,
            sigma2: self.sigma_p2,
            n_blk: self.n_d,
            rho: self.rho,
        }
    }

    pub fn s_from_norms(&self, mu_abs: f64, w_norm2: f64, wt_norm2: f64) -> Result<f64> {
        let law = self.law_for(mu_abs);
        let a = wt_norm2 * self.rho * self.n_d as f64;
        if let Some(lg) = self.table.eval(a.sqrt(), mu_abs) {
            Ok(law.affine_term() + wt_norm2 - w_norm2 - lg)
        } else {
            law.s_from_norms(w_norm2, wt_norm2, &self.quad)
        }
    }

    pub fn draw_block(&self, rng: &mut impl Rng) -> Result<f64> {
        // estimate marginal: h_hat = mu_h + est_std * z with z ~ CN(0,1);
        // posterior mean mu_p = mu_h + post_coef * est_std * z
        let z = draw_cn(rng);
        let mu_p = Complex64::new(self.mu_h, 0.0) + self.post_coef * self.est_std * z;
        let mu_abs = mu_p.norm();
        let law = self.law_for(mu_abs);
        let w1 = draw_cn(rng);
        let mut tail = 0.0;
        for _ in 1..self.n_d {
            tail += draw_cn(rng).norm_sqr();
        }
        let w_norm2 = w1.norm_sqr() + tail;
        let wt1 = Complex64::new(mu_abs * (self.n_d as f64 * self.rho).sqrt(), 0.0)
            + law.c2().sqrt() * w1;
        self.s_from_norms(mu_abs, w_norm2, wt1.norm_sqr() + tail)
    }
}

/// Per-block sampler for one parameter point; `n_p = 0` takes the
/// noncoherent path so the pilot bound coincides with it draw-for-draw.
pub enum BlockSampler {
    Noncoherent(NoncoherentSampler),
    Pilot(PilotSampler),
}

impl BlockSampler {
    pub fn new(params: &ChannelParams, n_p: usize, quad: &QuadratureSpec) -> Result<Self> {
        if n_p == 0 {
            Ok(BlockSampler::Noncoherent(NoncoherentSampler::new(params, quad)?))
        } else {
            let pilots = PilotConfig::new(n_p, params.n_c)
                .map_err(|e| DensityError::Usage(e.to_string()))?;
            Ok(BlockSampler::Pilot(PilotSampler::new(params, &pilots, quad)?))
        }
    }

    pub fn draw_block(&self, rng: &mut impl Rng) -> Result<f64> {
        match self {
            BlockSampler::Noncoherent(s) => s.draw_block(rng),
            BlockSampler::Pilot(s) => s.draw_block(rng),
        }
    }

    /// One codeword draw: the sum of `ell` independent block densities.
    pub fn draw_codeword_sum(&self, rng: &mut impl Rng, ell: usize) -> Result<f64> {
        let mut total = 0.0;
        for _ in 0..ell {
            total += self.draw_block(rng)?;
        }
        Ok(total)
    }
}

//! Normalization of the shell-code output density on the 24-point grid.
//!
//! The density is isotropic, so its total mass reduces to a radial
//! integral, checked deterministically at every grid point:
//!   pi^n / Gamma(n) * \int_0^inf f_Y(t) t^{n-1} dt = 1.
//! The Monte-Carlo form with a spherical Gaussian reference is also run
//! where that reference is usable; its importance weights carry a
//! (1/c^2)^{n_c-1} volume mismatch that stops converging beyond the
//! smallest blocks, so it is limited to n_c = 2.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rician_fbl::density::{log_output_pdf, NoncoherentSampler};
use rician_fbl::model::ChannelParams;
use rician_fbl::numerics::{integrate_halfline_log, ln_factorial, QuadratureSpec};

const RHO_6DB: f64 = 3.981071705534972;

#[test]
fn radial_quadrature_normalization_on_the_grid() {
    let inner = QuadratureSpec::default();
    for &kappa in &[0.0, 1.0, 10.0, 1000.0] {
        for &n_c in &[2usize, 12, 84] {
            for &rho in &[1.0, RHO_6DB] {
                let params = ChannelParams::new(kappa, rho, n_c, 1).unwrap();
                let scale = n_c as f64 * (1.0 + rho);
                let outer = QuadratureSpec {
                    rel_tol: 1e-10,
                    mode_bracket: (0.3 * scale, 3.0 * scale),
                    ..Default::default()
                };
                let ln_mass = integrate_halfline_log(
                    |t| {
                        log_output_pdf(t, &params, &inner)
                            .map(|v| v.ln() + (n_c as f64 - 1.0) * t.ln())
                            .unwrap_or(f64::NEG_INFINITY)
                    },
                    &outer,
                )
                .unwrap()
                    + n_c as f64 * std::f64::consts::PI.ln()
                    - ln_factorial(n_c - 1);
                assert!(
                    ln_mass.abs() < 1e-7,
                    "kappa={kappa} n_c={n_c} rho={rho}: ln total mass {ln_mass:.3e}"
                );
            }
        }
    }
}

fn draw_cn(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

#[test]
fn spherical_importance_normalization_where_viable() {
    let quad = QuadratureSpec::default();
    let n_samples = 50_000;
    for &kappa in &[0.0, 1.0, 10.0, 1000.0] {
        let n_c = 2usize;
        {
            for &rho in &[1.0, RHO_6DB] {
                let params = ChannelParams::new(kappa, rho, n_c, 1).unwrap();
                let sampler = NoncoherentSampler::new(&params, &quad).unwrap();
                let law = *sampler.law();
                let s_g2 = law.c2();
                let mean1 = law.mu_abs * (n_c as f64 * rho).sqrt();
                let mut rng =
                    ChaCha8Rng::seed_from_u64(0xD00D + n_c as u64 * 31 + kappa as u64);
                let mut sum = 0.0;
                let mut sum_sq = 0.0;
                for _ in 0..n_samples {
                    let y: Vec<Complex64> =
                        (0..n_c).map(|_| s_g2.sqrt() * draw_cn(&mut rng)).collect();
                    let y_norm2: f64 = y.iter().map(|v| v.norm_sqr()).sum();
                    let d1 = y[0] - Complex64::new(mean1, 0.0);
                    let w_norm2 = d1.norm_sqr() / law.c2()
                        + y[1..].iter().map(|v| v.norm_sqr()).sum::<f64>();
                    // ln f_Y = ln f_{Y|U} - S
                    let s = sampler.s_from_norms(w_norm2, y_norm2).unwrap();
                    let ln_f_y = -(n_c as f64) * std::f64::consts::PI.ln() - law.c2().ln()
                        - w_norm2
                        - s;
                    let ln_g = -(n_c as f64) * (std::f64::consts::PI * s_g2).ln()
                        - y_norm2 / s_g2;
                    let w = (ln_f_y - ln_g).exp();
                    sum += w;
                    sum_sq += w * w;
                }
                let n = n_samples as f64;
                let mean = sum / n;
                let se = (((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0) / n).sqrt();
                assert!(
                    (mean - 1.0).abs() <= 4.0 * se,
                    "kappa={kappa} n_c={n_c} rho={rho}: integral {mean:.5} +- {se:.5}"
                );
            }
        }
    }
}

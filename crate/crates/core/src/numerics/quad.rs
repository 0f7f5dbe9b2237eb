//! Adaptive quadrature of unimodal log-integrands on the half-line, with
//! all accumulation in log domain.

use super::{lse2, NumericsError, Result};

/// Controls for [`integrate_halfline_log`].
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    /// Relative tolerance on the integral (equivalently, absolute on its log).
    pub rel_tol: f64,
    /// Budget of Gauss–Kronrod panel evaluations.
    pub max_panels: usize,
    /// Initial bracket believed to delimit the integrand peak; expanded
    /// automatically if the peak lies outside.
    pub mode_bracket: (f64, f64),
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            max_panels: 1 << 15,
            mode_bracket: (0.0, 1.0),
        }
    }
}

impl QuadratureSpec {
    pub fn with_bracket(lo: f64, hi: f64) -> Self {
        QuadratureSpec {
            mode_bracket: (lo, hi),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(NumericsError::Usage(format!(
                "quadrature tolerance must be in (0,1), got {}",
                self.rel_tol
            )));
        }
        let (lo, hi) = self.mode_bracket;
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(NumericsError::Usage(format!(
                "mode bracket must satisfy 0 <= lo < hi, got ({lo}, {hi})"
            )));
        }
        if self.max_panels == 0 {
            return Err(NumericsError::Usage("max_panels must be positive".into()));
        }
        Ok(())
    }
}

// 15-point Kronrod nodes (positive half) with Kronrod and embedded
// 7-point Gauss weights, as in QUADPACK's QK15.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Log-domain GK15 on [a, b]: returns (log panel integral, log error estimate).
fn gk15_log<F: FnMut(f64) -> f64 + ?Sized>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let ln_h = h.ln();
    let mut kron = f64::NEG_INFINITY;
    let mut gauss = f64::NEG_INFINITY;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let lw = wk.ln() + ln_h;
        let pair = if i < 7 {
            lse2(f(c - h * x), f(c + h * x))
        } else {
            f(c)
        };
        kron = lse2(kron, pair + lw);
        if i % 2 == 1 || i == 7 {
            let lwg = WG[i / 2].ln() + ln_h;
            gauss = lse2(gauss, pair + lwg);
        }
    }
    let err = if kron == f64::NEG_INFINITY && gauss == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        let hi = kron.max(gauss);
        let lo = kron.min(gauss);
        let diff = -(lo - hi).exp_m1(); // 1 - e^{lo-hi} in [0,1]
        hi + diff.ln()
    };
    (kron, err)
}

struct ModeInfo {
    mode: f64,
    boundary: bool,
}

/// Golden-section mode location inside the bracket, expanding the bracket
/// by doubling when the peak lies outside it.
fn locate_mode(f: &mut impl FnMut(f64) -> f64, lo0: f64, hi0: f64) -> Result<ModeInfo> {
    let mut a = lo0.max(0.0);
    let mut c = hi0;
    let mut b = 0.5 * (a + c);
    let (mut fa, mut fb, mut fc) = (f(a), f(b), f(c));
    let mut expansions = 0usize;
    loop {
        if fb >= fa && fb >= fc {
            break;
        }
        if fc > fb {
            // peak to the right
            a = b;
            fa = fb;
            b = c;
            fb = fc;
            c = 2.0 * c + 0.125;
            fc = f(c);
        } else {
            // peak at or left of a; probing the origin settles it in one step
            if a <= 0.0 {
                return Ok(ModeInfo {
                    mode: 0.0,
                    boundary: true,
                });
            }
            let f0 = f(0.0);
            if f0 >= fa {
                return Ok(ModeInfo {
                    mode: 0.0,
                    boundary: true,
                });
            }
            c = b;
            fc = fb;
            b = a;
            fb = fa;
            a = 0.0;
            fa = f0;
        }
        expansions += 1;
        if expansions > 600 {
            return Err(NumericsError::Convergence {
                what: format!(
                    "integrand mode not bracketed after {expansions} expansions \
                     (reached [{a:.3e}, {c:.3e}], f = [{fa:.3e}, {fb:.3e}, {fc:.3e}])"
                ),
                panels: 0,
                achieved: f64::NAN,
                requested: f64::NAN,
            });
        }
    }
    // golden-section shrink of [a, c] around the peak
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = c - INV_PHI * (c - a);
    let mut x2 = a + INV_PHI * (c - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..120 {
        if c - a < 1e-10 * c.max(1.0) {
            break;
        }
        if f1 >= f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - INV_PHI * (c - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (c - a);
            f2 = f(x2);
        }
    }
    Ok(ModeInfo {
        mode: 0.5 * (a + c),
        boundary: false,
    })
}

/// Initial panel width from local curvature/slope at the mode.
fn initial_width(f: &mut impl FnMut(f64) -> f64, mode: f64, f_mode: f64) -> f64 {
    let scale = mode.max(1.0);
    let d = 1e-3 * scale;
    let fr = f(mode + d);
    let width_curv = if mode > d {
        let fl = f(mode - d);
        let second = (fr - 2.0 * f_mode + fl) / (d * d);
        if second < -1e-300 {
            (-1.0 / second).sqrt()
        } else {
            f64::INFINITY
        }
    } else {
        f64::INFINITY
    };
    let slope = (f_mode - fr) / d;
    let width_slope = if slope > 1e-300 {
        3.0 / slope
    } else {
        f64::INFINITY
    };
    width_curv.min(width_slope).clamp(1e-9 * scale, 2.0 * scale)
}

/// log ∫₀^∞ exp(log_integrand(z)) dz for a log-integrand that is unimodal
/// on (0, ∞) and decays at least exponentially.
///
/// The mode is bracketed (golden section, doubling expansion), then
/// Gauss–Kronrod panels march outward from it until fresh panel
/// contributions fall below tolerance × running total; error-controlled
/// panels are bisected as needed.
pub fn integrate_halfline_log(
    mut log_integrand: impl FnMut(f64) -> f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    let f = &mut log_integrand;
    let info = locate_mode(f, spec.mode_bracket.0, spec.mode_bracket.1)?;
    let f_mode = f(if info.boundary {
        1e-300
    } else {
        info.mode
    });
    let h0 = initial_width(f, info.mode.max(1e-300), f_mode);

    let mut total = f64::NEG_INFINITY;
    let mut panels_used = 0usize;
    let ln_tol = spec.rel_tol.ln();
    // margin keeping the truncated tail well under tolerance
    let ln_stop_margin = 64f64.ln();

    let run_side = |f: &mut dyn FnMut(f64) -> f64,
                        total: &mut f64,
                        panels_used: &mut usize,
                        rightward: bool|
     -> Result<()> {
        let mut pos = info.mode;
        let mut h = h0;
        let mut quiet_panels = 0usize;
        loop {
            if !rightward && pos <= 0.0 {
                return Ok(());
            }
            let (a, b) = if rightward {
                (pos, pos + h)
            } else {
                ((pos - h).max(0.0), pos)
            };
            if *panels_used >= spec.max_panels {
                return Err(NumericsError::Convergence {
                    what: "quadrature panel budget exhausted".into(),
                    panels: *panels_used,
                    achieved: f64::NAN,
                    requested: spec.rel_tol,
                });
            }
            *panels_used += 1;
            let (panel, err) = gk15_log(f, a, b);
            let panel_ok = err <= panel + (0.1 * spec.rel_tol).ln()
                || err <= *total + ln_tol - 1024f64.ln();
            if !panel_ok && h > 1e-14 * pos.max(1.0) {
                h *= 0.5;
                continue;
            }
            *total = lse2(*total, panel);
            if rightward {
                pos = b;
            } else {
                pos = a;
            }
            h *= 1.6;
            if panel <= *total + ln_tol - ln_stop_margin {
                quiet_panels += 1;
                if quiet_panels >= 2 {
                    return Ok(());
                }
            } else {
                quiet_panels = 0;
            }
        }
    };

    run_side(f, &mut total, &mut panels_used, true)?;
    if !info.boundary && info.mode > 0.0 {
        run_side(f, &mut total, &mut panels_used, false)?;
    }
    Ok(total)
}

//! Sweep orchestration: expands a parameter grid, generates seeded
//! batches, evaluates the requested bounds, and aggregates rows.

use crate::bounds::{
    converse_rate, dt_max_rate, normal_approx, pilot_dt_max_rate, BoundKind, BoundResult,
    SampleBatch,
};
use crate::density::{BlockSampler, DensityError};
use crate::model::{derive_params, valid_ell_values, ChannelParams};
use crate::numerics::QuadratureSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error("thread pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, EngineError>;

/// A parameter sweep: Cartesian grid over diversity branches, Rician
/// factors, and pilot counts at one (n, ρ, ε) operating point.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub n_total: usize,
    pub ell_values: Vec<usize>,
    pub kappa_values: Vec<f64>,
    pub rho_db: f64,
    pub epsilon: f64,
    pub np_values: Vec<usize>,
    pub bounds: Vec<BoundKind>,
    pub samples: usize,
    pub master_seed: u64,
}

/// One grid point of the expansion, in deterministic order.
#[derive(Debug, Clone)]
pub struct ParamPoint {
    pub index: usize,
    pub ell: usize,
    pub n_c: usize,
    pub kappa: f64,
    pub n_p: usize,
    /// Why the point is skipped, when it is.
    pub skip: Option<String>,
}

/// One output row per (valid parameter point × bound kind).
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub ell: usize,
    pub n_c: usize,
    pub kappa: f64,
    pub n_p: usize,
    pub kind: BoundKind,
    /// NaN marks a per-point evaluation failure (see the run summary).
    pub rate_bpcu: f64,
    pub stderr: f64,
    pub aux: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Default)]
pub struct RunSummary {
    pub skipped: Vec<(usize, String)>,
    pub failures: Vec<(usize, String)>,
    pub wall: Duration,
    pub point_timings: Vec<(usize, Duration)>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub summary: RunSummary,
}

/// Execution knobs that must not affect results, only scheduling.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub threads: Option<usize>,
    pub chunk_size: usize,
    pub quad: QuadratureSpec,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            threads: None,
            chunk_size: 1024,
            quad: QuadratureSpec::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.ell_values.is_empty() || self.kappa_values.is_empty() || self.np_values.is_empty()
        {
            return Err(EngineError::Usage(
                "sweep expansion is empty (ell, kappa, and np lists must be nonempty)".into(),
            ));
        }
        if self.bounds.is_empty() {
            return Err(EngineError::Usage("no bounds requested".into()));
        }
        let divisors = valid_ell_values(self.n_total);
        for &ell in &self.ell_values {
            if !divisors.contains(&ell) {
                return Err(EngineError::Usage(format!(
                    "ell = {ell} is not a usable divisor of n = {}; valid: {divisors:?}",
                    self.n_total
                )));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(EngineError::Usage(format!(
                "epsilon must be in (0,1), got {}",
                self.epsilon
            )));
        }
        if self.samples < 2 {
            return Err(EngineError::Usage("samples must be at least 2".into()));
        }
        Ok(())
    }

}

/// Deterministic expansion: ℓ ascending, then κ, then n_p. Points whose
/// pilot count leaves fewer than two data symbols are marked skipped.
pub fn expand(spec: &SweepSpec) -> Result<Vec<ParamPoint>> {
    spec.validate()?;
    let mut ells = spec.ell_values.clone();
    ells.sort_unstable();
    ells.dedup();
    let mut kappas = spec.kappa_values.clone();
    kappas.sort_by(|a, b| a.partial_cmp(b).expect("finite kappa"));
    kappas.dedup();
    let mut nps = spec.np_values.clone();
    nps.sort_unstable();
    nps.dedup();

    let mut points = Vec::new();
    for &ell in &ells {
        let n_c = spec.n_total / ell;
        for &kappa in &kappas {
            for &n_p in &nps {
                let skip = if n_p > 0 && n_p + 2 > n_c {
                    Some(format!(
                        "n_p = {n_p} leaves n_d < 2 in a coherence block of n_c = {n_c}"
                    ))
                } else {
                    None
                };
                points.push(ParamPoint {
                    index: points.len(),
                    ell,
                    n_c,
                    kappa,
                    n_p,
                    skip,
                });
            }
        }
    }
    Ok(points)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-point seed shown in output rows.
pub fn point_seed(master: u64, point_index: usize) -> u64 {
    let mut st = master ^ 0xA076_1D64_78BD_642F;
    let _ = splitmix64(&mut st);
    st = st.wrapping_add(point_index as u64);
    splitmix64(&mut st)
}

/// Per-sample generator, keyed by the global sample index so results are
/// independent of chunking and worker count. `stream` separates the
/// noncoherent and pilot batches drawn at the same point.
pub fn sample_rng(master: u64, point_index: usize, stream: u64, sample_index: u64) -> ChaCha8Rng {
    let mut st = master ^ 0xA076_1D64_78BD_642F;
    let _ = splitmix64(&mut st);
    st = st.wrapping_add(point_index as u64);
    let _ = splitmix64(&mut st);
    st = st.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let _ = splitmix64(&mut st);
    st = st.wrapping_add(sample_index);
    let mut seed = [0u8; 32];
    for word in 0..4 {
        let v = splitmix64(&mut st);
        seed[word * 8..word * 8 + 8].copy_from_slice(&v.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Draws a batch of `samples` codeword sums for one parameter point.
pub fn generate_batch(
    sampler: &BlockSampler,
    ell: usize,
    samples: usize,
    master: u64,
    point_index: usize,
    stream: u64,
    chunk_size: usize,
) -> std::result::Result<SampleBatch, DensityError> {
    let mut sums = vec![0.0f64; samples];
    let chunk = chunk_size.max(1);
    let result: std::result::Result<(), DensityError> = sums
        .par_chunks_mut(chunk)
        .enumerate()
        .try_for_each(|(c, slice)| {
            for (j, slot) in slice.iter_mut().enumerate() {
                let idx = (c * chunk + j) as u64;
                let mut rng = sample_rng(master, point_index, stream, idx);
                *slot = sampler.draw_codeword_sum(&mut rng, ell)?;
            }
            Ok(())
        });
    result?;
    Ok(SampleBatch::new(sums, master).expect("generated batch is valid"))
}

const STREAM_NONCOHERENT: u64 = 0;
const STREAM_PILOT: u64 = 1;

fn evaluate_point(
    spec: &SweepSpec,
    opts: &RunOptions,
    point: &ParamPoint,
) -> std::result::Result<Vec<(BoundKind, BoundResult)>, String> {
    let params: ChannelParams = derive_params(point.kappa, spec.rho_db, spec.n_total, point.ell)
        .map_err(|e| e.to_string())?;
    let rho = params.rho;

    let needs_noncoherent = spec.bounds.iter().any(|b| {
        matches!(b, BoundKind::Dt | BoundKind::Converse)
            || (*b == BoundKind::PilotDt && point.n_p == 0)
    });
    let needs_pilot = spec.bounds.contains(&BoundKind::PilotDt) && point.n_p > 0;

    let noncoherent_batch = if needs_noncoherent {
        let sampler =
            BlockSampler::new(&params, 0, &opts.quad).map_err(|e| e.to_string())?;
        Some(
            generate_batch(
                &sampler,
                point.ell,
                spec.samples,
                spec.master_seed,
                point.index,
                STREAM_NONCOHERENT,
                opts.chunk_size,
            )
            .map_err(|e| e.to_string())?,
        )
    } else {
        None
    };
    let pilot_batch = if needs_pilot {
        let sampler =
            BlockSampler::new(&params, point.n_p, &opts.quad).map_err(|e| e.to_string())?;
        Some(
            generate_batch(
                &sampler,
                point.ell,
                spec.samples,
                spec.master_seed,
                point.index,
                STREAM_PILOT,
                opts.chunk_size,
            )
            .map_err(|e| e.to_string())?,
        )
    } else {
        None
    };

    let mut out = Vec::with_capacity(spec.bounds.len());
    for &kind in &spec.bounds {
        let result = match kind {
            BoundKind::Dt => dt_max_rate(
                noncoherent_batch.as_ref().expect("batch generated"),
                spec.epsilon,
                point.n_c,
                point.ell,
                rho,
            ),
            BoundKind::Converse => converse_rate(
                noncoherent_batch.as_ref().expect("batch generated"),
                spec.epsilon,
                point.n_c,
                point.ell,
            ),
            BoundKind::PilotDt => {
                let batch = if point.n_p == 0 {
                    noncoherent_batch.as_ref()
                } else {
                    pilot_batch.as_ref()
                };
                pilot_dt_max_rate(
                    batch.expect("batch generated"),
                    spec.epsilon,
                    point.n_c,
                    point.ell,
                    rho,
                    point.n_p,
                )
            }
            BoundKind::NormalApprox => normal_approx(rho, spec.n_total, spec.epsilon),
        }
        .map_err(|e| e.to_string())?;
        out.push((kind, result));
    }
    Ok(out)
}

/// Runs the sweep point by point; per-point failures become NaN rows and
/// are listed in the summary instead of aborting the sweep.
pub fn run(spec: &SweepSpec, opts: &RunOptions) -> Result<RunOutput> {
    let points = expand(spec)?;
    let started = Instant::now();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| EngineError::Pool(e.to_string()))?;

    let mut rows = Vec::new();
    let mut summary = RunSummary::default();
    for point in &points {
        if let Some(reason) = &point.skip {
            summary.skipped.push((point.index, reason.clone()));
            continue;
        }
        let t0 = Instant::now();
        let seed = point_seed(spec.master_seed, point.index);
        let outcome = pool.install(|| evaluate_point(spec, opts, point));
        match outcome {
            Ok(results) => {
                for (kind, r) in results {
                    rows.push(ResultRow {
                        ell: point.ell,
                        n_c: point.n_c,
                        kappa: point.kappa,
                        n_p: point.n_p,
                        kind,
                        rate_bpcu: r.rate_bpcu,
                        stderr: r.stderr_rate,
                        aux: r.aux(),
                        samples: if kind == BoundKind::NormalApprox {
                            0
                        } else {
                            spec.samples
                        },
                        seed,
                    });
                }
            }
            Err(msg) => {
                summary
                    .failures
                    .push((point.index, format!("point {}: {msg}", point.index)));
                for &kind in &spec.bounds {
                    rows.push(ResultRow {
                        ell: point.ell,
                        n_c: point.n_c,
                        kappa: point.kappa,
                        n_p: point.n_p,
                        kind,
                        rate_bpcu: f64::NAN,
                        stderr: f64::NAN,
                        aux: None,
                        samples: spec.samples,
                        seed,
                    });
                }
            }
        }
        summary.point_timings.push((point.index, t0.elapsed()));
    }
    summary.wall = started.elapsed();
    Ok(RunOutput { rows, summary })
}

//! Command-line front end: flag parsing with figure presets, sweep
//! execution, and CSV/TSV emission.

use crate::bounds::BoundKind;
use crate::engine::{self, ResultRow, RunOptions, SweepSpec};
use crate::model::valid_ell_values;
use crate::numerics::QuadratureSpec;
use clap::{Parser, ValueEnum};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Tsv,
}

/// Finite-blocklength bounds on the maximum coding rate of SISO Rician
/// block-fading channels, swept over diversity branches, Rician factors,
/// and pilot counts.
#[derive(Debug, Parser)]
#[command(name = "rician-fbl", version, about)]
pub struct Cli {
    /// Figure preset fixing the whole sweep; explicit flags override it.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,

    /// Total blocklength n = n_c * ell.
    #[arg(long)]
    pub n: Option<usize>,

    /// Diversity branches: comma list of divisors of n, or `all`.
    #[arg(long)]
    pub ell: Option<String>,

    /// Rician factors, comma list.
    #[arg(long, value_delimiter = ',')]
    pub kappa: Option<Vec<f64>>,

    /// SNR in dB.
    #[arg(long = "rho-db")]
    pub rho_db: Option<f64>,

    /// Target average error probability.
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Pilot symbols per coherence block, comma list (requires pilot-dt).
    #[arg(long = "np", value_delimiter = ',')]
    pub np: Option<Vec<usize>>,

    /// Bounds to evaluate: dt, converse, pilot-dt, normal-approx.
    #[arg(long, value_delimiter = ',')]
    pub bound: Option<Vec<String>>,

    /// Monte-Carlo codeword draws per parameter point.
    #[arg(long)]
    pub samples: Option<usize>,

    /// Master seed; everything downstream derives from it.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,

    /// Relative tolerance of the half-line quadrature.
    #[arg(long)]
    pub tolerance: Option<f64>,

    /// Worker threads (default: all cores). Results are identical for any
    /// value.
    #[arg(long)]
    pub threads: Option<usize>,

    #[arg(long, short = 'v', action = clap::ArgAction::Count)]
    pub verbose: u8,
}

/// Resolved configuration: the sweep plus output options.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub sweep: SweepSpec,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub verbose: u8,
    pub threads: Option<usize>,
    pub tolerance: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
}

const FIG_ELL_TICKS: &[usize] = &[2, 4, 7, 14, 21, 28, 42, 84];

fn preset_sweep(preset: Preset) -> SweepSpec {
    let base = SweepSpec {
        n_total: 168,
        ell_values: FIG_ELL_TICKS.to_vec(),
        kappa_values: vec![0.0],
        rho_db: 6.0,
        epsilon: 1e-3,
        np_values: vec![0],
        bounds: vec![BoundKind::Dt, BoundKind::Converse],
        samples: 100_000,
        master_seed: 0,
    };
    match preset {
        Preset::Fig1 => SweepSpec {
            kappa_values: vec![0.0, 1.0, 10.0, 100.0, 1000.0],
            bounds: vec![BoundKind::Dt, BoundKind::Converse, BoundKind::NormalApprox],
            ..base
        },
        Preset::Fig2 => SweepSpec {
            kappa_values: vec![0.0],
            np_values: vec![0, 1, 2, 4, 6, 8],
            bounds: vec![BoundKind::PilotDt, BoundKind::Converse],
            ..base
        },
        Preset::Fig3 => SweepSpec {
            kappa_values: vec![10.0],
            np_values: vec![0, 1, 2, 4, 6, 8],
            bounds: vec![BoundKind::PilotDt, BoundKind::Converse],
            ..base
        },
    }
}

fn parse_ell(s: &str, n_total: usize) -> Result<Vec<usize>, CliError> {
    if s.trim() == "all" {
        return Ok(valid_ell_values(n_total)
            .into_iter()
            .filter(|&ell| n_total / ell >= 2)
            .collect());
    }
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad --ell entry '{tok}'")))
        })
        .collect()
}

/// Merges preset and explicit flags into the final configuration.
pub fn build_config(cli: &Cli) -> Result<CliConfig, CliError> {
    let mut sweep = cli.preset.map(preset_sweep).unwrap_or(SweepSpec {
        n_total: 168,
        ell_values: FIG_ELL_TICKS.to_vec(),
        kappa_values: vec![0.0],
        rho_db: 6.0,
        epsilon: 1e-3,
        np_values: vec![0],
        bounds: vec![BoundKind::Dt, BoundKind::Converse],
        samples: 100_000,
        master_seed: 0,
    });
    if let Some(n) = cli.n {
        sweep.n_total = n;
    }
    if let Some(ell) = &cli.ell {
        sweep.ell_values = parse_ell(ell, sweep.n_total)?;
    }
    if let Some(kappa) = &cli.kappa {
        sweep.kappa_values = kappa.clone();
    }
    if let Some(rho_db) = cli.rho_db {
        sweep.rho_db = rho_db;
    }
    if let Some(epsilon) = cli.epsilon {
        sweep.epsilon = epsilon;
    }
    if let Some(np) = &cli.np {
        sweep.np_values = np.clone();
    }
    if let Some(bounds) = &cli.bound {
        sweep.bounds = bounds
            .iter()
            .map(|s| BoundKind::parse(s.trim()).map_err(|e| CliError::Usage(e.to_string())))
            .collect::<Result<_, _>>()?;
    }
    if let Some(samples) = cli.samples {
        sweep.samples = samples;
    }
    if let Some(seed) = cli.seed {
        sweep.master_seed = seed;
    }
    let pilot_requested = sweep.bounds.contains(&BoundKind::PilotDt);
    if cli.np.is_some() && !pilot_requested {
        return Err(CliError::Usage(
            "--np only makes sense with pilot-dt among --bound".into(),
        ));
    }
    let tolerance = cli.tolerance.unwrap_or(1e-9);
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(CliError::Usage(format!(
            "--tolerance must be in (0,1), got {tolerance}"
        )));
    }
    Ok(CliConfig {
        sweep,
        out: cli.out.clone(),
        format: cli.format,
        verbose: cli.verbose,
        threads: cli.threads,
        tolerance,
    })
}

/// Nine significant digits, scientific; round-trips through f64 parsing.
pub fn fmt_sig9(v: f64) -> String {
    format!("{v:.8e}")
}

/// Writes the result table; header:
/// `ell,n_c,kappa,n_p,bound,rate_bpcu,stderr,aux,samples,seed`.
pub fn emit(rows: &[ResultRow], format: OutputFormat, w: &mut impl Write) -> std::io::Result<()> {
    if rows.is_empty() {
        return Err(std::io::Error::other("no rows to emit"));
    }
    let sep = match format {
        OutputFormat::Csv => ",",
        OutputFormat::Tsv => "\t",
    };
    writeln!(
        w,
        "ell{sep}n_c{sep}kappa{sep}n_p{sep}bound{sep}rate_bpcu{sep}stderr{sep}aux{sep}samples{sep}seed"
    )?;
    for r in rows {
        let aux = r.aux.map(fmt_sig9).unwrap_or_default();
        writeln!(
            w,
            "{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}",
            r.ell,
            r.n_c,
            r.kappa,
            r.n_p,
            r.kind.label(),
            fmt_sig9(r.rate_bpcu),
            fmt_sig9(r.stderr),
            aux,
            r.samples,
            r.seed
        )?;
    }
    Ok(())
}

/// Runs the full pipeline; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let config = match build_config(cli) {
        Ok(c) => c,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let opts = RunOptions {
        threads: config.threads,
        quad: QuadratureSpec {
            rel_tol: config.tolerance,
            ..Default::default()
        },
        ..Default::default()
    };
    let output = match engine::run(&config.sweep, &opts) {
        Ok(o) => o,
        Err(engine::EngineError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };

    let emit_result = match &config.out {
        Some(path) => std::fs::File::create(path)
            .and_then(|mut f| emit(&output.rows, config.format, &mut f)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            emit(&output.rows, config.format, &mut lock)
        }
    };
    if let Err(e) = emit_result {
        eprintln!("error: {e}");
        return 1;
    }

    let s = &output.summary;
    eprintln!(
        "{} rows, {} points skipped, {} failures, wall {:.1}s",
        output.rows.len(),
        s.skipped.len(),
        s.failures.len(),
        s.wall.as_secs_f64()
    );
    for (idx, reason) in &s.skipped {
        eprintln!("  skipped point {idx}: {reason}");
    }
    for (_, msg) in &s.failures {
        eprintln!("  failed {msg}");
    }
    if config.verbose > 0 {
        for (idx, dt) in &s.point_timings {
            eprintln!("  point {idx}: {:.2}s", dt.as_secs_f64());
        }
    }
    if !s.failures.is_empty() {
        return 1;
    }
    0
}

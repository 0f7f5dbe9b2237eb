use rician_fbl::bounds::BoundKind;
use rician_fbl::engine::{run, RunOptions, SweepSpec};

fn main() {
    let mut rates = Vec::new();
    for seed in [1u64, 2, 3, 4, 5, 6, 7, 8] {
        let spec = SweepSpec {
            n_total: 168,
            ell_values: vec![21],
            kappa_values: vec![0.0],
            rho_db: 6.0,
            epsilon: 1e-3,
            np_values: vec![0],
            bounds: vec![BoundKind::Dt, BoundKind::Converse],
            samples: 100_000,
            master_seed: seed,
        };
        let out = run(&spec, &RunOptions::default()).unwrap();
        println!("seed {seed}: dt={:.4} conv={:.4}", out.rows[0].rate_bpcu, out.rows[1].rate_bpcu);
        rates.push(out.rows[0].rate_bpcu);
    }
    let m = rates.iter().sum::<f64>() / rates.len() as f64;
    let v = rates.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / (rates.len() - 1) as f64;
    println!("dt mean {m:.4}, seed-to-seed std {:.4}", v.sqrt());
}

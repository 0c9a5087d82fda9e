//! Monte Carlo mean of B at the diamond tip against the continuum value.
//! The spread grows with density, so watch stderr as well as the mean.
//!
//!   cargo run --release --example boxop_ensemble -- "t^2 + window(0.5,1)" 200

use causet::coefficients::coefficient_set;
use causet::dalembertian::{ensemble_mean_b, FieldSpec};
use causet::hypergeom::rat;
use causet::sprinkling::DiamondSpec;

fn main() {
    let mut args = std::env::args().skip(1);
    let field = args.next().unwrap_or_else(|| "t^2 + window(0.5,1)".into());
    let runs: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let field = FieldSpec::parse(&field).unwrap();
    let c = coefficient_set(2, &rat(1, 1)).unwrap();
    for rho in [25.0, 100.0, 300.0] {
        let spec = DiamondSpec::new(2, 4.0, rho).unwrap();
        let r = ensemble_mean_b(&spec, &field, &c, runs, 7).unwrap();
        let sd = r.stderr * (runs as f64).sqrt();
        println!(
            "rho={rho:<5} mean={:>10.2} stderr={:>9.2} per-run sd={:>9.1} target={}",
            r.mean, r.stderr, sd, r.target
        );
    }
}

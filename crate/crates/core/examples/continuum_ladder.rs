//! Prints the β, α/β and curvature ladders for d = 2..7.
//!
//!   cargo run --release --example continuum_ladder -- 2 7

use causet::continuum::{check_alpha_over_beta, check_beta, check_ricci, default_ladder, ConvergenceReport};
use causet::hypergeom::EvalConfig;

fn show(r: &ConvergenceReport) {
    let errs: Vec<String> = r.errors.iter().map(|e| format!("{e:.3e}")).collect();
    println!(
        "d={} {:<10} final={:.3e} decay={:?} predicted={:?} monotone={} scale={:?}\n    {}",
        r.dim,
        r.quantity,
        r.final_error,
        r.decay_exponent.map(|k| (k * 1000.0).round() / 1000.0),
        r.asymptotic.as_ref().map(|a| a.leading_decay),
        r.monotone,
        r.reference_scale,
        errs.join(" ")
    );
}

fn main() {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (lo, hi) = (args.first().copied().unwrap_or(2), args.get(1).copied().unwrap_or(7));
    let cfg = EvalConfig::default();
    for d in lo..=hi {
        let ladder = default_ladder(d);
        let t = std::time::Instant::now();
        show(&check_beta(d, &ladder, &cfg).unwrap());
        show(&check_alpha_over_beta(d, &ladder, &cfg).unwrap());
        let (ir, i00) = check_ricci(d, &ladder, &cfg).unwrap();
        show(&ir);
        show(&i00);
        println!("    ({:.1?})", t.elapsed());
    }
}

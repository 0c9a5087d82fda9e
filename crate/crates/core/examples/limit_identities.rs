//! The two large-z limits behind the continuum checks, on a z ladder.

use causet::hypergeom::{rat, verify_limit_flat, verify_limit_gamma, EvalConfig, LimitReport};

fn show(r: &LimitReport) {
    println!("{} {}", r.identity, r.spec);
    for row in &r.rows {
        println!("  z={:<6} value={}  error={:.3e}", row.z, row.value.to_decimal(20), row.error);
    }
    println!("  monotone={} decay={:?}", r.monotone, r.decay_exponent);
}

fn main() {
    let ladder: Vec<_> = [10, 100, 1000, 10_000].iter().map(|&z| rat(z, 1)).collect();
    let cfg = EvalConfig::with_digits(50);
    // operator parameters for d=3: 2j/3 + 1
    show(&verify_limit_flat(&[rat(5, 3), rat(7, 3)], &ladder, &cfg).unwrap());
    show(&verify_limit_gamma(&rat(3, 2), &[rat(3, 2), rat(2, 1)], &ladder, &cfg).unwrap());
}

//! Exact operator constants per dimension.
//!
//!   cargo run --example coefficients -- 2 8

use causet::coefficients::coefficient_set;
use causet::hypergeom::rat;

fn main() {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (lo, hi) = (args.first().copied().unwrap_or(2), args.get(1).copied().unwrap_or(8));
    for d in lo..=hi {
        let c = coefficient_set(d, &rat(1, 1)).unwrap();
        let cs: Vec<String> = c.layer_coefficients.iter().map(|x| x.to_string()).collect();
        println!("d={d}  n_d={}  C=({})", c.n_d, cs.join(", "));
        println!("    c_d   = {}  ≈ {}", c.c_d, c.c_d.to_decimal(15));
        println!("    alpha = {}  ≈ {}", c.alpha, c.alpha.to_decimal(15));
        println!("    beta  = {}  ≈ {}", c.beta, c.beta.to_decimal(15));
        println!("    beta/alpha = {}", c.beta_over_alpha());
    }
}

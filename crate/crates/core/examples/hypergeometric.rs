//! pFq(a; b; -z) with its error bound, by each evaluation route.
//!
//!   cargo run --release --example hypergeometric

use causet::hypergeom::{eval_pfq, operator_spec, rat, EvalConfig, HypergeometricSpec, Method};

fn main() {
    // 1F1(1; 2; -z) = (1 - e^-z)/z
    let simple = HypergeometricSpec::new(vec![rat(1, 1)], vec![rat(2, 1)]).unwrap();
    let op = operator_spec(4).unwrap();
    for spec in [&simple, &op] {
        println!("{spec}");
        for z in [rat(1, 2), rat(40, 1), rat(5000, 1)] {
            for method in [Method::Auto, Method::Exact, Method::FixedPoint, Method::ClosedForm] {
                // exact rationals blow up long before z = 5000
                if method == Method::Exact && z > rat(50, 1) {
                    continue;
                }
                let cfg = EvalConfig { method, ..EvalConfig::with_digits(40) };
                match eval_pfq(spec, &z, &cfg) {
                    Ok(v) => println!(
                        "  z={z:<5} {:<10} {}  bound 2^{:.0}  terms {}",
                        format!("{method:?}"),
                        v.value.to_decimal(25),
                        v.tail_bound.log2_abs(),
                        v.terms
                    ),
                    Err(e) => println!("  z={z:<5} {:<10} {e}", format!("{method:?}")),
                }
            }
        }
    }
}

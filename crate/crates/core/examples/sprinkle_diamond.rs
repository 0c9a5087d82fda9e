//! Sprinkle a causal diamond, build the order, and look at the tip's layers.
//!
//!   cargo run --release --example sprinkle_diamond -- 3 500

use causet::dalembertian::{interval_histogram, layer_populations};
use causet::sprinkling::{sprinkle, CausalMatrix, DiamondSpec, Sprinkle};

fn main() {
    let mut args = std::env::args().skip(1);
    let d: u32 = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let n: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(500.0);
    let spec = DiamondSpec::with_expected_count(d, 2.0, n).unwrap();
    println!(
        "d={d} tau=2 rho={:.2} volume={:.4} l={:.4} acceptance={:.3}",
        spec.rho,
        spec.volume(),
        spec.discreteness(),
        spec.acceptance()
    );
    let s = sprinkle(&spec, 1, 0).unwrap();
    let m = CausalMatrix::new(&s);
    println!("{} elements, {} relations", s.len(), m.relation_count());
    let tip = s.top_index.unwrap();
    let layers = layer_populations(&m, tip, 4).unwrap();
    println!("tip layers {:?}, deeper {}", layers.sizes(), layers.beyond);
    let h = interval_histogram(&m, 6);
    println!("N_1..N_6 = {:?}, larger {}", h.counts, h.overflow);

    let dir = std::env::temp_dir();
    let (j, b) = (dir.join("causet_example.json"), dir.join("causet_example.bin"));
    s.write_json(&j).unwrap();
    s.write_bin(&b).unwrap();
    assert_eq!(Sprinkle::read(&j).unwrap(), s);
    assert_eq!(Sprinkle::read(&b).unwrap(), s);
    println!(
        "wrote {} ({} bytes) and {} ({} bytes)",
        j.display(),
        std::fs::metadata(&j).unwrap().len(),
        b.display(),
        std::fs::metadata(&b).unwrap().len()
    );
}

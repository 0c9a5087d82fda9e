//! Action of small hand-built causal sets and of sprinklings.

use causet::coefficients::coefficient_set;
use causet::dalembertian::sprinkle_action;
use causet::hypergeom::rat;
use causet::sprinkling::{sprinkle, CausalMatrix, DiamondSpec, Sprinkle};

fn main() {
    let c2 = coefficient_set(2, &rat(1, 1)).unwrap();
    let cases: [(&str, Vec<Vec<f64>>); 4] = [
        ("one element", vec![vec![0.0, 0.0]]),
        ("2-antichain", vec![vec![0.0, -0.5], vec![0.0, 0.5]]),
        ("2-chain", vec![vec![-0.5, 0.0], vec![0.5, 0.0]]),
        ("3-chain", vec![vec![-0.6, 0.0], vec![0.0, 0.0], vec![0.6, 0.0]]),
    ];
    for (name, pts) in &cases {
        let s = Sprinkle::from_points(2, 2.0, 1.0, 0, pts, None).unwrap();
        println!("{name:<12} S = {}", sprinkle_action(&c2, &CausalMatrix::new(&s)).unwrap().exact);
    }
    // flat diamonds: S/N should hover near the boundary contribution
    for d in 2..=4 {
        let c = coefficient_set(d, &rat(1, 1)).unwrap();
        let spec = DiamondSpec::with_expected_count(d, 2.0, 400.0).unwrap();
        for run in 0..3 {
            let s = sprinkle(&spec, 3, run).unwrap();
            let a = sprinkle_action(&c, &CausalMatrix::new(&s)).unwrap();
            println!("d={d} run {run}: N={:<4} S={} ≈ {:.3}", s.len(), a.exact, a.approx);
        }
    }
}

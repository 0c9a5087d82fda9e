//! Field strings, their windowed values and the continuum □φ.

use causet::dalembertian::{continuum_dalembertian, FieldSpec};

fn main() {
    let origin = [0.0, 0.0, 0.0];
    for src in ["t^2", "x1^2 + x2^2", "3*t*x1 - 2*x2^2 + 1", "t^2 - x1^2 + window(0.5,1)", "t^4 + x1"] {
        let f = FieldSpec::parse(src).unwrap();
        let bx = continuum_dalembertian(&f, &[0.1, 0.2, 0.0], &origin).unwrap();
        println!("{src:<28} -> {:<32} □φ(0.1,0.2,0) = {bx}", f.to_string());
    }
    let f = FieldSpec::parse("1 + window(0.5,1)").unwrap();
    for r in [0.0, 0.5, 0.6, 0.75, 0.9, 1.0, 1.2] {
        println!("  window at r={r:<4} {:.5}", f.value(&[0.0, r, 0.0], &origin));
    }
    for bad in ["t^5", "y^2", "window(1,0.5)"] {
        println!("{bad:<14} {}", FieldSpec::parse(bad).unwrap_err());
    }
}

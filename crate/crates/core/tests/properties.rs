use num_rational::BigRational;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use causet::coefficients::coefficient_set;
use causet::dalembertian::{apply_b, interval_histogram, layer_populations, pairwise_sum, sprinkle_action, FieldSpec};
use causet::exact::ExactScalar;
use causet::hypergeom::{eval_pfq, rat, EvalConfig, HypergeometricSpec, Method};
use causet::real::Real;
use causet::sprinkling::{causally_precedes, sprinkle, CausalMatrix, DiamondSpec, Sprinkle};

fn boost(p: &[f64], v: &[f64]) -> Vec<f64> {
    let v2: f64 = v.iter().map(|x| x * x).sum();
    if v2 == 0.0 {
        return p.to_vec();
    }
    let g = 1.0 / (1.0 - v2).sqrt();
    let vx: f64 = v.iter().zip(&p[1..]).map(|(a, b)| a * b).sum();
    let mut out = vec![g * (p[0] - vx)];
    for (x, vi) in p[1..].iter().zip(v) {
        out.push(x + ((g - 1.0) * vx / v2 - g * p[0]) * vi);
    }
    out
}

fn event(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d)
}

fn param() -> impl Strategy<Value = BigRational> {
    (1i64..40, 1i64..8).prop_map(|(n, d)| rat(n, d))
}

fn spec() -> impl Strategy<Value = HypergeometricSpec> {
    (1usize..4)
        .prop_flat_map(|q| (prop::collection::vec(param(), 1..=q), prop::collection::vec(param(), q)))
        .prop_map(|(u, l)| HypergeometricSpec::new(u, l).unwrap())
}

fn small_sprinkle() -> impl Strategy<Value = Sprinkle> {
    (2u32..=4, any::<u64>(), 0u64..4, 5.0f64..40.0).prop_map(|(d, seed, run, n)| {
        let spec = DiamondSpec::with_expected_count(d, 2.0, n).unwrap();
        sprinkle(&spec, seed, run).unwrap()
    })
}

fn points_of(s: &Sprinkle) -> Vec<Vec<f64>> {
    s.points().map(<[f64]>::to_vec).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn precedence_survives_boosts(d in 2usize..=4, x in event(4), y in event(4),
                                  dir in event(3), rapidity in 0.0f64..3.0) {
        let (x, y) = (&x[..d], &y[..d]);
        let dir = &dir[..d - 1];
        let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let v: Vec<f64> = dir.iter().map(|c| c / norm * rapidity.tanh()).collect();
        // stay clear of the light cone, where rounding decides
        let dt = y[0] - x[0];
        let r2: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| (a - b) * (a - b)).sum();
        prop_assume!((dt * dt - r2).abs() > 1e-9);
        prop_assert_eq!(causally_precedes(x, y), causally_precedes(&boost(x, &v), &boost(y, &v)));
    }

    #[test]
    fn precedence_is_a_strict_order(x in event(3), y in event(3)) {
        prop_assert!(!causally_precedes(&x, &x));
        prop_assert!(!(causally_precedes(&x, &y) && causally_precedes(&y, &x)));
    }

    #[test]
    fn pairwise_sum_is_close_to_naive(xs in prop::collection::vec(-1e3f64..1e3, 0..200)) {
        let naive: f64 = xs.iter().sum();
        let scale: f64 = xs.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!((pairwise_sum(&xs) - naive).abs() <= 1e-12 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn causal_matrix_is_a_partial_order(s in small_sprinkle()) {
        let m = CausalMatrix::new(&s);
        prop_assert!(m.is_consistent());
        let n = m.len();
        for i in 0..n {
            prop_assert!(!m.precedes(i, i));
            for j in m.future_of(i) {
                prop_assert!(i < j, "sorted by time, so relations point forward");
                for k in m.future_of(j) {
                    prop_assert!(m.precedes(i, k));
                }
            }
        }
    }

    #[test]
    fn layers_partition_the_past(s in small_sprinkle(), n_layers in 1usize..6) {
        let m = CausalMatrix::new(&s);
        for x in 0..m.len() {
            let l = layer_populations(&m, x, n_layers).unwrap();
            let total: usize = l.sizes().iter().sum::<usize>() + l.beyond;
            prop_assert_eq!(total, m.past_of(x).count());
        }
        let h = interval_histogram(&m, n_layers);
        prop_assert_eq!(h.counts.iter().sum::<u64>() + h.overflow, m.relation_count() as u64);
    }

    #[test]
    fn relabeling_changes_nothing(s in small_sprinkle(), shuffle_seed in any::<u64>()) {
        let mut pts = points_of(&s);
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let top = s.top_index.map(|t| order.iter().position(|&i| i == t).unwrap());
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        let t = Sprinkle::from_points(s.dim, s.tau, s.rho, s.seed, &pts, top).unwrap();
        prop_assert_eq!(&t, &s);
        let c = coefficient_set(s.dim, &rat(1, 1)).unwrap();
        let (ma, mb) = (CausalMatrix::new(&s), CausalMatrix::new(&t));
        prop_assert_eq!(sprinkle_action(&c, &ma).unwrap(), sprinkle_action(&c, &mb).unwrap());
    }

    #[test]
    fn b_is_linear_in_the_field(s in small_sprinkle(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let c = coefficient_set(s.dim, &rat(1, 1)).unwrap();
        let m = CausalMatrix::new(&s);
        let f = FieldSpec::parse("t^2 + 0.5*x1 + window(0.4,0.9)").unwrap();
        let g = FieldSpec::parse("1 - t*x1 + window(0.4,0.9)").unwrap();
        let h = f.combine(a, &g, b).unwrap();
        for x in 0..s.len() {
            let (bf, bg, bh) = (
                apply_b(&c, &s, &m, &f, x).unwrap(),
                apply_b(&c, &s, &m, &g, x).unwrap(),
                apply_b(&c, &s, &m, &h, x).unwrap(),
            );
            let scale = (a * bf).abs() + (b * bg).abs() + 1.0;
            prop_assert!((bh - (a * bf + b * bg)).abs() <= 1e-9 * scale, "{} vs {}", bh, a * bf + b * bg);
        }
    }

    #[test]
    fn sprinkle_files_round_trip(s in small_sprinkle()) {
        let dir = tempfile::tempdir().unwrap();
        let (j, b) = (dir.path().join("s.json"), dir.path().join("s.bin"));
        s.write_json(&j).unwrap();
        s.write_bin(&b).unwrap();
        prop_assert_eq!(&Sprinkle::read(&j).unwrap(), &s);
        prop_assert_eq!(&Sprinkle::read(&b).unwrap(), &s);
    }

    #[test]
    fn field_display_reparses(a in -5i32..5, b in -5i32..5, c in -5i32..5) {
        let src = format!("{a}*t^2 + {b}*x1*t + {c} + window(0.25,0.75)");
        let f = FieldSpec::parse(&src).unwrap();
        let g = FieldSpec::parse(&f.to_string()).unwrap();
        for p in [[0.1, 0.2], [-0.3, 0.05], [0.0, 0.0]] {
            prop_assert_eq!(f.value(&p, &[0.0, 0.0]), g.value(&p, &[0.0, 0.0]));
        }
    }
}

fn close(a: &Real, b: &Real, bound: &Real) -> bool {
    let diff = a.sub(b, 512).abs();
    // allow a few ulps of the working precision on top of the bound
    let slack = a.abs().mul(&Real::from_f64(1e-25, 512), 512);
    diff.cmp_value(&bound.add(&slack, 512)) != std::cmp::Ordering::Greater
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tail_bound_covers_the_truncation(s in spec(), zn in 1i64..400) {
        let z = rat(zn, 4);
        let loose = EvalConfig { method: Method::FixedPoint, ..EvalConfig::with_digits(30) };
        let tight = EvalConfig { method: Method::FixedPoint, ..EvalConfig::with_digits(60) };
        let a = eval_pfq(&s, &z, &loose).unwrap();
        let b = eval_pfq(&s, &z, &tight).unwrap();
        prop_assert!(close(&a.value, &b.value, &a.tail_bound.add(&b.tail_bound, 512)),
            "{}: {} vs {} (bound {})", s, a.value.to_f64(), b.value.to_f64(), a.tail_bound.to_f64());
    }

    #[test]
    fn exact_and_fixed_point_agree(s in spec(), zn in 0i64..200) {
        let z = rat(zn, 4);
        let cfg = |method| EvalConfig { method, ..EvalConfig::with_digits(40) };
        let a = eval_pfq(&s, &z, &cfg(Method::Exact)).unwrap();
        let b = eval_pfq(&s, &z, &cfg(Method::FixedPoint)).unwrap();
        prop_assert!(close(&a.value, &b.value, &a.tail_bound.add(&b.tail_bound, 512)));
    }

    #[test]
    fn exact_scalars_invert(n in -50i64..50, d in 1i64..50, e in -3i64..4, g in 1i64..20) {
        prop_assume!(n != 0);
        let x = ExactScalar::rational(rat(n, d)).mul(&ExactScalar::pi_pow(rat(e, 2)));
        let y = ExactScalar::gamma(&rat(g, 3)).mul(&ExactScalar::rational_pow(&rat(2, 1), &rat(1, 3)));
        prop_assert_eq!(x.mul(&y).div(&y), x.clone());
        prop_assert_eq!(x.pow(&rat(2, 1)), x.mul(&x));
        let f = x.mul(&y).to_f64();
        prop_assert!((f - x.to_f64() * y.to_f64()).abs() <= 1e-12 * f.abs());
    }
}

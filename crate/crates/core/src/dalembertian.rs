//! The causal-set operator B^(d) on sprinkled diamonds, interval abundances,
//! the action, and Monte Carlo ensembles against the continuum □.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::exact::ExactScalar;
use crate::sprinkling::{sprinkle, CausalMatrix, DiamondSpec, Sprinkle};

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    /// Exponents of (t, x1, x2, ..); missing entries are zero.
    pub powers: Vec<u32>,
}

impl Monomial {
    fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    fn power(&self, k: usize) -> u32 {
        self.powers.get(k).copied().unwrap_or(0)
    }

    fn eval(&self, p: &[f64]) -> f64 {
        self.powers
            .iter()
            .enumerate()
            .fold(self.coeff, |acc, (k, &e)| acc * p[k].powi(e as i32))
    }

    /// ∂²/∂(coordinate k)² at p.
    fn second_derivative(&self, k: usize, p: &[f64]) -> f64 {
        let e = self.power(k);
        if e < 2 {
            return 0.0;
        }
        let mut m = self.clone();
        m.powers[k] -= 2;
        m.coeff *= (e * (e - 1)) as f64;
        m.eval(p)
    }
}

/// C² bump: 1 for r <= r_in, 0 for r >= r_out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub r_in: f64,
    pub r_out: f64,
}

impl Window {
    pub fn new(r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in >= 0.0 && r_in < r_out && r_out.is_finite()) {
            return Err(Error::Field(format!("window needs 0 <= r_in < r_out, got ({r_in}, {r_out})")));
        }
        Ok(Window { r_in, r_out })
    }

    pub fn at(&self, r: f64) -> f64 {
        if r <= self.r_in {
            return 1.0;
        }
        if r >= self.r_out {
            return 0.0;
        }
        let s = (r - self.r_in) / (self.r_out - self.r_in);
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

/// Polynomial of degree <= 4 in (t, x1, ..), optionally times a window
/// centred on the evaluation point.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec {
    pub terms: Vec<Monomial>,
    pub window: Option<Window>,
}

pub const MAX_DEGREE: u32 = 4;

impl FieldSpec {
    pub fn new(terms: Vec<Monomial>, window: Option<Window>) -> Result<Self> {
        if let Some(m) = terms.iter().find(|m| m.degree() > MAX_DEGREE) {
            return Err(Error::Field(format!("degree {} exceeds {MAX_DEGREE}", m.degree())));
        }
        if terms.iter().any(|m| !m.coeff.is_finite()) {
            return Err(Error::Field("non-finite coefficient".into()));
        }
        Ok(FieldSpec { terms, window })
    }

    /// Parses e.g. `"1*t^2 - 0.5*x1*x2 + 3 + window(0.5,1)"`.
    pub fn parse(src: &str) -> Result<Self> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Field("empty field".into()));
        }
        let mut terms = Vec::new();
        let mut window = None;
        for (sign, body) in split_terms(&s)? {
            if let Some(args) = body.strip_prefix("window(").and_then(|r| r.strip_suffix(')')) {
                if sign < 0.0 || window.is_some() {
                    return Err(Error::Field(format!("bad window term in '{src}'")));
                }
                let (a, b) = args.split_once(',').ok_or_else(|| Error::Field(format!("window({args})")))?;
                window = Some(Window::new(num(a)?, num(b)?)?);
                continue;
            }
            let mut m = Monomial { coeff: sign, powers: Vec::new() };
            for f in body.split('*') {
                let (base, exp) = match f.split_once('^') {
                    Some((b, e)) => (b, e.parse::<u32>().map_err(|_| Error::Field(format!("exponent in '{f}'")))?),
                    None => (f, 1),
                };
                let k = match base {
                    "t" => 0,
                    _ if base.starts_with('x') => match base[1..].parse::<usize>() {
                        Ok(k) if k >= 1 => k,
                        _ => return Err(Error::Field(format!("unknown variable '{base}'"))),
                    },
                    _ => {
                        m.coeff *= num(base)?.powi(exp as i32);
                        continue;
                    }
                };
                if m.powers.len() <= k {
                    m.powers.resize(k + 1, 0);
                }
                m.powers[k] += exp;
            }
            terms.push(m);
        }
        FieldSpec::new(terms, window)
    }

    /// Highest spatial index used, or 0.
    pub fn max_variable(&self) -> usize {
        self.terms.iter().map(|m| m.powers.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn check_dim(&self, d: u32) -> Result<()> {
        if self.max_variable() >= d as usize {
            return Err(Error::Field(format!("x{} does not exist in d={d}", self.max_variable())));
        }
        Ok(())
    }

    pub fn polynomial(&self, p: &[f64]) -> f64 {
        self.terms.iter().map(|m| m.eval(p)).sum()
    }

    /// φ(p) with the window centred on `center`.
    pub fn value(&self, p: &[f64], center: &[f64]) -> f64 {
        let w = self.window.map_or(1.0, |w| {
            let r2: f64 = p.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
            w.at(r2.sqrt())
        });
        if w == 0.0 {
            return 0.0;
        }
        w * self.polynomial(p)
    }

    /// a·self + b·other; the windows must agree.
    pub fn combine(&self, a: f64, other: &FieldSpec, b: f64) -> Result<FieldSpec> {
        if self.window != other.window {
            return Err(Error::Field("cannot combine fields with different windows".into()));
        }
        let terms = (self.terms.iter().map(|m| (m, a)))
            .chain(other.terms.iter().map(|m| (m, b)))
            .map(|(m, c)| Monomial { coeff: m.coeff * c, ..m.clone() })
            .collect();
        FieldSpec::new(terms, self.window)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, m) in self.terms.iter().enumerate() {
            let sep = match (i, m.coeff < 0.0) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            out += &format!("{sep}{}", m.coeff.abs());
            for (k, &e) in m.powers.iter().enumerate().filter(|(_, e)| **e > 0) {
                let v = if k == 0 { "t".to_string() } else { format!("x{k}") };
                out += &if e == 1 { format!("*{v}") } else { format!("*{v}^{e}") };
            }
        }
        if let Some(w) = self.window {
            let sep = if out.is_empty() { "" } else { " + " };
            out += &format!("{sep}window({},{})", w.r_in, w.r_out);
        }
        f.write_str(if out.is_empty() { "0" } else { &out })
    }
}

fn num(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Field(format!("not a number: '{s}'")))
}

/// Splits at top-level + and -, keeping exponent signs such as 1e-3.
fn split_terms(s: &str) -> Result<Vec<(f64, &str)>> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut sign = 1.0;
    for i in 0..b.len() {
        match b[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                let exp_sign = i >= 2 && matches!(b[i - 1], b'e' | b'E') && b[i - 2].is_ascii_digit();
                if exp_sign {
                    continue;
                }
                let here = if b[i] == b'-' { -1.0 } else { 1.0 };
                if i > start {
                    out.push((sign, &s[start..i]));
                    sign = here;
                } else if i == 0 {
                    sign = here;
                } else if matches!(b[i - 1], b'+' | b'-') && (i < 2 || !matches!(b[i - 2], b'+' | b'-')) && here < 0.0 {
                    // "a + -b", "a - -b"
                    sign *= here;
                } else {
                    return Err(Error::Field(format!("dangling operator in '{s}'")));
                }
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 || start >= b.len() {
        return Err(Error::Field(format!("malformed field '{s}'")));
    }
    out.push((sign, &s[start..]));
    Ok(out)
}

/// □φ = -∂_t²φ + Σ ∂_(x_k)²φ at `point`, which must sit where the window is
/// flat.
pub fn continuum_dalembertian(field: &FieldSpec, point: &[f64], center: &[f64]) -> Result<f64> {
    if let Some(w) = field.window {
        let r: f64 = point.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if r > w.r_in {
            return Err(Error::Field(format!("point at radius {r} is outside the window plateau {}", w.r_in)));
        }
    }
    Ok(field
        .terms
        .iter()
        .map(|m| {
            (0..point.len())
                .map(|k| {
                    let d2 = m.second_derivative(k, point);
                    if k == 0 {
                        -d2
                    } else {
                        d2
                    }
                })
                .sum::<f64>()
        })
        .sum())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerDecomposition {
    pub element: usize,
    /// layers[i] holds L_(i+1): past elements with i elements in between.
    pub layers: Vec<Vec<usize>>,
    /// Past elements deeper than the last layer.
    pub beyond: usize,
}

impl LayerDecomposition {
    pub fn sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }
}

pub fn layer_populations(m: &CausalMatrix, element: usize, n_layers: usize) -> Result<LayerDecomposition> {
    if element >= m.len() {
        return Err(Error::Invalid(format!("element {element} outside a {}-element set", m.len())));
    }
    let mut layers = vec![Vec::new(); n_layers];
    let mut beyond = 0;
    for y in m.past_of(element) {
        match layers.get_mut(m.between(y, element)) {
            Some(l) => l.push(y),
            None => beyond += 1,
        }
    }
    Ok(LayerDecomposition { element, layers, beyond })
}

fn layer_weights(c: &CoefficientSet) -> (f64, f64, Vec<f64>) {
    let cs = c.layer_coefficients.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect();
    (c.alpha.to_f64(), c.beta.to_f64(), cs)
}

/// l^-2 (α φ(x) + β Σ_i C_i Σ_(y∈L_i) φ(y)) with l = ρ^(-1/d) and the
/// window centred on x.
pub fn apply_b(
    coeffs: &CoefficientSet,
    s: &Sprinkle,
    m: &CausalMatrix,
    field: &FieldSpec,
    element: usize,
) -> Result<f64> {
    if coeffs.dim != s.dim {
        return Err(Error::Invalid(format!("coefficients for d={} on a d={} sprinkle", coeffs.dim, s.dim)));
    }
    if m.len() != s.len() {
        return Err(Error::Invalid("causal matrix does not belong to this sprinkle".into()));
    }
    field.check_dim(s.dim)?;
    let layers = layer_populations(m, element, coeffs.n_d)?;
    let (alpha, beta, cs) = layer_weights(coeffs);
    let x = s.point(element);
    let mut sum = 0.0;
    for (c, layer) in cs.iter().zip(&layers.layers) {
        sum += c * pairwise_sum(&layer.iter().map(|&y| field.value(s.point(y), x)).collect::<Vec<_>>());
    }
    let l2 = s.rho.powf(2.0 / s.dim as f64);
    Ok(l2 * (alpha * field.value(x, x) + beta * sum))
}

/// Fixed-shape pairwise summation, so the result depends only on the order
/// of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleConfig {
    pub diamond: DiamondSpec,
    pub field: String,
    pub runs: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleReport {
    pub values: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
    pub runs: usize,
    pub target: f64,
    pub seed: u64,
    pub config: EnsembleConfig,
}

impl EnsembleReport {
    pub fn deviation(&self) -> f64 {
        (self.mean - self.target).abs()
    }
}

/// B^(d)φ at the future tip over `runs` sprinkles; run r uses stream r of
/// `seed`.
pub fn ensemble_mean_b(
    spec: &DiamondSpec,
    field: &FieldSpec,
    coeffs: &CoefficientSet,
    runs: usize,
    seed: u64,
) -> Result<EnsembleReport> {
    if runs < 2 {
        return Err(Error::Invalid(format!("an ensemble needs at least 2 runs, got {runs}")));
    }
    if !spec.include_top {
        return Err(Error::Invalid("ensembles evaluate at the future tip; include_top must be set".into()));
    }
    field.check_dim(spec.dim)?;
    let mut tip = vec![0.0; spec.dim as usize];
    tip[0] = spec.tau / 2.0;
    let target = continuum_dalembertian(field, &tip, &tip)?;
    let values = (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let s = sprinkle(spec, seed, r)?;
            let m = CausalMatrix::new(&s);
            apply_b(coeffs, &s, &m, field, s.top_index.expect("tip included"))
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = runs as f64;
    let mean = pairwise_sum(&values) / n;
    let var = pairwise_sum(&values.iter().map(|v| (v - mean) * (v - mean)).collect::<Vec<_>>()) / (n - 1.0);
    Ok(EnsembleReport {
        mean,
        stderr: (var / n).sqrt(),
        runs,
        target,
        seed,
        config: EnsembleConfig { diamond: spec.clone(), field: field.to_string(), runs, seed },
        values,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalHistogram {
    /// counts[i] is N_(i+1): related pairs with i elements in between.
    pub counts: Vec<u64>,
    /// Pairs with at least `counts.len()` elements in between.
    pub overflow: u64,
}

pub fn interval_histogram(m: &CausalMatrix, max_size: usize) -> IntervalHistogram {
    let rows: Vec<(Vec<u64>, u64)> = (0..m.len())
        .into_par_iter()
        .map(|j| {
            let mut c = vec![0u64; max_size];
            let mut over = 0;
            for i in m.past_of(j) {
                match c.get_mut(m.between(i, j)) {
                    Some(x) => *x += 1,
                    None => over += 1,
                }
            }
            (c, over)
        })
        .collect();
    let mut counts = vec![0u64; max_size];
    let mut overflow = 0;
    for (c, o) in rows {
        counts.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        overflow += o;
    }
    IntervalHistogram { counts, overflow }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionValue {
    pub exact: ExactScalar,
    pub approx: f64,
}

/// ζ_d [N + (β_d/α_d) Σ C_i N_i], exact. `abundances` must hold N_1..N_(n_d).
pub fn action(coeffs: &CoefficientSet, n: u64, abundances: &[u64]) -> Result<ActionValue> {
    if abundances.len() < coeffs.n_d {
        return Err(Error::Invalid(format!(
            "action in d={} needs N_1..N_{}, got {} entries",
            coeffs.dim,
            coeffs.n_d,
            abundances.len()
        )));
    }
    let ba = coeffs.beta_over_alpha();
    let ba = ba
        .as_rational()
        .ok_or_else(|| Error::Invalid(format!("β/α = {ba} is not rational")))?;
    let weighted: BigRational = coeffs
        .layer_coefficients
        .iter()
        .zip(abundances)
        .map(|(c, &k)| c * BigRational::from_integer(BigInt::from(k)))
        .fold(BigRational::zero(), |a, b| a + b);
    let bracket = BigRational::from_integer(BigInt::from(n)) + ba * weighted;
    let exact = coeffs.zeta.scale(&bracket);
    Ok(ActionValue { approx: exact.to_f64(), exact })
}

/// Action of a sprinkled causal set.
pub fn sprinkle_action(coeffs: &CoefficientSet, m: &CausalMatrix) -> Result<ActionValue> {
    let h = interval_histogram(m, coeffs.n_d);
    action(coeffs, m.len() as u64, &h.counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::coefficient_set;
    use crate::hypergeom::rat;

    fn c2() -> CoefficientSet {
        coefficient_set(2, &rat(1, 1)).unwrap()
    }

    fn set(points: &[[f64; 2]], top: Option<usize>) -> (Sprinkle, CausalMatrix) {
        let pts: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
        let s = Sprinkle::from_points(2, 2.0, 1.0, 0, &pts, top).unwrap();
        let m = CausalMatrix::new(&s);
        (s, m)
    }

    #[test]
    fn parse_fields() {
        let f = FieldSpec::parse("1*t^2 + window(0.5,1)").unwrap();
        assert_eq!(f.terms, vec![Monomial { coeff: 1.0, powers: vec![2] }]);
        assert_eq!(f.window, Some(Window { r_in: 0.5, r_out: 1.0 }));
        let g = FieldSpec::parse("-2.5e-1*x1*x2^2 + 3 - t").unwrap();
        assert_eq!(g.terms.len(), 3);
        assert_eq!(g.terms[0], Monomial { coeff: -0.25, powers: vec![0, 1, 2] });
        assert_eq!(g.polynomial(&[1.0, 2.0, 1.0]), -0.5 + 3.0 - 1.0);
        assert_eq!(FieldSpec::parse(&g.to_string()).unwrap(), g);
        for bad in ["", "t^5", "y", "window(1,0.5)", "2*", "t++x1", "t-+x1", "t+--x1", "t-", "window(0.1,0.2)+window(0.1,0.3)"] {
            assert!(FieldSpec::parse(bad).is_err(), "{bad}");
        }
        assert!(FieldSpec::parse("x3").unwrap().check_dim(3).is_err());
        let h = FieldSpec::parse("t + -x1 - -2").unwrap();
        assert_eq!(h.polynomial(&[1.0, 1.0]), 1.0 - 1.0 + 2.0);
    }

    #[test]
    fn window_shape() {
        let w = Window::new(0.5, 1.0).unwrap();
        assert_eq!(w.at(0.2), 1.0);
        assert_eq!(w.at(1.2), 0.0);
        assert!((w.at(0.75) - 0.5).abs() < 1e-15);
        // first derivative vanishes at both ends
        let h = 1e-6;
        assert!((w.at(0.5 + h) - 1.0).abs() < 1e-12);
        assert!(w.at(1.0 - h) < 1e-12);
    }

    #[test]
    fn continuum_targets() {
        let o = [0.3, -0.2, 0.1];
        let f = |s: &str| continuum_dalembertian(&FieldSpec::parse(s).unwrap(), &o, &o).unwrap();
        assert_eq!(f("t^2"), -2.0);
        assert_eq!(f("x1^2"), 2.0);
        assert_eq!(f("7"), 0.0);
        assert!((f("t^2*x1^2") - (-2.0 * 0.04 + 2.0 * 0.09)).abs() < 1e-15);
        let w = FieldSpec::parse("t^2 + window(0.1,0.2)").unwrap();
        assert!(continuum_dalembertian(&w, &[0.5, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn hand_values_of_b() {
        let one = FieldSpec::parse("1").unwrap();
        let (s, m) = set(&[[0.0, 0.0]], Some(0));
        assert_eq!(apply_b(&c2(), &s, &m, &one, 0).unwrap(), -2.0);
        let (s, m) = set(&[[0.0, 0.0], [1.0, 0.0]], Some(1));
        assert_eq!(apply_b(&c2(), &s, &m, &one, 1).unwrap(), 2.0);
    }

    #[test]
    fn layers_and_histograms_of_chains() {
        let (_, m) = set(&[[0.0, 0.0], [1.0, 0.0]], None);
        let l = layer_populations(&m, 1, 3).unwrap();
        assert_eq!(l.layers, vec![vec![0], vec![], vec![]]);
        assert_eq!(interval_histogram(&m, 3).counts, vec![1, 0, 0]);
        let (_, m) = set(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], None);
        let l = layer_populations(&m, 2, 3).unwrap();
        assert_eq!(l.layers, vec![vec![1], vec![0], vec![]]);
        assert_eq!(interval_histogram(&m, 2), IntervalHistogram { counts: vec![2, 1], overflow: 0 });
        assert_eq!(interval_histogram(&m, 1), IntervalHistogram { counts: vec![2], overflow: 1 });
    }

    #[test]
    fn action_hand_values() {
        let c = c2();
        assert_eq!(action(&c, 1, &[0, 0, 0]).unwrap().exact, ExactScalar::int(2));
        let (_, anti) = set(&[[0.0, 0.0], [0.0, 1.0]], None);
        assert_eq!(sprinkle_action(&c, &anti).unwrap().exact, ExactScalar::int(4));
        let (_, chain) = set(&[[0.0, 0.0], [1.0, 0.0]], None);
        assert_eq!(sprinkle_action(&c, &chain).unwrap().exact, ExactScalar::int(0));
        assert!(action(&c, 1, &[0, 0]).is_err());
    }

    #[test]
    fn layer_identity_and_action_consistency() {
        for d in 2..=4 {
            let c = coefficient_set(d, &rat(1, 1)).unwrap();
            let spec = DiamondSpec::with_expected_count(d, 1.0, 40.0).unwrap();
            let s = sprinkle(&spec, 5, d as u64).unwrap();
            let m = CausalMatrix::new(&s);
            let one = FieldSpec::parse("1").unwrap();
            let (alpha, beta, cs) = layer_weights(&c);
            let ba = c.beta_over_alpha().to_f64();
            let mut total = 0.0;
            for x in 0..s.len() {
                let sizes = layer_populations(&m, x, c.n_d).unwrap().sizes();
                let layer_sum: f64 = cs.iter().zip(&sizes).map(|(c, &k)| c * k as f64).sum();
                let want = spec.rho.powf(2.0 / d as f64) * (alpha + beta * layer_sum);
                let got = apply_b(&c, &s, &m, &one, x).unwrap();
                assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{got} {want}");
                total += ba * layer_sum;
            }
            let h = interval_histogram(&m, c.n_d);
            let from_hist: f64 = cs.iter().zip(&h.counts).map(|(c, &k)| ba * c * k as f64).sum();
            assert!((total - from_hist).abs() < 1e-9 * from_hist.abs().max(1.0));
        }
    }

    #[test]
    fn ensemble_is_deterministic() {
        let spec = DiamondSpec::new(2, 2.0, 30.0).unwrap();
        let f = FieldSpec::parse("t^2 + window(0.3,0.8)").unwrap();
        let a = ensemble_mean_b(&spec, &f, &c2(), 6, 42).unwrap();
        let b = ensemble_mean_b(&spec, &f, &c2(), 6, 42).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.target, -2.0);
        assert!(ensemble_mean_b(&spec, &f, &c2(), 1, 42).is_err());
    }

    /// ∫_0^X P(i,x)/x dx, the mean size of L_i at the tip of a d=2 diamond
    /// with ρV = X. P is the regularised lower incomplete gamma function.
    fn expected_layer(i: usize, big_x: f64) -> f64 {
        let p = |x: f64| {
            let (mut term, mut s) = (1.0, 0.0);
            for k in 0..i {
                if k > 0 {
                    term *= x / k as f64;
                }
                s += term;
            }
            if x < 1e-3 {
                // 1 - e^-x Σ x^k/k! ≈ x^i/i! for small x
                let f: f64 = (1..=i).map(|k| k as f64).product();
                return x.powi(i as i32) / f;
            }
            1.0 - (-x).exp() * s
        };
        // integrate in u = ln x from ln(1e-8) to ln X, Simpson
        let (lo, hi) = (1e-8f64.ln(), big_x.ln());
        let n = 4000;
        let h = (hi - lo) / n as f64;
        let g = |u: f64| p(u.exp());
        let mut acc = g(lo) + g(hi);
        for k in 1..n {
            acc += g(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn mean_layer_sizes_match_the_integral() {
        let spec = DiamondSpec::new(2, 2.0, 50.0).unwrap();
        let runs = 3000u64;
        let mut sums = [0.0f64; 3];
        let mut sq = [0.0f64; 3];
        for r in 0..runs {
            let s = sprinkle(&spec, 11, r).unwrap();
            let m = CausalMatrix::new(&s);
            let sizes = layer_populations(&m, s.top_index.unwrap(), 3).unwrap().sizes();
            for i in 0..3 {
                sums[i] += sizes[i] as f64;
                sq[i] += (sizes[i] * sizes[i]) as f64;
            }
        }
        let n = runs as f64;
        for i in 0..3 {
            let mean = sums[i] / n;
            let se = ((sq[i] / n - mean * mean) / n).sqrt();
            let want = expected_layer(i + 1, spec.expected_count());
            assert!((mean - want).abs() < 4.0 * se, "L_{}: {mean} ± {se} vs {want}", i + 1);
        }
    }
}

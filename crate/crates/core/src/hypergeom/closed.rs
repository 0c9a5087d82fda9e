//! Closed form for pFq(a; b; -z) when every upper parameter sits an integer
//! away from a lower one.
//!
//! Then Π(a)_n/Π(b)_n = K·N(n)/Π(n+s)^m is rational in n. Splitting it as
//! Q(n) + Σ A_(s,r)/(n+s)^r and summing against (-z)^n/n! gives
//!
//! * Q in the falling-factorial basis: Σ c_j n(n-1)..(n-j+1) → e^-z Σ c_j (-z)^j
//! * 1/(n+s):   z^-s γ(s, z)
//! * 1/(n+s)^2: z^-s ∫_0^z t^(s-1) ln(z/t) e^-t dt
//!
//! The last two are replaced by their z→∞ forms z^-s Γ(s) and
//! z^-s (Γ(s) ln z - Γ'(s)); the dropped pieces are bounded by e^-z/z each.
//! The form is only used when that bound is negligible.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::PolynomialExact;
use super::series::{log2_abs_rat, log2_add};
use super::{to_f64, EvalConfig, HypergeometricSpec, Method, SeriesValue};
use crate::error::Result;
use crate::real::{gamma_with_derivative, Real};

#[derive(Clone, Debug)]
struct Pole {
    s: BigRational,
    /// coefficient of 1/(n+s)
    a1: BigRational,
    /// coefficient of 1/(n+s)^2
    a2: BigRational,
}

#[derive(Clone, Debug)]
struct Plan {
    k: BigRational,
    falling: Vec<BigRational>,
    poles: Vec<Pole>,
}

fn pair_up(spec: &HypergeometricSpec) -> Option<Vec<(BigRational, BigRational)>> {
    if spec.upper.len() != spec.lower.len() {
        return None;
    }
    let mut lower = spec.lower.clone();
    let mut pairs = Vec::new();
    for a in &spec.upper {
        let best = lower
            .iter()
            .enumerate()
            .filter(|(_, b)| (a - *b).is_integer())
            .min_by_key(|(_, b)| (a - *b).abs())
            .map(|(i, _)| i)?;
        pairs.push((a.clone(), lower.remove(best)));
    }
    Some(pairs)
}

fn build(spec: &HypergeometricSpec) -> Option<Plan> {
    let one = BigRational::one();
    let mut k = BigRational::one();
    let mut num = PolynomialExact::constant(one.clone());
    let mut poles: Vec<(BigRational, usize)> = Vec::new();
    for (a, b) in pair_up(spec)? {
        let off = &a - &b;
        let mut i = BigRational::zero();
        if off.is_positive() {
            // (b+n)_k / (b)_k
            while i < off {
                k /= &b + &i;
                num = num.mul(&PolynomialExact::linear(&b + &i));
                i += &one;
            }
        } else {
            // (a)_m / (a+n)_m
            while i < -off.clone() {
                k *= &a + &i;
                let s = &a + &i;
                match poles.iter_mut().find(|(p, _)| *p == s) {
                    Some(entry) => entry.1 += 1,
                    None => poles.push((s, 1)),
                }
                i += &one;
            }
        }
    }
    // cancel numerator roots against poles
    for (s, m) in poles.iter_mut() {
        while *m > 0 && num.eval(&-s.clone()).is_zero() {
            num = num.divrem(&PolynomialExact::linear(s.clone())).0;
            *m -= 1;
        }
    }
    poles.retain(|(_, m)| *m > 0);
    if poles.iter().any(|(s, m)| !s.is_positive() || *m > 2) {
        return None;
    }
    let factor = |skip: Option<&BigRational>| {
        poles
            .iter()
            .filter(|(s, _)| Some(s) != skip)
            .fold(PolynomialExact::constant(one.clone()), |acc, (s, m)| {
                (0..*m).fold(acc, |acc, _| acc.mul(&PolynomialExact::linear(s.clone())))
            })
    };
    let (quot, rem) = num.divrem(&factor(None));
    let mut out = Vec::new();
    for (s, m) in &poles {
        let other = factor(Some(s));
        let x = -s.clone();
        let r0 = rem.eval(&x);
        let d0 = other.eval(&x);
        let top = &r0 / &d0;
        let (a1, a2) = if *m == 1 {
            (top, BigRational::zero())
        } else {
            let r1 = rem.derivative().eval(&x);
            let d1 = other.derivative().eval(&x);
            ((r1 * &d0 - &r0 * d1) / (&d0 * &d0), top)
        };
        out.push(Pole { s: s.clone(), a1, a2 });
    }
    Some(Plan { k, falling: quot.falling_factorial_coeffs(), poles: out })
}

/// z^-s coefficient pair of the large-z expansion, the constant K already
/// folded in: pFq(-z) ~ Σ z^-s (a1 Γ(s) + a2 (Γ(s) ln z - Γ'(s))), up to
/// exponentially small terms.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleTerm {
    pub s: BigRational,
    pub a1: BigRational,
    pub a2: BigRational,
}

/// `None` when some upper parameter has no integer-offset partner or a pole
/// is not simple or double at positive s.
pub fn asymptotic_poles(spec: &HypergeometricSpec) -> Option<Vec<PoleTerm>> {
    let plan = build(spec)?;
    Some(
        plan.poles
            .into_iter()
            .map(|p| PoleTerm { a1: &p.a1 * &plan.k, a2: &p.a2 * &plan.k, s: p.s })
            .collect(),
    )
}

const LOG2_E: f64 = std::f64::consts::LOG2_E;

pub(super) fn eval_closed(spec: &HypergeometricSpec, z: &BigRational, cfg: &EvalConfig) -> Result<Option<SeriesValue>> {
    let Some(plan) = build(spec) else { return Ok(None) };
    if !z.is_positive() {
        return Ok(None);
    }
    let bits = cfg.bits();
    let zf = to_f64(z);
    let lz = zf.log2();
    // tails of the pole pieces, each at most e^-z / (z (1 - (s+r-2)/z))
    let mut tail = f64::NEG_INFINITY;
    for p in &plan.poles {
        for (r, a) in [(1.0, &p.a1), (2.0, &p.a2)] {
            if a.is_zero() {
                continue;
            }
            let u = to_f64(&p.s) + r - 2.0;
            if zf <= u + 1.0 {
                return Ok(None);
            }
            let f = if u > 0.0 { -(1.0 - u / zf).log2() } else { 0.0 };
            tail = log2_add(tail, log2_abs_rat(a) - zf * LOG2_E - lz + f);
        }
    }
    // the e^-z polynomial is computed when representable, else bounded
    let mz = -z.clone();
    let poly_at: BigRational = plan
        .falling
        .iter()
        .enumerate()
        .map(|(j, c)| c * num_traits::Pow::pow(&mz, j))
        .sum();
    let drop_poly = zf > 1e7;
    if drop_poly && !poly_at.is_zero() {
        tail = log2_add(tail, log2_abs_rat(&poly_at) - zf * LOG2_E);
    }
    let k_log2 = log2_abs_rat(&plan.k);
    if drop_poly && plan.poles.is_empty() {
        // the whole function is e^-z times a polynomial: zero to within the bound
        return Ok(Some(SeriesValue {
            value: Real::zero(bits + 64),
            tail_bound: Real::from_log2(tail + k_log2, 64),
            terms: 0,
            method: Method::ClosedForm,
        }));
    }
    let mut work = bits + 64;
    for _ in 0..4 {
        let zr = Real::from_ratio(z, work);
        let ln_z = zr.ln(work);
        let mut parts: Vec<Real> = Vec::new();
        if !drop_poly && !poly_at.is_zero() {
            let e = zr.neg().exp(work);
            parts.push(e.mul(&Real::from_ratio(&poly_at, work), work));
        }
        for p in &plan.poles {
            let (g, dg) = gamma_with_derivative(&p.s, work);
            let zs = ln_z.mul(&Real::from_ratio(&p.s, work), work).neg().exp(work);
            if !p.a1.is_zero() {
                parts.push(zs.mul(&g, work).mul(&Real::from_ratio(&p.a1, work), work));
            }
            if !p.a2.is_zero() {
                let inner = g.mul(&ln_z, work).sub(&dg, work);
                parts.push(zs.mul(&inner, work).mul(&Real::from_ratio(&p.a2, work), work));
            }
        }
        let mut sum = Real::zero(work);
        let mut biggest = f64::NEG_INFINITY;
        for x in &parts {
            biggest = biggest.max(x.log2_abs());
            sum = sum.add(x, work);
        }
        let value = sum.mul(&Real::from_ratio(&plan.k, work), work);
        let slack = biggest + k_log2 + 8.0 - work as f64;
        let bound = log2_add(tail + k_log2, slack);
        let rel = bound - value.log2_abs();
        if rel <= -(bits as f64) - 2.0 {
            return Ok(Some(SeriesValue {
                value,
                tail_bound: Real::from_log2(bound, 64),
                terms: parts.len(),
                method: Method::ClosedForm,
            }));
        }
        if tail + k_log2 - value.log2_abs() > -(bits as f64) - 2.0 {
            // the asymptotic replacement is not accurate enough at this z
            return Ok(None);
        }
        work *= 2;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::super::{eval_pfq, rat};
    use super::*;

    fn spec(u: &[(i64, i64)], l: &[(i64, i64)]) -> HypergeometricSpec {
        HypergeometricSpec::new(
            u.iter().map(|&(n, d)| rat(n, d)).collect(),
            l.iter().map(|&(n, d)| rat(n, d)).collect(),
        )
        .unwrap()
    }

    fn both(s: &HypergeometricSpec, z: i64) -> (Real, Real) {
        let cfg = EvalConfig { method: Method::FixedPoint, ..EvalConfig::with_digits(30) };
        let a = eval_pfq(s, &rat(z, 1), &cfg).unwrap().value;
        let cfg = EvalConfig { method: Method::ClosedForm, ..EvalConfig::with_digits(30) };
        let b = eval_pfq(s, &rat(z, 1), &cfg).unwrap().value;
        (a, b)
    }

    fn close(a: &Real, b: &Real) -> bool {
        let d = a.sub(b, 200);
        d.is_zero() || d.log2_abs() - a.log2_abs() < -95.0
    }

    #[test]
    fn simple_pole_agrees_with_series() {
        // z^a0 pFq(a0, a; a0+1, a-1; -z)
        let s = spec(&[(1, 2), (3, 1)], &[(3, 2), (2, 1)]);
        let (a, b) = both(&s, 400);
        assert!(close(&a, &b), "{a} vs {b}");
    }

    #[test]
    fn double_pole_agrees_with_series() {
        let s = spec(&[(1, 1), (1, 1), (2, 1)], &[(2, 1), (2, 1), (1, 1)]);
        let (a, b) = both(&s, 300);
        assert!(close(&a, &b), "{a} vs {b}");
        let s = spec(&[(2, 3), (2, 3), (5, 3), (7, 3)], &[(5, 3), (5, 3), (2, 3), (4, 3)]);
        let (a, b) = both(&s, 500);
        assert!(close(&a, &b), "{a} vs {b}");
    }

    #[test]
    fn pure_polynomial_part() {
        // e^z 1F1(3; 1; -z) = 1 - 2z + z^2/2
        let s = spec(&[(3, 1)], &[(1, 1)]);
        let (a, b) = both(&s, 200);
        assert!(close(&a, &b), "{a} vs {b}");
        // far out it is zero to within e^-z
        let v = eval_closed(&s, &rat(100_000_000, 1), &EvalConfig::default()).unwrap().unwrap();
        assert!(v.value.is_zero() && v.tail_bound.log2_abs() < -1e8);
    }

    #[test]
    fn poles_of_the_gamma_limit() {
        // z^(1/2) 2F2(1/2, 3; 3/2, 2; -z) -> Γ(3/2)·3/4 = Γ(1/2)·3/8
        let s = spec(&[(1, 2), (3, 1)], &[(3, 2), (2, 1)]);
        let p = asymptotic_poles(&s).unwrap();
        assert_eq!(p, vec![PoleTerm { s: rat(1, 2), a1: rat(3, 8), a2: rat(0, 1) }]);
        assert!(asymptotic_poles(&spec(&[(1, 3)], &[(1, 2)])).is_none());
    }

    #[test]
    fn declines_when_not_applicable() {
        let s = spec(&[(1, 3)], &[(1, 2)]);
        assert!(build(&s).is_none());
        let s = spec(&[(1, 2), (3, 1)], &[(3, 2), (2, 1)]);
        let cfg = EvalConfig::with_digits(30);
        // too small a z for the dropped tails
        assert!(eval_closed(&s, &rat(5, 1), &cfg).unwrap().is_none());
    }
}

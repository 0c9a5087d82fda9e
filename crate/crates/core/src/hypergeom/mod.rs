//! Generalized hypergeometric series at negative argument.
//!
//! `eval_pfq` sums pFq(a; b; -z) with one of three engines:
//!
//! * exact rational summation, no rounding at all (small z),
//! * a fixed-point big-integer series whose rounding error is tracked term by
//!   term (moderate z),
//! * a closed form for specs whose upper and lower parameters pair up with
//!   integer offsets, where the term ratio is a rational function of n and the
//!   sum splits into e^-z times a polynomial plus incomplete-Γ pieces (any z).
//!
//! Every result carries a rigorous bound on its distance from the true sum.

mod closed;
pub mod limits;
pub mod operator;
pub mod poly;
mod series;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::real::{self, Real};

pub use closed::{asymptotic_poles, PoleTerm};
pub use limits::{verify_limit_flat, verify_limit_gamma, LimitReport, LimitRow};
pub use operator::{
    apply_od_to_exponential, generating_polynomial, od_operator_polynomial, operator_spec,
};
pub use poly::PolynomialExact;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HypergeometricSpec {
    pub upper: Vec<BigRational>,
    pub lower: Vec<BigRational>,
}

fn is_nonpositive_integer(x: &BigRational) -> bool {
    x.is_integer() && !x.is_positive()
}

impl HypergeometricSpec {
    pub fn new(upper: Vec<BigRational>, lower: Vec<BigRational>) -> Result<Self> {
        if upper.is_empty() || lower.is_empty() {
            return Err(Error::EmptySpec);
        }
        Self::unchecked(upper, lower)
    }

    /// Like [`new`](Self::new) but allows empty lists (0F0 and friends appear
    /// after cancellation).
    pub(crate) fn unchecked(upper: Vec<BigRational>, lower: Vec<BigRational>) -> Result<Self> {
        if let Some(b) = lower.iter().find(|b| is_nonpositive_integer(b)) {
            return Err(Error::LowerPole(b.to_string()));
        }
        Ok(HypergeometricSpec { upper, lower })
    }

    /// Cancel upper/lower pairs that coincide.
    pub fn reduced(&self) -> Self {
        let mut lower = self.lower.clone();
        let mut upper = Vec::new();
        for a in &self.upper {
            if let Some(pos) = lower.iter().position(|b| b == a) {
                lower.remove(pos);
            } else {
                upper.push(a.clone());
            }
        }
        HypergeometricSpec { upper, lower }
    }

    /// All parameters shifted by one, with the factor Πa/Πb that the
    /// z-derivative brings down: d/dz F(a;b;-z) = -(Πa/Πb) F(a+1;b+1;-z).
    pub fn derivative(&self) -> (BigRational, Self) {
        let one = BigRational::one();
        let pa: BigRational = self.upper.iter().product();
        let pb: BigRational = self.lower.iter().product();
        let spec = HypergeometricSpec {
            upper: self.upper.iter().map(|a| a + &one).collect(),
            lower: self.lower.iter().map(|b| b + &one).collect(),
        };
        (pa / pb, spec)
    }

    /// Π(a+n)/Π(b+n)/(n+1), the term ratio without the -z.
    pub fn term_ratio(&self, n: u64) -> BigRational {
        let nn = BigRational::from_integer(n.into());
        let mut r = BigRational::from_integer((n + 1).into()).recip();
        for a in &self.upper {
            r *= a + &nn;
        }
        for b in &self.lower {
            r /= b + &nn;
        }
        r
    }

    /// Series coefficient Π(a)_n/Π(b)_n/n! of (-z)^n.
    pub fn coefficient(&self, n: u64) -> BigRational {
        (0..n).map(|k| self.term_ratio(k)).product()
    }

    /// Upper bound on |t_(k+1)/t_k| valid for every k >= n, or `None` when n
    /// is not yet past the lower parameters (or p > q, which diverges).
    fn ratio_bound(&self, z: f64, n: u64) -> Option<f64> {
        if self.upper.len() > self.lower.len() {
            return None;
        }
        let nf = n as f64;
        let mut r = z / (nf + 1.0);
        for (j, b) in self.lower.iter().enumerate() {
            let bf = to_f64(b);
            if nf + bf <= 0.0 {
                return None;
            }
            match self.upper.get(j) {
                Some(a) => r *= 1.0 + (to_f64(a) - bf).abs() / (nf + bf),
                None => r /= nf + bf,
            }
        }
        Some(r * (1.0 + 1e-12))
    }
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

fn fmt_list(v: &[BigRational]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for HypergeometricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}F{}({}; {})",
            self.upper.len(),
            self.lower.len(),
            fmt_list(&self.upper),
            fmt_list(&self.lower)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Auto,
    Exact,
    FixedPoint,
    ClosedForm,
}

#[derive(Clone, Debug)]
pub struct EvalConfig {
    /// Requested relative precision in decimal digits.
    pub digits: u32,
    /// Largest z summed in exact rational arithmetic under `Method::Auto`.
    pub exact_zmax: BigRational,
    /// Above this z, `Method::Auto` prefers the closed form when it applies.
    pub series_zmax: BigRational,
    pub term_cap: usize,
    pub method: Method,
    /// Extra bits added to the stop threshold; used to probe tail soundness.
    pub stop_extra_bits: u32,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            digits: 30,
            exact_zmax: BigRational::from_integer(50.into()),
            series_zmax: BigRational::from_integer(1000.into()),
            term_cap: 1_000_000,
            method: Method::Auto,
            stop_extra_bits: 0,
        }
    }
}

impl EvalConfig {
    pub fn with_digits(digits: u32) -> Self {
        EvalConfig { digits, ..Default::default() }
    }

    pub(crate) fn bits(&self) -> usize {
        real::digits_to_bits(self.digits)
    }
}

#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub value: Real,
    /// Bound on |value - true sum|.
    pub tail_bound: Real,
    /// Series terms summed (for the closed form, pieces combined).
    pub terms: usize,
    pub method: Method,
}

impl SeriesValue {
    /// log2 of the bound relative to the value; `-inf` for an exact zero bound.
    pub fn relative_log2_error(&self) -> f64 {
        self.tail_bound.log2_abs() - self.value.log2_abs()
    }
}

/// pFq(a; b; -z) for `z >= 0`.
pub fn eval_pfq(spec: &HypergeometricSpec, z: &BigRational, cfg: &EvalConfig) -> Result<SeriesValue> {
    if z.is_negative() {
        return Err(Error::Invalid(format!("argument must be -z with z >= 0, got z = {z}")));
    }
    if cfg.digits < 10 {
        return Err(Error::Invalid("precision must be at least 10 digits".into()));
    }
    let spec = spec.reduced();
    if spec.upper.len() > spec.lower.len() + 1 || (spec.upper.len() == spec.lower.len() + 1 && !z.is_zero()) {
        return Err(Error::Invalid(format!("{spec} does not converge at z = {z}")));
    }
    match cfg.method {
        Method::Exact => series::eval_exact(&spec, z, cfg),
        Method::FixedPoint => series::eval_fixed(&spec, z, cfg),
        Method::ClosedForm => closed::eval_closed(&spec, z, cfg)?
            .ok_or_else(|| Error::Invalid(format!("no closed form for {spec} at z = {z}"))),
        Method::Auto => {
            if *z <= cfg.exact_zmax {
                return series::eval_exact(&spec, z, cfg);
            }
            if *z > cfg.series_zmax {
                if let Some(v) = closed::eval_closed(&spec, z, cfg)? {
                    return Ok(v);
                }
            }
            series::eval_fixed(&spec, z, cfg)
        }
    }
}

/// Helper for callers that build parameters from small integers.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(u: &[(i64, i64)], l: &[(i64, i64)]) -> HypergeometricSpec {
        HypergeometricSpec::new(
            u.iter().map(|&(n, d)| rat(n, d)).collect(),
            l.iter().map(|&(n, d)| rat(n, d)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn exponential() {
        let v = eval_pfq(&spec(&[(1, 1)], &[(1, 1)]), &rat(1, 1), &EvalConfig::default()).unwrap();
        assert_eq!(v.value.to_decimal(10), "0.3678794412");
        let one = eval_pfq(&spec(&[(2, 1)], &[(1, 1)]), &rat(0, 1), &EvalConfig::default()).unwrap();
        assert_eq!(one.value.to_decimal(12), "1.00000000000");
    }

    #[test]
    fn brute_force_partial_sum() {
        let s = spec(&[(3, 2), (3, 1)], &[(1, 2), (2, 1)]);
        let z = rat(1, 1);
        let mut direct = BigRational::zero();
        for n in 0..200u64 {
            let c = s.coefficient(n);
            direct += if n % 2 == 0 { c } else { -c };
        }
        let v = eval_pfq(&s, &z, &EvalConfig::default()).unwrap();
        let diff = v.value.sub(&Real::from_ratio(&direct, 200), 200);
        assert!(diff.to_f64().abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            HypergeometricSpec::new(vec![rat(1, 1)], vec![rat(-2, 1)]),
            Err(Error::LowerPole(_))
        ));
        assert!(matches!(HypergeometricSpec::new(vec![], vec![rat(1, 1)]), Err(Error::EmptySpec)));
        let s = spec(&[(1, 1)], &[(2, 1)]);
        assert!(eval_pfq(&s, &rat(-1, 1), &EvalConfig::default()).is_err());
        assert!(eval_pfq(&s, &rat(1, 1), &EvalConfig::with_digits(5)).is_err());
    }

    #[test]
    fn reduction_and_derivative() {
        let s = spec(&[(2, 1), (3, 1)], &[(1, 1), (2, 1)]);
        assert_eq!(s.reduced(), HypergeometricSpec { upper: vec![rat(3, 1)], lower: vec![rat(1, 1)] });
        let s = spec(&[(1, 3), (2, 3)], &[(4, 3), (5, 3)]);
        let (f, d) = s.derivative();
        assert_eq!(f, rat(1, 3) * rat(2, 3) / (rat(4, 3) * rat(5, 3)));
        assert_eq!(d, spec(&[(4, 3), (5, 3)], &[(7, 3), (8, 3)]));
    }
}

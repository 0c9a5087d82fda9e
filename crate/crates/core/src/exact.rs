//! Exact scalars of the form `q · π^e0 · Π p^ep · Π Γ(x)^ex`.
//!
//! `q` is a rational in lowest terms, prime exponents are reduced into
//! `[0, 1)` with the integer part folded into `q`, and Γ atoms only ever carry
//! arguments in `(0, 1)` other than `1/2`. With those rules two scalars are
//! equal exactly when their representations are equal, which is what the
//! ratio identities rely on.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::real::{self, Real};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Pi,
    Prime(u64),
    Gamma(BigRational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactScalar {
    coeff: BigRational,
    atoms: BTreeMap<Atom, BigRational>,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn factor(mut n: BigInt) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p: u64 = 2;
    while n > BigInt::one() {
        let pb = BigInt::from(p);
        if &pb * &pb > n {
            let last = n.to_u64().expect("prime factor too large to represent");
            out.push((last, 1));
            break;
        }
        let mut e = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
        assert!(p < 10_000_000, "refusing to factor a rational with a huge prime factor");
    }
    out
}

impl ExactScalar {
    pub fn rational(q: BigRational) -> Self {
        ExactScalar { coeff: q, atoms: BTreeMap::new() }
    }

    pub fn int(v: i64) -> Self {
        Self::rational(BigRational::from_integer(v.into()))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(ratio(n, d))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn pi_pow(e: BigRational) -> Self {
        let mut s = Self::one();
        s.push(Atom::Pi, e);
        s
    }

    /// `base^e` for a positive rational base.
    pub fn rational_pow(base: &BigRational, e: &BigRational) -> Self {
        Self::rational(base.clone()).pow(e)
    }

    /// Γ(x) for rational `x` off the poles, reduced by the recurrence until the
    /// argument lands in `(0, 1]`; Γ(1) = 1 and Γ(1/2) = √π are resolved.
    pub fn gamma(x: &BigRational) -> Self {
        assert!(!(x.is_integer() && !x.is_positive()), "Γ pole at {x}");
        let one = BigRational::one();
        let mut x0 = x.clone();
        let mut q = BigRational::one();
        while x0 > one {
            x0 -= &one;
            q *= &x0;
        }
        while !x0.is_positive() {
            q /= &x0;
            x0 += &one;
        }
        let mut s = Self::rational(q);
        if x0 == one {
            // nothing left
        } else if x0 == ratio(1, 2) {
            s.push(Atom::Pi, ratio(1, 2));
        } else {
            s.push(Atom::Gamma(x0), one);
        }
        s
    }

    fn push(&mut self, atom: Atom, e: BigRational) {
        if self.coeff.is_zero() {
            return;
        }
        let total = self.atoms.remove(&atom).unwrap_or_else(BigRational::zero) + e;
        match atom {
            Atom::Prime(p) => {
                let whole = total.floor();
                let rest = &total - &whole;
                let k = whole.to_integer();
                let pk = num_traits::pow(BigInt::from(p), k.abs().to_usize().expect("exponent"));
                if k.is_negative() {
                    self.coeff /= BigRational::from_integer(pk);
                } else {
                    self.coeff *= BigRational::from_integer(pk);
                }
                if !rest.is_zero() {
                    self.atoms.insert(Atom::Prime(p), rest);
                }
            }
            other => {
                if !total.is_zero() {
                    self.atoms.insert(other, total);
                }
            }
        }
    }

    pub fn mul(&self, o: &ExactScalar) -> ExactScalar {
        let mut out = ExactScalar::rational(&self.coeff * &o.coeff);
        if out.coeff.is_zero() {
            return out;
        }
        for (a, e) in self.atoms.iter().chain(o.atoms.iter()) {
            out.push(a.clone(), e.clone());
        }
        out
    }

    pub fn recip(&self) -> ExactScalar {
        assert!(!self.is_zero(), "reciprocal of zero");
        let mut out = ExactScalar::rational(self.coeff.recip());
        for (a, e) in &self.atoms {
            out.push(a.clone(), -e.clone());
        }
        out
    }

    pub fn div(&self, o: &ExactScalar) -> ExactScalar {
        self.mul(&o.recip())
    }

    pub fn neg(&self) -> ExactScalar {
        ExactScalar { coeff: -self.coeff.clone(), atoms: self.atoms.clone() }
    }

    pub fn scale(&self, q: &BigRational) -> ExactScalar {
        self.mul(&ExactScalar::rational(q.clone()))
    }

    /// Rational power. Fractional exponents need a positive value.
    pub fn pow(&self, e: &BigRational) -> ExactScalar {
        if e.is_zero() {
            return ExactScalar::one();
        }
        if self.is_zero() {
            assert!(e.is_positive(), "zero to a non-positive power");
            return ExactScalar::zero();
        }
        let mut out = ExactScalar::one();
        if e.is_integer() {
            let k = e.to_integer().to_i32().expect("exponent fits i32");
            out.coeff = num_traits::Pow::pow(&self.coeff, k);
        } else {
            assert!(self.coeff.is_positive(), "fractional power of a negative scalar");
            for (p, k) in factor(self.coeff.numer().clone()) {
                out.push(Atom::Prime(p), e * BigRational::from_integer(k.into()));
            }
            for (p, k) in factor(self.coeff.denom().clone()) {
                out.push(Atom::Prime(p), -(e * BigRational::from_integer(k.into())));
            }
        }
        for (a, x) in &self.atoms {
            out.push(a.clone(), x * e);
        }
        out
    }

    pub fn sqrt(&self) -> ExactScalar {
        self.pow(&ratio(1, 2))
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Sign of the value; every atom is positive.
    pub fn signum(&self) -> i32 {
        if self.coeff.is_zero() {
            0
        } else if self.coeff.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Atom, &BigRational)> {
        self.atoms.iter()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.atoms.is_empty().then_some(&self.coeff)
    }

    pub fn to_real(&self, prec: usize) -> Real {
        let work = prec + 32;
        let mut acc = Real::from_ratio(&self.coeff, work);
        for (a, e) in &self.atoms {
            let f = match a {
                Atom::Pi => Real::pi(work).pow_ratio(e, work),
                Atom::Prime(p) => Real::from_i64(*p as i64, work).pow_ratio(e, work),
                Atom::Gamma(x) => real::gamma(x, work).pow_ratio(e, work),
            };
            acc = acc.mul(&f, work);
        }
        acc.mul(&Real::one(prec), prec)
    }

    pub fn to_decimal(&self, digits: u32) -> String {
        self.to_real(real::digits_to_bits(digits) + 64).to_decimal(digits)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_real(128).to_f64()
    }
}

fn fmt_ratio(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_exp(e: &BigRational) -> String {
    if e.is_one() {
        String::new()
    } else {
        format!("^({})", fmt_ratio(e))
    }
}

impl fmt::Display for ExactScalar {
    /// e.g. `-2/3 * 6^(1/2)` or `3 * pi^(1/2) * gamma(1/3)^(-1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![fmt_ratio(&self.coeff)];
        // primes sharing an exponent print as one radical
        let mut by_exp: BTreeMap<BigRational, BigInt> = BTreeMap::new();
        for (a, e) in &self.atoms {
            if let Atom::Prime(p) = a {
                *by_exp.entry(e.clone()).or_insert_with(BigInt::one) *= *p;
            }
        }
        for (a, e) in &self.atoms {
            if let Atom::Pi = a {
                parts.push(format!("pi{}", fmt_exp(e)));
            }
        }
        for (e, base) in by_exp.iter().rev() {
            parts.push(format!("{base}{}", fmt_exp(e)));
        }
        for (a, e) in &self.atoms {
            if let Atom::Gamma(x) = a {
                parts.push(format!("gamma({}){}", fmt_ratio(x), fmt_exp(e)));
            }
        }
        if parts.len() > 1 && parts[0] == "1" {
            parts.remove(0);
        } else if parts.len() > 1 && parts[0] == "-1" {
            parts.remove(0);
            parts[0] = format!("-{}", parts[0]);
        }
        write!(f, "{}", parts.join(" * "))
    }
}

/// Γ(a)/Γ(b) for `a - b` an integer, as an exact rational.
pub fn gamma_ratio(a: &BigRational, b: &BigRational) -> BigRational {
    let diff = a - b;
    assert!(diff.is_integer(), "Γ ratio needs an integer offset");
    let k = diff.to_integer().to_i64().expect("offset fits i64");
    let mut out = BigRational::one();
    if k >= 0 {
        for j in 0..k {
            out *= b + BigRational::from_integer(j.into());
        }
    } else {
        for j in 0..(-k) {
            out /= a + BigRational::from_integer(j.into());
        }
    }
    out
}

/// Rising factorial (x)_n.
pub fn pochhammer(x: &BigRational, n: u64) -> BigRational {
    let mut out = BigRational::one();
    for j in 0..n {
        out *= x + BigRational::from_integer(j.into());
    }
    out
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut out = BigInt::one();
    for j in 0..k {
        out = out * (n - j) / (j + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_reduction() {
        assert_eq!(ExactScalar::gamma(&ratio(5, 1)), ExactScalar::int(24));
        // Γ(3/2) = √π / 2
        let g = ExactScalar::gamma(&ratio(3, 2));
        assert_eq!(g, ExactScalar::pi_pow(ratio(1, 2)).scale(&ratio(1, 2)));
        // Γ(5/3) = 2/3 Γ(2/3)
        assert_eq!(ExactScalar::gamma(&ratio(5, 3)).to_string(), "2/3 * gamma(2/3)");
        assert_eq!(ExactScalar::gamma(&ratio(-1, 2)).to_string(), "-2 * pi^(1/2)");
    }

    #[test]
    fn radicals_normalise() {
        // 4/√6 = 2/3 · √6
        let s = ExactScalar::int(4).div(&ExactScalar::int(6).sqrt());
        assert_eq!(s.to_string(), "2/3 * 6^(1/2)");
        let t = ExactScalar::int(2).sqrt().mul(&ExactScalar::int(2).sqrt());
        assert_eq!(t, ExactScalar::int(2));
        let cube = ExactScalar::int(2).pow(&ratio(1, 3)).pow(&ratio(3, 1));
        assert_eq!(cube, ExactScalar::int(2));
    }

    #[test]
    fn decimal_agrees_with_double_precision_rendering() {
        let s = ExactScalar::gamma(&ratio(1, 3)).mul(&ExactScalar::int(7).pow(&ratio(2, 5)));
        let a = s.to_decimal(50);
        let b = s.to_decimal(100);
        assert_eq!(&a[..40], &b[..40]);
        assert!((s.to_f64() - 2.678_938_534_707_747_5 * 7f64.powf(0.4)).abs() < 1e-12);
    }

    #[test]
    fn helpers() {
        assert_eq!(gamma_ratio(&ratio(7, 2), &ratio(3, 2)), ratio(15, 4));
        assert_eq!(gamma_ratio(&ratio(3, 2), &ratio(7, 2)), ratio(4, 15));
        assert_eq!(pochhammer(&ratio(1, 2), 3), ratio(15, 8));
        assert_eq!(binomial(6, 3), BigInt::from(20));
    }
}

//! Arbitrary-precision reals backed by `astro-float`, plus the special
//! functions the rest of the crate needs at rational arguments: Γ(s) and its
//! derivative.
//!
//! Every operation takes an explicit precision in bits. Rounding is always to
//! nearest-even; callers that need error bounds carry guard bits themselves.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Bits needed to carry `digits` significant decimal digits.
pub fn digits_to_bits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize
}

#[derive(Clone, Debug)]
pub struct Real(BigFloat);

impl Real {
    pub fn zero(prec: usize) -> Self {
        Real(BigFloat::from_word(0, prec.max(64)))
    }

    pub fn one(prec: usize) -> Self {
        Real(BigFloat::from_word(1, prec.max(64)))
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        Real(BigFloat::from_i64(v, prec.max(64)))
    }

    pub fn from_f64(v: f64, prec: usize) -> Self {
        Real(BigFloat::from_f64(v, prec.max(64)))
    }

    pub fn from_bigint(v: &BigInt, prec: usize) -> Self {
        if v.is_zero() {
            return Real::zero(prec);
        }
        let (sign, words) = v.to_u64_digits();
        let s = if sign == num_bigint::Sign::Minus { Sign::Neg } else { Sign::Pos };
        let mut f = BigFloat::from_words(&words, s, (64 * words.len()) as i32);
        f.set_precision(prec.max(64), RM).expect("precision change");
        Real(f)
    }

    pub fn from_ratio(v: &BigRational, prec: usize) -> Self {
        let p = prec.max(64);
        let n = Real::from_bigint(v.numer(), p + 64);
        if v.denom().is_one() {
            let mut r = n;
            r.0.set_precision(p, RM).expect("precision change");
            return r;
        }
        let d = Real::from_bigint(v.denom(), p + 64);
        n.div(&d, p)
    }

    /// 2^k exactly.
    pub fn pow2(k: i64, prec: usize) -> Self {
        let mut f = BigFloat::from_word(1, prec.max(64));
        if k != 0 {
            let e = f.exponent().expect("normal one") as i64 + k;
            let e = i32::try_from(e).expect("binary exponent in range");
            f.set_exponent(e);
        }
        Real(f)
    }

    /// 2^l for a real `l`, to about f64 accuracy. Values too small for the
    /// exponent range are raised to 2^-(2^30), so bounds stay bounds.
    pub fn from_log2(l: f64, prec: usize) -> Self {
        if l == f64::NEG_INFINITY {
            return Real::zero(prec);
        }
        let k = l.floor().max(-((1i64 << 30) as f64));
        let l = l.max(k);
        Real::from_f64((l - k).exp2(), prec).mul(&Real::pow2(k as i64, prec), prec)
    }

    pub fn pi(prec: usize) -> Self {
        Real(with_consts(|cc| cc.pi(prec.max(64), RM)))
    }

    pub fn add(&self, o: &Real, prec: usize) -> Real {
        Real(self.0.add(&o.0, prec.max(64), RM))
    }

    pub fn sub(&self, o: &Real, prec: usize) -> Real {
        Real(self.0.sub(&o.0, prec.max(64), RM))
    }

    pub fn mul(&self, o: &Real, prec: usize) -> Real {
        Real(self.0.mul(&o.0, prec.max(64), RM))
    }

    pub fn div(&self, o: &Real, prec: usize) -> Real {
        Real(self.0.div(&o.0, prec.max(64), RM))
    }

    pub fn mul_ratio(&self, r: &BigRational, prec: usize) -> Real {
        self.mul(&Real::from_ratio(r, prec + 32), prec)
    }

    pub fn neg(&self) -> Real {
        let mut r = self.0.clone();
        r.inv_sign();
        Real(r)
    }

    pub fn abs(&self) -> Real {
        Real(self.0.abs())
    }

    pub fn exp(&self, prec: usize) -> Real {
        Real(with_consts(|cc| self.0.exp(prec.max(64), RM, cc)))
    }

    pub fn ln(&self, prec: usize) -> Real {
        Real(with_consts(|cc| self.0.ln(prec.max(64), RM, cc)))
    }

    pub fn sqrt(&self, prec: usize) -> Real {
        Real(self.0.sqrt(prec.max(64), RM))
    }

    /// `self^e` for an exact rational exponent. Integer exponents use repeated
    /// multiplication; fractional exponents require `self > 0`.
    pub fn pow_ratio(&self, e: &BigRational, prec: usize) -> Real {
        let p = prec.max(64);
        if e.is_zero() {
            return Real::one(p);
        }
        if e.is_integer() {
            let k = e.to_integer();
            let mag = k.abs().to_usize().expect("integer exponent fits usize");
            let base = Real(self.0.powi(mag, p + 32, RM));
            let r = if k.is_negative() { Real::one(p).div(&base, p) } else { base };
            let mut out = r;
            out.0.set_precision(p, RM).expect("precision change");
            return out;
        }
        assert!(self.signum() > 0, "fractional power of a non-positive real");
        let work = p + 32;
        let l = self.ln(work);
        l.mul_ratio(e, work).exp(p)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn signum(&self) -> i32 {
        if self.0.is_zero() {
            0
        } else if self.0.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn cmp_abs(&self, o: &Real) -> Ordering {
        match self.0.abs_cmp(&o.0) {
            Some(c) if c < 0 => Ordering::Less,
            Some(0) => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    pub fn cmp_value(&self, o: &Real) -> Ordering {
        match self.0.cmp(&o.0) {
            Some(c) if c < 0 => Ordering::Less,
            Some(0) => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Decompose into `mantissa * 2^exp` exactly.
    pub fn to_parts(&self) -> (BigInt, i64) {
        if self.0.is_zero() {
            return (BigInt::zero(), 0);
        }
        let (words, _bits, sign, e, _inexact) = self.0.as_raw_parts().expect("finite real");
        let mut u32s = Vec::with_capacity(words.len() * 2);
        for w in words {
            u32s.push(*w as u32);
            u32s.push((*w >> 32) as u32);
        }
        let m = BigInt::from_biguint(
            if sign == Sign::Neg { num_bigint::Sign::Minus } else { num_bigint::Sign::Plus },
            BigUint::from_slice(&u32s),
        );
        (m, e as i64 - 64 * words.len() as i64)
    }

    /// Exact rational value of this binary float.
    pub fn to_ratio(&self) -> BigRational {
        let (m, e) = self.to_parts();
        if e >= 0 {
            BigRational::from_integer(m << (e as usize))
        } else {
            BigRational::new(m, BigInt::one() << ((-e) as usize))
        }
    }

    /// Approximate log2 of the magnitude; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (words, _bits, _sign, e, _) = self.0.as_raw_parts().expect("finite real");
        let top = *words.last().expect("nonempty mantissa") as f64 / 2f64.powi(64);
        e as f64 + top.log2()
    }

    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        let l2 = self.log2_abs();
        if l2 > 1023.0 {
            return if self.signum() < 0 { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        if l2 < -1074.0 {
            return 0.0;
        }
        let (m, e) = self.to_parts();
        // keep the top 64 bits of the mantissa
        let shift = m.bits().saturating_sub(64);
        let top = (&m >> shift).to_f64().unwrap_or(0.0);
        top * 2f64.powi((e + shift as i64) as i32)
    }

    /// Render with `digits` significant decimal digits, rounding half away
    /// from zero. Positional for moderate exponents, scientific otherwise.
    pub fn to_decimal(&self, digits: u32) -> String {
        let digits = digits.max(1);
        if self.0.is_zero() {
            return "0".to_string();
        }
        let (m, e2) = self.to_parts();
        let neg = m.is_negative();
        let m = m.abs();
        let mut e10 = (self.log2_abs() * std::f64::consts::LOG10_2).floor() as i64;
        let ten = BigInt::from(10u32);
        let lower = num_traits::pow(ten.clone(), digits as usize - 1);
        let upper = &lower * &ten;
        let mut n;
        loop {
            let k = digits as i64 - 1 - e10;
            let mut num = m.clone();
            let mut den = BigInt::one();
            if e2 >= 0 {
                num <<= e2 as usize;
            } else {
                den <<= (-e2) as usize;
            }
            if k >= 0 {
                num *= num_traits::pow(ten.clone(), k as usize);
            } else {
                den *= num_traits::pow(ten.clone(), (-k) as usize);
            }
            let (q, r) = num.div_rem(&den);
            n = if r * 2 >= den { q + 1 } else { q };
            if n >= upper {
                e10 += 1;
            } else if n < lower {
                e10 -= 1;
            } else {
                break;
            }
        }
        let s = n.to_string();
        let sign = if neg { "-" } else { "" };
        if (-6..21).contains(&e10) {
            if e10 >= 0 {
                let int_len = (e10 + 1) as usize;
                if int_len >= s.len() {
                    format!("{sign}{}{}", s, "0".repeat(int_len - s.len()))
                } else {
                    format!("{sign}{}.{}", &s[..int_len], &s[int_len..])
                }
            } else {
                format!("{sign}0.{}{}", "0".repeat((-e10 - 1) as usize), s)
            }
        } else if s.len() > 1 {
            format!("{sign}{}.{}e{}", &s[..1], &s[1..], e10)
        } else {
            format!("{sign}{}e{}", s, e10)
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20) as u32;
        write!(f, "{}", self.to_decimal(digits))
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Γ(s) for rational `s` that is not a non-positive integer.
pub fn gamma(s: &BigRational, prec: usize) -> Real {
    gamma_with_derivative(s, prec).0
}

/// Γ(s) and Γ'(s) for rational `s` off the poles.
///
/// Shifts `s` to `s0 >= 1` with the exact recurrence, then evaluates
/// Γ(s0) = γ(s0, N) + Γ(s0, N) with `N` large enough that the upper part is
/// below the working resolution. The lower part
/// γ(s0, N) = N^s0 e^-N Σ_k N^k / (s0)_(k+1) is a series of positive terms,
/// so no cancellation occurs; its s-derivative gives Γ'.
pub fn gamma_with_derivative(s: &BigRational, prec: usize) -> (Real, Real) {
    assert!(
        !(s.is_integer() && !s.is_positive()),
        "Γ has a pole at non-positive integers"
    );
    let work = prec.max(64) + 48;
    let mut s0 = s.clone();
    let mut shift = BigRational::one();
    let mut shift_terms = Vec::new();
    while s0 < BigRational::one() {
        shift *= &s0;
        shift_terms.push(s0.clone());
        s0 += BigRational::one();
    }
    let sf = rational_to_f64(&s0);
    // N^s0 ln N e^-N / (1 - s0/N) below 2^-(work+8) covers both tails
    let target = (work as f64 + 8.0) * std::f64::consts::LN_2;
    let mut n = target + 2.0 * sf + 10.0;
    for _ in 0..200 {
        let bound_ln = sf * n.ln() + n.ln().ln() - n - (1.0 - sf / n).ln();
        if -bound_ln > target {
            break;
        }
        n += 8.0;
    }
    let n_int = n.ceil() as i64;
    let big_n = Real::from_i64(n_int, work);
    let s0_real = Real::from_ratio(&s0, work);
    let mut term = Real::one(work).div(&s0_real, work);
    let mut harmonic = term.clone();
    let mut sum = term.clone();
    let mut dsum = term.mul(&harmonic, work);
    let mut k: i64 = 0;
    loop {
        k += 1;
        let denom = s0_real.add(&Real::from_i64(k, work), work);
        term = term.mul(&big_n, work).div(&denom, work);
        harmonic = harmonic.add(&Real::one(work).div(&denom, work), work);
        sum = sum.add(&term, work);
        dsum = dsum.add(&term.mul(&harmonic, work), work);
        let ratio = n_int as f64 / (sf + k as f64 + 1.0);
        if ratio < 0.5 && term.log2_abs() < sum.log2_abs() - work as f64 - 16.0 {
            break;
        }
    }
    let ln_n = big_n.ln(work);
    let pref = s0_real.mul(&ln_n, work).sub(&big_n, work).exp(work);
    let g0 = sum.mul(&pref, work);
    let dg0 = ln_n.mul(&g0, work).sub(&dsum.mul(&pref, work), work);
    // ψ(s) = ψ(s0) - Σ 1/(s + j)
    let mut psi = dg0.div(&g0, work);
    for t in &shift_terms {
        psi = psi.sub(&Real::one(work).div(&Real::from_ratio(t, work), work), work);
    }
    let g = g0.div(&Real::from_ratio(&shift, work), work);
    let dg = g.mul(&psi, work);
    let mut g_out = g;
    let mut dg_out = dg;
    g_out.0.set_precision(prec.max(64), RM).expect("precision change");
    dg_out.0.set_precision(prec.max(64), RM).expect("precision change");
    (g_out, dg_out)
}

impl From<BigFloat> for Real {
    fn from(f: BigFloat) -> Self {
        Real(f)
    }
}

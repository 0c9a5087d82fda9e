//! Direct summation: exact rationals, or fixed-point integers with a tracked
//! rounding bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{to_f64, EvalConfig, HypergeometricSpec, Method, SeriesValue};
use crate::error::{Error, Result};
use crate::real::Real;

/// log2 |x| to roughly f64 accuracy, `-inf` for zero.
pub(crate) fn log2_abs_int(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let b = x.bits() as i64;
    let sh = (b - 60).max(0);
    let top = (x.abs() >> sh as usize).to_f64().unwrap_or(f64::NAN);
    top.log2() + sh as f64
}

pub(crate) fn log2_abs_rat(x: &BigRational) -> f64 {
    log2_abs_int(x.numer()) - log2_abs_int(x.denom())
}

/// log2(2^a + 2^b)
pub(crate) fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// log2 of the geometric tail factor r/(1-r).
fn tail_factor(r: f64) -> f64 {
    (r / (1.0 - r)).log2()
}

pub(super) fn eval_exact(spec: &HypergeometricSpec, z: &BigRational, cfg: &EvalConfig) -> Result<SeriesValue> {
    let bits = cfg.bits();
    let stop = bits as f64 + 8.0 + cfg.stop_extra_bits as f64;
    let zf = to_f64(z);
    let mz = -z.clone();
    let mut t = BigRational::one();
    let mut sum = BigRational::one();
    let mut n = 0u64;
    let tail_log2 = loop {
        if t.is_zero() {
            break f64::NEG_INFINITY;
        }
        if let Some(rb) = spec.ratio_bound(zf, n) {
            if rb < 0.5 {
                let lt = log2_abs_rat(&t);
                if lt < log2_abs_rat(&sum) - stop {
                    // +1 covers the f64 estimate of log2|t|
                    break lt + tail_factor(rb) + 1.0;
                }
            }
        }
        if n as usize >= cfg.term_cap {
            return Err(Error::TermCap(cfg.term_cap));
        }
        t = t * spec.term_ratio(n) * &mz;
        sum += &t;
        n += 1;
    };
    let prec = bits + 64;
    let value = Real::from_ratio(&sum, prec);
    let rounding = log2_abs_rat(&sum) + 1.0 - prec as f64;
    Ok(SeriesValue {
        value,
        tail_bound: Real::from_log2(log2_add(tail_log2, rounding), 64),
        terms: n as usize + 1,
        method: Method::Exact,
    })
}

/// Integer numerator and denominator of the signed term ratio at step n,
/// including the -z factor.
struct RatioInts {
    upper: Vec<(BigInt, BigInt)>,
    lower: Vec<(BigInt, BigInt)>,
    z_num: BigInt,
    z_den: BigInt,
}

impl RatioInts {
    fn new(spec: &HypergeometricSpec, z: &BigRational) -> Self {
        let split = |v: &[BigRational]| v.iter().map(|x| (x.numer().clone(), x.denom().clone())).collect();
        RatioInts { upper: split(&spec.upper), lower: split(&spec.lower), z_num: z.numer().clone(), z_den: z.denom().clone() }
    }

    fn at(&self, n: u64) -> (BigInt, BigInt) {
        let nb = BigInt::from(n);
        let mut num = -self.z_num.clone();
        let mut den = &self.z_den * BigInt::from(n + 1);
        for (p, q) in &self.upper {
            num *= p + &nb * q;
            den *= q;
        }
        for (p, q) in &self.lower {
            num *= q;
            den *= p + &nb * q;
        }
        if den.is_negative() {
            (-num, -den)
        } else {
            (num, den)
        }
    }
}

struct FixedRun {
    sum: BigInt,
    err_log2: f64,
    terms: usize,
}

/// Sum with every term held as round(t_n · 2^frac_bits). Each step multiplies
/// by the exact integer ratio and truncates once, so the error in term n
/// obeys e_(n+1) <= |r_n| e_n + 1 ulp; the sum of those plus a geometric tail
/// bound is the reported error, in ulps.
fn run_fixed(
    spec: &HypergeometricSpec,
    z: &BigRational,
    frac_bits: usize,
    stop: f64,
    cap: usize,
) -> Result<FixedRun> {
    let ints = RatioInts::new(spec, z);
    let zf = to_f64(z);
    let mut t = BigInt::one() << frac_bits;
    let mut sum = t.clone();
    let mut e_log2 = f64::NEG_INFINITY;
    let mut total_err = f64::NEG_INFINITY;
    let mut n = 0u64;
    loop {
        if let Some(rb) = spec.ratio_bound(zf, n) {
            if rb < 0.5 {
                let mag = log2_add(log2_abs_int(&t), e_log2);
                if t.is_zero() || mag < log2_abs_int(&sum) - stop {
                    total_err = log2_add(total_err, mag + tail_factor(rb));
                    return Ok(FixedRun { sum, err_log2: total_err, terms: n as usize + 1 });
                }
            }
        }
        if n as usize >= cap {
            return Err(Error::TermCap(cap));
        }
        let (num, den) = ints.at(n);
        if num.is_zero() {
            // terminating series; everything past here is exactly zero
            return Ok(FixedRun { sum, err_log2: total_err, terms: n as usize + 1 });
        }
        let r_log2 = log2_abs_int(&num) - log2_abs_int(&den) + 1e-9;
        t = (&t * &num) / &den;
        e_log2 = log2_add(e_log2 + r_log2, 0.0);
        total_err = log2_add(total_err, e_log2);
        sum += &t;
        n += 1;
    }
}

/// Largest log2|t_n| and the number of terms needed, from a float pre-pass.
fn prepass(spec: &HypergeometricSpec, z: &BigRational, bits: usize, cap: usize) -> Result<(f64, usize)> {
    let zf = to_f64(z);
    let mut lt = 0.0f64;
    let mut max = 0.0f64;
    let mut n = 0u64;
    loop {
        if let Some(rb) = spec.ratio_bound(zf, n) {
            if rb < 0.5 && lt < max - bits as f64 - 64.0 {
                return Ok((max, n as usize));
            }
        }
        if n as usize >= cap {
            return Err(Error::TermCap(cap));
        }
        let r = to_f64(&spec.term_ratio(n)) * zf;
        if r == 0.0 {
            return Ok((max, n as usize + 1));
        }
        lt += r.abs().log2();
        max = max.max(lt);
        n += 1;
    }
}

pub(super) fn eval_fixed(spec: &HypergeometricSpec, z: &BigRational, cfg: &EvalConfig) -> Result<SeriesValue> {
    let bits = cfg.bits();
    let stop = bits as f64 + 8.0 + cfg.stop_extra_bits as f64;
    let (max_term, n_terms) = prepass(spec, z, bits, cfg.term_cap)?;
    // first attempt assumes |sum| is not far below 1
    let mut frac_bits = bits + 64 + max_term.ceil() as usize + (n_terms as f64).log2().ceil() as usize;
    for attempt in 0..6 {
        let run = run_fixed(spec, z, frac_bits, stop, cfg.term_cap)?;
        let sum_log2 = log2_abs_int(&run.sum);
        let rel = run.err_log2 - sum_log2;
        if rel <= -(bits as f64) - 4.0 || attempt == 5 {
            let prec = bits + 64;
            let scale = Real::pow2(-(frac_bits as i64), prec);
            let value = Real::from_bigint(&run.sum, prec).mul(&scale, prec);
            let rounding = sum_log2 - frac_bits as f64 + 1.0 - prec as f64;
            let bound = log2_add(run.err_log2 - frac_bits as f64, rounding);
            return Ok(SeriesValue {
                value,
                tail_bound: Real::from_log2(bound, 64),
                terms: run.terms,
                method: Method::FixedPoint,
            });
        }
        let deficit = if rel.is_finite() { rel + bits as f64 + 32.0 } else { frac_bits as f64 };
        frac_bits += deficit.ceil().max(32.0) as usize;
    }
    unreachable!("loop returns on the last attempt")
}

//! Numerical checks of the two large-z limits
//!
//!   e^z pFq(a; a-1; -z) · Π(a_j - 1) / (-z)^q → 1
//!   z^a0 pFq(a0, a; a0+1, a-1; -z) → Γ(a0+1) Π (a_j - a0 - 1)/(a_j - 1)
//!
//! along a ladder of z values.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::{eval_pfq, to_f64, EvalConfig, HypergeometricSpec};
use crate::error::{Error, Result};
use crate::exact::ExactScalar;
use crate::real::Real;

#[derive(Clone, Debug)]
pub struct LimitRow {
    pub z: BigRational,
    pub value: Real,
    pub target: Real,
    pub abs_error: Real,
    /// Relative error, or absolute when the target is zero.
    pub error: f64,
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub identity: &'static str,
    pub spec: HypergeometricSpec,
    pub rows: Vec<LimitRow>,
    pub relative: bool,
    /// Errors below this are at the working resolution and count as converged.
    pub floor: f64,
    pub monotone: bool,
    pub final_error: f64,
    pub decay_exponent: Option<f64>,
}

/// Least-squares slope of -log(err) against log(z).
pub fn fit_decay_exponent(z: &[f64], err: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = z
        .iter()
        .zip(err)
        .filter(|(z, e)| **z > 0.0 && **e > 0.0 && e.is_finite())
        .map(|(z, e)| (z.ln(), -e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// True when `err[i] <= err[i-1]` for every i after `start`, treating values
/// under `floor` as equal.
pub fn monotone_from(err: &[f64], start: usize, floor: f64) -> bool {
    err.windows(2)
        .skip(start)
        .all(|w| w[1] <= w[0] || w[1] <= floor)
}

fn check_ladder(ladder: &[BigRational]) -> Result<()> {
    if ladder.is_empty() || ladder.iter().any(|z| !z.is_positive()) {
        return Err(Error::Invalid("ladder points must be positive".into()));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("ladder must be increasing".into()));
    }
    Ok(())
}

fn finish(
    identity: &'static str,
    spec: HypergeometricSpec,
    ladder: &[BigRational],
    values: Vec<Real>,
    target: Real,
    cfg: &EvalConfig,
) -> LimitReport {
    let prec = cfg.bits() + 64;
    let relative = !target.is_zero();
    let rows: Vec<LimitRow> = ladder
        .iter()
        .zip(values)
        .map(|(z, value)| {
            let abs_error = value.sub(&target, prec).abs();
            let error = if relative {
                abs_error.div(&target.abs(), prec).to_f64()
            } else {
                abs_error.to_f64()
            };
            LimitRow { z: z.clone(), value, target: target.clone(), abs_error, error }
        })
        .collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let zs: Vec<f64> = rows.iter().map(|r| to_f64(&r.z)).collect();
    let floor = 10f64.powi(-(cfg.digits as i32 - 5));
    let above: Vec<usize> = (0..errs.len()).filter(|&i| errs[i] > floor).collect();
    let decay_exponent = fit_decay_exponent(
        &above.iter().map(|&i| zs[i]).collect::<Vec<_>>(),
        &above.iter().map(|&i| errs[i]).collect::<Vec<_>>(),
    );
    LimitReport {
        identity,
        spec,
        monotone: monotone_from(&errs, 0, floor),
        final_error: *errs.last().unwrap_or(&f64::NAN),
        decay_exponent,
        rows,
        relative,
        floor,
    }
}

/// e^z pFq(a; a-1; -z) Π(a_j - 1) / (-z)^q along the ladder, target 1.
pub fn verify_limit_flat(a: &[BigRational], ladder: &[BigRational], cfg: &EvalConfig) -> Result<LimitReport> {
    if a.is_empty() {
        return Err(Error::Invalid("flat limit needs q >= 1".into()));
    }
    if a.iter().any(|x| x.is_one()) {
        return Err(Error::Invalid("a_j = 1 makes a lower parameter vanish".into()));
    }
    check_ladder(ladder)?;
    let one = BigRational::one();
    let lower: Vec<BigRational> = a.iter().map(|x| x - &one).collect();
    let norm: BigRational = lower.iter().product();
    let spec = HypergeometricSpec::new(a.to_vec(), lower)?;
    let prec = cfg.bits() + 64;
    let q = a.len();
    let values = ladder
        .par_iter()
        .map(|z| {
            let f = eval_pfq(&spec, z, cfg)?;
            let mz = -z.clone();
            let scale = norm.clone() / num_traits::Pow::pow(&mz, q);
            let ez = Real::from_ratio(z, prec).exp(prec);
            Ok(f.value.mul(&ez, prec).mul_ratio(&scale, prec))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("limit0", spec, ladder, values, Real::one(prec), cfg))
}

/// z^a0 pFq(a0, a; a0+1, a-1; -z) along the ladder against its Γ target.
pub fn verify_limit_gamma(
    a0: &BigRational,
    a: &[BigRational],
    ladder: &[BigRational],
    cfg: &EvalConfig,
) -> Result<LimitReport> {
    if !a0.is_positive() {
        return Err(Error::Invalid("a0 must be positive".into()));
    }
    if a.iter().any(|x| x.is_one()) {
        return Err(Error::Invalid("a_j = 1 makes a lower parameter vanish".into()));
    }
    check_ladder(ladder)?;
    let one = BigRational::one();
    let mut upper = vec![a0.clone()];
    upper.extend(a.iter().cloned());
    let mut lower = vec![a0 + &one];
    lower.extend(a.iter().map(|x| x - &one));
    let spec = HypergeometricSpec::new(upper, lower)?;
    let prec = cfg.bits() + 64;
    let factor: BigRational = a.iter().map(|x| (x - a0 - &one) / (x - &one)).product();
    let target = if factor.is_zero() {
        Real::zero(prec)
    } else {
        ExactScalar::gamma(&(a0 + &one)).scale(&factor).to_real(prec)
    };
    let values = ladder
        .par_iter()
        .map(|z| {
            let f = eval_pfq(&spec, z, cfg)?;
            let za = Real::from_ratio(z, prec).pow_ratio(a0, prec);
            Ok(f.value.mul(&za, prec))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("limit", spec, ladder, values, target, cfg))
}

#[cfg(test)]
mod tests {
    use super::super::rat;
    use super::*;

    fn ladder() -> Vec<BigRational> {
        vec![rat(10, 1), rat(100, 1), rat(1000, 1)]
    }

    #[test]
    fn flat_single_parameter() {
        let r = verify_limit_flat(&[rat(3, 1)], &ladder(), &EvalConfig::default()).unwrap();
        assert!(r.monotone);
        assert!(r.final_error < 3e-3);
        let ratio = r.rows[1].error / r.rows[2].error;
        assert!(ratio > 5.0 && ratio < 20.0, "{ratio}");
        assert!(verify_limit_flat(&[rat(2, 1)], &[rat(0, 1)], &EvalConfig::default()).is_err());
    }

    #[test]
    fn flat_two_parameters() {
        let r = verify_limit_flat(&[rat(5, 3), rat(7, 3)], &ladder(), &EvalConfig::default()).unwrap();
        assert!(r.monotone && r.final_error < 1e-2);
        let k = r.decay_exponent.unwrap();
        assert!((k - 1.0).abs() < 0.2, "{k}");
    }

    #[test]
    fn gamma_targets() {
        let r = verify_limit_gamma(&rat(1, 2), &[rat(3, 1)], &ladder(), &EvalConfig::default()).unwrap();
        // 3√π/8
        let t = 3.0 * std::f64::consts::PI.sqrt() / 8.0;
        assert!((r.rows[0].target.to_f64() - t).abs() < 1e-15);
        assert!(r.final_error < 1e-20);
        let r = verify_limit_gamma(&rat(1, 1), &[], &ladder(), &EvalConfig::default()).unwrap();
        assert!((r.rows[0].target.to_f64() - 1.0).abs() < 1e-15);
        assert!(r.final_error < 1e-20);
        let r = verify_limit_gamma(&rat(2, 3), &[rat(5, 3), rat(7, 3)], &ladder(), &EvalConfig::default()).unwrap();
        assert!(!r.relative && r.rows[0].target.is_zero());
        assert!(r.monotone && r.final_error < 1e-20);
    }

    #[test]
    fn fit_and_monotone_helpers() {
        let z = [10.0, 100.0, 1000.0];
        let e = [1e-1, 1e-2, 1e-3];
        assert!((fit_decay_exponent(&z, &e).unwrap() - 1.0).abs() < 1e-12);
        assert!(!monotone_from(&[5.0, 1.0, 2.0], 0, 0.0));
        assert!(monotone_from(&[1.0, 5.0, 2.0], 1, 0.0));
        assert!(monotone_from(&[1.0, 1e-40, 1e-39], 0, 1e-30));
    }
}

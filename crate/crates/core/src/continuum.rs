//! Finite-cutoff evaluation of the past-cone integrals that define β_d,
//! α_d/β_d and the curvature terms I_R, I_00, as functions of
//! z = c_d (L/l)^d.
//!
//! Each integral becomes a finite sum of terms `weight · z^p · pFq(-z)`.
//! A monomial U^A V^B in the light-cone coordinates, integrated over the cut
//! off past cone and hit by O^(d), gives
//!
//!   2/(d² a b) · c^-p z^p · pFq(a, b, 2j/d+1; a+1, b+1, 2j/d; -z)
//!
//! with a = 2(B+1)/d, b = (A+B+2)/d. The l∂_l variants act on the series
//! only and shift every parameter by one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::coefficients::{alpha_over_beta, beta, layer_count, sphere_volume, volume_constant};
use crate::error::{Error, Result};
use crate::exact::{binomial, ExactScalar};
use crate::hypergeom::limits::{fit_decay_exponent, monotone_from};
use crate::hypergeom::{asymptotic_poles, eval_pfq, rat, to_f64, EvalConfig, HypergeometricSpec};
use crate::real::{gamma_with_derivative, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(d: u32) -> Self {
        if d.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpansionTerm {
    pub weight: ExactScalar,
    pub z_power: BigRational,
    pub spec: HypergeometricSpec,
}

#[derive(Clone, Debug)]
pub struct KSumExpansion {
    pub dim: u32,
    pub parity: Parity,
    pub label: String,
    pub terms: Vec<ExpansionTerm>,
}

impl KSumExpansion {
    fn new(d: u32, label: &str, terms: Vec<ExpansionTerm>) -> Self {
        KSumExpansion { dim: d, parity: Parity::of(d), label: label.into(), terms }
    }

    pub fn scaled(&self, s: &ExactScalar, label: &str) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| ExpansionTerm { weight: t.weight.mul(s), ..t.clone() })
            .collect();
        KSumExpansion::new(self.dim, label, terms)
    }

    /// l∂_l applied to the series factor of every term.
    pub fn derivative(&self) -> Self {
        let d = BigRational::from_integer(self.dim.into());
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (f, spec) = t.spec.derivative();
                ExpansionTerm {
                    weight: t.weight.scale(&(&d * f)),
                    z_power: &t.z_power + BigRational::one(),
                    spec,
                }
            })
            .collect();
        KSumExpansion::new(self.dim, &format!("l∂l {}", self.label), terms)
    }

    /// Σ weight · z^p · pFq(-z), with the working precision raised until the
    /// cancellation between terms leaves `cfg.digits` intact.
    pub fn evaluate(&self, z: &BigRational, cfg: &EvalConfig) -> Result<Real> {
        Ok(self.evaluate_parts(z, cfg)?.0)
    }

    /// Value and the largest single-term magnitude.
    pub fn evaluate_parts(&self, z: &BigRational, cfg: &EvalConfig) -> Result<(Real, Real)> {
        let mut digits = cfg.digits;
        for _ in 0..4 {
            let c = EvalConfig { digits, ..cfg.clone() };
            let prec = c.bits() + 64;
            let zr = Real::from_ratio(z, prec);
            let mut sum = Real::zero(prec);
            let mut big = Real::zero(prec);
            for t in &self.terms {
                let f = eval_pfq(&t.spec, z, &c)?;
                let x = f
                    .value
                    .mul(&zr.pow_ratio(&t.z_power, prec), prec)
                    .mul(&t.weight.to_real(prec), prec);
                if x.cmp_abs(&big).is_gt() {
                    big = x.abs();
                }
                sum = sum.add(&x, prec);
            }
            let lost = (big.log2_abs() - sum.log2_abs()) * std::f64::consts::LOG10_2;
            // keep at least half the requested digits after cancellation
            if !lost.is_finite() || digits as f64 - lost >= cfg.digits as f64 / 2.0 {
                return Ok((sum, big));
            }
            digits = cfg.digits + lost.ceil() as u32 + 10;
        }
        Err(Error::Invalid(format!("cancellation in {} too severe", self.label)))
    }

    /// Terms of all `parts`, each scaled by its factor.
    pub fn combine(d: u32, label: &str, parts: &[(&KSumExpansion, ExactScalar)]) -> Self {
        let terms = parts.iter().flat_map(|(e, c)| e.scaled(c, label).terms).collect();
        KSumExpansion::new(d, label, terms)
    }

    /// Large-z expansion Σ z^p (coeff + log_coeff·ln z), summed over terms,
    /// dropping powers whose coefficients cancel. Sorted by decreasing p.
    pub fn asymptotics(&self) -> Result<Vec<AsymptoticPower>> {
        let prec = 256;
        let mut acc: Vec<(BigRational, Real, Real, f64)> = Vec::new();
        for t in &self.terms {
            let poles = asymptotic_poles(&t.spec)
                .ok_or_else(|| Error::Invalid(format!("{}: no closed large-z form for {}", self.label, t.spec)))?;
            let w = t.weight.to_real(prec);
            for p in poles {
                let (g, dg) = gamma_with_derivative(&p.s, prec);
                let a1 = Real::from_ratio(&p.a1, prec);
                let a2 = Real::from_ratio(&p.a2, prec);
                let c = w.mul(&a1.mul(&g, prec).sub(&a2.mul(&dg, prec), prec), prec);
                let lc = w.mul(&a2.mul(&g, prec), prec);
                let size = c.log2_abs().max(lc.log2_abs());
                let e = &t.z_power - &p.s;
                match acc.iter_mut().find(|x| x.0 == e) {
                    Some(x) => {
                        x.1 = x.1.add(&c, prec);
                        x.2 = x.2.add(&lc, prec);
                        x.3 = x.3.max(size);
                    }
                    None => acc.push((e, c, lc, size)),
                }
            }
        }
        let mut out: Vec<AsymptoticPower> = acc
            .into_iter()
            .filter(|(_, c, lc, size)| c.log2_abs().max(lc.log2_abs()) > size - 160.0)
            .map(|(exponent, c, lc, _)| AsymptoticPower { exponent, coeff: c.to_f64(), log_coeff: lc.to_f64() })
            .collect();
        out.sort_by(|a, b| b.exponent.cmp(&a.exponent));
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticPower {
    pub exponent: BigRational,
    pub coeff: f64,
    pub log_coeff: f64,
}

/// The z→∞ value and the rate of the slowest decaying correction (None when
/// every correction is exponentially small).
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticSummary {
    pub limit: f64,
    pub leading_decay: Option<f64>,
    /// Any surviving power z^p with p > 0, which would mean divergence.
    pub divergent: bool,
}

pub fn summarize(powers: &[AsymptoticPower]) -> AsymptoticSummary {
    let zero = BigRational::zero();
    let limit = powers.iter().find(|p| p.exponent == zero).map_or(0.0, |p| p.coeff);
    let log_at_zero = powers.iter().any(|p| p.exponent == zero && p.log_coeff != 0.0);
    AsymptoticSummary {
        limit,
        leading_decay: powers.iter().find(|p| p.exponent < zero).map(|p| -to_f64(&p.exponent)),
        divergent: log_at_zero || powers.iter().any(|p| p.exponent > zero),
    }
}

fn pow2(e: BigRational) -> ExactScalar {
    ExactScalar::rational_pow(&rat(2, 1), &e)
}

fn c_pow(d: u32, e: &BigRational) -> Result<ExactScalar> {
    Ok(volume_constant(d)?.pow(e))
}

fn operator_params(d: u32) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
    let m = layer_count(d)? as i64 - 1;
    let di = d as i64;
    Ok((
        (1..=m).map(|j| rat(2 * j + di, di)).collect(),
        (1..=m).map(|j| rat(2 * j, di)).collect(),
    ))
}

fn signed_binomial(n: u64, k: u64) -> BigRational {
    let b = BigRational::from_integer(binomial(n, k));
    if k.is_multiple_of(2) {
        b
    } else {
        -b
    }
}

/// The generic U^A V^B term with an exact prefactor.
fn monomial_term(d: u32, a_exp: u32, b_exp: u32, pref: ExactScalar, zp: &BigRational) -> Result<ExpansionTerm> {
    let di = d as i64;
    let a = rat(2 * (b_exp as i64 + 1), di);
    let b = rat(a_exp as i64 + b_exp as i64 + 2, di);
    let (ops_u, ops_l) = operator_params(d)?;
    let one = BigRational::one();
    let mut upper = vec![a.clone(), b.clone()];
    upper.extend(ops_u);
    let mut lower = vec![&a + &one, &b + &one];
    lower.extend(ops_l);
    let w = rat(2, di * di) / (&a * &b);
    Ok(ExpansionTerm {
        weight: pref.scale(&w).mul(&c_pow(d, &-zp.clone())?),
        z_power: zp.clone(),
        spec: HypergeometricSpec::new(upper, lower)?,
    })
}

fn beta_zp(d: u32) -> BigRational {
    BigRational::one() + rat(2, d as i64)
}

/// The β integral with the parameter lists written out per parity (in even d
/// one operator pair has already cancelled).
pub fn build_beta_expansion(d: u32) -> Result<KSumExpansion> {
    let di = d as i64;
    let zp = beta_zp(d);
    let cz = c_pow(d, &-zp.clone())?;
    let half = pow2(rat(di, 2)).recip();
    let one = BigRational::one();
    let mut terms = Vec::new();
    for k in 0..=d as u64 {
        let w = signed_binomial(d as u64, k) / BigRational::from_integer(((k as i64 + 1) * (di + 2)).into());
        let a = rat(2 * (k as i64 + 1), di);
        let (mut upper, mut lower) = (vec![a.clone()], vec![&a + &one]);
        match Parity::of(d) {
            Parity::Even => {
                for j in 1..=di / 2 {
                    upper.push(rat(2 * j + di, di));
                    lower.push(rat(2 * j, di));
                }
            }
            Parity::Odd => {
                upper.insert(0, rat(di + 2, di));
                lower.insert(0, rat(2 * di + 2, di));
                for j in 1..=(di + 1) / 2 {
                    upper.push(rat(2 * j + di, di));
                    lower.push(rat(2 * j, di));
                }
            }
        }
        terms.push(ExpansionTerm {
            weight: half.scale(&w).mul(&cz),
            z_power: zp.clone(),
            spec: HypergeometricSpec::new(upper, lower)?,
        });
    }
    Ok(KSumExpansion::new(d, "beta", terms))
}

/// The α/β integral, parameter lists written out per parity.
pub fn build_alpha_over_beta_expansion(d: u32) -> Result<KSumExpansion> {
    let di = d as i64;
    let zp = BigRational::one();
    let cz = c_pow(d, &-zp.clone())?;
    let half = pow2(rat(di - 2, 2)).recip();
    let one = BigRational::one();
    let mut terms = Vec::new();
    for k in 0..=(d - 2) as u64 {
        let w = signed_binomial(d as u64 - 2, k) / BigRational::from_integer((di * (k as i64 + 1)).into());
        let a = rat(2 * (k as i64 + 1), di);
        let (mut upper, mut lower) = (vec![a.clone()], vec![&a + &one]);
        match Parity::of(d) {
            Parity::Even => {
                for j in (1..=di / 2 + 1).filter(|&j| j != di / 2) {
                    upper.push(rat(2 * j + di, di));
                    lower.push(rat(2 * j, di));
                }
            }
            Parity::Odd => {
                upper.insert(0, one.clone());
                lower.insert(0, rat(2, 1));
                for j in 1..=(di + 1) / 2 {
                    upper.push(rat(2 * j + di, di));
                    lower.push(rat(2 * j, di));
                }
            }
        }
        terms.push(ExpansionTerm {
            weight: half.scale(&w).mul(&cz),
            z_power: zp.clone(),
            spec: HypergeometricSpec::new(upper, lower)?,
        });
    }
    Ok(KSumExpansion::new(d, "alpha-beta", terms))
}

/// T1 rebuilt from the monomial rule instead of reusing the β expansion.
pub fn build_t1_direct(d: u32) -> Result<KSumExpansion> {
    let zp = beta_zp(d);
    let half = pow2(rat(d as i64, 2)).recip();
    let inv = rat(1, d as i64 - 1);
    let terms = (0..=d)
        .map(|k| {
            let pref = half.scale(&(signed_binomial(d as u64, k as u64) * &inv));
            monomial_term(d, d - k, k, pref, &zp)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KSumExpansion::new(d, "T1", terms))
}

/// (T1, T2, T3) of the curvature expansion. T1 reuses the β expansion.
pub fn build_ricci_expansions(d: u32) -> Result<(KSumExpansion, KSumExpansion, KSumExpansion)> {
    let t1 = build_beta_expansion(d)?.scaled(&ExactScalar::frac(1, d as i64 - 1), "T1");
    let zp = beta_zp(d);
    let di = d as i64;
    let mut t2 = Vec::new();
    for x in 0..=2u32 {
        for k in 0..=d - 2 {
            let c = BigRational::from_integer(binomial(2, x as u64)) * signed_binomial(d as u64 - 2, k as u64);
            let pref = pow2(rat(di, 2)).recip().scale(&c);
            t2.push(monomial_term(d, d - k - x, k + x, pref, &zp)?);
        }
    }
    let mut t3 = Vec::new();
    for k in 0..=d - 2 {
        let pref = pow2(rat(di - 2, 2)).recip().scale(&signed_binomial(d as u64 - 2, k as u64));
        t3.push(monomial_term(d, d - 1 - k, k + 1, pref, &zp)?);
    }
    Ok((t1, KSumExpansion::new(d, "T2", t2), KSumExpansion::new(d, "T3", t3)))
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub quantity: String,
    pub dim: u32,
    pub ladder: Vec<BigRational>,
    pub values: Vec<Real>,
    pub target: Real,
    pub abs_errors: Vec<f64>,
    /// Relative errors when the target is nonzero, else absolute.
    pub errors: Vec<f64>,
    pub decay_exponent: Option<f64>,
    /// Errors below this are at the working resolution.
    pub floor: f64,
    /// Non-increasing error from `monotone_start` (0-based) on, ignoring
    /// moves below the floor.
    pub monotone: bool,
    pub monotone_start: usize,
    pub final_error: f64,
    /// Largest contributing piece at the last ladder point, where meaningful.
    pub reference_scale: Option<f64>,
    /// What the exact large-z expansion predicts for the limit and the decay.
    pub asymptotic: Option<AsymptoticSummary>,
}

impl ConvergenceReport {
    fn build(
        quantity: &str,
        dim: u32,
        ladder: &[BigRational],
        values: Vec<Real>,
        target: Real,
        monotone_start: usize,
        cfg: &EvalConfig,
    ) -> Self {
        let prec = 256;
        let floor = 10f64.powi(-(cfg.digits as i32 - 5));
        let relative = !target.is_zero();
        let abs_errors: Vec<f64> = values.iter().map(|v| v.sub(&target, prec).abs().to_f64()).collect();
        let t = target.abs().to_f64();
        let errors: Vec<f64> = abs_errors.iter().map(|e| if relative { e / t } else { *e }).collect();
        let zs: Vec<f64> = ladder.iter().map(to_f64).collect();
        ConvergenceReport {
            quantity: quantity.into(),
            dim,
            ladder: ladder.to_vec(),
            decay_exponent: {
                let keep: Vec<usize> = (0..errors.len()).filter(|&i| errors[i] > floor).collect();
                fit_decay_exponent(
                    &keep.iter().map(|&i| zs[i]).collect::<Vec<_>>(),
                    &keep.iter().map(|&i| errors[i]).collect::<Vec<_>>(),
                )
            },
            monotone: monotone_from(&errors, monotone_start, floor),
            floor,
            monotone_start,
            final_error: *errors.last().unwrap_or(&f64::NAN),
            values,
            target,
            abs_errors,
            errors,
            reference_scale: None,
            asymptotic: None,
        }
    }
}

/// Powers of ten from 10^max(1, d-3) to 10^max(4, 2d). Later starts in
/// high d skip the region where I_00 still changes sign.
pub fn default_ladder(d: u32) -> Vec<BigRational> {
    let lo = d.saturating_sub(3).max(1);
    let top = (2 * d).max(4);
    (lo..=top).map(|e| BigRational::from_integer(num_traits::pow(BigInt::from(10), e as usize))).collect()
}

/// S_(d-2)/(2(d-1)) × β integral against 1/β_d.
pub fn check_beta(d: u32, ladder: &[BigRational], cfg: &EvalConfig) -> Result<ConvergenceReport> {
    let exp = build_beta_expansion(d)?;
    let pref = sphere_volume(d - 2).scale(&rat(1, 2 * (d as i64 - 1)));
    let prec = cfg.bits() + 64;
    let p = pref.to_real(prec);
    let values = ladder
        .par_iter()
        .map(|z| Ok(exp.evaluate(z, cfg)?.mul(&p, prec)))
        .collect::<Result<Vec<_>>>()?;
    let target = beta(d)?.recip().to_real(prec);
    let mut r = ConvergenceReport::build("beta", d, ladder, values, target, 1, cfg);
    r.asymptotic = Some(summarize(&exp.scaled(&pref, "beta").asymptotics()?));
    Ok(r)
}

/// S_(d-2) × α/β integral against -α_d/β_d.
pub fn check_alpha_over_beta(d: u32, ladder: &[BigRational], cfg: &EvalConfig) -> Result<ConvergenceReport> {
    let exp = build_alpha_over_beta_expansion(d)?;
    let prec = cfg.bits() + 64;
    let pref = sphere_volume(d - 2);
    let p = pref.to_real(prec);
    let values = ladder
        .par_iter()
        .map(|z| Ok(exp.evaluate(z, cfg)?.mul(&p, prec)))
        .collect::<Result<Vec<_>>>()?;
    let target = alpha_over_beta(d)?.neg().to_real(prec);
    let mut r = ConvergenceReport::build("alpha-beta", d, ladder, values, target, 1, cfg);
    r.asymptotic = Some(summarize(&exp.scaled(&pref, "alpha-beta").asymptotics()?));
    Ok(r)
}

struct RicciPoint {
    ir: Real,
    i00: Real,
    /// largest of the four pieces that make up I_00
    i00_scale: f64,
}

/// I_R against -1/2 and I_00 against 0.
pub fn check_ricci(d: u32, ladder: &[BigRational], cfg: &EvalConfig) -> Result<(ConvergenceReport, ConvergenceReport)> {
    let (t1, t2, t3) = build_ricci_expansions(d)?;
    let (t1d, t2d, t3d) = (t1.derivative(), t2.derivative(), t3.derivative());
    let prec = cfg.bits() + 64;
    let bs = beta(d)?.mul(&sphere_volume(d - 2));
    let di = d as i64;
    let (e_a, e_b, e_c) = (
        bs.scale(&rat(-1, 6)),
        bs.scale(&rat(-1, 24 * (di + 1))),
        bs.scale(&rat(1, 12 * (di + 1) * (di + 2))),
    );
    let (c_a, c_b, c_c) = (e_a.to_real(prec), e_b.to_real(prec), e_c.to_real(prec));
    let points = ladder
        .par_iter()
        .map(|z| {
            let v1 = t1.evaluate(z, cfg)?;
            let v1d = t1d.evaluate(z, cfg)?;
            let v2 = t2.evaluate(z, cfg)?;
            let v2d = t2d.evaluate(z, cfg)?;
            let v3d = t3d.evaluate(z, cfg)?;
            let ir = c_a.mul(&v1, prec).add(&c_b.mul(&v1d, prec), prec).add(&c_c.mul(&v3d, prec), prec);
            let pieces = [
                c_a.mul(&v1, prec),
                c_a.mul(&v2, prec),
                c_b.mul(&v1d, prec),
                c_b.mul(&v2d, prec),
            ];
            let i00_scale = pieces.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max);
            let i00 = pieces.iter().fold(Real::zero(prec), |acc, x| acc.add(x, prec));
            Ok(RicciPoint { ir, i00, i00_scale })
        })
        .collect::<Result<Vec<_>>>()?;
    let half = Real::from_ratio(&rat(-1, 2), prec);
    let scale = points.last().map(|p| p.i00_scale);
    let ir = ConvergenceReport::build("I_R", d, ladder, points.iter().map(|p| p.ir.clone()).collect(), half, 1, cfg);
    let mut i00 = ConvergenceReport::build(
        "I_00",
        d,
        ladder,
        points.into_iter().map(|p| p.i00).collect(),
        Real::zero(prec),
        1,
        cfg,
    );
    i00.reference_scale = scale;
    let ir_exp = KSumExpansion::combine(d, "I_R", &[(&t1, e_a.clone()), (&t1d, e_b.clone()), (&t3d, e_c)]);
    let i00_exp = KSumExpansion::combine(d, "I_00", &[(&t1, e_a.clone()), (&t2, e_a), (&t1d, e_b.clone()), (&t2d, e_b)]);
    let mut ir = ir;
    ir.asymptotic = Some(summarize(&ir_exp.asymptotics()?));
    i00.asymptotic = Some(summarize(&i00_exp.asymptotics()?));
    Ok((ir, i00))
}

/// Both routes to T1 at one z; returns |difference| relative to the value.
pub fn t1_route_discrepancy(d: u32, z: &BigRational, cfg: &EvalConfig) -> Result<f64> {
    let (t1, _, _) = build_ricci_expansions(d)?;
    let a = t1.evaluate(z, cfg)?;
    let b = build_t1_direct(d)?.evaluate(z, cfg)?;
    let prec = cfg.bits() + 64;
    let diff = a.sub(&b, prec);
    if diff.is_zero() {
        return Ok(0.0);
    }
    Ok((diff.log2_abs() - a.log2_abs()).exp2())
}

/// Exponent 2/d that the β and α/β errors are compared against.
pub fn nominal_decay(d: u32) -> f64 {
    2.0 / d as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_shapes() {
        let b2 = build_beta_expansion(2).unwrap();
        assert_eq!(b2.terms.len(), 3);
        assert!(b2.terms.iter().all(|t| t.spec.upper.len() == 2 && t.spec.lower.len() == 2));
        assert_eq!(b2.terms[0].weight, ExactScalar::frac(1, 8));
        let b3 = build_beta_expansion(3).unwrap();
        assert_eq!(b3.terms.len(), 4);
        assert!(b3.terms.iter().all(|t| t.spec.upper.len() == 4));
        let (t1, t2, t3) = build_ricci_expansions(2).unwrap();
        assert_eq!(t1.terms.len(), 3);
        assert_eq!(t2.terms.len(), 3);
        assert_eq!(t3.terms.len(), 1);
    }

    #[test]
    fn derivative_shift() {
        let s = HypergeometricSpec::new(vec![rat(1, 2), rat(3, 2)], vec![rat(3, 2), rat(5, 2)]).unwrap();
        let e = KSumExpansion::new(
            2,
            "x",
            vec![ExpansionTerm { weight: ExactScalar::one(), z_power: BigRational::zero(), spec: s }],
        );
        let dd = e.derivative();
        let t = &dd.terms[0];
        assert_eq!(t.spec.upper, vec![rat(3, 2), rat(5, 2)]);
        assert_eq!(t.spec.lower, vec![rat(5, 2), rat(7, 2)]);
        // d · ab/((a+1)(b+1))
        assert_eq!(t.weight, ExactScalar::rational(rat(2, 1) * rat(3, 4) / rat(15, 4)));
        assert_eq!(t.z_power, BigRational::one());
    }

    #[test]
    fn t1_routes_agree() {
        for d in 2..=5 {
            for z in [rat(7, 1), rat(300, 1), rat(100_000, 1)] {
                let e = t1_route_discrepancy(d, &z, &EvalConfig::default()).unwrap();
                assert!(e < 1e-25, "d={d} z={z} e={e}");
            }
        }
    }

    #[test]
    fn asymptotic_limits_match_closed_forms() {
        for d in 2..=7 {
            let z = [rat(10, 1)];
            let cfg = EvalConfig::default();
            for r in [check_beta(d, &z, &cfg).unwrap(), check_alpha_over_beta(d, &z, &cfg).unwrap()] {
                let a = r.asymptotic.unwrap();
                let t = r.target.to_f64();
                assert!(!a.divergent && ((a.limit - t) / t).abs() < 1e-13, "d={d} {} {} vs {t}", r.quantity, a.limit);
            }
            let (ir, i00) = check_ricci(d, &z, &cfg).unwrap();
            let (a, b) = (ir.asymptotic.unwrap(), i00.asymptotic.unwrap());
            assert!(!a.divergent && (a.limit + 0.5).abs() < 1e-13, "d={d} I_R {}", a.limit);
            assert!(!b.divergent && b.limit.abs() < 1e-13, "d={d} I_00 {}", b.limit);
        }
        let r = check_beta(4, &[rat(10, 1)], &EvalConfig::default()).unwrap();
        assert_eq!(r.asymptotic.unwrap().leading_decay, Some(0.5));
        let r = check_beta(5, &[rat(10, 1)], &EvalConfig::default()).unwrap();
        assert_eq!(r.asymptotic.unwrap().leading_decay, Some(0.2));
    }

    #[test]
    fn d2_beta_close_at_1000() {
        let r = check_beta(2, &[rat(1000, 1)], &EvalConfig::default()).unwrap();
        assert!((r.target.to_f64() - 0.25).abs() < 1e-15);
        assert!(r.final_error < 0.01, "{}", r.final_error);
        let r = check_alpha_over_beta(2, &[rat(10, 1), rat(100, 1)], &EvalConfig::default()).unwrap();
        assert!((r.target.to_f64() - 0.5).abs() < 1e-15);
    }
}

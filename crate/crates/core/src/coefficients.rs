//! Dimension-dependent constants of the causal-set d'Alembertian.
//!
//! Everything is exact: rationals, π powers, radicals and Γ at rational
//! arguments stay symbolic in [`ExactScalar`]. The layer coefficients C_i are
//! plain rationals in every dimension.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{binomial, gamma_ratio, ExactScalar};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn check_dim(d: u32) -> Result<()> {
    if d < 2 {
        Err(Error::Dimension(d as i64))
    } else {
        Ok(())
    }
}

/// Volume of the unit k-sphere, S_k = 2π^((k+1)/2) / Γ((k+1)/2).
pub fn sphere_volume(k: u32) -> ExactScalar {
    let h = q(k as i64 + 1, 2);
    ExactScalar::pi_pow(h.clone())
        .scale(&q(2, 1))
        .div(&ExactScalar::gamma(&h))
}

/// c_d = S_(d-2) / (d (d-1) 2^(d/2 - 1)), the volume of a unit-uv diamond.
pub fn volume_constant(d: u32) -> Result<ExactScalar> {
    check_dim(d)?;
    let d = d as i64;
    let two_pow = ExactScalar::rational_pow(&q(2, 1), &q(d - 2, 2));
    Ok(sphere_volume(d as u32 - 2)
        .scale(&q(1, d * (d - 1)))
        .div(&two_pow))
}

fn c_pow_two_over_d(d: u32) -> Result<ExactScalar> {
    Ok(volume_constant(d)?.pow(&q(2, d as i64)))
}

pub fn beta(d: u32) -> Result<ExactScalar> {
    let c = c_pow_two_over_d(d)?;
    let di = d as i64;
    let g = ExactScalar::gamma;
    if d.is_multiple_of(2) {
        let num = g(&q(di / 2 + 2, 1)).mul(&g(&q(di / 2 + 1, 1))).scale(&q(2, 1));
        let den = g(&q(2, di)).mul(&g(&q(di, 1)));
        Ok(num.div(&den).mul(&c))
    } else {
        let den = g(&q(di + 2, di)).scale(&BigRational::from_integer(BigInt::one() << (d - 1)));
        Ok(c.scale(&q(di + 1, 1)).div(&den))
    }
}

pub fn alpha(d: u32) -> Result<ExactScalar> {
    let c = c_pow_two_over_d(d)?;
    let f = if d.is_multiple_of(2) { -2 } else { -1 };
    Ok(c.scale(&q(f, 1)).div(&ExactScalar::gamma(&q(d as i64 + 2, d as i64))))
}

/// α_d/β_d from its own closed form, not from [`alpha`] and [`beta`].
pub fn alpha_over_beta(d: u32) -> Result<ExactScalar> {
    check_dim(d)?;
    let di = d as i64;
    if d.is_multiple_of(2) {
        let g = ExactScalar::gamma;
        let den = g(&q(di / 2 + 2, 1)).mul(&g(&q(di / 2, 1)));
        Ok(g(&q(di, 1)).div(&den).neg())
    } else {
        Ok(ExactScalar::rational(-BigRational::new(BigInt::one() << (d - 1), BigInt::from(d + 1))))
    }
}

/// n_d, the number of layers the operator needs.
pub fn layer_count(d: u32) -> Result<usize> {
    check_dim(d)?;
    Ok(if d.is_multiple_of(2) { d as usize / 2 + 2 } else { (d as usize - 1) / 2 + 2 })
}

/// C_i = Σ_k binom(i-1, k) (-1)^k Γ(dk/2 + n_d) / (Γ(dk/2 + 1) (n_d - 1)!).
///
/// Each Γ ratio has an integer offset and reduces to a finite product, so the
/// sum is exact. Vanishes for i > n_d.
pub fn layer_coefficient(d: u32, i: usize) -> Result<BigRational> {
    let n = layer_count(d)?;
    if i == 0 {
        return Err(Error::Invalid("layer index starts at 1".into()));
    }
    let m = n as i64 - 1;
    let m_fact: BigInt = (1..=m).map(BigInt::from).product();
    let mut sum = BigRational::zero();
    for k in 0..i as u64 {
        let x = q(d as i64 * k as i64 + 2, 2);
        let r = gamma_ratio(&(&x + BigRational::from_integer(m.into())), &x);
        let b = BigRational::from_integer(binomial(i as u64 - 1, k));
        let term = b * r;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum / BigRational::from_integer(m_fact))
}

/// ζ_d = -α_d (l/l_p)^(d-2).
pub fn zeta(d: u32, l_over_lp: &BigRational) -> Result<ExactScalar> {
    if !l_over_lp.is_positive() {
        return Err(Error::Invalid(format!("l/l_p must be positive, got {l_over_lp}")));
    }
    let a = alpha(d)?;
    Ok(a.neg().scale(&num_traits::Pow::pow(l_over_lp, d - 2)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet {
    pub dim: u32,
    pub c_d: ExactScalar,
    pub alpha: ExactScalar,
    pub beta: ExactScalar,
    pub n_d: usize,
    /// C_1..C_(n_d)
    pub layer_coefficients: Vec<BigRational>,
    pub l_over_lp: BigRational,
    pub zeta: ExactScalar,
    /// Coefficient of Rφ in the curved-space limit.
    pub ricci_prefactor: BigRational,
}

pub fn coefficient_set(d: u32, l_over_lp: &BigRational) -> Result<CoefficientSet> {
    let n_d = layer_count(d)?;
    let layer_coefficients = (1..=n_d)
        .map(|i| layer_coefficient(d, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefficientSet {
        dim: d,
        c_d: volume_constant(d)?,
        alpha: alpha(d)?,
        beta: beta(d)?,
        n_d,
        layer_coefficients,
        l_over_lp: l_over_lp.clone(),
        zeta: zeta(d, l_over_lp)?,
        ricci_prefactor: q(-1, 2),
    })
}

impl CoefficientSet {
    /// β/α as an exact scalar.
    pub fn beta_over_alpha(&self) -> ExactScalar {
        self.beta.div(&self.alpha)
    }
}

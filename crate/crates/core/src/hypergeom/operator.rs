//! The operator O^(d) = Π_(i=1..m) (H + 2i) / (2^m m!), m = n_d - 1, and
//! the generating polynomial of the layer coefficients.
//!
//! H acts on the n-th term of a power series in w ∝ l^-d as multiplication
//! by dn.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::PolynomialExact;
use super::{rat, HypergeometricSpec};
use crate::coefficients::layer_count;
use crate::error::{Error, Result};

fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// Polynomial in H.
pub fn od_operator_polynomial(d: u32) -> Result<PolynomialExact> {
    let m = layer_count(d)? - 1;
    let mut p = PolynomialExact::constant(BigRational::one());
    for i in 1..=m {
        p = p.mul(&PolynomialExact::linear(rat(2 * i as i64, 1)));
    }
    let norm = BigInt::from(1u32) << m;
    Ok(p.scale(&BigRational::new(BigInt::one(), norm * factorial(m))))
}

/// pFq parameters generated by O^(d) acting on e^-w: upper 2j/d + 1, lower
/// 2j/d for j = 1..m.
pub fn operator_spec(d: u32) -> Result<HypergeometricSpec> {
    let m = layer_count(d)? - 1;
    let di = d as i64;
    HypergeometricSpec::new(
        (1..=m as i64).map(|j| rat(2 * j + di, di)).collect(),
        (1..=m as i64).map(|j| rat(2 * j, di)).collect(),
    )
}

/// O^(d) e^-w = e^-w P(w). Returns P, checking through degree `truncation`
/// that nothing beyond degree n_d - 1 survives.
pub fn apply_od_to_exponential(d: u32, truncation: usize) -> Result<PolynomialExact> {
    let n_d = layer_count(d)?;
    if truncation < n_d {
        return Err(Error::Invalid(format!(
            "truncation {truncation} cannot certify degree {} (need at least {n_d})",
            n_d - 1
        )));
    }
    let op = od_operator_polynomial(d)?;
    let fact: Vec<BigRational> = (0..=truncation).map(|k| BigRational::from_integer(factorial(k))).collect();
    // coefficient of w^j in e^w Σ_n O(dn) (-w)^n / n!
    let coeffs: Vec<BigRational> = (0..=truncation)
        .map(|j| {
            (0..=j)
                .map(|n| {
                    let o = op.eval(&BigRational::from_integer(BigInt::from(d as usize * n)));
                    let t = o / (&fact[n] * &fact[j - n]);
                    if n % 2 == 0 {
                        t
                    } else {
                        -t
                    }
                })
                .sum()
        })
        .collect();
    if coeffs[n_d..].iter().any(|c| !c.is_zero()) {
        return Err(Error::Invalid(format!("O^({d}) e^-w left terms beyond degree {}", n_d - 1)));
    }
    Ok(PolynomialExact::new(coeffs))
}

/// G_d(z) = e^z pFq(2j/d+1; 2j/d; -z), built as the Cauchy product of the
/// two series and truncated once the product is seen to terminate.
pub fn generating_polynomial(d: u32) -> Result<PolynomialExact> {
    let n_d = layer_count(d)?;
    let spec = operator_spec(d)?;
    let top = n_d + 3;
    let mut fs = Vec::with_capacity(top + 1);
    let mut c = BigRational::one();
    for n in 0..=top as u64 {
        fs.push(if n % 2 == 0 { c.clone() } else { -c.clone() });
        c *= spec.term_ratio(n);
    }
    let mut inv_fact = vec![BigRational::one(); top + 1];
    for k in 1..=top {
        inv_fact[k] = &inv_fact[k - 1] / BigRational::from_integer(k.into());
    }
    let coeffs: Vec<BigRational> = (0..=top)
        .map(|j| (0..=j).map(|n| &fs[n] * &inv_fact[j - n]).sum())
        .collect();
    if coeffs[n_d..].iter().any(|c| !c.is_zero()) {
        return Err(Error::Invalid(format!("generating polynomial for d={d} does not terminate")));
    }
    Ok(PolynomialExact::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::layer_coefficient;

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn operator_polynomials() {
        let p2 = od_operator_polynomial(2).unwrap();
        assert_eq!(p2.coeffs(), &[rat(1, 1), rat(6, 8), rat(1, 8)]);
        assert_eq!(od_operator_polynomial(3).unwrap(), p2);
        let p4 = od_operator_polynomial(4).unwrap();
        assert_eq!(p4, PolynomialExact::new(ints(&[48, 44, 12, 1])).scale(&rat(1, 48)));
    }

    #[test]
    fn applied_to_exponential() {
        let p = apply_od_to_exponential(2, 6).unwrap();
        assert_eq!(p.coeffs(), &[rat(1, 1), rat(-2, 1), rat(1, 2)]);
        let p = apply_od_to_exponential(3, 6).unwrap();
        assert_eq!(p.coeffs(), &[rat(1, 1), rat(-27, 8), rat(9, 8)]);
        let p = apply_od_to_exponential(4, 8).unwrap();
        let c: Vec<_> = (0..4).map(|k| p.derivative_at_zero(k)).collect();
        assert_eq!(c, ints(&[1, -9, 16, -8]));
        assert!(apply_od_to_exponential(4, 3).is_err());
    }

    #[test]
    fn generating_matches_layer_sums() {
        for d in 2..=8 {
            let g = generating_polynomial(d).unwrap();
            let n = layer_count(d).unwrap();
            assert_eq!(g.degree(), Some(n - 1));
            assert!(g.coeff(0).is_one());
            for i in 1..=n + 3 {
                assert_eq!(g.derivative_at_zero(i - 1), layer_coefficient(d, i).unwrap(), "d={d} i={i}");
            }
            assert_eq!(g, apply_od_to_exponential(d, n + 3).unwrap());
        }
    }
}

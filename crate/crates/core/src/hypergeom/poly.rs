//! Dense polynomials with exact rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients in ascending order; trailing zeros are always trimmed, so the
/// zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PolynomialExact {
    coeffs: Vec<BigRational>,
}

impl PolynomialExact {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolynomialExact { coeffs }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `x + s`
    pub fn linear(s: BigRational) -> Self {
        Self::new(vec![s, BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(k.into()))
                .collect(),
        )
    }

    /// k-th derivative at zero, k!·c_k.
    pub fn derivative_at_zero(&self, k: usize) -> BigRational {
        let f: BigInt = (1..=k).map(BigInt::from).product();
        self.coeff(k) * BigRational::from_integer(f)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::default();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::default(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Coefficients in the falling-factorial basis x(x-1)...(x-j+1).
    pub fn falling_factorial_coeffs(&self) -> Vec<BigRational> {
        let n = self.coeffs.len();
        // Stirling numbers of the second kind, S(k, j)
        let mut s = vec![vec![BigInt::zero(); n + 1]; n + 1];
        s[0][0] = BigInt::one();
        for k in 1..=n {
            for j in 1..=k {
                s[k][j] = &s[k - 1][j] * BigInt::from(j) + &s[k - 1][j - 1];
            }
        }
        (0..n)
            .map(|j| {
                (j..n)
                    .map(|k| &self.coeffs[k] * BigRational::from_integer(s[k][j].clone()))
                    .sum()
            })
            .collect()
    }
}

impl fmt::Display for PolynomialExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

impl PolynomialExact {
    /// Human-readable form in the named variable, highest power first.
    pub fn render(&self, var: &str) -> String {
        use std::fmt::Write;
        if self.is_zero() {
            return "0".into();
        }
        let mut f = String::new();
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.push('-');
                }
            } else {
                let _ = write!(f, " {sign} ");
            }
            first = false;
            let a = c.abs();
            let body = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if a.is_one() && k > 0 {
                f.push_str(&body);
            } else if k == 0 {
                let _ = write!(f, "{a}");
            } else {
                let _ = write!(f, "{a}*{body}");
            }
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> PolynomialExact {
        PolynomialExact::new(v.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    #[test]
    fn arithmetic() {
        let a = p(&[2, 1]);
        let b = p(&[4, 1]);
        assert_eq!(a.mul(&b), p(&[8, 6, 1]));
        let (qt, r) = p(&[8, 6, 1]).divrem(&a);
        assert_eq!(qt, b);
        assert!(r.is_zero());
        let (qt, r) = p(&[1, 0, 1]).divrem(&p(&[1, 1]));
        assert_eq!(qt, p(&[-1, 1]));
        assert_eq!(r, p(&[2]));
        assert_eq!(p(&[1, 2, 3]).derivative(), p(&[2, 6]));
        assert_eq!(p(&[0, 0, 5]).derivative_at_zero(2), BigRational::from_integer(10.into()));
        assert_eq!(p(&[3, 0, 0]).degree(), Some(0));
        assert_eq!(format!("{}", p(&[8, -6, 1])), "x^2 - 6*x + 8");
    }

    #[test]
    fn falling_basis() {
        // x^2 = x(x-1) + x
        let c = p(&[0, 0, 1]).falling_factorial_coeffs();
        assert_eq!(c, vec![BigRational::zero(), BigRational::one(), BigRational::one()]);
    }
}

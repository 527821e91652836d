use std::fmt;

use rug::{Integer, Rational};
use serde::{Serialize, Serializer};

use crate::ball::Ball;
use crate::scalar::{factorial, Scalar};

/// Dense univariate polynomial, coefficients from low to high degree.
///
/// Trailing coefficients that are exactly zero are trimmed, so an exact
/// polynomial always has a nonzero leading coefficient. A ball polynomial may
/// still carry a leading coefficient whose enclosure contains zero; see
/// [`Polynomial::leading_certified`].
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T: Scalar = Rational> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_exact_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Polynomial::new(vec![c])
    }

    /// c·x^n.
    pub fn monomial(c: T, n: usize) -> Self {
        let mut coeffs = vec![c.zero_like(); n];
        coeffs.push(c);
        Polynomial::new(coeffs)
    }

    /// Π (x - r) · lead.
    pub fn from_roots(lead: T, roots: &[T]) -> Self {
        let mut p = Polynomial::constant(lead);
        for r in roots {
            let factor = Polynomial::new(vec![r.neg(), r.one_like()]);
            p = p.mul(&factor);
        }
        p
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of x^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Option<&T> {
        self.coeffs.get(k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nominal degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Whether the leading coefficient is certified nonzero.
    pub fn leading_certified(&self) -> bool {
        self.leading()
            .and_then(Scalar::sign)
            .is_some_and(|s| s != std::cmp::Ordering::Equal)
    }

    pub fn eval(&self, x: &T) -> T {
        match self.coeffs.split_last() {
            None => x.zero_like(),
            Some((lead, rest)) => rest.iter().rev().fold(lead.clone(), |acc, c| acc.mul(x).add(c)),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn neg(&self) -> Self {
        Polynomial { coeffs: self.coeffs.iter().map(Scalar::neg).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &T) -> Self {
        Polynomial::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Polynomial::new(out)
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.mul(&c.int_like(k as i64)))
                .collect(),
        )
    }

    /// j-th derivative.
    pub fn derivative_n(&self, j: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(j)
            .map(|(k, c)| {
                // k!/(k-j)!
                let f = factorial(k as u32) / factorial((k - j) as u32) ;
                c.mul_int(&f)
            })
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn to_ball(&self, prec: u32) -> Polynomial<Ball> {
        Polynomial { coeffs: self.coeffs.iter().map(|c| c.to_ball(prec)).collect() }
    }

    /// The same polynomial over the rationals, when every coefficient is exact.
    pub fn to_exact(&self) -> Option<Polynomial<Rational>> {
        let coeffs = self.coeffs.iter().map(Scalar::to_exact).collect::<Option<Vec<_>>>()?;
        Some(Polynomial::new(coeffs))
    }
}

impl Polynomial<Rational> {
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    /// Euclidean division, `(quotient, remainder)`. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut quot = vec![Rational::new(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = Rational::from(&rem[k + dd] / &lead);
            if c.cmp0() != std::cmp::Ordering::Equal {
                for (i, di) in d.coeffs.iter().enumerate() {
                    rem[k + i] -= Rational::from(&c * di);
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    /// Positive rescaling to a primitive integer polynomial (signs preserved).
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut lcm = Integer::from(1);
        for c in &self.coeffs {
            lcm.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = self.coeffs.iter().map(|c| Rational::from(c * &lcm).into_numer_denom().0).collect();
        let mut g = Integer::new();
        for i in &ints {
            g.gcd_mut(i);
        }
        Polynomial::new(ints.into_iter().map(|i| Rational::from(i / &g)).collect())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1.primitive();
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Polynomial::zero(),
            Some(l) => {
                let inv = Rational::from(l.recip_ref());
                self.scale(&inv)
            }
        }
    }

    /// Yun's square-free decomposition: p = c · Π f_i^i with each f_i
    /// square-free and pairwise coprime; returns (i, f_i) for nonconstant f_i.
    pub fn square_free_decomposition(&self) -> Vec<(usize, Polynomial<Rational>)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let dp = self.derivative();
        let a0 = self.gcd(&dp);
        let mut b = self.div_rem(&a0).0;
        let mut c = dp.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((i, a.clone()));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})*x"),
                _ => format!("({c})*x^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Serialize for Polynomial<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl Serialize for Polynomial<Ball> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_i64(c)
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1, 1]);
        assert_eq!(a.mul(&a), p(&[1, 2, 1]));
        assert_eq!(p(&[1, 2, 1]).sub(&p(&[0, 0, 1])), p(&[1, 2]));
        assert_eq!(p(&[0, 0, 0, 1]).derivative_n(2), p(&[0, 6]));
        assert_eq!(p(&[2, 0, 1]).eval(&Rational::from(3)), Rational::from(11));
        assert!(p(&[0, 0]).is_zero());
    }

    #[test]
    fn division_and_gcd() {
        let (q, r) = p(&[-1, 0, 0, 1]).div_rem(&p(&[-1, 1]));
        assert_eq!(q, p(&[1, 1, 1]));
        assert!(r.is_zero());
        let g = p(&[-1, 0, 1]).gcd(&p(&[1, 2, 1]));
        assert_eq!(g, p(&[1, 1]));
    }

    #[test]
    fn yun_decomposition() {
        // x (x-1)^2 (x+2)^3
        let f = p(&[0, 1]).mul(&p(&[-1, 1]).mul(&p(&[-1, 1]))).mul(&p(&[2, 1]).mul(&p(&[2, 1])).mul(&p(&[2, 1])));
        let sf = f.square_free_decomposition();
        assert_eq!(sf, vec![(1, p(&[0, 1])), (2, p(&[-1, 1])), (3, p(&[2, 1]))]);
    }
}

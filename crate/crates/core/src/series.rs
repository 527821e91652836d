//! Truncated power series in factorial normalization: `coeffs[j]` is β_j in
//! Σ β_j s^j / j!. The convention is fixed across the crate.

use rug::Float;
use serde::Serialize;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, Scalar};

#[derive(Clone, Debug)]
pub struct PowerSeries<T: Scalar = Ball> {
    coeffs: Vec<T>,
}

impl<T: Scalar> PowerSeries<T> {
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "power series needs at least one coefficient");
        PowerSeries { coeffs }
    }

    /// From ordinary Taylor coefficients a_j (multiplies by j!).
    pub fn from_taylor(taylor: Vec<T>) -> Self {
        let coeffs = taylor
            .into_iter()
            .enumerate()
            .map(|(j, a)| a.mul_int(&factorial(j as u32)))
            .collect();
        PowerSeries::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Number of stored coefficients, N + 1.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Truncation order N.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn truncate(&self, len: usize) -> Self {
        PowerSeries::new(self.coeffs[..len.clamp(1, self.len())].to_vec())
    }

    /// Ordinary Taylor coefficient β_j / j!.
    pub fn taylor_coeff(&self, j: usize) -> T {
        let f = factorial(j as u32);
        let c = &self.coeffs[j];
        c.div(&c.integer_like(&f)).expect("factorial is nonzero")
    }

    /// Σ_{j≤N} β_j s^j / j! (truncated sum, no tail bound).
    pub fn eval(&self, s: &T) -> T {
        let n = self.order();
        // Horner on a_j = β_j/j!: fold from the top, dividing by j at each step.
        let mut acc = self.coeffs[n].clone();
        for j in (0..n).rev() {
            let jp1 = acc.int_like(j as i64 + 1);
            acc = acc.mul(s).div(&jp1).expect("nonzero").add(&self.coeffs[j]);
        }
        acc
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let len = self.len().min(rhs.len());
        PowerSeries::new((0..len).map(|j| self.coeffs[j].add(&rhs.coeffs[j])).collect())
    }

    pub fn scale(&self, c: &T) -> Self {
        PowerSeries::new(self.coeffs.iter().map(|b| b.mul(c)).collect())
    }

    /// Product; in this normalization it is the binomial convolution.
    pub fn mul(&self, rhs: &Self) -> Self {
        let len = self.len().min(rhs.len());
        let coeffs = (0..len)
            .map(|n| {
                let mut acc = self.coeffs[0].zero_like();
                for k in 0..=n {
                    let term = self.coeffs[k].mul(&rhs.coeffs[n - k]);
                    acc = acc.add(&term.mul_int(&binomial(n as u32, k as u32)));
                }
                acc
            })
            .collect();
        PowerSeries::new(coeffs)
    }

    /// Multiplicative inverse, γ_n = -(1/β_0) Σ_{k=1..n} C(n,k) β_k γ_{n-k}.
    pub fn reciprocal(&self) -> Result<Self> {
        let b0 = &self.coeffs[0];
        let one = b0.one_like();
        let inv0 = one.div(b0).ok_or(Error::ZeroConstantTerm)?;
        let mut out = vec![inv0.clone()];
        for n in 1..self.len() {
            let mut acc = b0.zero_like();
            for k in 1..=n {
                let term = self.coeffs[k].mul(&out[n - k]);
                acc = acc.add(&term.mul_int(&binomial(n as u32, k as u32)));
            }
            out.push(acc.mul(&inv0).neg());
        }
        Ok(PowerSeries::new(out))
    }

    /// exp of a series with zero constant term: e_{n+1} = Σ_k C(n,k) ℓ_{k+1} e_{n-k}.
    pub fn exp_of(log: &Self) -> Result<Self> {
        if !log.coeffs[0].is_exact_zero() {
            return Err(Error::Precondition("exp_of needs a zero constant term".into()));
        }
        let mut out = vec![log.coeffs[0].one_like()];
        for n in 0..log.order() {
            let mut acc = log.coeffs[0].zero_like();
            for k in 0..=n {
                let term = log.coeffs[k + 1].mul(&out[n - k]);
                acc = acc.add(&term.mul_int(&binomial(n as u32, k as u32)));
            }
            out.push(acc);
        }
        Ok(PowerSeries::new(out))
    }

    /// Adds an absolute error bound to every coefficient.
    pub fn widen_each(&self, errs: &[Float]) -> Option<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(errs)
            .map(|(c, e)| c.widen(e))
            .collect::<Option<Vec<_>>>()?;
        Some(PowerSeries::new(coeffs))
    }

    pub fn to_ball(&self, prec: u32) -> PowerSeries<Ball> {
        PowerSeries::new(self.coeffs.iter().map(|c| c.to_ball(prec)).collect())
    }
}

impl PowerSeries<Ball> {
    pub fn max_radius(&self) -> Float {
        self.coeffs
            .iter()
            .map(|c| c.rad().clone())
            .fold(Float::with_val(53, 0), |a, b| if b > a { b } else { a })
    }
}

/// Serialized form: factorial-normalized coefficients as center/radius pairs.
#[derive(Serialize)]
struct SeriesJson<'a> {
    normalization: &'static str,
    coeffs: &'a [Ball],
}

impl Serialize for PowerSeries<Ball> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson { normalization: "factorial", coeffs: &self.coeffs }.serialize(s)
    }
}

/// The series of e^{cs}: all β_j = c^j.
pub fn exp_series<T: Scalar>(c: &T, len: usize) -> PowerSeries<T> {
    let mut coeffs = Vec::with_capacity(len.max(1));
    let mut p = c.one_like();
    for _ in 0..len.max(1) {
        coeffs.push(p.clone());
        p = p.mul(c);
    }
    PowerSeries::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rug::Rational;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn reciprocal_of_one_plus_s() {
        let ps = PowerSeries::new(vec![q(1), q(1), q(0), q(0), q(0)]);
        let r = ps.reciprocal().unwrap();
        for (j, g) in r.coeffs().iter().enumerate() {
            let expect = Rational::from(factorial(j as u32)) * if j % 2 == 0 { 1 } else { -1 };
            assert_eq!(*g, expect);
        }
    }

    #[test]
    fn reciprocal_of_exp_alternates() {
        let r = exp_series(&q(1), 8).reciprocal().unwrap();
        for (j, g) in r.coeffs().iter().enumerate() {
            assert_eq!(*g, q(if j % 2 == 0 { 1 } else { -1 }));
        }
    }

    #[test]
    fn exp_of_linear_is_exponential() {
        let log = PowerSeries::new(vec![q(0), q(3), q(0), q(0), q(0)]);
        let e = PowerSeries::exp_of(&log).unwrap();
        assert_eq!(e.coeffs(), exp_series(&q(3), 5).coeffs());
    }

    #[test]
    fn eval_matches_polynomial() {
        // 1 + s + s^2 has β = (1, 1, 2)
        let ps = PowerSeries::new(vec![q(1), q(1), q(2)]);
        assert_eq!(ps.eval(&q(3)), q(13));
    }

    proptest! {
        #[test]
        fn reciprocal_is_an_involution(c in prop::collection::vec(-20i64..20, 1..8), c0 in 1i64..9) {
            let mut coeffs: Vec<Rational> = c.into_iter().map(q).collect();
            coeffs[0] = q(c0);
            let ps = PowerSeries::new(coeffs);
            let back = ps.reciprocal().unwrap().reciprocal().unwrap();
            prop_assert_eq!(back.coeffs(), ps.coeffs());
            let prod = ps.mul(&ps.reciprocal().unwrap());
            prop_assert_eq!(&prod.coeffs()[0], &q(1));
            for c in &prod.coeffs()[1..] {
                prop_assert_eq!(c, &q(0));
            }
        }
    }
}

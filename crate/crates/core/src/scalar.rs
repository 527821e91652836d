//! Coefficient fields shared by power series, polynomials and matrices.
//!
//! Two implementations exist: exact [`Rational`]s and [`Ball`]s. Constants are
//! created "like" an existing value so balls inherit the working precision.

use std::cmp::Ordering;
use std::fmt::Debug;

use rug::{Float, Integer, Rational};

use crate::ball::Ball;

pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn integer_like(&self, n: &Integer) -> Self;
    fn rational_like(&self, q: &Rational) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `None` when the divisor is not certified nonzero.
    fn div(&self, rhs: &Self) -> Option<Self>;
    /// Certified sign; `None` when undecided.
    fn sign(&self) -> Option<Ordering>;
    /// Adds an absolute error bound. Exact scalars only accept a zero bound.
    fn widen(&self, err: &Float) -> Option<Self>;
    fn to_ball(&self, prec: u32) -> Ball;
    /// The value as a rational when it is known exactly.
    fn to_exact(&self) -> Option<Rational>;
    /// Precision to use when converting to balls without further context.
    fn ball_prec(&self) -> u32 {
        256
    }
    /// Whether the value is certified to equal zero exactly.
    fn is_exact_zero(&self) -> bool {
        self.sign() == Some(Ordering::Equal)
    }
    fn int_like(&self, n: i64) -> Self {
        self.integer_like(&Integer::from(n))
    }
    fn mul_int(&self, n: &Integer) -> Self {
        self.mul(&self.integer_like(n))
    }
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn integer_like(&self, n: &Integer) -> Self {
        Rational::from(n.clone())
    }
    fn rational_like(&self, q: &Rational) -> Self {
        q.clone()
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational::from(self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Rational::from(self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational::from(self * rhs)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn div(&self, rhs: &Self) -> Option<Self> {
        if rhs.cmp0() == Ordering::Equal {
            None
        } else {
            Some(Rational::from(self / rhs))
        }
    }
    fn sign(&self) -> Option<Ordering> {
        Some(self.cmp0())
    }
    fn widen(&self, err: &Float) -> Option<Self> {
        if err.is_zero() {
            Some(self.clone())
        } else {
            None
        }
    }
    fn to_ball(&self, prec: u32) -> Ball {
        Ball::from_rational(self, prec)
    }
    fn to_exact(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Scalar for Ball {
    fn zero_like(&self) -> Self {
        Ball::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        Ball::one(self.prec())
    }
    fn integer_like(&self, n: &Integer) -> Self {
        Ball::from_integer(n, self.prec())
    }
    fn rational_like(&self, q: &Rational) -> Self {
        Ball::from_rational(q, self.prec())
    }
    fn add(&self, rhs: &Self) -> Self {
        Ball::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Ball::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Ball::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        Ball::neg(self)
    }
    fn div(&self, rhs: &Self) -> Option<Self> {
        Ball::div(self, rhs)
    }
    fn sign(&self) -> Option<Ordering> {
        Ball::sign(self)
    }
    fn widen(&self, err: &Float) -> Option<Self> {
        Some(Ball::widen(self, err))
    }
    fn to_ball(&self, prec: u32) -> Ball {
        self.set_prec(prec)
    }
    fn to_exact(&self) -> Option<Rational> {
        if self.is_exact() {
            self.mid().to_rational()
        } else {
            None
        }
    }
    fn ball_prec(&self) -> u32 {
        self.prec()
    }
}

/// n! as an integer.
pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Binomial coefficient C(n, k).
pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

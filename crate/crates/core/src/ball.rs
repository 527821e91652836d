//! Midpoint-radius ("ball") arithmetic on top of MPFR.
//!
//! A [`Ball`] stores an MPFR midpoint at the working precision together with a
//! 53-bit radius that is always rounded upward. Every operation adds the
//! rounding error of the midpoint to the propagated radius, so the result
//! encloses every value obtainable from points inside the operand balls.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::NegAssign;
use rug::{Float, Integer, Rational};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Precision of radii, in bits.
pub const RAD_PREC: u32 = 53;

fn rad_zero() -> Float {
    Float::new(RAD_PREC)
}

fn up<T>(val: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, val, Round::Up).0
}

fn down<T>(val: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, val, Round::Down).0
}

/// Upper bound for |x| at radius precision.
fn abs_up(x: &Float) -> Float {
    up(x.as_abs().clone())
}

/// Lower bound for |x| at radius precision.
fn abs_down(x: &Float) -> Float {
    down(x.as_abs().clone())
}

/// One unit in the last place of `x` at its own precision (zero for zero).
pub fn ulp(x: &Float) -> Float {
    match x.get_exp() {
        Some(e) => {
            let one = Float::with_val(RAD_PREC, 1);
            one << (e - x.prec() as i32)
        }
        None => rad_zero(),
    }
}

/// Converts a decimal digit count to a binary working precision.
pub fn digits_to_bits(digits: u32) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

#[derive(Clone)]
pub struct Ball {
    mid: Float,
    rad: Float,
}

impl Ball {
    /// An exact ball (zero radius).
    pub fn exact(mid: Float) -> Self {
        Ball { mid, rad: rad_zero() }
    }

    /// Ball with a given midpoint and radius; the radius is rounded upward and
    /// its absolute value taken.
    pub fn with_rad(mid: Float, rad: &Float) -> Self {
        let rad = if rad.is_nan() {
            Float::with_val(RAD_PREC, rug::float::Special::Infinity)
        } else {
            abs_up(rad)
        };
        Ball { mid, rad }
    }

    pub fn zero(prec: u32) -> Self {
        Ball::exact(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Ball::exact(Float::with_val(prec, 1))
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        let (mid, o) = Float::with_val_round(prec, n, Round::Nearest);
        Ball::rounded(mid, o)
    }

    pub fn from_integer(n: &Integer, prec: u32) -> Self {
        let (mid, o) = Float::with_val_round(prec, n, Round::Nearest);
        Ball::rounded(mid, o)
    }

    /// Encloses the exact binary value of `x`.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        let (mid, o) = Float::with_val_round(prec.max(53), x, Round::Nearest);
        Ball::rounded(mid, o)
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let (mid, o) = Float::with_val_round(prec, q, Round::Nearest);
        Ball::rounded(mid, o)
    }

    /// Parses a decimal string such as `"0.25"` or `"1e-3"` into an enclosure.
    pub fn parse(s: &str, prec: u32) -> Option<Self> {
        let parsed = Float::parse(s).ok()?;
        let (mid, o) = Float::with_val_round(prec, parsed, Round::Nearest);
        Some(Ball::rounded(mid, o))
    }

    fn rounded(mid: Float, o: Ordering) -> Self {
        let rad = if o == Ordering::Equal { rad_zero() } else { ulp(&mid) };
        Ball { mid, rad }
    }

    /// Result of a correctly rounded operation plus a propagated radius.
    fn from_parts((mid, o): (Float, Ordering), propagated: Float) -> Self {
        let rad = if o == Ordering::Equal {
            propagated
        } else {
            up(&propagated + &ulp(&mid))
        };
        Ball { mid, rad }
    }

    pub fn pi(prec: u32) -> Self {
        Ball::rounded(Float::with_val(prec, Constant::Pi), Ordering::Less)
    }

    pub fn ln2(prec: u32) -> Self {
        Ball::rounded(Float::with_val(prec, Constant::Log2), Ordering::Less)
    }

    pub fn euler(prec: u32) -> Self {
        Ball::rounded(Float::with_val(prec, Constant::Euler), Ordering::Less)
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    /// Same enclosure with the midpoint carried at a different precision.
    pub fn set_prec(&self, prec: u32) -> Self {
        let (mid, o) = Float::with_val_round(prec, &self.mid, Round::Nearest);
        let extra = if o == Ordering::Equal { rad_zero() } else { ulp(&mid) };
        Ball { mid, rad: up(&self.rad + &extra) }
    }

    /// Lower endpoint, rounded down.
    pub fn lo(&self) -> Float {
        Float::with_val_round(self.prec().max(RAD_PREC), &self.mid - &self.rad, Round::Down).0
    }

    /// Upper endpoint, rounded up.
    pub fn hi(&self) -> Float {
        Float::with_val_round(self.prec().max(RAD_PREC), &self.mid + &self.rad, Round::Up).0
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.mid.is_finite() && self.rad.is_finite()
    }

    pub fn is_positive(&self) -> bool {
        self.is_finite() && self.lo() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.is_finite() && self.hi() < 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.is_finite() && self.lo() >= 0
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.mid.is_zero() && self.rad.is_zero()
    }

    /// Certified sign, `None` when the ball straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.is_exact_zero() {
            Some(Ordering::Equal)
        } else if self.is_positive() {
            Some(Ordering::Greater)
        } else if self.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn contains(&self, x: &Float) -> bool {
        self.lo() <= *x && *x <= self.hi()
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.contains(&Float::with_val(53, x))
    }

    /// Whether every point of `other` lies inside `self`.
    pub fn contains_ball(&self, other: &Ball) -> bool {
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        self.lo() <= other.hi() && other.lo() <= self.hi()
    }

    /// Intersection of two enclosures of the same quantity.
    pub fn intersect(&self, other: &Ball) -> Option<Ball> {
        let lo = std::cmp::max_by(self.lo(), other.lo(), |a, b| a.partial_cmp(b).unwrap());
        let hi = std::cmp::min_by(self.hi(), other.hi(), |a, b| a.partial_cmp(b).unwrap());
        if lo > hi {
            return None;
        }
        let prec = self.prec().max(other.prec());
        Some(Ball::from_endpoints(&lo, &hi, prec))
    }

    /// Smallest ball (up to rounding) containing `[lo, hi]`.
    pub fn from_endpoints(lo: &Float, hi: &Float, prec: u32) -> Ball {
        let mut mid = Float::with_val(prec + 2, lo + hi);
        mid >>= 1;
        let mid = Float::with_val(prec, &mid);
        let r1 = up(&mid - lo);
        let r2 = up(hi - &mid);
        let rad = if r1 > r2 { r1 } else { r2 };
        Ball { mid, rad }
    }

    /// Ball enclosing both arguments.
    pub fn union(&self, other: &Ball) -> Ball {
        let lo = std::cmp::min_by(self.lo(), other.lo(), |a, b| a.partial_cmp(b).unwrap());
        let hi = std::cmp::max_by(self.hi(), other.hi(), |a, b| a.partial_cmp(b).unwrap());
        Ball::from_endpoints(&lo, &hi, self.prec().max(other.prec()))
    }

    /// Adds `err` to the radius.
    pub fn widen(&self, err: &Float) -> Ball {
        Ball { mid: self.mid.clone(), rad: up(&self.rad + &abs_up(err)) }
    }

    /// Multiplies the radius by `factor` (used for safety margins on
    /// estimated errors).
    pub fn inflate(&self, factor: f64) -> Ball {
        Ball { mid: self.mid.clone(), rad: up(&self.rad * factor) }
    }

    /// Upper bound for |x| over the ball.
    pub fn mag(&self) -> Float {
        up(&abs_up(&self.mid) + &self.rad)
    }

    /// Lower bound for |x| over the ball (zero if it contains zero).
    pub fn mig(&self) -> Float {
        let m = down(&abs_down(&self.mid) - &self.rad);
        if m < 0 {
            rad_zero()
        } else {
            m
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn neg(&self) -> Ball {
        let mut mid = self.mid.clone();
        mid.neg_assign();
        Ball { mid, rad: self.rad.clone() }
    }

    pub fn abs(&self) -> Ball {
        if self.mid < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, o: &Ball) -> Ball {
        let prec = self.prec().max(o.prec());
        let mid = Float::with_val_round(prec, &self.mid + &o.mid, Round::Nearest);
        Ball::from_parts(mid, up(&self.rad + &o.rad))
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        let prec = self.prec().max(o.prec());
        let mid = Float::with_val_round(prec, &self.mid - &o.mid, Round::Nearest);
        Ball::from_parts(mid, up(&self.rad + &o.rad))
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        let prec = self.prec().max(o.prec());
        let mid = Float::with_val_round(prec, &self.mid * &o.mid, Round::Nearest);
        let a = up(&abs_up(&self.mid) * &o.rad);
        let b = up(&abs_up(&o.mid) * &self.rad);
        let c = up(&self.rad * &o.rad);
        Ball::from_parts(mid, up(&up(&a + &b) + &c))
    }

    pub fn sqr(&self) -> Ball {
        self.mul(self)
    }

    pub fn mul_i64(&self, n: i64) -> Ball {
        let mid = Float::with_val_round(self.prec(), &self.mid * n, Round::Nearest);
        Ball::from_parts(mid, up(&self.rad * n.unsigned_abs()))
    }

    pub fn div_i64(&self, n: i64) -> Ball {
        assert!(n != 0, "division by zero");
        let mid = Float::with_val_round(self.prec(), &self.mid / n, Round::Nearest);
        Ball::from_parts(mid, up(&self.rad / n.unsigned_abs()))
    }

    /// Multiplication by 2^k, exact on the midpoint.
    pub fn mul_2exp(&self, k: i32) -> Ball {
        let mid = self.mid.clone() << k;
        Ball { mid, rad: up(self.rad.clone() << k) }
    }

    /// Quotient, `None` if the divisor ball contains zero.
    pub fn div(&self, o: &Ball) -> Option<Ball> {
        let den_lo = o.mig();
        if den_lo.is_zero() {
            return None;
        }
        let prec = self.prec().max(o.prec());
        let mid = Float::with_val_round(prec, &self.mid / &o.mid, Round::Nearest);
        let num = up(&up(&abs_up(&self.mid) * &o.rad) + &up(&abs_up(&o.mid) * &self.rad));
        let den = down(&abs_down(&o.mid) * &den_lo);
        Some(Ball::from_parts(mid, up(&num / &den)))
    }

    pub fn recip(&self) -> Option<Ball> {
        Ball::one(self.prec()).div(self)
    }

    pub fn powi(&self, n: u32) -> Ball {
        let mut result = Ball::one(self.prec());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        result
    }

    pub fn exp(&self) -> Ball {
        let mid = Float::with_val_round(self.prec(), self.mid.exp_ref(), Round::Nearest);
        let mut em1 = self.rad.clone();
        em1.exp_m1_round(Round::Up);
        let propagated = up(&up(&abs_up(&mid.0) + &ulp(&mid.0)) * &em1);
        Ball::from_parts(mid, propagated)
    }

    /// e^x − 1 without cancellation near zero.
    pub fn exp_m1(&self) -> Ball {
        let mid = Float::with_val_round(self.prec(), self.mid.exp_m1_ref(), Round::Nearest);
        let mut ec = up(&self.mid);
        ec.exp_round(Round::Up);
        let mut em1 = self.rad.clone();
        em1.exp_m1_round(Round::Up);
        Ball::from_parts(mid, up(&ec * &em1))
    }

    /// Natural logarithm, `None` unless the ball is certified positive.
    pub fn ln(&self) -> Option<Ball> {
        if !self.is_positive() {
            return None;
        }
        let mid = Float::with_val_round(self.prec(), self.mid.ln_ref(), Round::Nearest);
        let lo = down(self.lo());
        Some(Ball::from_parts(mid, up(&self.rad / &lo)))
    }

    /// Square root; balls that dip below zero are clipped at zero.
    pub fn sqrt(&self) -> Option<Ball> {
        if self.is_negative() {
            return None;
        }
        if self.rad.is_zero() {
            let mid = Float::with_val_round(self.prec(), self.mid.sqrt_ref(), Round::Nearest);
            return Some(Ball::from_parts(mid, rad_zero()));
        }
        let lo = self.lo();
        if lo <= 0 {
            let hi = self.hi();
            let mut s = Float::with_val(self.prec(), &hi);
            s.sqrt_round(Round::Up);
            return Some(Ball::from_endpoints(&Float::new(self.prec()), &s, self.prec()));
        }
        let mid = Float::with_val_round(self.prec(), self.mid.sqrt_ref(), Round::Nearest);
        let mut slo = down(&lo);
        slo.sqrt_round(Round::Down);
        let den = down(&down(&mid.0 - &ulp(&mid.0)) + &slo);
        Some(Ball::from_parts(mid, up(&self.rad / &den)))
    }

    fn lipschitz_one(&self, mid: (Float, Ordering)) -> Ball {
        let two = Float::with_val(RAD_PREC, 2);
        let r = if self.rad > two { two } else { self.rad.clone() };
        Ball::from_parts(mid, r)
    }

    pub fn sin(&self) -> Ball {
        let mid = Float::with_val_round(self.prec(), self.mid.sin_ref(), Round::Nearest);
        self.lipschitz_one(mid)
    }

    pub fn cos(&self) -> Ball {
        let mid = Float::with_val_round(self.prec(), self.mid.cos_ref(), Round::Nearest);
        self.lipschitz_one(mid)
    }

    pub fn sinh(&self) -> Ball {
        let e = self.exp();
        let inv = self.neg().exp();
        e.sub(&inv).mul_2exp(-1)
    }

    pub fn cosh(&self) -> Ball {
        let e = self.exp();
        let inv = self.neg().exp();
        e.add(&inv).mul_2exp(-1)
    }

    /// x^y for positive x.
    pub fn pow(&self, y: &Ball) -> Option<Ball> {
        Some(self.ln()?.mul(y).exp())
    }

    /// Decimal rendering of the midpoint with enough digits to round-trip.
    pub fn mid_string(&self) -> String {
        self.mid.to_string_radix(10, None)
    }

    /// Short decimal rendering of an upper bound on the radius.
    pub fn rad_string(&self) -> String {
        if self.rad.is_zero() {
            return "0".to_string();
        }
        let bumped = up(&self.rad * 1.000_001f64);
        
        bumped.to_string_radix(10, Some(8))
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} +/- {}]", self.mid.to_string_radix(10, Some(20)), self.rad_string())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        write!(f, "{} +/- {}", self.mid.to_string_radix(10, Some(digits)), self.rad_string())
    }
}

impl Serialize for Ball {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Ball", 2)?;
        st.serialize_field("center", &self.mid_string())?;
        st.serialize_field("radius", &self.rad_string())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    #[test]
    fn exact_integer_arithmetic_is_exact() {
        let a = Ball::from_i64(3, P);
        let b = Ball::from_i64(4, P);
        let c = a.mul(&b).add(&Ball::from_i64(1, P));
        assert!(c.is_exact());
        assert_eq!(c.mid().to_f64(), 13.0);
    }

    #[test]
    fn third_times_three_encloses_one() {
        let third = Ball::one(P).div(&Ball::from_i64(3, P)).unwrap();
        let one = third.mul_i64(3);
        assert!(one.contains_f64(1.0));
        assert!(!one.is_exact());
        assert!(one.rad().to_f64() < 1e-35);
    }

    #[test]
    fn division_by_ball_straddling_zero_fails() {
        let z = Ball::with_rad(Float::with_val(P, 0.1), &Float::with_val(53, 0.2));
        assert!(Ball::one(P).div(&z).is_none());
        assert!(z.ln().is_none());
    }

    #[test]
    fn transcendental_identities() {
        let x = Ball::from_f64(0.7, P);
        let s = x.sin();
        let c = x.cos();
        let one = s.sqr().add(&c.sqr());
        assert!(one.contains_f64(1.0));
        let back = x.exp().ln().unwrap();
        assert!(back.contains(x.mid()));
        let two = Ball::from_i64(2, P).sqrt().unwrap().sqr();
        assert!(two.contains_f64(2.0));
        let ch = x.cosh().sqr().sub(&x.sinh().sqr());
        assert!(ch.contains_f64(1.0));
    }

    #[test]
    fn exp_m1_is_accurate_near_zero() {
        let x = Ball::from_f64(1e-30, P);
        let e = x.exp_m1();
        let diff = Float::with_val(P, e.mid() - x.mid());
        let rel = Float::with_val(P, &diff / x.mid());
        assert!(rel.to_f64().abs() < 1e-29);
        assert!(e.rad().to_f64() < 1e-60);
    }

    #[test]
    fn enclosure_of_interval_inputs() {
        // [0.9, 1.1]^2 must contain both 0.81 and 1.21
        let x = Ball::with_rad(Float::with_val(P, 1), &Float::with_val(53, 0.1));
        let y = x.sqr();
        assert!(y.contains_f64(0.81) && y.contains_f64(1.21));
        let e = x.exp();
        assert!(e.contains(&Float::with_val(P, 0.900_001f64).exp()));
        assert!(e.contains(&Float::with_val(P, 1.099_999f64).exp()));
    }

    #[test]
    fn intersection_and_union() {
        let a = Ball::with_rad(Float::with_val(P, 0), &Float::with_val(53, 1));
        let b = Ball::with_rad(Float::with_val(P, 1), &Float::with_val(53, 1));
        let i = a.intersect(&b).unwrap();
        assert!(i.contains_f64(0.0) && i.contains_f64(1.0));
        assert!(i.rad().to_f64() <= 0.5 + 1e-12);
        let far = Ball::from_i64(5, P);
        assert!(a.intersect(&far).is_none());
        assert!(a.union(&far).contains_f64(5.0));
    }

    #[test]
    fn sign_is_three_valued() {
        assert_eq!(Ball::from_i64(2, P).sign(), Some(Ordering::Greater));
        assert_eq!(Ball::zero(P).sign(), Some(Ordering::Equal));
        let fuzzy = Ball::with_rad(Float::with_val(P, 1e-10), &Float::with_val(53, 1e-9));
        assert_eq!(fuzzy.sign(), None);
    }
}

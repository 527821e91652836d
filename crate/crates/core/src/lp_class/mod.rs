//! Laguerre–Pólya class functions given by their zero data, and the
//! coefficient criteria characterizing the class.
//!
//! A function of the class is stored through its Hadamard factorization
//!
//! Ψ(s) = C s^m e^{-γs² + δs} Π (1 + δ_j s) e^{-δ_j s},
//!
//! with the reciprocal zeros δ_j, or through the one-sided form
//! C e^{δs} Π (1 + δ_j s) with δ_j ≥ 0. Infinite products are truncated and
//! the omitted part is controlled by a bound on Σ δ_j² (resp. Σ δ_j).

mod criteria;

use rug::float::Round;
use rug::Float;
use serde::Serialize;

use crate::ball::{Ball, RAD_PREC};
use crate::error::{Error, Result};
use crate::numerics::PrecisionConfig;
use crate::polyzero::Polynomial;
use crate::series::PowerSeries;

pub use criteria::{
    apply_series_operator, hankel_matrix, hankel_psd, jensen, multiplier_apply, pf_sequence_minors,
    series_reciprocal, turan_deltas, HankelReport, MinorRecord, PfSequenceReport,
};

/// Hadamard factorization data of an entire function of the class.
#[derive(Debug, Clone, Serialize)]
pub struct LPFactorization {
    pub c: Ball,
    pub m: u32,
    pub gamma: Ball,
    pub delta: Ball,
    /// Listed reciprocal zeros δ_j.
    pub zeros: Vec<Ball>,
    /// Upper bound on Σ δ_j² over the zeros not listed (may be +∞).
    #[serde(serialize_with = "ser_float")]
    pub tail_sq_bound: Float,
    /// Zeros per truncation index: 1, or 2 for symmetric pairs ±δ_j.
    pub group: usize,
}

fn ser_float<S: serde::Serializer>(x: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string_radix(10, Some(17)))
}

impl LPFactorization {
    pub fn new(
        c: Ball,
        m: u32,
        gamma: Ball,
        delta: Ball,
        zeros: Vec<Ball>,
        tail_sq_bound: Float,
    ) -> Result<Self> {
        LPFactorization { c, m, gamma, delta, zeros, tail_sq_bound, group: 1 }.validated()
    }

    /// Truncations take `group` zeros at a time.
    pub fn grouped(mut self, group: usize) -> Result<Self> {
        if group == 0 || !self.zeros.len().is_multiple_of(group) {
            return Err(Error::InvalidParameter("zero list is not a whole number of groups".into()));
        }
        self.group = group;
        Ok(self)
    }

    pub fn validated(self) -> Result<Self> {
        if !self.c.is_positive() {
            return Err(Error::InvalidParameter("C must be certified positive".into()));
        }
        if !self.gamma.is_nonnegative() {
            return Err(Error::InvalidParameter("gamma must be certified non-negative".into()));
        }
        if self.zeros.iter().any(Ball::contains_zero) {
            return Err(Error::InvalidParameter("reciprocal zeros must be certified nonzero".into()));
        }
        if self.tail_sq_bound.is_nan() || self.tail_sq_bound < 0 {
            return Err(Error::InvalidParameter("tail bound must be non-negative".into()));
        }
        // γ + Σ δ_j² + tail ∈ (0, ∞): excludes C e^{δs}.
        let listed = self.zeros.iter().fold(self.gamma.clone(), |acc, d| acc.add(&d.sqr()));
        let total_positive = listed.is_positive() || self.tail_sq_bound > 0;
        if !total_positive {
            return Err(Error::InvalidParameter(
                "gamma + sum of squared reciprocal zeros must be positive (pure exponential excluded)".into(),
            ));
        }
        Ok(self)
    }

    fn prec(&self) -> u32 {
        self.c.prec()
    }
}

/// One-sided factorization C e^{δs} Π (1 + δ_j s), δ_j ≥ 0.
#[derive(Debug, Clone, Serialize)]
pub struct OneSidedFactorization {
    pub c: Ball,
    pub delta: Ball,
    pub zeros: Vec<Ball>,
    /// Upper bound on Σ δ_j over the zeros not listed.
    #[serde(serialize_with = "ser_float")]
    pub tail_sum_bound: Float,
}

impl OneSidedFactorization {
    pub fn new(c: Ball, delta: Ball, zeros: Vec<Ball>, tail_sum_bound: Float) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidParameter("C must be certified positive".into()));
        }
        if zeros.iter().any(|z| !z.is_nonnegative()) {
            return Err(Error::InvalidParameter("one-sided zeros must be certified non-negative".into()));
        }
        if !tail_sum_bound.is_finite() || tail_sum_bound < 0 {
            return Err(Error::InvalidParameter("tail bound on the sum of zeros must be finite".into()));
        }
        Ok(OneSidedFactorization { c, delta, zeros, tail_sum_bound })
    }

    /// Ψ(s) for s ≥ 0, where every factor is at least one: the omitted
    /// product lies in [1, e^{s·tail}].
    pub fn eval(&self, s: &Ball) -> Result<Ball> {
        let mut acc = self.c.mul(&self.delta.mul(s).exp());
        for d in &self.zeros {
            acc = acc.mul(&Ball::one(s.prec()).add(&d.mul(s)));
        }
        if self.tail_sum_bound.is_zero() {
            return Ok(acc);
        }
        if !s.is_nonnegative() {
            return Err(Error::Domain("one-sided tail bound needs s >= 0".into()));
        }
        let t = Ball::exact(Float::with_val(s.prec(), &self.tail_sum_bound));
        let hi = s.mul(&t).exp().hi();
        let one = Float::with_val(s.prec(), 1);
        Ok(acc.mul(&Ball::from_endpoints(&one, &hi, s.prec())))
    }

    /// As a two-sided factorization: γ = 0, δ' = δ + Σ δ_j, and the omitted
    /// Σ δ_j² ≤ (Σ δ_j)².
    pub fn to_lp(&self) -> Result<LPFactorization> {
        let delta = self.zeros.iter().fold(self.delta.clone(), |acc, d| acc.add(d));
        let delta = delta.widen(&self.tail_sum_bound);
        let tail_sq = Float::with_val_round(RAD_PREC, self.tail_sum_bound.square_ref(), Round::Up).0;
        let zeros = self.zeros.iter().filter(|z| !z.is_exact_zero()).cloned().collect();
        LPFactorization::new(self.c.clone(), 0, Ball::zero(self.c.prec()), delta, zeros, tail_sq)
    }
}

/// Ψ(s) with the truncation error of the product in the radius. For the
/// omitted factors |ln((1+x)e^{-x})| ≤ x² when |x| ≤ ½, so they contribute a
/// factor in exp([-s²T, s²T]) provided |s|√T ≤ ½.
pub fn lp_eval(fac: &LPFactorization, s: &Ball, prec: &PrecisionConfig) -> Result<Ball> {
    let prec = prec.validated()?;
    if !fac.tail_sq_bound.is_finite() {
        return Err(Error::DivergentTail("tail bound on the squared reciprocal zeros is infinite".into()));
    }
    let bits = prec.work_bits().max(fac.prec());
    let s = s.set_prec(bits.max(s.prec()));
    let one = Ball::one(bits);
    let mut acc = fac.c.mul(&s.powi(fac.m));
    let exponent = fac.delta.mul(&s).sub(&fac.gamma.mul(&s.sqr()));
    let mut log_sum = exponent;
    for d in &fac.zeros {
        let x = d.mul(&s);
        acc = acc.mul(&one.add(&x));
        log_sum = log_sum.sub(&x);
    }
    acc = acc.mul(&log_sum.exp());
    if !fac.tail_sq_bound.is_zero() {
        let t = Ball::exact(Float::with_val(bits, &fac.tail_sq_bound));
        let s2t = s.sqr().mul(&t);
        // |s|√T ≤ ½  ⟺  s²T ≤ ¼
        if s2t.hi() > 0.25 {
            return Err(Error::PrecisionExhausted(format!(
                "tail bound too weak at s = {}: need |s|*sqrt(T) <= 1/2",
                s.mid_string()
            )));
        }
        let bound = s2t.hi();
        let factor = Ball::with_rad(Float::with_val(bits, 0), &bound).exp();
        acc = acc.mul(&factor);
    }
    Ok(acc)
}

/// C s^m Π_{j ≤ n·group} (1 + δ_j s): exponential factors dropped, so every
/// root is real by construction.
pub fn lp_truncate(fac: &LPFactorization, n: usize) -> Result<Polynomial<Ball>> {
    let take = n * fac.group;
    if take > fac.zeros.len() {
        return Err(Error::Length(format!("{take} zeros requested, {} listed", fac.zeros.len())));
    }
    let prec = fac.prec();
    let mut p = Polynomial::monomial(fac.c.clone(), fac.m as usize);
    for d in &fac.zeros[..take] {
        p = p.mul(&Polynomial::new(vec![Ball::one(prec), d.clone()]));
    }
    Ok(p)
}

/// First N+1 factorial-normalized Taylor coefficients of Ψ (requires m = 0).
///
/// ln Ψ = ln C + δs - γs² + Σ_j [ln(1+δ_j s) - δ_j s]; the bracket has
/// coefficients (-1)^{k+1} δ_j^k (k-1)! for k ≥ 2, and the omitted zeros move
/// each by at most (k-1)!·T^{k/2}.
pub fn lp_series(fac: &LPFactorization, n: usize, prec: &PrecisionConfig) -> Result<PowerSeries> {
    let prec = prec.validated()?;
    if fac.m > 0 {
        return Err(Error::ZeroAtOrigin(fac.m));
    }
    if !fac.tail_sq_bound.is_finite() {
        return Err(Error::DivergentTail("tail bound on the squared reciprocal zeros is infinite".into()));
    }
    let bits = prec.work_bits().max(fac.prec());
    let mut log = vec![Ball::zero(bits); n + 1];
    if n >= 1 {
        log[1] = fac.delta.clone();
    }
    if n >= 2 {
        // -γs² = -2γ · s²/2!
        log[2] = fac.gamma.mul_i64(-2);
    }
    let mut fact = Ball::one(bits); // (k-1)!
    for k in 2..=n {
        fact = fact.mul_i64(k as i64 - 1);
        let mut sum = Ball::zero(bits);
        for d in &fac.zeros {
            sum = sum.add(&d.powi(k as u32));
        }
        let mut term = sum.mul(&fact);
        if k % 2 == 0 {
            term = term.neg();
        }
        if !fac.tail_sq_bound.is_zero() {
            let t = Float::with_val_round(RAD_PREC, fac.tail_sq_bound.sqrt_ref(), Round::Up).0;
            let tk = Float::with_val_round(RAD_PREC, rug::ops::Pow::pow(&t, k as u32), Round::Up).0;
            let err = Float::with_val_round(RAD_PREC, &tk * &fact.hi(), Round::Up).0;
            term = term.widen(&err);
        }
        log[k] = log[k].add(&term);
    }
    let series = PowerSeries::exp_of(&PowerSeries::new(log))?;
    Ok(series.scale(&fac.c))
}

//! Real-zero counting and the variation-diminishing tests.
//!
//! Exact polynomials are counted with Sturm sequences after a square-free
//! decomposition, so the count is a certificate. Ball polynomials get a
//! certified count interval instead.

mod poly;
mod roots;

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Float, Rational};
use serde::Serialize;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::scalar::{factorial, Scalar};
use crate::verdict::Verdict;

pub use poly::Polynomial;
pub use roots::{
    cauchy_bound, count_in_closed, has_only_nonpositive_real_zeros, isolate_real_roots, real_root_count,
    RootCount, RootCounting, SturmChain,
};

/// Samples of a function on a strictly increasing grid.
#[derive(Debug, Clone)]
pub struct SignSampling {
    grid: Vec<Float>,
    values: Vec<Ball>,
}

impl SignSampling {
    pub fn new(grid: Vec<Float>, values: Vec<Ball>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Length("empty sampling grid".into()));
        }
        if grid.len() != values.len() {
            return Err(Error::Length(format!("{} grid points but {} values", grid.len(), values.len())));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("grid must be strictly increasing".into()));
        }
        Ok(SignSampling { grid, values })
    }

    /// Samples `f` at each grid point.
    pub fn from_fn(grid: Vec<Float>, f: impl Fn(&Float) -> Ball) -> Result<Self> {
        let values = grid.iter().map(&f).collect();
        SignSampling::new(grid, values)
    }

    pub fn grid(&self) -> &[Float] {
        &self.grid
    }

    pub fn values(&self) -> &[Ball] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignChanges {
    /// Certified sign flips between consecutive decided samples.
    pub count: usize,
    /// Set when some sample could not be given a sign and was skipped.
    pub skipped: bool,
}

/// Sign changes of the sampled values. This is relative to the grid and
/// therefore a lower bound for the supremum over all grids.
pub fn sign_changes(s: &SignSampling) -> SignChanges {
    let mut count = 0;
    let mut skipped = false;
    let mut last = None;
    for v in &s.values {
        match v.sign() {
            Some(Ordering::Equal) => {}
            Some(sg) => {
                if last.is_some_and(|l| l != sg) {
                    count += 1;
                }
                last = Some(sg);
            }
            None => skipped = true,
        }
    }
    SignChanges { count, skipped }
}

/// A polynomial in exact or ball arithmetic.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum AnyPolynomial {
    Exact(Polynomial<Rational>),
    Ball(Polynomial<Ball>),
}

impl AnyPolynomial {
    pub fn root_count(&self) -> RootCount {
        match self {
            AnyPolynomial::Exact(p) => real_root_count(p),
            AnyPolynomial::Ball(p) => real_root_count(p),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            AnyPolynomial::Exact(p) => p.degree(),
            AnyPolynomial::Ball(p) => p.degree(),
        }
    }

    pub fn to_ball(&self, prec: u32) -> Polynomial<Ball> {
        match self {
            AnyPolynomial::Exact(p) => p.to_ball(prec),
            AnyPolynomial::Ball(p) => p.clone(),
        }
    }
}

/// (Λ ∗ p)(x) = Σ_j (-1)^j μ_j p^{(j)}(x) / j!, generic over the field.
pub fn convolve_with<T: Scalar>(moments: &[T], p: &Polynomial<T>) -> Result<Polynomial<T>> {
    let Some(deg) = p.degree() else { return Ok(Polynomial::zero()) };
    if moments.len() <= deg {
        return Err(Error::InsufficientMoments { needed: deg + 1, have: moments.len() });
    }
    let mut q = Polynomial::zero();
    for (j, mu) in moments.iter().enumerate().take(deg + 1) {
        let f = mu.integer_like(&factorial(j as u32));
        let mut c = mu.div(&f).expect("factorial is nonzero");
        if j % 2 == 1 {
            c = c.neg();
        }
        q = q.add(&p.derivative_n(j).scale(&c));
    }
    Ok(q)
}

/// Convolution of Λ with p through its moments. Exact when both the moments
/// and p are exact.
pub fn convolve_moments(ms: &MomentSequence, p: &AnyPolynomial) -> Result<AnyPolynomial> {
    match (p, ms.exact()) {
        (AnyPolynomial::Exact(p), Some(mu)) => Ok(AnyPolynomial::Exact(convolve_with(mu, p)?)),
        _ => {
            let prec = ms.mu()[0].prec();
            Ok(AnyPolynomial::Ball(convolve_with(ms.mu(), &p.to_ball(prec))?))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroDecreasing {
    pub verdict: Verdict,
    pub n_p: RootCount,
    pub n_q: RootCount,
    pub q: AnyPolynomial,
}

/// Checks N(Λ ∗ p) ≤ N(p).
pub fn zero_decreasing_check(ms: &MomentSequence, p: &AnyPolynomial) -> Result<ZeroDecreasing> {
    let q = convolve_moments(ms, p)?;
    let n_p = p.root_count();
    let n_q = q.root_count();
    let verdict = if n_q.hi <= n_p.lo {
        Verdict::Holds
    } else if n_q.lo > n_p.hi {
        Verdict::Violated
    } else {
        Verdict::Undecided
    };
    Ok(ZeroDecreasing { verdict, n_p, n_q, q })
}

/// A seeded random polynomial of degree 1..=max_degree with integer data.
/// Even trials draw integer roots (so N(p) = deg p, the sharpest case for
/// zero-decreasing tests); odd trials draw coefficients in [-9, 9].
pub fn random_polynomial(max_degree: usize, seed: u64, trial: usize) -> Polynomial<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let deg = rng.gen_range(1..=max_degree.max(1));
    if trial.is_multiple_of(2) {
        let roots: Vec<Rational> = (0..deg).map(|_| Rational::from(rng.gen_range(-4i64..=4))).collect();
        Polynomial::from_roots(Rational::from(1), &roots)
    } else {
        let mut c: Vec<Rational> = (0..deg).map(|_| Rational::from(rng.gen_range(-9i64..=9))).collect();
        let lead = if rng.gen_bool(0.5) { 1 } else { -1 } * rng.gen_range(1i64..=9);
        c.push(Rational::from(lead));
        Polynomial::new(c)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VdCase {
    pub trial: usize,
    pub p: Polynomial<Rational>,
    pub n_p: RootCount,
    pub n_q: RootCount,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct VdReport {
    pub seed: u64,
    pub max_degree: usize,
    pub cases: Vec<VdCase>,
    pub violated: usize,
    pub undecided: usize,
    pub verdict: Verdict,
}

/// Zero-decreasing battery: N(Λ ∗ p) ≤ N(p) over `trials` seeded random
/// polynomials of degree at most `max_degree`.
pub fn vd_battery(ms: &MomentSequence, max_degree: usize, trials: usize, seed: u64) -> Result<VdReport> {
    if max_degree == 0 || ms.len() <= max_degree {
        return Err(Error::InsufficientMoments { needed: max_degree + 1, have: ms.len() });
    }
    let cases = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = random_polynomial(max_degree, seed, t);
            let r = zero_decreasing_check(ms, &AnyPolynomial::Exact(p.clone()))?;
            Ok(VdCase { trial: t, p, n_p: r.n_p, n_q: r.n_q, verdict: r.verdict })
        })
        .collect::<Result<Vec<_>>>()?;
    let violated = cases.iter().filter(|c| c.verdict == Verdict::Violated).count();
    let undecided = cases.iter().filter(|c| c.verdict == Verdict::Undecided).count();
    let verdict = if violated > 0 {
        Verdict::Violated
    } else if undecided > 0 {
        Verdict::Undecided
    } else {
        Verdict::Holds
    };
    Ok(VdReport { seed, max_degree, cases, violated, undecided, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(xs: &[f64]) -> Vec<Float> {
        xs.iter().map(|&x| Float::with_val(64, x)).collect()
    }

    #[test]
    fn sign_change_examples() {
        let g = grid(&[-0.5, 0.5]);
        let s = SignSampling::from_fn(g, |x| Ball::exact(x.clone())).unwrap();
        assert_eq!(sign_changes(&s).count, 1);
        let s = SignSampling::from_fn(grid(&[0.0, 1.0, 2.0]), |_| Ball::one(64)).unwrap();
        assert_eq!(sign_changes(&s).count, 0);
        let s = SignSampling::from_fn(grid(&[-1.0, 0.0, 1.0]), |x| {
            Ball::exact(x.clone()).sqr().sub(&Ball::from_f64(0.25, 64))
        })
        .unwrap();
        assert_eq!(sign_changes(&s), SignChanges { count: 2, skipped: false });
    }

    #[test]
    fn undecided_samples_are_skipped() {
        let wide = Ball::with_rad(Float::with_val(64, 0), &Float::with_val(53, 1));
        let s = SignSampling::new(grid(&[0.0, 1.0, 2.0]), vec![Ball::one(64), wide, Ball::from_i64(-1, 64)]).unwrap();
        assert_eq!(sign_changes(&s), SignChanges { count: 1, skipped: true });
    }

    #[test]
    fn grid_must_increase() {
        assert!(SignSampling::new(grid(&[1.0, 1.0]), vec![Ball::one(64), Ball::one(64)]).is_err());
    }

    #[test]
    fn vd_battery_one_sided() {
        let ms = crate::pff_catalog::CatalogEntry::OneSidedExp { delta: 1.0 }.moments_closed_form(8, 128).unwrap();
        let r = vd_battery(&ms, 6, 40, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.cases.len(), 40);
        assert_eq!(random_polynomial(6, 3, 5), random_polynomial(6, 3, 5));
    }
}

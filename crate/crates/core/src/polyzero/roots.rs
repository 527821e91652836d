use std::cmp::Ordering;

use rug::Rational;
use serde::Serialize;

use super::poly::Polynomial;
use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Number of real zeros counted with multiplicity, as a certified interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootCount {
    pub lo: usize,
    pub hi: usize,
}

impl RootCount {
    pub fn exact(n: usize) -> Self {
        RootCount { lo: n, hi: n }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// The count, or an undecidability error when the interval is wide.
    pub fn value(&self) -> Result<usize> {
        if self.is_exact() {
            Ok(self.lo)
        } else {
            Err(Error::Undecidable)
        }
    }
}

/// Coefficient fields whose polynomials can have their real zeros counted.
pub trait RootCounting: Scalar {
    fn count_real_roots(p: &Polynomial<Self>) -> RootCount;
}

/// N(p): number of real zeros with multiplicity. Exact for rational
/// coefficients, a certified interval for ball coefficients. The zero
/// polynomial is reported as having no zeros.
pub fn real_root_count<T: RootCounting>(p: &Polynomial<T>) -> RootCount {
    T::count_real_roots(p)
}

impl RootCounting for Rational {
    fn count_real_roots(p: &Polynomial<Rational>) -> RootCount {
        let n = p
            .square_free_decomposition()
            .iter()
            .map(|(mult, f)| mult * SturmChain::new(f).distinct_real_roots())
            .sum();
        RootCount::exact(n)
    }
}

/// Sturm sequence over the rationals, each member rescaled to a primitive
/// integer polynomial by a positive factor.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<Polynomial<Rational>>,
}

impl SturmChain {
    pub fn new(p: &Polynomial<Rational>) -> Self {
        let mut chain = vec![p.primitive()];
        let d = p.derivative().primitive();
        if !d.is_zero() {
            chain.push(d);
        }
        while chain.len() >= 2 {
            let n = chain.len();
            let r = chain[n - 2].div_rem(&chain[n - 1]).1;
            if r.is_zero() {
                break;
            }
            chain.push(r.neg().primitive());
        }
        SturmChain { chain }
    }

    fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
        let mut last = None;
        let mut count = 0;
        for s in signs.filter(|&s| s != Ordering::Equal) {
            if last.is_some_and(|l| l != s) {
                count += 1;
            }
            last = Some(s);
        }
        count
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.chain.iter().map(|p| {
            let lead = p.leading().map_or(Ordering::Equal, |c| c.cmp0());
            let odd = p.degree().unwrap_or(0) % 2 == 1;
            if positive || !odd {
                lead
            } else {
                lead.reverse()
            }
        }))
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| p.eval(x).cmp0()))
    }

    /// Distinct real zeros on the whole line.
    pub fn distinct_real_roots(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }

    /// Distinct zeros in the half-open interval (a, b].
    pub fn roots_in(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }
}

/// Cauchy bound: every real zero lies in (-B, B).
pub fn cauchy_bound(p: &Polynomial<Rational>) -> Rational {
    let lead = p.leading().expect("nonzero polynomial").clone().abs();
    let mut m = Rational::new();
    for c in &p.coeffs()[..p.coeffs().len() - 1] {
        let r = Rational::from(c.abs_ref()) / &lead;
        if r > m {
            m = r;
        }
    }
    m + 1
}

/// Disjoint rational intervals (a, b], each holding exactly one distinct real
/// zero of p, sorted increasingly. Intervals are bisected until their width
/// is at most `width` (when given).
pub fn isolate_real_roots(p: &Polynomial<Rational>, width: Option<&Rational>) -> Vec<(Rational, Rational)> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = p.div_rem(&p.gcd(&p.derivative())).0;
    let sturm = SturmChain::new(&sf);
    let b = cauchy_bound(&sf);
    let mut stack = vec![(Rational::from(-&b), b)];
    let mut out = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm.roots_in(&lo, &hi);
        let wide = width.is_some_and(|w| Rational::from(&hi - &lo) > *w);
        if n == 0 {
            continue;
        }
        if n == 1 && !wide {
            out.push((lo, hi));
            continue;
        }
        let mid: Rational = Rational::from(&lo + &hi) / 2u32;
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Exact rational enclosure of a ball: the centre.
fn center(b: &Ball) -> Rational {
    b.mid().to_rational().expect("finite ball")
}

impl RootCounting for Ball {
    /// The lower end comes from certified sign changes at points separating
    /// the roots of the centre polynomial; the upper end from the degree, or
    /// from a Sturm chain in ball arithmetic when every step is certified.
    fn count_real_roots(p: &Polynomial<Ball>) -> RootCount {
        if let Some(exact) = p.to_exact() {
            return real_root_count(&exact);
        }
        let Some(deg) = p.degree() else { return RootCount::exact(0) };
        if deg == 0 {
            return RootCount { lo: 0, hi: 0 };
        }
        if let Some(n) = ball_sturm_count(p) {
            return RootCount::exact(n);
        }
        let lo = sign_change_lower_bound(p);
        if p.leading_certified() && lo + 1 >= deg {
            // Non-real zeros come in conjugate pairs.
            return RootCount::exact(deg);
        }
        RootCount { lo, hi: deg }
    }
}

/// Sturm count in ball arithmetic. Succeeds only when every leading
/// coefficient in the chain is certified nonzero and the chain ends in a
/// certified nonzero constant; then each polynomial in the ball is
/// square-free with the same number of real zeros.
fn ball_sturm_count(p: &Polynomial<Ball>) -> Option<usize> {
    if !p.leading_certified() {
        return None;
    }
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        let last = &chain[n - 1];
        if !last.leading_certified() {
            return None;
        }
        if last.degree() == Some(0) {
            break;
        }
        let r = ball_remainder(&chain[n - 2], last)?;
        // The remainder must have full degree; a missing degree means a
        // leading coefficient that only happens to cancel.
        if r.degree() != Some(last.degree()? - 1) {
            return None;
        }
        chain.push(r.neg());
    }
    let sign_at = |q: &Polynomial<Ball>, positive: bool| {
        let s = q.leading().unwrap().sign().unwrap();
        if positive || q.degree().unwrap().is_multiple_of(2) {
            s
        } else {
            s.reverse()
        }
    };
    let v = |positive: bool| SturmChain::variations(chain.iter().map(|q| sign_at(q, positive)));
    Some(v(false) - v(true))
}

/// Remainder of a by b where the top coefficients are eliminated by
/// construction rather than computed.
fn ball_remainder(a: &Polynomial<Ball>, b: &Polynomial<Ball>) -> Option<Polynomial<Ball>> {
    let db = b.degree()?;
    let lead = b.leading()?.clone();
    let mut rem: Vec<Ball> = a.coeffs().to_vec();
    while rem.len() > db {
        let k = rem.len() - 1 - db;
        let c = rem.last()?.div(&lead)?;
        for (i, bi) in b.coeffs().iter().enumerate().take(db) {
            rem[k + i] = rem[k + i].sub(&c.mul(bi));
        }
        rem.pop();
    }
    Some(Polynomial::new(rem))
}

fn sign_change_lower_bound(p: &Polynomial<Ball>) -> usize {
    let prec = p.leading().unwrap().prec();
    let centre = Polynomial::new(p.coeffs().iter().map(center).collect());
    if centre.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let roots = isolate_real_roots(&centre, None);
    let b = cauchy_bound(&centre) * 2;
    let mut points = vec![Rational::from(-&b)];
    for (lo, hi) in &roots {
        points.push(lo.clone());
        points.push(hi.clone());
    }
    points.push(b);
    points.dedup();
    let signs = points
        .iter()
        .map(|x| p.eval(&Ball::from_rational(x, prec)).sign())
        .filter_map(|s| s.filter(|&s| s != Ordering::Equal));
    SturmChain::variations(signs)
}

/// Distinct real zeros of p in the closed interval [a, b].
pub fn count_in_closed(p: &Polynomial<Rational>, a: &Rational, b: &Rational) -> usize {
    let sturm = SturmChain::new(&p.div_rem(&p.gcd(&p.derivative())).0);
    let at_a = usize::from(p.eval(a).cmp0() == Ordering::Equal);
    sturm.roots_in(a, b) + at_a
}

/// Whether all zeros of the exact polynomial p are real and non-positive.
pub fn has_only_nonpositive_real_zeros(p: &Polynomial<Rational>) -> bool {
    let Some(deg) = p.degree() else { return false };
    let n = real_root_count(p).lo;
    if n != deg {
        return false;
    }
    let positive: usize = p
        .square_free_decomposition()
        .iter()
        .map(|(_, f)| {
            let s = SturmChain::new(f);
            s.roots_in(&Rational::new(), &cauchy_bound(f))
        })
        .sum();
    positive == 0
}

#[cfg(test)]
fn int_poly(coeffs: &[i64]) -> Polynomial<Rational> {
    Polynomial::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_counts() {
        assert_eq!(real_root_count(&int_poly(&[1, 0, 1])), RootCount::exact(0));
        // x (x-1)^2
        assert_eq!(real_root_count(&int_poly(&[0, 1, -2, 1])), RootCount::exact(3));
        assert_eq!(real_root_count(&int_poly(&[-2, 0, 1])), RootCount::exact(2));
        assert_eq!(real_root_count(&int_poly(&[5])), RootCount::exact(0));
    }

    #[test]
    fn isolation_separates() {
        // (x-1)(x-2)(x+3)
        let p = int_poly(&[6, -7, 0, 1]);
        let iv = isolate_real_roots(&p, Some(&Rational::from((1, 100))));
        assert_eq!(iv.len(), 3);
        for ((lo, hi), r) in iv.iter().zip([-3, 1, 2]) {
            assert!(*lo < r && Rational::from(r) <= *hi);
        }
    }

    #[test]
    fn ball_counts() {
        let p = int_poly(&[6, -7, 0, 1]).to_ball(128);
        assert_eq!(real_root_count(&p), RootCount::exact(3));
        let q = int_poly(&[1, 0, 1]).to_ball(128);
        assert_eq!(real_root_count(&q), RootCount::exact(0));
        // A double root cannot be certified in ball arithmetic.
        let d = int_poly(&[1, -2, 1]).to_ball(128).mul(&Polynomial::constant(Ball::with_rad(
            rug::Float::with_val(128, 1),
            &rug::Float::with_val(53, 1e-30),
        )));
        let c = real_root_count(&d);
        assert!(c.lo <= 2 && c.hi == 2);
    }

    #[test]
    fn nonpositive_zero_check() {
        assert!(has_only_nonpositive_real_zeros(&int_poly(&[0, 1, 1])));
        assert!(!has_only_nonpositive_real_zeros(&int_poly(&[-1, 1])));
        assert!(!has_only_nonpositive_real_zeros(&int_poly(&[1, 0, 1])));
        assert!(has_only_nonpositive_real_zeros(&int_poly(&[0, 0, 1])));
    }
}

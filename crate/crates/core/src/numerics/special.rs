use std::cmp::Ordering;
use std::sync::{Mutex, OnceLock};

use rug::float::Round;
use rug::{Float, Integer, Rational};

use super::PrecisionConfig;
use crate::ball::{Ball, RAD_PREC};
use crate::error::{Error, Result};

/// Exact sum of two floats, widening the precision as needed.
pub(crate) fn exact_add(a: &Float, b: &Float) -> Float {
    let ea = a.get_exp().unwrap_or(0);
    let eb = b.get_exp().unwrap_or(0);
    let mut prec = a.prec().max(b.prec()) + (ea - eb).unsigned_abs() + 2;
    loop {
        let (s, o) = Float::with_val_round(prec, a + b, Round::Nearest);
        if o == Ordering::Equal {
            return s;
        }
        prec *= 2;
    }
}

pub(crate) fn exact_sub(a: &Float, b: &Float) -> Float {
    exact_add(a, &Float::with_val(b.prec(), -b))
}

/// Bernoulli number B_n (with B_1 = -1/2).
pub fn bernoulli(n: usize) -> Rational {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![Rational::from(1)]));
    let mut table = cache.lock().expect("bernoulli cache poisoned");
    while table.len() <= n {
        let m = table.len() as u32;
        if m > 1 && m % 2 == 1 {
            table.push(Rational::new());
            continue;
        }
        // B_m = -1/(m+1) * sum_{k<m} C(m+1, k) B_k
        let mut acc = Rational::new();
        for (k, b) in table.iter().enumerate() {
            if b.cmp0() == Ordering::Equal {
                continue;
            }
            let c = Integer::from(Integer::binomial_u(m + 1, k as u32));
            acc += Rational::from(b * &c);
        }
        acc /= -(i64::from(m) + 1);
        table.push(acc);
    }
    table[n].clone()
}

fn check_result(b: Ball, prec: &PrecisionConfig, what: &str) -> Result<Ball> {
    if !b.is_finite() {
        return Err(Error::PrecisionExhausted(format!("{what}: non-finite enclosure")));
    }
    let bound = Float::with_val(RAD_PREC, &b.mag() * &prec.rel_tolerance(5));
    if !b.is_exact_zero() && *b.rad() > bound {
        return Err(Error::PrecisionExhausted(format!(
            "{what}: radius {} exceeds 1e-{} relative",
            b.rad_string(),
            prec.digits - 5
        )));
    }
    Ok(b)
}

/// ln Γ(x) for x > 0 via the Stirling series with argument shift; the
/// remainder is bounded by the first omitted term.
pub fn lngamma_positive(x: &Float, prec: &PrecisionConfig) -> Result<Ball> {
    if *x <= 0 {
        return Err(Error::Domain("lngamma_positive requires x > 0".into()));
    }
    let work = prec.work_bits();
    let threshold = 0.16 * f64::from(work) + 8.0;
    let xf = x.to_f64();
    let shift = if xf >= threshold { 0 } else { (threshold - xf).ceil() as u64 };
    let y = exact_add(x, &Float::with_val(64, shift));
    let yb = Ball::exact(Float::with_val(work.max(y.prec()), &y));

    let ln_y = yb.ln().expect("y > 0");
    let half = Ball::exact(Float::with_val(work, 0.5));
    let two_pi = Ball::pi(work).mul_2exp(1);
    let mut s = yb.sub(&half).mul(&ln_y).sub(&yb).add(&two_pi.ln().unwrap().mul_2exp(-1));

    let y_inv = yb.recip().expect("y > 0");
    let y_inv2 = y_inv.sqr();
    let mut ypow = y_inv.clone();
    let target = Float::with_val(RAD_PREC, Float::with_val(RAD_PREC, 1) >> (work as i32 + 4));
    let mut remainder = None;
    let max_k = prec.max_terms.min(4 * work as usize);
    for k in 1..=max_k {
        let b2k = bernoulli(2 * k);
        let denom = Integer::from((2 * k) as u64 * (2 * k - 1) as u64);
        let coef = Ball::from_rational(&Rational::from(&b2k / &denom), work);
        let term = coef.mul(&ypow);
        if term.mag() < target {
            remainder = Some(term.mag());
            break;
        }
        s = s.add(&term);
        ypow = ypow.mul(&y_inv2);
    }
    let rem = remainder
        .ok_or_else(|| Error::PrecisionExhausted("Stirling series did not converge".into()))?;
    let mut result = s.widen(&rem);

    if shift > 0 {
        // ln Γ(x) = ln Γ(x + shift) - ln(x (x+1) ... (x+shift-1))
        let mut prod = Ball::exact(Float::with_val(work.max(x.prec()), x));
        for j in 1..shift {
            let xj = exact_add(x, &Float::with_val(64, j));
            prod = prod.mul(&Ball::exact(xj));
        }
        result = result.sub(&prod.ln().expect("positive product"));
    }
    Ok(result)
}

fn gamma_positive(x: &Float, prec: &PrecisionConfig) -> Result<Ball> {
    Ok(lngamma_positive(x, prec)?.exp())
}

/// Γ(σ) for real σ away from the poles {0, -1, -2, ...}.
pub fn gamma_real(sigma: &Float, prec: &PrecisionConfig) -> Result<Ball> {
    let prec = prec.validated()?;
    let work = prec.work_bits();
    if !sigma.is_finite() {
        return Err(Error::Domain("non-finite argument".into()));
    }
    if *sigma <= 0 {
        let nearest = Float::with_val(sigma.prec(), sigma.round_ref());
        let dist = Float::with_val(sigma.prec(), sigma - &nearest).abs();
        if dist < prec.rel_tolerance(0) {
            return Err(Error::PoleProximity {
                function: "gamma",
                arg: sigma.to_string_radix(10, Some(20)),
            });
        }
    }
    let result = if *sigma < 0.5 {
        // Γ(x) = π / (sin(πx) Γ(1-x))
        let one_minus = exact_sub(&Float::with_val(64, 1), sigma);
        let g = gamma_positive(&one_minus, &prec)?;
        let pi = Ball::pi(work);
        let s = pi.mul(&Ball::exact(Float::with_val(work.max(sigma.prec()), sigma))).sin();
        let den = s.mul(&g);
        pi.div(&den).ok_or_else(|| Error::PrecisionExhausted("gamma reflection".into()))?
    } else {
        gamma_positive(sigma, &prec)?
    };
    check_result(result, &prec, "gamma")
}

/// Dirichlet eta function for real s > 0 by the Borwein alternating-series
/// acceleration; truncation error at most 3 (3 + √8)^(-n).
pub fn eta_real(s: &Float, prec: &PrecisionConfig) -> Result<Ball> {
    if *s <= 0 {
        return Err(Error::Domain("eta_real requires s > 0".into()));
    }
    let work = prec.work_bits();
    let n = ((f64::from(work) * std::f64::consts::LN_2) / (3.0 + 8f64.sqrt()).ln()).ceil() as usize + 4;
    if n > prec.max_terms {
        return Err(Error::PrecisionExhausted("eta: max_terms too small".into()));
    }
    // d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let nn = n as u32;
    let mut d = Vec::with_capacity(n + 1);
    let mut acc = Rational::new();
    for i in 0..=nn {
        let num = Integer::from(Integer::factorial(nn + i - 1)) * Integer::from(Integer::u_pow_u(4, i));
        let den = Integer::from(Integer::factorial(nn - i)) * Integer::from(Integer::factorial(2 * i));
        acc += Rational::from((num, den));
        d.push(Rational::from(&acc * nn));
    }
    let dn = d[n].clone();
    let sb = Ball::exact(Float::with_val(work.max(s.prec()), s));
    let mut sum = Ball::zero(work);
    for k in 0..n {
        let coef = Rational::from(&d[k] - &dn);
        let coef = if k % 2 == 0 { coef } else { -coef };
        let base = Ball::from_i64(k as i64 + 1, work);
        let p = base.ln().expect("k+1 > 0").mul(&sb).neg().exp();
        sum = sum.add(&Ball::from_rational(&coef, work).mul(&p));
    }
    let eta = sum.neg().div(&Ball::from_rational(&dn, work)).expect("d_n > 0");
    let err_log10 = (3f64).log10() - n as f64 * (3.0 + 8f64.sqrt()).log10();
    let err = Float::with_val(RAD_PREC, 10f64).pow_round(err_log10 + 1e-9, Round::Up);
    Ok(eta.widen(&err))
}

trait PowRoundF64 {
    fn pow_round(self, e: f64, round: Round) -> Float;
}

impl PowRoundF64 for Float {
    fn pow_round(self, e: f64, round: Round) -> Float {
        let e = Float::with_val(RAD_PREC, e);
        Float::with_val_round(RAD_PREC, rug::ops::Pow::pow(&self, &e), round).0
    }
}

/// ζ(s) for s ≥ 2 by Euler–Maclaurin summation.
fn zeta_em(s: &Float, prec: &PrecisionConfig) -> Result<Ball> {
    let work = prec.work_bits();
    let sf = s.to_f64();
    if sf > f64::from(work) {
        // 1 + 2^{-s}, the rest Σ_{k≥3} k^{-s} ≤ 3^{-s}(1 + 3/(s-1)) ≤ 2·3^{-s}
        let sb = Ball::exact(Float::with_val(work.max(s.prec()), s));
        let pow = |k: i64| Ball::from_i64(k, work).ln().unwrap().mul(&sb).neg().exp();
        let rest = Float::with_val(RAD_PREC, pow(3).mag() * 2u32);
        return Ok(Ball::one(work).add(&pow(2)).widen(&rest));
    }
    let n_head =(0.12 * f64::from(work) + sf / 5.0).ceil() as i64 + 10;
    if n_head as usize > prec.max_terms {
        return Err(Error::PrecisionExhausted("zeta: max_terms too small".into()));
    }
    let sb = Ball::exact(Float::with_val(work.max(s.prec()), s));
    let mut sum = Ball::zero(work);
    for k in (1..n_head).rev() {
        let p = Ball::from_i64(k, work).ln().unwrap().mul(&sb).neg().exp();
        sum = sum.add(&p);
    }
    let nb = Ball::from_i64(n_head, work);
    let ln_n = nb.ln().unwrap();
    let n_pow_neg_s = ln_n.mul(&sb).neg().exp();
    let one = Ball::one(work);
    // N^(1-s)/(s-1) + N^(-s)/2
    sum = sum.add(&n_pow_neg_s.mul(&nb).div(&sb.sub(&one)).expect("s > 1"));
    sum = sum.add(&n_pow_neg_s.mul_2exp(-1));

    let n_inv2 = nb.recip().unwrap().sqr();
    // running = s(s+1)...(s+2j-2) N^(-s-2j+1)
    let mut running = sb.mul(&n_pow_neg_s).div(&nb).unwrap();
    let target = Float::with_val(RAD_PREC, Float::with_val(RAD_PREC, 1) >> (work as i32 + 4));
    let mut remainder = None;
    for j in 1..prec.max_terms {
        let b = bernoulli(2 * j);
        let fact = Integer::from(Integer::factorial(2 * j as u32));
        let coef = Ball::from_rational(&Rational::from(&b / &fact), work);
        let term = coef.mul(&running);
        if term.mag() < target {
            remainder = Some(term.mag());
            break;
        }
        sum = sum.add(&term);
        let a = sb.add(&Ball::from_i64(2 * j as i64 - 1, work));
        let b2 = sb.add(&Ball::from_i64(2 * j as i64, work));
        running = running.mul(&a).mul(&b2).mul(&n_inv2);
    }
    let rem = remainder
        .ok_or_else(|| Error::PrecisionExhausted("Euler-Maclaurin tail did not converge".into()))?;
    Ok(sum.widen(&Float::with_val(RAD_PREC, &rem * 2u32)))
}

/// 1 - 2^(1-s), computed without cancellation.
fn eta_factor(s: &Float, work: u32) -> Ball {
    let one_minus_s = exact_sub(&Float::with_val(64, 1), s);
    let x = Ball::exact(Float::with_val(work.max(one_minus_s.prec()), &one_minus_s)).mul(&Ball::ln2(work));
    x.exp_m1().neg()
}

/// ζ(σ) for real σ ≠ 1.
pub fn zeta_real(sigma: &Float, prec: &PrecisionConfig) -> Result<Ball> {
    let prec = prec.validated()?;
    let work = prec.work_bits();
    if !sigma.is_finite() {
        return Err(Error::Domain("non-finite argument".into()));
    }
    let dist = exact_sub(sigma, &Float::with_val(64, 1)).abs();
    if dist < prec.rel_tolerance(0) {
        return Err(Error::PoleProximity { function: "zeta", arg: sigma.to_string_radix(10, Some(20)) });
    }
    if sigma.is_zero() {
        return Ok(Ball::exact(Float::with_val(work, -0.5)));
    }
    let result = if *sigma < 0 {
        // ζ(s) = 2^s π^(s-1) sin(πs/2) Γ(1-s) ζ(1-s)
        let one_minus = exact_sub(&Float::with_val(64, 1), sigma);
        let sb = Ball::exact(Float::with_val(work.max(sigma.prec()), sigma));
        let pi = Ball::pi(work);
        let two_s = sb.mul(&Ball::ln2(work)).exp();
        let pi_pow = sb.sub(&Ball::one(work)).mul(&pi.ln().unwrap()).exp();
        let sine = pi.mul(&sb).mul_2exp(-1).sin();
        let g = gamma_real(&one_minus, &prec)?;
        let z = zeta_real(&one_minus, &prec)?;
        two_s.mul(&pi_pow).mul(&sine).mul(&g).mul(&z)
    } else if *sigma < 2 {
        let eta = eta_real(sigma, &prec)?;
        eta.div(&eta_factor(sigma, work))
            .ok_or_else(|| Error::PrecisionExhausted("zeta near the pole".into()))?
    } else {
        zeta_em(sigma, &prec)?
    };
    check_result(result, &prec, "zeta")
}

/// (σ - 1) ζ(σ) for σ ≥ 1/2, finite through the pole.
fn zeta_times_sigma_minus_one(sigma: &Float, prec: &PrecisionConfig) -> Result<Ball> {
    let work = prec.work_bits();
    if *sigma == 1 {
        return Ok(Ball::one(work));
    }
    let u = exact_sub(sigma, &Float::with_val(64, 1));
    let ub = Ball::exact(Float::with_val(work.max(u.prec()), &u));
    if *sigma < 2 {
        // (σ-1)ζ(σ) = η(σ) (σ-1) / (1 - 2^(1-σ))
        let eta = eta_real(sigma, prec)?;
        let q = eta_factor(sigma, work)
            .div(&ub)
            .ok_or_else(|| Error::PrecisionExhausted("eta factor".into()))?;
        eta.div(&q).ok_or_else(|| Error::PrecisionExhausted("eta factor".into()))
    } else {
        Ok(zeta_em(sigma, prec)?.mul(&ub))
    }
}

/// Riemann ξ(σ) = ½σ(σ-1)π^(-σ/2)Γ(σ/2)ζ(σ) on the real line, evaluated as
/// Γ(σ/2+1) π^(-σ/2) (σ-1)ζ(σ) with the reflection ξ(σ) = ξ(1-σ) for σ < ½.
pub fn xi_real(sigma: &Float, prec: &PrecisionConfig) -> Result<Ball> {
    let prec = prec.validated()?;
    if !sigma.is_finite() {
        return Err(Error::Domain("non-finite argument".into()));
    }
    let sigma = if *sigma < 0.5 { exact_sub(&Float::with_val(64, 1), sigma) } else { sigma.clone() };
    let work = prec.work_bits();
    let half_sigma = Float::with_val(sigma.prec(), &sigma / 2u32);
    let g = gamma_positive(&exact_add(&half_sigma, &Float::with_val(64, 1)), &prec)?;
    let pi_pow = Ball::pi(work)
        .ln()
        .unwrap()
        .mul(&Ball::exact(Float::with_val(work.max(half_sigma.prec()), &half_sigma)))
        .neg()
        .exp();
    let z = zeta_times_sigma_minus_one(&sigma, &prec)?;
    check_result(g.mul(&pi_pow).mul(&z), &prec, "xi")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::real;

    fn p(d: u32) -> PrecisionConfig {
        PrecisionConfig::new(d).unwrap()
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), Rational::from(1));
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(3), Rational::new());
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
    }

    #[test]
    fn gamma_small_table() {
        let pr = p(40);
        let g1 = gamma_real(&real(1.0), &pr).unwrap();
        assert!(g1.contains_f64(1.0));
        let g5 = gamma_real(&real(5.0), &pr).unwrap();
        assert!(g5.contains_f64(24.0));
        let gh = gamma_real(&real(0.5), &pr).unwrap();
        let sqrt_pi = Ball::pi(200).sqrt().unwrap();
        assert!(gh.overlaps(&sqrt_pi));
        assert!(gh.rad().to_f64() < 1e-38);
        // Γ(-1/2) = -2√π
        let gm = gamma_real(&real(-0.5), &pr).unwrap();
        assert!(gm.overlaps(&sqrt_pi.mul_i64(-2)));
    }

    #[test]
    fn gamma_poles_rejected() {
        let pr = p(30);
        for x in [0.0, -1.0, -7.0] {
            assert!(matches!(gamma_real(&real(x), &pr), Err(Error::PoleProximity { .. })));
        }
    }

    #[test]
    fn zeta_classical_values() {
        let pr = p(40);
        let z2 = zeta_real(&real(2.0), &pr).unwrap();
        let pi2_6 = Ball::pi(200).sqr().div_i64(6);
        assert!(z2.overlaps(&pi2_6));
        assert!(z2.rad().to_f64() < 1e-38);
        assert!(zeta_real(&real(0.0), &pr).unwrap().contains_f64(-0.5));
        // ζ(-1) = -1/12
        let zm1 = zeta_real(&real(-1.0), &pr).unwrap();
        assert!(zm1.overlaps(&Ball::from_i64(-1, 200).div_i64(12)));
        // ζ(1/2) = -1.4603545088095868128894991525152980125...
        let zh = zeta_real(&real(0.5), &pr).unwrap();
        let reference = Ball::parse("-1.4603545088095868128894991525152980125", 200).unwrap();
        assert!(zh.sub(&reference).mag().to_f64() < 1e-36);
        assert!(matches!(zeta_real(&real(1.0), &pr), Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn zeta_across_method_boundary() {
        // eta route just below 2 and Euler-Maclaurin at 2 must be continuous
        let pr = p(30);
        let x = Float::with_val(200, Float::with_val(200, 2) - Float::with_val(200, 1e-25));
        let below = zeta_real(&x, &pr).unwrap();
        let at = zeta_real(&real(2.0), &pr).unwrap();
        assert!(below.sub(&at).mag().to_f64() < 1e-23);
    }

    #[test]
    fn xi_special_values() {
        let pr = p(40);
        assert!(xi_real(&real(0.0), &pr).unwrap().contains_f64(0.5));
        assert!(xi_real(&real(1.0), &pr).unwrap().contains_f64(0.5));
        let x2 = xi_real(&real(2.0), &pr).unwrap();
        assert!(x2.overlaps(&Ball::pi(200).div_i64(6)));
        let a = xi_real(&real(3.0), &pr).unwrap();
        let b = xi_real(&real(-2.0), &pr).unwrap();
        assert!(a.overlaps(&b));
    }

    #[test]
    fn xi_direct_formula_agrees_with_reflection() {
        // ξ(-2.5) from Γ and ζ at negative arguments against ξ(3.5)
        let pr = p(35);
        let s = real(-2.5);
        let g = gamma_real(&real(-1.25), &pr).unwrap();
        let z = zeta_real(&s, &pr).unwrap();
        let sb = Ball::from_f64(-2.5, 200);
        let pi_pow = Ball::pi(200).ln().unwrap().mul(&sb).mul_2exp(-1).neg().exp();
        let direct = sb.mul(&sb.sub(&Ball::one(200))).mul_2exp(-1).mul(&pi_pow).mul(&g).mul(&z);
        let reflected = xi_real(&real(3.5), &pr).unwrap();
        assert!(direct.overlaps(&reflected));
        assert!(direct.sub(&reflected).mag().to_f64() < 1e-30);
    }
}

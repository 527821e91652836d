//! The Jacobi theta entry Λ(x) = Σ_{j∈ℤ} (−1)^j e^{−j²x} for x > 0.

use rug::Float;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::numerics::PrecisionConfig;

/// Default smallest argument accepted by [`theta_eval`].
pub const THETA_X_MIN: f64 = 1e-3;

/// Below this the dual series is used by the catalog evaluator.
const DUAL_SWITCH: f64 = 1.0;

/// Below this the dual series underflows MPFR's exponent range; the value is
/// enclosed by [0, Λ(FLOOR)] using monotonicity.
const FLOOR: f64 = 1e-6;

/// Λ(x) by the alternating series 1 + 2 Σ_{j≥1} (−1)^j e^{−j²x}. The terms
/// decrease, so the first omitted term bounds the truncation error. Near 0
/// the sum cancels catastrophically (Λ(x) ~ 2√(π/x) e^{−π²/(4x)}); guard bits
/// cover the cancellation and arguments below `x_min` are refused.
pub fn theta_eval(x: &Float, prec: &PrecisionConfig, x_min: f64) -> Result<Ball> {
    let bits = prec.validated()?.work_bits();
    if *x <= 0 {
        return Ok(Ball::zero(bits));
    }
    if *x < x_min {
        return Err(Error::PrecisionExhausted(format!(
            "theta series at x = {} below x_min = {x_min}",
            x.to_string_radix(10, Some(10))
        )));
    }
    let xf = x.to_f64();
    let guard = (std::f64::consts::PI.powi(2) / (4.0 * xf) / std::f64::consts::LN_2).ceil() as u32 + 32;
    let w = bits + guard;
    let xb = Ball::exact(Float::with_val(w.max(x.prec()), x));
    let mut sum = Ball::one(w);
    let mut j: i64 = 1;
    let eps = Float::with_val(64, Float::i_exp(1, -(w as i32)));
    loop {
        let term = xb.mul_i64(-(j * j)).exp().mul_2exp(1);
        if term.hi() < eps {
            // first omitted term
            sum = sum.widen(&term.hi());
            break;
        }
        sum = if j % 2 == 1 { sum.sub(&term) } else { sum.add(&term) };
        j += 1;
        if j as usize > prec.max_terms {
            return Err(Error::PrecisionExhausted("theta series term cap".into()));
        }
    }
    Ok(sum.set_prec(bits))
}

/// Λ(x) = 2√(π/x) Σ_{k≥0} e^{−π²(k+½)²/x} (Jacobi's transformation), for
/// small positive x. All terms are positive; successive ratios are below
/// e^{−2π²/x} ≤ ½, so the tail is at most the first omitted term.
fn theta_dual(x: &Float, bits: u32) -> Ball {
    let w = bits + 32;
    let xb = Ball::exact(Float::with_val(w.max(x.prec()), x));
    let pi = Ball::pi(w);
    let c = pi.sqr().div(&xb).unwrap().neg();
    let mut sum = Ball::zero(w);
    let eps_rel = Float::with_val(64, Float::i_exp(1, -(w as i32) - 8));
    let mut k: i64 = 0;
    loop {
        let h = Ball::from_i64(2 * k + 1, w).mul_2exp(-1);
        let term = c.mul(&h.sqr()).exp();
        if k > 0 && term.hi() < Float::with_val(64, sum.lo() * &eps_rel) {
            sum = sum.widen(&Float::with_val(64, term.hi() * 2u32));
            break;
        }
        sum = sum.add(&term);
        k += 1;
    }
    let pref = pi.div(&xb).unwrap().sqrt().unwrap().mul_2exp(1);
    pref.mul(&sum).set_prec(bits)
}

/// Catalog evaluator: exact 0 for x ≤ 0, the dual series on (0, 1) and the
/// direct series beyond.
pub(crate) fn theta_value(x: &Float, bits: u32) -> Result<Ball> {
    if *x <= 0 {
        return Ok(Ball::zero(bits));
    }
    if *x < FLOOR {
        let top = theta_dual(&Float::with_val(64, FLOOR), bits);
        return Ok(Ball::from_endpoints(&Float::new(bits), &top.hi(), bits));
    }
    if *x < DUAL_SWITCH {
        return Ok(theta_dual(x, bits));
    }
    let digits = ((bits.saturating_sub(48)) as f64 / std::f64::consts::LOG2_10).floor() as u32;
    let prec = PrecisionConfig::new(digits.max(15))?;
    theta_eval(x, &prec, THETA_X_MIN).map(|b| b.set_prec(bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::real;

    #[test]
    fn vanishes_off_support() {
        let p = PrecisionConfig::new(30).unwrap();
        assert!(theta_eval(&real(0.0), &p, THETA_X_MIN).unwrap().is_exact_zero());
        assert!(theta_eval(&real(-2.0), &p, THETA_X_MIN).unwrap().is_exact_zero());
        assert!(theta_value(&real(-2.0), 128).unwrap().is_exact_zero());
    }

    #[test]
    fn large_x_two_term_truncation() {
        let p = PrecisionConfig::new(40).unwrap();
        let x = real(6.0);
        let v = theta_eval(&x, &p, THETA_X_MIN).unwrap();
        let approx = 1.0 - 2.0 * (-6.0f64).exp();
        // remainder ≤ 2e^{-4x}
        assert!((v.to_f64() - approx).abs() <= 2.0 * (-24.0f64).exp() * 1.01);
    }

    #[test]
    fn direct_and_dual_forms_agree() {
        let p = PrecisionConfig::new(40).unwrap();
        for x in [0.05, 0.3, 0.9, 1.5, 3.0] {
            let d = theta_dual(&real(x), 200);
            let s = theta_eval(&real(x), &p, THETA_X_MIN).unwrap();
            assert!(d.overlaps(&s), "x = {x}");
            assert!(d.rad().to_f64() < 1e-40 * d.to_f64().abs().max(1e-300));
        }
    }

    #[test]
    fn monotone_on_grid() {
        let mut last = Ball::zero(128);
        for k in 1..=60 {
            let v = theta_value(&real(k as f64 * 0.1), 128).unwrap();
            assert!(v.sub(&last).is_positive(), "k = {k}");
            last = v;
        }
        assert!(last.hi() < 1.0);
    }

    #[test]
    fn below_x_min_is_refused() {
        let p = PrecisionConfig::new(30).unwrap();
        assert!(matches!(theta_eval(&real(1e-4), &p, THETA_X_MIN), Err(Error::PrecisionExhausted(_))));
        let tiny = theta_value(&real(1e-8), 128).unwrap();
        assert!(tiny.contains_f64(0.0) && tiny.hi() < 1e-100);
    }
}

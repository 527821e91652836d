//! Λ(x) = (1/π) ∫₀^∞ cos(xτ) / ξ(½+τ) dτ, the Fourier inversion of 1/ξ on
//! the critical line.
//!
//! The τ-integral runs over Gauss–Legendre panels of width 2 up to a
//! truncation radius taken from the majorant
//! 1/ξ(σ) ≤ exp(−½σ ln σ + ½σ ln(2πe)), σ ≥ 2, which follows from ζ(σ) ≥ 1
//! and Γ(z+1) ≥ √(2πz)(z/e)^z. Values of 1/ξ at the nodes are cached and
//! shared by every x.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use super::{bilateral_laplace, quad, tail_cut, QuadratureConfig, Truncation};
use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::function::{DecayEnvelope, EvaluableFunction, Shape, Strip, TailForm};
use crate::numerics::{xi1_series, xi_real, PrecisionConfig};

/// First zero ordinate of ζ on the critical line; 1/ξ(½+τ) is analytic for
/// |Im τ| below it, so the Laplace transform of Λ converges for |s| below it.
pub const XI_FIRST_ZERO: f64 = 14.134725141734693;

const PANEL: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaConfig {
    /// Largest |x| accepted.
    pub x_max: f64,
    /// Absolute error target for Λ(x); `None` means 10^-(digits + 12), small
    /// enough to certify positivity out to |x| = 10.
    pub target_abs_err: Option<f64>,
    /// Maximal Gauss–Legendre level per panel (8·2^level points).
    pub max_level: u32,
}

impl Default for LambdaConfig {
    fn default() -> Self {
        LambdaConfig { x_max: 10.0, target_abs_err: None, max_level: 5 }
    }
}

impl LambdaConfig {
    pub fn from_quadrature(qc: &QuadratureConfig, x_max: f64) -> Self {
        LambdaConfig { x_max, target_abs_err: qc.target_abs_err, max_level: qc.level.min(6) }
    }

    fn target(&self, prec: &PrecisionConfig) -> Float {
        match self.target_abs_err {
            Some(t) => Float::with_val(64, t),
            None => {
                let ten = Float::with_val(64, 10);
                Float::with_val(64, rug::ops::Pow::pow(&ten, -(prec.digits as i32 + 12)))
            }
        }
    }

    /// Internal precision: enough digits below the target.
    fn inner_prec(&self, prec: &PrecisionConfig) -> PrecisionConfig {
        let t = -self.target(prec).to_f64().log10();
        prec.with_digits((t.ceil() as u32 + 8).max(prec.digits))
    }
}

type Key = (u32, Integer, i32);

fn exact_key(bits: u32, x: &Float) -> Key {
    let (m, e) = x.to_integer_exp().unwrap_or((Integer::new(), 0));
    (bits, m, e)
}

fn inv_xi_cache() -> &'static Mutex<HashMap<Key, Ball>> {
    static C: OnceLock<Mutex<HashMap<Key, Ball>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// 1/ξ(½+τ), memoized per (precision, τ).
fn inv_xi(tau: &Float, prec: &PrecisionConfig) -> Result<Ball> {
    let key = exact_key(prec.digits, tau);
    if let Some(v) = inv_xi_cache().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let sigma = Float::with_val(tau.prec() + 64, tau + 0.5f64);
    let v = xi_real(&sigma, prec)?
        .recip()
        .ok_or_else(|| Error::PrecisionExhausted("1/xi".into()))?;
    inv_xi_cache().lock().unwrap().insert(key, v.clone());
    Ok(v)
}

/// Majorant of |cos(xτ)/ξ(½+τ)| for τ ≥ 3/2, in the tail-form language:
/// (τ+½)ln(τ+½) ≥ τ ln τ bounds the super-exponential part.
fn inv_xi_envelope() -> TailForm {
    let l = (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    TailForm::new(0.25 * l, 0.5 * l, Shape::SuperExponential { a: 0.5 }).from(1.5)
}

/// Λ as an evaluable function at a fixed precision and error target. Values
/// are memoized per x.
pub struct LambdaXi {
    cfg: LambdaConfig,
    prec: PrecisionConfig,
    inner: PrecisionConfig,
    target: Float,
    radius: f64,
    tail: Float,
    memo: Mutex<HashMap<Key, Ball>>,
}

impl LambdaXi {
    pub fn new(cfg: LambdaConfig, prec: &PrecisionConfig) -> Result<Self> {
        let prec = prec.validated()?;
        if !(cfg.x_max > 0.0 && cfg.x_max.is_finite()) {
            return Err(Error::InvalidParameter("x_max must be positive".into()));
        }
        let target = cfg.target(&prec);
        let inner = cfg.inner_prec(&prec);
        // (1/π)∫_R^∞ ≤ ∫_R^∞: a tenth of the budget for the tail
        let budget = Float::with_val(64, &target / 10u32);
        let (r, tail) = tail_cut(&inv_xi_envelope(), 0.0, 0, &budget, None, "1/xi")?;
        let radius = (r / PANEL).ceil() * PANEL;
        Ok(LambdaXi { cfg, prec, inner, target, radius, tail, memo: Mutex::new(HashMap::new()) })
    }

    /// Truncation radius of the τ-integral.
    pub fn truncation_radius(&self) -> f64 {
        self.radius
    }

    /// Absolute error target of each value.
    pub fn target(&self) -> &Float {
        &self.target
    }

    pub fn value(&self, x: &Float) -> Result<Ball> {
        if x.clone().abs() > self.cfg.x_max {
            return Err(Error::Domain(format!(
                "|x| = {} beyond x_max = {}",
                x.to_string_radix(10, Some(10)),
                self.cfg.x_max
            )));
        }
        let x = x.clone().abs();
        let key = exact_key(0, &x);
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = self.compute(&x)?;
        self.memo.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    fn compute(&self, x: &Float) -> Result<Ball> {
        let bits = self.inner.work_bits();
        let xb = Ball::exact(Float::with_val(bits.max(x.prec()), x));
        let f = |tau: &Float| -> Result<Ball> {
            let c = xb.mul(&Ball::exact(tau.clone())).set_prec(bits).cos();
            Ok(c.mul(&inv_xi(tau, &self.inner)?))
        };
        let panels = (self.radius / PANEL) as u32;
        let pi = Ball::pi(bits);
        // π · 9/10 of the target, shared among the panels
        let panel_target = Float::with_val(64, &self.target * 2.8f64) / panels;
        let mut sum = Ball::zero(bits);
        for k in 0..panels {
            let a = Float::with_val(64, k as f64 * PANEL);
            let b = Float::with_val(64, (k + 1) as f64 * PANEL);
            let part = quad::integrate_panel(
                &f,
                &a,
                &b,
                quad::Scheme::GaussLegendrePanels,
                self.cfg.max_level,
                &panel_target,
                bits,
            )
            .map_err(|e| match e {
                Error::TargetUnreachable { target, best } => Error::TargetUnreachable {
                    target,
                    best: format!("{best} on tau-panel [{}, {}] at x = {}", k as f64 * PANEL, (k + 1) as f64 * PANEL, x),
                },
                e => e,
            })?;
            sum = sum.add(&part);
        }
        let v = sum.widen(&self.tail).div(&pi).unwrap();
        Ok(v.set_prec(self.prec.work_bits()))
    }
}

impl EvaluableFunction for LambdaXi {
    fn name(&self) -> String {
        "xi-lambda".into()
    }

    fn eval(&self, x: &Float, _bits: u32) -> Result<Ball> {
        self.value(x)
    }

    fn strip(&self) -> Option<Strip> {
        Some(Strip { lo: Some(-XI_FIRST_ZERO), hi: Some(XI_FIRST_ZERO) })
    }

    /// Observed, not proven: Λ(x) ≤ 100 e^{−12|x|} for |x| ≥ 2, against the
    /// decay rate e^{−14.13|x|} suggested by the first zero of ξ.
    fn envelope(&self) -> Option<DecayEnvelope> {
        Some(DecayEnvelope::symmetric(
            TailForm::new(100f64.ln(), 0.0, Shape::Exponential { a: 12.0 }).from(2.0),
        ))
    }

    fn scale(&self) -> f64 {
        0.25
    }
}

/// Λ(x) with a one-off [`LambdaXi`]; reuse an instance for many points.
pub fn lambda_from_xi(x: &Float, qc: &QuadratureConfig, prec: &PrecisionConfig) -> Result<Ball> {
    let x_max = x.to_f64().abs().max(1.0);
    LambdaXi::new(LambdaConfig::from_quadrature(qc, x_max), prec)?.value(x)
}

/// ∫ Λ(x) e^{−sx} dx · Ξ(s) − 1, where Ξ(s) = ξ(½+is) = Ξ₁(−s²) is evaluated
/// from the Taylor data of Ξ₁ with the Cauchy tail bound
/// a_{2m} ≤ ξ(½+R)/R^{2m}.
pub fn roundtrip_check(lambda: &LambdaXi, s: &Float, qc: &QuadratureConfig) -> Result<Ball> {
    let prec = lambda.prec;
    let qc = QuadratureConfig { trunc_radius: Truncation::Auto, ..*qc };
    let laplace = bilateral_laplace(lambda, s, &qc, &prec)?.value;
    let xi = big_xi(s, &prec)?;
    Ok(laplace.mul(&xi).sub(&Ball::one(prec.work_bits())))
}

fn big_xi(s: &Float, prec: &PrecisionConfig) -> Result<Ball> {
    const TERMS: usize = 12;
    const R: f64 = 30.0;
    let bits = prec.work_bits();
    let series = xi1_series(TERMS, prec)?;
    let sb = Ball::exact(Float::with_val(bits.max(s.prec()), s));
    let z = sb.sqr().neg();
    let head = series.eval(&z);
    let q = sb.sqr().div(&Ball::from_f64(R * R, bits)).unwrap();
    if q.hi() >= 0.5 {
        return Err(Error::Domain("|s| too large for the Xi_1 series".into()));
    }
    // Σ_{m≥TERMS} ξ(½+R) q^m ≤ 2 ξ(½+R) q^TERMS
    let xi_r = xi_real(&Float::with_val(64, R + 0.5), &prec.with_digits(20))?;
    let tail = xi_r.mul(&q.powi(TERMS as u32)).mul_i64(2).hi();
    Ok(head.widen(&tail))
}

/// Λ sampled on a grid as CSV rows `x,center,radius`.
pub fn lambda_csv(lambda: &LambdaXi, xs: &[Float]) -> Result<String> {
    let mut out = String::from("x,center,radius\n");
    for x in xs {
        let v = lambda.value(x)?;
        let xs = if *x == x.to_f64() { x.to_f64().to_string() } else { x.to_string_radix(10, None) };
        out.push_str(&format!("{xs},{},{}\n", v.mid_string(), v.rad_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::real;

    fn small() -> LambdaXi {
        let cfg = LambdaConfig { x_max: 4.0, target_abs_err: Some(1e-25), max_level: 4 };
        LambdaXi::new(cfg, &PrecisionConfig::new(20).unwrap()).unwrap()
    }

    #[test]
    fn envelope_dominates_inverse_xi() {
        let env = inv_xi_envelope();
        let p = PrecisionConfig::new(20).unwrap();
        for tau in [1.5, 3.0, 10.0, 40.0, 120.0] {
            let v = inv_xi(&real(tau), &p).unwrap().to_f64().ln();
            let bound = env.log_c + env.lin * tau - 0.5 * tau * tau.ln();
            assert!(v <= bound, "tau = {tau}: {v} > {bound}");
        }
    }

    #[test]
    fn known_values_and_symmetry() {
        let l = small();
        let v0 = l.value(&real(0.0)).unwrap();
        assert!((v0.to_f64() - 3.8208).abs() < 1e-3, "{}", v0.to_f64());
        let a = l.value(&real(0.5)).unwrap();
        let b = l.value(&real(-0.5)).unwrap();
        assert!(a.overlaps(&b));
        assert!((a.to_f64() - 0.24766).abs() < 1e-4);
        assert!(l.value(&real(5.0)).is_err());
    }

    #[test]
    fn csv_layout() {
        let l = small();
        let csv = lambda_csv(&l, &[real(0.0), real(1.0)]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,center,radius");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("1,"));
    }
}

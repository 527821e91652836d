//! Numerical bilateral Laplace transforms of evaluable functions and the
//! Fourier inversion Λ of 1/ξ.
//!
//! Integrals are split into panels between breakpoints (support edges, the
//! origin and powers of two). Each panel is refined until successive levels
//! agree to the panel's share of the target error; the tails beyond the
//! truncation radius are bounded through the function's decay envelope.

mod lambda;
pub mod quad;

use rug::Float;
use serde::{Deserialize, Serialize};

pub use lambda::{lambda_csv, lambda_from_xi, roundtrip_check, LambdaConfig, LambdaXi, XI_FIRST_ZERO};
pub use quad::Scheme;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::function::{EvaluableFunction, Strip, TailForm};
use crate::numerics::PrecisionConfig;

/// Truncation of infinite ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Smallest radius whose envelope tail fits the error budget.
    Auto,
    Radius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub scheme: Scheme,
    /// Maximal refinement depth per panel.
    pub level: u32,
    pub trunc_radius: Truncation,
    /// Absolute error target; `None` means 10^-(digits − 10).
    pub target_abs_err: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            scheme: Scheme::DoubleExponential,
            level: 8,
            trunc_radius: Truncation::Auto,
            target_abs_err: None,
        }
    }
}

impl QuadratureConfig {
    pub fn validated(self) -> Result<Self> {
        if let Some(t) = self.target_abs_err {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!("target_abs_err must be positive, got {t}")));
            }
        }
        if let Truncation::Radius(r) = self.trunc_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!("truncation radius must be positive, got {r}")));
            }
        }
        if self.level == 0 {
            return Err(Error::InvalidParameter("quadrature level must be at least 1".into()));
        }
        Ok(self)
    }

    pub fn target(&self, prec: &PrecisionConfig) -> Float {
        match self.target_abs_err {
            Some(t) => Float::with_val(64, t),
            None => {
                let ten = Float::with_val(64, 10);
                Float::with_val(64, rug::ops::Pow::pow(&ten, -(prec.digits as i32 - 10)))
            }
        }
    }
}

/// Transform value and the strip it was evaluated in.
#[derive(Debug, Clone, Serialize)]
pub struct TransformResult {
    pub value: Ball,
    pub strip: Strip,
}

/// ∫ f(x) e^{−sx} dx for s inside the strip of f.
pub fn bilateral_laplace<F: EvaluableFunction + ?Sized>(
    f: &F,
    s: &Float,
    qc: &QuadratureConfig,
    prec: &PrecisionConfig,
) -> Result<TransformResult> {
    let strip = f.strip().ok_or_else(|| Error::EnvelopeMissing(format!("{}: no strip", f.name())))?;
    strip.check(s)?;
    let value = integrate_weighted(f, s, 0, qc, prec)?;
    Ok(TransformResult { value, strip })
}

/// Upper bound on the envelope tail integral ∫_Y^∞ g(y) e^{ty} y^j dy with
/// the smallest Y on a geometric scan that meets `budget`.
fn tail_cut(form: &TailForm, t: f64, j: u32, budget: &Float, fixed: Option<f64>, name: &str) -> Result<(f64, Float)> {
    let log_budget = budget.to_f64().ln();
    let bound = |y: f64| form.log_tail_integral(y, t, j);
    if let Some(y) = fixed {
        let lb = bound(y).ok_or_else(|| Error::TargetUnreachable {
            target: budget.to_string_radix(10, Some(6)),
            best: format!("envelope of {name} not decreasing at radius {y}"),
        })?;
        return Ok((y, Float::with_val(64, lb).exp()));
    }
    let mut y = form.from.max(1.0);
    while y < 1e7 {
        if let Some(lb) = bound(y) {
            if lb <= log_budget {
                return Ok((y, Float::with_val(64, lb).exp()));
            }
        }
        y *= 1.125;
    }
    Err(Error::TargetUnreachable {
        target: budget.to_string_radix(10, Some(6)),
        best: format!("no truncation radius below 1e7 for {name}"),
    })
}

/// Panel breakpoints in [a, b]: the ends, the origin, ±2^k and the
/// function's own breakpoints.
fn breakpoints(a: f64, b: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![a, b, 0.0];
    let mut p = 0.5;
    while p < b.abs().max(a.abs()) {
        pts.push(p);
        pts.push(-p);
        p *= 2.0;
    }
    pts.extend_from_slice(extra);
    pts.retain(|x| *x >= a && *x <= b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    pts
}

/// ∫ f(x) x^j e^{−sx} dx with quadrature and truncation errors in the radius.
pub fn integrate_weighted<F: EvaluableFunction + ?Sized>(
    f: &F,
    s: &Float,
    j: u32,
    qc: &QuadratureConfig,
    prec: &PrecisionConfig,
) -> Result<Ball> {
    let qc = qc.validated()?;
    let prec = prec.validated()?;
    let bits = prec.work_bits();
    let target = qc.target(&prec);
    let support = f.support();
    let name = f.name();
    let fixed = match qc.trunc_radius {
        Truncation::Auto => None,
        Truncation::Radius(r) => Some(r),
    };
    let tail_budget = Float::with_val(64, &target / 8u32);
    let sf = s.to_f64();
    let mut tails = Float::with_val(64, 0);

    let b = match support.hi {
        Some(b) => b,
        None => {
            let env = f.envelope().ok_or_else(|| Error::EnvelopeMissing(name.clone()))?;
            let form = env.right.ok_or_else(|| Error::EnvelopeMissing(format!("{name}: right tail")))?;
            let (y, t) = tail_cut(&form, -sf, j, &tail_budget, fixed, &name)?;
            tails += t;
            y.max(support.lo.unwrap_or(f64::NEG_INFINITY))
        }
    };
    let a = match support.lo {
        Some(a) => a,
        None => {
            let env = f.envelope().ok_or_else(|| Error::EnvelopeMissing(name.clone()))?;
            let form = env.left.ok_or_else(|| Error::EnvelopeMissing(format!("{name}: left tail")))?;
            let (y, t) = tail_cut(&form, sf, j, &tail_budget, fixed, &name)?;
            tails += t;
            (-y).min(b)
        }
    };

    let pts = breakpoints(a, b, &f.breakpoints());
    let panels = pts.len().saturating_sub(1).max(1);
    let panel_target = Float::with_val(64, &target * 3u32) / (4 * panels) as u32;
    let sb = Ball::exact(s.clone());
    let integrand = |x: &Float| -> Result<Ball> {
        let v = f.eval(x, bits)?;
        if v.is_exact_zero() {
            return Ok(v);
        }
        let xb = Ball::exact(x.clone());
        let mut w = v.mul(&sb.mul(&xb).neg().set_prec(bits).exp());
        if j > 0 {
            w = w.mul(&xb.powi(j));
        }
        Ok(w)
    };
    let mut sum = Ball::zero(bits);
    for w in pts.windows(2) {
        let (pa, pb) = (Float::with_val(64, w[0]), Float::with_val(64, w[1]));
        let part = quad::integrate_panel(&integrand, &pa, &pb, qc.scheme, qc.level, &panel_target, bits)?;
        sum = sum.add(&part);
    }
    Ok(sum.widen(&tails).set_prec(prec.bits()))
}

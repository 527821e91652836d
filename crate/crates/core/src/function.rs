//! Real function handles with the metadata the integrators and testers need:
//! support, Laplace strip and a decay envelope for truncating tails.

use rug::Float;
use serde::Serialize;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::moments::MomentSequence;

/// A closed interval with optional infinite ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Support {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Support {
    pub const REAL_LINE: Support = Support { lo: None, hi: None };

    pub fn contains(&self, x: &Float) -> bool {
        self.lo.is_none_or(|a| *x >= a) && self.hi.is_none_or(|b| *x <= b)
    }
}

/// Open interval (α, β) of Laplace convergence; `None` ends are infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Strip {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Strip {
    pub const REAL_LINE: Strip = Strip { lo: None, hi: None };

    pub fn contains(&self, s: &Float) -> bool {
        self.lo.is_none_or(|a| *s > a) && self.hi.is_none_or(|b| *s < b)
    }

    pub fn check(&self, s: &Float) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            let show = |e: Option<f64>, inf: &str| e.map_or(inf.to_string(), |v| v.to_string());
            Err(Error::StripViolation {
                point: s.to_string_radix(10, Some(17)),
                lo: show(self.lo, "-inf"),
                hi: show(self.hi, "inf"),
            })
        }
    }

    /// The strip of x ↦ e^{-cx} f(x): shifted left by c.
    pub fn shifted(&self, c: f64) -> Strip {
        Strip { lo: self.lo.map(|a| a - c), hi: self.hi.map(|b| b - c) }
    }
}

/// Convex growth term subtracted in the exponent of a tail majorant, as a
/// function of the distance y ≥ 0 from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum Shape {
    /// No decay of its own (bounded functions).
    Flat,
    /// a·y
    Exponential { a: f64 },
    /// a·y²
    Gaussian { a: f64 },
    /// a·y·ln y
    SuperExponential { a: f64 },
    /// a·e^{b y}
    DoubleExponential { a: f64, b: f64 },
}

impl Shape {
    fn value(&self, y: f64) -> f64 {
        match *self {
            Shape::Flat => 0.0,
            Shape::Exponential { a } => a * y,
            Shape::Gaussian { a } => a * y * y,
            Shape::SuperExponential { a } => a * y * y.ln(),
            Shape::DoubleExponential { a, b } => a * (b * y).exp(),
        }
    }

    fn slope(&self, y: f64) -> f64 {
        match *self {
            Shape::Flat => 0.0,
            Shape::Exponential { a } => a,
            Shape::Gaussian { a } => 2.0 * a * y,
            Shape::SuperExponential { a } => a * (y.ln() + 1.0),
            Shape::DoubleExponential { a, b } => a * b * (b * y).exp(),
        }
    }
}

/// Majorant |f| ≤ exp(log_c + lin·y − shape(y)) at distance y ≥ `from` on one
/// side of the origin. Every form is log-concave in y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailForm {
    pub log_c: f64,
    pub lin: f64,
    pub shape: Shape,
    pub from: f64,
}

/// Safety margin, in nats, added to every tail bound to absorb the f64
/// evaluation of the majorant.
const TAIL_MARGIN: f64 = 1.0;

impl TailForm {
    pub fn new(log_c: f64, lin: f64, shape: Shape) -> Self {
        TailForm { log_c, lin, shape, from: 0.0 }
    }

    pub fn from(mut self, y0: f64) -> Self {
        self.from = y0;
        self
    }

    /// Natural log of an upper bound on ∫_Y^∞ g(y) e^{t y} y^j dy, or `None`
    /// when the tilted majorant is not yet decreasing at Y. Uses
    /// ∫_Y^∞ h ≤ h(Y) / (−(ln h)'(Y)) for log-concave h.
    pub fn log_tail_integral(&self, y: f64, t: f64, j: u32) -> Option<f64> {
        if y < self.from || y <= 0.0 {
            return None;
        }
        let jf = j as f64;
        let log_h = self.log_c + (self.lin + t) * y - self.shape.value(y) + jf * y.ln();
        let dlog = self.lin + t - self.shape.slope(y) + jf / y;
        if !(dlog < 0.0) || !log_h.is_finite() {
            return None;
        }
        Some(log_h - (-dlog).ln() + TAIL_MARGIN)
    }
}

/// Tail majorants on each side. A side whose support is bounded needs none.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayEnvelope {
    pub left: Option<TailForm>,
    pub right: Option<TailForm>,
}

impl DecayEnvelope {
    pub fn symmetric(t: TailForm) -> Self {
        DecayEnvelope { left: Some(t), right: Some(t) }
    }

    /// Envelope of e^{-cx} f(x).
    pub fn tilted(&self, c: f64) -> Self {
        let shift = |t: Option<TailForm>, d: f64| t.map(|t| TailForm { lin: t.lin + d, ..t });
        DecayEnvelope { left: shift(self.left, c), right: shift(self.right, -c) }
    }
}

/// A real function Λ with support, strip and envelope metadata.
pub trait EvaluableFunction: Send + Sync {
    fn name(&self) -> String;

    /// Enclosure of Λ(x) at `bits` of working precision.
    fn eval(&self, x: &Float, bits: u32) -> Result<Ball>;

    fn support(&self) -> Support {
        Support::REAL_LINE
    }

    fn strip(&self) -> Option<Strip> {
        None
    }

    fn envelope(&self) -> Option<DecayEnvelope> {
        None
    }

    /// Interior points where Λ is not analytic; integration panels break there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Natural length scale, used to size random grids.
    fn scale(&self) -> f64 {
        1.0
    }

    /// μ_0..μ_n in closed form, when known.
    fn closed_form_moments(&self, _n: usize, _bits: u32) -> Option<MomentSequence> {
        None
    }
}

impl<F: EvaluableFunction + ?Sized> EvaluableFunction for &F {
    fn name(&self) -> String {
        (**self).name()
    }
    fn eval(&self, x: &Float, bits: u32) -> Result<Ball> {
        (**self).eval(x, bits)
    }
    fn support(&self) -> Support {
        (**self).support()
    }
    fn strip(&self) -> Option<Strip> {
        (**self).strip()
    }
    fn envelope(&self) -> Option<DecayEnvelope> {
        (**self).envelope()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
    fn scale(&self) -> f64 {
        (**self).scale()
    }
    fn closed_form_moments(&self, n: usize, bits: u32) -> Option<MomentSequence> {
        (**self).closed_form_moments(n, bits)
    }
}

/// x ↦ e^{-cx} Λ(x). Multiplying a Polya frequency function by an exponential
/// keeps it one; the tilt makes bounded entries integrable.
pub struct Tilted<F> {
    pub inner: F,
    pub c: f64,
}

impl<F: EvaluableFunction> EvaluableFunction for Tilted<F> {
    fn name(&self) -> String {
        format!("{}*exp(-{}x)", self.inner.name(), self.c)
    }

    fn eval(&self, x: &Float, bits: u32) -> Result<Ball> {
        let v = self.inner.eval(x, bits)?;
        if v.is_exact_zero() || self.c == 0.0 {
            return Ok(v);
        }
        let arg = Ball::exact(Float::with_val(bits.max(x.prec()) + 64, x * -self.c));
        Ok(v.mul(&arg.set_prec(bits).exp()))
    }

    fn support(&self) -> Support {
        self.inner.support()
    }

    fn strip(&self) -> Option<Strip> {
        self.inner.strip().map(|s| s.shifted(self.c))
    }

    fn envelope(&self) -> Option<DecayEnvelope> {
        self.inner.envelope().map(|e| e.tilted(self.c))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }

    fn scale(&self) -> f64 {
        self.inner.scale()
    }

    fn closed_form_moments(&self, n: usize, bits: u32) -> Option<MomentSequence> {
        if self.c == 0.0 {
            self.inner.closed_form_moments(n, bits)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_tail_bound() {
        // ∫_Y^∞ e^{-y} dy = e^{-Y}
        let t = TailForm::new(0.0, 0.0, Shape::Exponential { a: 1.0 });
        let b = t.log_tail_integral(10.0, 0.0, 0).unwrap();
        assert!((-10.0..=-10.0 + 1.01).contains(&b));
        // tilting by e^{+y} leaves nothing decaying
        assert!(t.log_tail_integral(10.0, 1.0, 0).is_none());
    }

    #[test]
    fn gaussian_tail_dominates() {
        let t = TailForm::new(0.0, 0.0, Shape::Gaussian { a: 1.0 });
        // ∫_3^∞ e^{-y²} dy = √π/2 erfc(3) ≈ 1.9577e-5
        let b = t.log_tail_integral(3.0, 0.0, 0).unwrap();
        assert!(b >= (1.9577e-5f64).ln());
    }

    #[test]
    fn strips() {
        let s = Strip { lo: Some(0.0), hi: Some(1.0) };
        assert!(s.contains(&Float::with_val(53, 0.5)));
        assert!(s.check(&Float::with_val(53, 1.0)).is_err());
        assert_eq!(s.shifted(0.5), Strip { lo: Some(-0.5), hi: Some(0.5) });
    }
}

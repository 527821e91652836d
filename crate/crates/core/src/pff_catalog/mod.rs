//! Closed-form Polya frequency functions with their transforms and
//! factorization data.
//!
//! Each entry Λ satisfies ∫ Λ(x) e^{−sx} dx = 1/Ψ(s) on its strip, with Ψ in
//! the Laguerre-Polya class. The entries double as ground truth for the
//! integrators and the total-positivity testers.

mod theta;

use std::fmt;
use std::str::FromStr;

use rug::{Float, Rational};
use serde::Serialize;

pub use theta::{theta_eval, THETA_X_MIN};

use crate::ball::{Ball, RAD_PREC};
use crate::error::{Error, Result};
use crate::function::{DecayEnvelope, EvaluableFunction, Shape, Strip, Support, TailForm};
use crate::lp_class::{LPFactorization, OneSidedFactorization};
use crate::moments::MomentSequence;
use crate::numerics::{gamma_real, PrecisionConfig};
use crate::scalar::factorial;

/// Relative slack applied to f64 decay constants so envelopes stay majorants.
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CatalogEntry {
    Gaussian { gamma: f64 },
    OneSidedExp { delta: f64 },
    Gumbel,
    GumbelNormalized,
    Logistic,
    JacobiTheta,
    /// Indicator of [0, 1]: not a Polya frequency function; negative control.
    Indicator,
}

use CatalogEntry::*;

/// The six Polya frequency functions, with unit parameters.
pub fn catalog_list() -> Vec<CatalogEntry> {
    vec![
        Gaussian { gamma: 1.0 },
        OneSidedExp { delta: 1.0 },
        Gumbel,
        GumbelNormalized,
        Logistic,
        JacobiTheta,
    ]
}

/// Ψ in product form.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum PsiFactorization {
    Hadamard(LPFactorization),
    OneSided(OneSidedFactorization),
}

impl PsiFactorization {
    pub fn to_lp(&self) -> Result<LPFactorization> {
        match self {
            PsiFactorization::Hadamard(f) => Ok(f.clone()),
            PsiFactorization::OneSided(f) => f.to_lp(),
        }
    }
}

impl CatalogEntry {
    pub fn gaussian(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gaussian needs gamma > 0, got {gamma}")));
        }
        Ok(Gaussian { gamma })
    }

    pub fn one_sided_exp(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("one_sided_exp needs delta > 0, got {delta}")));
        }
        Ok(OneSidedExp { delta })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Gaussian { .. } => "gaussian",
            OneSidedExp { .. } => "one_sided_exp",
            Gumbel => "gumbel",
            GumbelNormalized => "gumbel_normalized",
            Logistic => "logistic",
            JacobiTheta => "jacobi_theta",
            Indicator => "indicator",
        }
    }

    pub fn is_pff(&self) -> bool {
        !matches!(self, Indicator)
    }

    /// Human-readable closed forms (Λ, Ψ).
    pub fn formulas(&self) -> (String, String) {
        match *self {
            Gaussian { gamma } => (
                format!("{gamma}^(-1/2) exp(-pi x^2/{gamma})"),
                format!("exp(-{gamma} s^2/(4 pi))"),
            ),
            OneSidedExp { delta } => {
                (format!("exp(-x/{delta})/{delta} for x >= 0, else 0"), format!("1 + {delta} s"))
            }
            Gumbel => ("exp(-exp(-x))".into(), "1/Gamma(s)".into()),
            GumbelNormalized => ("exp(-x - exp(-x))".into(), "1/Gamma(s+1)".into()),
            Logistic => ("1/(1 + exp(-x))".into(), "sin(pi s)/pi".into()),
            JacobiTheta => (
                "sum_j (-1)^j exp(-j^2 x) for x > 0, else 0".into(),
                "sqrt(s) sinh(pi sqrt(s))/pi".into(),
            ),
            Indicator => ("1 on [0, 1], else 0".into(), "s/(1 - exp(-s))".into()),
        }
    }

    /// Ψ(s) from its closed form, at real s.
    pub fn psi(&self, s: &Float, prec: &PrecisionConfig) -> Result<Ball> {
        let prec = prec.validated()?;
        let bits = prec.work_bits();
        let sb = Ball::exact(Float::with_val(bits.max(s.prec()), s));
        let v = match *self {
            Gaussian { gamma } => {
                let g = Ball::from_f64(gamma, bits);
                g.mul(&sb.sqr()).div(&Ball::pi(bits).mul_i64(4)).unwrap().neg().exp()
            }
            OneSidedExp { delta } => Ball::one(bits).add(&Ball::from_f64(delta, bits).mul(&sb)),
            Gumbel => recip_gamma(s, &prec)?,
            GumbelNormalized => {
                let s1 = Float::with_val(s.prec() + 64, s + 1u32);
                recip_gamma(&s1, &prec)?
            }
            Logistic => {
                let pi = Ball::pi(bits);
                pi.mul(&sb).sin().div(&pi).unwrap()
            }
            JacobiTheta => {
                let pi = Ball::pi(bits);
                match s.cmp0() {
                    Some(std::cmp::Ordering::Greater) => {
                        let r = sb.sqrt().unwrap();
                        r.mul(&pi.mul(&r).sinh()).div(&pi).unwrap()
                    }
                    Some(std::cmp::Ordering::Less) => {
                        let r = sb.neg().sqrt().unwrap();
                        r.mul(&pi.mul(&r).sin()).div(&pi).unwrap().neg()
                    }
                    _ => Ball::zero(bits),
                }
            }
            Indicator => {
                if s.is_zero() {
                    Ball::one(bits)
                } else {
                    let den = sb.neg().exp_m1().neg();
                    sb.div(&den).ok_or_else(|| Error::PrecisionExhausted("indicator transform".into()))?
                }
            }
        };
        Ok(v.set_prec(prec.bits()))
    }

    /// Product representation of Ψ, listing `n` zero groups where the
    /// product is infinite.
    pub fn factorization(&self, n: usize, bits: u32) -> Result<Option<PsiFactorization>> {
        let zero = || Ball::zero(bits);
        let one = || Ball::one(bits);
        let tail = |x: f64| Float::with_val_round(RAD_PREC, x, rug::float::Round::Up).0;
        let recip = |k: i64| Ball::one(bits).div(&Ball::from_i64(k, bits)).unwrap();
        let n = n.max(1);
        let f = match *self {
            Gaussian { gamma } => {
                let g = Ball::from_f64(gamma, bits).div(&Ball::pi(bits).mul_i64(4)).unwrap();
                PsiFactorization::Hadamard(LPFactorization::new(one(), 0, g, zero(), vec![], tail(0.0))?)
            }
            OneSidedExp { delta } => PsiFactorization::OneSided(OneSidedFactorization::new(
                one(),
                zero(),
                vec![Ball::from_f64(delta, bits)],
                tail(0.0),
            )?),
            // 1/Γ(s) = s e^{γs} Π (1 + s/k) e^{−s/k}; Σ_{k>n} 1/k² < 1/n.
            Gumbel | GumbelNormalized => {
                let m = u32::from(matches!(self, Gumbel));
                let zeros = (1..=n as i64).map(recip).collect();
                PsiFactorization::Hadamard(LPFactorization::new(
                    one(),
                    m,
                    zero(),
                    Ball::euler(bits),
                    zeros,
                    tail(1.0 / n as f64),
                )?)
            }
            // sin(πs)/π = s Π (1 − s²/k²); zeros ±1/k in pairs.
            Logistic => {
                let zeros = (1..=n as i64).flat_map(|k| [recip(k), recip(k).neg()]).collect();
                PsiFactorization::Hadamard(
                    LPFactorization::new(one(), 1, zero(), zero(), zeros, tail(2.0 / n as f64))?.grouped(2)?,
                )
            }
            // √s sinh(π√s)/π = s Π (1 + s/k²); Σ 1/k² = π²/6, Σ_{k>n} 1/k⁴ < 1/(3n³).
            JacobiTheta => {
                let zeros = (1..=n as i64).map(|k| recip(k * k)).collect();
                let delta = Ball::pi(bits).sqr().div_i64(6);
                let t = 1.0 / (3.0 * (n as f64).powi(3));
                PsiFactorization::Hadamard(LPFactorization::new(one(), 1, zero(), delta, zeros, tail(t))?)
            }
            Indicator => return Ok(None),
        };
        Ok(Some(f))
    }

    /// Exponential tilt c making e^{−cx}Λ(x) integrable with all moments;
    /// zero for entries that already are.
    pub fn moment_tilt(&self) -> f64 {
        match self {
            Gumbel | JacobiTheta => 1.0,
            Logistic => 0.5,
            _ => 0.0,
        }
    }

    /// μ_0..μ_n from closed forms, where available.
    pub fn moments_closed_form(&self, n: usize, bits: u32) -> Option<MomentSequence> {
        match *self {
            // μ_j = j! δ^j
            OneSidedExp { delta } => {
                let d = Rational::from_f64(delta)?;
                let mut pow = Rational::from(1);
                let mu = (0..=n as u32)
                    .map(|j| {
                        let v = Rational::from(&pow * factorial(j));
                        pow *= &d;
                        v
                    })
                    .collect();
                MomentSequence::from_exact(mu, bits).ok()
            }
            // centred normal with variance γ/(2π): μ_{2k} = (2k−1)!! v^k
            Gaussian { gamma } => {
                let v = Ball::from_f64(gamma, bits).div(&Ball::pi(bits).mul_2exp(1)).unwrap();
                let mut mu = Vec::with_capacity(n + 1);
                let mut even = Ball::one(bits);
                for j in 0..=n {
                    if j % 2 == 1 {
                        mu.push(Ball::zero(bits));
                    } else {
                        if j > 0 {
                            even = even.mul(&v).mul_i64(j as i64 - 1);
                        }
                        mu.push(even.clone());
                    }
                }
                MomentSequence::new(mu, crate::moments::MomentSource::ClosedForm).ok()
            }
            Indicator => {
                let mu = (0..=n as u64).map(|j| Rational::from((1, j + 1))).collect();
                MomentSequence::from_exact(mu, bits).ok()
            }
            _ => None,
        }
    }
}

fn recip_gamma(s: &Float, prec: &PrecisionConfig) -> Result<Ball> {
    // 1/Γ vanishes at the poles of Γ.
    if *s <= 0 && s.is_integer() {
        return Ok(Ball::zero(prec.work_bits()));
    }
    gamma_real(s, prec)?.recip().ok_or_else(|| Error::PrecisionExhausted("1/Gamma".into()))
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gaussian { gamma } if gamma != 1.0 => write!(f, "gaussian({gamma})"),
            OneSidedExp { delta } if delta != 1.0 => write!(f, "one_sided_exp({delta})"),
            _ => f.write_str(self.label()),
        }
    }
}

impl FromStr for CatalogEntry {
    type Err = Error;

    /// Accepts `name` or `name(param)` for the parametrized entries.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            _ => (s, None),
        };
        let value = |p: Option<&str>| -> Result<f64> {
            p.map_or(Ok(1.0), |v| {
                v.trim().parse::<f64>().map_err(|_| Error::UnknownSubject(s.to_string()))
            })
        };
        let entry = match name {
            "gaussian" => CatalogEntry::gaussian(value(param)?)?,
            "one_sided_exp" => CatalogEntry::one_sided_exp(value(param)?)?,
            "gumbel" => Gumbel,
            "gumbel_normalized" => GumbelNormalized,
            "logistic" => Logistic,
            "jacobi_theta" | "theta" => JacobiTheta,
            "indicator" => Indicator,
            _ => return Err(Error::UnknownSubject(s.to_string())),
        };
        if param.is_some() && !matches!(entry, Gaussian { .. } | OneSidedExp { .. }) {
            return Err(Error::UnknownSubject(s.to_string()));
        }
        Ok(entry)
    }
}

impl EvaluableFunction for CatalogEntry {
    fn name(&self) -> String {
        self.to_string()
    }

    fn closed_form_moments(&self, n: usize, bits: u32) -> Option<MomentSequence> {
        self.moments_closed_form(n, bits)
    }

    fn eval(&self, x: &Float, bits: u32) -> Result<Ball> {
        let w = bits + 16;
        let xb = Ball::exact(Float::with_val(w.max(x.prec()), x));
        let v = match *self {
            Gaussian { gamma } => {
                let g = Ball::from_f64(gamma, w);
                let e = Ball::pi(w).mul(&xb.sqr()).div(&g).unwrap().neg().exp();
                e.div(&g.sqrt().unwrap()).unwrap()
            }
            OneSidedExp { delta } => {
                if *x < 0 {
                    Ball::zero(w)
                } else {
                    let d = Ball::from_f64(delta, w);
                    xb.div(&d).unwrap().neg().exp().div(&d).unwrap()
                }
            }
            Gumbel => xb.neg().exp().neg().exp(),
            GumbelNormalized => xb.neg().sub(&xb.neg().exp()).exp(),
            Logistic => {
                if *x >= 0 {
                    Ball::one(w).add(&xb.neg().exp()).recip().unwrap()
                } else {
                    let e = xb.exp();
                    e.div(&Ball::one(w).add(&e)).unwrap()
                }
            }
            JacobiTheta => theta::theta_value(x, w)?,
            Indicator => {
                if *x >= 0 && *x <= 1 {
                    Ball::one(w)
                } else {
                    Ball::zero(w)
                }
            }
        };
        Ok(v.set_prec(bits))
    }

    fn support(&self) -> Support {
        match self {
            OneSidedExp { .. } | JacobiTheta => Support { lo: Some(0.0), hi: None },
            Indicator => Support { lo: Some(0.0), hi: Some(1.0) },
            _ => Support::REAL_LINE,
        }
    }

    fn strip(&self) -> Option<Strip> {
        Some(match *self {
            Gaussian { .. } | Indicator => Strip::REAL_LINE,
            OneSidedExp { delta } => Strip { lo: Some(-1.0 / delta), hi: None },
            Gumbel | JacobiTheta => Strip { lo: Some(0.0), hi: None },
            GumbelNormalized => Strip { lo: Some(-1.0), hi: None },
            Logistic => Strip { lo: Some(0.0), hi: Some(1.0) },
        })
    }

    fn envelope(&self) -> Option<DecayEnvelope> {
        let shrink = |a: f64| a * (1.0 - SLACK);
        let flat = TailForm::new(0.0, 0.0, Shape::Flat);
        Some(match *self {
            Gaussian { gamma } => DecayEnvelope::symmetric(TailForm::new(
                -0.5 * gamma.ln() + SLACK,
                0.0,
                Shape::Gaussian { a: shrink(std::f64::consts::PI / gamma) },
            )),
            OneSidedExp { delta } => DecayEnvelope {
                left: None,
                right: Some(TailForm::new(-delta.ln() + SLACK, 0.0, Shape::Exponential { a: shrink(1.0 / delta) })),
            },
            // e^{−e^{y}} on the left, at most 1 on the right
            Gumbel => DecayEnvelope {
                left: Some(TailForm::new(0.0, 0.0, Shape::DoubleExponential { a: shrink(1.0), b: 1.0 })),
                right: Some(flat),
            },
            GumbelNormalized => DecayEnvelope {
                left: Some(TailForm::new(0.0, 1.0, Shape::DoubleExponential { a: shrink(1.0), b: 1.0 })),
                right: Some(TailForm::new(0.0, 0.0, Shape::Exponential { a: 1.0 })),
            },
            // 1/(1+e^{y}) ≤ e^{−y}
            Logistic => DecayEnvelope {
                left: Some(TailForm::new(0.0, 0.0, Shape::Exponential { a: 1.0 })),
                right: Some(flat),
            },
            JacobiTheta => DecayEnvelope { left: None, right: Some(flat) },
            Indicator => DecayEnvelope { left: None, right: None },
        })
    }

    fn scale(&self) -> f64 {
        match *self {
            Gaussian { gamma } => gamma.sqrt(),
            OneSidedExp { delta } => delta,
            _ => 1.0,
        }
    }
}

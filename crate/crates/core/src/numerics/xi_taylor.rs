use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use rug::{Float, Integer, Rational};

use super::special::{exact_add, xi_real};
use super::PrecisionConfig;
use crate::ball::{digits_to_bits, Ball, RAD_PREC};
use crate::error::{Error, Result};
use crate::scalar::factorial;
use crate::series::PowerSeries;

/// Largest Taylor index served by [`xi_series_at_half`] by default.
pub const DEFAULT_COEFF_CAP: usize = 24;

/// Parameters of the interpolation scheme for the Taylor data of ξ at ½.
///
/// With v = u², g(v) = ξ(½ + √v) = Σ a_{2m} v^m is entire with positive
/// coefficients. It is interpolated at Chebyshev nodes of `[0, window]`; the
/// interpolation tail is bounded by a_{2m} ≤ ξ(½ + R) / R^{2m}, R =
/// `majorant_radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiTaylorConfig {
    pub coeff_cap: usize,
    pub window: f64,
    pub majorant_radius: f64,
}

impl Default for XiTaylorConfig {
    fn default() -> Self {
        XiTaylorConfig { coeff_cap: DEFAULT_COEFF_CAP, window: 4.0, majorant_radius: 30.0 }
    }
}

type CacheKey = (u32, u64, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, Vec<Ball>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Vec<Ball>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Rough log10 of a_{2m}, used only to size the interpolation degree.
fn log10_coeff_guess(m: usize) -> f64 {
    -0.3 - 2.6 * m as f64
}

/// a_0, a_2, ..., a_{2M}: even Taylor coefficients of u ↦ ξ(½ + u).
fn even_coefficients(big_m: usize, prec: &PrecisionConfig, cfg: &XiTaylorConfig) -> Result<Vec<Ball>> {
    let key = (prec.digits, cfg.window.to_bits(), cfg.majorant_radius.to_bits());
    if let Some(hit) = cache().lock().expect("cache poisoned").get(&key) {
        if hit.len() > big_m {
            return Ok(hit[..=big_m].to_vec());
        }
    }
    if !(cfg.window > 0.0 && cfg.majorant_radius * cfg.majorant_radius > 4.0 * cfg.window) {
        return Err(Error::InvalidParameter("majorant radius too small for the window".into()));
    }
    let r = Float::with_val(64, cfg.majorant_radius);
    let xi_r = xi_real(&exact_add(&r, &Float::with_val(64, 0.5)), &prec.with_digits(20))?;
    let log10_xi_r = xi_r.hi().to_f64().log10();

    let per_degree = (cfg.majorant_radius.powi(2) / cfg.window).log10() - 0.77;
    let need = f64::from(prec.digits) - log10_coeff_guess(big_m) + log10_xi_r + 6.0
        + big_m as f64 * (1.0 / cfg.window).log10().max(0.0);
    let mut degree = ((need / per_degree).ceil() as usize).max(big_m + 4);
    let target = prec.rel_tolerance(5);

    for _ in 0..4 {
        if degree + 1 > prec.max_terms {
            break;
        }
        let coeffs = interpolate(big_m, degree, prec, cfg, &xi_r)?;
        let ok = coeffs.iter().all(|c| {
            c.is_positive() && *c.rad() <= Float::with_val(RAD_PREC, &c.mag() * &target)
        });
        if ok {
            cache().lock().expect("cache poisoned").insert(key, coeffs.clone());
            return Ok(coeffs);
        }
        degree += degree / 2;
    }
    Err(Error::PrecisionExhausted(format!(
        "Taylor coefficients of xi up to index {} at {} digits",
        2 * big_m,
        prec.digits
    )))
}

fn interpolate(
    big_m: usize,
    degree: usize,
    prec: &PrecisionConfig,
    cfg: &XiTaylorConfig,
    xi_r: &Ball,
) -> Result<Vec<Ball>> {
    // Conditioning of the monomial basis costs roughly 1.5 digits per degree in ball arithmetic.
    let work_digits = prec.digits + 12 + (1.5 * degree as f64).ceil() as u32;
    let bits = digits_to_bits(work_digits);
    let sample_prec = prec.with_digits(work_digits);

    // Nodes: u_i in double precision, v_i = u_i^2 exactly.
    let us: Vec<Float> = (0..=degree)
        .map(|i| {
            let theta = std::f64::consts::PI * (2 * i + 1) as f64 / (2 * degree + 2) as f64;
            let v = 0.5 * cfg.window * (1.0 - theta.cos());
            Float::with_val(53, v.sqrt())
        })
        .collect();
    let vs: Vec<Ball> = us.iter().map(|u| Ball::exact(Float::with_val(106, u * u))).collect();

    let samples: Vec<Ball> = us
        .par_iter()
        .map(|u| xi_real(&exact_add(u, &Float::with_val(64, 0.5)), &sample_prec))
        .collect::<Result<_>>()?;

    // W(v) = Π (v - v_j), low to high.
    let mut w = vec![Ball::one(bits)];
    for v in &vs {
        let mut next = vec![Ball::zero(bits); w.len() + 1];
        for (k, c) in w.iter().enumerate() {
            next[k + 1] = next[k + 1].add(c);
            next[k] = next[k].sub(&c.mul(v));
        }
        w = next;
    }

    let r2 = Ball::from_f64(cfg.majorant_radius, bits).sqr();
    let mut coeffs = vec![Ball::zero(bits); big_m + 1];
    let mut tail_err = vec![Float::with_val(RAD_PREC, 0); big_m + 1];
    for (vi, gi) in vs.iter().zip(&samples) {
        // Lagrange basis polynomial q_i / q_i(v_i) by synthetic division.
        let mut q = vec![Ball::zero(bits); degree + 1];
        q[degree] = w[degree + 1].clone();
        for k in (1..=degree).rev() {
            q[k - 1] = w[k].add(&vi.mul(&q[k]));
        }
        let mut denom = q[degree].clone();
        for k in (0..degree).rev() {
            denom = denom.mul(vi).add(&q[k]);
        }
        // Interpolation tail at this node: Σ_{m>D} a_{2m} v^m ≤ ξ(½+R) ρ^{D+1}/(1-ρ).
        let rho = vi.div(&r2).expect("R > 0");
        let tail = xi_r
            .mul(&rho.powi(degree as u32 + 1))
            .div(&Ball::one(bits).sub(&rho))
            .ok_or_else(|| Error::PrecisionExhausted("interpolation tail".into()))?
            .hi();
        for m in 0..=big_m {
            let l = q[m].div(&denom).ok_or_else(|| Error::PrecisionExhausted("node spacing".into()))?;
            coeffs[m] = coeffs[m].add(&l.mul(gi));
            let contrib = Float::with_val_round(RAD_PREC, &l.mag() * &tail, rug::float::Round::Up).0;
            tail_err[m] += contrib;
        }
    }
    Ok(coeffs
        .into_iter()
        .zip(tail_err)
        .map(|(c, e)| c.widen(&e).set_prec(prec.work_bits()))
        .collect())
}

/// Taylor data of u ↦ ξ(½+u) in factorial normalization: coefficient k is
/// ξ^{(k)}(½) = k!·a_k. Odd coefficients vanish by the symmetry ξ(s) = ξ(1-s).
pub fn xi_series_at_half(n: usize, prec: &PrecisionConfig) -> Result<PowerSeries> {
    xi_series_at_half_with(n, prec, &XiTaylorConfig::default())
}

pub fn xi_series_at_half_with(
    n: usize,
    prec: &PrecisionConfig,
    cfg: &XiTaylorConfig,
) -> Result<PowerSeries> {
    let prec = prec.validated()?;
    if n > cfg.coeff_cap {
        return Err(Error::InvalidParameter(format!("N = {n} exceeds the coefficient cap {}", cfg.coeff_cap)));
    }
    let even = even_coefficients(n / 2, &prec, cfg)?;
    let coeffs = (0..=n)
        .map(|k| {
            if k % 2 == 1 {
                Ball::zero(prec.work_bits())
            } else {
                even[k / 2].mul(&Ball::from_integer(&factorial(k as u32), prec.work_bits()))
            }
        })
        .collect();
    Ok(PowerSeries::new(coeffs))
}

/// Series of Ξ₁ where Ξ(s) = Ξ₁(-s²): β_m = m!·a_{2m}, all positive.
pub fn xi1_series(n: usize, prec: &PrecisionConfig) -> Result<PowerSeries> {
    xi1_series_with(n, prec, &XiTaylorConfig::default())
}

pub fn xi1_series_with(n: usize, prec: &PrecisionConfig, cfg: &XiTaylorConfig) -> Result<PowerSeries> {
    let prec = prec.validated()?;
    if 2 * n > cfg.coeff_cap {
        return Err(Error::InvalidParameter(format!(
            "Xi_1 order {n} needs index {} beyond the cap {}",
            2 * n,
            cfg.coeff_cap
        )));
    }
    let even = even_coefficients(n, &prec, cfg)?;
    Ok(PowerSeries::new(
        even.iter()
            .enumerate()
            .map(|(m, a)| a.mul(&Ball::from_integer(&factorial(m as u32), prec.work_bits())))
            .collect(),
    ))
}

/// Series of s ↦ Ξ(√s) = Ξ₁(-s): β_m = (-1)^m m!·a_{2m}.
pub fn xi_sqrt_series(n: usize, prec: &PrecisionConfig) -> Result<PowerSeries> {
    let xi1 = xi1_series(n, prec)?;
    Ok(PowerSeries::new(
        xi1.coeffs()
            .iter()
            .enumerate()
            .map(|(m, b)| if m % 2 == 0 { b.clone() } else { b.neg() })
            .collect(),
    ))
}

/// Central finite-difference estimate of ξ^{(k)}(½) with step h on the
/// `prec.fd_stencil`-point symmetric stencil. Not certified; an independent
/// cross-check for the interpolated coefficients.
pub fn central_difference_derivative(k: usize, h: &Float, prec: &PrecisionConfig) -> Result<Float> {
    let prec = prec.validated()?;
    let half_width = (prec.fd_stencil.max(k + 1) / 2).max(k.div_ceil(2)) as i64;
    let nodes: Vec<i64> = (-half_width..=half_width).collect();
    // Weights: k! times the x^k coefficient of each Lagrange basis polynomial.
    let weights: Vec<Rational> = nodes
        .iter()
        .map(|&xi| {
            let mut poly = vec![Rational::from(1)];
            let mut denom = Rational::from(1);
            for &xj in nodes.iter().filter(|&&xj| xj != xi) {
                let mut next = vec![Rational::new(); poly.len() + 1];
                for (d, c) in poly.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= Rational::from(c * xj);
                }
                poly = next;
                denom *= xi - xj;
            }
            Rational::from(&poly[k] / &denom) * Integer::from(Integer::factorial(k as u32))
        })
        .collect();
    let bits = prec.work_bits();
    let mut acc = Float::with_val(bits, 0);
    for (&j, w) in nodes.iter().zip(&weights) {
        if w.cmp0() == std::cmp::Ordering::Equal {
            continue;
        }
        let x = exact_add(&Float::with_val(64, 0.5), &Float::with_val(bits, h * j));
        let f = xi_real(&x, &prec)?;
        acc += Float::with_val(bits, f.mid() * &Float::with_val(bits, w));
    }
    use rug::ops::Pow;
    Ok(Float::with_val(bits, &acc / Float::with_val(bits, h.pow(k as u32))))
}

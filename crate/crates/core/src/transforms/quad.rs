//! Panel quadrature rules at arbitrary precision: tanh-sinh
//! (double-exponential) and Gauss–Legendre, with nodes cached per precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    DoubleExponential,
    GaussLegendrePanels,
}

/// A node of a rule on [-1, 1], stored as its distance `d` from the nearer
/// endpoint (`side` −1 or +1) so that nodes crowding an endpoint keep full
/// relative accuracy.
#[derive(Debug, Clone)]
struct StdNode {
    side: i8,
    d: Float,
    w: Float,
}

type NodeCache = Mutex<HashMap<(Scheme, u32, u32), Arc<Vec<StdNode>>>>;

fn cache() -> &'static NodeCache {
    static CACHE: OnceLock<NodeCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn std_nodes(scheme: Scheme, level: u32, bits: u32) -> Arc<Vec<StdNode>> {
    let key = (scheme, level, bits);
    if let Some(v) = cache().lock().unwrap().get(&key) {
        return v.clone();
    }
    let nodes = Arc::new(match scheme {
        Scheme::DoubleExponential => tanh_sinh_nodes(level, bits),
        Scheme::GaussLegendrePanels => legendre_nodes(gl_points(level), bits),
    });
    cache().lock().unwrap().insert(key, nodes.clone());
    nodes
}

/// Gauss–Legendre points per panel at a refinement level.
pub fn gl_points(level: u32) -> usize {
    8usize << level.min(8)
}

/// t_k = k h, h = 2^{-level}; x = tanh(π/2 sinh t), w = h (π/2) cosh t / cosh²(π/2 sinh t).
/// Truncated where the weight falls below 2^{-bits}.
fn tanh_sinh_nodes(level: u32, bits: u32) -> Vec<StdNode> {
    let p = bits + 32;
    let t_max = ((bits as f64 * std::f64::consts::LN_2 + 8.0) / std::f64::consts::PI).asinh();
    let k_max = (t_max * (1u64 << level) as f64).ceil() as i64;
    let half_pi = Float::with_val(p, Constant::Pi) / 2u32;
    let mut out = Vec::with_capacity(2 * k_max as usize + 1);
    for k in -k_max..=k_max {
        let t = Float::with_val(p, k) >> level;
        let u = Float::with_val(p, t.sinh_ref()) * &half_pi;
        let cu = Float::with_val(p, u.cosh_ref());
        let w = (Float::with_val(p, t.cosh_ref()) * &half_pi / Float::with_val(p, cu.square_ref())) >> level;
        // 1 − tanh|u| = 2e^{−2|u|} / (1 + e^{−2|u|})
        let e = Float::with_val(p, Float::with_val(p, u.abs_ref()) * -2i32).exp();
        let d = Float::with_val(p, &e * 2u32) / (Float::with_val(p, 1) + &e);
        if d.is_zero() || w.is_zero() {
            continue;
        }
        let side = if k < 0 { -1 } else { 1 };
        out.push(StdNode { side, d, w });
    }
    out
}

/// Legendre roots by Newton iteration from the asymptotic guesses.
fn legendre_nodes(n: usize, bits: u32) -> Vec<StdNode> {
    let p = bits + 32;
    let tol = Float::with_val(p, Float::i_exp(1, -(p as i32) + 8));
    let legendre = |x: &Float| {
        // (P_n(x), P_n'(x))
        let mut p0 = Float::with_val(p, 1);
        let mut p1 = x.clone();
        for k in 2..=n {
            let k = k as u32;
            let p2 = (Float::with_val(p, x * &p1) * (2 * k - 1) - Float::with_val(p, &p0 * (k - 1))) / k;
            p0 = p1;
            p1 = p2;
        }
        let one_minus = Float::with_val(p, 1) - Float::with_val(p, x.square_ref());
        let dp = (Float::with_val(p, &p0 - Float::with_val(p, x * &p1)) * n as u32) / one_minus;
        (p1, dp)
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(p, guess);
        for _ in 0..100 {
            let (v, dv) = legendre(&x);
            let step = Float::with_val(p, &v / &dv);
            x -= &step;
            if step.abs() < tol {
                break;
            }
        }
        let (_, dv) = legendre(&x);
        let w = Float::with_val(p, 2) / (Float::with_val(p, 1) - Float::with_val(p, x.square_ref())) / dv.square();
        let side: i8 = if x < 0 { -1 } else { 1 };
        let d = Float::with_val(p, 1) - Float::with_val(p, x.abs_ref());
        out.push(StdNode { side, d, w });
    }
    out
}

/// Nodes and weights of a rule mapped to [a, b].
pub fn panel_rule(scheme: Scheme, level: u32, a: &Float, b: &Float, bits: u32) -> Vec<(Float, Float)> {
    let p = bits + 32;
    let half = Float::with_val(p, b - a) / 2u32;
    std_nodes(scheme, level, bits)
        .iter()
        .map(|n| {
            let off = Float::with_val(p, &half * &n.d);
            let x = if n.side < 0 { Float::with_val(p + 32, a + &off) } else { Float::with_val(p + 32, b - &off) };
            (x, Float::with_val(p, &half * &n.w))
        })
        .collect()
}

/// Σ w_i f(x_i) in ball arithmetic, summed in node order. The weights are
/// correctly rounded to `bits + 32`, so a relative 2^{-bits} of Σ|w f| is
/// added for them and for the cut-off tails of the rule.
pub fn apply_rule<F>(f: &F, nodes: &[(Float, Float)], bits: u32) -> Result<Ball>
where
    F: Fn(&Float) -> Result<Ball> + Sync,
{
    let vals: Vec<Result<Ball>> = nodes.par_iter().map(|(x, _)| f(x)).collect();
    let mut sum = Ball::zero(bits);
    let mut abs_sum = Float::with_val(64, 0);
    for ((_, w), v) in nodes.iter().zip(vals) {
        let t = v?.mul(&Ball::exact(w.clone()));
        abs_sum += t.mag();
        sum = sum.add(&t);
    }
    let slack = abs_sum * Float::with_val(64, Float::i_exp(1, -(bits as i32) + 4));
    Ok(sum.set_prec(bits).widen(&slack))
}

/// Enclosures of ∫_a^b f for levels 1, 2, …: the rule at level L widened
/// by its distance to level L − 1, intersected with the previous enclosure
/// so that the radius never grows with refinement. Stops early once the
/// radius is at most `target` (from level `MIN_LEVEL` on).
pub fn panel_enclosures<F>(
    f: &F,
    a: &Float,
    b: &Float,
    scheme: Scheme,
    max_level: u32,
    target: Option<&Float>,
    bits: u32,
) -> Result<Vec<Ball>>
where
    F: Fn(&Float) -> Result<Ball> + Sync,
{
    let mut prev: Option<Ball> = None;
    let mut out: Vec<Ball> = Vec::new();
    for level in 0..=max_level {
        let s = apply_rule(f, &panel_rule(scheme, level, a, b, bits), bits)?;
        if let Some(p) = &prev {
            let enc = s.widen(&Float::with_val(64, s.mid() - p.mid()).abs());
            let enc = match out.last() {
                Some(last) => enc.intersect(last).unwrap_or(enc),
                None => enc,
            };
            let done = level >= MIN_LEVEL && target.is_some_and(|t| *enc.rad() <= *t);
            out.push(enc);
            if done {
                break;
            }
        }
        prev = Some(s);
    }
    Ok(out)
}

const MIN_LEVEL: u32 = 2;

/// ∫_a^b f to absolute radius `target`, refining up to `max_level`.
pub fn integrate_panel<F>(
    f: &F,
    a: &Float,
    b: &Float,
    scheme: Scheme,
    max_level: u32,
    target: &Float,
    bits: u32,
) -> Result<Ball>
where
    F: Fn(&Float) -> Result<Ball> + Sync,
{
    let encs = panel_enclosures(f, a, b, scheme, max_level, Some(target), bits)?;
    let last = encs.last().cloned().ok_or_else(|| Error::InvalidParameter("level must be at least 1".into()))?;
    if *last.rad() <= *target {
        Ok(last)
    } else {
        Err(Error::TargetUnreachable {
            target: target.to_string_radix(10, Some(6)),
            best: last.rad().to_string_radix(10, Some(6)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> Float {
        Float::with_val(64, x)
    }

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let nodes = panel_rule(Scheme::GaussLegendrePanels, 0, &f(0.0), &f(2.0), 128);
        assert_eq!(nodes.len(), 8);
        // ∫_0^2 x^15 dx = 2^16/16
        let s = apply_rule(&|x: &Float| Ok(Ball::exact(x.clone()).powi(15)), &nodes, 128).unwrap();
        assert!(s.contains_f64(4096.0));
    }

    #[test]
    fn tanh_sinh_handles_endpoint_behaviour() {
        // ∫_0^1 √x dx = 2/3
        let target = Float::with_val(64, 1e-30);
        let v = integrate_panel(
            &|x: &Float| Ok(Ball::exact(x.clone()).sqrt().unwrap()),
            &f(0.0),
            &f(1.0),
            Scheme::DoubleExponential,
            10,
            &target,
            160,
        )
        .unwrap();
        let want = Ball::from_i64(2, 160).div_i64(3);
        assert!(v.overlaps(&want));
        assert!(v.rad().to_f64() < 1e-29);
    }

    #[test]
    fn refinement_never_widens() {
        let g = |x: &Float| Ok(Ball::exact(x.clone()).mul_i64(3).cos());
        for scheme in [Scheme::DoubleExponential, Scheme::GaussLegendrePanels] {
            let encs = panel_enclosures(&g, &f(-1.0), &f(2.0), scheme, 6, None, 160).unwrap();
            assert_eq!(encs.len(), 6);
            for w in encs.windows(2) {
                assert!(w[1].rad() <= w[0].rad());
            }
            // sin(6)/3 + sin(3)/3
            let want = (6f64.sin() + 3f64.sin()) / 3.0;
            assert!((encs[5].to_f64() - want).abs() < 1e-14);
            assert!(encs[5].rad().to_f64() < 1e-20);
        }
    }

    #[test]
    fn unreachable_target_is_reported() {
        let g = |x: &Float| Ok(Ball::exact(x.clone()).exp());
        let t = Float::with_val(64, 1e-300);
        let r = integrate_panel(&g, &f(0.0), &f(1.0), Scheme::DoubleExponential, 3, &t, 128);
        assert!(matches!(r, Err(Error::TargetUnreachable { .. })));
    }
}

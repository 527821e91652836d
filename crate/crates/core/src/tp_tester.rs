//! Total-positivity batteries: det(Λ(x_j − y_k)) over increasing grids, and
//! the Bochner Gram test for 1/ξ(½ + τ).
//!
//! Finite testing can refute total positivity but never prove it. A
//! violation is reported only when a determinant is certified negative; an
//! enclosure straddling zero is recomputed once at doubled precision.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::function::EvaluableFunction;
use crate::linalg::{det_ball, det_exact, ldl_positive_definite, min_eigenvalue, Matrix};
use crate::numerics::{special::exact_sub, xi_real, PrecisionConfig};
use crate::verdict::Verdict;

/// Largest supported order.
pub const ORDER_CAP: usize = 6;

/// Grid points are rounded to this lattice so that differences are exact
/// and repeated differences hit evaluation caches.
const LATTICE: f64 = 65536.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Grid {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let g = Grid { xs, ys };
        g.validate()?;
        Ok(g)
    }

    /// Builds a grid from unordered points; the determinant only depends on
    /// the sorted grid.
    pub fn sorted(mut xs: Vec<f64>, mut ys: Vec<f64>) -> Result<Self> {
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        Grid::new(xs, ys)
    }

    pub fn order(&self) -> usize {
        self.xs.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.xs.len();
        if n == 0 || n > ORDER_CAP || self.ys.len() != n {
            return Err(Error::InvalidParameter(format!(
                "grid needs 1..={ORDER_CAP} points on each axis, got {} and {}",
                n,
                self.ys.len()
            )));
        }
        let increasing = |v: &[f64]| v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.xs) || !increasing(&self.ys) {
            return Err(Error::InvalidParameter("grid coordinates must be finite and strictly increasing".into()));
        }
        Ok(())
    }
}

/// det(Λ(x_j − y_k)). Exact entries give an exact determinant; otherwise
/// interval elimination with full pivoting.
pub fn tp_det<F: EvaluableFunction + ?Sized>(f: &F, g: &Grid, prec: &PrecisionConfig) -> Result<Ball> {
    g.validate()?;
    det_at_bits(f, g, prec.validated()?.work_bits())
}

fn det_at_bits<F: EvaluableFunction + ?Sized>(f: &F, g: &Grid, bits: u32) -> Result<Ball> {
    let n = g.order();
    let mut entries = Vec::with_capacity(n * n);
    for x in &g.xs {
        for y in &g.ys {
            let d = exact_sub(&Float::with_val(53, *x), &Float::with_val(53, *y));
            entries.push(f.eval(&d, bits)?);
        }
    }
    let m = Matrix::from_fn(n, |i, j| entries[i * n + j].clone());
    if let Some(exact) = m.rows().into_iter().flatten().map(|b| b.mid().to_rational().filter(|_| b.is_exact())).collect::<Option<Vec<_>>>() {
        let q = Matrix::from_fn(n, |i, j| exact[i * n + j].clone());
        return Ok(Ball::from_rational(&det_exact(&q), bits));
    }
    Ok(det_ball(&m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridStrategy {
    UniformWindow,
    Clustered,
    AdversarialSupportEdges,
}

impl std::str::FromStr for GridStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-window" | "uniform" => Ok(GridStrategy::UniformWindow),
            "clustered" => Ok(GridStrategy::Clustered),
            "adversarial-support-edges" | "edges" => Ok(GridStrategy::AdversarialSupportEdges),
            _ => Err(Error::InvalidParameter(format!("unknown grid strategy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderReport {
    pub n: usize,
    pub trials: usize,
    /// The determinant with the smallest upper end.
    pub min_det: Option<BallRecord>,
    pub worst_grid: Option<Grid>,
    /// Enclosures still containing zero after precision escalation.
    pub straddling: usize,
    /// Trials whose evaluation failed (recorded, not raised).
    pub failed: usize,
}

/// Ball as decimal strings, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub center: String,
    pub radius: String,
}

impl From<&Ball> for BallRecord {
    fn from(b: &Ball) -> Self {
        BallRecord { center: b.mid_string(), radius: b.rad_string() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TPReport {
    pub function: String,
    pub strategy: GridStrategy,
    pub seed: u64,
    pub orders: Vec<OrderReport>,
    pub verdict: TpVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TpVerdict {
    NoCertifiedViolation,
    CertifiedViolation,
    Undecided,
}

impl TpVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            TpVerdict::NoCertifiedViolation => 0,
            TpVerdict::CertifiedViolation => 1,
            TpVerdict::Undecided => 2,
        }
    }
}

/// Window (centre, half-width) of differences x − y worth probing.
fn window<F: EvaluableFunction + ?Sized>(f: &F) -> (f64, f64) {
    let s = f.scale();
    let sup = f.support();
    match (sup.lo, sup.hi) {
        (Some(a), Some(b)) => ((a + b) / 2.0, (b - a).max(s)),
        (Some(a), None) => (a + 1.5 * s, 2.5 * s),
        (None, Some(b)) => (b - 1.5 * s, 2.5 * s),
        (None, None) => (0.0, 2.5 * s),
    }
}

fn quantize(v: f64) -> f64 {
    (v * LATTICE).round() / LATTICE
}

fn increasing(rng: &mut ChaCha8Rng, n: usize, mut draw: impl FnMut(&mut ChaCha8Rng) -> f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| quantize(draw(rng))).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[0] < w[1]) {
            return v;
        }
    }
}

/// Random grid of order n. The stream is fixed by (seed, n, trial), so the
/// battery does not depend on scheduling.
pub fn random_grid<F: EvaluableFunction + ?Sized>(
    f: &F,
    n: usize,
    seed: u64,
    trial: usize,
    strategy: GridStrategy,
) -> Grid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 40) | trial as u64);
    let (c, w) = window(f);
    let half = w / 2.0;
    let (xs, ys) = match strategy {
        GridStrategy::UniformWindow => {
            let ys = increasing(&mut rng, n, |r| r.gen_range(-half..half));
            let xs = increasing(&mut rng, n, |r| c + r.gen_range(-half..half));
            (xs, ys)
        }
        GridStrategy::Clustered => {
            let step = w * rng.gen_range(0.01..0.2);
            let bx = c + rng.gen_range(-half..half);
            let by = rng.gen_range(-half..half);
            let xs = increasing(&mut rng, n, |r| bx + step * r.gen_range(0.0..n as f64));
            let ys = increasing(&mut rng, n, |r| by + step * r.gen_range(0.0..n as f64));
            (xs, ys)
        }
        GridStrategy::AdversarialSupportEdges => {
            let sup = f.support();
            let mut edges: Vec<f64> = [sup.lo, sup.hi].into_iter().flatten().collect();
            if edges.is_empty() {
                edges = vec![c - w, c + w];
            }
            let jitter = 0.15 * f.scale().min(w);
            let ys = increasing(&mut rng, n, |r| r.gen_range(-half..half));
            let ys_c = ys.clone();
            let xs = increasing(&mut rng, n, |r| {
                let e = edges[r.gen_range(0..edges.len())];
                ys_c[r.gen_range(0..n)] + e + r.gen_range(-jitter..jitter)
            });
            (xs, ys)
        }
    };
    Grid { xs, ys }
}

enum Outcome {
    Det(Ball),
    Failed,
}

/// Runs `trials` random grids for every order up to `max_order`.
pub fn tp_battery<F: EvaluableFunction + ?Sized>(
    f: &F,
    max_order: usize,
    trials: usize,
    seed: u64,
    strategy: GridStrategy,
    prec: &PrecisionConfig,
) -> Result<TPReport> {
    tp_battery_inflated(f, max_order, trials, seed, strategy, prec, None)
}

/// As [`tp_battery`], with every entry widened by `inflate` (an extra error
/// budget for numerically computed functions).
pub fn tp_battery_inflated<F: EvaluableFunction + ?Sized>(
    f: &F,
    max_order: usize,
    trials: usize,
    seed: u64,
    strategy: GridStrategy,
    prec: &PrecisionConfig,
    inflate: Option<f64>,
) -> Result<TPReport> {
    if max_order == 0 || max_order > ORDER_CAP {
        return Err(Error::InvalidParameter(format!("max_order must be in 1..={ORDER_CAP}")));
    }
    let prec = prec.validated()?;
    let bits = prec.work_bits();
    let widened = Inflated { inner: f, by: inflate.map(|v| Float::with_val(64, v)) };
    let mut orders = Vec::with_capacity(max_order);
    let mut any_violation = false;
    let mut any_failed = false;
    for n in 1..=max_order {
        let grids: Vec<Grid> = (0..trials).map(|t| random_grid(f, n, seed, t, strategy)).collect();
        let outcomes: Vec<Outcome> = grids
            .par_iter()
            .map(|g| {
                let first = det_at_bits(&widened, g, bits);
                let escalated = match first {
                    Ok(d) if d.contains_zero() && !d.is_exact_zero() => det_at_bits(&widened, g, 2 * bits).or(Ok(d)),
                    other => other,
                };
                match escalated {
                    Ok(d) => Outcome::Det(d),
                    Err(_) => Outcome::Failed,
                }
            })
            .collect();
        let mut worst: Option<(Ball, usize)> = None;
        let (mut straddling, mut failed) = (0, 0);
        for (i, o) in outcomes.iter().enumerate() {
            match o {
                Outcome::Failed => failed += 1,
                Outcome::Det(d) => {
                    if d.contains_zero() && !d.is_exact_zero() {
                        straddling += 1;
                    }
                    if worst.as_ref().is_none_or(|(w, _)| d.hi() < w.hi()) {
                        worst = Some((d.clone(), i));
                    }
                }
            }
        }
        if worst.as_ref().is_some_and(|(w, _)| w.hi() < 0) {
            any_violation = true;
        }
        any_failed |= failed > 0;
        orders.push(OrderReport {
            n,
            trials,
            min_det: worst.as_ref().map(|(d, _)| BallRecord::from(d)),
            worst_grid: worst.map(|(_, i)| grids[i].clone()),
            straddling,
            failed,
        });
    }
    let verdict = if any_violation {
        TpVerdict::CertifiedViolation
    } else if any_failed {
        TpVerdict::Undecided
    } else {
        TpVerdict::NoCertifiedViolation
    };
    Ok(TPReport { function: f.name(), strategy, seed, orders, verdict })
}

struct Inflated<'a, F: ?Sized> {
    inner: &'a F,
    by: Option<Float>,
}

impl<F: EvaluableFunction + ?Sized> EvaluableFunction for Inflated<'_, F> {
    fn name(&self) -> String {
        self.inner.name()
    }
    fn eval(&self, x: &Float, bits: u32) -> Result<Ball> {
        let v = self.inner.eval(x, bits)?;
        Ok(match &self.by {
            Some(r) => v.widen(r),
            None => v,
        })
    }
}

/// G_{jk} = 1/ξ(½ + τ_j − τ_k), symmetric by ξ(s) = ξ(1 − s).
pub fn bochner_matrix(taus: &[f64], prec: &PrecisionConfig) -> Result<Matrix<Ball>> {
    let prec = prec.validated()?;
    let n = taus.len();
    if n == 0 {
        return Err(Error::InvalidParameter("no tau values".into()));
    }
    let mut sorted = taus.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("tau values must be finite and distinct".into()));
    }
    let half = Float::with_val(53, 0.5);
    let mut upper = vec![Ball::zero(prec.work_bits()); n * n];
    for j in 0..n {
        for k in j..n {
            let d = exact_sub(&Float::with_val(53, taus[j]), &Float::with_val(53, taus[k]));
            let sigma = crate::numerics::special::exact_add(&half, &d);
            let v = xi_real(&sigma, &prec)?
                .recip()
                .ok_or_else(|| Error::PrecisionExhausted("1/xi in Gram matrix".into()))?;
            upper[j * n + k] = v.clone();
            upper[k * n + j] = v;
        }
    }
    Ok(Matrix::from_fn(n, |j, k| upper[j * n + k].clone()))
}

#[derive(Debug, Clone, Serialize)]
pub struct BochnerResult {
    pub taus: Vec<f64>,
    pub verdict: Verdict,
    pub min_eigenvalue: BallRecord,
}

/// Positive-definiteness verdict and smallest-eigenvalue enclosure of the
/// Gram matrix of 1/ξ(½ + ·) at `taus`.
pub fn bochner_gram(taus: &[f64], prec: &PrecisionConfig) -> Result<BochnerResult> {
    let g = bochner_matrix(taus, prec)?;
    let lam = min_eigenvalue(&g);
    let verdict = match ldl_positive_definite(&g) {
        Verdict::Holds => Verdict::Holds,
        _ if lam.is_negative() => Verdict::Violated,
        _ if lam.is_positive() => Verdict::Holds,
        _ => Verdict::Undecided,
    };
    Ok(BochnerResult { taus: taus.to_vec(), verdict, min_eigenvalue: BallRecord::from(&lam) })
}

#[derive(Debug, Clone, Serialize)]
pub struct BochnerReport {
    pub seed: u64,
    pub max_n: usize,
    pub range: f64,
    pub trials: Vec<BochnerResult>,
    pub verdict: Verdict,
}

/// Seeded random τ-sets of size 1..=max_n in [−range, range].
pub fn bochner_battery(max_n: usize, range: f64, trials: usize, seed: u64, prec: &PrecisionConfig) -> Result<BochnerReport> {
    if max_n == 0 || max_n > ORDER_CAP {
        return Err(Error::InvalidParameter(format!("n must be in 1..={ORDER_CAP}")));
    }
    if !(range > 0.0 && range.is_finite()) {
        return Err(Error::InvalidParameter("range must be positive".into()));
    }
    let sets: Vec<Vec<f64>> = (0..trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let n = rng.gen_range(1..=max_n);
            increasing(&mut rng, n, |r| r.gen_range(-range..range))
        })
        .collect();
    let results = sets.par_iter().map(|taus| bochner_gram(taus, prec)).collect::<Result<Vec<_>>>()?;
    let verdict = if results.iter().any(|r| r.verdict == Verdict::Violated) {
        Verdict::Violated
    } else {
        Verdict::all(results.iter().map(|r| r.verdict))
    };
    Ok(BochnerReport { seed, max_n, range, trials: results, verdict })
}

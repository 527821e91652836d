//! Moment sequences of Pólya frequency functions and the constructive route
//! from moments to the reciprocal Laplace transform Ψ and its Jensen
//! polynomials.

use rayon::prelude::*;
use rug::{Float, Rational};
use serde::Serialize;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::function::{EvaluableFunction, Tilted};
use crate::lp_class::{apply_series_operator, series_reciprocal};
use crate::numerics::PrecisionConfig;
use crate::pff_catalog::CatalogEntry;
use crate::polyzero::{real_root_count, Polynomial, RootCount, RootCounting};
use crate::scalar::{factorial, Scalar};
use crate::series::PowerSeries;
use crate::transforms::{integrate_weighted, QuadratureConfig};
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentSource {
    ClosedForm,
    Quadrature,
}

/// μ_0, ..., μ_N with μ_n = ∫ x^n Λ(x) dx.
#[derive(Debug, Clone, Serialize)]
pub struct MomentSequence {
    mu: Vec<Ball>,
    #[serde(skip)]
    exact: Option<Vec<Rational>>,
    source: MomentSource,
}

impl MomentSequence {
    pub fn new(mu: Vec<Ball>, source: MomentSource) -> Result<Self> {
        if !mu.first().is_some_and(Ball::is_positive) {
            return Err(Error::Precondition("mu_0 must be certified positive".into()));
        }
        Ok(MomentSequence { mu, exact: None, source })
    }

    /// Exact rational moments; the balls are derived at `prec` bits.
    pub fn from_exact(mu: Vec<Rational>, prec: u32) -> Result<Self> {
        let balls = mu.iter().map(|q| Ball::from_rational(q, prec)).collect();
        let mut ms = MomentSequence::new(balls, MomentSource::ClosedForm)?;
        ms.exact = Some(mu);
        Ok(ms)
    }

    pub fn mu(&self) -> &[Ball] {
        &self.mu
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn source(&self) -> MomentSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }
}

/// μ_0..μ_n of f: the closed form when f has one, else certified quadrature
/// of x^j f(x) to target·j!, i.e. every Taylor coefficient μ_j/j! of F to
/// the quadrature target. Moments grow factorially, so absolute targets
/// would become unreachable at fixed precision.
pub fn compute_moments<F: EvaluableFunction + ?Sized>(
    f: &F,
    n: usize,
    qc: &QuadratureConfig,
    prec: &PrecisionConfig,
) -> Result<MomentSequence> {
    let prec = prec.validated()?;
    if let Some(ms) = f.closed_form_moments(n, prec.bits()) {
        return Ok(ms);
    }
    if f.envelope().is_none() && (f.support().lo.is_none() || f.support().hi.is_none()) {
        return Err(Error::EnvelopeMissing(f.name()));
    }
    let zero = Float::new(prec.bits());
    if let Some(strip) = f.strip() {
        strip.check(&zero)?;
    }
    let qc = qc.validated()?;
    let base = qc.target(&prec);
    let mu = (0..=n)
        .into_par_iter()
        .map(|j| {
            let t = Float::with_val(64, &base * factorial(j as u32));
            let qj = QuadratureConfig { target_abs_err: Some(t.to_f64()), ..qc };
            integrate_weighted(f, &zero, j as u32, &qj, &prec)
        })
        .collect::<Result<Vec<_>>>()?;
    MomentSequence::new(mu, MomentSource::Quadrature)
}

/// F(s) = ∫ Λ(x) e^{-sx} dx = Σ (-1)^j μ_j s^j / j!.
pub fn f_series(ms: &MomentSequence) -> PowerSeries {
    PowerSeries::new(alternate(ms.mu()))
}

/// [`f_series`] over the rationals, for exact moments.
pub fn f_series_exact(ms: &MomentSequence) -> Option<PowerSeries<Rational>> {
    ms.exact().map(|mu| PowerSeries::new(alternate(mu)))
}

fn alternate<T: Scalar>(mu: &[T]) -> Vec<T> {
    mu.iter().enumerate().map(|(j, m)| if j % 2 == 1 { m.neg() } else { m.clone() }).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct JensenEntry {
    pub n: usize,
    /// Real zeros of q_n = Ψ(D) x^n, counted with multiplicity.
    pub real_roots: RootCount,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub subject: String,
    /// Exponential tilt c; the series is that of Ψ(s + c).
    pub tilt: f64,
    pub moment_source: MomentSource,
    pub moments: Vec<Ball>,
    pub psi_series: PowerSeries,
    pub jensen: Vec<JensenEntry>,
    pub verdict: Verdict,
}

/// Real-rootedness of q_n = Ψ(D) x^n for n = 1..=n_max.
pub fn jensen_report<T: RootCounting>(psi: &PowerSeries<T>, n_max: usize) -> Result<Vec<JensenEntry>> {
    if n_max >= psi.len() {
        return Err(Error::Length(format!("degree {n_max} needs {} coefficients", n_max + 1)));
    }
    Ok((1..=n_max)
        .map(|n| {
            let q = apply_series_operator(psi, &Polynomial::monomial(psi.coeffs()[0].one_like(), n));
            let c = real_root_count(&q);
            let verdict = if c.lo == n {
                Verdict::Holds
            } else if c.hi < n {
                Verdict::Violated
            } else {
                Verdict::Undecided
            };
            JensenEntry { n, real_roots: c, verdict }
        })
        .collect())
}

/// Moments → F series → Ψ = 1/F → Jensen hyperbolicity of q_n, n ≤ n_max.
/// `n_moments` defaults to 2·n_max + 4. Exact moments keep every stage exact.
pub fn schoenberg_pipeline<F: EvaluableFunction + ?Sized>(
    f: &F,
    n_moments: Option<usize>,
    n_max: usize,
    qc: &QuadratureConfig,
    prec: &PrecisionConfig,
) -> Result<PipelineReport> {
    let n = n_moments.unwrap_or(2 * n_max + 4);
    if n < n_max {
        return Err(Error::Precondition(format!("need at least {n_max} moments, got {n}")));
    }
    let prec = prec.validated()?;
    let ms = compute_moments(f, n, qc, &prec)?;
    let (psi_series, jensen) = match f_series_exact(&ms) {
        Some(fs) => {
            let psi = series_reciprocal(&fs)?;
            let rep = jensen_report(&psi, n_max)?;
            (psi.to_ball(prec.bits()), rep)
        }
        None => {
            let psi = series_reciprocal(&f_series(&ms))?;
            let rep = jensen_report(&psi, n_max)?;
            (psi, rep)
        }
    };
    let verdict = Verdict::all(jensen.iter().map(|e| e.verdict));
    Ok(PipelineReport {
        subject: f.name(),
        tilt: 0.0,
        moment_source: ms.source(),
        moments: ms.mu().to_vec(),
        psi_series,
        jensen,
        verdict,
    })
}

/// The pipeline for a catalog entry, tilted by its moment tilt when the
/// moments of the entry itself do not exist.
pub fn catalog_pipeline(
    entry: CatalogEntry,
    n_moments: Option<usize>,
    n_max: usize,
    qc: &QuadratureConfig,
    prec: &PrecisionConfig,
) -> Result<PipelineReport> {
    let c = entry.moment_tilt();
    if c == 0.0 {
        return schoenberg_pipeline(&entry, n_moments, n_max, qc, prec);
    }
    let mut rep = schoenberg_pipeline(&Tilted { inner: entry, c }, n_moments, n_max, qc, prec)?;
    rep.tilt = c;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;
    use crate::lp_class::lp_series;
    use crate::numerics::real;

    fn p() -> PrecisionConfig {
        PrecisionConfig::new(40).unwrap()
    }

    #[test]
    fn closed_form_moments() {
        let qc = QuadratureConfig::default();
        let e = compute_moments(&CatalogEntry::OneSidedExp { delta: 1.0 }, 6, &qc, &p()).unwrap();
        assert_eq!(e.exact().unwrap()[5], 120);
        let g = compute_moments(&CatalogEntry::Gaussian { gamma: 1.0 }, 4, &qc, &p()).unwrap();
        assert!(g.mu()[1].is_exact_zero());
        let want = Ball::one(200).div(&Ball::pi(200).mul_2exp(1)).unwrap();
        assert!(g.mu()[2].overlaps(&want));
    }

    #[test]
    fn quadrature_agrees_with_closed_form() {
        let qc = QuadratureConfig::default();
        // e^{-cx} e^{-x} = e^{-(1+c)x} has μ_j = j!/(1+c)^{j+1}; the tilt
        // hides the closed form and forces quadrature
        let c = 0.25;
        let t = Tilted { inner: CatalogEntry::OneSidedExp { delta: 1.0 }, c };
        let ms = compute_moments(&t, 5, &qc, &p()).unwrap();
        assert_eq!(ms.source(), MomentSource::Quadrature);
        for (j, m) in ms.mu().iter().enumerate() {
            let want = Ball::from_rational(&(Rational::from(crate::scalar::factorial(j as u32)) / Rational::from((5, 4)).pow(j as u32 + 1)), 200);
            assert!(m.overlaps(&want), "mu_{j}");
            assert!(m.rad().to_f64() < 1e-25);
        }
    }

    #[test]
    fn f_series_examples() {
        let e = CatalogEntry::OneSidedExp { delta: 1.0 }.moments_closed_form(5, 128).unwrap();
        let fs = f_series_exact(&e).unwrap();
        assert_eq!(fs.coeffs()[3], -6);
        let one = MomentSequence::from_exact(vec![Rational::from(1), Rational::new(), Rational::new()], 64).unwrap();
        let fs = f_series(&one);
        assert!(fs.coeffs()[0].contains_f64(1.0) && fs.coeffs()[2].is_exact_zero());
    }

    #[test]
    fn pipeline_one_sided() {
        let r = schoenberg_pipeline(&CatalogEntry::OneSidedExp { delta: 1.0 }, None, 6, &QuadratureConfig::default(), &p()).unwrap();
        assert!(r.psi_series.coeffs()[0].contains_f64(1.0) && r.psi_series.coeffs()[1].contains_f64(1.0));
        assert!(r.psi_series.coeffs()[2..].iter().all(Ball::is_exact_zero));
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn pipeline_gaussian_matches_factorization() {
        let prec = p();
        let r = schoenberg_pipeline(&CatalogEntry::Gaussian { gamma: 1.0 }, None, 5, &QuadratureConfig::default(), &prec).unwrap();
        let g = CatalogEntry::Gaussian { gamma: 1.0 };
        let fac = g.factorization(0, prec.bits()).unwrap().unwrap().to_lp().unwrap();
        let other = lp_series(&fac, r.psi_series.len() - 1, &prec).unwrap();
        for (a, b) in r.psi_series.coeffs().iter().zip(other.coeffs()) {
            assert!(a.overlaps(b));
        }
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn pipeline_gumbel_normalized_gives_euler_gamma() {
        let prec = PrecisionConfig::new(30).unwrap();
        let r = catalog_pipeline(CatalogEntry::GumbelNormalized, Some(8), 3, &QuadratureConfig::default(), &prec).unwrap();
        assert_eq!(r.moment_source, MomentSource::Quadrature);
        let b1 = &r.psi_series.coeffs()[1];
        assert!(b1.overlaps(&Ball::euler(128)), "{}", b1.mid_string());
        assert!(b1.rad().to_f64() < 1e-15);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn f_series_matches_laplace() {
        let prec = p();
        let qc = QuadratureConfig::default();
        let g = CatalogEntry::Gaussian { gamma: 1.0 };
        let fs = f_series(&compute_moments(&g, 30, &qc, &prec).unwrap());
        let s = real(0.1);
        let direct = crate::transforms::bilateral_laplace(&g, &s, &qc, &prec).unwrap().value;
        // truncation of e^{s²/4π} after 30 terms is far below the radii
        let approx = fs.eval(&Ball::exact(s));
        assert!((approx.to_f64() - direct.to_f64()).abs() < 1e-25);
    }
}

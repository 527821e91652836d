use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::linalg::{det_ball, det_exact, ldl_positive_definite, min_eigenvalue, Matrix};
use crate::polyzero::{has_only_nonpositive_real_zeros, Polynomial};
use crate::scalar::{binomial, factorial, Scalar};
use crate::series::PowerSeries;
use crate::verdict::Verdict;

/// Coefficients γ_j of 1/Ψ from the coefficients β_j of Ψ.
pub fn series_reciprocal<T: Scalar>(ps: &PowerSeries<T>) -> Result<PowerSeries<T>> {
    ps.reciprocal()
}

/// Jensen polynomials p_n(x) = Σ β_j C(n,j) x^j and their reversals
/// q_n(x) = Σ β_j C(n,j) x^{n-j}.
pub fn jensen<T: Scalar>(ps: &PowerSeries<T>, n: usize) -> Result<(Polynomial<T>, Polynomial<T>)> {
    if n >= ps.len() {
        return Err(Error::Length(format!("Jensen polynomial of degree {n} needs {} coefficients", n + 1)));
    }
    let c: Vec<T> = (0..=n)
        .map(|j| ps.coeffs()[j].mul_int(&binomial(n as u32, j as u32)))
        .collect();
    let reversed = c.iter().rev().cloned().collect();
    Ok((Polynomial::new(c), Polynomial::new(reversed)))
}

/// Δ_n = β_n² - β_{n-1}β_{n+1} for 1 ≤ n ≤ N-1.
pub fn turan_deltas<T: Scalar>(ps: &PowerSeries<T>) -> Result<Vec<T>> {
    if ps.len() < 3 {
        return Err(Error::Length("Turan deltas need at least three coefficients".into()));
    }
    let b = ps.coeffs();
    Ok((1..b.len() - 1).map(|n| b[n].mul(&b[n]).sub(&b[n - 1].mul(&b[n + 1]))).collect())
}

/// The n×n Hankel matrix (γ_{j+k}) of a reciprocal series, with γ_j taken
/// as the stored coefficients.
pub fn hankel_matrix<T: Scalar>(recip: &PowerSeries<T>, n: usize) -> Result<Matrix<T>> {
    if n == 0 || 2 * n - 1 > recip.len() {
        return Err(Error::Length(format!(
            "{n}x{n} Hankel matrix needs {} coefficients, have {}",
            2 * n - 1,
            recip.len()
        )));
    }
    Ok(Matrix::from_fn(n, |j, k| recip.coeffs()[j + k].clone()))
}

#[derive(Debug, Clone, Serialize)]
pub struct HankelReport {
    pub n: usize,
    pub verdict: Verdict,
    pub min_eigenvalue: Ball,
    /// Leading principal minors, when computed exactly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_minors: Option<Vec<String>>,
}

/// Positive definiteness of the Hankel matrix of the reciprocal series.
/// Exact coefficients are decided by Sylvester's criterion; ball
/// coefficients by an interval LDLᵀ factorization, with the eigenvalue
/// enclosure as a second opinion.
pub fn hankel_psd<T: Scalar>(recip: &PowerSeries<T>, n: usize) -> Result<HankelReport> {
    let m = hankel_matrix(recip, n)?;
    let prec = recip.coeffs()[0].ball_prec();
    let mb = m.to_ball(prec);
    let min_eig = min_eigenvalue(&mb);
    let exact: Option<Vec<Rational>> = recip.coeffs().iter().map(Scalar::to_exact).collect();
    if let Some(g) = exact {
        let em = Matrix::from_fn(n, |j, k| g[j + k].clone());
        let minors: Vec<Rational> = (1..=n)
            .map(|k| det_exact(&em.minor(&(0..k).collect::<Vec<_>>(), &(0..k).collect::<Vec<_>>())))
            .collect();
        let verdict = if minors.iter().all(|d| d.cmp0() == std::cmp::Ordering::Greater) {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        return Ok(HankelReport {
            n,
            verdict,
            min_eigenvalue: min_eig,
            exact_minors: Some(minors.iter().map(|d| d.to_string()).collect()),
        });
    }
    let mut verdict = ldl_positive_definite(&mb);
    if verdict == Verdict::Undecided {
        if min_eig.is_positive() {
            verdict = Verdict::Holds;
        } else if min_eig.is_negative() {
            verdict = Verdict::Violated;
        }
    }
    Ok(HankelReport { n, verdict, min_eigenvalue: min_eig, exact_minors: None })
}

/// q(x) = Σ β_j c_j x^j for p(x) = Σ c_j x^j. When p is exact, its zeros are
/// checked to be real and non-positive first.
pub fn multiplier_apply<T: Scalar>(ps: &PowerSeries<T>, p: &Polynomial<T>) -> Result<Polynomial<T>> {
    if let Some(exact) = p.to_exact() {
        if !exact.is_zero() && !has_only_nonpositive_real_zeros(&exact) {
            return Err(Error::Precondition("polynomial must have only real non-positive zeros".into()));
        }
    }
    if p.coeffs().len() > ps.len() {
        return Err(Error::Length(format!(
            "degree {} polynomial needs {} series coefficients",
            p.coeffs().len() - 1,
            p.coeffs().len()
        )));
    }
    Ok(Polynomial::new(p.coeffs().iter().zip(ps.coeffs()).map(|(c, b)| c.mul(b)).collect()))
}

/// F(D)p = Σ_j (β_j / j!) p^{(j)} for F(s) = Σ β_j s^j / j!. Terms beyond the
/// series length are dropped (they vanish once j > deg p).
pub fn apply_series_operator<T: Scalar>(ps: &PowerSeries<T>, p: &Polynomial<T>) -> Polynomial<T> {
    let Some(deg) = p.degree() else { return Polynomial::zero() };
    let mut out = Polynomial::zero();
    for (j, beta) in ps.coeffs().iter().enumerate().take(deg + 1) {
        if beta.is_exact_zero() {
            continue;
        }
        let c = beta.div(&beta.integer_like(&factorial(j as u32))).expect("factorial is nonzero");
        out = out.add(&p.derivative_n(j).scale(&c));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct MinorRecord {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: Ball,
}

#[derive(Debug, Clone, Serialize)]
pub struct PfSequenceReport {
    pub verdict: Verdict,
    pub evaluated: usize,
    pub exhaustive: bool,
    pub exact: bool,
    /// Smallest minor (by centre); ties resolved by the canonical order.
    pub worst: Option<MinorRecord>,
    /// First minor certified negative, if any.
    pub violation: Option<MinorRecord>,
}

/// Exhaustive enumeration is used while the number of index pairs per order
/// stays below this; beyond it minors are sampled.
const EXHAUSTIVE_LIMIT: usize = 20_000;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { break };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

fn choose(n: usize, k: usize) -> usize {
    binomial(n as u32, k as u32).to_usize().unwrap_or(usize::MAX)
}

/// Minors of order ≤ `max_order` of the Toeplitz matrix A_{jk} = a_{k-j}
/// (zero for k < j) over the window of indices covered by `a`.
pub fn pf_sequence_minors<T: Scalar>(
    a: &[T],
    max_order: usize,
    trials: usize,
    seed: u64,
) -> Result<PfSequenceReport> {
    if max_order == 0 || max_order > 6 {
        return Err(Error::InvalidParameter("max_order must be between 1 and 6".into()));
    }
    let w = a.len();
    if w < max_order {
        return Err(Error::WindowTooSmall(format!("{w} terms cannot carry minors of order {max_order}")));
    }
    let exact: Option<Vec<Rational>> = a.iter().map(Scalar::to_exact).collect();
    let prec = a[0].ball_prec();
    let entry = |j: usize, k: usize| if k >= j { Some(k - j) } else { None };

    let mut tasks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut exhaustive = true;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in 1..=max_order {
        let count = choose(w, r);
        if count.saturating_mul(count) <= EXHAUSTIVE_LIMIT {
            let combos = combinations(w, r);
            for rows in &combos {
                for cols in &combos {
                    tasks.push((rows.clone(), cols.clone()));
                }
            }
        } else {
            exhaustive = false;
            for _ in 0..trials {
                let mut rows = sample(&mut rng, w, r).into_vec();
                let mut cols = sample(&mut rng, w, r).into_vec();
                rows.sort_unstable();
                cols.sort_unstable();
                tasks.push((rows, cols));
            }
        }
    }

    let records: Vec<MinorRecord> = tasks
        .into_par_iter()
        .map(|(rows, cols)| {
            let value = match &exact {
                Some(e) => {
                    let m = Matrix::from_fn(rows.len(), |i, j| {
                        entry(rows[i], cols[j]).map_or_else(Rational::new, |d| e[d].clone())
                    });
                    Ball::from_rational(&det_exact(&m), prec)
                }
                None => {
                    let m = Matrix::from_fn(rows.len(), |i, j| {
                        entry(rows[i], cols[j]).map_or_else(|| Ball::zero(prec), |d| a[d].to_ball(prec))
                    });
                    det_ball(&m)
                }
            };
            MinorRecord { rows, cols, value }
        })
        .collect();

    let verdict = Verdict::all(records.iter().map(|r| Verdict::nonnegative(r.value.sign())));
    let violation = records.iter().find(|r| r.value.is_negative()).cloned();
    let worst = records
        .iter()
        .fold(None::<&MinorRecord>, |best, r| match best {
            Some(b) if *b.value.mid() <= *r.value.mid() => Some(b),
            _ => Some(r),
        })
        .cloned();
    Ok(PfSequenceReport {
        verdict,
        evaluated: records.len(),
        exhaustive,
        exact: exact.is_some(),
        worst,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyzero::real_root_count;
    use crate::series::exp_series;
    use proptest::prelude::*;
    use rug::Integer;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn qs(v: &[i64]) -> PowerSeries<Rational> {
        PowerSeries::new(v.iter().map(|&x| q(x)).collect())
    }

    fn poly(v: &[i64]) -> Polynomial<Rational> {
        Polynomial::from_i64(v)
    }

    #[test]
    fn jensen_examples() {
        let ones = exp_series(&q(1), 4);
        let (p3, _) = jensen(&ones, 3).unwrap();
        assert_eq!(p3, poly(&[1, 3, 3, 1]));
        let ps = qs(&[2, 5, 7]);
        let (p1, q1) = jensen(&ps, 1).unwrap();
        assert_eq!(p1, poly(&[2, 5]));
        assert_eq!(q1, poly(&[5, 2]));
    }

    #[test]
    fn turan_examples() {
        let d = turan_deltas(&qs(&[1, 1, 0, 0, 0])).unwrap();
        assert_eq!(d, vec![q(1), q(0), q(0)]);
        assert!(turan_deltas(&qs(&[1, 1])).is_err());
    }

    #[test]
    fn hankel_of_one_plus_s() {
        let recip = series_reciprocal(&qs(&[1, 1, 0, 0])).unwrap();
        let m = hankel_matrix(&recip, 2).unwrap();
        assert_eq!(m.rows(), vec![vec![q(1), q(-1)], vec![q(-1), q(2)]]);
        let r = hankel_psd(&recip, 2).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.exact_minors.unwrap(), vec!["1", "1"]);
        assert!(hankel_psd(&recip, 3).is_err());
    }

    #[test]
    fn multiplier_examples() {
        let mask = qs(&[1, 1, 0, 0]);
        let r = multiplier_apply(&mask, &poly(&[0, 1, 1])).unwrap();
        assert_eq!(r, poly(&[0, 1]));
        assert_eq!(real_root_count(&r).lo, 1);
        assert!(matches!(multiplier_apply(&mask, &poly(&[-1, 1])), Err(Error::Precondition(_))));
        // x^{n-1}(1+x)^2 under the Ψ = 1 + s mask keeps only real zeros
        let p = poly(&[0, 0, 1]).mul(&poly(&[1, 2, 1]));
        let r = multiplier_apply(&exp_series(&q(1), 5), &p).unwrap();
        assert_eq!(r, p);
    }

    #[test]
    fn operator_examples() {
        let e = exp_series(&q(1), 5);
        assert_eq!(apply_series_operator(&e, &poly(&[0, 0, 1])), poly(&[1, 2, 1]));
        assert_eq!(apply_series_operator(&qs(&[1, 0, 0]), &poly(&[3, 1, 4])), poly(&[3, 1, 4]));
        let psi = qs(&[1, 1, 0, 0]);
        let shifted = apply_series_operator(&psi, &poly(&[0, 1]));
        assert_eq!(shifted, poly(&[1, 1]));
        let back = apply_series_operator(&psi.reciprocal().unwrap(), &shifted);
        assert_eq!(back, poly(&[0, 1]));
    }

    #[test]
    fn pf_sequence_examples() {
        let r = pf_sequence_minors(&[q(1), q(1), q(0), q(0), q(0), q(0)], 3, 0, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.exhaustive);
        let r = pf_sequence_minors(&[q(1), q(0), q(1), q(0), q(1), q(0)], 2, 0, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        let v = r.violation.unwrap();
        assert!(v.value.contains_f64(-1.0));
        let inv_fact: Vec<Rational> = (0..8).map(|n| Rational::from((Integer::from(1), factorial(n)))).collect();
        let r = pf_sequence_minors(&inv_fact, 3, 0, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(matches!(pf_sequence_minors(&[q(1)], 2, 0, 1), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn sampled_minors_are_deterministic() {
        let a: Vec<Rational> = (0..14).map(|n| Rational::from((Integer::from(1), factorial(n)))).collect();
        let r1 = pf_sequence_minors(&a, 5, 50, 7).unwrap();
        let r2 = pf_sequence_minors(&a, 5, 50, 7).unwrap();
        assert!(!r1.exhaustive);
        assert_eq!(r1.evaluated, r2.evaluated);
        let w1 = r1.worst.unwrap();
        let w2 = r2.worst.unwrap();
        assert_eq!((w1.rows, w1.cols), (w2.rows, w2.cols));
    }

    proptest! {
        #[test]
        fn jensen_of_exp_is_binomial(n in 0usize..=12) {
            let (p, _) = jensen(&exp_series(&q(1), 13), n).unwrap();
            let mut expect = poly(&[1]);
            for _ in 0..n {
                expect = expect.mul(&poly(&[1, 1]));
            }
            prop_assert_eq!(p, expect);
        }

        #[test]
        fn exp_multiplier_is_identity(c in prop::collection::vec(-9i64..10, 1..8)) {
            // restrict to polynomials with real non-positive zeros: Π (x + r_i)
            let mut p = poly(&[1]);
            for r in c.iter().map(|r| r.abs()) {
                p = p.mul(&poly(&[r, 1]));
            }
            prop_assert_eq!(multiplier_apply(&exp_series(&q(1), 10), &p).unwrap(), p);
        }

        #[test]
        fn operator_inverse_roundtrip(c in prop::collection::vec(-9i64..10, 1..9), b in prop::collection::vec(-5i64..6, 9)) {
            let mut coeffs: Vec<Rational> = b.into_iter().map(q).collect();
            coeffs[0] = q(2);
            let ps = PowerSeries::new(coeffs);
            let p = poly(&c);
            let there = apply_series_operator(&ps.reciprocal().unwrap(), &p);
            prop_assert_eq!(apply_series_operator(&ps, &there), p);
        }
    }
}

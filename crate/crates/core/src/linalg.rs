//! Small dense square matrices over exact rationals or balls: determinants,
//! positive-definiteness certificates and eigenvalue enclosures.

use std::cmp::Ordering;

use rug::float::Round;
use rug::{Float, Rational};

use crate::ball::{Ball, RAD_PREC};
use crate::scalar::Scalar;
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T: Scalar> {
    n: usize,
    a: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let a = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Matrix { n, a }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix { n, a: rows.into_iter().flatten().collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.a[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: T) {
        self.a[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.a.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Submatrix on the given row and column index sets.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Self {
        assert_eq!(rows.len(), cols.len());
        Matrix::from_fn(rows.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn to_ball(&self, prec: u32) -> Matrix<Ball> {
        Matrix { n: self.n, a: self.a.iter().map(|x| x.to_ball(prec)).collect() }
    }
}

/// Exact determinant by Gaussian elimination.
pub fn det_exact(m: &Matrix<Rational>) -> Rational {
    let n = m.n;
    let mut a = m.clone();
    let mut det = Rational::from(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a.get(i, k).cmp0() != Ordering::Equal) else {
            return Rational::new();
        };
        if p != k {
            for j in 0..n {
                a.a.swap(p * n + j, k * n + j);
            }
            det = -det;
        }
        let pivot = a.get(k, k).clone();
        det *= &pivot;
        for i in k + 1..n {
            let f = Rational::from(a.get(i, k) / &pivot);
            if f.cmp0() == Ordering::Equal {
                continue;
            }
            for j in k..n {
                let v = a.get(i, j) - Rational::from(&f * a.get(k, j));
                a.set(i, j, v);
            }
        }
    }
    det
}

/// Hadamard bound Π_i ||row_i||₂ on |det|, rounded up.
fn hadamard_bound(m: &Matrix<Ball>) -> Float {
    let mut bound = Float::with_val(RAD_PREC, 1);
    for r in m.a.chunks(m.n) {
        let mut s = Float::with_val(RAD_PREC, 0);
        for x in r {
            let mag = x.mag();
            s = Float::with_val_round(RAD_PREC, &s + Float::with_val_round(RAD_PREC, mag.square_ref(), Round::Up).0, Round::Up).0;
        }
        let norm = Float::with_val_round(RAD_PREC, s.sqrt_ref(), Round::Up).0;
        bound = Float::with_val_round(RAD_PREC, &bound * &norm, Round::Up).0;
    }
    bound
}

/// Enclosure of the determinant: Gaussian elimination with full pivoting on
/// the entry of largest lower magnitude. When no certified nonzero pivot is
/// left, the remaining block is bounded by Hadamard's inequality.
pub fn det_ball(m: &Matrix<Ball>) -> Ball {
    let n = m.n;
    let prec = m.a.first().map_or(64, Ball::prec);
    let mut a = m.clone();
    let mut det = Ball::one(prec);
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    for k in 0..n {
        // choose pivot by mignitude
        let mut best: Option<(usize, usize, Float)> = None;
        for (ri, &i) in rows.iter().enumerate().skip(k) {
            for (ci, &j) in cols.iter().enumerate().skip(k) {
                let mig = a.get(i, j).mig();
                if mig > 0 && best.as_ref().is_none_or(|b| mig > b.2) {
                    best = Some((ri, ci, mig));
                }
            }
        }
        let Some((ri, ci, _)) = best else {
            let rest = a.minor(&rows[k..], &cols[k..]);
            if rest.a.iter().all(Ball::is_exact_zero) {
                return Ball::zero(prec);
            }
            let h = hadamard_bound(&rest);
            return det.mul(&Ball::with_rad(Float::with_val(prec, 0), &h));
        };
        if ri != k {
            rows.swap(ri, k);
            det = det.neg();
        }
        if ci != k {
            cols.swap(ci, k);
            det = det.neg();
        }
        let (pi, pj) = (rows[k], cols[k]);
        let pivot = a.get(pi, pj).clone();
        det = det.mul(&pivot);
        for &i in &rows[k + 1..] {
            let f = a.get(i, pj).div(&pivot).expect("certified pivot");
            for &j in &cols[k..] {
                let v = a.get(i, j).sub(&f.mul(a.get(pi, j)));
                a.set(i, j, v);
            }
        }
    }
    det
}

/// LDLᵀ positive-definiteness test for a symmetric ball matrix. A pivot
/// certified ≤ 0 after certified-positive predecessors refutes definiteness.
pub fn ldl_positive_definite(m: &Matrix<Ball>) -> Verdict {
    let n = m.n;
    let mut a = m.clone();
    for k in 0..n {
        let d = a.get(k, k).clone();
        match d.sign() {
            Some(Ordering::Greater) => {}
            Some(_) => return Verdict::Violated,
            None => return Verdict::Undecided,
        }
        for i in k + 1..n {
            let l = a.get(i, k).div(&d).expect("positive pivot");
            for j in k + 1..=i {
                let v = a.get(i, j).sub(&l.mul(a.get(k, j)));
                a.set(i, j, v.clone());
                a.set(j, i, v);
            }
        }
    }
    Verdict::Holds
}

/// Cyclic Jacobi on the midpoint matrix: (smallest eigenvalue, eigenvector).
fn jacobi_min_eigenpair(m: &Matrix<Ball>, prec: u32) -> (Float, Vec<Float>) {
    let n = m.n;
    let mut a: Vec<Float> = m.a.iter().map(|x| Float::with_val(prec, x.mid())).collect();
    let mut v: Vec<Float> = (0..n * n).map(|k| Float::with_val(prec, u32::from(k / n == k % n))).collect();
    let tol = Float::with_val(prec, Float::with_val(prec, 1) >> (prec as i32 - 8));
    for _sweep in 0..60 {
        let mut off = Float::with_val(prec, 0);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += Float::with_val(prec, a[i * n + j].square_ref());
                }
            }
        }
        let mut scale = Float::with_val(prec, 0);
        for i in 0..n {
            scale += Float::with_val(prec, a[i * n + i].square_ref());
        }
        if off <= Float::with_val(prec, &scale * &tol) * &tol || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q].clone();
                if apq.is_zero() {
                    continue;
                }
                let theta = Float::with_val(prec, &a[q * n + q] - &a[p * n + p]) / Float::with_val(prec, &apq * 2u32);
                let sign = if theta.is_sign_negative() { -1 } else { 1 };
                let root = (Float::with_val(prec, theta.square_ref()) + 1u32).sqrt();
                let t = Float::with_val(prec, sign) / (Float::with_val(prec, theta.abs_ref()) + root);
                let c = Float::with_val(prec, 1) / (Float::with_val(prec, t.square_ref()) + 1u32).sqrt();
                let s = Float::with_val(prec, &t * &c);
                for k in 0..n {
                    let akp = a[k * n + p].clone();
                    let akq = a[k * n + q].clone();
                    a[k * n + p] = Float::with_val(prec, &c * &akp) - Float::with_val(prec, &s * &akq);
                    a[k * n + q] = Float::with_val(prec, &s * &akp) + Float::with_val(prec, &c * &akq);
                }
                for k in 0..n {
                    let apk = a[p * n + k].clone();
                    let aqk = a[q * n + k].clone();
                    a[p * n + k] = Float::with_val(prec, &c * &apk) - Float::with_val(prec, &s * &aqk);
                    a[q * n + k] = Float::with_val(prec, &s * &apk) + Float::with_val(prec, &c * &aqk);
                }
                for k in 0..n {
                    let vkp = v[k * n + p].clone();
                    let vkq = v[k * n + q].clone();
                    v[k * n + p] = Float::with_val(prec, &c * &vkp) - Float::with_val(prec, &s * &vkq);
                    v[k * n + q] = Float::with_val(prec, &s * &vkp) + Float::with_val(prec, &c * &vkq);
                }
            }
        }
    }
    let imin = (0..n).min_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap()).unwrap();
    let vec = (0..n).map(|k| v[k * n + imin].clone()).collect();
    (a[imin * n + imin].clone(), vec)
}

/// Gershgorin lower bound on the smallest eigenvalue.
fn gershgorin_lower(m: &Matrix<Ball>) -> Float {
    let n = m.n;
    let mut best: Option<Float> = None;
    for i in 0..n {
        let mut r = m.get(i, i).lo();
        for j in (0..n).filter(|&j| j != i) {
            r = Float::with_val_round(r.prec(), &r - &m.get(i, j).mag(), Round::Down).0;
        }
        if best.as_ref().is_none_or(|b| r < *b) {
            best = Some(r);
        }
    }
    best.unwrap_or_else(|| Float::with_val(RAD_PREC, 0))
}

/// Enclosure of the smallest eigenvalue of a symmetric ball matrix: the
/// upper end is a Rayleigh quotient, the lower end is certified by an LDLᵀ
/// factorization of A - λI (Gershgorin as fallback).
pub fn min_eigenvalue(m: &Matrix<Ball>) -> Ball {
    let n = m.n;
    let prec = m.a.first().map_or(64, Ball::prec);
    if n == 0 {
        return Ball::zero(prec);
    }
    let (lam, vec) = jacobi_min_eigenpair(m, prec);
    let vb: Vec<Ball> = vec.iter().map(|x| Ball::exact(x.clone())).collect();
    let mut num = Ball::zero(prec);
    let mut den = Ball::zero(prec);
    for i in 0..n {
        den = den.add(&vb[i].sqr());
        for j in 0..n {
            num = num.add(&vb[i].mul(m.get(i, j)).mul(&vb[j]));
        }
    }
    let upper = num.div(&den).map_or_else(|| m.get(0, 0).hi(), |q| q.hi());

    let shifted_pd = |shift: &Float| {
        let s = Ball::exact(shift.clone());
        let a = Matrix::from_fn(n, |i, j| if i == j { m.get(i, j).sub(&s) } else { m.get(i, j).clone() });
        ldl_positive_definite(&a) == Verdict::Holds
    };
    let scale = {
        let mut s = lam.clone().abs();
        for x in &m.a {
            let r = x.rad().clone();
            if r > s {
                s = Float::with_val(prec, r);
            }
        }
        if s.is_zero() {
            Float::with_val(prec, 1)
        } else {
            s
        }
    };
    let mut lower = gershgorin_lower(m);
    let mut delta = Float::with_val(prec, &scale >> (prec as i32 / 2));
    for _ in 0..12 {
        let trial = Float::with_val_round(prec, &lam - &delta, Round::Down).0;
        if trial <= lower {
            break;
        }
        let radius_dominated = m.a.iter().any(|x| *x.rad() > delta);
        if !radius_dominated && shifted_pd(&trial) {
            lower = trial;
            break;
        }
        delta *= 1024u32;
    }
    if lower > upper {
        lower = upper.clone();
    }
    Ball::from_endpoints(&lower, &upper, prec)
}

//! Preconditioned conjugate gradient for a symmetric positive definite
//! operator given as a closure.

use crate::error::{Error, Result};
use crate::par;

pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Max-norm of b − Ax, recomputed from scratch at exit.
    pub residual: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Solves Ax = b to `tol` in the max-norm of the true residual, with the
/// diagonal preconditioner `diag`.
pub fn solve<A>(apply: A, b: &[f64], diag: &[f64], tol: f64, max_iter: usize) -> Result<CgOutcome>
where
    A: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let mut x = vec![0.0; n];
    if max_abs(b) <= tol {
        return Ok(CgOutcome { x, iterations: 0, residual: max_abs(b) });
    }
    let true_residual = |x: &[f64]| -> Vec<f64> {
        let ax = apply(x);
        b.iter().zip(&ax).map(|(b, a)| b - a).collect()
    };
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = par::dot(&r, &z);
    let mut best = max_abs(&r);
    for it in 1..=max_iter {
        let ap = apply(&p);
        let pap = par::dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Numerical(format!("operator not positive definite (pAp = {pap:e})")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rmax = max_abs(&r);
        if rmax <= 0.5 * tol {
            // confirm against the true residual; restart from it otherwise
            r = true_residual(&x);
            let t = max_abs(&r);
            best = best.min(t);
            if t <= tol {
                return Ok(CgOutcome { x, iterations: it, residual: t });
            }
            z = r.iter().zip(diag).map(|(r, d)| r / d).collect();
            p = z.clone();
            rz = par::dot(&r, &z);
            continue;
        }
        best = best.min(rmax);
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = par::dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: best })
}

//! Dense matrix exponential (Padé 13 with scaling and squaring), applied
//! block by block over the connected components of a sparse generator.

use nalgebra::DMatrix;

use super::sparse::{components, SparseOperator};
use crate::error::{Error, Result};
use crate::par;

const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn norm1(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn expm_dense(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let nrm = norm1(a);
    if !nrm.is_finite() {
        return Err(Error::Numerical("non-finite matrix in exponential".into()));
    }
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a / 2f64.powi(s);
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &B13;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or_else(|| Error::Numerical("singular Padé denominator".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// e^{A} for sparse A, computed per connected component.
pub fn expm(a: &SparseOperator) -> Result<SparseOperator> {
    let comps = components(a.dim(), &[a]);
    let blocks = par::map(&comps, |idx| {
        if idx.len() == 1 {
            let v = a.get(idx[0], idx[0]).exp();
            return Ok((idx.clone(), DMatrix::from_element(1, 1, v)));
        }
        expm_dense(&a.dense_block(idx)).map(|e| (idx.clone(), e))
    });
    let blocks: Vec<_> = blocks.into_iter().collect::<Result<_>>()?;
    Ok(SparseOperator::from_blocks(a.dim(), &blocks))
}

/// Smallest eigenvalue of a symmetric operator, per component.
pub fn min_eigenvalue(a: &SparseOperator) -> f64 {
    eigen_extremes(a).0
}

/// (min, max) eigenvalues of a symmetric operator.
pub fn eigen_extremes(a: &SparseOperator) -> (f64, f64) {
    let comps = components(a.dim(), &[a]);
    let ext = par::map(&comps, |idx| {
        if idx.len() == 1 {
            let v = a.get(idx[0], idx[0]);
            return (v, v);
        }
        let d = a.dense_block(idx);
        let sym = (&d + d.transpose()) * 0.5;
        let ev = sym.symmetric_eigenvalues();
        (ev.min(), ev.max())
    });
    ext.into_iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
}

//! Lattice convolution y_p = Σ_q K(|p−q|²) x_q over a ball of lattice points,
//! either by direct summation or by zero-padded 3D FFT.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::lattice::{norm2_idx, Idx};
use crate::par;

/// Point count above which [`Convolver::auto`] switches to the FFT path.
pub const FFT_SEAM: usize = 3000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Direct,
    Fft,
}

/// Radial kernel tabulated by squared index distance.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub by_norm2: Vec<f64>,
}

impl Kernel {
    pub fn tabulate(max_norm2: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> Self {
        Kernel { by_norm2: par::map_range(max_norm2 + 1, f) }
    }

    #[inline]
    pub fn at(&self, d: Idx) -> f64 {
        self.by_norm2[norm2_idx(d) as usize]
    }
}

struct FftGrid {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex64>,
    slots: Vec<usize>,
}

pub struct Convolver {
    points: Vec<Idx>,
    kernel: Kernel,
    method: Method,
    fft: Option<FftGrid>,
}

/// Smallest 5-smooth integer >= n.
fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for f in [2, 3, 5] {
            while r % f == 0 {
                r /= f;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

impl Convolver {
    /// `kernel` must cover squared distances up to 3·(2M)², M the max |index|.
    pub fn new(points: Vec<Idx>, kernel: Kernel, method: Method) -> Self {
        let fft = match method {
            Method::Direct => None,
            Method::Fft => Some(FftGrid::build(&points, &kernel)),
        };
        Convolver { points, kernel, method, fft }
    }

    pub fn auto(points: Vec<Idx>, kernel: Kernel) -> Self {
        let m = if points.len() > FFT_SEAM { Method::Fft } else { Method::Direct };
        Self::new(points, kernel, m)
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn points(&self) -> &[Idx] {
        &self.points
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.points.len());
        match &self.fft {
            None => self.apply_direct(x),
            Some(g) => g.apply(x),
        }
    }

    pub fn apply_direct(&self, x: &[f64]) -> Vec<f64> {
        let pts = &self.points;
        par::map_range(pts.len(), |i| {
            let p = pts[i];
            par::neumaier(pts.iter().zip(x).map(|(&q, &xq)| {
                self.kernel.at([p[0] - q[0], p[1] - q[1], p[2] - q[2]]) * xq
            }))
        })
    }
}

/// Maximal absolute index component.
pub fn index_radius(points: &[Idx]) -> usize {
    points.iter().flat_map(|p| p.iter()).map(|v| v.unsigned_abs() as usize).max().unwrap_or(0)
}

impl FftGrid {
    fn build(points: &[Idx], kernel: &Kernel) -> Self {
        let m = index_radius(points) as i64;
        let n = smooth_size((4 * m + 1) as usize);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let wrap = |v: i64| ((v % n as i64 + n as i64) % n as i64) as usize;
        let flat = |a: i64, b: i64, c: i64| (wrap(a) * n + wrap(b)) * n + wrap(c);
        let mut k = vec![Complex64::new(0.0, 0.0); n * n * n];
        for a in -2 * m..=2 * m {
            for b in -2 * m..=2 * m {
                for c in -2 * m..=2 * m {
                    let d2 = (a * a + b * b + c * c) as usize;
                    k[flat(a, b, c)] = Complex64::new(kernel.by_norm2[d2], 0.0);
                }
            }
        }
        fft3(&mut k, n, &forward);
        let slots = points
            .iter()
            .map(|p| flat(p[0] as i64, p[1] as i64, p[2] as i64))
            .collect();
        FftGrid { n, forward, inverse, kernel_hat: k, slots }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![Complex64::new(0.0, 0.0); n * n * n];
        for (&s, &v) in self.slots.iter().zip(x) {
            g[s] = Complex64::new(v, 0.0);
        }
        fft3(&mut g, n, &self.forward);
        let kh = &self.kernel_hat;
        par::for_each_chunk(&mut g, n * n, |i, plane| {
            let off = i * n * n;
            for (j, z) in plane.iter_mut().enumerate() {
                *z *= kh[off + j];
            }
        });
        fft3(&mut g, n, &self.inverse);
        let scale = 1.0 / (n * n * n) as f64;
        self.slots.iter().map(|&s| g[s].re * scale).collect()
    }
}

/// In-place 3D transform of an n×n×n row-major array: transform the
/// contiguous axis, rotate axes, three times.
fn fft3(data: &mut Vec<Complex64>, n: usize, fft: &Arc<dyn Fft<f64>>) {
    let mut tmp = vec![Complex64::new(0.0, 0.0); data.len()];
    for _ in 0..3 {
        par::for_each_chunk(data, n * n, |_, plane| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(plane, &mut scratch);
        });
        // (i, j, k) -> (k, i, j)
        let src: &Vec<Complex64> = data;
        par::for_each_chunk(&mut tmp, n * n, |k, plane| {
            for i in 0..n {
                for j in 0..n {
                    plane[i * n + j] = src[(i * n + j) * n + k];
                }
            }
        });
        std::mem::swap(data, &mut tmp);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice;

    #[test]
    fn fft_matches_direct() {
        let pts = lattice::ball(lattice::TWO_PI * 3.2);
        let m = index_radius(&pts);
        let kern = Kernel::tabulate(12 * m * m, |d2| 1.0 / (1.0 + d2 as f64).powf(1.3));
        let x: Vec<f64> = (0..pts.len()).map(|i| ((i * 7919 % 101) as f64 - 50.0) / 50.0).collect();
        let d = Convolver::new(pts.clone(), kern.clone(), Method::Direct).apply(&x);
        let f = Convolver::new(pts, kern, Method::Fft).apply(&x);
        let err = d.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "err {err}");
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size(7), 8);
        assert_eq!(smooth_size(81), 81);
        assert_eq!(smooth_size(83), 90);
    }
}

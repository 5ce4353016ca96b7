//! Lattice scattering equation
//!
//!   p²φ_p + ½ Σ_{q≠0} V̂_N(p−q) φ_q = −½ V̂_N(p),   φ_0 = 0,
//!
//! its box scattering length a_N, and the full-space oracle for a.

pub mod cg;
pub mod conv;
pub mod potential;

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{self, Idx, TWO_PI};
use crate::par;
use crate::regime::RegimeParams;
use crate::stats;

pub use conv::{Convolver, Kernel, Method};
pub use potential::{full_space_scattering_length, ode_scattering_length, Potential};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 2000;

/// Estimate of the contribution of |p| > cap to Σ V̂(p/L)φ_p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    /// max |p²φ_p| over cap/2 <= |p| <= cap, used as C in |φ_p| <= C/p².
    pub c_tail: f64,
    /// Bound on Σ_{|p|>cap} |V̂(p/L) φ_p|; infinite when V̂ has no known envelope.
    pub sum_bound: f64,
    /// sum_bound / 8π, the induced uncertainty of a_N.
    pub a_bound: f64,
}

#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    pub params: RegimeParams,
    pub cap: f64,
    /// Nonzero lattice points with |p| <= cap, lexicographic.
    pub points: Vec<Idx>,
    pub phi: Vec<f64>,
    pub a_n: f64,
    /// N^{1−κ} Σ V̂_N(p) φ_p.
    pub correction: f64,
    pub residual: f64,
    pub iterations: usize,
    pub method: Method,
    pub tail: TailBound,
    index: HashMap<Idx, usize>,
}

impl ScatteringSolution {
    /// φ_p, zero at the origin and beyond the cap.
    pub fn phi_at(&self, p: Idx) -> f64 {
        self.index.get(&p).map_or(0.0, |&i| self.phi[i])
    }

    pub fn a_interval(&self) -> (f64, f64) {
        (self.a_n - self.tail.a_bound, self.a_n + self.tail.a_bound)
    }

    /// CSV with columns px,py,pz,phi (momenta, not indices).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("px,py,pz,phi\n");
        for (p, v) in self.points.iter().zip(&self.phi) {
            s.push_str(&format!(
                "{:?},{:?},{:?},{:?}\n",
                TWO_PI * p[0] as f64,
                TWO_PI * p[1] as f64,
                TWO_PI * p[2] as f64,
                v
            ));
        }
        s
    }
}

/// Kernel table V̂_N(2π√m) for squared index distances m <= 3·(2M)².
pub fn rescaled_kernel(potential: &Potential, params: &RegimeParams, index_radius: usize) -> Kernel {
    let m = 2 * index_radius;
    Kernel::tabulate(3 * m * m, |d2| potential.rescaled_fourier(params, TWO_PI * (d2 as f64).sqrt()))
}

/// Lattice points 0 < |p| <= cap.
pub fn lattice_points(cap: f64) -> Vec<Idx> {
    lattice::annulus(0.0, cap)
}

pub fn convolver(potential: &Potential, params: &RegimeParams, points: Vec<Idx>, method: Option<Method>) -> Convolver {
    let kern = rescaled_kernel(potential, params, conv::index_radius(&points));
    match method {
        Some(m) => Convolver::new(points, kern, m),
        None => Convolver::auto(points, kern),
    }
}

/// V̂_N(p) = N^{−1+κ}·V̂(p/N^{1−κ}).
pub fn rescaled_fourier(potential: &Potential, params: &RegimeParams, p: Idx) -> f64 {
    potential.rescaled_fourier(params, lattice::p_abs(p))
}

pub fn solve_box_scattering(potential: &Potential, params: &RegimeParams, cap: f64, tol: f64) -> Result<ScatteringSolution> {
    solve_box_scattering_with(potential, params, cap, tol, None)
}

pub fn solve_box_scattering_with(
    potential: &Potential,
    params: &RegimeParams,
    cap: f64,
    tol: f64,
    method: Option<Method>,
) -> Result<ScatteringSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if !potential.is_zero() && cap < params.l {
        return Err(Error::InvalidParameter(format!("cap {cap} below the support scale N^(1-kappa) = {}", params.l)));
    }
    let points = lattice_points(cap);
    if points.is_empty() {
        return Err(Error::InvalidParameter(format!("cap {cap} contains no lattice point")));
    }
    let conv = convolver(potential, params, points.clone(), method);
    let kern = conv.kernel();
    let p2: Vec<f64> = points.iter().map(|&p| lattice::p2(p)).collect();
    let b: Vec<f64> = points.iter().map(|&p| -0.5 * kern.at(p)).collect();
    let diag: Vec<f64> = p2.iter().map(|&q| q + 0.5 * kern.by_norm2[0]).collect();
    let apply = |x: &[f64]| -> Vec<f64> {
        let k = conv.apply(x);
        x.iter().zip(&k).zip(&p2).map(|((x, k), q)| q * x + 0.5 * k).collect()
    };
    let out = cg::solve(apply, &b, &diag, tol, MAX_ITER)?;
    let phi = out.x;
    let (a_n, correction) = scattering_length_from(potential, params, &points, &phi);
    let tail = tail_bound(potential, params, cap, &points, &phi);
    let index = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    Ok(ScatteringSolution {
        params: *params,
        cap,
        points,
        phi,
        a_n,
        correction,
        residual: out.residual,
        iterations: out.iterations,
        method: conv.method(),
        tail,
        index,
    })
}

fn scattering_length_from(potential: &Potential, params: &RegimeParams, points: &[Idx], phi: &[f64]) -> (f64, f64) {
    let nk = params.n.powf(1.0 - params.kappa);
    let correction = nk * par::sum_by(points.len(), |i| rescaled_fourier(potential, params, points[i]) * phi[i]);
    ((potential.integral() + correction) / (8.0 * PI), correction)
}

/// 8πa_N = V̂(0) + N^{1−κ}Σ_{p≠0}V̂_N(p)φ_p; returns (a_N, correction term).
pub fn box_scattering_length(solution: &ScatteringSolution, potential: &Potential, params: &RegimeParams) -> (f64, f64) {
    scattering_length_from(potential, params, &solution.points, &solution.phi)
}

/// Same quantity through the quadratic form obtained by inserting the
/// equation: 8πa_N = V̂(0) − N^{1−κ}[2Σp²φ_p² + Σ_{p,q}V̂_N(p−q)φ_pφ_q],
/// summed in reverse lattice order.
pub fn box_scattering_length_quadratic(solution: &ScatteringSolution, potential: &Potential, params: &RegimeParams) -> f64 {
    let conv = convolver(potential, params, solution.points.clone(), Some(Method::Direct));
    let kphi = conv.apply(&solution.phi);
    let n = solution.points.len();
    let q = par::sum_by(n, |j| {
        let i = n - 1 - j;
        let p2 = lattice::p2(solution.points[i]);
        solution.phi[i] * (2.0 * p2 * solution.phi[i] + kphi[i])
    });
    let nk = params.n.powf(1.0 - params.kappa);
    (potential.integral() - nk * q) / (8.0 * PI)
}

fn tail_bound(potential: &Potential, params: &RegimeParams, cap: f64, points: &[Idx], phi: &[f64]) -> TailBound {
    if potential.is_zero() {
        return TailBound { c_tail: 0.0, sum_bound: 0.0, a_bound: 0.0 };
    }
    let c_tail = points
        .iter()
        .zip(phi)
        .filter(|(p, _)| lattice::p_abs(**p) >= 0.5 * cap)
        .map(|(p, v)| (lattice::p2(*p) * v).abs())
        .fold(0.0f64, f64::max);
    // lattice sum over |p| > cap bounded by the continuum integral from the
    // cap minus one half cell diagonal
    let r0 = (cap - PI * 3f64.sqrt()).max(0.5 * cap);
    let k0 = r0 / params.l;
    let sum_bound = match potential.envelope_tail_integral(k0) {
        Some(t) => 4.0 * PI * c_tail * params.l / TWO_PI.powi(3) * t,
        None => f64::INFINITY,
    };
    TailBound { c_tail, sum_bound, a_bound: sum_bound / (8.0 * PI) }
}

/// Max-norm residual of the equation, recomputed by direct summation with
/// freshly evaluated Fourier coefficients.
pub fn residual_direct(solution: &ScatteringSolution, potential: &Potential, params: &RegimeParams) -> f64 {
    let pts = &solution.points;
    let phi = &solution.phi;
    par::max_by(pts.len(), |i| {
        let p = pts[i];
        let s = par::neumaier(pts.iter().zip(phi).map(|(&q, &v)| {
            potential.rescaled_fourier(params, lattice::p_abs(lattice::sub(p, q))) * v
        }));
        (lattice::p2(p) * phi[i] + 0.5 * s + 0.5 * rescaled_fourier(potential, params, p)).abs()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub n: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// ‖pφ‖₂².
    pub p_l2_sq: f64,
    /// sup |p²φ_p|.
    pub p2_sup: f64,
    pub alpha: Option<f64>,
    pub alpha_l2: f64,
    pub alpha_linf: f64,
}

pub fn solution_norm_report(solution: &ScatteringSolution, params: &RegimeParams, alpha: Option<f64>) -> NormReport {
    let phi = &solution.phi;
    let pts = &solution.points;
    let n = phi.len();
    let l1 = par::sum_by(n, |i| phi[i].abs());
    let l2 = par::sum_by(n, |i| phi[i] * phi[i]).sqrt();
    let linf = par::max_by(n, |i| phi[i].abs());
    let p_l2_sq = par::sum_by(n, |i| lattice::p2(pts[i]) * phi[i] * phi[i]);
    let p2_sup = par::max_by(n, |i| (lattice::p2(pts[i]) * phi[i]).abs());
    let (alpha_l2, alpha_linf) = match alpha {
        Some(al) => {
            let cut = params.n.powf(al);
            let keep = |i: usize| lattice::p_abs(pts[i]) > cut;
            (
                par::sum_by(n, |i| if keep(i) { phi[i] * phi[i] } else { 0.0 }).sqrt(),
                par::max_by(n, |i| if keep(i) { phi[i].abs() } else { 0.0 }),
            )
        }
        None => (0.0, 0.0),
    };
    NormReport { n: params.n, l1, l2, linf, p_l2_sq, p2_sup, alpha, alpha_l2, alpha_linf }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCheck {
    pub name: &'static str,
    pub slope: f64,
    pub expected: f64,
    /// Slope exceeds the bound's exponent by more than the slack.
    pub flagged: bool,
}

pub const SCALING_SLACK: f64 = 0.15;

/// Regresses each norm against N and compares with the exponents of the
/// bounds, read as one-sided bounds on absolute values.
pub fn solution_norm_scaling(reports: &[NormReport], kappa: f64) -> Vec<ScalingCheck> {
    let ns: Vec<f64> = reports.iter().map(|r| r.n).collect();
    let mut out = Vec::new();
    let mut push = |name: &'static str, vals: Vec<f64>, expected: f64| {
        if vals.iter().all(|v| *v > 0.0) {
            let slope = stats::loglog_slope(&ns, &vals);
            out.push(ScalingCheck { name, slope, expected, flagged: slope > expected + SCALING_SLACK });
        }
    };
    let e = -1.0 + kappa;
    push("l1", reports.iter().map(|r| r.l1).collect(), 0.0);
    push("l2", reports.iter().map(|r| r.l2).collect(), e);
    push("linf", reports.iter().map(|r| r.linf).collect(), e);
    push("p_l2_sq", reports.iter().map(|r| r.p_l2_sq).collect(), e);
    push("p2_sup", reports.iter().map(|r| r.p2_sup).collect(), e);
    if let Some(al) = reports.first().and_then(|r| r.alpha) {
        push("alpha_l2", reports.iter().map(|r| r.alpha_l2).collect(), e - al / 2.0);
        push("alpha_linf", reports.iter().map(|r| r.alpha_linf).collect(), e - 2.0 * al);
    }
    out
}

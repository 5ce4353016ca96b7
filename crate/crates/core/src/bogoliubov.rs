//! Bogoliubov coefficients: the high-momentum branch built from the
//! scattering solution and the shell branch that diagonalizes the quadratic
//! shell Hamiltonian, plus the constants produced along the way.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{self, Idx, TWO_PI};
use crate::par;
use crate::regime::RegimeParams;
use crate::scattering::{self, Potential, ScatteringSolution};

/// e(p) = √(p⁴ + 16πaN^κ p²) with B = 8πaN^κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub a: f64,
    pub b: f64,
    pub coupling: f64,
}

impl Dispersion {
    pub fn new(a: f64, params: &RegimeParams) -> Self {
        let b = params.coupling_b(a);
        Dispersion { a, b, coupling: 2.0 * b }
    }

    /// Dispersion at |p|² = p2.
    pub fn e(&self, p2: f64) -> f64 {
        (p2 * (p2 + self.coupling)).sqrt()
    }

    /// A_p = p² + 8πaN^κ.
    pub fn big_a(&self, p2: f64) -> f64 {
        p2 + self.b
    }

    /// e through √(A² − B²) = √((A − B)(A + B)).
    pub fn e_from_ab(&self, p2: f64) -> f64 {
        let a = self.big_a(p2);
        ((a - self.b) * (a + self.b)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighCoeff {
    pub p: Idx,
    pub c: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellCoeff {
    pub p: Idx,
    pub tau: f64,
    pub gamma: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovCoeffs {
    pub high: Vec<HighCoeff>,
    pub shell: Vec<ShellCoeff>,
    pub n0: f64,
}

/// (c, s) = (√(1 + s²), s) with s = N₀φ.
pub fn high_coeff(phi: f64, n0: f64) -> (f64, f64) {
    let s = n0 * phi;
    (s.hypot(1.0), s)
}

/// High branch over the solution's lattice: s_p = N₀φ_p for
/// |p| > N^{κ/2+ε}, trivial otherwise.
pub fn high_branch(solution: &ScatteringSolution, n0: f64, params: &RegimeParams) -> Vec<HighCoeff> {
    let cut = params.shell_outer();
    solution
        .points
        .iter()
        .zip(&solution.phi)
        .map(|(&p, &phi)| {
            let (c, s) = if lattice::p_abs(p) > cut { high_coeff(phi, n0) } else { (1.0, 0.0) };
            HighCoeff { p, c, s }
        })
        .collect()
}

/// τ from tanh(2τ) = −B/(p² + B), via ½·artanh in log1p form.
pub fn shell_coeff(p2: f64, b: f64) -> Result<(f64, f64, f64)> {
    let x = -b / (p2 + b);
    if !(x.abs() < 1.0) {
        return Err(Error::Numerical(format!("|tanh 2tau| = {} >= 1 at p^2 = {p2}", x.abs())));
    }
    let tau = 0.25 * (x.ln_1p() - (-x).ln_1p());
    Ok((tau, tau.cosh(), tau.sinh()))
}

pub fn shell_branch(a: f64, params: &RegimeParams, shell: &[Idx]) -> Result<Vec<ShellCoeff>> {
    let b = params.coupling_b(a);
    shell
        .iter()
        .map(|&p| {
            let (tau, gamma, sigma) = shell_coeff(lattice::p2(p), b)?;
            Ok(ShellCoeff { p, tau, gamma, sigma })
        })
        .collect()
}

/// ½Σ_S [e_p − p² − 8πaN^κ], summed as ½Σ(e − A).
pub fn diago_constant(shell: &[Idx], disp: &Dispersion) -> f64 {
    0.5 * par::sum_by(shell.len(), |i| {
        let p2 = lattice::p2(shell[i]);
        disp.e(p2) - disp.big_a(p2)
    })
}

/// Same constant through e − A = −B²/(e + A), free of cancellation.
pub fn diago_constant_stable(shell: &[Idx], disp: &Dispersion) -> f64 {
    -0.5 * par::sum_by(shell.len(), |i| {
        let p2 = lattice::p2(shell[i]);
        disp.b * disp.b / (disp.e_from_ab(p2) + disp.big_a(p2))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormDirect {
    /// N₀²V̂_N(0)/2.
    pub zero_mode: f64,
    /// Σ p² s_p².
    pub kinetic: f64,
    /// Σ N₀V̂_N(p) s_p.
    pub linear: f64,
    /// ½ Σ_{p,r} V̂_N(p−r) s_p s_r.
    pub quadratic: f64,
    pub total: f64,
}

/// N₀²V̂_N(0)/2 + Σ_p[p²s_p² + N₀V̂_N(p)s_p + ½Σ_r V̂_N(p−r)s_p s_r].
pub fn renormalized_constant_direct(
    solution: &ScatteringSolution,
    potential: &Potential,
    n0: f64,
    params: &RegimeParams,
) -> RenormDirect {
    let high = high_branch(solution, n0, params);
    let s: Vec<f64> = high.iter().map(|h| h.s).collect();
    let pts = &solution.points;
    let zero_mode = 0.5 * n0 * n0 * potential.rescaled_fourier(params, 0.0);
    let kinetic = par::sum_by(pts.len(), |i| lattice::p2(pts[i]) * s[i] * s[i]);
    let linear = n0 * par::sum_by(pts.len(), |i| scattering::rescaled_fourier(potential, params, pts[i]) * s[i]);
    let conv = scattering::convolver(potential, params, pts.clone(), None);
    let ks = conv.apply(&s);
    let quadratic = 0.5 * par::sum_by(pts.len(), |i| s[i] * ks[i]);
    let total = par::neumaier([zero_mode, kinetic, linear, quadratic]);
    RenormDirect { zero_mode, kinetic, linear, quadratic, total }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormClosed {
    /// 4πaN^{1+κ}.
    pub leading: f64,
    /// −8πaN^κ(N − N₀).
    pub depletion: f64,
    /// Σ_S (4πaN^κ)²/p².
    pub shell_sum: f64,
    pub total: f64,
}

pub fn renormalized_constant_closed(a: f64, n0: f64, params: &RegimeParams, shell: &[Idx]) -> RenormClosed {
    let nk = params.n.powf(params.kappa);
    let leading = 4.0 * PI * a * params.n * nk;
    let depletion = -8.0 * PI * a * nk * (params.n - n0);
    let w = (4.0 * PI * a * nk).powi(2);
    let shell_sum = par::sum_by(shell.len(), |i| w / lattice::p2(shell[i]));
    let total = par::neumaier([leading, depletion, shell_sum]);
    RenormClosed { leading, depletion, shell_sum, total }
}

/// Σ_S (4πaN^κ)²/p² in reverse order with plain accumulation.
pub fn shell_sum_reverse(a: f64, params: &RegimeParams, shell: &[Idx]) -> f64 {
    let w = (4.0 * PI * a * params.n.powf(params.kappa)).powi(2);
    shell.iter().rev().map(|&p| w / lattice::p2(p)).sum()
}

fn momentum(p: Idx) -> [f64; 3] {
    p.map(|v| TWO_PI * v as f64)
}

/// CSV `px,py,pz,c,s`.
pub fn high_csv(high: &[HighCoeff]) -> String {
    let mut out = String::from("px,py,pz,c,s\n");
    for h in high {
        let [x, y, z] = momentum(h.p);
        out.push_str(&format!("{x:?},{y:?},{z:?},{:?},{:?}\n", h.c, h.s));
    }
    out
}

/// CSV `px,py,pz,tau,gamma,sigma`.
pub fn shell_csv(shell: &[ShellCoeff]) -> String {
    let mut out = String::from("px,py,pz,tau,gamma,sigma\n");
    for c in shell {
        let [x, y, z] = momentum(c.p);
        out.push_str(&format!("{x:?},{y:?},{z:?},{:?},{:?},{:?}\n", c.tau, c.gamma, c.sigma));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let (c, s) = high_coeff(-0.75, 1.0);
        assert!((c - 1.25).abs() < 1e-15 && s == -0.75);
    }

    #[test]
    fn tau_at_equal_scales() {
        let (tau, g, s) = shell_coeff(3.0, 3.0).unwrap();
        assert!((tau + 0.25 * 3f64.ln()).abs() < 1e-15);
        assert!((g * g - s * s - 1.0).abs() < 1e-14);
        assert!((tau - (-0.274_653_072_167_027)).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_is_trivial() {
        let (tau, g, s) = shell_coeff(5.0, 0.0).unwrap();
        assert_eq!((tau, g, s), (0.0, 1.0, 0.0));
    }
}

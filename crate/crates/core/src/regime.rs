//! Scaling dictionary between the thermodynamic box (ρ, L, T) and the
//! rescaled unit-torus picture (N, κ, ε).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::{self, Idx};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    pub rho: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub epsilon: f64,
    pub n: f64,
    pub l: f64,
    pub temp_ratio: f64,
    pub t: f64,
    pub t_eff: f64,
    pub a: f64,
}

pub fn kappa_of_gamma(gamma: f64) -> f64 {
    (2.0 * gamma - 1.0) / (3.0 * gamma - 1.0)
}

pub fn gamma_of_kappa(kappa: f64) -> f64 {
    (1.0 - kappa) / (2.0 - 3.0 * kappa)
}

/// −2 + 3κ + 4ε < 0.
pub fn disjoint(kappa: f64, epsilon: f64) -> bool {
    -2.0 + 3.0 * kappa + 4.0 * epsilon < 0.0
}

impl RegimeParams {
    /// Derives the regime from physical inputs. The scattering length is a
    /// placeholder `a = 1` until [`RegimeParams::with_scattering_length`].
    pub fn derive(rho: f64, gamma: f64, epsilon: f64, temp_ratio: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        if !(gamma > 1.0) {
            return Err(Error::InvalidParameter(format!("kappa must exceed 1/2 (gamma = {gamma} <= 1)")));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(temp_ratio >= 0.0) {
            return Err(Error::InvalidParameter(format!("temp_ratio must be >= 0, got {temp_ratio}")));
        }
        let kappa = kappa_of_gamma(gamma);
        if !disjoint(kappa, epsilon) {
            return Err(Error::InvalidParameter(format!(
                "-2 + 3*kappa + 4*epsilon < 0 violated (kappa = {kappa}, epsilon = {epsilon})"
            )));
        }
        let n = rho.powf(1.0 - 3.0 * gamma);
        let l = rho.powf(-gamma);
        let l_check = n.powf(1.0 - kappa);
        if ((l - l_check) / l).abs() > 1e-12 {
            return Err(Error::Numerical(format!("L = rho^-gamma ({l}) and N^(1-kappa) ({l_check}) disagree")));
        }
        Ok(RegimeParams { rho, gamma, kappa, epsilon, n, l, temp_ratio, t: 0.0, t_eff: 0.0, a: 1.0 }
            .with_scattering_length(1.0))
    }

    /// The rescaled picture specified directly by (N, κ); ρ = N^{−2+3κ}.
    pub fn synthetic(n: f64, kappa: f64, epsilon: f64, temp_ratio: f64) -> Result<Self> {
        if !(kappa > 0.5 && kappa < 2.0 / 3.0) {
            return Err(Error::InvalidParameter(format!("kappa must lie in (1/2, 2/3), got {kappa}")));
        }
        if !(n > 1.0) {
            return Err(Error::InvalidParameter(format!("N must exceed 1, got {n}")));
        }
        let rho = n.powf(-2.0 + 3.0 * kappa);
        let gamma = gamma_of_kappa(kappa);
        let mut p = Self::derive(rho, gamma, epsilon, temp_ratio)?;
        // keep N exact rather than round-tripped through rho
        p.n = n;
        p.kappa = kappa;
        p.l = n.powf(1.0 - kappa);
        Ok(p.with_scattering_length(p.a))
    }

    /// Sets a and the temperature T = temp_ratio·ρ·a.
    pub fn with_scattering_length(mut self, a: f64) -> Self {
        self.a = a;
        self.t = self.temp_ratio * self.rho * a;
        self.t_eff = self.t * self.n.powf(2.0 - 2.0 * self.kappa);
        self
    }

    /// 1/2 < κ < 8/15 − 2ε/3.
    pub fn theorem_window_ok(&self) -> bool {
        self.kappa > 0.5 && self.kappa < 8.0 / 15.0 - 2.0 * self.epsilon / 3.0
    }

    /// Density in the rescaled picture, N/L³ = N^{−2+3κ}.
    pub fn rho_rescaled(&self) -> f64 {
        self.n.powf(-2.0 + 3.0 * self.kappa)
    }

    pub fn shell_inner(&self) -> f64 {
        self.n.powf(self.kappa / 2.0 - self.epsilon)
    }

    pub fn shell_outer(&self) -> f64 {
        self.n.powf(self.kappa / 2.0 + self.epsilon)
    }

    pub fn high_threshold(&self) -> f64 {
        self.n.powf(1.0 - self.kappa - self.epsilon)
    }

    /// 4·N^{1−κ}.
    pub fn default_cap(&self) -> f64 {
        4.0 * self.l
    }

    /// 8πa·N^κ, the shell coupling B.
    pub fn coupling_b(&self, a: f64) -> f64 {
        8.0 * std::f64::consts::PI * a * self.n.powf(self.kappa)
    }

    pub fn classify(&self, n: Idx, radius_cap: f64) -> MomentumClass {
        if n == [0, 0, 0] {
            return MomentumClass::Condensate;
        }
        let p = lattice::p_abs(n);
        if p > radius_cap {
            MomentumClass::OutsideCap
        } else if p > self.high_threshold() {
            MomentumClass::High
        } else if p > self.shell_inner() && p <= self.shell_outer() {
            MomentumClass::Shell
        } else {
            MomentumClass::Low
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentumClass {
    Condensate,
    Low,
    Shell,
    High,
    OutsideCap,
}

/// Classified truncated lattice.
#[derive(Debug, Clone)]
pub struct MomentumSets {
    pub radius_cap: f64,
    pub points: Vec<Idx>,
    pub classes: Vec<MomentumClass>,
    pub shell: Vec<Idx>,
    pub high: Vec<Idx>,
    index: HashMap<Idx, usize>,
}

impl MomentumSets {
    pub fn build(params: &RegimeParams, radius_cap: f64) -> Result<Self> {
        let outer = params.shell_outer();
        if radius_cap < outer {
            return Err(Error::InvalidParameter(format!(
                "radius cap {radius_cap} below shell outer radius {outer}"
            )));
        }
        // one index layer beyond the cap so that outside-cap points are enumerated too
        let points = lattice::ball(radius_cap + lattice::TWO_PI);
        let classes: Vec<_> = points.iter().map(|&n| params.classify(n, radius_cap)).collect();
        let pick = |c: MomentumClass| -> Vec<Idx> {
            points.iter().zip(&classes).filter(|(_, &k)| k == c).map(|(&n, _)| n).collect()
        };
        let shell = pick(MomentumClass::Shell);
        let high = pick(MomentumClass::High);
        if shell.is_empty() {
            return Err(Error::ShellEmpty { inner: params.shell_inner(), outer });
        }
        let index = points.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        Ok(MomentumSets { radius_cap, points, classes, shell, high, index })
    }

    pub fn class_of(&self, n: Idx) -> MomentumClass {
        self.index.get(&n).map_or(MomentumClass::OutsideCap, |&i| self.classes[i])
    }

    /// H_k = {r ∈ H : r + k ∈ H}.
    pub fn h_k(&self, k: Idx) -> Vec<Idx> {
        self.high
            .iter()
            .copied()
            .filter(|&r| self.class_of(lattice::add(r, k)) == MomentumClass::High)
            .collect()
    }
}

/// Volume estimate (4π/3)(outer³ − inner³)/(2π)³ of the shell point count.
pub fn shell_volume_count(params: &RegimeParams) -> f64 {
    let (a, b) = (params.shell_inner(), params.shell_outer());
    4.0 * std::f64::consts::PI / 3.0 * (b.powi(3) - a.powi(3)) / lattice::TWO_PI.powi(3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_one_rejected() {
        let e = RegimeParams::derive(1e-4, 1.0, 0.01, 0.0).unwrap_err();
        assert!(e.to_string().contains("kappa must exceed 1/2"));
    }

    #[test]
    fn large_gamma_limit() {
        assert!((kappa_of_gamma(1e9) - 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn reference_regime() {
        let p = RegimeParams::derive(1e-4, 1.1, 0.01, 0.0).unwrap();
        assert!((p.kappa - 1.2 / 2.3).abs() < 1e-15);
        // independent route: L = rho^-gamma, N = rho·L³
        let l = 1e-4f64.powf(-1.1);
        let n = 1e-4 * l.powi(3);
        assert!((p.n / n - 1.0).abs() < 1e-12);
        assert!((p.n.log10() - 9.2).abs() < 1e-12);
    }

    #[test]
    fn disjointness_violation_names_inequality() {
        let e = RegimeParams::derive(1e-4, 1.1, 0.2, 0.0).unwrap_err();
        assert!(e.to_string().contains("-2 + 3*kappa + 4*epsilon < 0"));
    }
}

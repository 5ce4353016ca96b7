//! Toy mode sets: the default one-shell-pair layout and seeded random ones.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ops;
use super::space::{FockSpace, Mode, Tag};
use crate::bogoliubov::Dispersion;
use crate::error::{Error, Result};
use crate::lattice::{self, Idx};

/// Largest dimension accepted for randomized layouts.
pub const MAX_DIM: usize = 20_000;

#[derive(Debug, Clone)]
pub struct ToyLayout {
    pub space: FockSpace,
    /// Shell momenta in the order used for T_c.
    pub order: Vec<Idx>,
    /// φ_r = −phi_amp / |r|² in index units.
    pub phi_amp: f64,
    pub n: f64,
    /// 8πaN^κ of the toy dispersion.
    pub b: f64,
    pub t_eff: f64,
    pub name: String,
}

impl ToyLayout {
    pub fn phi(&self) -> impl Fn(Idx) -> f64 + Sync + Send + 'static {
        let amp = self.phi_amp;
        move |r: Idx| -amp / lattice::norm2_idx(r) as f64
    }

    pub fn dispersion(&self) -> Dispersion {
        toy_dispersion(self.b)
    }

    pub fn shell(&self) -> Vec<Idx> {
        self.space.labels_with(Tag::Shell)
    }

    pub fn high(&self) -> Vec<Idx> {
        self.space.labels_with(Tag::High)
    }

    pub fn with_order(&self, order: Vec<Idx>) -> Self {
        ToyLayout { order, ..self.clone() }
    }

    /// For each (k, r ∈ H_k), the labels of the Θ⁽²⁾ neighborhoods that are
    /// modes of the space, beyond the created pair itself.
    pub fn cutoff_activity(&self) -> Vec<(Idx, Idx, Vec<Idx>)> {
        let shell = self.shell();
        let mut out = Vec::new();
        for &k in &self.order {
            for r in ops::h_k(&self.space, k) {
                let m = lattice::neg(lattice::add(k, r));
                let pair = [lattice::neg(r), lattice::add(r, k)];
                let mut active: Vec<Idx> = shell
                    .iter()
                    .flat_map(|&q| [lattice::add(r, q), lattice::add(m, q)])
                    .filter(|l| self.space.mode_index(*l).is_some() && !pair.contains(l))
                    .collect();
                active.sort();
                active.dedup();
                out.push((k, r, active));
            }
        }
        out
    }
}

/// Dispersion with B = b and nominal a = b/(8π).
pub fn toy_dispersion(b: f64) -> Dispersion {
    Dispersion { a: b / (8.0 * PI), b, coupling: 2.0 * b }
}

/// Condensate (cap 12), shell ±k (cap 4), high {h, −h, h+k, −h−k} (cap 2),
/// total cap 8.
pub fn default_layout() -> Result<ToyLayout> {
    let k = [1, 0, 0];
    let h = [3, 1, 0];
    let mut modes = vec![Mode::new([0, 0, 0], Tag::Condensate, 12)];
    modes.push(Mode::new(k, Tag::Shell, 4));
    modes.push(Mode::new(lattice::neg(k), Tag::Shell, 4));
    for l in [h, lattice::neg(h), lattice::add(h, k), lattice::neg(lattice::add(h, k))] {
        modes.push(Mode::new(l, Tag::High, 2));
    }
    Ok(ToyLayout {
        space: FockSpace::new(modes, 8)?,
        order: vec![k, lattice::neg(k)],
        phi_amp: 8.0,
        n: 1.0,
        b: 10.0,
        t_eff: 50.0,
        name: "default".into(),
    })
}

fn rand_vec(rng: &mut ChaCha8Rng, r: i32) -> Idx {
    [rng.random_range(-r..=r), rng.random_range(-r..=r), rng.random_range(-r..=r)]
}

/// One or two shell pairs with high quadruples; a second pair may share the
/// high momentum of the first. No condensate mode.
pub fn random_layout(seed: u64) -> Result<ToyLayout> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let pairs = if rng.random_bool(0.5) { 2 } else { 1 };
        let mut shell: Vec<Idx> = Vec::new();
        let mut high: Vec<Idx> = Vec::new();
        let mut h_prev: Option<Idx> = None;
        for _ in 0..pairs {
            let k = rand_vec(&mut rng, 2);
            let h = match h_prev {
                Some(h) if rng.random_bool(0.5) => h,
                _ => rand_vec(&mut rng, 5),
            };
            h_prev = Some(h);
            shell.extend([k, lattice::neg(k)]);
            high.extend([h, lattice::neg(h), lattice::add(h, k), lattice::neg(lattice::add(h, k))]);
        }
        high.sort();
        high.dedup();
        let mut all = shell.clone();
        all.extend(&high);
        all.push([0, 0, 0]);
        let mut uniq = all.clone();
        uniq.sort();
        uniq.dedup();
        if uniq.len() != all.len() {
            continue;
        }
        let mut modes: Vec<Mode> = shell.iter().map(|&k| Mode::new(k, Tag::Shell, 4)).collect();
        modes.extend(high.iter().map(|&h| Mode::new(h, Tag::High, 2)));
        let mut total = 8;
        let space = loop {
            let s = FockSpace::new(modes.clone(), total)?;
            if s.dim() <= MAX_DIM || total <= 3 {
                break s;
            }
            total -= 1;
        };
        let order = shell.clone();
        return Ok(ToyLayout {
            space,
            order,
            phi_amp: rng.random_range(4.0..12.0),
            n: 1.0,
            b: rng.random_range(5.0..20.0),
            t_eff: rng.random_range(30.0..80.0),
            name: format!("random(seed={seed})"),
        });
    }
    Err(Error::Mode(format!("no admissible random layout for seed {seed}")))
}

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::{self, Idx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Condensate,
    Low,
    Shell,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mode {
    pub label: Idx,
    pub tag: Tag,
    pub cap: u8,
}

impl Mode {
    pub fn new(label: Idx, tag: Tag, cap: u8) -> Self {
        Mode { label, tag, cap }
    }
}

/// Truncated bosonic Fock space over a labeled mode list. Basis vectors
/// are stored flat, `modes.len()` occupations per state, in lexicographic
/// order with the first mode most significant.
#[derive(Debug, Clone)]
pub struct FockSpace {
    modes: Vec<Mode>,
    total_cap: u32,
    occ: Vec<u8>,
    index: HashMap<Box<[u8]>, usize>,
    by_label: HashMap<Idx, usize>,
}

impl FockSpace {
    pub fn new(modes: Vec<Mode>, total_cap: u32) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Mode("empty mode list".into()));
        }
        let mut by_label = HashMap::new();
        for (i, m) in modes.iter().enumerate() {
            if by_label.insert(m.label, i).is_some() {
                return Err(Error::Mode(format!("duplicate mode label {:?}", m.label)));
            }
            if m.tag == Tag::Condensate && m.label != [0, 0, 0] {
                return Err(Error::Mode(format!("condensate mode must carry label 0, got {:?}", m.label)));
            }
        }
        let m = modes.len();
        let mut occ = Vec::new();
        let mut cur = vec![0u8; m];
        enumerate(&modes, total_cap, 0, 0, &mut cur, &mut occ);
        let mut index = HashMap::with_capacity(occ.len() / m);
        for (i, v) in occ.chunks_exact(m).enumerate() {
            index.insert(v.to_vec().into_boxed_slice(), i);
        }
        Ok(FockSpace { modes, total_cap, occ, index, by_label })
    }

    pub fn dim(&self) -> usize {
        self.occ.len() / self.modes.len()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn total_cap(&self) -> u32 {
        self.total_cap
    }

    pub fn state(&self, i: usize) -> &[u8] {
        let m = self.modes.len();
        &self.occ[i * m..(i + 1) * m]
    }

    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn mode_index(&self, label: Idx) -> Option<usize> {
        self.by_label.get(&label).copied()
    }

    pub fn require_mode(&self, label: Idx) -> Result<usize> {
        self.mode_index(label).ok_or_else(|| Error::Mode(format!("mode {label:?} not in space")))
    }

    /// Occupation of `label` in state `i`; zero for labels outside the set.
    pub fn occupation(&self, i: usize, label: Idx) -> u8 {
        self.mode_index(label).map_or(0, |m| self.state(i)[m])
    }

    pub fn total(&self, i: usize) -> u32 {
        self.state(i).iter().map(|&n| n as u32).sum()
    }

    pub fn labels_with(&self, tag: Tag) -> Vec<Idx> {
        self.modes.iter().filter(|m| m.tag == tag).map(|m| m.label).collect()
    }

    pub fn tag_of(&self, label: Idx) -> Option<Tag> {
        self.mode_index(label).map(|m| self.modes[m].tag)
    }

    /// Particles in modes carrying `tag`, for state `i`.
    pub fn count_tag(&self, i: usize, tag: Tag) -> u32 {
        self.state(i)
            .iter()
            .zip(&self.modes)
            .filter(|(_, m)| m.tag == tag)
            .map(|(&n, _)| n as u32)
            .sum()
    }

    /// True when no mode sits at its cap and the total is below the total cap.
    pub fn unsaturated(&self, i: usize) -> bool {
        self.total(i) < self.total_cap && self.state(i).iter().zip(&self.modes).all(|(&n, m)| n < m.cap)
    }

    pub fn total_momentum(&self, i: usize) -> Idx {
        self.state(i).iter().zip(&self.modes).fold([0; 3], |acc, (&n, m)| {
            lattice::add(acc, m.label.map(|v| v * n as i32))
        })
    }
}

fn enumerate(modes: &[Mode], total_cap: u32, pos: usize, used: u32, cur: &mut Vec<u8>, out: &mut Vec<u8>) {
    if pos == modes.len() {
        out.extend_from_slice(cur);
        return;
    }
    let room = (total_cap - used).min(modes[pos].cap as u32);
    for n in 0..=room {
        cur[pos] = n as u8;
        enumerate(modes, total_cap, pos + 1, used + n, cur, out);
    }
    cur[pos] = 0;
}

//! Points of the dual lattice 2π·ℤ³, stored by integer index.

use std::f64::consts::PI;

pub type Idx = [i32; 3];

pub const TWO_PI: f64 = 2.0 * PI;

#[inline]
pub fn norm2_idx(n: Idx) -> i64 {
    let [a, b, c] = n.map(|v| v as i64);
    a * a + b * b + c * c
}

/// |p|² for p = 2π·n.
#[inline]
pub fn p2(n: Idx) -> f64 {
    TWO_PI * TWO_PI * norm2_idx(n) as f64
}

#[inline]
pub fn p_abs(n: Idx) -> f64 {
    p2(n).sqrt()
}

#[inline]
pub fn neg(n: Idx) -> Idx {
    [-n[0], -n[1], -n[2]]
}

#[inline]
pub fn add(a: Idx, b: Idx) -> Idx {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Idx, b: Idx) -> Idx {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// All indices with `lo < |p| <= hi` (momentum units), lexicographic order.
/// `lo < 0` includes the origin.
pub fn annulus(lo: f64, hi: f64) -> Vec<Idx> {
    let m = (hi / TWO_PI).floor() as i32;
    let hi2 = hi * hi;
    let lo2 = lo * lo;
    let mut out = Vec::new();
    for x in -m..=m {
        for y in -m..=m {
            for z in -m..=m {
                let n = [x, y, z];
                let q = p2(n);
                if q <= hi2 && (lo < 0.0 || q > lo2) {
                    out.push(n);
                }
            }
        }
    }
    out
}

/// All indices with `|p| <= cap`, origin included.
pub fn ball(cap: f64) -> Vec<Idx> {
    annulus(-1.0, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_shell_has_six_points() {
        let s = annulus(0.5, TWO_PI * 1.0001);
        assert_eq!(s.len(), 6);
    }

    #[test]
    fn ball_counts() {
        // index radius 2: points with |n|² <= 4
        assert_eq!(ball(TWO_PI * 2.0 + 1e-9).len(), 33);
    }
}

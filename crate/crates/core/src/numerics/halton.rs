//! Halton low-discrepancy sequences.

use crate::Vec3;

/// Radical inverse of `index` in the given prime `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// `count` points of the 3-D Halton sequence (bases 2, 3, 5, starting at
/// index 1) mapped affinely into the box `[lo, hi)`.
pub fn halton_points(count: usize, lo: &Vec3, hi: &Vec3) -> Vec<Vec3> {
    (1..=count as u64)
        .map(|i| {
            let u = Vec3::new(
                radical_inverse(i, 2),
                radical_inverse(i, 3),
                radical_inverse(i, 5),
            );
            lo + (hi - lo).component_mul(&u)
        })
        .collect()
}

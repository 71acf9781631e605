//! Small counter-based hashing helpers. Every random decision in the
//! construction is a pure function of (seed, counter), so results do not
//! depend on iteration order or thread count.

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Uniform value in [0,1) keyed by (seed, vertex, level).
pub(crate) fn keyed_unit(seed: u64, u: u64, j: u64) -> f64 {
    let x = splitmix64(seed ^ splitmix64(u ^ splitmix64(j ^ 0xA076_1D64_78BD_642F)));
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Symmetric per-edge tiebreak key; never zero, so dropping an edge from a
/// path strictly decreases the accumulated key.
pub(crate) fn edge_key(u: u32, v: u32) -> u64 {
    let (a, b) = if u <= v { (u, v) } else { (v, u) };
    splitmix64(((a as u64) << 32) | b as u64) | 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyed_unit_is_deterministic_and_in_range() {
        for seed in [0u64, 1, 0xDEAD_BEEF] {
            for u in 0..50u64 {
                for j in 0..6u64 {
                    let a = keyed_unit(seed, u, j);
                    let b = keyed_unit(seed, u, j);
                    assert_eq!(a, b);
                    assert!((0.0..1.0).contains(&a));
                }
            }
        }
    }

    #[test]
    fn edge_key_is_symmetric_and_nonzero() {
        for u in 0..40u32 {
            for v in 0..40u32 {
                assert_eq!(edge_key(u, v), edge_key(v, u));
                assert_ne!(edge_key(u, v), 0);
            }
        }
    }
}

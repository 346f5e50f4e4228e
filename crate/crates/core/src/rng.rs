//! Counter-based random numbers.
//!
//! A draw is a pure function of `(master seed, sample index, object index,
//! stream)`: there is no sequential state to advance, so samples and edges can
//! be generated in any order and on any thread with identical results.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Keyed hash of the four counters.
#[inline]
pub fn counter_hash(seed: u64, sample: u64, index: u64, stream: u64) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    h = mix64(h ^ sample.wrapping_mul(0xD6E8_FEB8_6659_FD93).wrapping_add(GOLDEN));
    h = mix64(h ^ stream.wrapping_mul(0xA076_1D64_78BD_642F).wrapping_add(GOLDEN));
    mix64(h ^ index.wrapping_mul(0xE703_7ED1_A0B4_28DB).wrapping_add(GOLDEN))
}

/// Uniform on `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

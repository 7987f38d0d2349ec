//! Labeled derivation of per-stage RNG seeds from one master seed.
//!
//! Every source of randomness in the crate (hash seed arrays, dense Cauchy
//! matrices, the random-walk advancement table, SGD shuffling, fold
//! assignment) takes a seed derived here, so a single logged 64-bit master
//! seed reproduces an entire run.

const GOLDEN: u64 = 0x9e3779b97f4a7c15;

/// Finalizer with full avalanche: every input bit affects every output bit.
pub fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58476d1ce4e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d049bb133111eb);
    x ^= x >> 31;
    x
}

/// Seed for the stage named `label`.
pub fn derive(master: u64, label: &str) -> u64 {
    let mut h = mix64(master ^ GOLDEN);
    for &b in label.as_bytes() {
        h = mix64(h.wrapping_add(GOLDEN) ^ u64::from(b));
    }
    h
}

/// Seed for the `index`-th draw of the stage named `label`.
pub fn derive_indexed(master: u64, label: &str, index: u64) -> u64 {
    mix64(derive(master, label) ^ index.wrapping_mul(GOLDEN))
}

//! Deterministic random-stream splitting.
//!
//! Every randomized entry point takes a single `u64` seed and derives one
//! independent ChaCha8 stream per unit of parallel work (trial, learning run,
//! grid point). The derivation packs the inputs into the 32-byte ChaCha key:
//!
//! ```text
//! bytes  0..8   experiment seed, little endian
//! bytes  8..16  stream index (trial / run / grid-point number), little endian
//! bytes 16..24  ASCII purpose tag, e.g. b"episode\0"
//! bytes 24..32  zero padding
//! ```
//!
//! Distinct (seed, index, purpose) triples therefore map to distinct keys and
//! statistically independent streams, trials can run in parallel without
//! sharing generator state, and results are reproducible bit for bit. ChaCha
//! is specified by algorithm, so the streams are stable across platforms and
//! library versions, which a library-default generator does not guarantee.
//!
//! Draw order inside one simulation round is fixed and documented at the call
//! site: first the branch coin (one uniform), then the noise normal.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// Purpose tag for fixed-profile simulation episodes.
pub const EPISODE: [u8; 8] = *b"episode\0";
/// Purpose tag for learning trajectories.
pub const LEARN: [u8; 8] = *b"learn\0\0\0";
/// Purpose tag for brute-force feasibility episodes.
pub const REGION: [u8; 8] = *b"region\0\0";
/// Purpose tag for property-check sampling.
pub const CHECK: [u8; 8] = *b"check\0\0\0";

/// Derives the independent stream for (`seed`, `index`, `purpose`).
#[must_use]
pub fn stream(seed: u64, index: u64, purpose: [u8; 8]) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..24].copy_from_slice(&purpose);
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn identical_inputs_reproduce_the_stream() {
        let mut a = stream(42, 7, EPISODE);
        let mut b = stream(42, 7, EPISODE);
        for _ in 0..100 {
            assert_eq!(a.random::<u64>(), b.random::<u64>());
        }
    }

    #[test]
    fn distinct_indices_and_purposes_decorrelate() {
        let mut base = stream(42, 0, EPISODE);
        let mut other_index = stream(42, 1, EPISODE);
        let mut other_purpose = stream(42, 0, LEARN);
        let x: u64 = base.random();
        assert_ne!(x, other_index.random::<u64>());
        assert_ne!(x, other_purpose.random::<u64>());
    }

    #[test]
    fn uniform_draws_cover_the_unit_interval() {
        let mut rng = stream(1, 0, CHECK);
        let mut acc = 0.0;
        for _ in 0..10_000 {
            let u: f64 = rng.random();
            assert!((0.0..1.0).contains(&u));
            acc += u;
        }
        // Mean of 10^4 uniforms: 0.5 within 5 sigma = 5 / (sqrt(12e4)).
        assert!((acc / 10_000.0 - 0.5).abs() < 0.0145);
    }
}

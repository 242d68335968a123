//! Fixtures shared by the benchmarks in `benches/`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use starquad_core::lemma::{random_config, AuxConfig};
use starquad_core::StarDomain;

/// The plus-shaped domain of area 20.
pub fn cross() -> StarDomain {
    StarDomain::cross(2, 1.0, 3.0, 0.5).expect("valid cross")
}

pub fn disk() -> StarDomain {
    StarDomain::ball(2, vec![0.0, 0.0], 1.0, 0.5).expect("valid disk")
}

pub fn cross3d() -> StarDomain {
    StarDomain::cross(3, 1.0, 2.0, 0.5).expect("valid cross")
}

/// `count` random auxiliary-map configurations in dimension `d`.
pub fn configs(seed: u64, d: usize, count: usize) -> Vec<AuxConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_config(&mut rng, d)).collect()
}

//! Fixtures shared by the benchmarks.

use chui_lab_core::{BoundedAnalyticFunction, PoleConfiguration};
use num_complex::Complex64;
use rand::SeedableRng;

/// N uniform random poles from a fixed seed.
pub fn random_poles(n: usize, seed: u64) -> PoleConfiguration {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    PoleConfiguration::random(n, &mut rng)
}

/// f = 1/2 + z/4.
pub fn linear_target() -> BoundedAnalyticFunction {
    BoundedAnalyticFunction::new(vec![Complex64::new(0.5, 0.0), Complex64::new(0.25, 0.0)]).expect("bounded")
}

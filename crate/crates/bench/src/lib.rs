//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use btiepi_core::{random_instance, FracPoint, StartupCostModel, TimeGrid, UcInstance};

pub fn cost() -> StartupCostModel {
    StartupCostModel::exponential(800.0, 50.0, 0.3).expect("valid cost")
}

/// Random fractional point on `periods` unit-length periods, with a cost
/// value low enough that separation has to run to completion.
pub fn separation_case(periods: usize, seed: u64) -> (FracPoint, TimeGrid) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = (0..periods)
        .map(|_| match rng.gen_range(0..8) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.0..1.0),
        })
        .collect();
    let point = FracPoint::new(u, 0.0).expect("valid point");
    (point, TimeGrid::uniform(periods, 2.0).expect("valid grid"))
}

pub fn desk_instance(units: usize, periods: usize, seed: u64) -> UcInstance {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), units, periods).expect("valid instance")
}

//! Shared fixtures for the benchmarks.

use nambu_core::{builtin, MotionSystem, SamplePoint};

/// A built-in system with `count` sample points drawn from seed 7.
pub fn fixture(name: &str, count: usize) -> (MotionSystem, Vec<SamplePoint>) {
    let sys = builtin(name).expect("built-in system");
    let points = sys.sample(7, count).expect("sampling");
    (sys, points)
}

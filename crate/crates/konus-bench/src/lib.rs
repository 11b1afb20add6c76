//! Shared fixtures for the criterion benchmarks in `benches/`.

use konus_core::{PriceFunctional, Scenario, UtilityFunction};

/// The two-good drifting-exponent scenario used across the benchmarks.
pub fn drift_scenario() -> Scenario {
    let times = vec![1.0, 1.25, 1.5, 1.75, 2.0];
    let utilities = times
        .iter()
        .map(|&t| UtilityFunction::cobb_douglas(vec![t, 1.0]).unwrap())
        .collect();
    let prices = times
        .iter()
        .map(|_| PriceFunctional::new(vec![1.0, 1.0]).unwrap())
        .collect();
    Scenario::new(times, utilities, prices).unwrap()
}

//! Shared fixtures for the benchmark targets.

use fra_core::data::{FaultLabel, FaultType, FraSweep, FrequencyGrid, GRID_POINTS};
use fra_core::data::{Connection, LabeledDataset, Sample, WindingId};
use fra_core::sim::{base_parameters, LadderNetwork, WindingSpec};

/// The nominal 10-disc network.
pub fn nominal_network() -> LadderNetwork {
    base_parameters(&WindingSpec::disc10(), 0, 0.0).expect("nominal parameters are valid")
}

/// A small synthetic two-class dataset sized for throughput benchmarks.
pub fn synthetic_dataset(n_per_class: usize) -> LabeledDataset {
    let grid = FrequencyGrid::canonical();
    let mut samples = Vec::new();
    for i in 0..n_per_class {
        let wiggle = (i % 9) as f32 * 0.2;
        let a = |j: usize| -35.0 + 8.0 * ((j as f32) / 90.0).sin() - wiggle;
        let b = |j: usize| -35.0 - 8.0 * ((j as f32) / 90.0).cos() + wiggle;
        samples.push(Sample {
            sweep: FraSweep::new((0..GRID_POINTS).map(a).collect(), &grid).unwrap(),
            label: FaultLabel::normal(),
            seed_id: i as u32,
        });
        samples.push(Sample {
            sweep: FraSweep::new((0..GRID_POINTS).map(b).collect(), &grid).unwrap(),
            label: FaultLabel::new(FaultType::Dsv, 1, 1).unwrap(),
            seed_id: (i + n_per_class) as u32,
        });
    }
    LabeledDataset::new(Connection::Ee, WindingId::Disc10, grid, samples).unwrap()
}

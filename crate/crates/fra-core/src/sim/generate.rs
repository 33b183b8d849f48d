//! Synthetic dataset generation for the three measurement groups.

use rayon::prelude::*;

use super::fault::{apply_fault, position_count, FaultSpec};
use super::ladder::{base_parameters, WindingSpec};
use super::solve::{sweep, MeasurementSetup};
use crate::data::{Connection, FaultLabel, FaultType, FrequencyGrid, Group, LabeledDataset, Sample};
use crate::error::Result;
use crate::seed::derive_seed;

const STREAM_JITTER: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_ID: u64 = 3;

/// Knobs for the stochastic parts of generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationConfig {
    /// Relative std of the per-parameter manufacturing jitter.
    pub jitter_sigma: f64,
    /// Std of the per-point measurement noise in dB.
    pub noise_db: f64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            jitter_sigma: 0.005,
            noise_db: 0.1,
        }
    }
}

/// The deterministic label sequence of a group: normals first, then each
/// fault type in canonical order, degrees 1..=4 with the remainder of the
/// even split going to lower degrees, positions cycling over valid hosts.
pub fn sample_plan(group: Group) -> Vec<FaultLabel> {
    let winding = group.winding();
    let mut plan = Vec::with_capacity(group.total_samples());
    for &(fault_type, count) in group.sample_counts() {
        if fault_type == FaultType::Normal {
            plan.extend(std::iter::repeat(FaultLabel::normal()).take(count));
            continue;
        }
        let quotient = count / 4;
        let remainder = count % 4;
        for degree in 1..=4u8 {
            let per_degree = quotient + usize::from((degree as usize) <= remainder);
            let hosts = position_count(fault_type, degree, winding);
            for i in 0..per_degree {
                let position = (i % hosts + 1) as u16;
                plan.push(
                    FaultLabel::new(fault_type, degree, position)
                        .expect("plan labels are valid by construction"),
                );
            }
        }
    }
    plan
}

/// Generates one group with the default jitter and noise levels.
pub fn generate_group(group: Group, seed: u64) -> Result<LabeledDataset> {
    generate_group_with(group, seed, &GenerationConfig::default())
}

/// Generates one group. Deterministic given `(group, seed, cfg)`; sample
/// generation is parallel and order-independent because every sample derives
/// its own seeds from `(seed, index)`.
///
/// Fault events are seeded independently of the connection, so Group1 and
/// Group2 built from the same base seed are paired EE/CIW measurements of
/// identical physical networks.
pub fn generate_group_with(
    group: Group,
    seed: u64,
    cfg: &GenerationConfig,
) -> Result<LabeledDataset> {
    let winding = group.winding();
    let connection = group.connection();
    let spec = WindingSpec::for_winding(winding);
    let grid = FrequencyGrid::canonical();
    let setup = match connection {
        Connection::Ee => MeasurementSetup::ee(),
        Connection::Ciw => MeasurementSetup::ciw(),
    };
    let plan = sample_plan(group);
    let samples: Result<Vec<Sample>> = plan
        .par_iter()
        .enumerate()
        .map(|(idx, label)| {
            let jitter_seed = derive_seed(seed, &[idx as u64, STREAM_JITTER]);
            let noise_seed = derive_seed(
                seed,
                &[idx as u64, STREAM_NOISE, connection.code() as u64],
            );
            let seed_id = derive_seed(seed, &[idx as u64, STREAM_ID]) as u32;
            let net = base_parameters(&spec, jitter_seed, cfg.jitter_sigma)?;
            let net = if label.is_normal() {
                net
            } else {
                let fault = FaultSpec::new(label.fault_type, label.degree, label.position)?;
                apply_fault(&net, &fault)?
            };
            let sweep = sweep(&net, &setup, &grid, noise_seed, cfg.noise_db)?;
            Ok(Sample {
                sweep,
                label: *label,
                seed_id,
            })
        })
        .collect();
    LabeledDataset::new(connection, winding, grid, samples?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_counts_match_the_tables() {
        for group in Group::ALL {
            let plan = sample_plan(group);
            assert_eq!(plan.len(), group.total_samples());
            for &(t, count) in group.sample_counts() {
                let got = plan.iter().filter(|l| l.fault_type == t).count();
                assert_eq!(got, count, "{group} {t}");
            }
        }
        assert_eq!(sample_plan(Group::Group3).len(), 2855);
    }

    #[test]
    fn degree_split_remainder_goes_to_lower_degrees() {
        // Group3 DSV: 855 samples over four degrees.
        let plan = sample_plan(Group::Group3);
        let mut per_degree = [0usize; 5];
        for l in plan.iter().filter(|l| l.fault_type == FaultType::Dsv) {
            per_degree[l.degree as usize] += 1;
        }
        assert_eq!(&per_degree[1..], &[214, 214, 214, 213]);
    }

    #[test]
    fn group1_and_group2_share_the_label_sequence() {
        assert_eq!(sample_plan(Group::Group1), sample_plan(Group::Group2));
    }

    #[test]
    fn positions_cycle_over_valid_hosts() {
        let plan = sample_plan(Group::Group1);
        for l in &plan {
            if l.is_normal() {
                continue;
            }
            let hosts = position_count(l.fault_type, l.degree, Group::Group1.winding());
            assert!((1..=hosts as u16).contains(&l.position));
        }
        // FB degree 1 has ten hosts on the 10-disc winding; with 150
        // samples every host is used.
        let fb1: Vec<u16> = plan
            .iter()
            .filter(|l| l.fault_type == FaultType::Fb && l.degree == 1)
            .map(|l| l.position)
            .collect();
        for p in 1..=10u16 {
            assert!(fb1.contains(&p));
        }
    }
}

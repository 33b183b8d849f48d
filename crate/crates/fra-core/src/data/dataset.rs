//! Labeled sweep collections and the three measurement groups.

use super::grid::{FraSweep, FrequencyGrid};
use super::label::{FaultLabel, FaultType};
use crate::error::{Error, Result};

/// FRA connection mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connection {
    /// End-to-end voltage ratio on the HV winding.
    Ee,
    /// Capacitive inter-winding ratio, HV to LV.
    Ciw,
}

impl Connection {
    pub fn code(self) -> u8 {
        match self {
            Connection::Ee => 0,
            Connection::Ciw => 1,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Connection::Ee),
            1 => Ok(Connection::Ciw),
            _ => Err(Error::domain(format!("unknown connection code {code}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Connection::Ee => "EE",
            Connection::Ciw => "CIW",
        }
    }
}

impl std::fmt::Display for Connection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which physical winding model produced a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindingId {
    Disc10,
    Disc12,
}

impl WindingId {
    pub fn disc_count(self) -> usize {
        match self {
            WindingId::Disc10 => 10,
            WindingId::Disc12 => 12,
        }
    }

    pub fn code(self) -> u8 {
        self.disc_count() as u8
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            10 => Ok(WindingId::Disc10),
            12 => Ok(WindingId::Disc12),
            _ => Err(Error::domain(format!("unknown winding code {code}"))),
        }
    }
}

impl std::fmt::Display for WindingId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "disc{}", self.disc_count())
    }
}

/// The three measurement groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    /// EE connection, 10-disc winding.
    Group1,
    /// CIW connection, 10-disc winding.
    Group2,
    /// EE connection, 12-disc winding.
    Group3,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Group1, Group::Group2, Group::Group3];

    pub fn connection(self) -> Connection {
        match self {
            Group::Group1 | Group::Group3 => Connection::Ee,
            Group::Group2 => Connection::Ciw,
        }
    }

    pub fn winding(self) -> WindingId {
        match self {
            Group::Group1 | Group::Group2 => WindingId::Disc10,
            Group::Group3 => WindingId::Disc12,
        }
    }

    pub fn from_parts(connection: Connection, winding: WindingId) -> Result<Group> {
        match (connection, winding) {
            (Connection::Ee, WindingId::Disc10) => Ok(Group::Group1),
            (Connection::Ciw, WindingId::Disc10) => Ok(Group::Group2),
            (Connection::Ee, WindingId::Disc12) => Ok(Group::Group3),
            (c, w) => Err(Error::domain(format!(
                "({c}, {w}) is not one of the three measurement groups"
            ))),
        }
    }

    pub fn from_index(i: usize) -> Result<Group> {
        match i {
            1 => Ok(Group::Group1),
            2 => Ok(Group::Group2),
            3 => Ok(Group::Group3),
            _ => Err(Error::domain(format!("group index must be 1..=3, got {i}"))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Group::Group1 => 1,
            Group::Group2 => 2,
            Group::Group3 => 3,
        }
    }

    /// Per-type sample counts for this group.
    pub fn sample_counts(self) -> &'static [(FaultType, usize)] {
        match self {
            Group::Group1 | Group::Group2 => &[
                (FaultType::Normal, 25),
                (FaultType::Ad, 200),
                (FaultType::Dsv, 600),
                (FaultType::Fb, 600),
            ],
            Group::Group3 => &[
                (FaultType::Normal, 45),
                (FaultType::Ad, 200),
                (FaultType::Dsv, 855),
                (FaultType::Fb, 1080),
                (FaultType::Sc, 675),
            ],
        }
    }

    pub fn total_samples(self) -> usize {
        self.sample_counts().iter().map(|(_, n)| n).sum()
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Group{}", self.index())
    }
}

/// One sweep with its ground truth and the seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub sweep: FraSweep,
    pub label: FaultLabel,
    pub seed_id: u32,
}

/// A set of labeled sweeps sharing one grid, connection, and winding.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    connection: Connection,
    winding: WindingId,
    grid: FrequencyGrid,
    samples: Vec<Sample>,
}

impl LabeledDataset {
    pub fn new(
        connection: Connection,
        winding: WindingId,
        grid: FrequencyGrid,
        samples: Vec<Sample>,
    ) -> Result<Self> {
        Group::from_parts(connection, winding)?;
        let gid = grid.id();
        for (i, s) in samples.iter().enumerate() {
            if s.sweep.grid_id() != gid {
                return Err(Error::domain(format!(
                    "sample {i} was measured on a different grid"
                )));
            }
        }
        Ok(LabeledDataset {
            connection,
            winding,
            grid,
            samples,
        })
    }

    pub fn connection(&self) -> Connection {
        self.connection
    }

    pub fn winding(&self) -> WindingId {
        self.winding
    }

    pub fn group(&self) -> Group {
        Group::from_parts(self.connection, self.winding).expect("validated at construction")
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Non-normal fault types present, in canonical order.
    pub fn fault_types(&self) -> Vec<FaultType> {
        FaultType::FAULTS
            .into_iter()
            .filter(|t| self.samples.iter().any(|s| s.label.fault_type == *t))
            .collect()
    }

    /// Restricts to normal samples plus one fault type, preserving order.
    /// The result is the training set for a degree-diagnosis task.
    pub fn slice_degree_task(&self, fault_type: FaultType) -> Result<LabeledDataset> {
        if fault_type == FaultType::Normal {
            return Err(Error::domain("degree task needs a non-normal fault type"));
        }
        if !self.fault_types().contains(&fault_type) {
            return Err(Error::domain(format!(
                "fault type {fault_type} is absent from this dataset"
            )));
        }
        let samples = self
            .samples
            .iter()
            .filter(|s| s.label.is_normal() || s.label.fault_type == fault_type)
            .cloned()
            .collect();
        LabeledDataset::new(self.connection, self.winding, self.grid.clone(), samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::GRID_POINTS;

    pub(crate) fn dummy_dataset(group: Group) -> LabeledDataset {
        // Table-shaped label multiset with constant-ish sweeps; cheap stand-in
        // for generator output in tests that only look at labels.
        let grid = FrequencyGrid::canonical();
        let mut samples = Vec::new();
        let mut n = 0u32;
        for &(t, count) in group.sample_counts() {
            for i in 0..count {
                let label = if t == FaultType::Normal {
                    FaultLabel::normal()
                } else {
                    FaultLabel::new(t, (i % 4 + 1) as u8, (i % 3 + 1) as u16).unwrap()
                };
                let value = -20.0 - (n % 7) as f32;
                samples.push(Sample {
                    sweep: FraSweep::new(vec![value; GRID_POINTS], &grid).unwrap(),
                    label,
                    seed_id: n,
                });
                n += 1;
            }
        }
        LabeledDataset::new(group.connection(), group.winding(), grid, samples).unwrap()
    }

    #[test]
    fn group_parts_roundtrip() {
        for g in Group::ALL {
            assert_eq!(Group::from_parts(g.connection(), g.winding()).unwrap(), g);
            assert_eq!(Group::from_index(g.index()).unwrap(), g);
        }
        assert!(Group::from_parts(Connection::Ciw, WindingId::Disc12).is_err());
    }

    #[test]
    fn table_counts() {
        assert_eq!(Group::Group1.total_samples(), 1425);
        assert_eq!(Group::Group2.total_samples(), 1425);
        // The published per-type counts (45 + 200 + 855 + 1080 + 675) sum
        // to 2855; the per-type counts are the contract here.
        assert_eq!(Group::Group3.total_samples(), 2855);
    }

    #[test]
    fn slice_degree_task_counts() {
        let g1 = dummy_dataset(Group::Group1);
        let fb = g1.slice_degree_task(FaultType::Fb).unwrap();
        assert_eq!(fb.len(), 25 + 600);

        let g3 = dummy_dataset(Group::Group3);
        let sc = g3.slice_degree_task(FaultType::Sc).unwrap();
        assert_eq!(sc.len(), 45 + 675);
    }

    #[test]
    fn slice_degree_task_is_idempotent() {
        let g1 = dummy_dataset(Group::Group1);
        let once = g1.slice_degree_task(FaultType::Dsv).unwrap();
        let twice = once.slice_degree_task(FaultType::Dsv).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn slice_degree_task_rejects_absent_type() {
        let g1 = dummy_dataset(Group::Group1);
        assert!(g1.slice_degree_task(FaultType::Sc).is_err());
        assert!(g1.slice_degree_task(FaultType::Normal).is_err());
    }

    #[test]
    fn dataset_rejects_foreign_grid() {
        let grid = FrequencyGrid::canonical();
        let other = FrequencyGrid::log_spaced(10.0, 2e6).unwrap();
        let sweep = FraSweep::new(vec![-10.0; GRID_POINTS], &other).unwrap();
        let sample = Sample {
            sweep,
            label: FaultLabel::normal(),
            seed_id: 0,
        };
        assert!(
            LabeledDataset::new(Connection::Ee, WindingId::Disc10, grid, vec![sample]).is_err()
        );
    }
}

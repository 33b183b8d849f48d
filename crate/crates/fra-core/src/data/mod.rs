//! Canonical data model: frequency grids, sweeps, fault labels,
//! label-encoding schemes, stratified folds, and dataset file I/O.
//!
//! All types here are immutable values after construction and safe to
//! share read-only across parallel workers.

mod dataset;
mod folds;
mod grid;
mod io;
mod label;

pub use dataset::{Connection, Group, LabeledDataset, Sample, WindingId};
pub use folds::{stratified_folds, FoldAssignment};
pub use grid::{FraSweep, FrequencyGrid, GridId, DB_FLOOR, GRID_POINTS};
pub use io::{
    dataset_from_bytes, dataset_to_bytes, export_csv, read_dataset, write_dataset, DATASET_MAGIC,
    DATASET_VERSION,
};
pub use label::{one_hot, DecodedClass, FaultLabel, FaultType, LabelScheme, SchemeKind};

//! Core library for FRA-based transformer winding fault diagnosis.
//!
//! The crate is organized around the stages of the workflow:
//!
//! - [`data`] — frequency grids, sweeps, fault labels, label-encoding
//!   schemes, stratified folds, and the on-disk dataset format.
//! - [`sim`] — a lumped-parameter ladder-network simulator for disc
//!   windings with AD/DSV/FB/SC fault injection, solved by complex
//!   nodal analysis over the frequency grid.
//! - [`nn`] — a from-scratch dense network engine: forward pass with
//!   rectifier hidden layers and softmax output, inverted dropout,
//!   cross-entropy loss, exact backpropagation, Adam, and the model
//!   file format.
//! - [`zoo`] — the six FRA-Dia architectures plus an extreme learning
//!   machine baseline.
//! - [`eval`] — the training loop, k-fold cross-validation harness,
//!   classification metrics, and CC/ED curve statistics.
//! - [`diag`] — ensemble fusion of two classifiers and the two-stage
//!   EE-then-CIW diagnosis pipeline.

pub mod data;
pub mod diag;
pub mod error;
pub mod eval;
pub mod nn;
pub mod seed;
pub mod sim;
pub mod zoo;

mod linalg;

pub use data::{
    Connection, FaultLabel, FaultType, FoldAssignment, FraSweep, FrequencyGrid, GridId, Group,
    LabelScheme, LabeledDataset, Sample, SchemeKind, WindingId,
};
pub use diag::{Diagnosis, PipelineManifest, TwoStagePipeline, Verdict};
pub use error::{Error, Result};
pub use eval::{ConfusionMatrix, CvReport, TrainConfig, TrainSeeds};
pub use nn::{ModelMeta, ModelParams, ModelSpec, SavedModel};
pub use sim::{FaultSpec, LadderNetwork, MeasurementSetup, WindingSpec};
pub use zoo::Architecture;

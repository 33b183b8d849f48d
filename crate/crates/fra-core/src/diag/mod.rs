//! Ensemble fusion and the two-stage diagnosis pipeline.

mod fuse;
mod two_stage;

pub use fuse::{fuse, tune_lambda, LambdaChoice};
pub use two_stage::{
    diagnosis_to_string, Diagnosis, PipelineManifest, TwoStagePipeline, Verdict,
};

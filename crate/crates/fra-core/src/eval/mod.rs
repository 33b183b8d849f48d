//! Training loop, cross-validation harness, classification metrics, and
//! curve statistics.

mod curves;
mod cv;
mod metrics;
mod trainer;

pub use curves::{cc, cc_ed_map, cc_sweeps, ed, ed_sweeps, mean_curve, CcEdPoint, CurveStats,
    DegreeGroup};
pub use cv::{cross_validate, CvReport, FoldResult};
pub use metrics::{confusion, ConfusionMatrix};
pub use trainer::{
    argmax, dataset_matrix, encode_labels, evaluate, predict_classes, train, TrainConfig,
    TrainOutcome, TrainSeeds, MIN_LOSS_IMPROVEMENT,
};

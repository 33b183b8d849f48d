//! Lumped-parameter ladder-network simulation of disc windings.
//!
//! A winding pair is modeled as two coupled R-L-C ladders (HV and LV),
//! each disc contributing a series R-L branch, a parallel series
//! capacitance, ground capacitance, and an inter-winding capacitance to
//! its facing disc. Faults perturb these parameters; the EE and CIW
//! transfer ratios are solved by complex nodal analysis per frequency.
//!
//! Everything here is a pure function of its inputs: per-sample seeds make
//! parallel generation order-independent.

mod fault;
mod generate;
mod ladder;
mod solve;

pub use fault::{
    apply_fault, dsv_gap_triple, fb_disc_subset, position_count, FaultSpec, AD_END_CG_SLOPE,
    AD_MUTUAL_SLOPE,
    DSV_BASE_GAP_MM, FB_ARC_DEGREES, FB_INDUCTANCE_FACTOR, FB_RADIAL_RATIO, FB_SENSITIVITY,
    SC_BRANCH_OHMS, SC_MUTUAL_FACTOR,
};
pub use generate::{generate_group, generate_group_with, sample_plan, GenerationConfig};
pub use ladder::{base_parameters, DiscParams, LadderNetwork, Nominal, WindingSpec};
pub use solve::{netlist, solve_at, sweep, MeasurementSetup};

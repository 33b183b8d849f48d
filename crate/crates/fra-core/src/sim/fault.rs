//! Fault injection: maps a (type, degree, position) onto parameter changes.
//!
//! All perturbations are multiplicative and leave every other entry of the
//! network bit-identical to its input.

use super::ladder::LadderNetwork;
use crate::data::{FaultType, WindingId};
use crate::error::{Error, Result};

/// Axial-displacement effect per mm: mutual HV-LV coupling shrink.
pub const AD_MUTUAL_SLOPE: f64 = 0.006;
/// Axial-displacement effect per mm: end-disc ground-capacitance shrink.
pub const AD_END_CG_SLOPE: f64 = 0.004;
/// Design inter-disc gap used by the DSV parallel-plate law.
pub const DSV_BASE_GAP_MM: f64 = 4.0;
/// Angular span of one buckling protrusion.
pub const FB_ARC_DEGREES: f64 = 30.0;
/// Maximum radial extent of a protrusion relative to the radius.
pub const FB_RADIAL_RATIO: f64 = 0.125;
/// Extra inter-winding capacitance sensitivity keeping FB degrees separable
/// above the noise floor.
pub const FB_SENSITIVITY: f64 = 0.75;
/// Inductance shrink per buckled disc.
pub const FB_INDUCTANCE_FACTOR: f64 = 0.98;
/// Resistance replacing a shorted disc branch.
pub const SC_BRANCH_OHMS: f64 = 1.0e-3;
/// Flux-cancellation factor on mutual terms touching a shorted disc.
pub const SC_MUTUAL_FACTOR: f64 = 0.05;

/// One injectable fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaultSpec {
    pub fault_type: FaultType,
    pub degree: u8,
    /// 1-based position among the valid hosts for this fault and winding.
    pub position: u16,
}

impl FaultSpec {
    pub fn new(fault_type: FaultType, degree: u8, position: u16) -> Result<Self> {
        if fault_type == FaultType::Normal {
            return Err(Error::domain("cannot inject a Normal fault"));
        }
        if !(1..=4).contains(&degree) {
            return Err(Error::domain(format!("fault degree must be 1..=4, got {degree}")));
        }
        if position == 0 {
            return Err(Error::domain("fault position is 1-based"));
        }
        Ok(FaultSpec {
            fault_type,
            degree,
            position,
        })
    }
}

/// Axial displacement in mm for a fault degree (per winding geometry).
pub fn ad_displacement_mm(winding: WindingId, degree: u8) -> f64 {
    let table = match winding {
        WindingId::Disc10 => [10.0, 15.0, 20.0, 25.0],
        WindingId::Disc12 => [10.0, 20.0, 30.0, 40.0],
    };
    table[(degree - 1) as usize]
}

/// Extra disc spacing in mm for a DSV fault degree.
pub fn dsv_spacing_mm(winding: WindingId, degree: u8) -> f64 {
    let table = match winding {
        WindingId::Disc10 => [5.0, 10.0, 15.0, 20.0],
        WindingId::Disc12 => [10.0, 20.0, 30.0, 40.0],
    };
    table[(degree - 1) as usize]
}

/// How many distinct positions a fault can occupy.
pub fn position_count(fault_type: FaultType, degree: u8, winding: WindingId) -> usize {
    let n = winding.disc_count();
    match fault_type {
        // The whole winding shifts; there is one way to do it.
        FaultType::Normal => 0,
        FaultType::Ad => 1,
        // Spacers go at three spread-out gaps; positions are the distinct
        // evenly-strided triples.
        FaultType::Dsv => n / 3,
        // Any set of `degree` discs can carry deformed conductors.
        FaultType::Fb => binomial(n, degree as usize),
        // Shorts bridge adjacent sections: runs of `degree`.
        FaultType::Sc => n - degree as usize + 1,
    }
}

/// The three 0-based gap indices hosting DSV spacers at `position` (1-based).
pub fn dsv_gap_triple(winding: WindingId, position: u16) -> [usize; 3] {
    let n = winding.disc_count();
    let stride = n / 3;
    let p = position as usize - 1;
    [p, p + stride, p + 2 * stride]
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// The 0-based disc subset buckled by an FB fault at `position` (1-based):
/// the (position-1)-th `degree`-subset of the discs in lexicographic order.
/// Position 1 is always the leading run {0, .., degree-1}.
pub fn fb_disc_subset(winding: WindingId, degree: u8, position: u16) -> Vec<usize> {
    let n = winding.disc_count();
    let d = degree as usize;
    let mut rank = position as usize - 1;
    let mut subset = Vec::with_capacity(d);
    let mut next = 0usize;
    let mut remaining = d;
    while remaining > 0 {
        for candidate in next..n {
            let with_candidate = binomial(n - candidate - 1, remaining - 1);
            if rank < with_candidate {
                subset.push(candidate);
                next = candidate + 1;
                remaining -= 1;
                break;
            }
            rank -= with_candidate;
        }
    }
    subset
}

/// Returns a perturbed copy of `net` with the fault applied. The input is
/// left untouched.
pub fn apply_fault(net: &LadderNetwork, fault: &FaultSpec) -> Result<LadderNetwork> {
    let winding = net.winding_id()?;
    let n = net.disc_count();
    let pcount = position_count(fault.fault_type, fault.degree, winding);
    if fault.position as usize > pcount {
        return Err(Error::domain(format!(
            "{} degree {} has {} valid positions, got {}",
            fault.fault_type, fault.degree, pcount, fault.position
        )));
    }
    if fault.fault_type == FaultType::Sc && fault.degree as usize > n - 1 {
        return Err(Error::domain(format!(
            "SC degree {} exceeds disc count - 1 = {}",
            fault.degree,
            n - 1
        )));
    }
    let mut out = net.clone();
    match fault.fault_type {
        FaultType::Normal => unreachable!("rejected by FaultSpec::new"),
        FaultType::Ad => {
            let delta = ad_displacement_mm(winding, fault.degree);
            let mutual_factor = 1.0 - AD_MUTUAL_SLOPE * delta;
            let cg_factor = 1.0 - AD_END_CG_SLOPE * delta;
            for hv in 0..n {
                for lv in n..2 * n {
                    out.set_mutual(hv, lv, net.mutual(hv, lv) * mutual_factor);
                }
            }
            out.hv[0].ground_cap *= cg_factor;
            out.hv[n - 1].ground_cap *= cg_factor;
        }
        FaultType::Dsv => {
            let spacing = dsv_spacing_mm(winding, fault.degree);
            let factor = DSV_BASE_GAP_MM / (DSV_BASE_GAP_MM + spacing);
            for gap in dsv_gap_triple(winding, fault.position) {
                out.hv[gap].series_cap *= factor;
            }
        }
        FaultType::Fb => {
            let arc = FB_ARC_DEGREES / 360.0;
            let bulge = FB_RADIAL_RATIO / (1.0 - FB_RADIAL_RATIO);
            let ciw_factor = (1.0 - arc * bulge) * FB_SENSITIVITY;
            for disc in fb_disc_subset(winding, fault.degree, fault.position) {
                out.inter_winding_cap[disc] *= ciw_factor;
                out.hv[disc].inductance *= FB_INDUCTANCE_FACTOR;
            }
        }
        FaultType::Sc => {
            let start = fault.position as usize - 1;
            let run: Vec<usize> = (start..start + fault.degree as usize).collect();
            for &disc in &run {
                out.shorted[disc] = true;
            }
            // Each mutual entry touching at least one shorted disc is
            // scaled exactly once.
            for a in 0..2 * n {
                for b in (a + 1)..2 * n {
                    if run.contains(&a) || run.contains(&b) {
                        out.set_mutual(a, b, net.mutual(a, b) * SC_MUTUAL_FACTOR);
                    }
                }
            }
        }
    }
    Ok(out)
}

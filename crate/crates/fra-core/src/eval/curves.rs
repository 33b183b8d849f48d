//! Curve statistics: correlation coefficient, Euclidean distance, mean
//! curves, and the CC-ED map.

use crate::data::{FaultLabel, FaultType, FraSweep, LabeledDataset};
use crate::error::{Error, Result};

/// Pearson correlation coefficient between two equal-length vectors.
pub fn cc(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::domain("correlation needs at least two points"));
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(Error::domain("correlation of a constant vector"));
    }
    Ok(cov / (var_x * var_y).sqrt())
}

/// Euclidean distance between two equal-length vectors.
pub fn ed(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter()
        .zip(y)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

fn sweep_f64(s: &FraSweep) -> Vec<f64> {
    s.values().iter().map(|&v| v as f64).collect()
}

/// CC between two sweeps.
pub fn cc_sweeps(a: &FraSweep, b: &FraSweep) -> Result<f64> {
    if a.grid_id() != b.grid_id() {
        return Err(Error::domain("sweeps live on different grids"));
    }
    cc(&sweep_f64(a), &sweep_f64(b))
}

/// ED between two sweeps.
pub fn ed_sweeps(a: &FraSweep, b: &FraSweep) -> Result<f64> {
    if a.grid_id() != b.grid_id() {
        return Err(Error::domain("sweeps live on different grids"));
    }
    ed(&sweep_f64(a), &sweep_f64(b))
}

/// Pointwise arithmetic mean of a non-empty set of sweeps on one grid.
pub fn mean_curve(sweeps: &[&FraSweep]) -> Result<FraSweep> {
    let first = sweeps
        .first()
        .ok_or_else(|| Error::domain("mean of an empty sweep list"))?;
    let grid_id = first.grid_id();
    let len = first.len();
    let mut acc = vec![0.0f64; len];
    for s in sweeps {
        if s.grid_id() != grid_id {
            return Err(Error::domain("sweeps live on different grids"));
        }
        for (a, &v) in acc.iter_mut().zip(s.values()) {
            *a += v as f64;
        }
    }
    let n = sweeps.len() as f64;
    let values = acc.into_iter().map(|v| (v / n) as f32).collect();
    FraSweep::with_grid_id(values, grid_id, len)
}

/// One sample's coordinates on the CC-ED map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcEdPoint {
    pub sample_index: usize,
    pub cc: f64,
    pub ed: f64,
}

/// Samples of one (type, degree) group: their mean curve and map points.
#[derive(Debug, Clone)]
pub struct DegreeGroup {
    pub fault_type: FaultType,
    pub degree: u8,
    pub mean: FraSweep,
    pub points: Vec<CcEdPoint>,
}

/// CC-ED statistics of a filtered dataset against a reference curve.
#[derive(Debug, Clone)]
pub struct CurveStats {
    pub reference: FraSweep,
    pub groups: Vec<DegreeGroup>,
}

impl CurveStats {
    pub fn point_count(&self) -> usize {
        self.groups.iter().map(|g| g.points.len()).sum()
    }
}

/// Builds per-degree mean curves and one (CC, ED) point per sample for all
/// samples passing `filter`, measured against `reference` (typically the
/// mean normal curve).
pub fn cc_ed_map(
    ds: &LabeledDataset,
    reference: &FraSweep,
    filter: impl Fn(&FaultLabel) -> bool,
) -> Result<CurveStats> {
    if reference.grid_id() != ds.grid().id() {
        return Err(Error::domain("reference curve is on a different grid"));
    }
    let mut keys: Vec<(FaultType, u8)> = Vec::new();
    for s in ds.samples() {
        if filter(&s.label) {
            let key = (s.label.fault_type, s.label.degree);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
    }
    keys.sort();
    let mut groups = Vec::with_capacity(keys.len());
    for (fault_type, degree) in keys {
        let members: Vec<(usize, &FraSweep)> = ds
            .samples()
            .iter()
            .enumerate()
            .filter(|(_, s)| {
                filter(&s.label) && s.label.fault_type == fault_type && s.label.degree == degree
            })
            .map(|(i, s)| (i, &s.sweep))
            .collect();
        let sweeps: Vec<&FraSweep> = members.iter().map(|(_, s)| *s).collect();
        let mean = mean_curve(&sweeps)?;
        let mut points = Vec::with_capacity(members.len());
        for (sample_index, sweep) in members {
            points.push(CcEdPoint {
                sample_index,
                cc: cc_sweeps(reference, sweep)?,
                ed: ed_sweeps(reference, sweep)?,
            });
        }
        groups.push(DegreeGroup {
            fault_type,
            degree,
            mean,
            points,
        });
    }
    Ok(CurveStats {
        reference: reference.clone(),
        groups,
    })
}

//! Frequency grid and single sweeps.

use crate::error::{Error, Result};

/// Number of points in every sweep.
pub const GRID_POINTS: usize = 2000;

/// Magnitude floor in dB; sweep values never go below this.
pub const DB_FLOOR: f32 = -160.0;

/// Fingerprint of a grid (FNV-1a over the defining parameters). Sweeps carry
/// this so mixing grids is caught at the type's boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridId(pub u64);

impl std::fmt::Display for GridId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl GridId {
    pub fn parse(s: &str) -> Result<Self> {
        u64::from_str_radix(s.trim(), 16)
            .map(GridId)
            .map_err(|e| Error::domain(format!("bad grid id {s:?}: {e}")))
    }
}

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Log-spaced measurement grid of exactly [`GRID_POINTS`] frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    f_min: f64,
    f_max: f64,
    points: Vec<f64>,
}

impl FrequencyGrid {
    /// Builds the log-spaced grid from `f_min` to `f_max` inclusive.
    pub fn log_spaced(f_min: f64, f_max: f64) -> Result<Self> {
        if !(f_min.is_finite() && f_max.is_finite()) || f_min <= 0.0 || f_max <= f_min {
            return Err(Error::domain(format!(
                "grid bounds must satisfy 0 < f_min < f_max, got {f_min} .. {f_max}"
            )));
        }
        let n = GRID_POINTS;
        let l0 = f_min.log10();
        let l1 = f_max.log10();
        let step = (l1 - l0) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| 10f64.powf(l0 + step * i as f64)).collect();
        points[0] = f_min;
        points[n - 1] = f_max;
        Ok(FrequencyGrid {
            f_min,
            f_max,
            points,
        })
    }

    /// The default 1 kHz .. 1 MHz measurement grid.
    pub fn canonical() -> Self {
        Self::log_spaced(1e3, 1e6).expect("canonical grid bounds are valid")
    }

    pub fn id(&self) -> GridId {
        let bytes = self
            .f_min
            .to_bits()
            .to_le_bytes()
            .into_iter()
            .chain(self.f_max.to_bits().to_le_bytes())
            .chain((self.points.len() as u32).to_le_bytes());
        GridId(fnv1a(bytes))
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }
}

/// One measured or simulated curve: dB magnitudes on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FraSweep {
    values: Vec<f32>,
    grid_id: GridId,
}

impl FraSweep {
    pub fn new(values: Vec<f32>, grid: &FrequencyGrid) -> Result<Self> {
        Self::with_grid_id(values, grid.id(), grid.len())
    }

    pub(crate) fn with_grid_id(values: Vec<f32>, grid_id: GridId, grid_len: usize) -> Result<Self> {
        if values.len() != grid_len {
            return Err(Error::domain(format!(
                "sweep has {} values for a {}-point grid",
                values.len(),
                grid_len
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::domain(format!("non-finite sweep value at index {i}")));
            }
            if *v < DB_FLOOR {
                return Err(Error::domain(format!(
                    "sweep value {v} dB at index {i} is below the {DB_FLOOR} dB floor"
                )));
            }
        }
        Ok(FraSweep { values, grid_id })
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn grid_id(&self) -> GridId {
        self.grid_id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_grid_shape() {
        let g = FrequencyGrid::canonical();
        assert_eq!(g.len(), GRID_POINTS);
        assert_eq!(g.points()[0], 1e3);
        assert_eq!(g.points()[GRID_POINTS - 1], 1e6);
        assert!(g.points().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn log_spacing_ratio_is_constant() {
        let g = FrequencyGrid::canonical();
        let r0 = g.points()[1] / g.points()[0];
        for w in g.points().windows(2) {
            let r = w[1] / w[0];
            assert!((r / r0 - 1.0).abs() < 1e-9, "ratio drift: {r} vs {r0}");
        }
    }

    #[test]
    fn grid_id_distinguishes_ranges() {
        let a = FrequencyGrid::canonical();
        let b = FrequencyGrid::log_spaced(10.0, 1e6).unwrap();
        assert_ne!(a.id(), b.id());
        assert_eq!(a.id(), FrequencyGrid::canonical().id());
    }

    #[test]
    fn bad_bounds_rejected() {
        assert!(FrequencyGrid::log_spaced(0.0, 1e6).is_err());
        assert!(FrequencyGrid::log_spaced(1e6, 1e3).is_err());
        assert!(FrequencyGrid::log_spaced(f64::NAN, 1e3).is_err());
    }

    #[test]
    fn sweep_validation() {
        let g = FrequencyGrid::canonical();
        assert!(FraSweep::new(vec![-10.0; GRID_POINTS], &g).is_ok());
        assert!(FraSweep::new(vec![-10.0; 3], &g).is_err());
        let mut v = vec![-10.0; GRID_POINTS];
        v[7] = f32::NAN;
        assert!(FraSweep::new(v, &g).is_err());
        let mut v = vec![-10.0; GRID_POINTS];
        v[7] = -161.0;
        assert!(FraSweep::new(v, &g).is_err());
    }

    #[test]
    fn grid_id_roundtrips_through_text() {
        let id = FrequencyGrid::canonical().id();
        assert_eq!(GridId::parse(&id.to_string()).unwrap(), id);
    }
}

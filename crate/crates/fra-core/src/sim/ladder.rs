//! Winding geometry and nominal electrical parameters.

use crate::data::WindingId;
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Physical geometry of one winding pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WindingSpec {
    pub disc_count: usize,
    pub hv_outer_mm: f64,
    pub hv_inner_mm: f64,
    pub lv_outer_mm: f64,
    pub lv_inner_mm: f64,
    pub height_mm: f64,
}

impl WindingSpec {
    pub fn disc10() -> Self {
        WindingSpec {
            disc_count: 10,
            hv_outer_mm: 934.0,
            hv_inner_mm: 780.0,
            lv_outer_mm: 682.0,
            lv_inner_mm: 520.0,
            height_mm: 205.0,
        }
    }

    pub fn disc12() -> Self {
        WindingSpec {
            disc_count: 12,
            hv_outer_mm: 467.0,
            hv_inner_mm: 390.0,
            lv_outer_mm: 341.0,
            lv_inner_mm: 260.0,
            height_mm: 205.0,
        }
    }

    pub fn for_winding(w: WindingId) -> Self {
        match w {
            WindingId::Disc10 => Self::disc10(),
            WindingId::Disc12 => Self::disc12(),
        }
    }

    pub fn winding_id(&self) -> Result<WindingId> {
        match self.disc_count {
            10 => Ok(WindingId::Disc10),
            12 => Ok(WindingId::Disc12),
            n => Err(Error::domain(format!("unsupported disc count {n}"))),
        }
    }

    pub fn hv_mean_diameter_mm(&self) -> f64 {
        0.5 * (self.hv_outer_mm + self.hv_inner_mm)
    }

    pub fn lv_mean_diameter_mm(&self) -> f64 {
        0.5 * (self.lv_outer_mm + self.lv_inner_mm)
    }
}

/// Nominal per-disc electrical values for the 10-disc reference geometry.
/// Chosen to place the dominant resonances inside 10 kHz .. 1 MHz.
#[derive(Debug, Clone, Copy)]
pub struct Nominal {
    pub hv_inductance: f64,
    pub lv_inductance: f64,
    pub resistance: f64,
    pub series_cap: f64,
    pub ground_cap: f64,
    /// LV discs sit closer to the core leg, far from the tank wall, so
    /// their ground capacitance is well below the HV value. This is also
    /// what keeps the inter-winding path from dominating the end-to-end
    /// response.
    pub lv_ground_cap: f64,
    pub inter_winding_cap: f64,
    /// Coupling coefficient between adjacent discs of one winding.
    pub k_adjacent: f64,
    /// Multiplicative coupling decay per extra disc of separation.
    pub k_decay: f64,
    /// Coupling coefficient between facing HV/LV discs.
    pub k_facing: f64,
}

impl Default for Nominal {
    fn default() -> Self {
        Nominal {
            hv_inductance: 1.0e-3,
            lv_inductance: 0.25e-3,
            resistance: 0.5,
            series_cap: 1.0e-9,
            ground_cap: 0.5e-9,
            lv_ground_cap: 0.1e-9,
            inter_winding_cap: 1.0e-9,
            k_adjacent: 0.3,
            k_decay: 0.5,
            k_facing: 0.4,
        }
    }
}

/// Electrical parameters of one disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscParams {
    pub resistance: f64,
    pub inductance: f64,
    pub series_cap: f64,
    pub ground_cap: f64,
}

/// Full ladder model: per-disc parameters for both windings, inter-winding
/// capacitances, the mutual-inductance couplings, and short-circuit flags.
///
/// Inductor branches are indexed 0..N for HV discs and N..2N for LV discs;
/// the mutual matrix holds coupling terms for those branch pairs (its
/// diagonal is unused — self-inductance lives in [`DiscParams`]).
#[derive(Debug, Clone, PartialEq)]
pub struct LadderNetwork {
    pub hv: Vec<DiscParams>,
    pub lv: Vec<DiscParams>,
    pub inter_winding_cap: Vec<f64>,
    mutual: Vec<f64>,
    pub shorted: Vec<bool>,
}

impl LadderNetwork {
    /// Builds a network from explicit parts, enforcing the invariants:
    /// positive parameters on every unshorted disc, a symmetric mutual
    /// matrix (diagonal unused), and passive couplings
    /// `|M_ab| <= sqrt(L_a L_b)`.
    pub fn from_parts(
        hv: Vec<DiscParams>,
        lv: Vec<DiscParams>,
        inter_winding_cap: Vec<f64>,
        mutual: Vec<f64>,
        shorted: Vec<bool>,
    ) -> Result<Self> {
        let n = hv.len();
        if n == 0 {
            return Err(Error::domain("a winding needs at least one disc"));
        }
        if lv.len() != n || inter_winding_cap.len() != n || shorted.len() != n {
            return Err(Error::domain("per-disc vectors disagree in length"));
        }
        if mutual.len() != 4 * n * n {
            return Err(Error::domain(format!(
                "mutual matrix must be {0}x{0} for {n} discs",
                2 * n
            )));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        for (k, d) in hv.iter().enumerate() {
            if !shorted[k]
                && !(positive(d.resistance)
                    && positive(d.inductance)
                    && positive(d.series_cap)
                    && positive(d.ground_cap))
            {
                return Err(Error::domain(format!("HV disc {k} has non-positive values")));
            }
        }
        for (k, d) in lv.iter().enumerate() {
            if !(positive(d.resistance)
                && positive(d.inductance)
                && positive(d.series_cap)
                && positive(d.ground_cap))
            {
                return Err(Error::domain(format!("LV disc {k} has non-positive values")));
            }
        }
        if !inter_winding_cap.iter().all(|&c| positive(c)) {
            return Err(Error::domain("inter-winding capacitances must be positive"));
        }
        let net = LadderNetwork {
            hv,
            lv,
            inter_winding_cap,
            mutual,
            shorted,
        };
        let b = net.branch_count();
        for i in 0..b {
            for j in (i + 1)..b {
                if net.mutual(i, j) != net.mutual(j, i) {
                    return Err(Error::domain(format!(
                        "mutual matrix asymmetric at ({i}, {j})"
                    )));
                }
                let bound = (net.branch_inductance(i) * net.branch_inductance(j)).sqrt();
                if net.mutual(i, j).abs() > bound {
                    return Err(Error::domain(format!(
                        "coupling ({i}, {j}) exceeds sqrt(L_i L_j)"
                    )));
                }
            }
        }
        Ok(net)
    }

    pub(crate) fn assemble(
        hv: Vec<DiscParams>,
        lv: Vec<DiscParams>,
        inter_winding_cap: Vec<f64>,
        mutual: Vec<f64>,
        shorted: Vec<bool>,
    ) -> Self {
        let n = hv.len();
        debug_assert_eq!(lv.len(), n);
        debug_assert_eq!(inter_winding_cap.len(), n);
        debug_assert_eq!(mutual.len(), 4 * n * n);
        debug_assert_eq!(shorted.len(), n);
        LadderNetwork {
            hv,
            lv,
            inter_winding_cap,
            mutual,
            shorted,
        }
    }

    /// The geometry this network models, when it is one of the two real
    /// winding pairs.
    pub fn winding_id(&self) -> Result<WindingId> {
        match self.disc_count() {
            10 => Ok(WindingId::Disc10),
            12 => Ok(WindingId::Disc12),
            n => Err(Error::domain(format!(
                "{n}-disc networks have no catalog winding"
            ))),
        }
    }

    pub fn disc_count(&self) -> usize {
        self.hv.len()
    }

    /// Number of inductor branches (HV + LV discs).
    pub fn branch_count(&self) -> usize {
        2 * self.disc_count()
    }

    /// Self-inductance of branch `b`.
    pub fn branch_inductance(&self, b: usize) -> f64 {
        let n = self.disc_count();
        if b < n {
            self.hv[b].inductance
        } else {
            self.lv[b - n].inductance
        }
    }

    /// Mutual inductance between branches `a` and `b` (zero on the diagonal).
    pub fn mutual(&self, a: usize, b: usize) -> f64 {
        self.mutual[a * self.branch_count() + b]
    }

    pub(crate) fn set_mutual(&mut self, a: usize, b: usize, v: f64) {
        let n = self.branch_count();
        self.mutual[a * n + b] = v;
        self.mutual[b * n + a] = v;
    }
}

/// Builds the nominal network for a geometry, with optional multiplicative
/// Gaussian jitter on every per-disc parameter. Deterministic given
/// `(spec, jitter_seed, jitter_sigma)`.
///
/// Capacitances scale linearly and inductances quadratically with the mean
/// diameter ratio to the 10-disc reference geometry.
pub fn base_parameters(
    spec: &WindingSpec,
    jitter_seed: u64,
    jitter_sigma: f64,
) -> Result<LadderNetwork> {
    if !(0.0..=0.05).contains(&jitter_sigma) {
        return Err(Error::domain(format!(
            "jitter sigma must lie in [0, 0.05], got {jitter_sigma}"
        )));
    }
    spec.winding_id()?;
    let nominal = Nominal::default();
    let reference = WindingSpec::disc10();
    let hv_ratio = spec.hv_mean_diameter_mm() / reference.hv_mean_diameter_mm();
    let lv_ratio = spec.lv_mean_diameter_mm() / reference.lv_mean_diameter_mm();
    let ciw_ratio = 0.5 * (hv_ratio + lv_ratio);

    let n = spec.disc_count;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(jitter_seed, &[0x6a]));
    let normal = if jitter_sigma > 0.0 {
        Some(Normal::new(0.0, jitter_sigma).expect("sigma validated"))
    } else {
        None
    };
    let jitter = |rng: &mut ChaCha8Rng| -> f64 {
        match &normal {
            Some(d) => 1.0 + d.sample(rng),
            None => 1.0,
        }
    };

    // Draw order is fixed: HV discs (R, L, Cs, Cg, Ciw), then LV discs
    // (R, L, Cs, Cg).
    let mut hv = Vec::with_capacity(n);
    let mut inter_winding_cap = Vec::with_capacity(n);
    for _ in 0..n {
        hv.push(DiscParams {
            resistance: nominal.resistance * jitter(&mut rng),
            inductance: nominal.hv_inductance * hv_ratio * hv_ratio * jitter(&mut rng),
            series_cap: nominal.series_cap * hv_ratio * jitter(&mut rng),
            ground_cap: nominal.ground_cap * hv_ratio * jitter(&mut rng),
        });
        inter_winding_cap.push(nominal.inter_winding_cap * ciw_ratio * jitter(&mut rng));
    }
    let mut lv = Vec::with_capacity(n);
    for _ in 0..n {
        lv.push(DiscParams {
            resistance: nominal.resistance * jitter(&mut rng),
            inductance: nominal.lv_inductance * lv_ratio * lv_ratio * jitter(&mut rng),
            series_cap: nominal.series_cap * lv_ratio * jitter(&mut rng),
            ground_cap: nominal.lv_ground_cap * lv_ratio * jitter(&mut rng),
        });
    }

    // Coupling coefficients depend only on disc separation, which keeps a
    // jitter-free network exactly mirror-symmetric.
    let branches = 2 * n;
    let mut mutual = vec![0.0; branches * branches];
    let inductance = |b: usize| -> f64 {
        if b < n {
            hv[b].inductance
        } else {
            lv[b - n].inductance
        }
    };
    for a in 0..branches {
        for b in (a + 1)..branches {
            let (da, wa) = (a % n, a / n);
            let (db, wb) = (b % n, b / n);
            let sep = da.abs_diff(db);
            let k = if wa == wb {
                nominal.k_adjacent * nominal.k_decay.powi(sep as i32 - 1)
            } else {
                nominal.k_facing * nominal.k_decay.powi(sep as i32)
            };
            let m = k * (inductance(a) * inductance(b)).sqrt();
            mutual[a * branches + b] = m;
            mutual[b * branches + a] = m;
        }
    }

    Ok(LadderNetwork::assemble(
        hv,
        lv,
        inter_winding_cap,
        mutual,
        vec![false; n],
    ))
}

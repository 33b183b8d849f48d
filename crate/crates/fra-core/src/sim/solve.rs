//! Complex nodal analysis of the ladder network.
//!
//! Node layout for an N-disc pair: HV chain nodes `0..=N`, LV chain nodes
//! `N+1..=2N+1`; ground is the implicit reference. Coupled R-L branches are
//! folded into the nodal matrix through the inverse of their impedance
//! block, so the system stays at `2N+2` unknowns and one dense complex LU
//! with partial pivoting solves each frequency point.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::fault::SC_BRANCH_OHMS;
use super::ladder::LadderNetwork;
use crate::data::{Connection, FraSweep, FrequencyGrid};
use crate::error::{Error, Result};
use crate::linalg::{invert, lu_solve_in_place, CMat};

/// How a sweep is injected and measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetup {
    pub connection: Connection,
    pub source_ohms: f64,
    pub meas_ohms: f64,
    pub db_floor: f64,
    swapped: bool,
}

impl MeasurementSetup {
    pub fn new(connection: Connection, source_ohms: f64, meas_ohms: f64) -> Result<Self> {
        if source_ohms <= 0.0 || meas_ohms <= 0.0 {
            return Err(Error::domain("measurement impedances must be positive"));
        }
        Ok(MeasurementSetup {
            connection,
            source_ohms,
            meas_ohms,
            db_floor: crate::data::DB_FLOOR as f64,
            swapped: false,
        })
    }

    /// End-to-end: source at HV terminal 1, measurement at HV terminal 2,
    /// LV floating.
    pub fn ee() -> Self {
        Self::new(Connection::Ee, 50.0, 50.0).expect("positive impedances")
    }

    /// Capacitive inter-winding: source at HV terminal 1, measurement at LV
    /// terminal 1, far ends floating.
    pub fn ciw() -> Self {
        Self::new(Connection::Ciw, 50.0, 50.0).expect("positive impedances")
    }

    /// Exchanges the source and measurement terminals.
    pub fn swapped(mut self) -> Self {
        self.swapped = !self.swapped;
        self
    }

    fn terminal_nodes(&self, n: usize) -> (usize, usize) {
        let far = match self.connection {
            Connection::Ee => n,
            Connection::Ciw => n + 1,
        };
        if self.swapped {
            (far, 0)
        } else {
            (0, far)
        }
    }

    fn injection_node(&self, n: usize) -> usize {
        self.terminal_nodes(n).0
    }

    fn measurement_node(&self, n: usize) -> usize {
        self.terminal_nodes(n).1
    }
}

fn stamp(y: &mut CMat, a: Option<usize>, b: Option<usize>, yval: Complex64) {
    if let Some(a) = a {
        y.add(a, a, yval);
    }
    if let Some(b) = b {
        y.add(b, b, yval);
    }
    if let (Some(a), Some(b)) = (a, b) {
        y.add(a, b, -yval);
        y.add(b, a, -yval);
    }
}

/// Branch endpoints (n1, n2) for inductor branch `b` of an N-disc network.
fn branch_nodes(b: usize, n: usize) -> (usize, usize) {
    if b < n {
        (b, b + 1)
    } else {
        let k = b - n;
        (n + 1 + k, n + 2 + k)
    }
}

/// Solves the transfer ratio `V_measured / V_source` at one frequency.
///
/// Shorted disc branches are replaced by a 1 mΩ resistance and leave the
/// coupled-inductor block. The network is passive behind a resistive
/// source, so `|H|` never exceeds 1.
pub fn solve_at(net: &LadderNetwork, setup: &MeasurementSetup, f: f64) -> Result<Complex64> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::domain(format!("frequency must be positive, got {f}")));
    }
    let n = net.disc_count();
    let n_nodes = 2 * n + 2;
    let omega = 2.0 * PI * f;
    let jw = Complex64::new(0.0, omega);
    let singular = || Error::numerical(format!("f = {f} Hz"), "singular nodal system");

    // Impedance block of the active (unshorted) coupled branches.
    let active: Vec<usize> = (0..2 * n).filter(|&b| b >= n || !net.shorted[b]).collect();
    let m = active.len();
    let mut z = CMat::zeros(m);
    for (i, &a) in active.iter().enumerate() {
        let (r, l) = if a < n {
            (net.hv[a].resistance, net.hv[a].inductance)
        } else {
            (net.lv[a - n].resistance, net.lv[a - n].inductance)
        };
        z.set(i, i, Complex64::new(r, omega * l));
        for (j, &b) in active.iter().enumerate().skip(i + 1) {
            let zm = jw * net.mutual(a, b);
            z.set(i, j, zm);
            z.set(j, i, zm);
        }
    }
    let mut yb = invert(&z).ok_or_else(singular)?;
    // Force bitwise symmetry so reciprocity is not lost to rounding order.
    for i in 0..m {
        for j in (i + 1)..m {
            let s = (yb.get(i, j) + yb.get(j, i)) * 0.5;
            yb.set(i, j, s);
            yb.set(j, i, s);
        }
    }

    let mut y = CMat::zeros(n_nodes);
    // Coupled-branch multiport stamp.
    for (i, &a) in active.iter().enumerate() {
        let (p1, p2) = branch_nodes(a, n);
        for (j, &b) in active.iter().enumerate() {
            let v = yb.get(i, j);
            let (q1, q2) = branch_nodes(b, n);
            y.add(p1, q1, v);
            y.add(p1, q2, -v);
            y.add(p2, q1, -v);
            y.add(p2, q2, v);
        }
    }
    // Shorted branches become a milliohm of metal.
    let g_short = Complex64::new(1.0 / SC_BRANCH_OHMS, 0.0);
    for k in 0..n {
        if net.shorted[k] {
            stamp(&mut y, Some(k), Some(k + 1), g_short);
        }
    }
    // Capacitances: series (across each branch), ground (half at each
    // branch end), inter-winding (half per facing node pair).
    for k in 0..n {
        let (h1, h2) = (k, k + 1);
        let (l1, l2) = (n + 1 + k, n + 2 + k);
        stamp(&mut y, Some(h1), Some(h2), jw * net.hv[k].series_cap);
        stamp(&mut y, Some(h1), None, jw * (0.5 * net.hv[k].ground_cap));
        stamp(&mut y, Some(h2), None, jw * (0.5 * net.hv[k].ground_cap));
        stamp(&mut y, Some(l1), Some(l2), jw * net.lv[k].series_cap);
        stamp(&mut y, Some(l1), None, jw * (0.5 * net.lv[k].ground_cap));
        stamp(&mut y, Some(l2), None, jw * (0.5 * net.lv[k].ground_cap));
        stamp(&mut y, Some(h1), Some(l1), jw * (0.5 * net.inter_winding_cap[k]));
        stamp(&mut y, Some(h2), Some(l2), jw * (0.5 * net.inter_winding_cap[k]));
    }
    // Source (Norton equivalent of 1 V behind the source resistance) and
    // measurement termination.
    let inj = setup.injection_node(n);
    let meas = setup.measurement_node(n);
    let gs = Complex64::new(1.0 / setup.source_ohms, 0.0);
    y.add(inj, inj, gs);
    y.add(meas, meas, Complex64::new(1.0 / setup.meas_ohms, 0.0));
    let mut rhs = vec![Complex64::ZERO; n_nodes];
    rhs[inj] = gs;

    // Restore exact symmetry lost to accumulation order, then equilibrate
    // symmetrically to tame the admittance spread across the band.
    for i in 0..n_nodes {
        for j in (i + 1)..n_nodes {
            let s = (y.get(i, j) + y.get(j, i)) * 0.5;
            y.set(i, j, s);
            y.set(j, i, s);
        }
    }
    let mut d = vec![1.0f64; n_nodes];
    for (i, di) in d.iter_mut().enumerate() {
        let mag = y.get(i, i).norm();
        if mag > 1e-300 {
            *di = 1.0 / mag.sqrt();
        }
    }
    for i in 0..n_nodes {
        for j in 0..n_nodes {
            let scale = d[i] * d[j];
            y.set(i, j, y.get(i, j) * scale);
        }
    }
    for (r, di) in rhs.iter_mut().zip(&d) {
        *r *= *di;
    }

    if !lu_solve_in_place(&mut y, &mut rhs) {
        return Err(singular());
    }
    let h = rhs[meas] * d[meas];
    if !h.re.is_finite() || !h.im.is_finite() {
        return Err(Error::numerical(
            format!("f = {f} Hz"),
            "non-finite transfer ratio",
        ));
    }
    debug_assert!(h.norm() <= 1.0 + 1e-9, "passivity violated: |H| = {}", h.norm());
    Ok(h)
}

/// Runs a full sweep over the grid, converts to dB, adds seeded Gaussian
/// measurement noise of standard deviation `noise_db`, and clamps at the
/// dB floor.
pub fn sweep(
    net: &LadderNetwork,
    setup: &MeasurementSetup,
    grid: &FrequencyGrid,
    noise_seed: u64,
    noise_db: f64,
) -> Result<FraSweep> {
    if noise_db < 0.0 || !noise_db.is_finite() {
        return Err(Error::domain(format!(
            "noise level must be >= 0 dB, got {noise_db}"
        )));
    }
    let noise = if noise_db > 0.0 {
        Some((
            ChaCha8Rng::seed_from_u64(noise_seed),
            Normal::new(0.0, noise_db).expect("validated sigma"),
        ))
    } else {
        None
    };
    let mut rng_state = noise;
    let mut values = Vec::with_capacity(grid.len());
    for &f in grid.points() {
        let mag = solve_at(net, setup, f)?.norm();
        let mut db = if mag > 0.0 {
            20.0 * mag.log10()
        } else {
            setup.db_floor
        };
        if let Some((rng, dist)) = rng_state.as_mut() {
            db += dist.sample(rng);
        }
        values.push(db.max(setup.db_floor) as f32);
    }
    FraSweep::with_grid_id(values, grid.id(), grid.len())
}

/// Plain-text branch dump for debugging: `node_a node_b kind value` lines
/// with node 0 as ground, plus `M branch_a branch_b value` coupling lines.
pub fn netlist(net: &LadderNetwork, setup: &MeasurementSetup) -> String {
    let n = net.disc_count();
    let node = |i: usize| i + 1; // shift internal ids so ground owns 0
    let mut out = String::new();
    out.push_str(&format!(
        "# {} discs, {} connection; nodes: 0 ground, {}..{} HV, {}..{} LV\n",
        n,
        setup.connection,
        node(0),
        node(n),
        node(n + 1),
        node(2 * n + 1),
    ));
    out.push_str(&format!("0 {} R {:e}\n", node(0), setup.source_ohms));
    out.push_str(&format!(
        "0 {} R {:e}\n",
        node(setup.measurement_node(n)),
        setup.meas_ohms
    ));
    for b in 0..2 * n {
        let (a, c) = branch_nodes(b, n);
        if b < n && net.shorted[b] {
            out.push_str(&format!("{} {} R {:e}\n", node(a), node(c), SC_BRANCH_OHMS));
            continue;
        }
        let (r, l, cs) = if b < n {
            (
                net.hv[b].resistance,
                net.hv[b].inductance,
                net.hv[b].series_cap,
            )
        } else {
            (
                net.lv[b - n].resistance,
                net.lv[b - n].inductance,
                net.lv[b - n].series_cap,
            )
        };
        out.push_str(&format!("{} {} R {:e}\n", node(a), node(c), r));
        out.push_str(&format!("{} {} L {:e}\n", node(a), node(c), l));
        out.push_str(&format!("{} {} C {:e}\n", node(a), node(c), cs));
    }
    for k in 0..n {
        out.push_str(&format!(
            "{} 0 C {:e}\n",
            node(k),
            0.5 * net.hv[k].ground_cap
        ));
        out.push_str(&format!(
            "{} 0 C {:e}\n",
            node(k + 1),
            0.5 * net.hv[k].ground_cap
        ));
        out.push_str(&format!(
            "{} 0 C {:e}\n",
            node(n + 1 + k),
            0.5 * net.lv[k].ground_cap
        ));
        out.push_str(&format!(
            "{} 0 C {:e}\n",
            node(n + 2 + k),
            0.5 * net.lv[k].ground_cap
        ));
        out.push_str(&format!(
            "{} {} C {:e}\n",
            node(k),
            node(n + 1 + k),
            0.5 * net.inter_winding_cap[k]
        ));
        out.push_str(&format!(
            "{} {} C {:e}\n",
            node(k + 1),
            node(n + 2 + k),
            0.5 * net.inter_winding_cap[k]
        ));
    }
    for a in 0..2 * n {
        for b in (a + 1)..2 * n {
            out.push_str(&format!("M {a} {b} {:e}\n", net.mutual(a, b)));
        }
    }
    out
}

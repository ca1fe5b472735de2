use std::fmt::Write as _;
use std::path::Path;

use crate::basis::basis;
use crate::dg::{Discretization, SolutionField};
use crate::error::{Error, Result};
use crate::physics::{entropy, primitive_from_conservative, State};
use crate::tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorRecord {
    pub step: usize,
    pub time: f64,
    /// Σ ω J ½ρ|v|²
    pub kinetic_energy: f64,
    /// Σ ω J S
    pub entropy: f64,
    /// Σ ω J w · du/dt
    pub entropy_rate: f64,
    /// max |du/dt| over nodes and components
    pub max_residual: f64,
    pub min_density: f64,
    pub min_pressure: f64,
    /// ρ, u, v, w, p at every probe
    pub probes: Vec<[f64; 5]>,
}

impl MonitorRecord {
    pub fn is_finite(&self) -> bool {
        [self.time, self.kinetic_energy, self.entropy, self.entropy_rate, self.max_residual, self.min_density, self.min_pressure]
            .iter()
            .chain(self.probes.iter().flatten())
            .all(|v| v.is_finite())
    }
}

/// Conservative state at a point given in undeformed box coordinates.
pub fn probe_state(disc: &Discretization, field: &SolutionField, point: [f64; 3]) -> Result<State> {
    let spec = disc.mesh().spec();
    let mut cell = [0; 3];
    let mut xi = [0.0; 3];
    for a in 0..3 {
        let [lo, hi] = spec.bounds[a];
        if !(point[a] >= lo && point[a] <= hi) {
            return Err(Error::Parameter(format!("probe {point:?} lies outside the mesh bounds")));
        }
        let h = (hi - lo) / spec.counts[a] as f64;
        let c = (((point[a] - lo) / h).floor() as usize).min(spec.counts[a] - 1);
        cell[a] = c;
        xi[a] = (2.0 * (point[a] - lo - c as f64 * h) / h - 1.0).clamp(-1.0, 1.0);
    }
    let e = disc.mesh().element_at(cell);
    let p = disc.orders().get(e);
    let l: Vec<Vec<f64>> = (0..3).map(|a| basis(p[a], disc.kind()).map(|b| b.lagrange_at(xi[a]))).collect::<Result<_>>()?;
    let n = p.map(|v| v + 1);
    let mut s = State::ZERO;
    for (idx, u) in field.element(e).iter().enumerate() {
        let [i, j, k] = tensor::unpack(n, idx);
        s += *u * (l[0][i] * l[1][j] * l[2][k]);
    }
    Ok(s)
}

/// Evaluate all monitor quantities; costs one residual evaluation.
pub fn compute_monitors(disc: &Discretization, field: &SolutionField, step: usize, probes: &[[f64; 3]]) -> Result<MonitorRecord> {
    let gas = *disc.gas();
    let r = disc.residual(field)?;
    let mut ke = Vec::with_capacity(field.data().len());
    let mut ent = Vec::with_capacity(field.data().len());
    let (mut min_rho, mut min_p) = (f64::INFINITY, f64::INFINITY);
    for (e, ue) in field.data().iter().enumerate() {
        let mut k = Vec::with_capacity(ue.len());
        let mut s = Vec::with_capacity(ue.len());
        for (n, u) in ue.iter().enumerate() {
            let q = primitive_from_conservative(u, &gas).map_err(|err| err.at(e, n))?;
            k.push(0.5 * q.rho * crate::linalg::dot3(q.v, q.v));
            s.push(entropy(u, &gas)?);
            min_rho = min_rho.min(q.rho);
            min_p = min_p.min(q.p);
        }
        ke.push(k);
        ent.push(s);
    }
    let probes = probes
        .iter()
        .map(|p| {
            let s = probe_state(disc, field, *p)?;
            let q = primitive_from_conservative(&s, &gas)?;
            Ok([q.rho, q.v[0], q.v[1], q.v[2], q.p])
        })
        .collect::<Result<_>>()?;
    Ok(MonitorRecord {
        step,
        time: field.time,
        kinetic_energy: disc.integrate_scalar(&ke),
        entropy: disc.integrate_scalar(&ent),
        entropy_rate: disc.entropy_rate(field.data(), &r)?,
        max_residual: r.iter().flatten().map(State::max_abs).fold(0.0, f64::max),
        min_density: min_rho,
        min_pressure: min_p,
        probes,
    })
}

pub fn monitor_header(probes: usize) -> String {
    let mut h = String::from("step,time,kinetic_energy,entropy,entropy_rate,max_residual,min_density,min_pressure");
    for i in 0..probes {
        for c in ["rho", "u", "v", "w", "p"] {
            let _ = write!(h, ",probe{i}_{c}");
        }
    }
    h
}

/// One CSV line, 17 significant digits per real.
pub fn monitor_line(r: &MonitorRecord) -> String {
    let mut s = format!("{},{:.16e}", r.step, r.time);
    for v in [r.kinetic_energy, r.entropy, r.entropy_rate, r.max_residual, r.min_density, r.min_pressure]
        .iter()
        .chain(r.probes.iter().flatten())
    {
        let _ = write!(s, ",{v:.16e}");
    }
    s
}

pub fn write_monitors(records: &[MonitorRecord], probes: usize, path: &Path) -> Result<()> {
    let mut text = monitor_header(probes);
    text.push('\n');
    for r in records {
        text.push_str(&monitor_line(r));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

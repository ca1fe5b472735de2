//! Two-register low-storage explicit Runge-Kutta schemes and CFL step control.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dg::{Discretization, ElementData, SolutionField};
use crate::error::{Error, Result};
use crate::physics::{primitive_from_conservative, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RkScheme {
    /// Williamson three-stage, third order.
    Rk3LowStorage,
    /// Carpenter-Kennedy five-stage, fourth order.
    Rk45LowStorage,
}

const RK3_A: [f64; 3] = [0.0, -5.0 / 9.0, -153.0 / 128.0];
const RK3_B: [f64; 3] = [1.0 / 3.0, 15.0 / 16.0, 8.0 / 15.0];
const RK3_C: [f64; 3] = [0.0, 1.0 / 3.0, 3.0 / 4.0];

const RK45_A: [f64; 5] = [
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
];
const RK45_B: [f64; 5] = [
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
];
const RK45_C: [f64; 5] = [
    0.0,
    1432997174477.0 / 9575080441755.0,
    // Σ_j a_3j of the A/B pairs above; the often-quoted 2526269341429/6820363183726 is off by 4e-8
    0.37040095736420475,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
];

impl RkScheme {
    pub fn a(&self) -> &'static [f64] {
        match self {
            RkScheme::Rk3LowStorage => &RK3_A,
            RkScheme::Rk45LowStorage => &RK45_A,
        }
    }

    pub fn b(&self) -> &'static [f64] {
        match self {
            RkScheme::Rk3LowStorage => &RK3_B,
            RkScheme::Rk45LowStorage => &RK45_B,
        }
    }

    pub fn c(&self) -> &'static [f64] {
        match self {
            RkScheme::Rk3LowStorage => &RK3_C,
            RkScheme::Rk45LowStorage => &RK45_C,
        }
    }

    pub fn stages(&self) -> usize {
        self.a().len()
    }

    pub fn order(&self) -> usize {
        match self {
            RkScheme::Rk3LowStorage => 3,
            RkScheme::Rk45LowStorage => 4,
        }
    }
}

impl fmt::Display for RkScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RkScheme::Rk3LowStorage => "rk3",
            RkScheme::Rk45LowStorage => "rk45",
        })
    }
}

impl FromStr for RkScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rk3" => Ok(RkScheme::Rk3LowStorage),
            "rk45" | "rk4" => Ok(RkScheme::Rk45LowStorage),
            _ => Err(Error::Configuration(format!("unknown explicit method '{s}' (expected rk3 or rk45)"))),
        }
    }
}

/// A semi-discrete system `du/dt = L(t, u)` stepped with two registers.
pub trait LowStorageSystem {
    type Register;

    /// `du ← a du + dt L(t, u)`.
    fn accumulate(&self, t: f64, u: &Self::Register, a: f64, dt: f64, du: &mut Self::Register) -> Result<()>;

    /// `u ← u + b du`.
    fn update(&self, u: &mut Self::Register, b: f64, du: &Self::Register);
}

/// One step of `scheme` from `t` to `t + dt`. `du` is the second register; its
/// contents on entry are ignored.
pub fn rk_step<S: LowStorageSystem>(
    system: &S,
    scheme: RkScheme,
    t: f64,
    dt: f64,
    u: &mut S::Register,
    du: &mut S::Register,
) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Parameter(format!("time step must be positive and finite, got {dt}")));
    }
    for (stage, ((a, b), c)) in scheme.a().iter().zip(scheme.b()).zip(scheme.c()).enumerate() {
        system
            .accumulate(t + c * dt, u, *a, dt, du)
            .map_err(|source| Error::Stage { stage, source: Box::new(source) })?;
        system.update(u, *b, du);
    }
    Ok(())
}

impl LowStorageSystem for Discretization {
    type Register = ElementData;

    fn accumulate(&self, _t: f64, u: &ElementData, a: f64, dt: f64, du: &mut ElementData) -> Result<()> {
        Discretization::accumulate(self, u, a, dt, du)
    }

    fn update(&self, u: &mut ElementData, b: f64, du: &ElementData) {
        u.par_iter_mut().zip(du.par_iter()).for_each(|(ue, de)| {
            for (x, d) in ue.iter_mut().zip(de) {
                *x += *d * b;
            }
        });
    }
}

/// Holds the second register so repeated steps reuse one allocation.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub scheme: RkScheme,
    du: ElementData,
}

impl Stepper {
    pub fn new(scheme: RkScheme) -> Self {
        Stepper { scheme, du: Vec::new() }
    }

    pub fn register(&self) -> &ElementData {
        &self.du
    }

    pub fn step(&mut self, disc: &Discretization, field: &mut SolutionField, dt: f64) -> Result<()> {
        let shape_matches = self.du.len() == field.data().len()
            && self.du.iter().zip(field.data()).all(|(a, b)| a.len() == b.len());
        if !shape_matches {
            self.du = field.zeros_like();
        }
        let t = field.time;
        rk_step(disc, self.scheme, t, dt, field.data_mut(), &mut self.du)?;
        field.time = t + dt;
        Ok(())
    }
}

/// Largest stable explicit step for the current state. The convective bound
/// is `cfl J / Σ_i λ_i (2P_i + 1)` with `λ_i = |v·Ja^i| + c |Ja^i|`; with
/// `dfl > 0` a viscous bound `dfl J² / (ν Σ_i |Ja^i|² (2P_i+1)²)` is combined
/// harmonically.
pub fn compute_dt_cfl(disc: &Discretization, field: &SolutionField, cfl: f64, dfl: f64) -> Result<f64> {
    if !(cfl > 0.0) {
        return Err(Error::Parameter(format!("cfl must be positive, got {cfl}")));
    }
    if !(dfl >= 0.0) {
        return Err(Error::Parameter(format!("dfl must be non-negative, got {dfl}")));
    }
    let gas = *disc.gas();
    let mu_a = disc.config().shock_capturing.map_or(0.0, |s| s.mu_a);
    let eddy = if gas.smagorinsky_cs > 0.0 && dfl > 0.0 { Some(disc.eddy_viscosity(field)?) } else { None };
    let diffusivity = (gas.gamma / gas.prandtl).max(1.0);
    let per_element: Vec<(f64, f64)> = field
        .data()
        .par_iter()
        .enumerate()
        .map(|(e, ue)| {
            let geo = disc.geometry().element(e);
            let spread = geo.orders.map(|p| 2.0 * p as f64 + 1.0);
            let mut inv_conv = 0.0_f64;
            let mut inv_visc = 0.0_f64;
            for (n, u) in ue.iter().enumerate() {
                let q = primitive_from_conservative(u, &gas).map_err(|err| err.at(e, n))?;
                let c = q.sound_speed(&gas);
                let j = geo.jacobian[n];
                let ja = &geo.ja[n];
                let mut conv = 0.0;
                let mut metric = 0.0;
                for i in 0..3 {
                    let norm = crate::linalg::norm3(ja[i]);
                    conv += (crate::linalg::dot3(q.v, ja[i]).abs() + c * norm) * spread[i];
                    metric += norm * norm * spread[i] * spread[i];
                }
                inv_conv = inv_conv.max(conv / j);
                if dfl > 0.0 {
                    let mu_t = eddy.as_ref().map_or(0.0, |m: &Vec<Vec<f64>>| m[e][n]);
                    let nu = (gas.mu + mu_t + mu_a) / q.rho * diffusivity;
                    inv_visc = inv_visc.max(nu * metric / (j * j));
                }
            }
            Ok((inv_conv, inv_visc))
        })
        .collect::<Result<_>>()?;
    let (conv, visc) = per_element.iter().fold((0.0_f64, 0.0_f64), |(a, b), (c, d)| (a.max(*c), b.max(*d)));
    let dt_c = if conv > 0.0 { cfl / conv } else { f64::INFINITY };
    let dt = if visc > 0.0 {
        let dt_v = dfl / visc;
        1.0 / (1.0 / dt_c + 1.0 / dt_v)
    } else {
        dt_c
    };
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("no finite stable time step (got {dt})")));
    }
    Ok(dt)
}

/// Pointwise `u' = f(t, u)` over a scalar register.
pub struct ScalarOde<F>(pub F);

impl<F: Fn(f64, f64) -> f64> LowStorageSystem for ScalarOde<F> {
    type Register = f64;

    fn accumulate(&self, t: f64, u: &f64, a: f64, dt: f64, du: &mut f64) -> Result<()> {
        *du = a * *du + dt * (self.0)(t, *u);
        Ok(())
    }

    fn update(&self, u: &mut f64, b: f64, du: &f64) {
        *u += b * du;
    }
}

/// Stage `du` with zero contents, for callers that manage registers themselves.
pub fn zero_register(field: &SolutionField) -> ElementData {
    field.data().iter().map(|e| vec![State::ZERO; e.len()]).collect()
}

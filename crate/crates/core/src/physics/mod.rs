//! Compressible ideal-gas state algebra and the physical fluxes.
//!
//! Conservative variables are `u = (ρ, ρv₁, ρv₂, ρv₃, ρe)`. A [`Flux`] holds
//! one column per physical direction.

mod entropy;
mod riemann;
mod two_point;

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::linalg::{dot3, norm3};

pub use entropy::{
    conservative_from_entropy, entropy, entropy_flux, entropy_potential, entropy_variables,
};
pub use riemann::{riemann_flux, riemann_flux_with, RiemannSolver};
pub(crate) use riemann::riemann_prim;
pub use two_point::{ln_mean, two_point_flux, two_point_normal, TwoPointVariant};

pub const NVAR: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasProperties {
    pub gamma: f64,
    pub gas_constant: f64,
    pub prandtl: f64,
    pub mu: f64,
    pub smagorinsky_cs: f64,
}

impl Default for GasProperties {
    fn default() -> Self {
        GasProperties { gamma: 1.4, gas_constant: 1.0, prandtl: 0.72, mu: 0.0, smagorinsky_cs: 0.0 }
    }
}

impl GasProperties {
    pub fn new(gamma: f64, gas_constant: f64, prandtl: f64, mu: f64) -> Result<Self> {
        let gas = GasProperties { gamma, gas_constant, prandtl, mu, smagorinsky_cs: 0.0 };
        gas.validate()?;
        Ok(gas)
    }

    pub fn inviscid(gamma: f64) -> Self {
        GasProperties { gamma, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0) {
            return Err(Error::Parameter(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if !(self.gas_constant > 0.0) {
            return Err(Error::Parameter("gas constant must be positive".into()));
        }
        if !(self.prandtl > 0.0) {
            return Err(Error::Parameter("Prandtl number must be positive".into()));
        }
        if !(self.mu >= 0.0) {
            return Err(Error::Parameter("viscosity must be non-negative".into()));
        }
        if !(self.smagorinsky_cs >= 0.0) {
            return Err(Error::Parameter("Smagorinsky constant must be non-negative".into()));
        }
        Ok(())
    }

    /// κ = γ R μ / ((γ - 1) Pr)
    pub fn kappa(&self) -> f64 {
        self.kappa_for(self.mu)
    }

    pub fn kappa_for(&self, mu: f64) -> f64 {
        self.gamma * self.gas_constant * mu / ((self.gamma - 1.0) * self.prandtl)
    }

    pub fn is_viscous(&self) -> bool {
        self.mu > 0.0 || self.smagorinsky_cs > 0.0
    }

    /// Conservative state from density, velocity and pressure.
    pub fn state_from_primitive(&self, rho: f64, v: [f64; 3], p: f64) -> State {
        let e = p / (self.gamma - 1.0) + 0.5 * rho * dot3(v, v);
        State([rho, rho * v[0], rho * v[1], rho * v[2], e])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State(pub [f64; NVAR]);

impl State {
    pub const ZERO: State = State([0.0; NVAR]);

    pub fn rho(&self) -> f64 {
        self.0[0]
    }
    pub fn momentum(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }
    pub fn energy(&self) -> f64 {
        self.0[4]
    }
    pub fn dot(&self, other: &State) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for State {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
impl IndexMut<usize> for State {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}
impl Add for State {
    type Output = State;
    fn add(mut self, o: State) -> State {
        self += o;
        self
    }
}
impl Sub for State {
    type Output = State;
    fn sub(mut self, o: State) -> State {
        self -= o;
        self
    }
}
impl AddAssign for State {
    fn add_assign(&mut self, o: State) {
        for i in 0..NVAR {
            self.0[i] += o.0[i];
        }
    }
}
impl SubAssign for State {
    fn sub_assign(&mut self, o: State) {
        for i in 0..NVAR {
            self.0[i] -= o.0[i];
        }
    }
}
impl Mul<f64> for State {
    type Output = State;
    fn mul(mut self, s: f64) -> State {
        for v in &mut self.0 {
            *v *= s;
        }
        self
    }
}
impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        self * -1.0
    }
}

/// Physical flux, one column per direction.
pub type Flux = [State; 3];

pub fn flux_dot(f: &Flux, n: [f64; 3]) -> State {
    f[0] * n[0] + f[1] * n[1] + f[2] * n[2]
}

/// Primitive quantities derived from a conservative state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub v: [f64; 3],
    pub p: f64,
    pub t: f64,
    pub h: f64,
}

impl Primitive {
    pub fn sound_speed(&self, gas: &GasProperties) -> f64 {
        (gas.gamma * self.p / self.rho).sqrt()
    }
}

pub(crate) fn inadmissible(u: &State, reason: &'static str) -> Error {
    Error::Admissibility { element: None, node: None, state: u.0, reason }
}

pub fn primitive_from_conservative(u: &State, gas: &GasProperties) -> Result<Primitive> {
    let rho = u.rho();
    if !(rho > 0.0) {
        return Err(inadmissible(u, "non-positive density"));
    }
    let v = [u[1] / rho, u[2] / rho, u[3] / rho];
    let p = (gas.gamma - 1.0) * (u[4] - 0.5 * rho * dot3(v, v));
    if !(p > 0.0) {
        return Err(inadmissible(u, "non-positive pressure"));
    }
    Ok(Primitive { rho, v, p, t: p / (rho * gas.gas_constant), h: (u[4] + p) / rho })
}

pub fn euler_flux(u: &State, gas: &GasProperties) -> Result<Flux> {
    let q = primitive_from_conservative(u, gas)?;
    Ok(euler_flux_prim(&q))
}

pub(crate) fn euler_flux_prim(q: &Primitive) -> Flux {
    let mut f = [State::ZERO; 3];
    for (d, col) in f.iter_mut().enumerate() {
        let m = q.rho * q.v[d];
        col[0] = m;
        for j in 0..3 {
            col[1 + j] = m * q.v[j];
        }
        col[1 + d] += q.p;
        col[4] = m * q.h;
    }
    f
}

/// Normal Euler flux `F(u)·n`.
pub(crate) fn euler_normal_prim(q: &Primitive, n: [f64; 3]) -> State {
    let vn = dot3(q.v, n);
    let m = q.rho * vn;
    State([
        m,
        m * q.v[0] + q.p * n[0],
        m * q.v[1] + q.p * n[1],
        m * q.v[2] + q.p * n[2],
        m * q.h,
    ])
}

/// Physical gradients of velocity and temperature at a point.
/// `velocity[j][d]` is ∂v_j/∂x_d.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GradientState {
    pub velocity: [[f64; 3]; 3],
    pub temperature: [f64; 3],
}

impl GradientState {
    pub fn is_finite(&self) -> bool {
        self.velocity.iter().flatten().all(|v| v.is_finite())
            && self.temperature.iter().all(|v| v.is_finite())
    }

    pub fn divergence(&self) -> f64 {
        self.velocity[0][0] + self.velocity[1][1] + self.velocity[2][2]
    }

    /// Vorticity ∇ × v.
    pub fn vorticity(&self) -> [f64; 3] {
        let g = &self.velocity;
        [g[2][1] - g[1][2], g[0][2] - g[2][0], g[1][0] - g[0][1]]
    }

    /// Q-criterion ½(|Ω|² − |S|²).
    pub fn q_criterion(&self) -> f64 {
        let g = &self.velocity;
        let mut s2 = 0.0;
        let mut w2 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let s = 0.5 * (g[i][j] + g[j][i]);
                let w = 0.5 * (g[i][j] - g[j][i]);
                s2 += s * s;
                w2 += w * w;
            }
        }
        0.5 * (w2 - s2)
    }

    /// Strain-rate magnitude √(2 S:S).
    pub fn strain_magnitude(&self) -> f64 {
        let g = &self.velocity;
        let mut s2 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let s = 0.5 * (g[i][j] + g[j][i]);
                s2 += s * s;
            }
        }
        (2.0 * s2).sqrt()
    }
}

pub fn viscous_flux(
    u: &State,
    grad: &GradientState,
    gas: &GasProperties,
    eddy_mu: f64,
) -> Result<Flux> {
    if !(eddy_mu >= 0.0) {
        return Err(Error::Parameter(format!("eddy viscosity must be non-negative, got {eddy_mu}")));
    }
    let q = primitive_from_conservative(u, gas)?;
    Ok(viscous_flux_prim(&q.v, grad, gas.mu + eddy_mu, gas.kappa()))
}

pub(crate) fn viscous_flux_prim(v: &[f64; 3], grad: &GradientState, mu: f64, kappa: f64) -> Flux {
    let g = &grad.velocity;
    let div = grad.divergence();
    let mut tau = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            tau[i][j] = mu * (g[i][j] + g[j][i]);
        }
        tau[i][i] -= 2.0 / 3.0 * mu * div;
    }
    let mut f = [State::ZERO; 3];
    for (d, col) in f.iter_mut().enumerate() {
        for j in 0..3 {
            col[1 + j] = tau[j][d];
        }
        col[4] = (0..3).map(|j| v[j] * tau[d][j]).sum::<f64>() + kappa * grad.temperature[d];
    }
    f
}

/// Constant-coefficient Smagorinsky eddy viscosity ρ (Cs Δ)² |S̄|.
pub fn smagorinsky_viscosity(rho: f64, grad: &GradientState, delta: f64, cs: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Parameter(format!("filter width must be positive, got {delta}")));
    }
    if !(cs >= 0.0) {
        return Err(Error::Parameter(format!("Smagorinsky constant must be non-negative, got {cs}")));
    }
    let l = cs * delta;
    Ok(rho * l * l * grad.strain_magnitude())
}

/// Contravariant wave-speed estimate |v·Jaⁱ| + c|Jaⁱ| for each reference direction.
pub fn max_wave_speed(u: &State, ja: &[[f64; 3]; 3], gas: &GasProperties) -> Result<[f64; 3]> {
    let q = primitive_from_conservative(u, gas)?;
    let c = q.sound_speed(gas);
    Ok([0, 1, 2].map(|i| dot3(q.v, ja[i]).abs() + c * norm3(ja[i])))
}

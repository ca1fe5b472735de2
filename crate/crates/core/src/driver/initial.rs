use std::f64::consts::PI;

use crate::dg::{Discretization, SolutionField};
use crate::error::Result;
use crate::mesh::MeshSpec;
use crate::physics::{GasProperties, State};

use super::config::InitialCondition;

/// Shu's isentropic vortex translated to time `t`, using the nearest periodic
/// image of the centre on axes where `mesh` is periodic.
pub fn isentropic_vortex(
    strength: f64,
    center: [f64; 2],
    velocity: [f64; 3],
    gas: &GasProperties,
    mesh: &MeshSpec,
    x: [f64; 3],
    t: f64,
) -> State {
    let mut d = [0.0; 2];
    for a in 0..2 {
        let mut r = x[a] - (center[a] + velocity[a] * t);
        if mesh.periodic[a] {
            let l = mesh.extent(a);
            r -= l * (r / l).round();
        }
        d[a] = r;
    }
    let r2 = d[0] * d[0] + d[1] * d[1];
    let g = gas.gamma;
    let e = ((1.0 - r2) / 2.0).exp();
    let du = -strength / (2.0 * PI) * d[1] * e;
    let dv = strength / (2.0 * PI) * d[0] * e;
    let dt = -(g - 1.0) * strength * strength / (8.0 * g * PI * PI) * (1.0 - r2).exp();
    let rho = (1.0 + dt).powf(1.0 / (g - 1.0));
    let p = rho.powf(g);
    gas.state_from_primitive(rho, [velocity[0] + du, velocity[1] + dv, velocity[2]], p)
}

/// Taylor-Green vortex with unit density and velocity scale; the background
/// pressure follows from the Mach number and density from an isothermal start.
pub fn taylor_green(mach: f64, gas: &GasProperties, x: [f64; 3]) -> State {
    let (rho0, v0) = (1.0, 1.0);
    let p0 = rho0 * v0 * v0 / (gas.gamma * mach * mach);
    let t0 = p0 / (rho0 * gas.gas_constant);
    let u = v0 * x[0].sin() * x[1].cos() * x[2].cos();
    let v = -v0 * x[0].cos() * x[1].sin() * x[2].cos();
    let p = p0 + rho0 * v0 * v0 / 16.0 * ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) * ((2.0 * x[2]).cos() + 2.0);
    gas.state_from_primitive(p / (gas.gas_constant * t0), [u, v, 0.0], p)
}

/// Pointwise initial state at physical position `x`.
pub fn initial_state(ic: &InitialCondition, gas: &GasProperties, mesh: &MeshSpec, x: [f64; 3]) -> State {
    match *ic {
        InitialCondition::Uniform { density, velocity, pressure } => gas.state_from_primitive(density, velocity, pressure),
        InitialCondition::IsentropicVortex { strength, center, velocity } => {
            isentropic_vortex(strength, center, velocity, gas, mesh, x, 0.0)
        }
        InitialCondition::TaylorGreen { mach } => taylor_green(mach, gas, x),
    }
}

/// Sample the initial condition at the solution nodes and check admissibility.
pub fn initial_condition(ic: &InitialCondition, disc: &Discretization) -> Result<SolutionField> {
    let gas = *disc.gas();
    let spec = disc.mesh().spec().clone();
    let field = SolutionField::from_fn(disc.orders().clone(), disc.geometry(), |x| initial_state(ic, &gas, &spec, x))?;
    field.check_admissible(&gas)?;
    Ok(field)
}

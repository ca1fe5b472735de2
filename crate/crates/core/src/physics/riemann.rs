//! Interface numerical fluxes.
//!
//! Every solver is written as a symmetric central part minus a dissipation
//! term. The central part is a two-point flux, so pairing an entropy
//! conserving volume flux with the matching central interface keeps the
//! whole scheme entropy conservative.

use std::fmt;
use std::str::FromStr;

use super::{primitive_from_conservative, two_point_normal, GasProperties, Primitive, State, TwoPointVariant};
use crate::error::{Error, Result};
use crate::linalg::{dot3, norm3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RiemannSolver {
    Central,
    LaxFriedrichs,
    Rusanov,
    Roe,
}

impl RiemannSolver {
    pub const ALL: [RiemannSolver; 4] = [
        RiemannSolver::Central,
        RiemannSolver::LaxFriedrichs,
        RiemannSolver::Rusanov,
        RiemannSolver::Roe,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RiemannSolver::Central => "central",
            RiemannSolver::LaxFriedrichs => "lax-friedrichs",
            RiemannSolver::Rusanov => "rusanov",
            RiemannSolver::Roe => "roe",
        }
    }
}

impl fmt::Display for RiemannSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RiemannSolver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        RiemannSolver::ALL
            .into_iter()
            .find(|v| v.name() == key)
            .ok_or_else(|| Error::Configuration(format!("unknown Riemann solver '{s}'")))
    }
}

/// Interface flux with an arithmetic-mean central part.
pub fn riemann_flux(
    solver: RiemannSolver,
    ul: &State,
    ur: &State,
    n: [f64; 3],
    gas: &GasProperties,
) -> Result<State> {
    riemann_flux_with(solver, TwoPointVariant::Central, ul, ur, n, gas)
}

/// Interface flux whose central part is the two-point flux `central`.
pub fn riemann_flux_with(
    solver: RiemannSolver,
    central: TwoPointVariant,
    ul: &State,
    ur: &State,
    n: [f64; 3],
    gas: &GasProperties,
) -> Result<State> {
    let len = norm3(n);
    if !((len - 1.0).abs() <= 1e-12) {
        return Err(Error::Geometry(format!("interface normal has length {len}, expected 1")));
    }
    let a = primitive_from_conservative(ul, gas)?;
    let b = primitive_from_conservative(ur, gas)?;
    Ok(riemann_prim(solver, central, &a, &b, ul, ur, n, gas.gamma))
}

/// Unchecked kernel; `n` must be a unit vector.
#[allow(clippy::too_many_arguments)]
pub(crate) fn riemann_prim(
    solver: RiemannSolver,
    central: TwoPointVariant,
    a: &Primitive,
    b: &Primitive,
    ul: &State,
    ur: &State,
    n: [f64; 3],
    gamma: f64,
) -> State {
    let fc = two_point_normal(central, a, b, n, gamma);
    let ca = (gamma * a.p / a.rho).sqrt();
    let cb = (gamma * b.p / b.rho).sqrt();
    let lmax = || (dot3(a.v, n).abs() + ca).max(dot3(b.v, n).abs() + cb);
    match solver {
        RiemannSolver::Central => fc,
        RiemannSolver::LaxFriedrichs => fc - (*ur - *ul) * (0.5 * lmax()),
        RiemannSolver::Rusanov => {
            let roe = RoeAverage::new(a, b, gamma);
            let lam = lmax().max(dot3(roe.v, n).abs() + roe.c);
            fc - (*ur - *ul) * (0.5 * lam)
        }
        RiemannSolver::Roe => fc - roe_dissipation(a, b, n, gamma) * 0.5,
    }
}

struct RoeAverage {
    rho: f64,
    v: [f64; 3],
    h: f64,
    c: f64,
}

impl RoeAverage {
    fn new(a: &Primitive, b: &Primitive, gamma: f64) -> Self {
        let sa = a.rho.sqrt();
        let sb = b.rho.sqrt();
        let wa = sa / (sa + sb);
        let wb = 1.0 - wa;
        let v = [0, 1, 2].map(|d| wa * a.v[d] + wb * b.v[d]);
        let h = wa * a.h + wb * b.h;
        let c2 = (gamma - 1.0) * (h - 0.5 * dot3(v, v));
        RoeAverage { rho: sa * sb, v, h, c: c2.max(0.0).sqrt() }
    }
}

/// |A_roe| (u_R - u_L) with a Harten fix on the acoustic waves.
fn roe_dissipation(a: &Primitive, b: &Primitive, n: [f64; 3], gamma: f64) -> State {
    let r = RoeAverage::new(a, b, gamma);
    let vn = dot3(r.v, n);
    let c = r.c;
    let dp = b.p - a.p;
    let drho = b.rho - a.rho;
    let dv = [0, 1, 2].map(|d| b.v[d] - a.v[d]);
    let dvn = dot3(dv, n);
    let dvt = [0, 1, 2].map(|d| dv[d] - dvn * n[d]);

    let delta = 0.05 * (vn.abs() + c);
    let fix = |l: f64| {
        let l = l.abs();
        if l < delta {
            0.5 * (l * l + delta * delta) / delta
        } else {
            l
        }
    };
    let l1 = fix(vn - c);
    let l3 = fix(vn + c);
    let l2 = vn.abs();

    let a1 = (dp - r.rho * c * dvn) / (2.0 * c * c);
    let a3 = (dp + r.rho * c * dvn) / (2.0 * c * c);
    let a2 = drho - dp / (c * c);

    let mut d = State::ZERO;
    let acoustic = |d: &mut State, s: f64, amp: f64| {
        d[0] += amp;
        for j in 0..3 {
            d[1 + j] += amp * (r.v[j] + s * c * n[j]);
        }
        d[4] += amp * (r.h + s * c * vn);
    };
    acoustic(&mut d, -1.0, l1 * a1);
    acoustic(&mut d, 1.0, l3 * a3);
    let k = l2 * a2;
    d[0] += k;
    for j in 0..3 {
        d[1 + j] += k * r.v[j] + l2 * r.rho * dvt[j];
    }
    d[4] += k * 0.5 * dot3(r.v, r.v) + l2 * r.rho * dot3(r.v, dvt);
    d
}

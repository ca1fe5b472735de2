use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::dot3;
use crate::physics::{primitive_from_conservative, GasProperties, State};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    Periodic,
    FreeStream(State),
    NoSlipAdiabaticWall,
    InviscidWall,
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryKind::Periodic => "periodic",
            BoundaryKind::FreeStream(_) => "freestream",
            BoundaryKind::NoSlipAdiabaticWall => "noslip-adiabatic-wall",
            BoundaryKind::InviscidWall => "inviscid-wall",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCondition {
    pub tag: String,
    pub kind: BoundaryKind,
}

impl BoundaryCondition {
    pub fn new(tag: impl Into<String>, kind: BoundaryKind) -> Self {
        BoundaryCondition { tag: tag.into(), kind }
    }

    pub fn validate(&self, gas: &GasProperties) -> Result<()> {
        if let BoundaryKind::FreeStream(u) = &self.kind {
            primitive_from_conservative(u, gas)?;
        }
        Ok(())
    }
}

/// Exterior ghost state for a boundary face with outward unit normal `n`.
pub fn boundary_state(kind: &BoundaryKind, interior: &State, n: [f64; 3], gas: &GasProperties) -> Result<State> {
    let q = primitive_from_conservative(interior, gas)?;
    match kind {
        BoundaryKind::Periodic => Err(Error::Configuration(
            "periodic boundary tag on a non-periodic mesh face".into(),
        )),
        BoundaryKind::FreeStream(u) => Ok(*u),
        BoundaryKind::InviscidWall => {
            let vn = dot3(q.v, n);
            let v = [0, 1, 2].map(|d| q.v[d] - 2.0 * vn * n[d]);
            Ok(gas.state_from_primitive(q.rho, v, q.p))
        }
        BoundaryKind::NoSlipAdiabaticWall => Ok(gas.state_from_primitive(q.rho, q.v.map(|v| -v), q.p)),
    }
}

//! Symmetric two-point volume fluxes used in flux-differencing split forms.

use std::fmt;
use std::str::FromStr;

use super::{euler_normal_prim, primitive_from_conservative, Flux, GasProperties, Primitive, State};
use crate::error::{Error, Result};
use crate::linalg::dot3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoPointVariant {
    Central,
    Ducros,
    KennedyGruber,
    Pirozzoli,
    EntropyConserving,
    Chandrashekar,
}

impl TwoPointVariant {
    pub const ALL: [TwoPointVariant; 6] = [
        TwoPointVariant::Central,
        TwoPointVariant::Ducros,
        TwoPointVariant::KennedyGruber,
        TwoPointVariant::Pirozzoli,
        TwoPointVariant::EntropyConserving,
        TwoPointVariant::Chandrashekar,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TwoPointVariant::Central => "central",
            TwoPointVariant::Ducros => "ducros",
            TwoPointVariant::KennedyGruber => "kennedy-gruber",
            TwoPointVariant::Pirozzoli => "pirozzoli",
            TwoPointVariant::EntropyConserving => "entropy-conserving",
            TwoPointVariant::Chandrashekar => "chandrashekar",
        }
    }
}

impl fmt::Display for TwoPointVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TwoPointVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        TwoPointVariant::ALL
            .into_iter()
            .find(|v| v.name() == key)
            .ok_or_else(|| Error::Configuration(format!("unknown two-point flux '{s}'")))
    }
}

/// Logarithmic mean `(a - b) / (ln a - ln b)`, switching to a series when
/// the ratio is within 1e-4 of one.
pub fn ln_mean(a: f64, b: f64) -> f64 {
    let ratio = a / b;
    if (ratio - 1.0).abs() < 1e-4 {
        let f = (a - b) / (a + b);
        let u = f * f;
        0.5 * (a + b) / (1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0)
    } else {
        (a - b) / ((a - b) / b).ln_1p()
    }
}

#[inline]
fn avg(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

fn avg3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [avg(a[0], b[0]), avg(a[1], b[1]), avg(a[2], b[2])]
}

/// Two-point flux contracted with the direction `n` (not necessarily unit).
pub fn two_point_normal(
    variant: TwoPointVariant,
    a: &Primitive,
    b: &Primitive,
    n: [f64; 3],
    gamma: f64,
) -> State {
    let vna = dot3(a.v, n);
    let vnb = dot3(b.v, n);
    match variant {
        TwoPointVariant::Central => (euler_normal_prim(a, n) + euler_normal_prim(b, n)) * 0.5,
        TwoPointVariant::Ducros => {
            let vn = avg(vna, vnb);
            let rho = avg(a.rho, b.rho);
            let p = avg(a.p, b.p);
            let ea = a.rho * a.h - a.p;
            let eb = b.rho * b.h - b.p;
            State([
                rho * vn,
                avg(a.rho * a.v[0], b.rho * b.v[0]) * vn + p * n[0],
                avg(a.rho * a.v[1], b.rho * b.v[1]) * vn + p * n[1],
                avg(a.rho * a.v[2], b.rho * b.v[2]) * vn + p * n[2],
                avg(ea, eb) * vn + avg(a.p * vna, b.p * vnb),
            ])
        }
        TwoPointVariant::KennedyGruber | TwoPointVariant::Pirozzoli => {
            let rho = avg(a.rho, b.rho);
            let vn = avg(vna, vnb);
            let v = avg3(a.v, b.v);
            let p = avg(a.p, b.p);
            let m = rho * vn;
            let energy = if variant == TwoPointVariant::KennedyGruber {
                let e = avg(a.h - a.p / a.rho, b.h - b.p / b.rho);
                m * e + p * vn
            } else {
                m * avg(a.h, b.h)
            };
            State([m, m * v[0] + p * n[0], m * v[1] + p * n[1], m * v[2] + p * n[2], energy])
        }
        TwoPointVariant::EntropyConserving => {
            let z1a = (a.rho / a.p).sqrt();
            let z1b = (b.rho / b.p).sqrt();
            let z5a = (a.rho * a.p).sqrt();
            let z5b = (b.rho * b.p).sqrt();
            let z1 = avg(z1a, z1b);
            let z5 = avg(z5a, z5b);
            let z1_ln = ln_mean(z1a, z1b);
            let z5_ln = ln_mean(z5a, z5b);
            let v = [0, 1, 2].map(|d| avg(z1a * a.v[d], z1b * b.v[d]) / z1);
            let rho = z1 * z5_ln;
            let p1 = z5 / z1;
            let p2 = (gamma + 1.0) / (2.0 * gamma) * z5_ln / z1_ln + (gamma - 1.0) / (2.0 * gamma) * z5 / z1;
            let h = gamma * p2 / ((gamma - 1.0) * rho) + 0.5 * dot3(v, v);
            let m = rho * dot3(v, n);
            State([m, m * v[0] + p1 * n[0], m * v[1] + p1 * n[1], m * v[2] + p1 * n[2], m * h])
        }
        TwoPointVariant::Chandrashekar => {
            let beta_a = 0.5 * a.rho / a.p;
            let beta_b = 0.5 * b.rho / b.p;
            let rho_ln = ln_mean(a.rho, b.rho);
            let beta_ln = ln_mean(beta_a, beta_b);
            let p = avg(a.rho, b.rho) / (2.0 * avg(beta_a, beta_b));
            let v = avg3(a.v, b.v);
            let v2 = avg(dot3(a.v, a.v), dot3(b.v, b.v));
            let m = rho_ln * avg(vna, vnb);
            let fm = [0, 1, 2].map(|j| m * v[j] + p * n[j]);
            let fe = m * 0.5 * (1.0 / ((gamma - 1.0) * beta_ln) - v2) + dot3(fm, v);
            State([m, fm[0], fm[1], fm[2], fe])
        }
    }
}

pub fn two_point_flux(
    variant: TwoPointVariant,
    ul: &State,
    ur: &State,
    gas: &GasProperties,
) -> Result<Flux> {
    let a = primitive_from_conservative(ul, gas)?;
    let b = primitive_from_conservative(ur, gas)?;
    Ok([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        .map(|n| two_point_normal(variant, &a, &b, n, gas.gamma)))
}

//! Density-gradient sensor and spectrally filtered artificial viscosity
//! built on entropy-variable gradients.
//!
//! The artificial flux is `F_a = B G` with `G = ∇w` and `B` the viscous
//! flux operator expressed in entropy-variable gradients. Writing
//! `B = 𝓛ᵀ D 𝓛`, the filtered flux
//! `(1/√J) 𝓛ᵀ √D 𝓕(√(J D) 𝓛 G)` filters only one half of the symmetric
//! product, so its entropy contribution stays a weighted sum of squares.

use std::fmt;
use std::str::FromStr;

use crate::basis::{basis, NodeKind};
use crate::error::{Error, Result};
use crate::mesh::{quadrature_weights, ElementGeometry};
use crate::physics::{viscous_flux_prim, Flux, GasProperties, GradientState, Primitive, State};
use crate::tensor;

/// Size of the stacked gradient `(∂x w, ∂y w, ∂z w)`.
pub const NG: usize = 15;

pub type FluxMatrix = [[f64; NG]; NG];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Identity,
    Tadmor,
    Exponential,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Identity => "identity",
            KernelKind::Tadmor => "tadmor",
            KernelKind::Exponential => "exponential",
        })
    }
}

impl FromStr for KernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" => Ok(KernelKind::Identity),
            "tadmor" => Ok(KernelKind::Tadmor),
            "exponential" => Ok(KernelKind::Exponential),
            _ => Err(Error::Configuration(format!("unknown SVV kernel '{s}'"))),
        }
    }
}

/// Modal attenuation kernel: factors `F_k ∈ [0, 1]`, `F_0 = 1`, non-increasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterKernel {
    pub kind: KernelKind,
    /// Modes `k <= cutoff` pass unchanged.
    pub cutoff: usize,
    /// Exponential strength α.
    pub strength: f64,
    /// Exponential order p (the exponent is 2p).
    pub exponent: u32,
}

impl FilterKernel {
    pub const IDENTITY: FilterKernel =
        FilterKernel { kind: KernelKind::Identity, cutoff: 0, strength: 0.0, exponent: 2 };

    pub fn exponential(cutoff: usize) -> Self {
        FilterKernel { kind: KernelKind::Exponential, cutoff, strength: -(1e-14f64).ln(), exponent: 2 }
    }

    pub fn tadmor(cutoff: usize) -> Self {
        FilterKernel { kind: KernelKind::Tadmor, cutoff, strength: 0.0, exponent: 2 }
    }

    /// Factors for modes `0..=order`.
    pub fn factors(&self, order: usize) -> Vec<f64> {
        let m = self.cutoff;
        (0..=order)
            .map(|k| {
                if self.kind == KernelKind::Identity || k <= m || m >= order {
                    return 1.0;
                }
                match self.kind {
                    KernelKind::Exponential => {
                        let r = (k - m) as f64 / (order - m) as f64;
                        (-self.strength * r.powi(2 * self.exponent as i32)).exp()
                    }
                    KernelKind::Tadmor => {
                        let r = (k as f64 - order as f64) / (k - m) as f64;
                        1.0 - (-r * r).exp()
                    }
                    KernelKind::Identity => 1.0,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtificialFluxConfig {
    pub mu_a: f64,
    pub s_low: f64,
    pub s_high: f64,
    pub kernel: FilterKernel,
}

impl ArtificialFluxConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu_a >= 0.0) {
            return Err(Error::Parameter(format!("artificial viscosity must be non-negative, got {}", self.mu_a)));
        }
        if !(self.s_low < self.s_high) {
            return Err(Error::Parameter(format!(
                "sensor thresholds must satisfy low < high, got {} and {}",
                self.s_low, self.s_high
            )));
        }
        Ok(())
    }
}

/// Element viscosity and how far the kernel is pulled towards identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blend {
    pub mu: f64,
    pub theta: f64,
}

/// `s = Σ ω J |∇_ξ ρ|²` over the element nodes.
pub fn density_sensor(states: &[State], geo: &ElementGeometry, kind: NodeKind) -> Result<f64> {
    let n = geo.nodes();
    if states.len() != tensor::count(n) {
        return Err(Error::Dimension { expected: tensor::count(n), got: states.len() });
    }
    let rho: Vec<f64> = states.iter().map(|s| s[0]).collect();
    let w = quadrature_weights(geo.orders, kind)?;
    let mut grad2 = vec![0.0; rho.len()];
    for axis in 0..3 {
        let b = basis(geo.orders[axis], kind)?;
        let d = tensor::derivative(&rho, 1, n, axis, b.diff_matrix());
        for (g, v) in grad2.iter_mut().zip(d) {
            *g += v * v;
        }
    }
    Ok(grad2.iter().zip(&w).zip(&geo.jacobian).map(|((g, w), j)| g * w * j).sum())
}

/// Same functional as [`density_sensor`]; named for the shock-capturing role.
pub fn shock_sensor(states: &[State], geo: &ElementGeometry, kind: NodeKind) -> Result<f64> {
    density_sensor(states, geo, kind)
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

pub fn blend_artificial_viscosity(sensor: f64, config: &ArtificialFluxConfig) -> Blend {
    let theta = smoothstep((sensor - config.s_low) / (config.s_high - config.s_low));
    Blend { mu: theta * config.mu_a, theta }
}

/// Viscous flux operator acting on entropy-variable gradients, built by
/// applying the chain rule `∇v_j = (∇w_{j+1} + v_j ∇w_4) / β`,
/// `∇T = (γ-1) ∇w_4 / (R β²)` with `β = -w_4 = (γ-1) ρ / p`.
pub fn entropy_flux_matrix(q: &Primitive, gas: &GasProperties, mu: f64) -> FluxMatrix {
    let beta = (gas.gamma - 1.0) * q.rho / q.p;
    let kappa = gas.kappa_for(mu);
    let mut b = [[0.0; NG]; NG];
    for col in 0..NG {
        let (d, k) = (col / 5, col % 5);
        let mut grad = GradientState::default();
        match k {
            0 => {}
            1..=3 => grad.velocity[k - 1][d] = 1.0 / beta,
            _ => {
                for j in 0..3 {
                    grad.velocity[j][d] = q.v[j] / beta;
                }
                grad.temperature[d] = (gas.gamma - 1.0) / (gas.gas_constant * beta * beta);
            }
        }
        let f = viscous_flux_prim(&q.v, &grad, mu, kappa);
        for (row, val) in f.iter().flat_map(|s| s.0).enumerate() {
            b[row][col] = val;
        }
    }
    for i in 0..NG {
        for j in i + 1..NG {
            let s = 0.5 * (b[i][j] + b[j][i]);
            b[i][j] = s;
            b[j][i] = s;
        }
    }
    b
}

/// `B = 𝓛ᵀ D 𝓛` with `𝓛` unit upper triangular. Pivots below `1e-12` of
/// the largest diagonal entry are clamped to zero; more negative ones are
/// reported with `node`.
pub fn ldlt(b: &FluxMatrix, node: usize) -> Result<(FluxMatrix, [f64; NG])> {
    let scale = (0..NG).fold(0.0_f64, |m, i| m.max(b[i][i].abs()));
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
    // lower factor first, transposed at the end
    let mut l = [[0.0; NG]; NG];
    let mut d = [0.0; NG];
    for k in 0..NG {
        let mut dk = b[k][k];
        for j in 0..k {
            dk -= l[k][j] * l[k][j] * d[j];
        }
        if dk < -tol {
            return Err(Error::NumericalValidity { node, pivot: dk });
        }
        l[k][k] = 1.0;
        if dk <= tol {
            d[k] = 0.0;
            continue;
        }
        d[k] = dk;
        for i in k + 1..NG {
            let mut s = b[i][k];
            for j in 0..k {
                s -= l[i][j] * l[k][j] * d[j];
            }
            l[i][k] = s / dk;
        }
    }
    let mut u = [[0.0; NG]; NG];
    for i in 0..NG {
        for j in 0..NG {
            u[i][j] = l[j][i];
        }
    }
    Ok((u, d))
}

/// Apply per-axis modal factors to node-major element data with `ncomp` components.
pub fn modal_filter(data: &[f64], ncomp: usize, orders: [usize; 3], kind: NodeKind, factors: [&[f64]; 3]) -> Result<Vec<f64>> {
    let n = orders.map(|p| p + 1);
    let mut mats = Vec::with_capacity(3);
    for axis in 0..3 {
        let b = basis(orders[axis], kind)?;
        let na = n[axis];
        let fwd = b.modal_forward();
        let bwd = b.modal_backward();
        let mut m = vec![0.0; na * na];
        for i in 0..na {
            for j in 0..na {
                m[i * na + j] = (0..na).map(|k| bwd[i * na + k] * factors[axis][k] * fwd[k * na + j]).sum();
            }
        }
        mats.push(m);
    }
    let spec = [0, 1, 2].map(|a| {
        if factors[a].iter().all(|f| *f == 1.0) {
            None
        } else {
            Some((mats[a].as_slice(), n[a]))
        }
    });
    Ok(tensor::apply(data, ncomp, n, spec).0)
}

/// Filtered artificial flux at every node of one element. `theta` pulls the
/// kernel towards identity (`F + θ(1 - F)`), `mu` scales `B`.
#[allow(clippy::too_many_arguments)]
pub fn svv_filtered_flux(
    prims: &[Primitive],
    grad_w: &[[State; 3]],
    geo: &ElementGeometry,
    kind: NodeKind,
    kernel: &FilterKernel,
    theta: f64,
    mu: f64,
    gas: &GasProperties,
) -> Result<Vec<Flux>> {
    let total = tensor::count(geo.nodes());
    if prims.len() != total || grad_w.len() != total {
        return Err(Error::Dimension { expected: total, got: prims.len().min(grad_w.len()) });
    }
    if mu == 0.0 {
        return Ok(vec![[State::ZERO; 3]; total]);
    }
    let mut factors_l = Vec::with_capacity(total);
    let mut h = vec![0.0; total * NG];
    for p in 0..total {
        let b = entropy_flux_matrix(&prims[p], gas, mu);
        let (l, d) = ldlt(&b, p)?;
        let g: Vec<f64> = grad_w[p].iter().flat_map(|s| s.0).collect();
        let sj = geo.jacobian[p].sqrt();
        for i in 0..NG {
            let lg: f64 = (i..NG).map(|j| l[i][j] * g[j]).sum();
            h[p * NG + i] = sj * d[i].sqrt() * lg;
        }
        factors_l.push((l, d));
    }
    let f = geo.orders.map(|p| {
        kernel.factors(p).into_iter().map(|fk| fk + theta * (1.0 - fk)).collect::<Vec<_>>()
    });
    let filtered = modal_filter(&h, NG, geo.orders, kind, [&f[0], &f[1], &f[2]])?;
    Ok((0..total)
        .map(|p| {
            let (l, d) = &factors_l[p];
            let inv = 1.0 / geo.jacobian[p].sqrt();
            let mut out = [0.0; NG];
            for i in 0..NG {
                let v = d[i].sqrt() * filtered[p * NG + i] * inv;
                if v == 0.0 {
                    continue;
                }
                for (j, o) in out.iter_mut().enumerate().skip(i) {
                    *o += l[i][j] * v;
                }
            }
            [0, 1, 2].map(|dd| State([0, 1, 2, 3, 4].map(|k| out[dd * 5 + k])))
        })
        .collect())
}

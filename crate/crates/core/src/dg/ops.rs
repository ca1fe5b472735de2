//! One-dimensional line operators and the element volume integrals.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::basis::{basis, NodeKind};
use crate::error::{Error, Result};
use crate::mesh::ElementGeometry;
use crate::physics::{euler_normal_prim, two_point_normal, Flux, Primitive, State, TwoPointVariant};
use crate::tensor;

#[derive(Debug)]
pub(crate) struct LineOps {
    pub n: usize,
    pub d: Vec<f64>,
    /// `weak[i * n + m] = ω_m D_mi / ω_i`
    pub weak: Vec<f64>,
    /// Endpoint interpolation weights, `[left, right]`.
    pub ends: [Vec<f64>; 2],
    /// `ends[s][i] / ω_i`
    pub lift: [Vec<f64>; 2],
}

pub(crate) fn line_ops(order: usize, kind: NodeKind) -> Result<Arc<LineOps>> {
    static CACHE: OnceLock<RwLock<HashMap<(usize, NodeKind), Arc<LineOps>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(ops) = cache.read().unwrap().get(&(order, kind)) {
        return Ok(ops.clone());
    }
    let b = basis(order, kind)?;
    let n = b.len();
    let w = b.weights().to_vec();
    let mut weak = vec![0.0; n * n];
    for i in 0..n {
        for m in 0..n {
            weak[i * n + m] = w[m] * b.d(m, i) / w[i];
        }
    }
    let ends = [b.left_end().to_vec(), b.right_end().to_vec()];
    let lift = [0, 1].map(|s| ends[s].iter().zip(&w).map(|(e, w)| e / w).collect());
    let ops = Arc::new(LineOps { n, d: b.diff_matrix().to_vec(), weak, ends, lift });
    cache.write().unwrap().insert((order, kind), ops.clone());
    Ok(ops)
}

pub(crate) fn element_ops(orders: [usize; 3], kind: NodeKind) -> Result<[Arc<LineOps>; 3]> {
    Ok([line_ops(orders[0], kind)?, line_ops(orders[1], kind)?, line_ops(orders[2], kind)?])
}

#[inline]
pub(crate) fn strides(n: [usize; 3]) -> [usize; 3] {
    [1, n[0], n[0] * n[1]]
}

/// Weak-form volume term Σ_d Σ_m (ω_m/ω_i) D_mi (F_m · Ja^d_m), i.e. the
/// contribution of `∫ F̃ · ∇φ_i` to `J du/dt` after dividing by the node weight.
pub fn volume_integral_weak(fluxes: &[Flux], geo: &ElementGeometry, kind: NodeKind) -> Result<Vec<State>> {
    let n = geo.nodes();
    let total = tensor::count(n);
    if fluxes.len() != total {
        return Err(Error::Dimension { expected: total, got: fluxes.len() });
    }
    let ops = element_ops(geo.orders, kind)?;
    let st = strides(n);
    let mut out = vec![State::ZERO; total];
    for d in 0..3 {
        let contra: Vec<State> = fluxes
            .iter()
            .zip(&geo.ja)
            .map(|(f, ja)| f[0] * ja[d][0] + f[1] * ja[d][1] + f[2] * ja[d][2])
            .collect();
        let op = &ops[d];
        for (p, r) in out.iter_mut().enumerate() {
            let i = tensor::unpack(n, p)[d];
            let base = p - i * st[d];
            for m in 0..op.n {
                let w = op.weak[i * op.n + m];
                if w != 0.0 {
                    *r += contra[base + m * st[d]] * w;
                }
            }
        }
    }
    Ok(out)
}

/// Flux-differencing volume term `-Σ_d Σ_m 2 D_im f#(u_i, u_m)·{{Ja^d}}`.
/// The central variant uses the contravariant average, which makes it the
/// strong-form divergence exactly.
pub fn volume_integral_split(
    prims: &[Primitive],
    geo: &ElementGeometry,
    kind: NodeKind,
    variant: TwoPointVariant,
    gamma: f64,
) -> Result<Vec<State>> {
    if kind != NodeKind::GaussLobatto {
        return Err(Error::Configuration("split forms require Gauss-Lobatto nodes".into()));
    }
    let n = geo.nodes();
    let total = tensor::count(n);
    if prims.len() != total {
        return Err(Error::Dimension { expected: total, got: prims.len() });
    }
    let ops = element_ops(geo.orders, kind)?;
    let st = strides(n);
    let mut out = vec![State::ZERO; total];
    for d in 0..3 {
        let op = &ops[d];
        let contra: Vec<State> = prims.iter().zip(&geo.ja).map(|(q, ja)| euler_normal_prim(q, ja[d])).collect();
        for p in 0..total {
            let i = tensor::unpack(n, p)[d];
            let base = p - i * st[d];
            // diagonal: f#(u_i, u_i) = F(u_i)
            out[p] -= contra[p] * (2.0 * op.d[i * op.n + i]);
            for m in i + 1..op.n {
                let q = base + m * st[d];
                let f = if variant == TwoPointVariant::Central {
                    (contra[p] + contra[q]) * 0.5
                } else {
                    let ja = [0, 1, 2].map(|c| 0.5 * (geo.ja[p][d][c] + geo.ja[q][d][c]));
                    two_point_normal(variant, &prims[p], &prims[q], ja, gamma)
                };
                out[p] -= f * (2.0 * op.d[i * op.n + m]);
                out[q] -= f * (2.0 * op.d[m * op.n + i]);
            }
        }
    }
    Ok(out)
}

//! Curl-form mapping metrics.
//!
//! The mapping is sampled on Gauss-Lobatto nodes of a geometry order that
//! never exceeds the solution order, the contravariant vectors are built in
//! curl form there, and everything is then interpolated (exactly) to the
//! solution nodes. Elements sharing a face see the same face polynomial as
//! long as they share the geometry order, which makes free-stream
//! preservation hold across p-nonconforming faces.

use rayon::prelude::*;

use super::Mesh;
use crate::adaptation::OrderMap;
use crate::basis::{basis, NodeKind};
use crate::error::{Error, Result};
use crate::linalg::norm3;
use crate::tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct FaceGeometry {
    /// Node counts along the two tangential axes.
    pub shape: [usize; 2],
    /// Outward unit normal per face node.
    pub normal: Vec<[f64; 3]>,
    /// Surface Jacobian per face node.
    pub surface: Vec<f64>,
    pub x: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementGeometry {
    pub orders: [usize; 3],
    pub geometry_orders: [usize; 3],
    pub x: Vec<[f64; 3]>,
    pub jacobian: Vec<f64>,
    /// `ja[node][i]` is the contravariant vector Jaⁱ.
    pub ja: Vec<[[f64; 3]; 3]>,
    pub faces: [FaceGeometry; 6],
}

impl ElementGeometry {
    pub fn nodes(&self) -> [usize; 3] {
        self.orders.map(|p| p + 1)
    }

    /// Max over nodes of |Σᵢ ∂(Jaⁱ)/∂ξⁱ| using the solution differentiation matrices.
    pub fn metric_identity_residual(&self, kind: NodeKind) -> Result<f64> {
        let n = self.nodes();
        let mut div = vec![0.0; tensor::count(n) * 3];
        for i in 0..3 {
            let b = basis(self.orders[i], kind)?;
            let comp: Vec<f64> = self.ja.iter().flat_map(|m| m[i]).collect();
            let d = tensor::derivative(&comp, 3, n, i, b.diff_matrix());
            for (acc, v) in div.iter_mut().zip(d) {
                *acc += v;
            }
        }
        Ok(div.iter().fold(0.0, |m, v| m.max(v.abs())))
    }
}

#[derive(Debug, Clone)]
pub struct Geometry {
    kind: NodeKind,
    geometry_order: usize,
    elements: Vec<ElementGeometry>,
}

impl Geometry {
    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn geometry_order(&self) -> usize {
        self.geometry_order
    }

    pub fn element(&self, e: usize) -> &ElementGeometry {
        &self.elements[e]
    }

    pub fn elements(&self) -> &[ElementGeometry] {
        &self.elements
    }

    /// Σ over elements of ∫ J dξ.
    pub fn volume(&self) -> Result<f64> {
        let mut total = 0.0;
        for g in &self.elements {
            let w = quadrature_weights(g.orders, self.kind)?;
            total += w.iter().zip(&g.jacobian).map(|(w, j)| w * j).sum::<f64>();
        }
        Ok(total)
    }
}

/// Tensor quadrature weights ω_i ω_j ω_k in node order.
pub fn quadrature_weights(orders: [usize; 3], kind: NodeKind) -> Result<Vec<f64>> {
    let b = [basis(orders[0], kind)?, basis(orders[1], kind)?, basis(orders[2], kind)?];
    let n = orders.map(|p| p + 1);
    let mut w = Vec::with_capacity(tensor::count(n));
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                w.push(b[0].weights()[i] * b[1].weights()[j] * b[2].weights()[k]);
            }
        }
    }
    Ok(w)
}

/// Metrics for every element. Geometry is represented at order
/// `min(geometry_order, P_d)` per axis.
pub fn compute_metrics(mesh: &Mesh, orders: &OrderMap, kind: NodeKind, geometry_order: usize) -> Result<Geometry> {
    if geometry_order == 0 {
        return Err(Error::Order("geometry order must be at least 1".into()));
    }
    if orders.len() != mesh.element_count() {
        return Err(Error::Dimension { expected: mesh.element_count(), got: orders.len() });
    }
    let elements = (0..mesh.element_count())
        .into_par_iter()
        .map(|e| element_metrics(mesh, e, orders.get(e), kind, geometry_order))
        .collect::<Result<Vec<_>>>()?;
    Ok(Geometry { kind, geometry_order, elements })
}

fn element_metrics(
    mesh: &Mesh,
    element: usize,
    orders: [usize; 3],
    kind: NodeKind,
    geometry_order: usize,
) -> Result<ElementGeometry> {
    let g = orders.map(|p| p.min(geometry_order).max(1));
    let gb = [
        basis(g[0], NodeKind::GaussLobatto)?,
        basis(g[1], NodeKind::GaussLobatto)?,
        basis(g[2], NodeKind::GaussLobatto)?,
    ];
    let ng = g.map(|p| p + 1);
    let count = tensor::count(ng);

    let mut x = Vec::with_capacity(count * 3);
    for k in 0..ng[2] {
        for j in 0..ng[1] {
            for i in 0..ng[0] {
                let xi = [gb[0].nodes()[i], gb[1].nodes()[j], gb[2].nodes()[k]];
                x.extend(mesh.physical_point(element, xi));
            }
        }
    }
    let dx: Vec<Vec<f64>> = (0..3).map(|a| tensor::derivative(&x, 3, ng, a, gb[a].diff_matrix())).collect();

    // ja[node * 9 + 3 * i + n] = Jaⁱ_n
    let mut ja = vec![0.0; count * 9];
    for n in 0..3 {
        let m = (n + 1) % 3;
        let l = (n + 2) % 3;
        let v: Vec<f64> = (0..count)
            .flat_map(|p| {
                let xl = x[p * 3 + l];
                [0, 1, 2].map(|a| xl * dx[a][p * 3 + m])
            })
            .collect();
        for i in 0..3 {
            let a = (i + 1) % 3;
            let b = (i + 2) % 3;
            let vb: Vec<f64> = (0..count).map(|p| v[p * 3 + b]).collect();
            let va: Vec<f64> = (0..count).map(|p| v[p * 3 + a]).collect();
            let c1 = tensor::derivative(&vb, 1, ng, a, gb[a].diff_matrix());
            let c2 = tensor::derivative(&va, 1, ng, b, gb[b].diff_matrix());
            for p in 0..count {
                ja[p * 9 + 3 * i + n] = -(c1[p] - c2[p]);
            }
        }
    }

    // J = (1/3) Σᵢ ∂ᵢ (X · Jaⁱ)
    let mut jac = vec![0.0; count];
    for i in 0..3 {
        let xa: Vec<f64> = (0..count)
            .map(|p| (0..3).map(|n| x[p * 3 + n] * ja[p * 9 + 3 * i + n]).sum())
            .collect();
        let d = tensor::derivative(&xa, 1, ng, i, gb[i].diff_matrix());
        for p in 0..count {
            jac[p] += d[p] / 3.0;
        }
    }

    // interpolate to solution nodes
    let sb = [basis(orders[0], kind)?, basis(orders[1], kind)?, basis(orders[2], kind)?];
    let n = orders.map(|p| p + 1);
    let mats: Vec<Vec<f64>> = (0..3)
        .map(|a| gb[a].interpolation_matrix(sb[a].nodes()))
        .collect::<Result<_>>()?;
    let m3 = [0, 1, 2].map(|a| Some((mats[a].as_slice(), n[a])));
    let (xs, _) = tensor::apply(&x, 3, ng, m3);
    let (jas, _) = tensor::apply(&ja, 9, ng, m3);
    let (js, _) = tensor::apply(&jac, 1, ng, m3);

    if let Some(bad) = js.iter().copied().find(|j| !(*j > 0.0)) {
        return Err(Error::MeshValidity { element, jacobian: bad });
    }

    let faces = [0, 1, 2, 3, 4, 5].map(|f| {
        let axis = f / 2;
        let plus = f % 2 == 1;
        let end = if plus { sb[axis].right_end() } else { sb[axis].left_end() };
        let shape = tensor::face_shape(n, axis);
        let fx = tensor::face_trace(&xs, 3, n, axis, end);
        let comp: Vec<f64> = (0..tensor::count(n)).flat_map(|p| {
            let o = p * 9 + 3 * axis;
            [jas[o], jas[o + 1], jas[o + 2]]
        }).collect();
        let fja = tensor::face_trace(&comp, 3, n, axis, end);
        let sign = if plus { 1.0 } else { -1.0 };
        let nf = shape[0] * shape[1];
        let mut normal = Vec::with_capacity(nf);
        let mut surface = Vec::with_capacity(nf);
        for q in 0..nf {
            let ns = [0, 1, 2].map(|c| sign * fja[q * 3 + c]);
            let s = norm3(ns);
            surface.push(s);
            normal.push(ns.map(|c| c / s));
        }
        FaceGeometry { shape, normal, surface, x: fx.chunks(3).map(|c| [c[0], c[1], c[2]]).collect() }
    });

    Ok(ElementGeometry {
        orders,
        geometry_orders: g,
        x: xs.chunks(3).map(|c| [c[0], c[1], c[2]]).collect(),
        jacobian: js,
        ja: jas
            .chunks(9)
            .map(|c| [[c[0], c[1], c[2]], [c[3], c[4], c[5]], [c[6], c[7], c[8]]])
            .collect(),
        faces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_box_mesh, Curvature, MeshSpec};
    use std::f64::consts::PI;

    #[test]
    fn reference_cube_has_identity_metrics() {
        let mesh = build_box_mesh(&MeshSpec::new([1, 1, 1], [[-1.0, 1.0]; 3])).unwrap();
        for kind in [NodeKind::Gauss, NodeKind::GaussLobatto] {
            let orders = OrderMap::uniform(1, [3, 3, 3], 1, 6).unwrap();
            let geo = compute_metrics(&mesh, &orders, kind, 3).unwrap();
            let el = geo.element(0);
            for (j, ja) in el.jacobian.iter().zip(&el.ja) {
                assert!((j - 1.0).abs() < 1e-14);
                for i in 0..3 {
                    for n in 0..3 {
                        let e = if i == n { 1.0 } else { 0.0 };
                        assert!((ja[i][n] - e).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn two_pi_cube_jacobian() {
        let mesh = build_box_mesh(&MeshSpec::new([1, 1, 1], [[0.0, 2.0 * PI]; 3])).unwrap();
        let orders = OrderMap::uniform(1, [4, 4, 4], 1, 6).unwrap();
        let geo = compute_metrics(&mesh, &orders, NodeKind::GaussLobatto, 4).unwrap();
        let p3 = PI * PI * PI;
        assert!(geo.element(0).jacobian.iter().all(|j| (j - p3).abs() < 1e-12 * p3));
    }

    fn curved_spec() -> MeshSpec {
        MeshSpec::new([3, 2, 2], [[0.0, 2.0], [-1.0, 1.0], [0.0, 1.5]])
            .periodic([true; 3])
            .curved(Curvature::Sinusoidal { amplitude: 0.1, wavenumber: 1 })
    }

    #[test]
    fn curved_metric_identity_and_volume() {
        let spec = curved_spec();
        let mesh = build_box_mesh(&spec).unwrap();
        for kind in [NodeKind::Gauss, NodeKind::GaussLobatto] {
            for (p, ng) in [(4, 4), (5, 3), (3, 1)] {
                let orders = OrderMap::uniform(mesh.element_count(), [p, p, p], 1, 8).unwrap();
                let geo = compute_metrics(&mesh, &orders, kind, ng).unwrap();
                for el in geo.elements() {
                    assert!(el.metric_identity_residual(kind).unwrap() <= 1e-11);
                }
                assert!((geo.volume().unwrap() - spec.volume()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn anisotropic_orders_keep_identity() {
        let mesh = build_box_mesh(&curved_spec()).unwrap();
        let list: Vec<[usize; 3]> = (0..mesh.element_count()).map(|e| [2 + e % 3, 3, 2 + (e % 2) * 2]).collect();
        let orders = OrderMap::from_orders(list, 1, 6).unwrap();
        let geo = compute_metrics(&mesh, &orders, NodeKind::Gauss, 2).unwrap();
        for el in geo.elements() {
            assert!(el.metric_identity_residual(NodeKind::Gauss).unwrap() <= 1e-11);
        }
    }

    #[test]
    fn shared_faces_agree() {
        let mesh = build_box_mesh(&curved_spec()).unwrap();
        let orders = OrderMap::uniform(mesh.element_count(), [4, 4, 4], 1, 6).unwrap();
        for kind in [NodeKind::Gauss, NodeKind::GaussLobatto] {
            let geo = compute_metrics(&mesh, &orders, kind, 4).unwrap();
            for f in mesh.interior_faces() {
                let l = &geo.element(f.left).faces[f.left_face];
                let r = &geo.element(f.right).faces[f.right_face];
                for q in 0..l.normal.len() {
                    assert!((norm3(l.normal[q]) - 1.0).abs() < 1e-13);
                    assert!((l.surface[q] - r.surface[q]).abs() < 1e-12);
                    for c in 0..3 {
                        assert!((l.normal[q][c] + r.normal[q][c]).abs() < 1e-12);
                        assert!((r.x[q][c] - l.x[q][c] - f.translation[c]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn folded_mapping_is_rejected() {
        let spec = MeshSpec::new([1, 1, 1], [[0.0, 1.0]; 3])
            .curved(Curvature::Sinusoidal { amplitude: 2.0, wavenumber: 3 });
        let mesh = build_box_mesh(&spec).unwrap();
        let orders = OrderMap::uniform(1, [6, 6, 6], 1, 6).unwrap();
        let err = compute_metrics(&mesh, &orders, NodeKind::GaussLobatto, 6).unwrap_err();
        assert!(matches!(err, Error::MeshValidity { element: 0, .. }));
    }
}

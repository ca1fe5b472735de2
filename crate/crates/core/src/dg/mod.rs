//! Semi-discrete DGSEM right-hand side.
//!
//! A residual evaluation runs in five phases, each deterministic and
//! independent of the worker count:
//! 1. element pass: primitives and face traces;
//! 2. face pass: BR1 interface values of the gradient variables (viscous only);
//! 3. element pass: lifted gradients and nodal viscous fluxes (viscous only);
//! 4. face pass: numerical fluxes, each face evaluated once on its mortar;
//! 5. element pass: volume and surface integrals, `du = a du + dt L(u)`.

mod boundary;
mod field;
mod mortar;
mod ops;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::adaptation::OrderMap;
use crate::basis::NodeKind;
use crate::error::{Error, Result};
use crate::mesh::{compute_metrics, ElementGeometry, FaceLink, Geometry, Mesh, Orientation};
use crate::physics::{
    riemann_prim, entropy_variables, euler_normal_prim, primitive_from_conservative, smagorinsky_viscosity, two_point_normal,
    viscous_flux_prim, Flux, GasProperties, GradientState, Primitive, RiemannSolver, State, TwoPointVariant,
};
use crate::shock_capturing::{self, ArtificialFluxConfig};
use crate::tensor;

pub use boundary::{boundary_state, BoundaryCondition, BoundaryKind};
pub use field::{ElementData, SolutionField};
pub use mortar::{build_mortar, Mortar};
pub use ops::{volume_integral_split, volume_integral_weak};

pub(crate) use field::{flatten, unflatten};
pub(crate) use ops::{element_ops, strides};

/// Volume discretization: weak form or a flux-differencing split form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeForm {
    Standard,
    Split(TwoPointVariant),
}

impl VolumeForm {
    /// Two-point flux used as the central part of the interface flux.
    pub fn central_flux(&self) -> TwoPointVariant {
        match self {
            VolumeForm::Standard => TwoPointVariant::Central,
            VolumeForm::Split(v) => *v,
        }
    }
}

impl fmt::Display for VolumeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolumeForm::Standard => f.write_str("standard"),
            VolumeForm::Split(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for VolumeForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("standard") {
            return Ok(VolumeForm::Standard);
        }
        s.parse::<TwoPointVariant>().map(VolumeForm::Split).map_err(|_| {
            Error::Configuration(format!(
                "unknown volume flux '{s}' (expected standard, central, ducros, kennedy-gruber, pirozzoli, entropy-conserving or chandrashekar)"
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DgConfig {
    pub kind: NodeKind,
    pub volume: VolumeForm,
    pub riemann: RiemannSolver,
    pub gas: GasProperties,
    pub boundaries: Vec<BoundaryCondition>,
    /// Order of the geometry representation; keep it at or below the lowest
    /// element order so faces between different orders share one polynomial.
    pub geometry_order: usize,
    pub shock_capturing: Option<ArtificialFluxConfig>,
}

impl DgConfig {
    pub fn new(gas: GasProperties, geometry_order: usize) -> Self {
        DgConfig {
            kind: NodeKind::GaussLobatto,
            volume: VolumeForm::Standard,
            riemann: RiemannSolver::Roe,
            gas,
            boundaries: Vec::new(),
            geometry_order,
            shock_capturing: None,
        }
    }

    fn boundary(&self, tag: &str) -> Option<&BoundaryCondition> {
        self.boundaries.iter().find(|b| b.tag == tag)
    }

    fn svv_active(&self) -> bool {
        self.shock_capturing.as_ref().is_some_and(|s| s.mu_a > 0.0)
    }
}

#[derive(Debug, Clone)]
struct FacePlan {
    left: usize,
    left_face: usize,
    right: usize,
    right_face: usize,
    orientation: Orientation,
    right_shape: [usize; 2],
    mortar: Mortar,
    /// Left-outward `n s` at mortar nodes.
    ns: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

#[derive(Debug, Clone)]
struct BoundaryPlan {
    element: usize,
    face: usize,
    kind: BoundaryKind,
}

/// A mesh, its metrics at a given order distribution, and the numerical
/// configuration. Immutable; rebuild with [`Discretization::with_orders`]
/// after adaptation.
#[derive(Debug, Clone)]
pub struct Discretization {
    mesh: Arc<Mesh>,
    geometry: Geometry,
    orders: OrderMap,
    config: DgConfig,
    faces: Vec<FacePlan>,
    boundaries: Vec<BoundaryPlan>,
    weights: Vec<Vec<f64>>,
}

/// Per-face traces of one set of gradient variables.
struct GradVar {
    ncomp: usize,
    nodal: Vec<f64>,
    traces: [Vec<f64>; 6],
}

struct ElementTraces {
    prim: Vec<Primitive>,
    u: [Vec<f64>; 6],
    vars: Vec<GradVar>,
}

/// Interface values from the BR1 face pass, per variable set.
struct Stars {
    interior: Vec<Vec<[Vec<f64>; 2]>>,
    boundary: Vec<Vec<Vec<f64>>>,
}

struct ViscousData {
    flux: Vec<Flux>,
    traces: [Vec<f64>; 6],
}

struct FaceFluxes {
    interior: Vec<[Vec<f64>; 2]>,
    boundary: Vec<Vec<f64>>,
    dissipation: Vec<f64>,
}

const Q_VARS: usize = 4;

impl Discretization {
    pub fn new(mesh: Arc<Mesh>, orders: OrderMap, config: DgConfig) -> Result<Self> {
        config.gas.validate()?;
        if orders.len() != mesh.element_count() {
            return Err(Error::Dimension { expected: mesh.element_count(), got: orders.len() });
        }
        if matches!(config.volume, VolumeForm::Split(_)) && config.kind != NodeKind::GaussLobatto {
            return Err(Error::Configuration("split forms require Gauss-Lobatto nodes".into()));
        }
        if let Some(sc) = &config.shock_capturing {
            sc.validate()?;
            if config.kind != NodeKind::GaussLobatto {
                return Err(Error::Configuration("SVV shock capturing requires Gauss-Lobatto nodes".into()));
            }
        }
        for bc in &config.boundaries {
            bc.validate(&config.gas)?;
        }
        let geometry = compute_metrics(&mesh, &orders, config.kind, config.geometry_order)?;
        let kind = config.kind;

        let mut faces = Vec::with_capacity(mesh.interior_faces().len());
        for f in mesh.interior_faces() {
            let la = f.left_face / 2;
            let ra = f.right_face / 2;
            let lt = tensor::tangential(la);
            let rt = tensor::tangential(ra);
            let pl = orders.get(f.left);
            let pr = orders.get(f.right);
            let left_orders = [pl[lt[0]], pl[lt[1]]];
            let mut right_orders = [pr[rt[0]], pr[rt[1]]];
            if f.orientation.swaps() {
                right_orders.swap(0, 1);
            }
            let mortar = build_mortar(left_orders, right_orders, kind)?;
            let lg = &geometry.element(f.left).faces[f.left_face];
            let ns_left: Vec<f64> =
                lg.normal.iter().zip(&lg.surface).flat_map(|(n, s)| n.map(|c| c * s)).collect();
            let ns = mortar.left_to_mortar(&ns_left, 3).chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
            let weights = mortar.weights(kind)?;
            faces.push(FacePlan {
                left: f.left,
                left_face: f.left_face,
                right: f.right,
                right_face: f.right_face,
                orientation: f.orientation,
                right_shape: [pr[rt[0]] + 1, pr[rt[1]] + 1],
                mortar,
                ns,
                weights,
            });
        }

        let mut boundaries = Vec::with_capacity(mesh.boundary_faces().len());
        for b in mesh.boundary_faces() {
            let bc = config.boundary(&b.tag).ok_or_else(|| {
                Error::Configuration(format!("no boundary condition defined for tag '{}'", b.tag))
            })?;
            if bc.kind == BoundaryKind::Periodic {
                return Err(Error::Configuration(format!(
                    "boundary '{}' is declared periodic but the mesh is not periodic in that direction",
                    b.tag
                )));
            }
            boundaries.push(BoundaryPlan { element: b.element, face: b.face, kind: bc.kind });
        }

        let weights = (0..orders.len())
            .map(|e| crate::mesh::quadrature_weights(orders.get(e), kind))
            .collect::<Result<_>>()?;
        Ok(Discretization { mesh, geometry, orders, config, faces, boundaries, weights })
    }

    /// Same mesh and configuration at a new order distribution.
    pub fn with_orders(&self, orders: OrderMap) -> Result<Self> {
        Discretization::new(self.mesh.clone(), orders, self.config.clone())
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn orders(&self) -> &OrderMap {
        &self.orders
    }

    pub fn config(&self) -> &DgConfig {
        &self.config
    }

    pub fn kind(&self) -> NodeKind {
        self.config.kind
    }

    pub fn gas(&self) -> &GasProperties {
        &self.config.gas
    }

    /// Tensor quadrature weights of element `e`.
    pub fn weights(&self, e: usize) -> &[f64] {
        &self.weights[e]
    }

    /// Mortar of interior face `f` (in mesh face order).
    pub fn mortar(&self, f: usize) -> &Mortar {
        &self.faces[f].mortar
    }

    pub fn is_viscous(&self) -> bool {
        self.config.gas.is_viscous() || self.config.svv_active()
    }

    fn check_layout(&self, data: &ElementData) -> Result<()> {
        if data.len() != self.orders.len() {
            return Err(Error::Dimension { expected: self.orders.len(), got: data.len() });
        }
        for (e, d) in data.iter().enumerate() {
            if d.len() != self.weights[e].len() {
                return Err(Error::Dimension { expected: self.weights[e].len(), got: d.len() });
            }
        }
        Ok(())
    }

    /// Σ ω J u over the whole mesh.
    pub fn integrate(&self, data: &ElementData) -> State {
        let mut total = State::ZERO;
        for (e, d) in data.iter().enumerate() {
            let g = self.geometry.element(e);
            for ((u, w), j) in d.iter().zip(&self.weights[e]).zip(&g.jacobian) {
                total += *u * (w * j);
            }
        }
        total
    }

    /// Σ ω J f(node) over the mesh for a scalar nodal quantity.
    pub fn integrate_scalar(&self, values: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        for (e, v) in values.iter().enumerate() {
            let g = self.geometry.element(e);
            for ((x, w), j) in v.iter().zip(&self.weights[e]).zip(&g.jacobian) {
                total += x * w * j;
            }
        }
        total
    }

    /// Semi-discrete entropy production Σ ω J w · du/dt.
    pub fn entropy_rate(&self, u: &ElementData, dudt: &ElementData) -> Result<f64> {
        let mut total = 0.0;
        for (e, (ue, re)) in u.iter().zip(dudt).enumerate() {
            let g = self.geometry.element(e);
            for (n, (uu, r)) in ue.iter().zip(re).enumerate() {
                let w = entropy_variables(uu, &self.config.gas).map_err(|err| err.at(e, n))?;
                total += self.weights[e][n] * g.jacobian[n] * w.dot(r);
            }
        }
        Ok(total)
    }

    /// du/dt for the given field.
    pub fn residual(&self, field: &SolutionField) -> Result<ElementData> {
        let mut du = field.zeros_like();
        self.evaluate(field.data(), 0.0, 1.0, &mut du, false)?;
        Ok(du)
    }

    /// du/dt and the per-interior-face interface dissipation
    /// Σ ω s (w_R − w_L)·(f_ec − F*), which is non-negative for the dissipative
    /// solvers paired with an entropy-conservative central part.
    pub fn residual_with_dissipation(&self, field: &SolutionField) -> Result<(ElementData, Vec<f64>)> {
        let mut du = field.zeros_like();
        let diss = self.evaluate(field.data(), 0.0, 1.0, &mut du, true)?;
        Ok((du, diss))
    }

    /// Fused low-storage update `du ← a du + dt L(u)`.
    pub fn accumulate(&self, u: &ElementData, a: f64, dt: f64, du: &mut ElementData) -> Result<()> {
        self.evaluate(u, a, dt, du, false).map(|_| ())
    }

    /// BR1 gradients of velocity and temperature at every node.
    pub fn gradients(&self, field: &SolutionField) -> Result<Vec<Vec<GradientState>>> {
        let u = field.data();
        self.check_layout(u)?;
        let traces = self.element_traces(u, true, false)?;
        let stars = self.gradient_stars(&traces)?;
        (0..u.len())
            .into_par_iter()
            .map(|e| {
                let g = self.element_gradient(e, &traces[e].vars[0], &stars, 0)?;
                Ok((0..g.len() / Q_VARS).map(|p| gradient_state(&g, p)).collect())
            })
            .collect()
    }

    /// Smagorinsky eddy viscosity at every node (zero when the model is off).
    pub fn eddy_viscosity(&self, field: &SolutionField) -> Result<Vec<Vec<f64>>> {
        let cs = self.config.gas.smagorinsky_cs;
        if cs <= 0.0 {
            return Ok(field.data().iter().map(|e| vec![0.0; e.len()]).collect());
        }
        let grads = self.gradients(field)?;
        grads
            .par_iter()
            .zip(field.data().par_iter())
            .enumerate()
            .map(|(e, (ge, ue))| {
                let delta = filter_width(self.geometry.element(e));
                ge.iter().zip(ue).map(|(g, u)| smagorinsky_viscosity(u.rho(), g, delta, cs)).collect()
            })
            .collect()
    }

    fn evaluate(&self, u: &ElementData, a: f64, dt: f64, du: &mut ElementData, record: bool) -> Result<Vec<f64>> {
        self.check_layout(u)?;
        self.check_layout(du)?;
        let viscous = self.config.gas.is_viscous();
        let svv = self.config.svv_active();
        let traces = self.element_traces(u, viscous, svv)?;
        let viscous_data = if viscous || svv {
            let stars = self.gradient_stars(&traces)?;
            Some(
                (0..u.len())
                    .into_par_iter()
                    .map(|e| self.element_viscous(e, &u[e], &traces[e], &stars, viscous, svv))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        let fluxes = self.face_fluxes(&traces, viscous_data.as_deref(), record)?;
        du.par_iter_mut()
            .enumerate()
            .try_for_each(|(e, due)| self.element_update(e, &traces[e], viscous_data.as_ref().map(|v| &v[e]), &fluxes, a, dt, due))?;
        Ok(fluxes.dissipation)
    }

    fn element_traces(&self, u: &ElementData, viscous: bool, svv: bool) -> Result<Vec<ElementTraces>> {
        let gas = &self.config.gas;
        (0..u.len())
            .into_par_iter()
            .map(|e| {
                let geo = self.geometry.element(e);
                let n = geo.nodes();
                let ops = element_ops(geo.orders, self.config.kind)?;
                let prim = u[e]
                    .iter()
                    .enumerate()
                    .map(|(p, s)| primitive_from_conservative(s, gas).map_err(|err| err.at(e, p)))
                    .collect::<Result<Vec<_>>>()?;
                let flat = flatten(&u[e]);
                let trace = |data: &[f64], c: usize| {
                    [0, 1, 2, 3, 4, 5].map(|f| tensor::face_trace(data, c, n, f / 2, &ops[f / 2].ends[f % 2]))
                };
                let mut vars = Vec::new();
                if viscous {
                    let nodal: Vec<f64> = prim.iter().flat_map(|q| [q.v[0], q.v[1], q.v[2], q.t]).collect();
                    let traces = trace(&nodal, Q_VARS);
                    vars.push(GradVar { ncomp: Q_VARS, nodal, traces });
                }
                if svv {
                    let w = u[e]
                        .iter()
                        .enumerate()
                        .map(|(p, s)| entropy_variables(s, gas).map_err(|err| err.at(e, p)))
                        .collect::<Result<Vec<_>>>()?;
                    let nodal = flatten(&w);
                    let traces = trace(&nodal, 5);
                    vars.push(GradVar { ncomp: 5, nodal, traces });
                }
                Ok(ElementTraces { u: trace(&flat, 5), prim, vars })
            })
            .collect()
    }

    /// Gradient-variable values of the exterior state on a boundary face node.
    fn ghost_vars(&self, plan: &BoundaryPlan, var: usize, ncomp: usize, inner: &[f64], u_in: &State, n: [f64; 3]) -> Result<Vec<f64>> {
        let gas = &self.config.gas;
        if ncomp == Q_VARS && var == 0 {
            let v = [inner[0], inner[1], inner[2]];
            return Ok(match plan.kind {
                BoundaryKind::FreeStream(s) => {
                    let q = primitive_from_conservative(&s, gas)?;
                    vec![q.v[0], q.v[1], q.v[2], q.t]
                }
                BoundaryKind::InviscidWall => {
                    let vn = crate::linalg::dot3(v, n);
                    vec![v[0] - 2.0 * vn * n[0], v[1] - 2.0 * vn * n[1], v[2] - 2.0 * vn * n[2], inner[3]]
                }
                BoundaryKind::NoSlipAdiabaticWall => vec![-v[0], -v[1], -v[2], inner[3]],
                BoundaryKind::Periodic => unreachable!("rejected at construction"),
            });
        }
        let ghost = boundary_state(&plan.kind, u_in, n, gas)?;
        Ok(entropy_variables(&ghost, gas)?.0.to_vec())
    }

    fn gradient_stars(&self, traces: &[ElementTraces]) -> Result<Stars> {
        let nvars = traces.first().map_or(0, |t| t.vars.len());
        let interior = self
            .faces
            .par_iter()
            .map(|f| {
                (0..nvars)
                    .map(|v| {
                        let c = traces[f.left].vars[v].ncomp;
                        let l = &traces[f.left].vars[v].traces[f.left_face];
                        let r = to_left_frame(&traces[f.right].vars[v].traces[f.right_face], c, f.orientation, f.right_shape);
                        let lm = f.mortar.left_to_mortar(l, c);
                        let rm = f.mortar.right_to_mortar(&r, c);
                        let avg: Vec<f64> = lm.iter().zip(&rm).map(|(a, b)| 0.5 * (a + b)).collect();
                        let ls = f.mortar.mortar_to_left(&avg, c);
                        let rs = to_right_frame(&f.mortar.mortar_to_right(&avg, c), c, f.orientation, f.right_shape);
                        [ls, rs]
                    })
                    .collect()
            })
            .collect();
        let boundary = self
            .boundaries
            .par_iter()
            .map(|b| {
                let tr = &traces[b.element];
                let fg = &self.geometry.element(b.element).faces[b.face];
                let us = unflatten(&tr.u[b.face]);
                (0..nvars)
                    .map(|v| {
                        let c = tr.vars[v].ncomp;
                        let inner = &tr.vars[v].traces[b.face];
                        let mut out = Vec::with_capacity(inner.len());
                        for (q, (u_in, n)) in us.iter().zip(&fg.normal).enumerate() {
                            let own = &inner[q * c..(q + 1) * c];
                            let ghost = self.ghost_vars(b, v, c, own, u_in, *n).map_err(|err| err.at(b.element, q))?;
                            out.extend(own.iter().zip(&ghost).map(|(a, g)| 0.5 * (a + g)));
                        }
                        Ok(out)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Stars { interior, boundary })
    }

    fn star_for<'s>(&self, stars: &'s Stars, e: usize, face: usize, var: usize) -> &'s [f64] {
        match self.mesh.face_link(e, face) {
            FaceLink::Interior { face: f, is_left } => &stars.interior[f][var][usize::from(!is_left)],
            FaceLink::Boundary(b) => &stars.boundary[b][var],
        }
    }

    /// Physical gradients `[node * ncomp + c] -> [∂x, ∂y, ∂z]` of one variable set,
    /// strong form with lifted interface jumps.
    fn element_gradient(&self, e: usize, var: &GradVar, stars: &Stars, vi: usize) -> Result<Vec<[f64; 3]>> {
        let geo = self.geometry.element(e);
        let n = geo.nodes();
        let c = var.ncomp;
        let ops = element_ops(geo.orders, self.config.kind)?;
        let total = tensor::count(n);
        let mut g = vec![[0.0; 3]; total * c];
        for i in 0..3 {
            let dq = tensor::derivative(&var.nodal, c, n, i, &ops[i].d);
            for p in 0..total {
                let ja = geo.ja[p][i];
                for k in 0..c {
                    let v = dq[p * c + k];
                    for d in 0..3 {
                        g[p * c + k][d] += ja[d] * v;
                    }
                }
            }
        }
        let st = strides(n);
        for face in 0..6 {
            let axis = face / 2;
            let lift = &ops[axis].lift[face % 2];
            let star = self.star_for(stars, e, face, vi);
            let own = &var.traces[face];
            let fg = &geo.faces[face];
            let t = tensor::tangential(axis);
            for q in 0..fg.surface.len() {
                let (a, b) = (q % fg.shape[0], q / fg.shape[0]);
                let ns = fg.normal[q].map(|x| x * fg.surface[q]);
                let base = a * st[t[0]] + b * st[t[1]];
                for (m, l) in lift.iter().enumerate() {
                    if *l == 0.0 {
                        continue;
                    }
                    let p = base + m * st[axis];
                    for k in 0..c {
                        let jump = l * (star[q * c + k] - own[q * c + k]);
                        for d in 0..3 {
                            g[p * c + k][d] += jump * ns[d];
                        }
                    }
                }
            }
        }
        for p in 0..total {
            let inv = 1.0 / geo.jacobian[p];
            for k in 0..c {
                for d in 0..3 {
                    g[p * c + k][d] *= inv;
                }
            }
        }
        Ok(g)
    }

    fn element_viscous(
        &self,
        e: usize,
        u: &[State],
        tr: &ElementTraces,
        stars: &Stars,
        viscous: bool,
        svv: bool,
    ) -> Result<ViscousData> {
        let geo = self.geometry.element(e);
        let n = geo.nodes();
        let total = tensor::count(n);
        let gas = &self.config.gas;
        let mut flux = vec![[State::ZERO; 3]; total];
        if viscous {
            let g = self.element_gradient(e, &tr.vars[0], stars, 0)?;
            let delta = filter_width(geo);
            for (p, f) in flux.iter_mut().enumerate() {
                let grad = gradient_state(&g, p);
                let q = &tr.prim[p];
                let eddy = if gas.smagorinsky_cs > 0.0 {
                    smagorinsky_viscosity(q.rho, &grad, delta, gas.smagorinsky_cs)?
                } else {
                    0.0
                };
                let mu = gas.mu + eddy;
                *f = viscous_flux_prim(&q.v, &grad, mu, gas.kappa_for(mu));
            }
        }
        if svv {
            let vi = usize::from(viscous);
            let sc = self.config.shock_capturing.as_ref().expect("svv active");
            let sensor = shock_capturing::density_sensor(u, geo, self.config.kind)?;
            let blend = shock_capturing::blend_artificial_viscosity(sensor, sc);
            if blend.mu > 0.0 {
                let g = self.element_gradient(e, &tr.vars[vi], stars, vi)?;
                let grad_w: Vec<[State; 3]> = (0..total)
                    .map(|p| [0, 1, 2].map(|d| State([0, 1, 2, 3, 4].map(|k| g[p * 5 + k][d]))))
                    .collect();
                let fa = shock_capturing::svv_filtered_flux(
                    &tr.prim, &grad_w, geo, self.config.kind, &sc.kernel, blend.theta, blend.mu, gas,
                )?;
                for (f, a) in flux.iter_mut().zip(fa) {
                    for d in 0..3 {
                        f[d] += a[d];
                    }
                }
            }
        }
        let ops = element_ops(geo.orders, self.config.kind)?;
        let flat: Vec<f64> = flux.iter().flat_map(|f| f.iter().flat_map(|s| s.0)).collect();
        let traces = [0, 1, 2, 3, 4, 5].map(|f| tensor::face_trace(&flat, 15, n, f / 2, &ops[f / 2].ends[f % 2]));
        Ok(ViscousData { flux, traces })
    }

    fn face_fluxes(&self, traces: &[ElementTraces], visc: Option<&[ViscousData]>, record: bool) -> Result<FaceFluxes> {
        let gas = &self.config.gas;
        let gamma = gas.gamma;
        let solver = self.config.riemann;
        let central = self.config.volume.central_flux();
        let results = self
            .faces
            .par_iter()
            .map(|f| {
                let ul = &traces[f.left].u[f.left_face];
                let ur = to_left_frame(&traces[f.right].u[f.right_face], 5, f.orientation, f.right_shape);
                let ulm = unflatten(&f.mortar.left_to_mortar(ul, 5));
                let urm = unflatten(&f.mortar.right_to_mortar(&ur, 5));
                let fv = visc.map(|v| {
                    let l = f.mortar.left_to_mortar(&v[f.left].traces[f.left_face], 15);
                    let r = to_left_frame(&v[f.right].traces[f.right_face], 15, f.orientation, f.right_shape);
                    (l, f.mortar.right_to_mortar(&r, 15))
                });
                let mut out = Vec::with_capacity(ulm.len() * 5);
                let mut diss = 0.0;
                for (q, (a, b)) in ulm.iter().zip(&urm).enumerate() {
                    let pa = primitive_from_conservative(a, gas).map_err(|err| err.at(f.left, q))?;
                    let pb = primitive_from_conservative(b, gas).map_err(|err| err.at(f.right, q))?;
                    let ns = f.ns[q];
                    let s = crate::linalg::norm3(ns);
                    let nhat = ns.map(|c| c / s);
                    let fstar = riemann_prim(solver, central, &pa, &pb, a, b, nhat, gamma);
                    if record {
                        let dw = entropy_variables(b, gas)? - entropy_variables(a, gas)?;
                        let fec = two_point_normal(TwoPointVariant::EntropyConserving, &pa, &pb, nhat, gamma);
                        diss += f.weights[q] * s * dw.dot(&(fec - fstar));
                    }
                    let mut net = fstar * s;
                    if let Some((l, r)) = &fv {
                        for k in 0..5 {
                            let mut v = 0.0;
                            for d in 0..3 {
                                v += 0.5 * (l[q * 15 + d * 5 + k] + r[q * 15 + d * 5 + k]) * ns[d];
                            }
                            net[k] -= v;
                        }
                    }
                    out.extend(net.0);
                }
                let left = f.mortar.mortar_to_left(&out, 5);
                let mut right = f.mortar.mortar_to_right(&out, 5);
                right.iter_mut().for_each(|v| *v = -*v);
                Ok(([left, to_right_frame(&right, 5, f.orientation, f.right_shape)], diss))
            })
            .collect::<Result<Vec<_>>>()?;
        let boundary = self
            .boundaries
            .par_iter()
            .map(|b| {
                let fg = &self.geometry.element(b.element).faces[b.face];
                let us = unflatten(&traces[b.element].u[b.face]);
                let fv = visc.map(|v| &v[b.element].traces[b.face]);
                let mut out = Vec::with_capacity(us.len() * 5);
                for (q, u) in us.iter().enumerate() {
                    let n = fg.normal[q];
                    let s = fg.surface[q];
                    let ghost = boundary_state(&b.kind, u, n, gas).map_err(|err| err.at(b.element, q))?;
                    let pa = primitive_from_conservative(u, gas).map_err(|err| err.at(b.element, q))?;
                    let pb = primitive_from_conservative(&ghost, gas).map_err(|err| err.at(b.element, q))?;
                    let mut net = riemann_prim(solver, central, &pa, &pb, u, &ghost, n, gamma) * s;
                    if let Some(fv) = fv {
                        if b.kind != BoundaryKind::InviscidWall {
                            let last = if b.kind == BoundaryKind::NoSlipAdiabaticWall { 4 } else { 5 };
                            for k in 1..last {
                                let v: f64 = (0..3).map(|d| fv[q * 15 + d * 5 + k] * n[d] * s).sum();
                                net[k] -= v;
                            }
                        }
                    }
                    out.extend(net.0);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut interior = Vec::with_capacity(results.len());
        let mut dissipation = Vec::with_capacity(results.len());
        for (sides, d) in results {
            interior.push(sides);
            dissipation.push(d);
        }
        Ok(FaceFluxes { interior, boundary, dissipation })
    }

    #[allow(clippy::too_many_arguments)]
    fn element_update(
        &self,
        e: usize,
        tr: &ElementTraces,
        visc: Option<&ViscousData>,
        fluxes: &FaceFluxes,
        a: f64,
        dt: f64,
        du: &mut [State],
    ) -> Result<()> {
        let geo = self.geometry.element(e);
        let kind = self.config.kind;
        let gamma = self.config.gas.gamma;
        let split = match self.config.volume {
            VolumeForm::Split(v) => Some(v),
            VolumeForm::Standard => None,
        };
        let mut r = match split {
            Some(v) => {
                let mut r = volume_integral_split(&tr.prim, geo, kind, v, gamma)?;
                if let Some(vd) = visc {
                    let neg: Vec<Flux> = vd.flux.iter().map(|f| f.map(|s| -s)).collect();
                    for (x, y) in r.iter_mut().zip(volume_integral_weak(&neg, geo, kind)?) {
                        *x += y;
                    }
                }
                r
            }
            None => {
                let net: Vec<Flux> = match visc {
                    Some(vd) => tr
                        .prim
                        .iter()
                        .zip(&vd.flux)
                        .map(|(q, fv)| {
                            let fe = crate::physics::euler_flux_prim(q);
                            [fe[0] - fv[0], fe[1] - fv[1], fe[2] - fv[2]]
                        })
                        .collect(),
                    None => tr.prim.iter().map(crate::physics::euler_flux_prim).collect(),
                };
                volume_integral_weak(&net, geo, kind)?
            }
        };

        let n = geo.nodes();
        let st = strides(n);
        let ops = element_ops(geo.orders, kind)?;
        let gas = &self.config.gas;
        for face in 0..6 {
            let axis = face / 2;
            let lift = &ops[axis].lift[face % 2];
            let fout = match self.mesh.face_link(e, face) {
                FaceLink::Interior { face: f, is_left } => &fluxes.interior[f][usize::from(!is_left)],
                FaceLink::Boundary(b) => &fluxes.boundary[b],
            };
            let fg = &geo.faces[face];
            let t = tensor::tangential(axis);
            let own: Option<Vec<State>> = split.map(|_| {
                unflatten(&tr.u[face])
                    .iter()
                    .zip(fg.normal.iter().zip(&fg.surface))
                    .map(|(u, (nn, s))| {
                        let q = primitive_from_conservative(u, gas).expect("trace of admissible GL nodes");
                        euler_normal_prim(&q, nn.map(|c| c * s))
                    })
                    .collect()
            });
            for q in 0..fg.surface.len() {
                let (ia, ib) = (q % fg.shape[0], q / fg.shape[0]);
                let base = ia * st[t[0]] + ib * st[t[1]];
                let mut value = State([0, 1, 2, 3, 4].map(|k| fout[q * 5 + k]));
                if let Some(own) = &own {
                    value -= own[q];
                }
                for (m, l) in lift.iter().enumerate() {
                    if *l != 0.0 {
                        r[base + m * st[axis]] -= value * *l;
                    }
                }
            }
        }
        for ((d, r), j) in du.iter_mut().zip(r).zip(&geo.jacobian) {
            *d = *d * a + r * (dt / j);
        }
        Ok(())
    }
}

fn gradient_state(g: &[[f64; 3]], p: usize) -> GradientState {
    let o = p * Q_VARS;
    GradientState { velocity: [g[o], g[o + 1], g[o + 2]], temperature: g[o + 3] }
}

/// LES filter width J^(1/3) · 2 / (P + 1) with the geometric-mean order.
fn filter_width(geo: &ElementGeometry) -> f64 {
    let mean_j = geo.jacobian.iter().sum::<f64>() / geo.jacobian.len() as f64;
    let np = geo.orders.iter().map(|p| (p + 1) as f64).product::<f64>().cbrt();
    mean_j.cbrt() * 2.0 / np
}

fn left_frame_dims(o: Orientation, right_shape: [usize; 2]) -> (usize, usize) {
    if o.swaps() {
        (right_shape[1], right_shape[0])
    } else {
        (right_shape[0], right_shape[1])
    }
}

/// Reorder right-frame face data into the left frame.
fn to_left_frame(data: &[f64], c: usize, o: Orientation, right_shape: [usize; 2]) -> Vec<f64> {
    if o == Orientation::IDENTITY {
        return data.to_vec();
    }
    let (na, nb) = left_frame_dims(o, right_shape);
    let mut out = vec![0.0; data.len()];
    for b in 0..nb {
        for a in 0..na {
            let (x, y) = o.map(a, b, na, nb);
            let src = (x + right_shape[0] * y) * c;
            let dst = (a + na * b) * c;
            out[dst..dst + c].copy_from_slice(&data[src..src + c]);
        }
    }
    out
}

fn to_right_frame(data: &[f64], c: usize, o: Orientation, right_shape: [usize; 2]) -> Vec<f64> {
    if o == Orientation::IDENTITY {
        return data.to_vec();
    }
    let (na, nb) = left_frame_dims(o, right_shape);
    let mut out = vec![0.0; data.len()];
    for b in 0..nb {
        for a in 0..na {
            let (x, y) = o.map(a, b, na, nb);
            let dst = (x + right_shape[0] * y) * c;
            let src = (a + na * b) * c;
            out[dst..dst + c].copy_from_slice(&data[src..src + c]);
        }
    }
    out
}

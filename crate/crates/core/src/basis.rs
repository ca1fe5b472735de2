//! One-dimensional nodal spectral bases on [-1, 1].
//!
//! A [`NodalBasis`] bundles the quadrature rule, the collocation
//! differentiation matrix, barycentric weights and the Legendre modal
//! transforms for one polynomial order and node family. Bases are immutable
//! and shared through [`basis`], which caches them by `(order, kind)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::linalg;

pub const MAX_ORDER: usize = 20;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Gauss,
    GaussLobatto,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::Gauss => write!(f, "gauss"),
            NodeKind::GaussLobatto => write!(f, "gauss-lobatto"),
        }
    }
}

impl FromStr for NodeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gauss" | "gauss-legendre" | "legendre" => Ok(NodeKind::Gauss),
            "gauss-lobatto" | "lobatto" | "gauss lobatto" => Ok(NodeKind::GaussLobatto),
            other => Err(Error::Configuration(format!("unknown node family '{other}'"))),
        }
    }
}

/// Legendre polynomial `L_n(x)` and its derivative by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    match n {
        0 => (1.0, 0.0),
        1 => (x, 1.0),
        _ => {
            let (mut l0, mut l1) = (1.0, x);
            let (mut d0, mut d1) = (0.0, 1.0);
            for k in 2..=n {
                let kf = k as f64;
                let l2 = ((2.0 * kf - 1.0) * x * l1 - (kf - 1.0) * l0) / kf;
                let d2 = d0 + (2.0 * kf - 1.0) * l1;
                l0 = l1;
                l1 = l2;
                d0 = d1;
                d1 = d2;
            }
            (l1, d1)
        }
    }
}

#[derive(Debug, Clone)]
pub struct NodalBasis {
    order: usize,
    kind: NodeKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    diff: Vec<f64>,
    bary: Vec<f64>,
    modal_forward: Vec<f64>,
    modal_backward: Vec<f64>,
    left_end: Vec<f64>,
    right_end: Vec<f64>,
}

impl NodalBasis {
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn kind(&self) -> NodeKind {
        self.kind
    }
    /// Number of nodes, `order + 1`.
    pub fn len(&self) -> usize {
        self.order + 1
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    /// Differentiation matrix, row-major `(P+1) x (P+1)`.
    pub fn diff_matrix(&self) -> &[f64] {
        &self.diff
    }
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.diff[i * (self.order + 1) + j]
    }
    pub fn baryweights(&self) -> &[f64] {
        &self.bary
    }
    /// Nodal values to Legendre coefficients, row-major.
    pub fn modal_forward(&self) -> &[f64] {
        &self.modal_forward
    }
    /// Legendre coefficients to nodal values (the Vandermonde matrix).
    pub fn modal_backward(&self) -> &[f64] {
        &self.modal_backward
    }
    /// Lagrange basis values at xi = -1.
    pub fn left_end(&self) -> &[f64] {
        &self.left_end
    }
    /// Lagrange basis values at xi = +1.
    pub fn right_end(&self) -> &[f64] {
        &self.right_end
    }

    /// Lagrange basis values at `x` (barycentric form). `x` is not range-checked.
    pub fn lagrange_at(&self, x: f64) -> Vec<f64> {
        let n = self.len();
        let mut row = vec![0.0; n];
        if let Some(j) = self.nodes.iter().position(|&xj| (x - xj).abs() < 1e-15) {
            row[j] = 1.0;
            return row;
        }
        let mut denom = 0.0;
        for j in 0..n {
            let t = self.bary[j] / (x - self.nodes[j]);
            row[j] = t;
            denom += t;
        }
        for v in &mut row {
            *v /= denom;
        }
        row
    }

    /// Row `i` evaluates the interpolant at `targets[i]`.
    pub fn interpolation_matrix(&self, targets: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(targets.len() * self.len());
        for &t in targets {
            if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&t) {
                return Err(Error::OutOfRange(t));
            }
            out.extend(self.lagrange_at(t.clamp(-1.0, 1.0)));
        }
        Ok(out)
    }

    pub fn apply_diff(&self, values: &[f64]) -> Result<Vec<f64>> {
        self.check_len(values.len())?;
        let n = self.len();
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.diff[i * n + j] * values[j]).sum())
            .collect())
    }

    pub fn to_modal(&self, values: &[f64]) -> Result<Vec<f64>> {
        self.check_len(values.len())?;
        Ok(mat_vec(&self.modal_forward, values))
    }

    pub fn from_modal(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_len(coeffs.len())?;
        Ok(mat_vec(&self.modal_backward, coeffs))
    }

    /// Exact mass matrix `∫ l_i l_j`, row-major.
    pub fn exact_mass_matrix(&self) -> Vec<f64> {
        let n = self.len();
        let quad = gauss_rule(self.order + 1);
        let mut m = vec![0.0; n * n];
        for (&x, &w) in quad.0.iter().zip(&quad.1) {
            let l = self.lagrange_at(x);
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] += w * l[i] * l[j];
                }
            }
        }
        m
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::Dimension { expected: self.len(), got });
        }
        Ok(())
    }
}

fn mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum())
        .collect()
}

fn newton_root(f: impl Fn(f64) -> (f64, f64), mut x: f64) -> Option<f64> {
    for _ in 0..NEWTON_MAX_ITER {
        let (q, dq) = f(x);
        if dq == 0.0 {
            return None;
        }
        let delta = q / dq;
        x -= delta;
        if delta.abs() <= NEWTON_TOL * x.abs().max(1.0) {
            return Some(x);
        }
    }
    None
}

/// Locate the `count` roots of `f` inside (-1, 1) by sign-change scanning and bisection.
pub(crate) fn bisection_roots(f: impl Fn(f64) -> f64, count: usize) -> Vec<f64> {
    let samples = 400 * (count + 1);
    let mut roots = Vec::with_capacity(count);
    let mut a = -1.0 + 1e-12;
    let mut fa = f(a);
    for s in 1..=samples {
        let b = -1.0 + 2.0 * s as f64 / samples as f64 - if s == samples { 1e-12 } else { 0.0 };
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 || (hi - lo) < 1e-16 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    roots.truncate(count);
    roots
}

/// Interior nodes by Newton from Chebyshev guesses, falling back to bisection.
fn solve_nodes(f: impl Fn(f64) -> (f64, f64) + Copy, guesses: &[f64]) -> Vec<f64> {
    let mut roots = Vec::with_capacity(guesses.len());
    for &g in guesses {
        match newton_root(f, g) {
            Some(r) if r > -1.0 && r < 1.0 => roots.push(r),
            _ => return bisection_roots(|x| f(x).0, guesses.len()),
        }
    }
    let distinct = roots.windows(2).all(|w| w[1] - w[0] > 1e-10);
    if !distinct {
        return bisection_roots(|x| f(x).0, guesses.len());
    }
    roots
}

fn symmetrize(nodes: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let v = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -v;
        nodes[n - 1 - i] = v;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

/// Gauss-Legendre rule with `order + 1` points.
fn gauss_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order + 1;
    let guesses: Vec<f64> = (0..n)
        .map(|j| -((2 * j + 1) as f64 * PI / (2 * n) as f64).cos())
        .collect();
    let mut nodes = solve_nodes(|x| legendre(n, x), &guesses);
    symmetrize(&mut nodes);
    let weights = nodes
        .iter()
        .map(|&x| {
            let (_, d) = legendre(n, x);
            2.0 / ((1.0 - x * x) * d * d)
        })
        .collect();
    (nodes, weights)
}

/// Gauss-Lobatto rule with `order + 1` points (order >= 1).
fn lobatto_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    let p = order;
    let mut nodes = vec![-1.0];
    if p > 1 {
        // interior roots of L'_p are the interior roots of L_{p+1} - L_{p-1}
        let q = |x: f64| {
            let (a, _) = legendre(p + 1, x);
            let (b, _) = legendre(p - 1, x);
            let (lp, _) = legendre(p, x);
            (a - b, (2 * p + 1) as f64 * lp)
        };
        let guesses: Vec<f64> = (1..p).map(|j| -(j as f64 * PI / p as f64).cos()).collect();
        nodes.extend(solve_nodes(q, &guesses));
    }
    nodes.push(1.0);
    symmetrize(&mut nodes);
    let pf = p as f64;
    let weights = nodes
        .iter()
        .map(|&x| {
            let (l, _) = legendre(p, x);
            2.0 / (pf * (pf + 1.0) * l * l)
        })
        .collect();
    (nodes, weights)
}

pub fn build_basis(order: usize, kind: NodeKind) -> Result<NodalBasis> {
    if order > MAX_ORDER {
        return Err(Error::InvalidOrder { order, reason: "exceeds the maximum supported order 20" });
    }
    if order == 0 && kind == NodeKind::GaussLobatto {
        return Err(Error::InvalidOrder { order, reason: "Gauss-Lobatto needs at least two nodes" });
    }
    let (nodes, weights) = match kind {
        NodeKind::Gauss => gauss_rule(order),
        NodeKind::GaussLobatto => lobatto_rule(order),
    };
    let n = order + 1;

    let bary: Vec<f64> = (0..n)
        .map(|j| {
            let prod: f64 = (0..n)
                .filter(|&k| k != j)
                .map(|k| nodes[j] - nodes[k])
                .product();
            1.0 / prod
        })
        .collect();

    let mut diff = vec![0.0; n * n];
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                diff[i * n + j] = v;
                row_sum += v;
            }
        }
        diff[i * n + i] = -row_sum;
    }

    // Vandermonde V_ij = L_j(x_i); its inverse via the discrete orthogonality of
    // Legendre modes under the rule's own weights.
    let mut backward = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            backward[i * n + j] = legendre(j, nodes[i]).0;
        }
    }
    let mut forward = vec![0.0; n * n];
    for k in 0..n {
        let norm: f64 = (0..n).map(|i| weights[i] * backward[i * n + k].powi(2)).sum();
        for i in 0..n {
            forward[k * n + i] = weights[i] * backward[i * n + k] / norm;
        }
    }

    let mut basis = NodalBasis {
        order,
        kind,
        nodes,
        weights,
        diff,
        bary,
        modal_forward: forward,
        modal_backward: backward,
        left_end: Vec::new(),
        right_end: Vec::new(),
    };
    basis.left_end = basis.lagrange_at(-1.0);
    basis.right_end = basis.lagrange_at(1.0);
    Ok(basis)
}

type BasisCache = RwLock<HashMap<(usize, NodeKind), Arc<NodalBasis>>>;
type ProjectionCache = RwLock<HashMap<(usize, usize, NodeKind), Arc<Vec<f64>>>>;

fn basis_cache() -> &'static BasisCache {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn projection_cache() -> &'static ProjectionCache {
    static CACHE: OnceLock<ProjectionCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared, cached basis for `(order, kind)`.
pub fn basis(order: usize, kind: NodeKind) -> Result<Arc<NodalBasis>> {
    if let Some(b) = basis_cache().read().unwrap().get(&(order, kind)) {
        return Ok(b.clone());
    }
    let built = Arc::new(build_basis(order, kind)?);
    let mut w = basis_cache().write().unwrap();
    Ok(w.entry((order, kind)).or_insert(built).clone())
}

/// Operator taking nodal values at order `from` to order `to` (row-major,
/// `(to+1) x (from+1)`): interpolation when raising the order, the exact L2
/// projection when lowering it. Both reproduce polynomials of degree
/// `min(from, to)` exactly.
pub fn projection(from: usize, to: usize, kind: NodeKind) -> Result<Arc<Vec<f64>>> {
    if let Some(m) = projection_cache().read().unwrap().get(&(from, to, kind)) {
        return Ok(m.clone());
    }
    let src = basis(from, kind)?;
    let dst = basis(to, kind)?;
    let mat = if to >= from {
        src.interpolation_matrix(dst.nodes())?
    } else {
        l2_projection(&src, &dst)
    };
    let mat = Arc::new(mat);
    let mut w = projection_cache().write().unwrap();
    Ok(w.entry((from, to, kind)).or_insert(mat).clone())
}

fn l2_projection(src: &NodalBasis, dst: &NodalBasis) -> Vec<f64> {
    let (ns, nd) = (src.len(), dst.len());
    let (qx, qw) = gauss_rule(src.order.max(dst.order) + 1);
    let mut rhs = vec![0.0; nd * ns];
    for (&x, &w) in qx.iter().zip(&qw) {
        let ls = src.lagrange_at(x);
        let ld = dst.lagrange_at(x);
        for i in 0..nd {
            for j in 0..ns {
                rhs[i * ns + j] += w * ld[i] * ls[j];
            }
        }
    }
    linalg::solve(&dst.exact_mass_matrix(), &rhs, nd, ns).expect("mass matrix is SPD")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moment(k: usize) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            2.0 / (k as f64 + 1.0)
        }
    }

    #[test]
    fn midpoint_rule_for_order_zero() {
        let b = build_basis(0, NodeKind::Gauss).unwrap();
        assert_eq!(b.nodes(), &[0.0]);
        assert!((b.weights()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_gauss_matches_bisection_oracle() {
        // roots of L_2 = (3x^2 - 1)/2 by plain bisection, weights from exactness on {1, x^2}
        let roots = bisection_roots(|x| 1.5 * x * x - 0.5, 2);
        let w = 1.0; // symmetric pair: 2w = 2
        let b = build_basis(1, NodeKind::Gauss).unwrap();
        for i in 0..2 {
            assert!((b.nodes()[i] - roots[i]).abs() < 1e-14);
            assert!((b.weights()[i] - w).abs() < 1e-14);
        }
        assert!((b.nodes()[1] - 0.5773502692).abs() < 1e-10);
    }

    #[test]
    fn three_point_lobatto_by_moment_matching() {
        // endpoints fixed at ±1, middle at 0; weights (a, b, a) with 2a + b = 2, 2a = 2/3
        let a = 1.0 / 3.0;
        let bw = 2.0 - 2.0 * a;
        let b = build_basis(2, NodeKind::GaussLobatto).unwrap();
        assert_eq!(b.nodes(), &[-1.0, 0.0, 1.0]);
        assert!((b.weights()[0] - a).abs() < 1e-14);
        assert!((b.weights()[1] - bw).abs() < 1e-14);
        assert!((b.weights()[1] - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn lobatto_order_zero_rejected() {
        assert!(matches!(
            build_basis(0, NodeKind::GaussLobatto),
            Err(Error::InvalidOrder { order: 0, .. })
        ));
        assert!(build_basis(MAX_ORDER + 1, NodeKind::Gauss).is_err());
    }

    #[test]
    fn invariants_hold_up_to_max_order() {
        for kind in [NodeKind::Gauss, NodeKind::GaussLobatto] {
            let start = if kind == NodeKind::Gauss { 0 } else { 1 };
            for p in start..=MAX_ORDER {
                let b = build_basis(p, kind).unwrap();
                let n = p + 1;
                assert!((b.weights().iter().sum::<f64>() - 2.0).abs() < 1e-13, "{kind} {p}");
                for i in 0..n {
                    assert!((b.nodes()[i] + b.nodes()[p - i]).abs() < 1e-13);
                    assert!(b.weights()[i] > 0.0);
                    let row: f64 = (0..n).map(|j| b.d(i, j)).sum();
                    assert!(row.abs() < 1e-12);
                }
                assert!(b.nodes().windows(2).all(|w| w[1] > w[0]));
            }
        }
    }

    #[test]
    fn quadrature_exactness_degrees() {
        for p in 1..=12 {
            let g = build_basis(p, NodeKind::Gauss).unwrap();
            for k in 0..=2 * p + 1 {
                let q: f64 = g.nodes().iter().zip(g.weights()).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((q - moment(k)).abs() < 1e-12, "gauss p={p} k={k}");
            }
            let l = build_basis(p, NodeKind::GaussLobatto).unwrap();
            for k in 0..=2 * p - 1 {
                let q: f64 = l.nodes().iter().zip(l.weights()).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((q - moment(k)).abs() < 1e-12, "lobatto p={p} k={k}");
            }
        }
    }

    #[test]
    fn differentiation_exact_on_monomials() {
        for kind in [NodeKind::Gauss, NodeKind::GaussLobatto] {
            for p in 1..=12 {
                let b = build_basis(p, kind).unwrap();
                for k in 0..=p {
                    let v: Vec<f64> = b.nodes().iter().map(|x| x.powi(k as i32)).collect();
                    let d = b.apply_diff(&v).unwrap();
                    for (i, x) in b.nodes().iter().enumerate() {
                        let exact = if k == 0 { 0.0 } else { k as f64 * x.powi(k as i32 - 1) };
                        assert!((d[i] - exact).abs() < 1e-11, "{kind} p={p} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn sbp_property_for_lobatto() {
        for p in 1..=10 {
            let b = build_basis(p, NodeKind::GaussLobatto).unwrap();
            let n = p + 1;
            for i in 0..n {
                for j in 0..n {
                    let q = b.weights()[i] * b.d(i, j) + b.weights()[j] * b.d(j, i);
                    let bij = if i == j && i == 0 {
                        -1.0
                    } else if i == j && i == p {
                        1.0
                    } else {
                        0.0
                    };
                    assert!((q - bij).abs() < 1e-12, "p={p} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn interpolation_examples() {
        let b = build_basis(4, NodeKind::Gauss).unwrap();
        let m = b.interpolation_matrix(b.nodes()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert!((m[i * 5 + j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        let t = [-1.0, -0.3, 0.71, 1.0];
        let m = b.interpolation_matrix(&t).unwrap();
        for i in 0..t.len() {
            let s: f64 = m[i * 5..(i + 1) * 5].iter().sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
        let lin = build_basis(1, NodeKind::Gauss).unwrap();
        let row = lin.interpolation_matrix(&[0.0]).unwrap();
        assert!((row[0] - 0.5).abs() < 1e-15 && (row[1] - 0.5).abs() < 1e-15);
        assert!(matches!(b.interpolation_matrix(&[1.5]), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn diff_examples() {
        let b = build_basis(5, NodeKind::GaussLobatto).unwrap();
        let d = b.apply_diff(&[3.0; 6]).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-12));
        let d = b.apply_diff(b.nodes()).unwrap();
        assert!(d.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let lin = build_basis(1, NodeKind::GaussLobatto).unwrap();
        let d = lin.apply_diff(&[0.0, 2.0]).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-15 && (d[1] - 1.0).abs() < 1e-15);
        assert!(matches!(b.apply_diff(&[1.0; 3]), Err(Error::Dimension { expected: 6, got: 3 })));
    }

    #[test]
    fn modal_transform_examples() {
        for kind in [NodeKind::Gauss, NodeKind::GaussLobatto] {
            let b = build_basis(6, kind).unwrap();
            let c = b.to_modal(&[1.0; 7]).unwrap();
            assert!((c[0] - 1.0).abs() < 1e-13 && c[1..].iter().all(|v| v.abs() < 1e-13));
            let c = b.to_modal(b.nodes()).unwrap();
            for (k, v) in c.iter().enumerate() {
                assert!((v - if k == 1 { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
            for k in 0..=6 {
                let samples: Vec<f64> = b.nodes().iter().map(|&x| legendre(k, x).0).collect();
                let c = b.to_modal(&samples).unwrap();
                for (m, v) in c.iter().enumerate() {
                    assert!((v - if m == k { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
            assert!(b.to_modal(&[1.0; 2]).is_err());
        }
    }

    #[test]
    fn interpolation_commutes_with_differentiation() {
        let b = build_basis(6, NodeKind::GaussLobatto).unwrap();
        let targets = [-0.9, -0.2, 0.33, 0.8];
        let m = b.interpolation_matrix(&targets).unwrap();
        let poly = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - x.powi(6);
        let dpoly = |x: f64| -2.0 + 1.5 * x * x - 6.0 * x.powi(5);
        let v: Vec<f64> = b.nodes().iter().map(|&x| poly(x)).collect();
        let dv = b.apply_diff(&v).unwrap();
        for (i, &t) in targets.iter().enumerate() {
            let interp_d: f64 = (0..7).map(|j| m[i * 7 + j] * dv[j]).sum();
            assert!((interp_d - dpoly(t)).abs() < 1e-11);
        }
    }

    #[test]
    fn projections_are_exact_on_low_degree_polynomials() {
        for kind in [NodeKind::Gauss, NodeKind::GaussLobatto] {
            let up = projection(2, 5, kind).unwrap();
            let down = projection(5, 2, kind).unwrap();
            let b2 = basis(2, kind).unwrap();
            let v: Vec<f64> = b2.nodes().iter().map(|x| 0.3 - x + 2.0 * x * x).collect();
            let hi: Vec<f64> = (0..6).map(|i| (0..3).map(|j| up[i * 3 + j] * v[j]).sum()).collect();
            let back: Vec<f64> = (0..3).map(|i| (0..6).map(|j| down[i * 6 + j] * hi[j]).sum()).collect();
            for i in 0..3 {
                assert!((back[i] - v[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cached_bases_are_shared() {
        let a = basis(7, NodeKind::Gauss).unwrap();
        let b = basis(7, NodeKind::Gauss).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn bisection_fallback_agrees_with_newton() {
        let p = 9;
        let newton = build_basis(p, NodeKind::Gauss).unwrap();
        let bis = bisection_roots(|x| legendre(p + 1, x).0, p + 1);
        for i in 0..=p {
            assert!((newton.nodes()[i] - bis[i]).abs() < 1e-13);
        }
    }
}

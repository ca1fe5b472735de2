//! Per-element polynomial order management: feature sensing, τ-estimation on
//! coarser orders, order selection and solution transfer between orders.

mod orders;

pub use orders::OrderMap;

use rayon::prelude::*;

use crate::basis::{basis, projection, NodeKind};
use crate::dg::{flatten, unflatten, Discretization, ElementData, SolutionField};
use crate::error::{Error, Result};
use crate::physics::State;
use crate::shock_capturing::density_sensor;
use crate::tensor;

/// `Σ ω J |∇_ξ ρ|²` per element.
pub fn feature_sensor(disc: &Discretization, field: &SolutionField) -> Result<Vec<f64>> {
    field
        .data()
        .par_iter()
        .enumerate()
        .map(|(e, u)| density_sensor(u, disc.geometry().element(e), disc.kind()))
        .collect()
}

/// Nodal data of one element moved from `from` to `to` orders, axis by axis:
/// interpolation where the order rises, L2 projection where it falls.
pub fn project_element(data: &[State], from: [usize; 3], to: [usize; 3], kind: NodeKind) -> Result<Vec<State>> {
    if from == to {
        return Ok(data.to_vec());
    }
    let mats = (0..3).map(|a| projection(from[a], to[a], kind)).collect::<Result<Vec<_>>>()?;
    let spec = [0, 1, 2].map(|a| if from[a] == to[a] { None } else { Some((mats[a].as_slice(), to[a] + 1)) });
    let (out, _) = tensor::apply(&flatten(data), 5, from.map(|p| p + 1), spec);
    Ok(unflatten(&out))
}

/// Nodal data of one element evaluated at the nodes of `to` orders.
pub fn inject_element(data: &[State], from: [usize; 3], to: [usize; 3], kind: NodeKind) -> Result<Vec<State>> {
    if from == to {
        return Ok(data.to_vec());
    }
    let mats = (0..3).map(|a| basis(from[a], kind)?.interpolation_matrix(basis(to[a], kind)?.nodes())).collect::<Result<Vec<_>>>()?;
    let spec = [0, 1, 2].map(|a| if from[a] == to[a] { None } else { Some((mats[a].as_slice(), to[a] + 1)) });
    let (out, _) = tensor::apply(&flatten(data), 5, from.map(|p| p + 1), spec);
    Ok(unflatten(&out))
}

fn inject_data(data: &ElementData, from: &OrderMap, to: &OrderMap, kind: NodeKind) -> Result<ElementData> {
    data.par_iter().enumerate().map(|(e, d)| inject_element(d, from.get(e), to.get(e), kind)).collect()
}

/// Plain per-element transfer of nodal data to `orders`.
pub fn project_data(data: &ElementData, from: &OrderMap, to: &OrderMap, kind: NodeKind) -> Result<ElementData> {
    if from.len() != to.len() || data.len() != from.len() {
        return Err(Error::Dimension { expected: from.len(), got: to.len().min(data.len()) });
    }
    data.par_iter()
        .enumerate()
        .map(|(e, d)| project_element(d, from.get(e), to.get(e), kind))
        .collect()
}

/// Move a solution from `old`'s orders to `new`'s. Elements whose order drops
/// in any direction receive a constant correction restoring `Σ ω J u`.
pub fn project_solution(field: &SolutionField, old: &Discretization, new: &Discretization) -> Result<SolutionField> {
    let kind = old.kind();
    if new.kind() != kind {
        return Err(Error::Configuration("cannot project between node families".into()));
    }
    let (from, to) = (field.orders(), new.orders());
    let data = field
        .data()
        .par_iter()
        .enumerate()
        .map(|(e, d)| {
            let (pf, pt) = (from.get(e), to.get(e));
            let mut out = project_element(d, pf, pt, kind)?;
            if pf.iter().zip(&pt).any(|(a, b)| b < a) {
                let total = |u: &[State], disc: &Discretization| {
                    let g = disc.geometry().element(e);
                    let mut s = State::ZERO;
                    let mut v = 0.0;
                    for ((x, w), j) in u.iter().zip(disc.weights(e)).zip(&g.jacobian) {
                        s += *x * (w * j);
                        v += w * j;
                    }
                    (s, v)
                };
                let (before, _) = total(d, old);
                let (after, volume) = total(&out, new);
                let shift = (before - after) * (1.0 / volume);
                for x in out.iter_mut() {
                    *x += shift;
                }
            }
            Ok(out)
        })
        .collect::<Result<ElementData>>()?;
    SolutionField::new(to.clone(), data, field.time)
}

/// A coarser order assignment derived from an element's current orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    /// Every axis capped at `k`.
    Isotropic(usize),
    /// One axis lowered by one.
    Decrement(usize),
}

impl Candidate {
    /// Orders this candidate assigns to an element at `current`, or `None`
    /// when it would not lower anything or would leave `[min, ..]`.
    pub fn apply(&self, current: [usize; 3], min: usize) -> Option<[usize; 3]> {
        let p = match *self {
            Candidate::Isotropic(k) => current.map(|c| c.min(k)),
            Candidate::Decrement(a) => {
                let mut p = current;
                p[a] = p[a].checked_sub(1)?;
                p
            }
        };
        (p != current && p.iter().all(|&v| v >= min)).then_some(p)
    }
}

/// Isotropic ladders from `min` up to one below the largest current order,
/// plus the three single-axis decrements.
pub fn candidate_set(current: &OrderMap) -> Vec<Candidate> {
    let top = current.as_slice().iter().flatten().copied().max().unwrap_or(0);
    let mut c: Vec<Candidate> = (current.min_order()..top).map(Candidate::Isotropic).collect();
    c.extend((0..3).map(Candidate::Decrement));
    c
}

/// Per element, the τ magnitude at every applicable candidate order triple.
#[derive(Debug, Clone, PartialEq)]
pub struct TauEstimate {
    pub current: OrderMap,
    pub entries: Vec<Vec<([usize; 3], f64)>>,
}

/// τ-estimation: for each candidate, `τ = R_P(I_P u) − I_P R_N(u)` with `I_P`
/// injection into the candidate nodes, reported as `sqrt(Σ ω J |τ|²)` per
/// element at the candidate order. Subtracting the injected fine residual
/// removes the physical time derivative, so the estimate also applies to
/// unsteady states.
pub fn tau_estimate(disc: &Discretization, field: &SolutionField, candidates: &[Candidate]) -> Result<TauEstimate> {
    let current = disc.orders().clone();
    if field.orders() != &current {
        return Err(Error::Order("field orders differ from the discretization".into()));
    }
    let min = current.min_order();
    let kind = disc.kind();
    let fine_residual = disc.residual(field)?;
    let mut entries = vec![Vec::new(); current.len()];
    for cand in candidates {
        if let Candidate::Isotropic(k) = cand {
            if *k < min {
                return Err(Error::Order(format!("candidate order {k} below the minimum {min}")));
            }
        }
        let applied: Vec<Option<[usize; 3]>> = current.as_slice().iter().map(|p| cand.apply(*p, min)).collect();
        if applied.iter().all(Option::is_none) {
            continue;
        }
        let coarse_orders = OrderMap::from_orders(
            applied.iter().zip(current.as_slice()).map(|(a, p)| a.unwrap_or(*p)).collect(),
            min,
            current.max_order(),
        )?;
        let coarse = disc.with_orders(coarse_orders.clone())?;
        let u = SolutionField::new(coarse_orders.clone(), inject_data(field.data(), &current, &coarse_orders, kind)?, field.time)?;
        let r_coarse = coarse.residual(&u)?;
        let r_fine = inject_data(&fine_residual, &current, &coarse_orders, kind)?;
        let norms: Vec<f64> = (0..current.len())
            .into_par_iter()
            .map(|e| {
                let g = coarse.geometry().element(e);
                r_coarse[e]
                    .iter()
                    .zip(&r_fine[e])
                    .zip(coarse.weights(e))
                    .zip(&g.jacobian)
                    .map(|(((a, b), w), j)| {
                        let d = *a - *b;
                        w * j * d.dot(&d)
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        for (e, a) in applied.iter().enumerate() {
            if let Some(p) = a {
                if !entries[e].iter().any(|(q, _)| q == p) {
                    entries[e].push((*p, norms[e]));
                }
            }
        }
    }
    Ok(TauEstimate { current, entries })
}

/// Smallest candidate (by node count) with `τ <= threshold`; otherwise a
/// least-squares fit of `ln τ` against the isotropic order, extrapolated to
/// the threshold and clamped to the maximum order.
pub fn select_orders(tau: &TauEstimate, threshold: f64) -> Result<OrderMap> {
    if !(threshold > 0.0) {
        return Err(Error::Parameter(format!("truncation error threshold must be positive, got {threshold}")));
    }
    let current = &tau.current;
    let (min, max) = (current.min_order(), current.max_order());
    let mut out = current.clone();
    for (e, list) in tau.entries.iter().enumerate() {
        if list.is_empty() {
            return Err(Error::Configuration(format!("element {e} has no τ candidates")));
        }
        let dofs = |p: &[usize; 3]| p.iter().map(|v| v + 1).product::<usize>();
        let best = list.iter().filter(|(_, t)| *t <= threshold).min_by(|a, b| dofs(&a.0).cmp(&dofs(&b.0)).then(a.0.cmp(&b.0)));
        let chosen = match best {
            Some((p, _)) => *p,
            None => {
                let top = *current.get(e).iter().max().unwrap();
                let ladder: Vec<(f64, f64)> = list
                    .iter()
                    .filter(|(p, t)| p[0] == p[1] && p[1] == p[2] && *t > 0.0)
                    .map(|(p, t)| (p[0] as f64, t.ln()))
                    .collect();
                let p = extrapolate_order(&ladder, threshold).map_or(top + 1, |p| p.max(top));
                [p.clamp(min, max); 3]
            }
        };
        out.set(e, chosen)?;
    }
    Ok(out)
}

/// Smallest integer order at which the least-squares line through
/// `(P, ln τ)` reaches `ln threshold`. `None` without a decaying fit.
pub fn extrapolate_order(points: &[(f64, f64)], threshold: f64) -> Option<usize> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return None;
    }
    let crossing = mx + (threshold.ln() - my) / slope;
    // guard against 4.999999 becoming 5 through rounding noise in the fit
    let rounded = crossing.round();
    let p = if (crossing - rounded).abs() < 1e-9 { rounded } else { crossing.ceil() };
    Some(p.max(0.0) as usize)
}

/// How orders are chosen at each adaptation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdaptMode {
    /// Sensor at or below `low` maps to the minimum order, at or above `high`
    /// to the maximum, log-linear in between.
    Feature { low: f64, high: f64 },
    /// τ-estimation with the given threshold.
    Tau { threshold: f64 },
}

impl AdaptMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AdaptMode::Feature { low, high } if !(low > 0.0 && high > low) => Err(Error::Parameter(format!(
                "feature thresholds must satisfy 0 < low < high, got {low} and {high}"
            ))),
            AdaptMode::Tau { threshold } if !(threshold > 0.0) => {
                Err(Error::Parameter(format!("truncation error threshold must be positive, got {threshold}")))
            }
            _ => Ok(()),
        }
    }
}

/// Order for one sensor value in feature mode.
pub fn feature_order(sensor: f64, low: f64, high: f64, min: usize, max: usize) -> usize {
    if sensor <= low {
        return min;
    }
    if sensor >= high {
        return max;
    }
    let x = (sensor.ln() - low.ln()) / (high.ln() - low.ln());
    (min as f64 + x * (max - min) as f64).round() as usize
}

/// Orders chosen by `mode` for the current field.
pub fn choose_orders(disc: &Discretization, field: &SolutionField, mode: AdaptMode) -> Result<OrderMap> {
    mode.validate()?;
    let current = disc.orders();
    match mode {
        AdaptMode::Feature { low, high } => {
            let s = feature_sensor(disc, field)?;
            let (min, max) = (current.min_order(), current.max_order());
            OrderMap::from_orders(s.iter().map(|v| [feature_order(*v, low, high, min, max); 3]).collect(), min, max)
        }
        AdaptMode::Tau { threshold } => {
            let tau = tau_estimate(disc, field, &candidate_set(current))?;
            select_orders(&tau, threshold)
        }
    }
}

/// Select new orders, rebuild the discretization and transfer the solution.
pub fn adapt(disc: &Discretization, field: &SolutionField, mode: AdaptMode) -> Result<(Discretization, SolutionField)> {
    let orders = choose_orders(disc, field, mode)?;
    if &orders == disc.orders() {
        return Ok((disc.clone(), field.clone()));
    }
    let next = disc.with_orders(orders)?;
    let moved = project_solution(field, disc, &next)?;
    Ok((next, moved))
}

//! Face coupling between unequal tangential orders.
//!
//! Traces are interpolated up to the mortar (pointwise maximum order) and
//! fluxes are returned by exact L2 projection, which is the adjoint of the
//! interpolation with respect to the face quadrature and keeps the scheme
//! conservative.

use std::sync::Arc;

use crate::basis::{basis, projection, NodeKind};
use crate::error::Result;
use crate::tensor;

type Proj = Option<Arc<Vec<f64>>>;

#[derive(Debug, Clone)]
pub struct Mortar {
    pub left_orders: [usize; 2],
    pub right_orders: [usize; 2],
    pub mortar_orders: [usize; 2],
    left_up: [Proj; 2],
    right_up: [Proj; 2],
    left_down: [Proj; 2],
    right_down: [Proj; 2],
}

/// Orders are tangential `(P_a, P_b)`, both given in the left face frame.
pub fn build_mortar(left: [usize; 2], right: [usize; 2], kind: NodeKind) -> Result<Mortar> {
    let m = [left[0].max(right[0]), left[1].max(right[1])];
    let proj = |from: usize, to: usize| -> Result<Proj> {
        if from == to {
            Ok(None)
        } else {
            projection(from, to, kind).map(Some)
        }
    };
    Ok(Mortar {
        left_orders: left,
        right_orders: right,
        mortar_orders: m,
        left_up: [proj(left[0], m[0])?, proj(left[1], m[1])?],
        right_up: [proj(right[0], m[0])?, proj(right[1], m[1])?],
        left_down: [proj(m[0], left[0])?, proj(m[1], left[1])?],
        right_down: [proj(m[0], right[0])?, proj(m[1], right[1])?],
    })
}

fn apply(mats: &[Proj; 2], from: [usize; 2], to: [usize; 2], data: &[f64], ncomp: usize) -> Vec<f64> {
    if mats[0].is_none() && mats[1].is_none() {
        return data.to_vec();
    }
    let m = [
        mats[0].as_ref().map(|p| (p.as_slice(), to[0] + 1)),
        mats[1].as_ref().map(|p| (p.as_slice(), to[1] + 1)),
        None,
    ];
    tensor::apply(data, ncomp, [from[0] + 1, from[1] + 1, 1], m).0
}

impl Mortar {
    pub fn is_conforming(&self) -> bool {
        self.left_orders == self.right_orders
    }

    pub fn mortar_len(&self) -> usize {
        (self.mortar_orders[0] + 1) * (self.mortar_orders[1] + 1)
    }

    pub fn left_to_mortar(&self, data: &[f64], ncomp: usize) -> Vec<f64> {
        apply(&self.left_up, self.left_orders, self.mortar_orders, data, ncomp)
    }

    pub fn right_to_mortar(&self, data: &[f64], ncomp: usize) -> Vec<f64> {
        apply(&self.right_up, self.right_orders, self.mortar_orders, data, ncomp)
    }

    pub fn mortar_to_left(&self, data: &[f64], ncomp: usize) -> Vec<f64> {
        apply(&self.left_down, self.mortar_orders, self.left_orders, data, ncomp)
    }

    pub fn mortar_to_right(&self, data: &[f64], ncomp: usize) -> Vec<f64> {
        apply(&self.right_down, self.mortar_orders, self.right_orders, data, ncomp)
    }

    /// Tensor quadrature weights on the mortar nodes.
    pub fn weights(&self, kind: NodeKind) -> Result<Vec<f64>> {
        let a = basis(self.mortar_orders[0], kind)?;
        let b = basis(self.mortar_orders[1], kind)?;
        Ok(b.weights().iter().flat_map(|wb| a.weights().iter().map(move |wa| wa * wb)).collect())
    }
}

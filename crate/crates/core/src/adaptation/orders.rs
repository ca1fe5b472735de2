use crate::basis::MAX_ORDER;
use crate::error::{Error, Result};

/// Per-element anisotropic polynomial orders `(Px, Py, Pz)` with global bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderMap {
    orders: Vec<[usize; 3]>,
    min: usize,
    max: usize,
}

impl OrderMap {
    pub fn uniform(elements: usize, order: [usize; 3], min: usize, max: usize) -> Result<Self> {
        Self::from_orders(vec![order; elements], min, max)
    }

    pub fn from_orders(orders: Vec<[usize; 3]>, min: usize, max: usize) -> Result<Self> {
        if min == 0 || min > max || max > MAX_ORDER {
            return Err(Error::Order(format!(
                "order bounds [{min}, {max}] must satisfy 1 <= min <= max <= {MAX_ORDER}"
            )));
        }
        let map = OrderMap { orders, min, max };
        for (e, p) in map.orders.iter().enumerate() {
            map.check(e, *p)?;
        }
        Ok(map)
    }

    fn check(&self, element: usize, p: [usize; 3]) -> Result<()> {
        if p.iter().any(|&v| v < self.min || v > self.max) {
            return Err(Error::Order(format!(
                "element {element}: orders {p:?} outside [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn get(&self, element: usize) -> [usize; 3] {
        self.orders[element]
    }

    /// Node counts `P + 1` per axis.
    pub fn nodes(&self, element: usize) -> [usize; 3] {
        self.orders[element].map(|p| p + 1)
    }

    pub fn set(&mut self, element: usize, p: [usize; 3]) -> Result<()> {
        self.check(element, p)?;
        self.orders[element] = p;
        Ok(())
    }

    pub fn min_order(&self) -> usize {
        self.min
    }

    pub fn max_order(&self) -> usize {
        self.max
    }

    pub fn as_slice(&self) -> &[[usize; 3]] {
        &self.orders
    }

    pub fn total_dofs(&self) -> usize {
        (0..self.len()).map(|e| self.nodes(e).iter().product::<usize>()).sum()
    }

    pub fn is_uniform(&self) -> bool {
        self.orders.windows(2).all(|w| w[0] == w[1])
    }
}

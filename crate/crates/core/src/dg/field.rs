use crate::adaptation::OrderMap;
use crate::error::{Error, Result};
use crate::mesh::Geometry;
use crate::physics::{primitive_from_conservative, GasProperties, State};

/// Per-element node-major data, one `Vec` per element.
pub type ElementData = Vec<Vec<State>>;

/// Conservative solution at the tensor quadrature nodes of every element.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    orders: OrderMap,
    data: ElementData,
    pub time: f64,
}

impl SolutionField {
    pub fn new(orders: OrderMap, data: ElementData, time: f64) -> Result<Self> {
        if data.len() != orders.len() {
            return Err(Error::Dimension { expected: orders.len(), got: data.len() });
        }
        for (e, d) in data.iter().enumerate() {
            let n: usize = orders.nodes(e).iter().product();
            if d.len() != n {
                return Err(Error::Dimension { expected: n, got: d.len() });
            }
        }
        Ok(SolutionField { orders, data, time })
    }

    pub fn uniform(orders: OrderMap, state: State) -> Self {
        let data = (0..orders.len())
            .map(|e| vec![state; orders.nodes(e).iter().product()])
            .collect();
        SolutionField { orders, data, time: 0.0 }
    }

    /// Sample a pointwise function of physical coordinates at every node.
    pub fn from_fn(orders: OrderMap, geometry: &Geometry, f: impl Fn([f64; 3]) -> State) -> Result<Self> {
        let data = (0..orders.len())
            .map(|e| geometry.element(e).x.iter().map(|x| f(*x)).collect())
            .collect();
        SolutionField::new(orders, data, 0.0)
    }

    /// A zero field with the same layout.
    pub fn zeros_like(&self) -> ElementData {
        self.data.iter().map(|d| vec![State::ZERO; d.len()]).collect()
    }

    pub fn orders(&self) -> &OrderMap {
        &self.orders
    }

    pub fn data(&self) -> &ElementData {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut ElementData {
        &mut self.data
    }

    pub fn element(&self, e: usize) -> &[State] {
        &self.data[e]
    }

    pub fn element_mut(&mut self, e: usize) -> &mut [State] {
        &mut self.data[e]
    }

    pub fn into_parts(self) -> (OrderMap, ElementData, f64) {
        (self.orders, self.data, self.time)
    }

    pub fn check_admissible(&self, gas: &GasProperties) -> Result<()> {
        for (e, d) in self.data.iter().enumerate() {
            for (n, u) in d.iter().enumerate() {
                primitive_from_conservative(u, gas).map_err(|err| err.at(e, n))?;
            }
        }
        Ok(())
    }
}

pub(crate) fn flatten(states: &[State]) -> Vec<f64> {
    states.iter().flat_map(|s| s.0).collect()
}

pub(crate) fn unflatten(flat: &[f64]) -> Vec<State> {
    flat.chunks_exact(5).map(|c| State([c[0], c[1], c[2], c[3], c[4]])).collect()
}

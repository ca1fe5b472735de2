//! Structured hexahedral box meshes, face connectivity, and mapping metrics.
//!
//! Local faces are numbered `2 * axis + side`: 0 = ξ₁−, 1 = ξ₁+, 2 = ξ₂−,
//! 3 = ξ₂+, 4 = ξ₃−, 5 = ξ₃+. Face nodes are indexed `a + n_a * b` over the two
//! tangential axes taken in ascending order.

mod metrics;

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub use metrics::{compute_metrics, quadrature_weights, ElementGeometry, FaceGeometry, Geometry};

pub const FACE_NAMES: [&str; 6] = ["xmin", "xmax", "ymin", "ymax", "zmin", "zmax"];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Curvature {
    #[default]
    Identity,
    /// `x_d = X_d + A L_d Π_e sin(k π (X_e - lo_e) / L_e)`; vanishes on the box boundary.
    Sinusoidal { amplitude: f64, wavenumber: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    pub counts: [usize; 3],
    pub bounds: [[f64; 2]; 3],
    pub periodic: [bool; 3],
    pub curvature: Curvature,
    /// Boundary-condition names for the six box faces, in local face order.
    pub boundary_tags: [String; 6],
}

impl MeshSpec {
    pub fn new(counts: [usize; 3], bounds: [[f64; 2]; 3]) -> Self {
        MeshSpec {
            counts,
            bounds,
            periodic: [false; 3],
            curvature: Curvature::Identity,
            boundary_tags: FACE_NAMES.map(String::from),
        }
    }

    pub fn periodic(mut self, periodic: [bool; 3]) -> Self {
        self.periodic = periodic;
        self
    }

    pub fn curved(mut self, curvature: Curvature) -> Self {
        self.curvature = curvature;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.counts.iter().any(|&c| c == 0) {
            return Err(Error::Geometry(format!("element counts {:?} must be positive", self.counts)));
        }
        for (d, [lo, hi]) in self.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::Geometry(format!("degenerate bounds [{lo}, {hi}] on axis {d}")));
            }
        }
        if let Curvature::Sinusoidal { amplitude, wavenumber } = self.curvature {
            if !amplitude.is_finite() || wavenumber == 0 {
                return Err(Error::Geometry(format!(
                    "invalid curvature amplitude {amplitude} / wavenumber {wavenumber}"
                )));
            }
        }
        Ok(())
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.bounds[axis][1] - self.bounds[axis][0]
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|d| self.extent(d)).product()
    }

    /// Physical coordinates of a point of the undeformed box.
    pub fn map(&self, x: [f64; 3]) -> [f64; 3] {
        match self.curvature {
            Curvature::Identity => x,
            Curvature::Sinusoidal { amplitude, wavenumber } => {
                let k = wavenumber as f64;
                let bump: f64 = (0..3)
                    .map(|e| (k * PI * (x[e] - self.bounds[e][0]) / self.extent(e)).sin())
                    .product();
                [0, 1, 2].map(|d| x[d] + amplitude * self.extent(d) * bump)
            }
        }
    }
}

/// One of the eight rotations/reflections relating the tangential index
/// frames of the two sides of a face. Bit 0 swaps the axes, bits 1 and 2
/// reverse the first and second left-frame axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Orientation(u8);

impl Orientation {
    pub const IDENTITY: Orientation = Orientation(0);

    pub fn new(code: u8) -> Result<Self> {
        if code < 8 {
            Ok(Orientation(code))
        } else {
            Err(Error::Geometry(format!("orientation code {code} out of range 0..8")))
        }
    }

    pub fn code(&self) -> u8 {
        self.0
    }

    pub fn swaps(&self) -> bool {
        self.0 & 1 != 0
    }

    fn flips(&self) -> (bool, bool) {
        (self.0 & 2 != 0, self.0 & 4 != 0)
    }

    /// Right-side face dimensions for left-frame dimensions `(na, nb)`.
    pub fn right_dims(&self, na: usize, nb: usize) -> (usize, usize) {
        if self.swaps() {
            (nb, na)
        } else {
            (na, nb)
        }
    }

    /// Left-frame node `(a, b)` of a grid with left-frame dims `(na, nb)` to the
    /// corresponding right-frame node.
    pub fn map(&self, a: usize, b: usize, na: usize, nb: usize) -> (usize, usize) {
        let (fa, fb) = self.flips();
        let a1 = if fa { na - 1 - a } else { a };
        let b1 = if fb { nb - 1 - b } else { b };
        if self.swaps() {
            (b1, a1)
        } else {
            (a1, b1)
        }
    }

    /// Orientation taking the right frame back to the left frame.
    pub fn inverse(&self) -> Orientation {
        let (fa, fb) = self.flips();
        let (ia, ib) = if self.swaps() { (fb, fa) } else { (fa, fb) };
        Orientation((self.0 & 1) | (u8::from(ia) << 1) | (u8::from(ib) << 2))
    }

    /// Same map on reference coordinates in `[-1, 1]²`.
    pub fn map_coords(&self, s: f64, t: f64) -> (f64, f64) {
        let (fa, fb) = self.flips();
        let s1 = if fa { -s } else { s };
        let t1 = if fb { -t } else { t };
        if self.swaps() {
            (t1, s1)
        } else {
            (s1, t1)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorFace {
    pub left: usize,
    pub left_face: usize,
    pub right: usize,
    pub right_face: usize,
    pub orientation: Orientation,
    /// Offset from left to right physical coordinates (non-zero across periodic seams).
    pub translation: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFace {
    pub element: usize,
    pub face: usize,
    pub tag: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceLink {
    Interior { face: usize, is_left: bool },
    Boundary(usize),
}

#[derive(Debug, Clone)]
pub struct Mesh {
    spec: MeshSpec,
    grid: [Vec<f64>; 3],
    cells: Vec<[usize; 3]>,
    interior: Vec<InteriorFace>,
    boundary: Vec<BoundaryFace>,
    links: Vec<[FaceLink; 6]>,
}

pub fn build_box_mesh(spec: &MeshSpec) -> Result<Mesh> {
    spec.validate()?;
    let grid = [0, 1, 2].map(|d| {
        let [lo, hi] = spec.bounds[d];
        let n = spec.counts[d];
        (0..=n)
            .map(|i| match i {
                0 => lo,
                _ if i == n => hi,
                _ => lo + (hi - lo) * i as f64 / n as f64,
            })
            .collect::<Vec<_>>()
    });
    let [nx, ny, nz] = spec.counts;
    let id = |c: [usize; 3]| c[0] + nx * (c[1] + ny * c[2]);
    let mut cells = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                cells.push([i, j, k]);
            }
        }
    }
    let placeholder = FaceLink::Boundary(usize::MAX);
    let mut links = vec![[placeholder; 6]; cells.len()];
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for (e, c) in cells.iter().enumerate() {
        for d in 0..3 {
            let n = spec.counts[d];
            // + side face: interior or periodic pairing, or boundary
            if c[d] + 1 < n || spec.periodic[d] {
                let mut nb = *c;
                nb[d] = (c[d] + 1) % n;
                let right = id(nb);
                let mut translation = [0.0; 3];
                if c[d] + 1 == n {
                    translation[d] = -spec.extent(d);
                }
                let f = interior.len();
                interior.push(InteriorFace {
                    left: e,
                    left_face: 2 * d + 1,
                    right,
                    right_face: 2 * d,
                    orientation: Orientation::IDENTITY,
                    translation,
                });
                links[e][2 * d + 1] = FaceLink::Interior { face: f, is_left: true };
                links[right][2 * d] = FaceLink::Interior { face: f, is_left: false };
            } else {
                links[e][2 * d + 1] = FaceLink::Boundary(boundary.len());
                boundary.push(BoundaryFace { element: e, face: 2 * d + 1, tag: spec.boundary_tags[2 * d + 1].clone() });
            }
            if c[d] == 0 && !spec.periodic[d] {
                links[e][2 * d] = FaceLink::Boundary(boundary.len());
                boundary.push(BoundaryFace { element: e, face: 2 * d, tag: spec.boundary_tags[2 * d].clone() });
            }
        }
    }
    Ok(Mesh { spec: spec.clone(), grid, cells, interior, boundary, links })
}

impl Mesh {
    pub fn spec(&self) -> &MeshSpec {
        &self.spec
    }

    pub fn element_count(&self) -> usize {
        self.cells.len()
    }

    /// Structured `(i, j, k)` position of an element.
    pub fn cell(&self, element: usize) -> [usize; 3] {
        self.cells[element]
    }

    pub fn element_at(&self, cell: [usize; 3]) -> usize {
        let [nx, ny, _] = self.spec.counts;
        cell[0] + nx * (cell[1] + ny * cell[2])
    }

    pub fn interior_faces(&self) -> &[InteriorFace] {
        &self.interior
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary
    }

    pub fn face_link(&self, element: usize, face: usize) -> FaceLink {
        self.links[element][face]
    }

    /// Undeformed box coordinate of reference point `xi` in `element`. Face
    /// points shared by two elements evaluate to identical bits.
    pub fn box_point(&self, element: usize, xi: [f64; 3]) -> [f64; 3] {
        let c = self.cells[element];
        [0, 1, 2].map(|d| {
            let a = self.grid[d][c[d]];
            let b = self.grid[d][c[d] + 1];
            if xi[d] == -1.0 {
                a
            } else if xi[d] == 1.0 {
                b
            } else {
                0.5 * (1.0 - xi[d]) * a + 0.5 * (1.0 + xi[d]) * b
            }
        })
    }

    pub fn physical_point(&self, element: usize, xi: [f64; 3]) -> [f64; 3] {
        self.spec.map(self.box_point(element, xi))
    }
}

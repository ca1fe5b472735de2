//! Snapshots resampled to equispaced points, and binary restart files.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::adaptation::OrderMap;
use crate::basis::basis;
use crate::dg::{Discretization, SolutionField};
use crate::error::{Error, Result};
use crate::physics::{primitive_from_conservative, State};
use crate::tensor;

use super::config::SnapshotFormat;

/// Per element: equispaced points and their column values.
struct Resampled {
    points: Vec<[f64; 3]>,
    values: Vec<Vec<f64>>,
    per_edge: usize,
}

pub fn snapshot_columns(gradients: bool) -> Vec<&'static str> {
    let mut c = vec!["x", "y", "z", "rho", "u", "v", "w", "p", "T"];
    if gradients {
        c.extend(["vorticity_x", "vorticity_y", "vorticity_z", "q_criterion"]);
    }
    c
}

fn resample(disc: &Discretization, field: &SolutionField, order: usize, gradients: bool) -> Result<Vec<Resampled>> {
    let gas = *disc.gas();
    let grads = if gradients { Some(disc.gradients(field)?) } else { None };
    let targets: Vec<f64> = (0..=order).map(|i| -1.0 + 2.0 * i as f64 / order as f64).collect();
    (0..field.data().len())
        .map(|e| {
            let geo = disc.geometry().element(e);
            let n = geo.nodes();
            let mats = (0..3)
                .map(|a| basis(geo.orders[a], disc.kind())?.interpolation_matrix(&targets))
                .collect::<Result<Vec<_>>>()?;
            let spec = [0, 1, 2].map(|a| Some((mats[a].as_slice(), order + 1)));
            let xs: Vec<f64> = geo.x.iter().flatten().copied().collect();
            let (xs, _) = tensor::apply(&xs, 3, n, spec);
            let us: Vec<f64> = field.element(e).iter().flat_map(|s| s.0).collect();
            let (us, _) = tensor::apply(&us, 5, n, spec);
            let extra = grads.as_ref().map(|g| {
                let flat: Vec<f64> = g[e]
                    .iter()
                    .flat_map(|gs| {
                        let w = gs.vorticity();
                        [w[0], w[1], w[2], gs.q_criterion()]
                    })
                    .collect();
                tensor::apply(&flat, 4, n, spec).0
            });
            let count = (order + 1).pow(3);
            let mut points = Vec::with_capacity(count);
            let mut values = Vec::with_capacity(count);
            for p in 0..count {
                points.push([xs[3 * p], xs[3 * p + 1], xs[3 * p + 2]]);
                let s = State([us[5 * p], us[5 * p + 1], us[5 * p + 2], us[5 * p + 3], us[5 * p + 4]]);
                let q = primitive_from_conservative(&s, &gas).map_err(|err| err.at(e, p))?;
                let mut row = vec![q.rho, q.v[0], q.v[1], q.v[2], q.p, q.t];
                if let Some(x) = &extra {
                    row.extend_from_slice(&x[4 * p..4 * p + 4]);
                }
                values.push(row);
            }
            Ok(Resampled { points, values, per_edge: order + 1 })
        })
        .collect()
}

/// Write the field resampled to `order + 1` equispaced points per element edge.
pub fn write_snapshot(
    disc: &Discretization,
    field: &SolutionField,
    path: &Path,
    format: SnapshotFormat,
    order: usize,
    gradients: bool,
) -> Result<()> {
    if order == 0 {
        return Err(Error::Parameter("visualization order must be at least 1".into()));
    }
    let data = resample(disc, field, order, gradients)?;
    let columns = snapshot_columns(gradients);
    let text = match format {
        SnapshotFormat::Table => table(&data, &columns, field.time),
        SnapshotFormat::Vtk => vtk(&data, &columns, field.time),
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn table(data: &[Resampled], columns: &[&str], time: f64) -> String {
    let mut s = format!("# time {time:.16e}\n# {}\n", columns.join(" "));
    for el in data {
        for (x, v) in el.points.iter().zip(&el.values) {
            let mut first = true;
            for c in x.iter().chain(v) {
                if !first {
                    s.push(' ');
                }
                first = false;
                let _ = write!(s, "{c:.16e}");
            }
            s.push('\n');
        }
    }
    s
}

/// Legacy ASCII VTK unstructured grid of hexahedral sub-cells, so curved
/// elements keep their shape.
fn vtk(data: &[Resampled], columns: &[&str], time: f64) -> String {
    let npts: usize = data.iter().map(|d| d.points.len()).sum();
    let ncells: usize = data.iter().map(|d| (d.per_edge - 1).pow(3)).sum();
    let mut s = format!("# vtk DataFile Version 3.0\nsnapshot time {time:.16e}\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS {npts} double\n");
    for d in data {
        for p in &d.points {
            let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2]);
        }
    }
    let _ = writeln!(s, "CELLS {ncells} {}", ncells * 9);
    let mut offset = 0;
    for d in data {
        let m = d.per_edge;
        let id = |i: usize, j: usize, k: usize| offset + i + m * (j + m * k);
        for k in 0..m - 1 {
            for j in 0..m - 1 {
                for i in 0..m - 1 {
                    let _ = writeln!(
                        s,
                        "8 {} {} {} {} {} {} {} {}",
                        id(i, j, k),
                        id(i + 1, j, k),
                        id(i + 1, j + 1, k),
                        id(i, j + 1, k),
                        id(i, j, k + 1),
                        id(i + 1, j, k + 1),
                        id(i + 1, j + 1, k + 1),
                        id(i, j + 1, k + 1)
                    );
                }
            }
        }
        offset += d.points.len();
    }
    let _ = writeln!(s, "CELL_TYPES {ncells}");
    for _ in 0..ncells {
        s.push_str("12\n");
    }
    let _ = writeln!(s, "POINT_DATA {npts}");
    for (c, name) in columns.iter().enumerate().skip(3) {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for d in data {
            for v in &d.values {
                let _ = writeln!(s, "{:.16e}", v[c - 3]);
            }
        }
    }
    s
}

const MAGIC: &[u8; 4] = b"DGSM";
const VERSION: u32 = 1;

/// Little-endian binary: magic, version, step, time, element count, order
/// bounds, per-element orders, then every conservative value as f64.
pub fn write_restart(path: &Path, field: &SolutionField, step: usize) -> Result<()> {
    let orders = field.orders();
    let mut buf = Vec::with_capacity(64 + orders.total_dofs() * 40);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(step as u64).to_le_bytes());
    buf.extend_from_slice(&field.time.to_le_bytes());
    buf.extend_from_slice(&(orders.len() as u64).to_le_bytes());
    buf.extend_from_slice(&(orders.min_order() as u64).to_le_bytes());
    buf.extend_from_slice(&(orders.max_order() as u64).to_le_bytes());
    for p in orders.as_slice() {
        for v in p {
            buf.extend_from_slice(&(*v as u64).to_le_bytes());
        }
    }
    for s in field.data().iter().flatten() {
        for v in s.0 {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&buf).map_err(|e| Error::io(path, e))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self.bytes.get(self.pos..end).ok_or_else(|| Error::Io {
            path: self.path.display().to_string(),
            message: "restart file is truncated".into(),
        })?;
        self.pos = end;
        Ok(slice.try_into().unwrap())
    }

    fn u64(&mut self) -> Result<usize> {
        Ok(u64::from_le_bytes(self.take()?) as usize)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

/// Returns the step counter and the field.
pub fn read_restart(path: &Path) -> Result<(usize, SolutionField)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(|e| Error::io(path, e))?;
    let bad = |m: &str| Error::Io { path: path.display().to_string(), message: m.to_string() };
    let mut c = Cursor { bytes: &bytes, pos: 0, path };
    if &c.take::<4>()? != MAGIC {
        return Err(bad("not a restart file (bad magic)"));
    }
    let version = u32::from_le_bytes(c.take()?);
    if version != VERSION {
        return Err(bad(&format!("unsupported restart version {version}")));
    }
    let step = c.u64()?;
    let time = c.f64()?;
    let elements = c.u64()?;
    let (min, max) = (c.u64()?, c.u64()?);
    let mut orders = Vec::with_capacity(elements.min(1 << 24));
    for _ in 0..elements {
        orders.push([c.u64()?, c.u64()?, c.u64()?]);
    }
    let orders = OrderMap::from_orders(orders, min, max)?;
    let mut data = Vec::with_capacity(elements);
    for e in 0..elements {
        let n: usize = orders.nodes(e).iter().product();
        let mut el = Vec::with_capacity(n);
        for _ in 0..n {
            el.push(State([c.f64()?, c.f64()?, c.f64()?, c.f64()?, c.f64()?]));
        }
        data.push(el);
    }
    if c.pos != bytes.len() {
        return Err(bad("trailing bytes after restart data"));
    }
    Ok((step, SolutionField::new(orders, data, time)?))
}

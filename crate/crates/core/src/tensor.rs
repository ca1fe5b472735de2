//! Tensor-product operators on node-major element data.
//!
//! Element data is stored as `data[node * ncomp + c]` with
//! `node = i + n0 * (j + n1 * k)`.

/// Linear index of `(i, j, k)` in a block of shape `n`.
#[inline]
pub fn idx(n: [usize; 3], i: usize, j: usize, k: usize) -> usize {
    i + n[0] * (j + n[1] * k)
}

#[inline]
pub fn count(n: [usize; 3]) -> usize {
    n[0] * n[1] * n[2]
}

/// Unpack a linear index into `(i, j, k)`.
#[inline]
pub fn unpack(n: [usize; 3], node: usize) -> [usize; 3] {
    [node % n[0], (node / n[0]) % n[1], node / (n[0] * n[1])]
}

/// Apply a dense `rows x cols` matrix along `axis` (row-major, `cols == n[axis]`).
pub fn apply_axis(data: &[f64], ncomp: usize, n: [usize; 3], axis: usize, mat: &[f64], rows: usize) -> Vec<f64> {
    let cols = n[axis];
    debug_assert_eq!(mat.len(), rows * cols);
    debug_assert_eq!(data.len(), count(n) * ncomp);
    let mut out_n = n;
    out_n[axis] = rows;
    let mut out = vec![0.0; count(out_n) * ncomp];
    for k in 0..out_n[2] {
        for j in 0..out_n[1] {
            for i in 0..out_n[0] {
                let o = idx(out_n, i, j, k) * ncomp;
                let mut src = [i, j, k];
                let r = src[axis];
                for m in 0..cols {
                    let w = mat[r * cols + m];
                    if w == 0.0 {
                        continue;
                    }
                    src[axis] = m;
                    let s = idx(n, src[0], src[1], src[2]) * ncomp;
                    for c in 0..ncomp {
                        out[o + c] += w * data[s + c];
                    }
                }
            }
        }
    }
    out
}

/// Apply optional per-axis matrices `(matrix, rows)` in axis order; returns the
/// transformed data and its new shape.
pub fn apply(
    data: &[f64],
    ncomp: usize,
    n: [usize; 3],
    mats: [Option<(&[f64], usize)>; 3],
) -> (Vec<f64>, [usize; 3]) {
    let mut cur = data.to_vec();
    let mut shape = n;
    for (axis, m) in mats.iter().enumerate() {
        if let Some((mat, rows)) = m {
            cur = apply_axis(&cur, ncomp, shape, axis, mat, *rows);
            shape[axis] = *rows;
        }
    }
    (cur, shape)
}

/// Reference derivative along `axis` using a square differentiation matrix.
pub fn derivative(data: &[f64], ncomp: usize, n: [usize; 3], axis: usize, d: &[f64]) -> Vec<f64> {
    apply_axis(data, ncomp, n, axis, d, n[axis])
}

/// Tangential axes of the face normal to `axis`, ascending.
#[inline]
pub fn tangential(axis: usize) -> [usize; 2] {
    match axis {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

/// Face shape `(n_t1, n_t2)` of a volume block of shape `n`.
#[inline]
pub fn face_shape(n: [usize; 3], axis: usize) -> [usize; 2] {
    let t = tangential(axis);
    [n[t[0]], n[t[1]]]
}

/// Evaluate volume data on the face normal to `axis` using the
/// endpoint interpolation weights `end` (length `n[axis]`).
pub fn face_trace(data: &[f64], ncomp: usize, n: [usize; 3], axis: usize, end: &[f64]) -> Vec<f64> {
    let t = tangential(axis);
    let fs = [n[t[0]], n[t[1]]];
    let mut out = vec![0.0; fs[0] * fs[1] * ncomp];
    for b in 0..fs[1] {
        for a in 0..fs[0] {
            let o = (a + fs[0] * b) * ncomp;
            let mut p = [0usize; 3];
            p[t[0]] = a;
            p[t[1]] = b;
            for (m, &w) in end.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                p[axis] = m;
                let s = idx(n, p[0], p[1], p[2]) * ncomp;
                if w == 1.0 {
                    for c in 0..ncomp {
                        out[o + c] += data[s + c];
                    }
                } else {
                    for c in 0..ncomp {
                        out[o + c] += w * data[s + c];
                    }
                }
            }
        }
    }
    out
}

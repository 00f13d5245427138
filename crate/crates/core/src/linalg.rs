//! Small dense linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A point or direction in ℝⁿ.
pub type Vector = DVector<f64>;

pub fn vector(coords: &[f64]) -> Vector {
    DVector::from_column_slice(coords)
}

/// Unsigned k-dimensional volume `sqrt(det(GᵀG))` of the parallelotope
/// spanned by the given vectors.
pub fn gram_volume(vectors: &[Vector]) -> Result<f64> {
    let first = vectors.first().ok_or(Error::EmptyInput("gram_volume"))?;
    let n = first.len();
    check_dims(vectors, n)?;
    if vectors.len() > n {
        return Ok(0.0);
    }
    let g = DMatrix::from_fn(vectors.len(), vectors.len(), |i, j| {
        vectors[i].dot(&vectors[j])
    });
    Ok(g.determinant().max(0.0).sqrt())
}

/// Determinant of the square matrix whose columns are `vectors`.
pub fn signed_det(vectors: &[Vector]) -> Result<f64> {
    let n = vectors
        .first()
        .map(|v| v.len())
        .ok_or(Error::EmptyInput("signed_det"))?;
    if vectors.len() != n {
        return Err(Error::WrongCount {
            expected: n,
            found: vectors.len(),
        });
    }
    check_dims(vectors, n)?;
    Ok(DMatrix::from_columns(vectors).determinant())
}

fn check_dims(vectors: &[Vector], n: usize) -> Result<()> {
    match vectors.iter().find(|v| v.len() != n) {
        Some(v) => Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        }),
        None => Ok(()),
    }
}

pub fn det2(a: &Vector, b: &Vector) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Orthonormal basis of the kernel of `m`. Singular values at or below
/// `rel_cutoff * σ_max` count as zero; an all-zero matrix has full kernel.
pub fn nullspace(m: &DMatrix<f64>, rel_cutoff: f64) -> Vec<Vector> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    // Pad to at least `cols` rows so the SVD returns a full right basis.
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = rel_cutoff * smax;
    let mut out: Vec<Vector> = (0..cols)
        .filter(|&k| smax == 0.0 || svd.singular_values[k] <= cutoff)
        .map(|k| v_t.row(k).transpose())
        .collect();
    for v in &mut out {
        canonical_sign(v);
    }
    out
}

/// Flip `v` so that its largest-magnitude entry is positive.
pub fn canonical_sign(v: &mut Vector) {
    let mut best = 0.0f64;
    for x in v.iter() {
        if x.abs() > best.abs() + 1e-12 {
            best = *x;
        }
    }
    if best < 0.0 {
        v.neg_mut();
    }
}

/// Gram–Schmidt over `vectors` in order, dropping vectors whose residual norm
/// is at most `eps`. The result spans the same space and keeps the
/// orientation of the first independent vectors.
pub fn orthonormalize(vectors: &[Vector], eps: f64) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = w.dot(b);
                w.axpy(-c, b, 1.0);
            }
        }
        let norm = w.norm();
        if norm > eps {
            basis.push(w / norm);
        }
    }
    basis
}

/// Remove the components of `v` lying in the span of the orthonormal `basis`.
pub fn reject_from(v: &Vector, basis: &[Vector]) -> Vector {
    let mut w = v.clone();
    for b in basis {
        let c = w.dot(b);
        w.axpy(-c, b, 1.0);
    }
    w
}

/// Least-squares solution of `a x = b` together with the residual norm.
pub fn least_squares(a: &DMatrix<f64>, b: &Vector) -> (Vector, f64) {
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(b, 1e-13)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()));
    let r = (a * &x - b).norm();
    (x, r)
}

/// Euclidean distance between the segments `ab` and `cd`.
pub fn segment_distance(a: &Vector, b: &Vector, c: &Vector, d: &Vector) -> f64 {
    let (u, v, w) = (b - a, d - c, a - c);
    let (aa, bb, cc) = (u.dot(&u), u.dot(&v), v.dot(&v));
    let (dd, ee) = (u.dot(&w), v.dot(&w));
    let denom = aa * cc - bb * bb;
    let mut s = if denom > 1e-14 * aa * cc {
        ((bb * ee - cc * dd) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (bb * s + ee) / cc;
    if t < 0.0 {
        t = 0.0;
        s = (-dd / aa).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((bb - dd) / aa).clamp(0.0, 1.0);
    }
    ((a + u * s) - (c + v * t)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gram_volume_examples() {
        assert_abs_diff_eq!(gram_volume(&[vector(&[1.0, 0.0, 0.0])]).unwrap(), 1.0);
        let v = [vector(&[1.0, 0.0, 0.0]), vector(&[0.0, 2.0, 0.0])];
        assert_abs_diff_eq!(gram_volume(&v).unwrap(), 2.0, epsilon = 1e-12);
        let v = [vector(&[1.0, 0.0, 0.0]), vector(&[2.0, 0.0, 0.0])];
        assert_abs_diff_eq!(gram_volume(&v).unwrap(), 0.0, epsilon = 1e-12);
        assert!(matches!(gram_volume(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn signed_det_examples() {
        let id2 = [vector(&[1.0, 0.0]), vector(&[0.0, 1.0])];
        assert_abs_diff_eq!(signed_det(&id2).unwrap(), 1.0);
        let swap = [vector(&[0.0, 1.0]), vector(&[1.0, 0.0])];
        assert_abs_diff_eq!(signed_det(&swap).unwrap(), -1.0);
        let id3 = [
            vector(&[1.0, 0.0, 0.0]),
            vector(&[0.0, 1.0, 0.0]),
            vector(&[0.0, 0.0, 1.0]),
        ];
        assert_abs_diff_eq!(signed_det(&id3).unwrap(), 1.0);
        assert!(matches!(
            signed_det(&id3[..2]),
            Err(Error::WrongCount { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        // One equation, three unknowns.
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let ns = nullspace(&m, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert_abs_diff_eq!((&m * v).norm(), 0.0, epsilon = 1e-12);
        }
    }
}

//! Real coordinates for Hermitian matrices.
//!
//! A `d × d` Hermitian matrix is stored as `d²` reals: the diagonal first,
//! then `(√2 Re J_kl, √2 Im J_kl)` for `k < l` in row-major order. The `√2`
//! makes the Euclidean norm of the coordinates equal the Frobenius norm, so
//! projections computed in either space agree.

use nalgebra::DVector;

use crate::linalg::{c, cr, ComplexMatrix};

const SQRT2: f64 = std::f64::consts::SQRT_2;

pub(crate) fn coord_len(d: usize) -> usize {
    d * d
}

/// Coordinate indices of the real and imaginary parts of entry `(k, l)`,
/// `k < l`.
pub(crate) fn offdiag_coords(d: usize, k: usize, l: usize) -> (usize, usize) {
    debug_assert!(k < l && l < d);
    // pairs before row k: Σ_{r<k} (d − 1 − r)
    let before = k * (2 * d - k - 1) / 2;
    let pos = d + 2 * (before + (l - k - 1));
    (pos, pos + 1)
}

pub(crate) fn encode(m: &ComplexMatrix) -> DVector<f64> {
    let d = m.nrows();
    let mut x = DVector::zeros(coord_len(d));
    for k in 0..d {
        x[k] = m[(k, k)].re;
    }
    let mut pos = d;
    for k in 0..d {
        for l in k + 1..d {
            let z = (m[(k, l)] + m[(l, k)].conj()) * 0.5;
            x[pos] = SQRT2 * z.re;
            x[pos + 1] = SQRT2 * z.im;
            pos += 2;
        }
    }
    x
}

pub(crate) fn decode(x: &DVector<f64>, d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        m[(k, k)] = cr(x[k]);
    }
    let mut pos = d;
    for k in 0..d {
        for l in k + 1..d {
            let z = c(x[pos], x[pos + 1]) / SQRT2;
            m[(k, l)] = z;
            m[(l, k)] = z.conj();
            pos += 2;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_isometry() {
        let h = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                cr(i as f64 + 1.0)
            } else if i < j {
                c(i as f64 - j as f64, 0.5 * (i + j) as f64)
            } else {
                c(j as f64 - i as f64, -0.5 * (i + j) as f64)
            }
        });
        let x = encode(&h);
        assert!((decode(&x, 3) - &h).norm() < 1e-15);
        assert!((x.norm() - h.norm()).abs() < 1e-14);
        let (re, im) = offdiag_coords(3, 1, 2);
        assert!((x[re] - SQRT2 * h[(1, 2)].re).abs() < 1e-15);
        assert!((x[im] - SQRT2 * h[(1, 2)].im).abs() < 1e-15);
    }
}

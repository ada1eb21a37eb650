//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts).

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, WireError};

const MAX_SWEEPS: usize = 60;

/// Real symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(
            off.len() + 1,
            diag.len().max(1),
            "off-diagonal must be one shorter than diagonal"
        );
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &v) in self.off.iter().enumerate() {
            m[(i, i + 1)] = v;
            m[(i + 1, i)] = v;
        }
        m
    }

    /// Eigenvalues (unsorted) and eigenvectors as the columns of the
    /// returned matrix.
    pub fn eigen(&self) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        let mut z = DMatrix::<f64>::identity(n, n);
        if n == 0 {
            return Ok((DVector::from_vec(d), z));
        }

        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > MAX_SWEEPS {
                    return Err(WireError::NoConvergence(MAX_SWEEPS));
                }

                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
                let mut deflated = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for k in 0..n {
                        let zf = z[(k, i + 1)];
                        let zi = z[(k, i)];
                        z[(k, i + 1)] = s * zi + c * zf;
                        z[(k, i)] = c * zi - s * zf;
                    }
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        Ok((DVector::from_vec(d), z))
    }
}

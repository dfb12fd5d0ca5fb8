//! Linear solves by LU with partial pivoting.

use super::cmatrix::CMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Solves A·X = B for square, numerically nonsingular A.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::dim("solve lhs must be square", a.rows(), a.cols()));
    }
    if a.rows() != b.rows() {
        return Err(Error::dim("solve rhs rows", a.rows(), b.rows()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(b.clone());
    }

    let scale = a.max_abs();
    let pivot_floor = scale * f64::EPSILON * 8.0 * n as f64;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].norm();
        for i in (k + 1)..n {
            let mag = lu[(i, k)].norm();
            if mag > best {
                best = mag;
                p = i;
            }
        }
        if best <= pivot_floor {
            return Err(Error::Singular { pivot: best, scale });
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let sub = factor * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut x = CMatrix::zeros(n, b.cols());
    let mut col = vec![zero; n];
    for c in 0..b.cols() {
        for i in 0..n {
            col[i] = b[(perm[i], c)];
        }
        // forward substitution, unit lower triangle
        for i in 1..n {
            let mut acc = col[i];
            for j in 0..i {
                acc -= lu[(i, j)] * col[j];
            }
            col[i] = acc;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut acc = col[i];
            for j in (i + 1)..n {
                acc -= lu[(i, j)] * col[j];
            }
            col[i] = acc / lu[(i, i)];
        }
        for i in 0..n {
            x[(i, c)] = col[i];
        }
    }
    Ok(x)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    solve(a, &CMatrix::identity(a.rows()))
}

/// Resolvent (lambda·I − T)^(-1); fails Singular when lambda sits on the spectrum.
pub fn resolvent(t: &CMatrix, lambda: Complex64) -> Result<CMatrix> {
    let mut shifted = -t;
    for i in 0..t.rows() {
        shifted[(i, i)] += lambda;
    }
    inverse(&shifted)
}

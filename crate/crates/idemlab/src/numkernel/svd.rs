//! Singular value decomposition by one-sided Jacobi rotations.
//!
//! One-sided Jacobi orthogonalizes the columns of a working copy of A by
//! plane rotations applied on the right, accumulating the rotations into V.
//! At convergence A·V = U·Σ with Σ the column norms. The method is slower
//! than bidiagonalization but has excellent relative accuracy for the small
//! singular values, which is what the rank / nullspace queries here need.

use super::cmatrix::CMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

const MAX_SWEEPS: usize = 60;

/// Thin SVD data: `a ≈ u · diag(sigma) · v.adjoint()`.
///
/// `sigma` has one entry per column of `a`, sorted descending (entries past
/// `min(rows, cols)` are zero). `v` is always square (`cols × cols`); columns
/// of `u` past the numerical rank are zeroed.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

/// Rank-revealing decomposition produced by [`svd_rank`].
#[derive(Debug, Clone)]
pub struct SvdRank {
    /// Singular values, descending, one per column of the input.
    pub sigma: Vec<f64>,
    /// Number of singular values above `tol · sigma[0]`.
    pub rank: usize,
    /// Orthonormal columns spanning the numerical range (rows × rank).
    pub range_basis: CMatrix,
    /// Orthonormal columns spanning the numerical nullspace (cols × (cols − rank)).
    pub null_basis: CMatrix,
}

/// Default relative tolerance separating rank gaps from roundoff at n ≤ 512.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

pub fn svd(a: &CMatrix) -> Result<Svd> {
    jacobi(a, true)
}

/// Singular values only (no accumulation of V, no normalization of U).
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(a, false)?.sigma)
}

/// Spectral (operator 2-) norm.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    singular_values(a).map(|s| s[0]).unwrap_or(f64::NAN)
}

/// sigma_max / sigma_min over the square profile; infinite when singular.
pub fn condition_number(a: &CMatrix) -> f64 {
    let k = a.rows().min(a.cols());
    if k == 0 {
        return 1.0;
    }
    match singular_values(a) {
        Ok(s) => {
            let smin = s[k - 1];
            if smin == 0.0 {
                f64::INFINITY
            } else {
                s[0] / smin
            }
        }
        Err(_) => f64::NAN,
    }
}

fn jacobi(a: &CMatrix, accumulate: bool) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    if n == 0 || m == 0 {
        return Ok(Svd {
            u: CMatrix::zeros(m, n),
            sigma: vec![0.0; n],
            v: CMatrix::identity(n),
        });
    }

    // columns of the working matrix, so rotations touch contiguous memory
    let mut w: Vec<Vec<Complex64>> = (0..n).map(|c| a.column(c)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|c| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[c] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    let tol = (m.max(n).max(8) as f64) * f64::EPSILON;
    // columns below this norm carry no rank information; rotating against
    // them just churns rounding noise
    let col_floor = a.fro_norm() * f64::EPSILON;
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (aa, bb, cc) = gram(&w[i], &w[j]);
                if aa.sqrt() <= col_floor || bb.sqrt() <= col_floor {
                    continue;
                }
                if cc.norm() <= tol * (aa * bb).sqrt() {
                    continue;
                }
                let abs_c = cc.norm();
                let phase = cc / abs_c;
                let tau = (aa - bb) / (2.0 * abs_c);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                if sn == 0.0 {
                    continue;
                }
                rotated = true;
                rotate_pair(&mut w, i, j, cs, sn, phase);
                if accumulate {
                    rotate_pair(&mut v, i, j, cs, sn, phase);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { what: "jacobi svd", iterations: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|col| l2(col)).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));

    let mut sigma = Vec::with_capacity(n);
    let mut u = CMatrix::zeros(m, n);
    let mut vm = CMatrix::zeros(n, n);
    let floor = norms[order[0]] * f64::EPSILON;
    for (k, &idx) in order.iter().enumerate() {
        let s = norms[idx];
        sigma.push(s);
        if s > floor && s > 0.0 {
            for r in 0..m {
                u[(r, k)] = w[idx][r] / s;
            }
        }
        if accumulate {
            for r in 0..n {
                vm[(r, k)] = v[idx][r];
            }
        }
    }
    if !accumulate {
        vm = CMatrix::identity(n);
    }
    Ok(Svd { u, sigma, v: vm })
}

fn gram(x: &[Complex64], y: &[Complex64]) -> (f64, f64, Complex64) {
    let mut a = 0.0;
    let mut b = 0.0;
    let mut c = Complex64::new(0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        a += xi.norm_sqr();
        b += yi.norm_sqr();
        c += xi.conj() * yi;
    }
    (a, b, c)
}

fn l2(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Applies the rotation that zeroes the (i,j) Gram entry:
///   col_i' =  cs·col_i + sn·conj(phase)·col_j
///   col_j' = -sn·phase·col_i + cs·col_j
fn rotate_pair(cols: &mut [Vec<Complex64>], i: usize, j: usize, cs: f64, sn: f64, phase: Complex64) {
    let (head, tail) = cols.split_at_mut(j);
    let ci = &mut head[i];
    let cj = &mut tail[0];
    let sp = sn * phase;
    let spc = sn * phase.conj();
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let xi = *x;
        let yj = *y;
        *x = cs * xi + spc * yj;
        *y = cs * yj - sp * xi;
    }
}

/// Rank-revealing SVD: rank counts singular values above `tol · sigma[0]`.
pub fn svd_rank(a: &CMatrix, tol: f64) -> Result<SvdRank> {
    if !(tol > 0.0) {
        return Err(Error::BadParameters(format!("rank tolerance must be positive, got {tol}")));
    }
    let decomp = svd(a)?;
    let smax = decomp.sigma.first().copied().unwrap_or(0.0);
    let rank = if smax == 0.0 {
        0
    } else {
        decomp.sigma.iter().take_while(|&&s| s > tol * smax).count()
    };
    let range_basis = decomp.u.block(0, 0, a.rows(), rank);
    let null_basis = decomp.v.block(0, rank, a.cols(), a.cols() - rank);
    Ok(SvdRank { sigma: decomp.sigma, rank, range_basis, null_basis })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(entries: &[f64]) -> CMatrix {
        CMatrix::from_fn(entries.len(), entries.len(), |r, c| {
            if r == c {
                Complex64::new(entries[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn diag_rank_one() {
        let out = svd_rank(&diag(&[1.0, 0.0]), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(out.rank, 1);
        assert!((out.sigma[0] - 1.0).abs() < 1e-14);
        assert!(out.sigma[1].abs() < 1e-14);
        // range = span e1, null = span e2
        assert!((out.range_basis[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(out.range_basis[(1, 0)].norm() < 1e-14);
        assert!((out.null_basis[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(out.null_basis[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn rank_one_2x2() {
        // A = [[1,1],[0,0]]: A·A* has eigenvalues {2, 0}, so sigma = (sqrt(2), 0)
        let a = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let out = svd_rank(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(out.rank, 1);
        assert!((out.sigma[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!(out.sigma[1].abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_rank_zero() {
        let out = svd_rank(&CMatrix::zeros(3, 3), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(out.rank, 0);
        assert_eq!(out.null_basis, CMatrix::identity(3));
    }

    #[test]
    fn reconstruction_and_orthogonality() {
        let a = CMatrix::from_fn(5, 3, |r, c| {
            Complex64::new((r * 3 + c) as f64 * 0.3 - 1.0, ((r + 2 * c) % 5) as f64 * 0.2)
        });
        let d = svd(&a).unwrap();
        // residual of A v_k = sigma_k u_k for the leading columns
        let mut recon = CMatrix::zeros(5, 3);
        for k in 0..3 {
            let av = a.apply(&d.v.column(k));
            for r in 0..5 {
                recon[(r, k)] = av[r] - d.u[(r, k)] * d.sigma[k];
            }
        }
        assert!(recon.fro_norm() < 1e-12, "A v_k != sigma_k u_k: {}", recon.fro_norm());
        let vtv = &d.v.adjoint() * &d.v;
        assert!((&vtv - &CMatrix::identity(3)).fro_norm() < 1e-13);
    }

    #[test]
    fn wide_matrix_full_nullspace() {
        // 2x4 matrix: nullspace has dimension >= 2
        let a = CMatrix::from_real_rows(&[&[1.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 1.0]]);
        let out = svd_rank(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(out.rank, 2);
        assert_eq!(out.null_basis.cols(), 2);
        let residual = &a * &out.null_basis;
        assert!(op_norm(&residual) < 1e-13);
    }

    #[test]
    fn op_norm_of_projector_difference() {
        // spectral norm of diag(1,-1) is 1 (not sqrt(2) as Frobenius would give)
        let d = diag(&[1.0, -1.0]);
        assert!((op_norm(&d) - 1.0).abs() < 1e-14);
    }
}

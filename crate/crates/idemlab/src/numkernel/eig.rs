//! Eigenvalues of dense complex matrices.
//!
//! The solver combines three layers:
//!
//! 1. triangular matrices are read off the diagonal;
//! 2. a numerical kernel (singular values below `DEFLATE_TOL · sigma_max`)
//!    is split off first, contributing exact zero eigenvalues, and the
//!    solver recurses on the compressed full-rank block. This keeps the
//!    zero eigenvalues of defective nilpotent matrices exact instead of
//!    scattering them on a circle of radius eps^(1/k);
//! 3. the full-rank block goes through unitary Hessenberg reduction and
//!    shifted QR with Wilkinson shifts and deflation.
//!
//! Step 2 stays inside the usual backward-error budget: reporting a zero
//! eigenvalue for a singular value sigma ≤ DEFLATE_TOL·sigma_max amounts to
//! an O(DEFLATE_TOL)-norm perturbation of the input.

use super::cmatrix::CMatrix;
use super::svd::svd;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Relative singular-value threshold for splitting off the zero cluster.
const DEFLATE_TOL: f64 = 1e-12;

/// QR sweep budget, per matrix dimension.
const SWEEPS_PER_DIM: usize = 30;

/// Eigenvalues with multiplicity, in no particular order.
pub fn eig(a: &CMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::dim("eig requires a square matrix", a.rows(), a.cols()));
    }
    let mut out = Vec::with_capacity(a.rows());
    eig_rec(a.clone(), &mut out)?;
    Ok(out)
}

fn eig_rec(a: CMatrix, out: &mut Vec<Complex64>) -> Result<()> {
    let n = a.rows();
    if n == 0 {
        return Ok(());
    }
    if n == 1 {
        out.push(a[(0, 0)]);
        return Ok(());
    }
    if a.is_upper_triangular() || a.is_lower_triangular() {
        for i in 0..n {
            out.push(a[(i, i)]);
        }
        return Ok(());
    }

    let decomp = svd(&a)?;
    let smax = decomp.sigma[0];
    if smax == 0.0 {
        out.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(n));
        return Ok(());
    }
    let rank = decomp.sigma.iter().take_while(|&&s| s > DEFLATE_TOL * smax).count();
    if rank < n {
        // A·v ≈ 0 on the trailing right-singular columns, so in the basis
        // [V1 V2] the matrix is [[V1*AV1, ~0],[V2*AV1, ~0]] and the spectrum
        // splits as sigma(V1*AV1) plus n-rank zeros.
        out.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(n - rank));
        let v1 = decomp.v.block(0, 0, n, rank);
        let compressed = &(&v1.adjoint() * &a) * &v1;
        return eig_rec(compressed, out);
    }

    qr_eigenvalues(a, out)
}

/// Complex Givens rotation: returns (c, s) with c real so that
/// `[[c, s], [-conj(s), c]] · [f; g] = [r; 0]`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    if g == zero {
        return (1.0, zero);
    }
    if f == zero {
        return (0.0, g.conj() / g.norm());
    }
    let fa = f.norm();
    let d = (fa * fa + g.norm_sqr()).sqrt();
    let c = fa / d;
    let s = (f / fa) * (g.conj() / d);
    (c, s)
}

fn qr_eigenvalues(mut h: CMatrix, out: &mut Vec<Complex64>) -> Result<()> {
    let n = h.rows();
    hessenberg_in_place(&mut h);

    let hnorm: f64 = h.fro_norm().max(f64::MIN_POSITIVE);
    let negligible = |h: &CMatrix, i: usize| -> bool {
        let local = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
        let scale = if local > 0.0 { local } else { hnorm };
        h[(i, i - 1)].norm() <= f64::EPSILON * scale
    };

    let zero = Complex64::new(0.0, 0.0);
    let mut hi = n - 1;
    let mut window_iters = 0usize;
    let mut total_iters = 0usize;
    let cap = SWEEPS_PER_DIM * n;

    loop {
        // walk up from hi to the first negligible subdiagonal
        let mut lo = hi;
        while lo > 0 {
            if negligible(&h, lo) {
                h[(lo, lo - 1)] = zero;
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            out.push(h[(hi, hi)]);
            if hi == 0 {
                return Ok(());
            }
            hi -= 1;
            window_iters = 0;
            continue;
        }

        if total_iters >= cap {
            return Err(Error::NonConvergence { what: "shifted QR", iterations: cap });
        }

        let shift = if window_iters > 0 && window_iters % 10 == 0 {
            // occasional ad hoc shift to break symmetric stalls
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };

        qr_step(&mut h, lo, hi, shift);
        window_iters += 1;
        total_iters += 1;
    }
}

/// Eigenvalue of the trailing 2x2 block closest to its bottom-right entry.
fn wilkinson_shift(h: &CMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half = (a + d) * Complex64::new(0.5, 0.0);
    let diff = (a - d) * Complex64::new(0.5, 0.0);
    let disc = (diff * diff + b * c).sqrt();
    let l1 = half + disc;
    let l2 = half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit single-shift QR step on the window [lo..=hi].
///
/// Only the window is updated; the coupling strips outside it do not affect
/// eigenvalues and are never read again.
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, mu: Complex64) {
    for i in lo..=hi {
        h[(i, i)] -= mu;
    }
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = Complex64::new(c, 0.0) * x + s * y;
            h[(k + 1, j)] = -s.conj() * x + Complex64::new(c, 0.0) * y;
        }
        rots.push((c, s));
    }
    for (k, (c, s)) in (lo..hi).zip(rots) {
        for i in lo..=(k + 1) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = Complex64::new(c, 0.0) * x + s.conj() * y;
            h[(i, k + 1)] = -s * x + Complex64::new(c, 0.0) * y;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += mu;
    }
}

/// Unitary reduction to upper Hessenberg form by Householder reflectors.
fn hessenberg_in_place(h: &mut CMatrix) {
    let n = h.rows();
    let zero = Complex64::new(0.0, 0.0);
    for k in 0..n.saturating_sub(2) {
        // reflector for the column below the subdiagonal
        let mut v: Vec<Complex64> = (k + 1..n).map(|r| h[(r, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = v[0];
        let phase = if alpha == zero { Complex64::new(1.0, 0.0) } else { alpha / alpha.norm() };
        let sigma = -phase * norm;
        v[0] = alpha - sigma;
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sqr == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sqr;

        // left: rows k+1..n, columns k..n
        for j in k..n {
            let mut dot = zero;
            for (idx, r) in (k + 1..n).enumerate() {
                dot += v[idx].conj() * h[(r, j)];
            }
            let scale = dot * beta;
            for (idx, r) in (k + 1..n).enumerate() {
                let val = h[(r, j)] - scale * v[idx];
                h[(r, j)] = val;
            }
        }
        // right: all rows, columns k+1..n
        for i in 0..n {
            let mut dot = zero;
            for (idx, c) in (k + 1..n).enumerate() {
                dot += h[(i, c)] * v[idx];
            }
            let scale = dot * beta;
            for (idx, c) in (k + 1..n).enumerate() {
                let val = h[(i, c)] - scale * v[idx].conj();
                h[(i, c)] = val;
            }
        }
        // the annihilated entries are exactly zero by construction
        h[(k + 1, k)] = sigma;
        for r in k + 2..n {
            h[(r, k)] = zero;
        }
    }
}

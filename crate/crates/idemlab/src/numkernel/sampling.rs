//! Seeded random matrices and frames for generators and trial suites.

use super::cmatrix::CMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Matrix with independent standard complex Gaussian entries.
pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// Orthonormal n×k frame from a Gaussian draw, via modified Gram-Schmidt
/// with one re-orthogonalization pass.
pub fn random_orthonormal<R: Rng>(n: usize, k: usize, rng: &mut R) -> CMatrix {
    assert!(k <= n, "frame wider than ambient dimension");
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    while cols.len() < k {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        for _ in 0..2 {
            for q in &cols {
                let dot: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue; // essentially never: redraw a degenerate direction
        }
        for vi in &mut v {
            *vi /= norm;
        }
        cols.push(v);
    }
    CMatrix::from_fn(n, k, |r, c| cols[c][r])
}

pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    random_orthonormal(n, n, rng)
}

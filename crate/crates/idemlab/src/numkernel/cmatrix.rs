//! Dense complex matrices, row-major.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense complex matrix. Entries are stored row-major; all public
/// constructors reject non-finite entries. Zero-column (or zero-row)
/// matrices are allowed so that empty subspace bases compose cleanly.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    /// Builds a matrix from row-major data, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim("CMatrix::new entry count", rows * cols, data.len()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadParameters("non-finite matrix entry".into()));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Real row-major literal, convenient in tests and demos.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        CMatrix { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> CMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// Copies `src` into self with its (0,0) at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, src: &CMatrix) {
        assert!(r0 + src.rows <= self.rows && c0 + src.cols <= self.cols, "block out of range");
        for r in 0..src.rows {
            for c in 0..src.cols {
                self[(r0 + r, c0 + c)] = src[(r, c)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMatrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    /// Assembles a block matrix from a rectangular grid of blocks.
    /// Row heights and column widths are taken from the first block in
    /// each row / column and must be consistent.
    pub fn from_blocks(grid: &[&[&CMatrix]]) -> CMatrix {
        let row_heights: Vec<usize> = grid.iter().map(|row| row[0].rows).collect();
        let col_widths: Vec<usize> = grid[0].iter().map(|b| b.cols).collect();
        let total_r: usize = row_heights.iter().sum();
        let total_c: usize = col_widths.iter().sum();
        let mut out = Self::zeros(total_r, total_c);
        let mut r0 = 0;
        for (i, row) in grid.iter().enumerate() {
            assert_eq!(row.len(), col_widths.len(), "ragged block grid");
            let mut c0 = 0;
            for (j, blk) in row.iter().enumerate() {
                assert_eq!(blk.rows, row_heights[i], "inconsistent block heights");
                assert_eq!(blk.cols, col_widths[j], "inconsistent block widths");
                out.set_block(r0, c0, blk);
                c0 += blk.cols;
            }
            r0 += row_heights[i];
        }
        out
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_blocks(&[&[self, other]])
    }

    /// Vertical concatenation [self; other].
    pub fn vstack(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.cols, "vstack col mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        CMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Matrix power by repeated multiplication; `pow(0)` is the identity.
    pub fn pow(&self, k: usize) -> CMatrix {
        assert!(self.is_square(), "pow of non-square matrix");
        let mut acc = CMatrix::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Applies the matrix to a vector.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "apply length mismatch");
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for r in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..self.cols {
                acc += self[(r, c)] * x[c];
            }
            y[r] = acc;
        }
        y
    }

    pub fn is_upper_triangular(&self) -> bool {
        for r in 1..self.rows {
            for c in 0..r.min(self.cols) {
                if self[(r, c)] != Complex64::new(0.0, 0.0) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_lower_triangular(&self) -> bool {
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                if self[(r, c)] != Complex64::new(0.0, 0.0) {
                    return false;
                }
            }
        }
        true
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "mul shape mismatch");
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut out = CMatrix::zeros(m, n);
        // i-k-j loop order keeps the inner traversal contiguous for row-major data
        for i in 0..m {
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rrow = &rhs.data[p * n..(p + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    orow[j] += a * rrow[j];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_entry_count() {
        assert!(CMatrix::new(2, 2, vec![Complex64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(CMatrix::new(1, 1, vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(CMatrix::new(1, 1, vec![Complex64::new(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn block_round_trip() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = CMatrix::identity(2);
        let z = CMatrix::zeros(2, 2);
        let m = CMatrix::from_blocks(&[&[&a, &b], &[&z, &a]]);
        assert_eq!(m.block(0, 0, 2, 2), a);
        assert_eq!(m.block(0, 2, 2, 2), b);
        assert_eq!(m.block(2, 0, 2, 2), z);
    }

    #[test]
    fn mul_identity() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let i = CMatrix::identity(2);
        assert_eq!(&a * &i, a);
        assert_eq!(&i * &a, a);
    }

    #[test]
    fn zero_width_products() {
        let b = CMatrix::zeros(3, 0);
        let p = &b * &b.adjoint();
        assert_eq!(p.rows(), 3);
        assert_eq!(p.cols(), 3);
        assert_eq!(p.fro_norm(), 0.0);
        let g = &b.adjoint() * &b;
        assert_eq!((g.rows(), g.cols()), (0, 0));
    }

    #[test]
    fn adjoint_conjugates() {
        let a = CMatrix::new(1, 2, vec![Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)]).unwrap();
        let at = a.adjoint();
        assert_eq!(at[(0, 0)], Complex64::new(1.0, -2.0));
        assert_eq!(at[(1, 0)], Complex64::new(0.0, 1.0));
    }
}

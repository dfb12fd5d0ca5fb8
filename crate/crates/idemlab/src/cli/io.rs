//! Matrix file format: `{"rows": r, "cols": c, "entries": [[re, im], ...]}`
//! row-major, all numbers finite.

use crate::error::{Error, Result};
use crate::numkernel::CMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixFile {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Parse("matrix file needs positive rows and cols".into()));
        }
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Parse(format!(
                "expected {} entries, found {}",
                self.rows * self.cols,
                self.entries.len()
            )));
        }
        let data: Vec<Complex64> =
            self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        CMatrix::new(self.rows, self.cols, data)
            .map_err(|e| Error::Parse(format!("invalid matrix data: {e}")))
    }
}

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad matrix JSON: {e}")))?;
    file.to_matrix()
}

/// Eigenvalue list as `re,im` CSV rows with a header.
pub fn spectrum_csv(values: &[Complex64]) -> String {
    let mut out = String::from("re,im\n");
    for z in values {
        out.push_str(&format!("{},{}\n", z.re, z.im));
    }
    out
}

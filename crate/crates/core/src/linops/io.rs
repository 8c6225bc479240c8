use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_square, ComplexMatrix};
use crate::error::{Error, Result};

/// On-disk matrix: `{"dim": d, "entries": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let entries = (0..m.nrows())
            .map(|i| {
                (0..m.ncols())
                    .map(|j| [m[(i, j)].re, m[(i, j)].im])
                    .collect()
            })
            .collect();
        Self {
            dim: m.nrows(),
            entries,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.entries.len() != self.dim || self.entries.iter().any(|r| r.len() != self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "matrix file declares dim {} but rows do not match",
                self.dim
            )));
        }
        let m = ComplexMatrix::from_fn(self.dim, self.dim, |i, j| {
            let [re, im] = self.entries[i][j];
            Complex64::new(re, im)
        });
        check_square(&m)?;
        Ok(m)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
        let text = std::fs::read_to_string(path)?;
        let file: MatrixFile = serde_json::from_str(&text)?;
        file.to_matrix()
    }

    pub fn write(m: &ComplexMatrix, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(&Self::from_matrix(m))?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

//! State file I/O. The on-disk format is JSON:
//!
//! ```json
//! { "d": 2, "matrix": [[[re, im], ...], ...] }
//! ```
//!
//! `matrix` is row-major, d^2 x d^2, each entry a `[re, im]` pair. Loaded
//! matrices are validated against the density matrix invariants.

use serde::{Deserialize, Serialize};

use dcopt_core::linalg::{c, CMatrix};
use dcopt_core::DensityMatrix;

use crate::ExitKind;

#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    /// Factor dimension; the matrix acts on C^d (x) C^d.
    pub d: usize,
    /// Row-major complex entries as [re, im] pairs.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn load_state(path: &std::path::Path) -> Result<DensityMatrix, ExitKind> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ExitKind::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| ExitKind::Usage(format!("cannot parse {}: {e}", path.display())))?;
    let n = file.d * file.d;
    if file.matrix.len() != n || file.matrix.iter().any(|row| row.len() != n) {
        return Err(ExitKind::Usage(format!(
            "matrix in {} must be {n}x{n} for d = {}",
            path.display(),
            file.d
        )));
    }
    let mat = CMatrix::from_fn(n, n, |i, j| c(file.matrix[i][j][0], file.matrix[i][j][1]));
    DensityMatrix::new(mat, (file.d, file.d))
        .map_err(|e| ExitKind::InvalidState(format!("{}: {e}", path.display())))
}

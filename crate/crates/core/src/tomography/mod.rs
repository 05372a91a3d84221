//! Measurement matrices, error metrics and model-based process tomography.

mod model;
mod process;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuit::TauParams;
use crate::error::{Error, Result};

pub use model::CompiledGate;
pub use process::{
    ideal_cnot_chi, output_density, output_density_for, pauli_label, predict_matrix, process_fidelity,
    reconstruct_chi, ChiJson, ChiMatrix, DensityMatrix, ProcessTomography, C64,
};

pub const MATRIX_DIM: usize = 8;

/// Normalisation tolerance for model-generated matrices.
pub const STRICT_BLOCK_TOLERANCE: f64 = 1e-9;
/// Normalisation tolerance admitted for measured data.
pub const DATA_BLOCK_TOLERANCE: f64 = 0.02;

/// 8×8 matrix of conditional coincidence probabilities.
///
/// Rows are the inputs |00⟩,|01⟩,|10⟩,|11⟩,|++⟩,|+−⟩,|−+⟩,|−−⟩. Columns 1–4 are
/// the Z⊗Z outcomes 00,01,10,11 and columns 5–8 the X⊗X outcomes ++,+−,−+,−−;
/// each block of a row sums to one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasMatrix([[f64; MATRIX_DIM]; MATRIX_DIM]);

impl MeasMatrix {
    pub fn new(entries: [[f64; MATRIX_DIM]; MATRIX_DIM]) -> Result<Self> {
        for (r, row) in entries.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(Error::Malformed(format!(
                        "entry ({}, {}) = {v} is not a probability",
                        r + 1,
                        c + 1
                    )));
                }
            }
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[[f64; MATRIX_DIM]; MATRIX_DIM] {
        &self.0
    }

    pub fn row(&self, r: usize) -> &[f64; MATRIX_DIM] {
        &self.0[r]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.0[r][c]
    }

    /// Checks that every row's Z and X blocks sum to one within `tol`.
    pub fn check_normalization(&self, tol: f64) -> Result<()> {
        for (r, row) in self.0.iter().enumerate() {
            for (b, name) in [(0, "Z"), (4, "X")] {
                let sum: f64 = row[b..b + 4].iter().sum();
                if (sum - 1.0).abs() > tol {
                    return Err(Error::Malformed(format!(
                        "row {} {name} block sums to {sum}",
                        r + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut entries = [[0.0; MATRIX_DIM]; MATRIX_DIM];
        let mut rows = 0;
        for record in reader.records() {
            let record = record.map_err(|e| Error::Malformed(e.to_string()))?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            if rows == MATRIX_DIM {
                return Err(Error::Malformed(format!("more than {MATRIX_DIM} data rows")));
            }
            if record.len() != MATRIX_DIM {
                return Err(Error::Malformed(format!(
                    "row {} has {} columns, expected {MATRIX_DIM}",
                    rows + 1,
                    record.len()
                )));
            }
            for (c, field) in record.iter().enumerate() {
                entries[rows][c] = field.parse().map_err(|_| {
                    Error::Malformed(format!("row {}, column {}: `{field}`", rows + 1, c + 1))
                })?;
            }
            rows += 1;
        }
        if rows != MATRIX_DIM {
            return Err(Error::Malformed(format!("{rows} data rows, expected {MATRIX_DIM}")));
        }
        Self::new(entries)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# rows: 00,01,10,11,++,+-,-+,-- | columns: 00,01,10,11,++,+-,-+,--\n");
        for row in &self.0 {
            for (c, v) in row.iter().enumerate() {
                if c > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Element-wise absolute error between measured and modelled matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub error_matrix: [[f64; MATRIX_DIM]; MATRIX_DIM],
    pub e_max: f64,
    pub e_mean: f64,
}

pub fn error_report(measured: &MeasMatrix, model: &MeasMatrix) -> ErrorReport {
    let mut error_matrix = [[0.0; MATRIX_DIM]; MATRIX_DIM];
    let (mut e_max, mut sum) = (0.0f64, 0.0);
    for r in 0..MATRIX_DIM {
        for c in 0..MATRIX_DIM {
            let e = (measured.0[r][c] - model.0[r][c]).abs();
            error_matrix[r][c] = e;
            e_max = e_max.max(e);
            sum += e;
        }
    }
    ErrorReport {
        error_matrix,
        e_max,
        e_mean: sum / (MATRIX_DIM * MATRIX_DIM) as f64,
    }
}

/// Predicted measurement matrix of the CNOT model at `tau`.
pub fn model_matrix(tau: &TauParams) -> Result<MeasMatrix> {
    let gate = CompiledGate::cnot();
    let overlaps = gate.overlaps(tau);
    let mut entries = [[0.0; MATRIX_DIM]; MATRIX_DIM];
    for (r, row) in entries.iter_mut().enumerate() {
        *row = gate.row_with(r, &overlaps)?;
    }
    Ok(MeasMatrix(entries))
}

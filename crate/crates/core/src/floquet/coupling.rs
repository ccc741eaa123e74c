use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Real symmetric site-coupling matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    j: DMatrix<f64>,
    boundary: Boundary,
}

const SYMMETRY_TOL: f64 = 1e-12;

impl CouplingMatrix {
    pub fn new(j: DMatrix<f64>, boundary: Boundary) -> Result<Self> {
        if j.nrows() != j.ncols() {
            return Err(Error::DimensionMismatch { expected: j.nrows(), got: j.ncols() });
        }
        if j.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("J", "entries must be finite"));
        }
        let asym = (&j - j.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        if let Some(d) = j.diagonal().iter().find(|d| **d != 0.0) {
            return Err(Error::param("J", format!("diagonal must vanish, found {d}")));
        }
        Ok(CouplingMatrix { j, boundary })
    }

    pub fn zeros(m: usize, boundary: Boundary) -> Self {
        CouplingMatrix { j: DMatrix::zeros(m, m), boundary }
    }

    /// Uniform all-to-all coupling `J_ij = value` for `i ≠ j`.
    pub fn all_to_all(m: usize, value: f64) -> Self {
        let j = DMatrix::from_fn(m, m, |a, b| if a == b { 0.0 } else { value });
        CouplingMatrix { j, boundary: Boundary::Open }
    }

    pub fn n_sites(&self) -> usize {
        self.j.nrows()
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.j[(i, k)]
    }

    /// Row-major `i,j,value` table including zeros.
    pub fn to_csv(&self) -> String {
        matrix_to_csv(&self.j)
    }

    pub fn from_csv(text: &str, boundary: Boundary) -> Result<Self> {
        CouplingMatrix::new(matrix_from_csv(text)?, boundary)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let m = self.n_sites();
        let rows: Vec<Vec<f64>> = (0..m).map(|a| (0..m).map(|b| self.j[(a, b)]).collect()).collect();
        serde_json::json!({ "boundary": self.boundary, "n_sites": m, "j": rows })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Record {
            boundary: Boundary,
            j: Vec<Vec<f64>>,
        }
        let rec: Record = serde_json::from_value(v.clone()).map_err(|e| Error::Io(format!("coupling JSON: {e}")))?;
        let m = rec.j.len();
        if let Some(row) = rec.j.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, got: row.len() });
        }
        CouplingMatrix::new(DMatrix::from_fn(m, m, |a, b| rec.j[a][b]), rec.boundary)
    }

    /// Non-zero upper-triangle entries `(i, j, J_ij)` with `i < j`.
    pub fn bonds(&self) -> Vec<(usize, usize, f64)> {
        let m = self.n_sites();
        let mut out = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                if self.j[(a, b)] != 0.0 {
                    out.push((a, b, self.j[(a, b)]));
                }
            }
        }
        out
    }
}

/// Row-major `i,j,value` CSV of a square matrix.
pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::from("i,j,value\n");
    for a in 0..m.nrows() {
        for b in 0..m.ncols() {
            out.push_str(&format!("{a},{b},{:.11e}\n", m[(a, b)]));
        }
    }
    out
}

/// Parses the `i,j,value` format; missing entries are zero.
pub fn matrix_from_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut entries = Vec::new();
    let mut n = 0;
    for rec in rdr.deserialize::<(usize, usize, f64)>() {
        let (a, b, v) = rec.map_err(|e| Error::Io(format!("matrix CSV: {e}")))?;
        n = n.max(a + 1).max(b + 1);
        entries.push((a, b, v));
    }
    let mut m = DMatrix::zeros(n, n);
    for (a, b, v) in entries {
        m[(a, b)] = v;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(CouplingMatrix::new(bad, Boundary::Open), Err(Error::NotSymmetric(_))));
        let diag = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(CouplingMatrix::new(diag, Boundary::Open).is_err());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let j = CouplingMatrix::all_to_all(4, -0.25);
        let csv = j.to_csv();
        assert!(csv.starts_with("i,j,value\n0,0,"));
        assert_eq!(CouplingMatrix::from_csv(&csv, Boundary::Open).unwrap(), j);
        assert_eq!(CouplingMatrix::from_json(&j.to_json()).unwrap(), j);
    }
}

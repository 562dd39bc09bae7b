//! Column-normalized non-negative dictionaries and their CSV format.
//!
//! The CSV layout is one row per signal dimension with one comma-separated
//! column per atom. A leading line that does not parse as numbers is treated
//! as a header and skipped.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::types::{Signal, SparseCode};

/// Deviation of a column norm from 1 tolerated by [`validate_dictionary`].
pub const NORM_TOLERANCE: f64 = 1e-6;

/// An overcomplete matrix of unit-norm, non-negative atoms, stored column-major
/// so each atom is a contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    atoms: DMatrix<f64>,
}

/// Checks the dictionary invariants and wraps the matrix.
///
/// Checks run in the order shape, sign, norm, so a matrix that violates
/// several reports the first.
pub fn validate_dictionary(atoms: DMatrix<f64>) -> Result<Dictionary> {
    let (signal_dim, num_atoms) = atoms.shape();
    if signal_dim == 0 || num_atoms == 0 {
        return Err(Error::EmptyInput);
    }
    if signal_dim >= num_atoms {
        return Err(Error::NotOvercomplete { signal_dim, num_atoms });
    }
    if atoms.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("dictionary"));
    }
    for j in 0..num_atoms {
        for (i, &value) in linalg::column(&atoms, j).iter().enumerate() {
            if value < 0.0 {
                return Err(Error::NegativeEntry { row: i, column: j, value });
            }
        }
    }
    for j in 0..num_atoms {
        let n = linalg::norm(linalg::column(&atoms, j));
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { column: j, norm: n });
        }
    }
    Ok(Dictionary { atoms })
}

impl Dictionary {
    pub fn new(atoms: DMatrix<f64>) -> Result<Self> {
        validate_dictionary(atoms)
    }

    /// Signal dimension (number of rows).
    pub fn signal_dim(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn atom(&self, j: usize) -> &[f64] {
        linalg::column(&self.atoms, j)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.atoms
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.atoms
    }

    /// `Φᵀ r`
    pub fn correlate(&self, r: &[f64]) -> Vec<f64> {
        linalg::correlate(&self.atoms, r)
    }

    /// Dense product `Φ x`.
    pub fn synthesize(&self, code: &SparseCode) -> Result<Signal> {
        synthesize(self, code)
    }

    /// Reads the CSV dictionary format and validates the result.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let m = read_matrix_csv(path)?;
        validate_dictionary(m)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_matrix_csv(&self.atoms, path)
    }
}

/// `Φ x` as an explicit matrix-vector product.
pub fn synthesize(dict: &Dictionary, code: &SparseCode) -> Result<Signal> {
    let x = code.as_slice();
    if x.len() != dict.num_atoms() {
        return Err(Error::DimensionMismatch { expected: dict.num_atoms(), found: x.len() });
    }
    let mut y = vec![0.0; dict.signal_dim()];
    for (j, &c) in x.iter().enumerate() {
        if c != 0.0 {
            linalg::axpy(c, dict.atom(j), &mut y);
        }
    }
    Signal::new(y)
}

/// Parses the dictionary CSV layout into a dense matrix without checking any
/// dictionary invariant. Rows and columns in errors are 1-based, counting the
/// header line if one is present.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_csv(file)
}

pub fn parse_matrix_csv<R: Read>(reader: R) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (line, record) in rdr.records().enumerate() {
        let row_no = line + 1;
        let record = record.map_err(|e| Error::Parse { row: row_no, column: 0, message: e.to_string() })?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if line == 0 && parsed.iter().any(|p| p.is_err()) {
            // header line
            continue;
        }
        let mut values = Vec::with_capacity(parsed.len());
        for (col, p) in parsed.into_iter().enumerate() {
            match p {
                Ok(v) if v.is_finite() => values.push(v),
                Ok(v) => {
                    return Err(Error::Parse { row: row_no, column: col + 1, message: format!("non-finite value {v}") })
                }
                Err(_) => {
                    return Err(Error::Parse {
                        row: row_no,
                        column: col + 1,
                        message: format!("cannot parse {:?} as a number", &record[col]),
                    })
                }
            }
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(Error::Parse {
                    row: row_no,
                    column: values.len().min(w) + 1,
                    message: format!("expected {w} columns, found {}", values.len()),
                })
            }
            _ => {}
        }
        rows.push(values);
    }
    let ncols = width.unwrap_or(0);
    if rows.is_empty() || ncols == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn write_matrix_csv(m: &DMatrix<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_matrix(m, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes rows with shortest round-trip float formatting, so reading the file
/// back reproduces the matrix exactly.
pub fn write_matrix<W: Write>(m: &DMatrix<f64>, w: &mut W) -> std::io::Result<()> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{}", m[(i, j)])?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

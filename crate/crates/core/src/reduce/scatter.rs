use std::fmt::Display;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::preprocess::MinMax;

/// Write `label,f1,f2` rows with both feature columns min–max normalized.
pub fn write_scatter<W: Write, L: Display>(
    mut out: W,
    reduced: &DMatrix<f64>,
    labels: &[L],
) -> std::io::Result<()> {
    writeln!(out, "label,f1,f2")?;
    if reduced.nrows() > 0 {
        let normalized = MinMax::fit(reduced)
            .apply(reduced)
            .expect("bounds fitted on the same matrix");
        for (row, label) in normalized.row_iter().zip(labels) {
            writeln!(out, "{label},{},{}", row[0], row[1])?;
        }
    }
    out.flush()
}

/// Export the first two reduced features per sample for plotting.
pub fn scatter_export<L: Display>(reduced: &DMatrix<f64>, labels: &[L], path: &Path) -> Result<()> {
    if reduced.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: reduced.ncols(),
        });
    }
    if labels.len() != reduced.nrows() {
        return Err(Error::DimensionMismatch {
            expected: reduced.nrows(),
            found: labels.len(),
        });
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_scatter(BufWriter::new(file), reduced, labels).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_rows() {
        let x = DMatrix::from_row_slice(3, 2, &[0.0, 10.0, 5.0, 20.0, 10.0, 30.0]);
        let mut buf = Vec::new();
        write_scatter(&mut buf, &x, &["T", "I", "M"]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "label,f1,f2\nT,0,0\nI,0.5,0.5\nM,1,1\n");
    }

    #[test]
    fn empty_input_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        scatter_export::<&str>(&DMatrix::zeros(0, 2), &[], &path).unwrap();
        assert_eq!(fs::read_to_string(path).unwrap(), "label,f1,f2\n");
    }
}

//! `records.csv` and `weights.csv` reading and writing.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::run::RunRecord;
use crate::linalg::Matrix;

pub const RECORD_HEADER: [&str; 10] = [
    "step",
    "loss",
    "grad_l11",
    "grad_frob",
    "topk_g",
    "topk_m",
    "topk_v",
    "comp_err_m",
    "zeta",
    "state_elements",
];

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Writes records with a fixed header, `{:.16e}` numbers, and empty cells
/// for quantities the optimizer does not produce.
pub fn write_records<W: Write>(records: &[RunRecord], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.step.to_string(),
            num(r.loss),
            num(r.grad_l11),
            num(r.grad_frob),
            opt(r.topk_g),
            opt(r.topk_m),
            opt(r.topk_v),
            opt(r.comp_err_m),
            opt(r.zeta),
            r.state_elements.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(records, BufWriter::new(file)).map_err(|e| csv_err(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let header = reader.headers().map_err(|e| csv_err(path, e))?;
    if header.iter().ne(RECORD_HEADER) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: format!(
                "unexpected header `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let parse_err = |line: u64, col: &str, v: &str| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: bad {col} value `{v}`"),
    };
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let f = |i: usize| -> Result<f64> {
            row[i]
                .parse()
                .map_err(|_| parse_err(line, RECORD_HEADER[i], &row[i]))
        };
        let o = |i: usize| -> Result<Option<f64>> {
            if row[i].is_empty() {
                Ok(None)
            } else {
                f(i).map(Some)
            }
        };
        let u = |i: usize| -> Result<usize> {
            row[i]
                .parse()
                .map_err(|_| parse_err(line, RECORD_HEADER[i], &row[i]))
        };
        records.push(RunRecord {
            step: u(0)?,
            loss: f(1)?,
            grad_l11: f(2)?,
            grad_frob: f(3)?,
            topk_g: o(4)?,
            topk_m: o(5)?,
            topk_v: o(6)?,
            comp_err_m: o(7)?,
            zeta: o(8)?,
            state_elements: u(9)?,
        });
    }
    Ok(records)
}

/// One matrix row per line, no header.
pub fn write_matrix(m: &Matrix, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    for i in 0..m.rows() {
        w.write_record(m.row(i).iter().map(|&x| num(x)))
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let parsed = row
            .iter()
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        rows.push(parsed);
    }
    let cols = rows.first().map_or(0, Vec::len);
    let n = rows.len();
    Matrix::from_vec(n, cols, rows.concat())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(step: usize, zeta: Option<f64>) -> RunRecord {
        RunRecord {
            step,
            loss: 0.1 + step as f64,
            grad_l11: 3.0,
            grad_frob: 1.0 / 3.0,
            topk_g: Some(0.5),
            topk_m: None,
            topk_v: None,
            comp_err_m: None,
            zeta,
            state_elements: 288,
        }
    }

    #[test]
    fn header_and_formatting() {
        let mut buf = Vec::new();
        write_records(&[record(1, None)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.split('\n');
        assert_eq!(
            lines.next().unwrap(),
            "step,loss,grad_l11,grad_frob,topk_g,topk_m,topk_v,comp_err_m,zeta,state_elements"
        );
        assert_eq!(
            lines.next().unwrap(),
            "1,1.1000000000000001e0,3.0000000000000000e0,3.3333333333333331e-1,5.0000000000000000e-1,,,,,288"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn records_survive_a_file_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        let records = vec![
            record(1, Some(0.0)),
            record(11, Some(1e-300)),
            record(21, None),
        ];
        emit_csv(&records, &path).unwrap();
        assert_eq!(read_records(&path).unwrap(), records);
    }

    #[test]
    fn bad_header_and_cells_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "step,loss\n1,2\n").unwrap();
        assert!(matches!(read_records(&path), Err(Error::Parse { .. })));
        let mut buf = Vec::new();
        write_records(&[record(1, None)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replace("288", "x");
        std::fs::write(&path, text).unwrap();
        let err = read_records(&path).unwrap_err();
        assert!(err.to_string().contains("state_elements"), "{err}");
    }

    #[test]
    fn matrix_file_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.csv");
        let m = Matrix::from_rows(&[[1.0 / 3.0, -2e-17], [5.0, 0.0]]).unwrap();
        write_matrix(&m, &path).unwrap();
        assert_eq!(read_matrix(&path).unwrap(), m);
    }
}

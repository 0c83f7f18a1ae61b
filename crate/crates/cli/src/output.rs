use std::io::Write;
use std::path::Path;

use spectral_taylor::checks::{BoundRow, CheckRow};

use crate::error::{CliError, Result};

/// Round-trip exact decimal with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
    let path = dir.join(name);
    let io = |source| CliError::Io {
        path: path.clone(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(&path).map_err(|e| io(e.error))?;
    Ok(())
}

fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn check_csv(rows: &[CheckRow]) -> Vec<u8> {
    to_csv(
        &["check", "case", "error", "tolerance", "passed"],
        rows.iter().map(|r| {
            vec![
                r.check.clone(),
                r.case.clone(),
                fmt_f64(r.error),
                fmt_f64(r.tolerance),
                r.passed.to_string(),
            ]
        }),
    )
}

pub fn bound_csv(rows: &[BoundRow]) -> Vec<u8> {
    to_csv(
        &["check", "case", "lhs", "rhs", "margin", "stderr", "passed"],
        rows.iter().map(|r| {
            let b = &r.report;
            vec![
                r.check.clone(),
                r.case.clone(),
                fmt_f64(b.lhs),
                fmt_f64(b.rhs),
                fmt_f64(b.margin),
                b.mc_stderr.map(fmt_f64).unwrap_or_default(),
                b.passed.to_string(),
            ]
        }),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dim: usize,
    pub order: usize,
    pub tuples: u64,
    pub seconds: f64,
}

pub fn bench_csv(rows: &[BenchRow]) -> Vec<u8> {
    to_csv(
        &["N", "n", "tuples", "seconds"],
        rows.iter().map(|r| {
            vec![
                r.dim.to_string(),
                r.order.to_string(),
                r.tuples.to_string(),
                fmt_f64(r.seconds),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn empty_check_list_is_header_only() {
        assert_eq!(check_csv(&[]), b"check,case,error,tolerance,passed\n");
    }

    #[test]
    fn cases_with_commas_are_quoted() {
        let row = CheckRow::new("c", "a,b".into(), 0.0, 1.0);
        let text = String::from_utf8(check_csv(&[row])).unwrap();
        assert!(text.contains("\"a,b\""), "{text}");
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "x.csv", b"one").unwrap();
        write_atomic(dir.path(), "x.csv", b"two").unwrap();
        assert_eq!(std::fs::read(dir.path().join("x.csv")).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}

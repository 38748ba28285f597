//! Label-first CSV datasets: `label,f1,...,fp` per line, no header.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use spca_core::dataset::LabeledDataset;
use spca_core::Matrix;

use crate::Error;

pub fn load_csv(path: impl AsRef<Path>) -> Result<LabeledDataset, Error> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, path)
}

/// Parses a dataset; `origin` only labels error messages.
pub fn read_csv(reader: impl Read, origin: &Path) -> Result<LabeledDataset, Error> {
    let parse_err = |line: u64, msg: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut raw_labels = Vec::new();
    let mut data = Vec::new();
    let mut width: Option<usize> = None;
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(parse_err(line, e.to_string()));
            }
        }
        let line = record.position().map_or(0, |p| p.line());
        let p = record.len().saturating_sub(1);
        if p == 0 {
            return Err(parse_err(line, "expected a label and at least one feature".into()));
        }
        match width {
            None => width = Some(p),
            Some(w) if w != p => {
                return Err(parse_err(
                    line,
                    format!("ragged row: {p} features, expected {w}"),
                ))
            }
            Some(_) => {}
        }
        let label: i64 = record[0]
            .parse()
            .map_err(|_| parse_err(line, format!("label {:?} is not an integer", &record[0])))?;
        raw_labels.push(label);
        for (j, field) in record.iter().enumerate().skip(1) {
            let v: f64 = field.parse().map_err(|_| {
                parse_err(line, format!("feature {j} ({field:?}) is not a number"))
            })?;
            data.push(v);
        }
    }

    let Some(p) = width else {
        return Err(parse_err(0, "no samples".into()));
    };
    let features = Matrix::from_vec(raw_labels.len(), p, data)?;
    Ok(LabeledDataset::from_raw_labels(features, &raw_labels)?)
}

pub fn write_csv(ds: &LabeledDataset, path: impl AsRef<Path>) -> Result<(), Error> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    write_csv_to(ds, &mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

/// Features use Rust's shortest round-trip float formatting, so a reload is
/// bit-exact.
pub fn write_csv_to(ds: &LabeledDataset, out: &mut impl Write) -> io::Result<()> {
    for (row, label) in ds.features().row_iter().zip(ds.labels()) {
        write!(out, "{label}")?;
        for v in row {
            write!(out, ",{v}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<LabeledDataset, Error> {
        read_csv(text.as_bytes(), Path::new("mem.csv"))
    }

    #[test]
    fn parses_basic_file() {
        let ds = parse("0,1.0,2.0\n1,3.0,4.0").unwrap();
        assert_eq!((ds.len(), ds.dim()), (2, 2));
        assert_eq!(ds.labels(), &[0, 1]);
        assert_eq!(ds.features().row(1), &[3.0, 4.0]);
    }

    #[test]
    fn remaps_labels_and_accepts_crlf() {
        let ds = parse("5,1\r\n5,2\r\n9,3\r\n").unwrap();
        assert_eq!(ds.labels(), &[0, 0, 1]);
        assert_eq!(ds.class_count(), 2);
    }

    #[test]
    fn ragged_row_names_line() {
        match parse("0,1.0\n0,2.0,3.0") {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("ragged"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_fields_name_line() {
        assert!(matches!(parse("0,1\n0,x"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("a,1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("1.5,1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_csv("/definitely/not/here.csv"),
            Err(Error::Io { .. })
        ));
    }
}

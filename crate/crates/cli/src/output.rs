//! Deterministic emitters: JSON with sorted keys and CSV with a version line,
//! every float printed with 17 significant digits.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::CliError;

pub const CSV_VERSION_LINE: &str = "# muskat-csv v1";

/// Scientific notation with 17 significant digits; non-finite values become
/// `nan`, `inf` or `-inf`.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

struct Digits17 {
    inner: PrettyFormatter<'static>,
}

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Pretty JSON with keys sorted at every level.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    // `Value` maps are ordered by key.
    let sorted = serde_json::to_value(value)?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        Digits17 {
            inner: PrettyFormatter::new(),
        },
    );
    sorted.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

/// Writes the version line, a header and numeric rows.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut file = io::BufWriter::new(fs::File::create(path)?);
    writeln!(file, "{CSV_VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| format_f64(v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(-2.0), "-2.0000000000000000e0");
        assert_eq!(format_f64(f64::NAN), "nan");
        let back: f64 = format_f64(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn json_keys_are_sorted_and_parse_back() {
        let mut m = HashMap::new();
        for (k, v) in [("zeta", 1.0), ("alpha", 1.0 / 3.0), ("mid", f64::NAN)] {
            m.insert(k, v);
        }
        let text = to_json(&m).unwrap();
        let a = text.find("alpha").unwrap();
        let z = text.find("zeta").unwrap();
        let mid = text.find("mid").unwrap();
        assert!(a < mid && mid < z);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["alpha"].as_f64().unwrap(), 1.0 / 3.0);
        assert!(v["mid"].is_null());
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn csv_starts_with_the_version_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_csv(&p, &["t", "v"], &[vec![0.0, 1.5], vec![0.25, -1.0]]).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_VERSION_LINE));
        assert_eq!(lines.next(), Some("t,v"));
        assert_eq!(lines.next(), Some("0.0000000000000000e0,1.5000000000000000e0"));
    }
}

//! Plain-text table files:
//!
//! ```text
//! LPEDINV 1
//! P=100
//! M=100001
//! endpoint_mode=paper
//! -211.6...
//! ...
//! ```
//!
//! followed by exactly `M` values, each the shortest decimal that round-trips.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::table::{EndpointMode, InverseCdfTable};
use crate::{Error, Result};

pub const TABLE_MAGIC: &str = "LPEDINV";
pub const TABLE_VERSION: u32 = 1;

/// `lped_inv_P<P>.txt`
pub fn table_file_name(p: u32) -> String {
    format!("lped_inv_P{p}.txt")
}

pub fn write_table(table: &InverseCdfTable, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_table_to(table, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_table_to(table: &InverseCdfTable, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{TABLE_MAGIC} {TABLE_VERSION}")?;
    writeln!(out, "P={}", table.p())?;
    writeln!(out, "M={}", table.grid_points())?;
    writeln!(out, "endpoint_mode={}", table.endpoint_mode())?;
    for v in table.values() {
        writeln!(out, "{v:?}")?;
    }
    Ok(())
}

pub fn read_table(path: &Path) -> Result<InverseCdfTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_table_from(BufReader::new(file)).map_err(|e| match e {
        Error::Format(msg) => Error::format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn read_table_from(input: impl BufRead) -> Result<InverseCdfTable> {
    let mut lines = input.lines();
    let mut next = |what: &str| -> Result<String> {
        match lines.next() {
            Some(Ok(line)) => Ok(line),
            Some(Err(e)) => Err(Error::format(format!("reading {what}: {e}"))),
            None => Err(Error::format(format!("truncated before {what}"))),
        }
    };

    let header = next("header")?;
    let version = header
        .strip_prefix(TABLE_MAGIC)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| Error::format(format!("bad magic line {header:?}")))?;
    if version != TABLE_VERSION.to_string() {
        return Err(Error::format(format!("unsupported version {version:?}")));
    }
    let p: u32 = field(&next("P")?, "P")?;
    let m: usize = field(&next("M")?, "M")?;
    let mode_line = next("endpoint_mode")?;
    let mode = mode_line
        .strip_prefix("endpoint_mode=")
        .ok_or_else(|| Error::format(format!("expected endpoint_mode=, got {mode_line:?}")))?
        .parse::<EndpointMode>()
        .map_err(|e| Error::format(e.to_string()))?;

    let mut values = Vec::with_capacity(m.min(10_000_000));
    for i in 0..m {
        let line = next("value")
            .map_err(|_| Error::format(format!("payload has {i} values, header says M={m}")))?;
        let v = line
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::format(format!("bad value {line:?} at index {i}")))?;
        values.push(v);
    }
    for rest in lines {
        let rest = rest.map_err(|e| Error::format(e.to_string()))?;
        if !rest.trim().is_empty() {
            return Err(Error::format(format!("payload longer than M={m}")));
        }
    }
    InverseCdfTable::new(p, values, mode).map_err(|e| Error::format(e.to_string()))
}

fn field<T: std::str::FromStr>(line: &str, name: &str) -> Result<T> {
    line.strip_prefix(name)
        .and_then(|rest| rest.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::format(format!("expected {name}=<int>, got {line:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> InverseCdfTable {
        let values = vec![-3.0, -1.0 / 3.0, 1e-300, 0.1 + 0.2, 10.0];
        InverseCdfTable::new(100, values, EndpointMode::Paper).unwrap()
    }

    fn to_string(table: &InverseCdfTable) -> String {
        let mut buf = Vec::new();
        write_table_to(table, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn round_trip() {
        let table = sample_table();
        let text = to_string(&table);
        assert!(text.starts_with("LPEDINV 1\nP=100\nM=5\nendpoint_mode=paper\n-3.0\n"));
        let back = read_table_from(text.as_bytes()).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(table_file_name(100));
        let table = sample_table();
        write_table(&table, &path).unwrap();
        assert_eq!(read_table(&path).unwrap(), table);
    }

    #[test]
    fn rejects_malformed_input() {
        let good = to_string(&sample_table());
        let cases = [
            good.replacen("LPEDINV 1", "LPEDINV 2", 1),
            good.replacen("LPEDINV", "LPEDINW", 1),
            good.replacen("M=5", "M=6", 1),
            good.replacen("M=5", "M=4", 1),
            good.replacen("endpoint_mode=paper", "endpoint_mode=other", 1),
            good.replacen("-3.0", "4.0", 1),
            good.replacen("P=100", "P=x", 1),
            "LPEDINV 1\nP=100\n".to_string(),
            String::new(),
        ];
        for text in cases {
            let err = read_table_from(text.as_bytes()).unwrap_err();
            assert!(matches!(err, Error::Format(_)), "{text:?}: {err}");
        }
    }
}

//! Signal files.
//!
//! Binary: magic `QHA1`, `u32` d, `u32` N, then `N·d` pairs of `f64` (re, im),
//! all little-endian. CSV: a `# d=<d> n=<N>` line, then one row per signal with
//! `2d` interleaved re/im columns.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use qha::datasets::DataSet;
use qha::tf::Signal;
use qha::Complex64;

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 4] = b"QHA1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignalFormat {
    Binary,
    Csv,
}

impl SignalFormat {
    /// `.csv` means CSV; anything else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => SignalFormat::Csv,
            _ => SignalFormat::Binary,
        }
    }
}

fn format_err(msg: impl Into<String>) -> CliError {
    CliError::Format(msg.into())
}

pub fn write_binary<W: Write>(data: &DataSet, mut w: W) -> Result<()> {
    let d = u32::try_from(data.dim()).map_err(|_| format_err("dimension exceeds u32"))?;
    let n = u32::try_from(data.len()).map_err(|_| format_err("signal count exceeds u32"))?;
    w.write_all(MAGIC)?;
    w.write_all(&d.to_le_bytes())?;
    w.write_all(&n.to_le_bytes())?;
    for s in data.signals() {
        for v in s.values() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

fn read_f64(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<DataSet> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 12 {
        return Err(format_err("file is shorter than the 12-byte header"));
    }
    if &bytes[..4] != MAGIC {
        return Err(format_err("missing QHA1 magic"));
    }
    let d = read_u32(&bytes, 4) as usize;
    let n = read_u32(&bytes, 8) as usize;
    let expected = d
        .checked_mul(n)
        .and_then(|x| x.checked_mul(16))
        .and_then(|x| x.checked_add(12))
        .ok_or_else(|| format_err("header sizes overflow"))?;
    if bytes.len() != expected {
        return Err(format_err(format!(
            "header announces d={d}, n={n} ({expected} bytes) but the file has {} bytes",
            bytes.len()
        )));
    }
    let mut signals = Vec::with_capacity(n);
    let mut at = 12;
    for _ in 0..n {
        let mut v = Vec::with_capacity(d);
        for _ in 0..d {
            v.push(Complex64::new(read_f64(&bytes, at), read_f64(&bytes, at + 8)));
            at += 16;
        }
        signals.push(Signal::new(v)?);
    }
    Ok(DataSet::new(signals, "file")?)
}

pub fn write_csv<W: Write>(data: &DataSet, mut w: W) -> Result<()> {
    writeln!(w, "# d={} n={}", data.dim(), data.len())?;
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for s in data.signals() {
        // `{}` on f64 prints the shortest string that parses back to the same bits.
        out.write_record(s.values().iter().flat_map(|v| [v.re.to_string(), v.im.to_string()]))?;
    }
    out.flush()?;
    Ok(())
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let bad = || format_err(format!("expected `# d=<d> n=<N>`, found `{}`", line.trim_end()));
    let rest = line.trim().strip_prefix('#').ok_or_else(bad)?;
    let mut d = None;
    let mut n = None;
    for tok in rest.split_whitespace() {
        match tok.split_once('=') {
            Some(("d", v)) => d = Some(v.parse().map_err(|_| bad())?),
            Some(("n", v)) => n = Some(v.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    Ok((d.ok_or_else(bad)?, n.ok_or_else(bad)?))
}

pub fn read_csv<R: Read>(r: R) -> Result<DataSet> {
    let mut r = BufReader::new(r);
    let mut header = String::new();
    if r.read_line(&mut header)? == 0 {
        return Err(format_err("empty file"));
    }
    let (d, n) = parse_header(&header)?;
    let mut rows = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
    let mut signals = Vec::with_capacity(n);
    for (i, rec) in rows.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 * d {
            return Err(format_err(format!("row {i} has {} fields, expected {}", rec.len(), 2 * d)));
        }
        let nums = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| format_err(format!("row {i}: `{s}` is not a number"))))
            .collect::<Result<Vec<f64>>>()?;
        signals.push(Signal::new(nums.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())?);
    }
    if signals.len() != n {
        return Err(format_err(format!("header announces {n} signals, found {}", signals.len())));
    }
    Ok(DataSet::new(signals, "file")?)
}

/// Reads either format, choosing by the leading bytes.
pub fn read_signals(path: &Path) -> Result<DataSet> {
    let bytes = std::fs::read(path)?;
    if bytes.is_empty() {
        return Err(format_err(format!("{} is empty", path.display())));
    }
    if bytes.starts_with(MAGIC) {
        read_binary(bytes.as_slice())
    } else {
        read_csv(bytes.as_slice())
    }
}

pub fn write_signals(data: &DataSet, path: &Path, format: SignalFormat) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        SignalFormat::Binary => write_binary(data, file),
        SignalFormat::Csv => write_csv(data, file),
    }
}

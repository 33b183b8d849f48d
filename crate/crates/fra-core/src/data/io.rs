//! Dataset file format and CSV export.
//!
//! Binary layout (all integers and floats little-endian):
//!
//! ```text
//! magic "FRDS" | version u16 | connection u8 | winding u8
//! | f_min f64 | f_max f64 | grid count u32 | sample count u32
//! | per sample: fault_type u8, degree u8, position u16, seed u32,
//!               grid-count x f32 dB values
//! ```
//!
//! Values are stored as 32-bit floats; a read of a written file reproduces
//! the dataset bit-exactly at that precision.

use std::fs;
use std::path::Path;

use super::dataset::{Connection, LabeledDataset, Sample, WindingId};
use super::grid::{FraSweep, FrequencyGrid, GRID_POINTS};
use super::label::{FaultLabel, FaultType};
use crate::error::{Error, Result};

pub const DATASET_MAGIC: [u8; 4] = *b"FRDS";
pub const DATASET_VERSION: u16 = 1;

/// Serializes a dataset to its on-disk byte layout.
pub fn dataset_to_bytes(ds: &LabeledDataset) -> Vec<u8> {
    let grid = ds.grid();
    let mut out = Vec::with_capacity(28 + ds.len() * (8 + 4 * grid.len()));
    out.extend_from_slice(&DATASET_MAGIC);
    out.extend_from_slice(&DATASET_VERSION.to_le_bytes());
    out.push(ds.connection().code());
    out.push(ds.winding().code());
    out.extend_from_slice(&grid.f_min().to_le_bytes());
    out.extend_from_slice(&grid.f_max().to_le_bytes());
    out.extend_from_slice(&(grid.len() as u32).to_le_bytes());
    out.extend_from_slice(&(ds.len() as u32).to_le_bytes());
    for s in ds.samples() {
        out.push(s.label.fault_type.code());
        out.push(s.label.degree);
        out.extend_from_slice(&s.label.position.to_le_bytes());
        out.extend_from_slice(&s.seed_id.to_le_bytes());
        for v in s.sweep.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn write_dataset(ds: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, dataset_to_bytes(ds))?;
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::format(
                self.pos as u64,
                format!("truncated while reading {what}"),
            ));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f32(&mut self, what: &str) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::format(self.pos as u64, message))
    }
}

/// Parses a dataset from its on-disk byte layout.
pub fn dataset_from_bytes(bytes: &[u8]) -> Result<LabeledDataset> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let magic = r.take(4, "magic")?;
    if magic != DATASET_MAGIC {
        return Err(Error::format(0, format!("bad magic {magic:02x?}")));
    }
    let version = r.u16("version")?;
    if version != DATASET_VERSION {
        return r.fail(format!("unsupported version {version}"));
    }
    let connection = Connection::from_code(r.u8("connection")?)
        .map_err(|e| Error::format(r.pos as u64 - 1, e.to_string()))?;
    let winding = WindingId::from_code(r.u8("winding")?)
        .map_err(|e| Error::format(r.pos as u64 - 1, e.to_string()))?;
    let f_min = r.f64("grid f_min")?;
    let f_max = r.f64("grid f_max")?;
    let grid_count = r.u32("grid count")? as usize;
    if grid_count != GRID_POINTS {
        return r.fail(format!(
            "grid count {grid_count} does not match the {GRID_POINTS}-point contract"
        ));
    }
    let grid = FrequencyGrid::log_spaced(f_min, f_max)
        .map_err(|e| Error::format(r.pos as u64, e.to_string()))?;
    let sample_count = r.u32("sample count")? as usize;
    let mut samples = Vec::with_capacity(sample_count);
    for i in 0..sample_count {
        let what = format!("sample {i}");
        let fault_type = FaultType::from_code(r.u8(&what)?)
            .map_err(|e| Error::format(r.pos as u64 - 1, e.to_string()))?;
        let degree = r.u8(&what)?;
        let position = r.u16(&what)?;
        let seed_id = r.u32(&what)?;
        let label = FaultLabel::new(fault_type, degree, position)
            .map_err(|e| Error::format(r.pos as u64, e.to_string()))?;
        let mut values = Vec::with_capacity(grid_count);
        for _ in 0..grid_count {
            values.push(r.f32(&what)?);
        }
        let sweep = FraSweep::with_grid_id(values, grid.id(), grid.len())
            .map_err(|e| Error::format(r.pos as u64, e.to_string()))?;
        samples.push(Sample {
            sweep,
            label,
            seed_id,
        });
    }
    if r.pos != bytes.len() {
        return r.fail(format!("{} trailing bytes", bytes.len() - r.pos));
    }
    LabeledDataset::new(connection, winding, grid, samples)
        .map_err(|e| Error::format(r.pos as u64, e.to_string()))
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let bytes = fs::read(path)?;
    dataset_from_bytes(&bytes)
}

/// Formats a value with six significant digits.
fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (5 - mag).clamp(0, 17) as usize;
    format!("{v:.decimals$}")
}

/// Writes the CSV form: a header row naming the frequency columns, then one
/// sample per row with values at six significant digits.
pub fn export_csv(ds: &LabeledDataset, mut w: impl std::io::Write) -> Result<()> {
    let mut header = String::from("type,degree,position,seed");
    for f in ds.grid().points() {
        header.push_str(",f=");
        header.push_str(&sig6(*f));
    }
    writeln!(w, "{header}")?;
    for s in ds.samples() {
        let mut row = format!(
            "{},{},{},{}",
            s.label.fault_type, s.label.degree, s.label.position, s.seed_id
        );
        for v in s.sweep.values() {
            row.push(',');
            row.push_str(&sig6(*v as f64));
        }
        writeln!(w, "{row}")?;
    }
    Ok(())
}

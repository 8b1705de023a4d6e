//! File formats: field JSON, report JSON, and CSV, all with 17 significant digits.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::GridError;
use crate::radial::{RadialField, RadialGrid};

/// `{dim, K, R, values}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldFile {
    pub dim: u32,
    #[serde(rename = "K")]
    pub points: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    pub values: Vec<f64>,
}

impl From<&RadialField> for FieldFile {
    fn from(f: &RadialField) -> Self {
        let g = f.grid();
        Self {
            dim: g.dim().as_u32(),
            points: g.points(),
            radius: g.radius(),
            values: f.values().to_vec(),
        }
    }
}

impl TryFrom<FieldFile> for RadialField {
    type Error = GridError;

    fn try_from(f: FieldFile) -> Result<Self, GridError> {
        let grid = RadialGrid::new(f.dim, f.points, f.radius)?;
        RadialField::new(&grid, f.values)
    }
}

impl Serialize for RadialField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadialField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = FieldFile::deserialize(d)?;
        RadialField::try_from(file).map_err(serde::de::Error::custom)
    }
}

/// Decimal with 17 significant digits, enough to round-trip every `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Compact JSON whose floats are written by [`fmt_f64`].
struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("JSON output is UTF-8"))
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<(), crate::Error> {
    let mut text = to_json(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T, crate::Error> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// A CSV cell.
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    /// Empty cell for a check that does not apply.
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Num(x) => fmt_f64(*x),
            Self::Int(n) => n.to_string(),
            Self::Bool(b) => b.to_string(),
            Self::Empty => String::new(),
        }
    }
}

pub fn write_csv(
    path: impl AsRef<Path>,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<Cell>>,
) -> io::Result<()> {
    let mut out = io::BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()
}

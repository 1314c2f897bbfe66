//! Space files (JSON), travel time tables (CSV) and reports (JSON).
//!
//! JSON floats are written in the shortest form that parses back to the
//! same double, so files round-trip bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Validation};
use crate::spaces::SampledSpace;
use crate::travel_time::{MeasurementSet, TravelTimeData};

/// On-disk form of a finite metric space with its measurement set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceFile {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    #[serde(default)]
    pub measurement_set: Vec<usize>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub provenance: Value,
}

/// A space read back from disk.
#[derive(Debug, Clone)]
pub struct LoadedSpace {
    pub space: FiniteMetricSpace,
    /// `None` when the file lists no measurement set.
    pub sensors: Option<MeasurementSet>,
    pub provenance: Value,
}

impl SpaceFile {
    pub fn new(space: &FiniteMetricSpace, sensors: Option<&MeasurementSet>, provenance: Value) -> Self {
        SpaceFile {
            labels: (0..space.len()).map(|i| space.label(i)).collect(),
            dist: space.to_matrix(),
            measurement_set: sensors.map(|s| s.indices().to_vec()).unwrap_or_default(),
            provenance,
        }
    }

    pub fn from_sampled(sampled: &SampledSpace) -> Self {
        Self::new(&sampled.space, Some(&sampled.sensors), sampled.provenance.clone())
    }

    /// Validates the matrix (strictly) and the measurement set.
    pub fn load(self) -> Result<LoadedSpace> {
        if self.labels.len() != self.dist.len() {
            return Err(Error::LengthMismatch(self.labels.len(), self.dist.len()));
        }
        let space = FiniteMetricSpace::validate_with(&self.dist, Validation::Strict)?.with_labels(self.labels)?;
        let sensors = if self.measurement_set.is_empty() {
            None
        } else {
            Some(MeasurementSet::new(self.measurement_set, &space)?)
        };
        Ok(LoadedSpace { space, sensors, provenance: self.provenance })
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn read_space_file(path: impl AsRef<Path>) -> Result<LoadedSpace> {
    let text = fs::read_to_string(path)?;
    let file: SpaceFile = serde_json::from_str(&text)?;
    file.load()
}

pub fn write_space_file(path: impl AsRef<Path>, file: &SpaceFile) -> Result<()> {
    write_json(path, file)
}

/// Travel time table: a header of sensor labels, then one row per source.
/// Values carry 17 significant digits.
pub fn data_to_csv(data: &TravelTimeData) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(data.sensor_labels())?;
    for row in data.rows() {
        w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses a table written by [`data_to_csv`]. Sources are labelled by row
/// number.
pub fn data_from_csv(text: &str) -> Result<TravelTimeData> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let sensors: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|e| Error::Parameter(format!("bad number {f:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let sources = (0..rows.len()).map(|i| i.to_string()).collect();
    TravelTimeData::from_rows(rows, sources, sensors)
}

//! Point sets: one measure row per evaluated prompt list, loaded from run
//! directories or external CSV exports.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use steakhouse_measures::{MeasureId, MeasureRow};
use steakhouse_qd::{default_dimension, Algorithm, DimensionConfig, RunDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceTag {
    Planqd,
    Random,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub measures: MeasureRow,
    pub source: SourceTag,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<Point>,
}

#[derive(Debug, Error)]
pub enum PointsError {
    #[error("run error: {0}")]
    Run(#[from] steakhouse_qd::RunError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing measure column {0:?}")]
    MissingMeasure(String),
    #[error("bad value in column {column:?}: {value:?}")]
    BadValue { column: String, value: String },
}

impl PointSet {
    /// Points from a completed run directory: one per successful
    /// evaluation record.
    pub fn from_run_dir(dir: &Path) -> Result<PointSet, PointsError> {
        let records = RunDir::new(dir).read_evals()?;
        let points = records
            .into_iter()
            .filter(|r| !r.failed)
            .map(|r| Point {
                measures: r.measures,
                source: match r.algorithm {
                    Algorithm::PlanQd => SourceTag::Planqd,
                    Algorithm::RandomMutation => SourceTag::Random,
                },
            })
            .collect();
        Ok(PointSet { points })
    }

    /// Ingest an external CSV with the documented measure columns (header
    /// names from [`MeasureId::key`]); extra columns are ignored.
    pub fn from_csv(path: &Path) -> Result<PointSet, PointsError> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let col = |id: MeasureId| -> Result<usize, PointsError> {
            headers
                .iter()
                .position(|h| h == id.key())
                .ok_or_else(|| PointsError::MissingMeasure(id.key().to_string()))
        };
        let fitness = col(MeasureId::Fitness)?;
        let delay = col(MeasureId::AvgActionDelay)?;
        let contribution = col(MeasureId::PercentContribution)?;
        let specialization = col(MeasureId::Specialization)?;
        let mut diff_cols = Vec::new();
        for id in &MeasureId::PROJECTION[..9] {
            diff_cols.push(col(*id)?);
        }

        let mut points = Vec::new();
        for row in reader.records() {
            let row = row?;
            let parse = |i: usize| -> Result<f64, PointsError> {
                row.get(i)
                    .unwrap_or("")
                    .trim()
                    .parse()
                    .map_err(|_| PointsError::BadValue {
                        column: headers.get(i).unwrap_or("?").to_string(),
                        value: row.get(i).unwrap_or("").to_string(),
                    })
            };
            let mut diffs = [0.0; 9];
            for (slot, c) in diff_cols.iter().enumerate() {
                diffs[slot] = parse(*c)?;
            }
            points.push(Point {
                measures: MeasureRow {
                    fitness: parse(fitness)?,
                    avg_action_delay: parse(delay)?,
                    percent_contribution: parse(contribution)?,
                    specialization: parse(specialization)?,
                    workload_diffs: diffs,
                },
                source: SourceTag::External,
            });
        }
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A two-dimensional projection of the measure space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    pub x: DimensionConfig,
    pub y: DimensionConfig,
}

impl ProjectionConfig {
    /// Default ranges and bin counts for the measure pair.
    pub fn new(x: MeasureId, y: MeasureId) -> ProjectionConfig {
        assert_ne!(x, y, "projection measures must be distinct");
        ProjectionConfig {
            x: default_dimension(x),
            y: default_dimension(y),
        }
    }

    pub fn total_cells(&self) -> u64 {
        self.x.bins as u64 * self.y.bins as u64
    }

    pub fn swapped(&self) -> ProjectionConfig {
        ProjectionConfig {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

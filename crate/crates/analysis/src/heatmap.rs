//! Heatmap export: a CSV grid of per-cell best fitness plus a JSON sidecar
//! describing ranges, bins, and point sources.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::cell_max_fitness;
use crate::points::{PointSet, ProjectionConfig, SourceTag};

#[derive(Debug, Error)]
pub enum HeatmapError {
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed heatmap: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapMeta {
    pub projection: ProjectionConfig,
    pub points: usize,
    pub sources: BTreeMap<String, usize>,
}

/// The grid as exported: `grid[row][col]` with rows indexing the first
/// dimension's bins and columns the second's; empty cells are `None`.
pub type HeatmapGrid = Vec<Vec<Option<f64>>>;

pub fn heatmap_grid(points: &PointSet, proj: &ProjectionConfig) -> HeatmapGrid {
    let cells = cell_max_fitness(points, proj);
    let mut grid = vec![vec![None; proj.y.bins as usize]; proj.x.bins as usize];
    for ((x, y), fitness) in cells {
        grid[x as usize][y as usize] = Some(fitness);
    }
    grid
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

/// Write the CSV grid and its metadata sidecar.
pub fn export_heatmap(
    points: &PointSet,
    proj: &ProjectionConfig,
    out: &Path,
) -> Result<(), HeatmapError> {
    let io = |source: std::io::Error| HeatmapError::Io { path: out.to_path_buf(), source };
    let grid = heatmap_grid(points, proj);
    let mut text = String::new();
    for row in &grid {
        let cells: Vec<String> = row
            .iter()
            .map(|c| c.map(|f| f.to_string()).unwrap_or_default())
            .collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    if let Some(parent) = out.parent() {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(out, text).map_err(io)?;

    let mut sources: BTreeMap<String, usize> = BTreeMap::new();
    for p in &points.points {
        let key = match p.source {
            SourceTag::Planqd => "planqd",
            SourceTag::Random => "random",
            SourceTag::External => "external",
        };
        *sources.entry(key.to_string()).or_insert(0) += 1;
    }
    let meta = HeatmapMeta {
        projection: proj.clone(),
        points: points.len(),
        sources,
    };
    let meta_path = sidecar_path(out);
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta).unwrap()).map_err(
        |source| HeatmapError::Io { path: meta_path.clone(), source },
    )?;
    Ok(())
}

/// Re-import an exported grid (round-trip checks and downstream tooling).
pub fn import_heatmap(path: &Path) -> Result<HeatmapGrid, HeatmapError> {
    let text = std::fs::read_to_string(path).map_err(|source| HeatmapError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut grid = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let row: Result<Vec<Option<f64>>, HeatmapError> = line
            .split(',')
            .map(|cell| {
                let cell = cell.trim();
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>().map(Some).map_err(|_| {
                        HeatmapError::Malformed(format!("row {}: bad cell {:?}", i, cell))
                    })
                }
            })
            .collect();
        grid.push(row?);
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::Point;
    use steakhouse_measures::{MeasureId, MeasureRow};

    fn point(meat_grill: f64, dishes: f64, fitness: f64) -> Point {
        let mut diffs = [0.0; 9];
        diffs[4] = meat_grill;
        diffs[8] = dishes;
        Point {
            measures: MeasureRow {
                fitness,
                avg_action_delay: 0.0,
                percent_contribution: 0.0,
                specialization: 0.25,
                workload_diffs: diffs,
            },
            source: SourceTag::Planqd,
        }
    }

    fn proj() -> ProjectionConfig {
        ProjectionConfig::new(MeasureId::DiffMeatPlacedOnGrill, MeasureId::DiffDishesServed)
    }

    #[test]
    fn empty_set_exports_blank_grid_with_correct_shape() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("map.csv");
        export_heatmap(&PointSet::default(), &proj(), &out).unwrap();
        let grid = import_heatmap(&out).unwrap();
        assert_eq!(grid.len(), 17);
        assert!(grid.iter().all(|row| row.len() == 17));
        assert!(grid.iter().flatten().all(|c| c.is_none()));
        assert!(sidecar_path(&out).exists());
    }

    #[test]
    fn lower_bound_point_lands_in_cell_zero_zero() {
        let set = PointSet { points: vec![point(-8.0, -8.0, 100.0)] };
        let grid = heatmap_grid(&set, &proj());
        assert_eq!(grid[0][0], Some(100.0));
    }

    #[test]
    fn roundtrip_preserves_per_cell_max() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("map.csv");
        let set = PointSet {
            points: vec![
                point(0.0, 0.0, 120.0),
                point(0.0, 0.0, 80.0),
                point(3.0, -2.0, 40.5),
            ],
        };
        export_heatmap(&set, &proj(), &out).unwrap();
        assert_eq!(import_heatmap(&out).unwrap(), heatmap_grid(&set, &proj()));
    }

    #[test]
    fn swapping_measures_transposes_the_grid() {
        let set = PointSet {
            points: vec![point(3.0, -2.0, 10.0), point(-1.0, 5.0, 20.0), point(0.0, 0.0, 30.0)],
        };
        let p = proj();
        let grid = heatmap_grid(&set, &p);
        let swapped = heatmap_grid(&set, &p.swapped());
        for x in 0..17 {
            for y in 0..17 {
                assert_eq!(grid[x][y], swapped[y][x]);
            }
        }
    }
}

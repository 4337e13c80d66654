//! The elite archive: a uniform discretization of the configured measure
//! space holding at most one prompt list per cell, replaced only on strict
//! objective improvement.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use steakhouse_harness::PromptList;
use steakhouse_measures::{MeasureId, MeasureRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionConfig {
    pub measure: MeasureId,
    pub lower: f64,
    pub upper: f64,
    pub bins: u32,
}

/// Default projection range for a measure: workload diffs span [-8, 8] in
/// 17 unit bins; the teamwork measures use their natural ranges.
pub fn default_dimension(measure: MeasureId) -> DimensionConfig {
    let (lower, upper, bins) = match measure {
        MeasureId::AvgActionDelay => (0.0, 100.0, 20),
        MeasureId::PercentContribution => (0.0, 0.5, 10),
        MeasureId::Specialization => (0.25, 1.0, 10),
        MeasureId::Fitness => (0.0, 1000.0, 20),
        _ => (-8.0, 8.0, 17),
    };
    DimensionConfig { measure, lower, upper, bins }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveConfig {
    pub dims: Vec<DimensionConfig>,
}

impl ArchiveConfig {
    pub fn from_measures(measures: &[MeasureId]) -> ArchiveConfig {
        ArchiveConfig {
            dims: measures.iter().map(|m| default_dimension(*m)).collect(),
        }
    }

    /// The default three-dimensional search archive.
    pub fn default_qd() -> ArchiveConfig {
        ArchiveConfig::from_measures(&MeasureId::QD_DEFAULT)
    }

    pub fn total_cells(&self) -> u64 {
        self.dims.iter().map(|d| d.bins as u64).product()
    }

    /// Discretize a measure row into a cell index, clipping out-of-range
    /// values into the boundary bins.
    pub fn cell_index(&self, measures: &MeasureRow) -> Vec<u32> {
        self.dims
            .iter()
            .map(|d| bin_value(measures.get(d.measure), d.lower, d.upper, d.bins))
            .collect()
    }
}

/// Uniform binning with clipping. The upper bound itself lands in the last
/// bin.
pub fn bin_value(value: f64, lower: f64, upper: f64, bins: u32) -> u32 {
    debug_assert!(bins >= 1 && lower < upper);
    let frac = (value - lower) / (upper - lower);
    let bin = (frac * bins as f64).floor();
    if bin < 0.0 {
        0
    } else if bin >= bins as f64 {
        bins - 1
    } else {
        bin as u32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatResult {
    pub seed: u64,
    pub objective: f64,
    pub measures: steakhouse_measures::MeasureVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliteProvenance {
    pub algorithm: String,
    pub iteration: u32,
    pub slot: u32,
    pub parent_cell: Option<Vec<u32>>,
    pub direction: Option<Vec<i8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Elite {
    pub cell: Vec<u32>,
    pub prompts: PromptList,
    pub objective: f64,
    pub measures: MeasureRow,
    pub per_repeat: Vec<RepeatResult>,
    pub provenance: EliteProvenance,
    /// Episode log paths relative to the run directory, when persisted.
    pub log_files: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InsertOutcome {
    Inserted,
    Replaced,
    Rejected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    pub config: ArchiveConfig,
    cells: BTreeMap<Vec<u32>, Elite>,
}

/// Serialized form: cells as a sorted array (JSON maps need string keys).
#[derive(Serialize, Deserialize)]
struct ArchiveJson {
    config: ArchiveConfig,
    cells: Vec<Elite>,
}

impl Archive {
    pub fn new(config: ArchiveConfig) -> Archive {
        Archive {
            config,
            cells: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Fraction of cells filled.
    pub fn coverage(&self) -> f64 {
        self.cells.len() as f64 / self.config.total_cells() as f64
    }

    /// Sum of elite objectives over filled cells.
    pub fn qd_score(&self) -> f64 {
        self.cells.values().map(|e| e.objective).sum()
    }

    pub fn get(&self, cell: &[u32]) -> Option<&Elite> {
        self.cells.get(cell)
    }

    /// Elites in cell order.
    pub fn elites(&self) -> impl Iterator<Item = &Elite> {
        self.cells.values()
    }

    /// Insert into the candidate's cell: empty cells accept, occupied cells
    /// are replaced only on strictly higher objective (ties reject).
    pub fn insert(&mut self, candidate: Elite) -> InsertOutcome {
        debug_assert_eq!(candidate.cell.len(), self.config.dims.len());
        match self.cells.get(&candidate.cell) {
            None => {
                self.cells.insert(candidate.cell.clone(), candidate);
                InsertOutcome::Inserted
            }
            Some(existing) if candidate.objective > existing.objective => {
                self.cells.insert(candidate.cell.clone(), candidate);
                InsertOutcome::Replaced
            }
            Some(_) => InsertOutcome::Rejected,
        }
    }

    pub fn to_json(&self) -> String {
        let json = ArchiveJson {
            config: self.config.clone(),
            cells: self.cells.values().cloned().collect(),
        };
        serde_json::to_string_pretty(&json).expect("archive serializes")
    }

    pub fn from_json(text: &str) -> Result<Archive, serde_json::Error> {
        let json: ArchiveJson = serde_json::from_str(text)?;
        let mut archive = Archive::new(json.config);
        for elite in json.cells {
            archive.cells.insert(elite.cell.clone(), elite);
        }
        Ok(archive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use steakhouse_harness::Personality;

    fn row(diffs: [f64; 9]) -> MeasureRow {
        MeasureRow {
            fitness: 0.0,
            avg_action_delay: 0.0,
            percent_contribution: 0.0,
            specialization: 0.25,
            workload_diffs: diffs,
        }
    }

    fn elite(cell: Vec<u32>, objective: f64) -> Elite {
        Elite {
            cell,
            prompts: PromptList([
                Personality::initial("a"),
                Personality::initial("b"),
            ]),
            objective,
            measures: row([0.0; 9]),
            per_repeat: vec![],
            provenance: EliteProvenance {
                algorithm: "planqd".into(),
                iteration: 0,
                slot: 0,
                parent_cell: None,
                direction: None,
            },
            log_files: vec![],
        }
    }

    #[test]
    fn binning_boundaries_and_clipping() {
        // Lower bound maps to bin 0; above the upper bound clips to the last.
        assert_eq!(bin_value(-8.0, -8.0, 8.0, 17), 0);
        assert_eq!(bin_value(9.5, -8.0, 8.0, 17), 16);
        assert_eq!(bin_value(-100.0, -8.0, 8.0, 17), 0);
        assert_eq!(bin_value(8.0, -8.0, 8.0, 17), 16);
        // Hand-computed: (3-(-8))/16*17 = 11.6875 -> bin 11.
        assert_eq!(bin_value(3.0, -8.0, 8.0, 17), 11);
        // Zero diff lands in the center bin of 17.
        assert_eq!(bin_value(0.0, -8.0, 8.0, 17), 8);
    }

    #[test]
    fn cell_index_spans_dimensions() {
        let config = ArchiveConfig::default_qd();
        let mut diffs = [0.0; 9];
        diffs[4] = 3.0; // meat on grill
        diffs[8] = -8.0; // dishes served
        diffs[2] = 100.0; // onions chopped, clips
        assert_eq!(config.cell_index(&row(diffs)), vec![11, 0, 16]);
    }

    #[test]
    fn insert_semantics() {
        let mut archive = Archive::new(ArchiveConfig::default_qd());
        assert_eq!(archive.insert(elite(vec![0, 0, 0], 200.0)), InsertOutcome::Inserted);
        assert_eq!(archive.insert(elite(vec![0, 0, 0], 150.0)), InsertOutcome::Rejected);
        assert_eq!(archive.insert(elite(vec![0, 0, 0], 200.0)), InsertOutcome::Rejected);
        assert_eq!(archive.insert(elite(vec![0, 0, 0], 200.5)), InsertOutcome::Replaced);
        assert_eq!(archive.insert(elite(vec![1, 0, 0], 10.0)), InsertOutcome::Inserted);
        assert_eq!(archive.len(), 2);
        assert_eq!(archive.get(&[0, 0, 0]).unwrap().objective, 200.5);
        assert_eq!(archive.qd_score(), 210.5);
    }

    #[test]
    fn archive_json_roundtrip() {
        let mut archive = Archive::new(ArchiveConfig::default_qd());
        archive.insert(elite(vec![1, 2, 3], 42.0));
        archive.insert(elite(vec![0, 2, 3], 7.0));
        let restored = Archive::from_json(&archive.to_json()).unwrap();
        assert_eq!(archive, restored);
    }
}

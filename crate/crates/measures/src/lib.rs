//! Measures over episode logs.
//!
//! Fitness is the (optionally discounted) sum of delivery rewards; average
//! action delay is the mean gap between interacts pooled over both agents;
//! percent contribution and specialization are computed from completed
//! high-level actions; workload differences count the nine sub-tasks per
//! player and subtract.

use serde::{Deserialize, Serialize};

use steakhouse_harness::{CompletedRecord, EpisodeLog};
use steakhouse_sim::{event_subtask, EventKind, HlaTemplate, ItemKind, Subtask, DEFAULT_HORIZON};

/// One measurable quantity. The twelve projection measures (nine workload
/// diffs plus the three teamwork measures) span the analysis space;
/// fitness is the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasureId {
    DiffOnionsPicked,
    DiffOnionsPlacedOnBoard,
    DiffOnionsChopped,
    DiffMeatPicked,
    DiffMeatPlacedOnGrill,
    DiffDirtyPlatesPicked,
    DiffCleanPlatesPicked,
    DiffPlatesPlacedInSink,
    DiffDishesServed,
    AvgActionDelay,
    PercentContribution,
    Specialization,
    Fitness,
}

impl MeasureId {
    /// The twelve measures used for coverage projections, in fixed order.
    pub const PROJECTION: [MeasureId; 12] = [
        MeasureId::DiffOnionsPicked,
        MeasureId::DiffOnionsPlacedOnBoard,
        MeasureId::DiffOnionsChopped,
        MeasureId::DiffMeatPicked,
        MeasureId::DiffMeatPlacedOnGrill,
        MeasureId::DiffDirtyPlatesPicked,
        MeasureId::DiffCleanPlatesPicked,
        MeasureId::DiffPlatesPlacedInSink,
        MeasureId::DiffDishesServed,
        MeasureId::AvgActionDelay,
        MeasureId::PercentContribution,
        MeasureId::Specialization,
    ];

    /// The measures diversified by default during search.
    pub const QD_DEFAULT: [MeasureId; 3] = [
        MeasureId::DiffMeatPlacedOnGrill,
        MeasureId::DiffDishesServed,
        MeasureId::DiffOnionsChopped,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            MeasureId::DiffOnionsPicked => "diff_onions_picked",
            MeasureId::DiffOnionsPlacedOnBoard => "diff_onions_placed_on_board",
            MeasureId::DiffOnionsChopped => "diff_onions_chopped",
            MeasureId::DiffMeatPicked => "diff_meat_picked",
            MeasureId::DiffMeatPlacedOnGrill => "diff_meat_placed_on_grill",
            MeasureId::DiffDirtyPlatesPicked => "diff_dirty_plates_picked",
            MeasureId::DiffCleanPlatesPicked => "diff_clean_plates_picked",
            MeasureId::DiffPlatesPlacedInSink => "diff_plates_placed_in_sink",
            MeasureId::DiffDishesServed => "diff_dishes_served",
            MeasureId::AvgActionDelay => "avg_action_delay",
            MeasureId::PercentContribution => "percent_contribution",
            MeasureId::Specialization => "specialization",
            MeasureId::Fitness => "fitness",
        }
    }

    pub fn from_key(key: &str) -> Option<MeasureId> {
        MeasureId::PROJECTION
            .iter()
            .chain([MeasureId::Fitness].iter())
            .copied()
            .find(|m| m.key() == key)
    }

    pub fn from_subtask(subtask: Subtask) -> MeasureId {
        MeasureId::PROJECTION[subtask.index()]
    }

    pub fn subtask(&self) -> Option<Subtask> {
        MeasureId::PROJECTION
            .iter()
            .position(|m| m == self)
            .filter(|i| *i < 9)
            .map(|i| Subtask::ALL[i])
    }
}

/// The full per-episode measure row. Workload diffs are player 1 minus
/// player 2, in the fixed [`Subtask::ALL`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureVector {
    pub fitness: f64,
    pub avg_action_delay: f64,
    pub percent_contribution: f64,
    pub specialization: f64,
    pub workload_diffs: [i64; 9],
}

impl MeasureVector {
    pub fn get(&self, id: MeasureId) -> f64 {
        match id {
            MeasureId::Fitness => self.fitness,
            MeasureId::AvgActionDelay => self.avg_action_delay,
            MeasureId::PercentContribution => self.percent_contribution,
            MeasureId::Specialization => self.specialization,
            diff => self.workload_diffs[diff.subtask().expect("workload measure").index()] as f64,
        }
    }

    /// CSV column order: fitness, the three teamwork measures, then the
    /// nine workload diffs.
    pub fn csv_header() -> String {
        let mut cols = vec![
            MeasureId::Fitness.key(),
            MeasureId::AvgActionDelay.key(),
            MeasureId::PercentContribution.key(),
            MeasureId::Specialization.key(),
        ];
        cols.extend(MeasureId::PROJECTION[..9].iter().map(|m| m.key()));
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![
            self.fitness.to_string(),
            self.avg_action_delay.to_string(),
            self.percent_contribution.to_string(),
            self.specialization.to_string(),
        ];
        cols.extend(self.workload_diffs.iter().map(|d| d.to_string()));
        cols.join(",")
    }
}

/// A measure row with every component as a float: the shape of per-repeat
/// aggregates (medians of integer workload diffs can be half-integers) and
/// of analysis points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRow {
    pub fitness: f64,
    pub avg_action_delay: f64,
    pub percent_contribution: f64,
    pub specialization: f64,
    pub workload_diffs: [f64; 9],
}

impl MeasureRow {
    pub fn get(&self, id: MeasureId) -> f64 {
        match id {
            MeasureId::Fitness => self.fitness,
            MeasureId::AvgActionDelay => self.avg_action_delay,
            MeasureId::PercentContribution => self.percent_contribution,
            MeasureId::Specialization => self.specialization,
            diff => self.workload_diffs[diff.subtask().expect("workload measure").index()],
        }
    }
}

impl From<&MeasureVector> for MeasureRow {
    fn from(v: &MeasureVector) -> MeasureRow {
        let mut diffs = [0.0; 9];
        for (i, d) in v.workload_diffs.iter().enumerate() {
            diffs[i] = *d as f64;
        }
        MeasureRow {
            fitness: v.fitness,
            avg_action_delay: v.avg_action_delay,
            percent_contribution: v.percent_contribution,
            specialization: v.specialization,
            workload_diffs: diffs,
        }
    }
}

/// Median with the even-count convention: mean of the two middle values.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Component-wise median across repeats. The result may combine components
/// from different episodes; that is the intended aggregation.
pub fn median_row(repeats: &[MeasureVector]) -> MeasureRow {
    let collect = |f: &dyn Fn(&MeasureVector) -> f64| -> Vec<f64> {
        repeats.iter().map(f).collect()
    };
    let mut diffs = [0.0; 9];
    for (i, slot) in diffs.iter_mut().enumerate() {
        *slot = median(&collect(&|v| v.workload_diffs[i] as f64));
    }
    MeasureRow {
        fitness: median(&collect(&|v| v.fitness)),
        avg_action_delay: median(&collect(&|v| v.avg_action_delay)),
        percent_contribution: median(&collect(&|v| v.percent_contribution)),
        specialization: median(&collect(&|v| v.specialization)),
        workload_diffs: diffs,
    }
}

/// Discounted sum of delivery rewards.
pub fn fitness(log: &EpisodeLog, gamma: f64) -> f64 {
    log.events()
        .filter_map(|e| match e.kind {
            EventKind::Deliver { reward, .. } => Some(reward as f64 * gamma.powi(e.t as i32)),
            _ => None,
        })
        .sum()
}

/// Mean number of timesteps between interacts conducted by either agent.
/// With fewer than two interacts there is no gap to average; the episode
/// horizon is returned so the measure stays total and bounded.
pub fn avg_action_delay(log: &EpisodeLog) -> f64 {
    let mut times: Vec<u32> = log
        .events()
        .filter(|e| e.kind.is_interact())
        .map(|e| e.t)
        .collect();
    times.sort_unstable();
    if times.len() < 2 {
        return log.header().map(|h| h.horizon).unwrap_or(DEFAULT_HORIZON) as f64;
    }
    let total: u64 = times.windows(2).map(|w| (w[1] - w[0]) as u64).sum();
    total as f64 / (times.len() - 1) as f64
}

/// Completed actions that count toward dish attribution and grouping;
/// waiting is excluded everywhere.
fn working_actions(log: &EpisodeLog) -> impl Iterator<Item = &CompletedRecord> {
    log.completed().filter(|c| c.template != HlaTemplate::Wait)
}

/// Mean over delivered dishes of min(n_P1, n_P2) / (n_P1 + n_P2), where
/// n_Pj counts player j's completed actions whose item lineage ends in the
/// dish. Zero dishes yield zero.
pub fn percent_contribution(log: &EpisodeLog) -> f64 {
    let dishes: Vec<&Vec<u32>> = log
        .events()
        .filter_map(|e| match &e.kind {
            EventKind::Deliver { lineage, .. } => Some(lineage),
            _ => None,
        })
        .collect();
    if dishes.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for lineage in &dishes {
        let mut counts = [0u32; 2];
        for action in working_actions(log) {
            if action.lineage.iter().any(|id| lineage.contains(id)) {
                counts[action.agent] += 1;
            }
        }
        let sum = counts[0] + counts[1];
        if sum > 0 {
            total += counts[0].min(counts[1]) as f64 / sum as f64;
        }
    }
    total / dishes.len() as f64
}

/// The four action groups used by the specialization measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionGroup {
    Ingredient,
    Plate,
    DishCreation,
    Delivery,
}

/// Group membership for a completed action. Counter transfers follow the
/// item being moved.
pub fn action_group(record: &CompletedRecord) -> Option<ActionGroup> {
    use HlaTemplate::*;
    match record.template {
        Wait => None,
        PickUpMeat | PickUpOnion | PlaceMeatOnGrill | PlaceOnionOnBoard | ChopOnion => {
            Some(ActionGroup::Ingredient)
        }
        PickUpDirtyPlate | PlaceDirtyPlateInSink | RinseDirtyPlate | PickUpCleanPlate => {
            Some(ActionGroup::Plate)
        }
        PlateSteakFromGrill | AddGarnish => Some(ActionGroup::DishCreation),
        DeliverSteak | DeliverSteakOnion => Some(ActionGroup::Delivery),
        PickUpFromCounter | PlaceOnNearestCounter | PlaceOnSharedCounter => {
            Some(match record.item {
                Some(ItemKind::DirtyPlate) | Some(ItemKind::CleanPlate) => ActionGroup::Plate,
                Some(ItemKind::SteakDish) | Some(ItemKind::SteakOnionDish) => {
                    ActionGroup::DishCreation
                }
                _ => ActionGroup::Ingredient,
            })
        }
    }
}

/// Mean over players of (largest action-group count) / (total actions).
/// A player with no completed actions scores the 0.25 lower bound.
pub fn specialization(log: &EpisodeLog) -> f64 {
    let mut counts = [[0u32; 4]; 2];
    for action in working_actions(log) {
        if let Some(group) = action_group(action) {
            let g = match group {
                ActionGroup::Ingredient => 0,
                ActionGroup::Plate => 1,
                ActionGroup::DishCreation => 2,
                ActionGroup::Delivery => 3,
            };
            counts[action.agent][g] += 1;
        }
    }
    let per_player: Vec<f64> = counts
        .iter()
        .map(|c| {
            let total: u32 = c.iter().sum();
            if total == 0 {
                0.25
            } else {
                *c.iter().max().unwrap() as f64 / total as f64
            }
        })
        .collect();
    per_player.iter().sum::<f64>() / per_player.len() as f64
}

/// Player-1 count minus player-2 count for each of the nine sub-tasks.
pub fn workload_diffs(log: &EpisodeLog) -> [i64; 9] {
    let mut counts = [[0i64; 9]; 2];
    for event in log.events() {
        if let Some(subtask) = event_subtask(&event.kind) {
            counts[event.agent][subtask.index()] += 1;
        }
    }
    let mut diffs = [0i64; 9];
    for i in 0..9 {
        diffs[i] = counts[0][i] - counts[1][i];
    }
    diffs
}

/// All measures for one episode.
pub fn measure_vector(log: &EpisodeLog, gamma: f64) -> MeasureVector {
    MeasureVector {
        fitness: fitness(log, gamma),
        avg_action_delay: avg_action_delay(log),
        percent_contribution: percent_contribution(log),
        specialization: specialization(log),
        workload_diffs: workload_diffs(log),
    }
}

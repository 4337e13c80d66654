//! Post-hoc analysis over persisted runs: coverage and QD-score on 2D
//! measure projections, pairwise coverage reports, communication trend
//! tables, proportion tests, heatmap export, and episode replay.

pub mod heatmap;
pub mod metrics;
pub mod points;
pub mod replay;
pub mod report;
pub mod stats;

pub use heatmap::{export_heatmap, heatmap_grid, import_heatmap, HeatmapError, HeatmapGrid};
pub use metrics::{cell_max_fitness, coverage, qd_score};
pub use points::{Point, PointSet, PointsError, ProjectionConfig, SourceTag};
pub use replay::{replay_frames, transcript, ReplayError};
pub use report::{
    pairwise_coverage_report, trend_table, trend_table_to_text, PairGroup, PairRow,
    PairwiseReport, TrendRow,
};
pub use stats::{proportion_test, proportion_test_exact, StatsError};

//! The pairwise coverage report over all measure-pair projections, and the
//! communication trend table.

use serde::{Deserialize, Serialize};

use steakhouse_measures::MeasureId;

use crate::metrics::{coverage, qd_score};
use crate::points::{PointSet, ProjectionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairGroup {
    /// Both measures were explicitly diversified during the search.
    Qd,
    /// Neither measure was diversified.
    NonQd,
    /// Exactly one of the two was diversified.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub x: MeasureId,
    pub y: MeasureId,
    pub group: PairGroup,
    pub coverage: f64,
    pub qd_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseReport {
    pub rows: Vec<PairRow>,
}

/// Coverage and QD-score for every distinct pair of the twelve projection
/// measures, grouped by QD-measure membership.
pub fn pairwise_coverage_report(points: &PointSet, qd_measures: &[MeasureId]) -> PairwiseReport {
    let all = MeasureId::PROJECTION;
    let mut rows = Vec::new();
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            let (x, y) = (all[i], all[j]);
            let in_qd = |m: &MeasureId| qd_measures.contains(m);
            let group = match (in_qd(&x), in_qd(&y)) {
                (true, true) => PairGroup::Qd,
                (false, false) => PairGroup::NonQd,
                _ => PairGroup::Mixed,
            };
            let proj = ProjectionConfig::new(x, y);
            rows.push(PairRow {
                x,
                y,
                group,
                coverage: coverage(points, &proj),
                qd_score: qd_score(points, &proj),
            });
        }
    }
    PairwiseReport { rows }
}

impl PairwiseReport {
    pub fn rows_in(&self, group: PairGroup) -> impl Iterator<Item = &PairRow> {
        self.rows.iter().filter(move |r| r.group == group)
    }

    pub fn mean_coverage(&self, group: PairGroup) -> f64 {
        let rows: Vec<&PairRow> = self.rows_in(group).collect();
        rows.iter().map(|r| r.coverage).sum::<f64>() / rows.len() as f64
    }

    pub fn mean_qd_score(&self, group: PairGroup) -> f64 {
        let rows: Vec<&PairRow> = self.rows_in(group).collect();
        rows.iter().map(|r| r.qd_score).sum::<f64>() / rows.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,group,coverage,qd_score\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:?},{},{}\n",
                r.x.key(),
                r.y.key(),
                r.group,
                r.coverage,
                r.qd_score
            ));
        }
        out
    }
}

/// One line of the communication trend table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub metric: MeasureId,
    pub mean_a: f64,
    pub mean_b: f64,
    /// 100 * (mean_a - mean_b) / mean_b; undefined when mean_b is zero.
    pub percent_diff: Option<f64>,
}

/// Percentage difference in the four teamwork metrics between two point
/// sets; by convention A carries communication and B does not.
pub fn trend_table(a: &PointSet, b: &PointSet) -> Vec<TrendRow> {
    let metrics = [
        MeasureId::Fitness,
        MeasureId::AvgActionDelay,
        MeasureId::PercentContribution,
        MeasureId::Specialization,
    ];
    let mean = |set: &PointSet, m: MeasureId| -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        set.points.iter().map(|p| p.measures.get(m)).sum::<f64>() / set.len() as f64
    };
    metrics
        .iter()
        .map(|m| {
            let mean_a = mean(a, *m);
            let mean_b = mean(b, *m);
            TrendRow {
                metric: *m,
                mean_a,
                mean_b,
                percent_diff: (mean_b != 0.0).then(|| 100.0 * (mean_a - mean_b) / mean_b),
            }
        })
        .collect()
}

pub fn trend_table_to_text(rows: &[TrendRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let diff = match r.percent_diff {
            Some(d) => format!("{:+.1}%", d),
            None => "undefined".to_string(),
        };
        out.push_str(&format!(
            "{:<22} {:>12.3} {:>12.3} {:>12}\n",
            r.metric.key(),
            r.mean_a,
            r.mean_b,
            diff
        ));
    }
    out
}

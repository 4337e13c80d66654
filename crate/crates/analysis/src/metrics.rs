//! Coverage and QD-score over 2D projections.

use std::collections::BTreeMap;

use steakhouse_qd::bin_value;

use crate::points::{PointSet, ProjectionConfig};

pub(crate) fn cell_of(
    point: &crate::points::Point,
    proj: &ProjectionConfig,
) -> (u32, u32) {
    (
        bin_value(point.measures.get(proj.x.measure), proj.x.lower, proj.x.upper, proj.x.bins),
        bin_value(point.measures.get(proj.y.measure), proj.y.lower, proj.y.upper, proj.y.bins),
    )
}

/// Per-cell maximum fitness over the binned points.
pub fn cell_max_fitness(points: &PointSet, proj: &ProjectionConfig) -> BTreeMap<(u32, u32), f64> {
    let mut cells: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for point in &points.points {
        let cell = cell_of(point, proj);
        let fitness = point.measures.fitness;
        cells
            .entry(cell)
            .and_modify(|best| *best = best.max(fitness))
            .or_insert(fitness);
    }
    cells
}

/// Fraction of projection cells containing at least one point.
pub fn coverage(points: &PointSet, proj: &ProjectionConfig) -> f64 {
    cell_max_fitness(points, proj).len() as f64 / proj.total_cells() as f64
}

/// Sum over filled cells of the best fitness in the cell. Fitness must be
/// nonnegative for the score to be monotone under adding points.
pub fn qd_score(points: &PointSet, proj: &ProjectionConfig) -> f64 {
    cell_max_fitness(points, proj).values().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{Point, SourceTag};
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
    fn empty_set_scores_zero() {
        let empty = PointSet::default();
        assert_eq!(coverage(&empty, &proj()), 0.0);
        assert_eq!(qd_score(&empty, &proj()), 0.0);
    }

    #[test]
    fn one_cell_covers_one_over_total() {
        let set = PointSet { points: vec![point(0.0, 0.0, 100.0); 5] };
        assert_eq!(coverage(&set, &proj()), 1.0 / (17.0 * 17.0));
    }

    #[test]
    fn qd_score_takes_per_cell_max_and_adds_across_cells() {
        let set = PointSet {
            points: vec![point(0.0, 0.0, 100.0), point(0.0, 0.0, 220.0)],
        };
        assert_eq!(qd_score(&set, &proj()), 220.0);

        let set = PointSet {
            points: (0..5).map(|i| point(i as f64, 0.0, 100.0)).collect(),
        };
        assert_eq!(qd_score(&set, &proj()), 500.0);
    }

    #[test]
    fn coverage_is_bounded_by_point_count() {
        let set = PointSet {
            points: (0..100).map(|i| point((i % 17) as f64 - 8.0, (i / 17) as f64 - 8.0, 1.0)).collect(),
        };
        assert!(coverage(&set, &proj()) <= 100.0 / 289.0);
    }

    #[test]
    fn duplication_and_permutation_do_not_change_metrics() {
        let mut points: Vec<Point> = (0..10).map(|i| point(i as f64 - 5.0, 1.0, i as f64)).collect();
        let set = PointSet { points: points.clone() };
        let c = coverage(&set, &proj());
        let q = qd_score(&set, &proj());
        points.reverse();
        points.extend(points.clone());
        let shuffled = PointSet { points };
        assert_eq!(coverage(&shuffled, &proj()), c);
        assert_eq!(qd_score(&shuffled, &proj()), q);
    }
}

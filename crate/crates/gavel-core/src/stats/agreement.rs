//! Krippendorff's alpha over a units-by-raters grid with missing ratings.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use serde::{Deserialize, Serialize};

use super::StatsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Cumulative-rank distance squared.
    Ordinal,
    /// Squared difference.
    Interval,
}

/// Ratings grid: `values[unit][rater]`, `None` where a rater skipped a unit.
#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityMatrix {
    pub units: Vec<String>,
    pub raters: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
    pub level: Level,
}

impl ReliabilityMatrix {
    pub fn new(
        units: Vec<String>,
        raters: Vec<String>,
        values: Vec<Vec<Option<f64>>>,
        level: Level,
    ) -> Result<Self, StatsError> {
        if raters.len() < 2 {
            return Err(StatsError::MatrixShape { detail: "need at least 2 raters" });
        }
        if values.len() != units.len() {
            return Err(StatsError::MatrixShape { detail: "one row per unit required" });
        }
        if values.iter().any(|row| row.len() != raters.len()) {
            return Err(StatsError::MatrixShape { detail: "one column per rater required" });
        }
        if values
            .iter()
            .flatten()
            .flatten()
            .any(|v| !v.is_finite())
        {
            return Err(StatsError::NonFiniteValue);
        }
        if !values.iter().any(|row| row.iter().flatten().count() >= 2) {
            return Err(StatsError::MatrixShape {
                detail: "need at least one unit with 2+ ratings",
            });
        }
        Ok(ReliabilityMatrix { units, raters, values, level })
    }
}

const CATEGORY_EPS: f64 = 1e-9;

/// 1 - D_observed / D_expected via the coincidence matrix. Units with
/// fewer than two ratings are excluded.
pub fn krippendorff_alpha(m: &ReliabilityMatrix) -> Result<f64, StatsError> {
    // Categories: distinct rating values, tolerance-deduplicated.
    let mut cats: Vec<f64> = m.values.iter().flatten().flatten().copied().collect();
    cats.sort_unstable_by(f64::total_cmp);
    cats.dedup_by(|a, b| (*a - *b).abs() < CATEGORY_EPS);
    let k = cats.len();
    if k < 2 {
        return Err(StatsError::DegenerateData);
    }
    let cat_of = |v: f64| -> usize {
        cats.iter()
            .position(|&c| (c - v).abs() < CATEGORY_EPS)
            .expect("rating matches a collected category")
    };

    // Coincidence matrix: each pairable unit contributes its ordered
    // rating pairs, weighted 1/(m_u - 1).
    let mut coincidence = alloc::vec![alloc::vec![0.0f64; k]; k];
    for row in &m.values {
        let ratings: Vec<f64> = row.iter().flatten().copied().collect();
        let m_u = ratings.len();
        if m_u < 2 {
            continue;
        }
        let w = 1.0 / (m_u as f64 - 1.0);
        for (i, &a) in ratings.iter().enumerate() {
            for (j, &b) in ratings.iter().enumerate() {
                if i != j {
                    coincidence[cat_of(a)][cat_of(b)] += w;
                }
            }
        }
    }

    let n_c: Vec<f64> = coincidence
        .iter()
        .map(|row| super::stable_sum(row.iter().copied()))
        .collect();
    let n_total = super::stable_sum(n_c.iter().copied());

    let delta_sq = |c: usize, d: usize| -> f64 {
        match m.level {
            Level::Interval => {
                let diff = cats[c] - cats[d];
                diff * diff
            }
            Level::Ordinal => {
                // Cumulative coincidence marginals between the two ranks,
                // minus half of each endpoint.
                let span = super::stable_sum((c..=d).map(|g| n_c[g]));
                let v = span - (n_c[c] + n_c[d]) / 2.0;
                v * v
            }
        }
    };

    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in (c + 1)..k {
            let dsq = delta_sq(c, d);
            observed += coincidence[c][d] * dsq;
            expected += n_c[c] * n_c[d] * dsq;
        }
    }
    if expected <= 0.0 {
        return Err(StatsError::DegenerateData);
    }
    Ok(1.0 - (n_total - 1.0) * observed / expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn matrix(values: Vec<Vec<Option<f64>>>, level: Level) -> ReliabilityMatrix {
        let units = (0..values.len()).map(|i| alloc::format!("u{i}")).collect();
        let raters = (0..values[0].len()).map(|i| alloc::format!("r{i}")).collect();
        ReliabilityMatrix::new(units, raters, values, level).unwrap()
    }

    fn grid(rows: &[&[f64]]) -> Vec<Vec<Option<f64>>> {
        rows.iter()
            .map(|row| row.iter().map(|&v| Some(v)).collect())
            .collect()
    }

    #[test]
    fn perfect_agreement_is_exactly_one() {
        for level in [Level::Interval, Level::Ordinal] {
            let m = matrix(grid(&[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]]), level);
            assert_eq!(krippendorff_alpha(&m).unwrap(), 1.0);
        }
    }

    // Hand-worked coincidence-matrix fixture: 2 raters, 4 units, interval
    // ratings [[1,1],[2,2],[3,3],[4,5]].
    // Only off-diagonal coincidence is o(4,5) = 1 (each direction), so
    // sum_{c<d} o*delta = 1. Marginals n = [2,2,2,1,1], n_total = 8,
    // sum_{c<d} n_c n_d delta = 111, alpha = 1 - 7*1/111 = 104/111.
    #[test]
    fn interval_fixture_matches_hand_computation() {
        let m = matrix(
            grid(&[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0], &[4.0, 5.0]]),
            Level::Interval,
        );
        assert_abs_diff_eq!(krippendorff_alpha(&m).unwrap(), 104.0 / 111.0, epsilon = 1e-9);
    }

    // Values recomputed with the direct pairwise-disagreement formula,
    // a different algorithm from the coincidence-matrix path used here.
    #[test]
    fn ordinal_fixture_matches_direct_formula() {
        let rows: &[&[f64]] =
            &[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 4.0], &[4.0, 4.0], &[4.0, 5.0]];
        let m_o = matrix(grid(rows), Level::Ordinal);
        assert_abs_diff_eq!(
            krippendorff_alpha(&m_o).unwrap(),
            0.8529411764705882,
            epsilon = 1e-9
        );
        let m_i = matrix(grid(rows), Level::Interval);
        assert_abs_diff_eq!(krippendorff_alpha(&m_i).unwrap(), 0.9, epsilon = 1e-9);
    }

    // One rater constant 3, the other alternating 1/5 over four units.
    // Direct formula: coincidences o(1,3) = o(3,5) = 2 per direction,
    // n = [2,4,2], interval deltas (1,3)=4 (3,5)=4 (1,5)=16,
    // D-numerator = 2*4 + 2*4 = 16, denominator = 8*4 + 8*4 + 4*16 = 128,
    // alpha = 1 - 7*16/128 = 0.125.
    #[test]
    fn constant_vs_alternating_matches_direct_formula() {
        let m = matrix(
            grid(&[&[3.0, 1.0], &[3.0, 5.0], &[3.0, 1.0], &[3.0, 5.0]]),
            Level::Interval,
        );
        assert_abs_diff_eq!(krippendorff_alpha(&m).unwrap(), 0.125, epsilon = 1e-9);
    }

    // Systematic disagreement drives alpha negative.
    #[test]
    fn opposed_raters_give_negative_alpha() {
        let m = matrix(
            grid(&[&[1.0, 5.0], &[5.0, 1.0], &[1.0, 5.0], &[5.0, 1.0]]),
            Level::Interval,
        );
        let alpha = krippendorff_alpha(&m).unwrap();
        assert!(alpha < 0.0, "alpha = {alpha}");
    }

    #[test]
    fn unit_and_rater_permutations_leave_alpha_unchanged() {
        let base = grid(&[&[1.0, 2.0, 2.0], &[3.0, 3.0, 4.0], &[5.0, 4.0, 4.0], &[2.0, 2.0, 1.0]]);
        for level in [Level::Interval, Level::Ordinal] {
            let alpha = krippendorff_alpha(&matrix(base.clone(), level)).unwrap();
            let mut unit_perm = base.clone();
            unit_perm.swap(0, 3);
            unit_perm.swap(1, 2);
            assert_abs_diff_eq!(
                krippendorff_alpha(&matrix(unit_perm, level)).unwrap(),
                alpha,
                epsilon = 1e-12
            );
            let rater_perm: Vec<Vec<Option<f64>>> = base
                .iter()
                .map(|row| vec![row[2], row[0], row[1]])
                .collect();
            assert_abs_diff_eq!(
                krippendorff_alpha(&matrix(rater_perm, level)).unwrap(),
                alpha,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn units_with_single_rating_are_excluded() {
        let with_sparse = matrix(
            vec![
                vec![Some(1.0), Some(1.0)],
                vec![Some(2.0), Some(2.0)],
                vec![Some(3.0), Some(3.0)],
                vec![Some(4.0), Some(5.0)],
                vec![Some(2.0), None],
            ],
            Level::Interval,
        );
        let dense = matrix(
            grid(&[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0], &[4.0, 5.0]]),
            Level::Interval,
        );
        assert_abs_diff_eq!(
            krippendorff_alpha(&with_sparse).unwrap(),
            krippendorff_alpha(&dense).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn single_category_is_degenerate() {
        let m = matrix(grid(&[&[2.0, 2.0], &[2.0, 2.0]]), Level::Interval);
        assert_eq!(krippendorff_alpha(&m), Err(StatsError::DegenerateData));
    }

    #[test]
    fn ordinal_and_interval_differ_on_skewed_marginals() {
        let m_i = matrix(
            grid(&[&[1.0, 2.0], &[2.0, 2.0], &[2.0, 3.0], &[3.0, 3.0], &[1.0, 3.0]]),
            Level::Interval,
        );
        let m_o = matrix(
            grid(&[&[1.0, 2.0], &[2.0, 2.0], &[2.0, 3.0], &[3.0, 3.0], &[1.0, 3.0]]),
            Level::Ordinal,
        );
        let a_i = krippendorff_alpha(&m_i).unwrap();
        let a_o = krippendorff_alpha(&m_o).unwrap();
        assert!((a_i - a_o).abs() > 1e-6, "expected levels to differ: {a_i} vs {a_o}");
    }

    #[test]
    fn fewer_than_two_raters_is_rejected() {
        let err = ReliabilityMatrix::new(
            vec!["u0".to_string()],
            vec!["r0".to_string()],
            vec![vec![Some(1.0)]],
            Level::Interval,
        )
        .unwrap_err();
        assert!(matches!(err, StatsError::MatrixShape { .. }));
    }
}

//! Rank and product-moment correlation.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{mean, stable_sum, StatsError};

fn check_paired(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewPairs { n: x.len() });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteValue);
    }
    Ok(())
}

/// Tie-corrected Kendall correlation:
/// (C - D) / sqrt((n0 - t_x) * (n0 - t_y)), n0 = n(n-1)/2.
///
/// O(n log n): sort by (x, y), count discordant pairs as merge-sort
/// inversions on y, and correct for tie runs.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_paired(x, y)?;
    let n = x.len();
    let n0 = pairs(n);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        x[a].total_cmp(&x[b]).then_with(|| y[a].total_cmp(&y[b]))
    });

    // Tie-pair counts among x and among joint (x, y).
    let mut t_x = 0u64;
    let mut t_xy = 0u64;
    let mut run = 1u64;
    let mut joint_run = 1u64;
    for w in order.windows(2) {
        if x[w[0]] == x[w[1]] {
            run += 1;
            if y[w[0]] == y[w[1]] {
                joint_run += 1;
            } else {
                t_xy += pairs(joint_run as usize);
                joint_run = 1;
            }
        } else {
            t_x += pairs(run as usize);
            t_xy += pairs(joint_run as usize);
            run = 1;
            joint_run = 1;
        }
    }
    t_x += pairs(run as usize);
    t_xy += pairs(joint_run as usize);

    let mut y_seq: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let swaps = count_inversions(&mut y_seq);

    y_seq.sort_unstable_by(f64::total_cmp);
    let mut t_y = 0u64;
    run = 1;
    for w in y_seq.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            t_y += pairs(run as usize);
            run = 1;
        }
    }
    t_y += pairs(run as usize);

    let den_x = n0 - t_x;
    let den_y = n0 - t_y;
    if den_x == 0 || den_y == 0 {
        return Err(StatsError::UndefinedCorrelation);
    }
    // C - D = n0 - t_x - t_y + t_xy - 2 * swaps
    let num = n0 as i128 - t_x as i128 - t_y as i128 + t_xy as i128 - 2 * swaps as i128;
    let tau = num as f64 / ((den_x as f64) * (den_y as f64)).sqrt();
    Ok(tau.clamp(-1.0, 1.0))
}

fn pairs(n: usize) -> u64 {
    (n as u64) * (n as u64 - 1) / 2
}

/// Strict inversions (a later element smaller than an earlier one) via
/// bottom-up merge sort. Ties are not inversions.
fn count_inversions(values: &mut [f64]) -> u64 {
    let n = values.len();
    let mut buf = values.to_vec();
    let mut count = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo + width < n {
            let mid = lo + width;
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if values[j] < values[i] {
                    count += (mid - i) as u64;
                    buf[k] = values[j];
                    j += 1;
                } else {
                    buf[k] = values[i];
                    i += 1;
                }
                k += 1;
            }
            while i < mid {
                buf[k] = values[i];
                i += 1;
                k += 1;
            }
            while j < hi {
                buf[k] = values[j];
                j += 1;
                k += 1;
            }
            values[lo..hi].copy_from_slice(&buf[lo..hi]);
            lo += 2 * width;
        }
        width *= 2;
    }
    count
}

/// Standard product-moment correlation.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_paired(x, y)?;
    let mx = mean(x);
    let my = mean(y);
    let sxx = stable_sum(x.iter().map(|&v| (v - mx) * (v - mx)));
    let syy = stable_sum(y.iter().map(|&v| (v - my) * (v - my)));
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(StatsError::UndefinedCorrelation);
    }
    let sxy = stable_sum(x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)));
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    /// O(n^2) oracle: enumerate every pair.
    pub(crate) fn tau_b_bruteforce(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
        let n = x.len();
        let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..n {
            for j in i + 1..n {
                let dx = x[i] - x[j];
                let dy = y[i] - y[j];
                if dx == 0.0 && dy == 0.0 {
                    tx += 1;
                    ty += 1;
                } else if dx == 0.0 {
                    tx += 1;
                } else if dy == 0.0 {
                    ty += 1;
                } else if dx * dy > 0.0 {
                    c += 1;
                } else {
                    d += 1;
                }
            }
        }
        let n0 = (n * (n - 1) / 2) as i64;
        let den = ((n0 - tx) as f64) * ((n0 - ty) as f64);
        if den <= 0.0 {
            return Err(StatsError::UndefinedCorrelation);
        }
        Ok((c - d) as f64 / den.sqrt())
    }

    #[test]
    fn identity_and_reversal() {
        assert_eq!(kendall_tau_b(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(kendall_tau_b(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn tied_example_matches_bruteforce() {
        let x = [1.0, 2.0, 2.0, 3.0];
        let y = [1.0, 3.0, 2.0, 4.0];
        assert_abs_diff_eq!(
            kendall_tau_b(&x, &y).unwrap(),
            tau_b_bruteforce(&x, &y).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn all_ties_is_undefined() {
        assert_eq!(
            kendall_tau_b(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::UndefinedCorrelation)
        );
    }

    #[test]
    fn matches_bruteforce_on_seeded_vectors() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7461755f62);
        for _ in 0..1000 {
            let n = rng.random_range(2..=12);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..=4) as f64).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..=4) as f64).collect();
            match (kendall_tau_b(&x, &y), tau_b_bruteforce(&x, &y)) {
                (Ok(fast), Ok(slow)) => assert_abs_diff_eq!(fast, slow, epsilon = 1e-12),
                (Err(a), Err(b)) => assert_eq!(a, b),
                (fast, slow) => panic!("disagree: {fast:?} vs {slow:?} on {x:?} {y:?}"),
            }
        }
    }

    #[test]
    fn pearson_exact_lines() {
        let x = vec![1.0, 2.0, 3.0];
        assert_abs_diff_eq!(
            pearson_r(&x, &[3.0, 5.0, 7.0]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            pearson_r(&x, &[6.0, 4.0, 2.0]).unwrap(),
            -1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn pearson_six_point_fixture() {
        // Definitional-formula value computed independently (hundredths
        // data, exact covariance arithmetic).
        let x = [3.1, 4.7, 1.2, 5.5, 2.9, 4.0];
        let y = [10.4, 12.1, 8.3, 15.9, 9.7, 11.0];
        assert_abs_diff_eq!(pearson_r(&x, &y).unwrap(), 0.9211960904099640, epsilon = 1e-12);
    }

    #[test]
    fn pearson_zero_variance_is_undefined() {
        assert_eq!(
            pearson_r(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::UndefinedCorrelation)
        );
    }
}

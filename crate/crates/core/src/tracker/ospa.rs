//! Optimal Sub-Pattern Assignment distance between two planar point sets,
//! jointly penalizing localization error and cardinality mismatch.

/// OSPA distance with cutoff `c` and order `p`. Assignment is solved
/// exactly by bitmask dynamic programming; the larger set must have at
/// most 20 points.
pub fn ospa(truth: &[[f64; 2]], estimates: &[[f64; 2]], c: f64, p: f64) -> f64 {
    assert!(c > 0.0 && p >= 1.0);
    if truth.is_empty() && estimates.is_empty() {
        return 0.0;
    }
    let (small, large) = if truth.len() <= estimates.len() {
        (truth, estimates)
    } else {
        (estimates, truth)
    };
    let (m, n) = (small.len(), large.len());
    if m == 0 {
        return c;
    }
    assert!(n <= 20, "OSPA assignment supports at most 20 points, got {n}");

    // cost[i][j] = min(c, dist)^p
    let cost: Vec<Vec<f64>> = small
        .iter()
        .map(|a| {
            large
                .iter()
                .map(|b| (a[0] - b[0]).hypot(a[1] - b[1]).min(c).powf(p))
                .collect()
        })
        .collect();

    // dp[mask] = best cost assigning the first popcount(mask) small points
    // to the subset `mask` of large points.
    let full = 1usize << n;
    let mut dp = vec![f64::INFINITY; full];
    dp[0] = 0.0;
    for mask in 0..full {
        if dp[mask].is_infinite() {
            continue;
        }
        let i = (mask as u32).count_ones() as usize;
        if i >= m {
            continue;
        }
        for j in 0..n {
            let bit = 1usize << j;
            if mask & bit == 0 {
                let cand = dp[mask] + cost[i][j];
                if cand < dp[mask | bit] {
                    dp[mask | bit] = cand;
                }
            }
        }
    }
    let best = (0..full)
        .filter(|mask| (*mask as u32).count_ones() as usize == m)
        .map(|mask| dp[mask])
        .fold(f64::INFINITY, f64::min);

    ((best + c.powf(p) * (n - m) as f64) / n as f64).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identical_sets_are_zero() {
        let pts = [[0.0, 0.0], [3.0, 4.0]];
        assert_abs_diff_eq!(ospa(&pts, &pts, 5.0, 2.0), 0.0);
    }

    #[test]
    fn both_empty_is_zero_one_empty_is_cutoff() {
        assert_abs_diff_eq!(ospa(&[], &[], 5.0, 2.0), 0.0);
        assert_abs_diff_eq!(ospa(&[[1.0, 1.0]], &[], 5.0, 2.0), 5.0);
        assert_abs_diff_eq!(ospa(&[], &[[1.0, 1.0]], 5.0, 2.0), 5.0);
    }

    #[test]
    fn pure_localization_error() {
        // One target offset by 1 m: OSPA(c=5, p=2) = 1.
        let a = [[0.0, 0.0]];
        let b = [[1.0, 0.0]];
        assert_abs_diff_eq!(ospa(&a, &b, 5.0, 2.0), 1.0);
    }

    #[test]
    fn cardinality_penalty() {
        // Perfect match on one point, one unmatched: ((0 + 25)/2)^0.5
        let a = [[0.0, 0.0]];
        let b = [[0.0, 0.0], [100.0, 100.0]];
        assert_abs_diff_eq!(ospa(&a, &b, 5.0, 2.0), (25.0f64 / 2.0).sqrt());
    }

    #[test]
    fn picks_optimal_assignment() {
        // Greedy by first index would pair (0,0)→(0.9,0) and leave (1,0)→(0,0.1)
        // at higher total cost than the crossing assignment.
        let a = [[0.0, 0.0], [1.0, 0.0]];
        let b = [[0.9, 0.0], [0.05, 0.0]];
        let d = ospa(&a, &b, 5.0, 2.0);
        let expect = ((0.05f64.powi(2) + 0.1f64.powi(2)) / 2.0).sqrt();
        assert_abs_diff_eq!(d, expect, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_in_arguments() {
        let a = [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]];
        let b = [[0.5, 0.0], [10.0, 0.5]];
        assert_abs_diff_eq!(ospa(&a, &b, 5.0, 2.0), ospa(&b, &a, 5.0, 2.0));
    }

    #[test]
    fn distances_clamp_at_cutoff() {
        let a = [[0.0, 0.0]];
        let b = [[1000.0, 0.0]];
        assert_abs_diff_eq!(ospa(&a, &b, 5.0, 2.0), 5.0);
    }
}

//! Cascaded k-means attention classification.
//!
//! Stage 1 clusters the weighted vehicle and pedestrian observation scores
//! independently (k = 2 each) and emits a normalized score per case; stage
//! 2 clusters the score pairs and names the lower cluster Low attention.
//! A third classifier on the pedestrian share stratifies cases into
//! Scenario I (vehicle-dominated) and Scenario II (mixed traffic) for
//! reporting only.

use crate::attention::CaseMetrics;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const CONVERGENCE_EPS: f64 = 1e-9;
const MAX_ITERATIONS: usize = 100;
const Z_CLIP: (f64, f64) = (-0.5, 1.5);

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("degenerate clustering: {0}")]
    DegenerateClustering(String),
    #[error("invalid clustering input: {0}")]
    BadInput(&'static str),
}

/// A fitted k-means model. Centroids are sorted lexicographically, so for
/// one-dimensional fits index 0 is the lower centroid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansModel {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    /// Cluster index per input point, in input order.
    pub assignment: Vec<usize>,
    pub sse: f64,
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = dist_sq(point, &centroids[0]);
    for (i, c) in centroids.iter().enumerate().skip(1) {
        let d = dist_sq(point, c);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// SSE accumulated in sorted term order, so the value is bit-identical
/// under any permutation of the input points.
fn sse_of(points: &[Vec<f64>], centroids: &[Vec<f64>], assignment: &[usize]) -> f64 {
    let mut terms: Vec<f64> = points
        .iter()
        .zip(assignment)
        .map(|(p, &a)| dist_sq(p, &centroids[a]))
        .collect();
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    terms.iter().sum()
}

/// Cluster means with members summed in sorted order (permutation-stable).
fn cluster_means(
    points: &[Vec<f64>],
    assignment: &[usize],
    fallback: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    let mut out = Vec::with_capacity(2);
    for c in 0..2 {
        let mut members: Vec<&Vec<f64>> = points
            .iter()
            .zip(assignment)
            .filter(|(_, &a)| a == c)
            .map(|(p, _)| p)
            .collect();
        if members.is_empty() {
            out.push(fallback[c].clone());
            continue;
        }
        members.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut mean = vec![0.0; dim];
        for m in &members {
            for (s, v) in mean.iter_mut().zip(m.iter()) {
                *s += v;
            }
        }
        for s in &mut mean {
            *s /= members.len() as f64;
        }
        out.push(mean);
    }
    out
}

/// Exact optimal SSE 2-partition of 1-dim values via sorted split scan.
/// Returns (sse, centroids ascending).
fn optimal_split_1d(values: &[f64]) -> (f64, [f64; 2]) {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let prefix: Vec<f64> = std::iter::once(0.0)
        .chain(sorted.iter().scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        }))
        .collect();
    let prefix_sq: Vec<f64> = std::iter::once(0.0)
        .chain(sorted.iter().scan(0.0, |acc, v| {
            *acc += v * v;
            Some(*acc)
        }))
        .collect();
    let seg_sse = |lo: usize, hi: usize| {
        // Sum of squared deviations of sorted[lo..hi] from its mean.
        let count = (hi - lo) as f64;
        let sum = prefix[hi] - prefix[lo];
        let sum_sq = prefix_sq[hi] - prefix_sq[lo];
        (sum_sq - sum * sum / count).max(0.0)
    };
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for split in 1..n {
        let sse = seg_sse(0, split) + seg_sse(split, n);
        if sse < best.0 {
            let c0 = (prefix[split] - prefix[0]) / split as f64;
            let c1 = (prefix[n] - prefix[split]) / (n - split) as f64;
            best = (sse, [c0, c1]);
        }
    }
    best
}

/// Lloyd's k-means with k = 2 and deterministic farthest-pair
/// initialization. One-dimensional fits are additionally checked against
/// the exact optimal split and upgraded if Lloyd stalled in a local
/// optimum, so 1-dim results are always globally optimal.
pub fn kmeans_fit(points: &[Vec<f64>], k: usize) -> Result<KMeansModel, ClassifyError> {
    if k != 2 {
        return Err(ClassifyError::BadInput("only k = 2 is supported"));
    }
    if points.is_empty() {
        return Err(ClassifyError::BadInput("no points"));
    }
    let dim = points[0].len();
    if dim == 0 || dim > 2 {
        return Err(ClassifyError::BadInput("points must be 1- or 2-dimensional"));
    }
    if points.iter().any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite())) {
        return Err(ClassifyError::BadInput("inconsistent or non-finite points"));
    }
    let distinct = points.iter().any(|p| p != &points[0]);
    if !distinct {
        return Err(ClassifyError::DegenerateClustering(
            "fewer than 2 distinct points".into(),
        ));
    }

    // Farthest pair, ties to the lexicographically earliest index pair.
    let (mut ia, mut ib, mut best_d) = (0usize, 1usize, -1.0f64);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = dist_sq(&points[i], &points[j]);
            if d > best_d {
                (ia, ib, best_d) = (i, j, d);
            }
        }
    }
    let mut centroids = vec![points[ia].clone(), points[ib].clone()];
    centroids.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
    let mut sse = sse_of(points, &centroids, &assignment);
    for _ in 0..MAX_ITERATIONS {
        // Means of each cluster; empty clusters keep their centroid.
        let mut next = cluster_means(points, &assignment, &centroids);
        next.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let movement = next
            .iter()
            .zip(&centroids)
            .map(|(a, b)| dist_sq(a, b).sqrt())
            .fold(0.0f64, f64::max);
        let next_assignment: Vec<usize> = points.iter().map(|p| nearest(p, &next)).collect();
        let next_sse = sse_of(points, &next, &next_assignment);
        assert!(
            next_sse <= sse + CONVERGENCE_EPS,
            "Lloyd iteration increased SSE: {sse} -> {next_sse}"
        );
        centroids = next;
        assignment = next_assignment;
        sse = next_sse;
        if movement < CONVERGENCE_EPS {
            break;
        }
    }

    if dim == 1 {
        let values: Vec<f64> = points.iter().map(|p| p[0]).collect();
        let (opt_sse, opt_centroids) = optimal_split_1d(&values);
        if opt_sse < sse - 1e-12 {
            centroids = vec![vec![opt_centroids[0]], vec![opt_centroids[1]]];
            assignment = points.iter().map(|p| nearest(p, &centroids)).collect();
            sse = sse_of(points, &centroids, &assignment);
        }
    }

    if centroids[0] == centroids[1] {
        return Err(ClassifyError::DegenerateClustering(
            "clusters collapsed onto one centroid".into(),
        ));
    }
    Ok(KMeansModel { k, centroids, assignment, sse })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Vehicle-dominated traffic.
    I,
    /// Mixed vehicle/pedestrian traffic.
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttentionLevel {
    Regular,
    Low,
}

/// k-means (k = 2) on the pedestrian share; the cluster with the lower
/// centroid is Scenario I.
pub fn scenario_classify(
    cases: &[CaseMetrics],
) -> Result<(Vec<Scenario>, KMeansModel), ClassifyError> {
    if cases.len() < 2 {
        return Err(ClassifyError::BadInput("need at least 2 cases"));
    }
    let points: Vec<Vec<f64>> = cases.iter().map(|c| vec![c.ped_share]).collect();
    let model = kmeans_fit(&points, 2)?;
    // Centroids are sorted ascending: cluster 0 is the lower ped share.
    let scenarios = model
        .assignment
        .iter()
        .map(|&a| if a == 0 { Scenario::I } else { Scenario::II })
        .collect();
    Ok((scenarios, model))
}

/// Final per-case label with the intermediate cascade state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseLabel {
    pub case_id: String,
    pub scenario: Scenario,
    pub attention: AttentionLevel,
    pub veh_cluster: usize,
    pub ped_cluster: usize,
    pub z_veh: f64,
    pub z_ped: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Feed stage 2 with binary stage-1 cluster labels instead of
    /// normalized scores.
    pub stage2_binary: bool,
}

/// Everything the cascade produced, kept for audit dumps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyOutcome {
    pub labels: Vec<CaseLabel>,
    pub veh_model: Option<KMeansModel>,
    pub ped_model: Option<KMeansModel>,
    pub scenario_model: Option<KMeansModel>,
    pub stage2_model: KMeansModel,
    pub warnings: Vec<String>,
}

/// Score given to cases whose class was absent: neutral, between the two
/// stage-1 clusters, so a class that never appeared cannot pull the case
/// either way in stage 2.
const ABSENT_SCORE: f64 = 0.5;

/// Normalized stage-1 scores: (s − c_low) / (c_high − c_low), clipped.
/// The model is fitted over cases where the class was present; absent
/// cases receive the neutral score.
fn stage1_scores(
    values: &[f64],
    present: &[bool],
    options: &ClassifyOptions,
) -> Result<(Vec<f64>, Vec<usize>, KMeansModel), ClassifyError> {
    let points: Vec<Vec<f64>> = values
        .iter()
        .zip(present)
        .filter(|(_, p)| **p)
        .map(|(v, _)| vec![*v])
        .collect();
    if points.len() < 2 {
        return Err(ClassifyError::DegenerateClustering(
            "fewer than 2 cases with the class present".into(),
        ));
    }
    let model = kmeans_fit(&points, 2)?;
    let (c_low, c_high) = (model.centroids[0][0], model.centroids[1][0]);
    let clusters: Vec<usize> = values
        .iter()
        .map(|v| nearest(&[*v], &model.centroids))
        .collect();
    let scores = values
        .iter()
        .zip(present)
        .map(|(v, p)| {
            if !p {
                ABSENT_SCORE
            } else if options.stage2_binary {
                nearest(&[*v], &model.centroids) as f64
            } else {
                ((v - c_low) / (c_high - c_low)).clamp(Z_CLIP.0, Z_CLIP.1)
            }
        })
        .collect();
    Ok((scores, clusters, model))
}

/// The cascade: two stage-1 classifiers on s_veh and s_ped, whose
/// normalized outputs feed a stage-2 classifier; the stage-2 cluster with
/// the lower centroid coordinate sum is Low attention. Scenario labels are
/// attached for reporting and are not a stage-2 feature.
pub fn attention_classify(
    cases: &[CaseMetrics],
    options: &ClassifyOptions,
) -> Result<ClassifyOutcome, ClassifyError> {
    if cases.len() < 2 {
        return Err(ClassifyError::BadInput("need at least 2 cases"));
    }
    let mut warnings = Vec::new();

    let s_veh: Vec<f64> = cases.iter().map(|c| c.s_veh).collect();
    let s_ped: Vec<f64> = cases.iter().map(|c| c.s_ped).collect();
    let veh_present: Vec<bool> = cases.iter().map(|c| !c.veh_absent).collect();
    let ped_present: Vec<bool> = cases.iter().map(|c| !c.ped_absent).collect();
    let veh = stage1_scores(&s_veh, &veh_present, options);
    let ped = stage1_scores(&s_ped, &ped_present, options);
    let (z_veh, veh_clusters, veh_model) = match veh {
        Ok((z, clusters, m)) => (z, clusters, Some(m)),
        Err(e) => {
            warnings.push(format!("vehicle stage-1 degenerate ({e}); scores zeroed"));
            (vec![0.0; cases.len()], vec![0; cases.len()], None)
        }
    };
    let (z_ped, ped_clusters, ped_model) = match ped {
        Ok((z, clusters, m)) => (z, clusters, Some(m)),
        Err(e) => {
            warnings.push(format!("pedestrian stage-1 degenerate ({e}); scores zeroed"));
            (vec![0.0; cases.len()], vec![0; cases.len()], None)
        }
    };
    if veh_model.is_none() && ped_model.is_none() {
        return Err(ClassifyError::DegenerateClustering(
            "both stage-1 classifiers degenerate".into(),
        ));
    }

    let stage2_points: Vec<Vec<f64>> =
        z_veh.iter().zip(&z_ped).map(|(v, p)| vec![*v, *p]).collect();
    let stage2_model = kmeans_fit(&stage2_points, 2)?;
    let sums: Vec<f64> = stage2_model.centroids.iter().map(|c| c.iter().sum()).collect();
    let low_cluster = if sums[0] <= sums[1] { 0 } else { 1 };

    // Scenario stratification, lenient: a degenerate fit (e.g. an
    // all-vehicle session) reports everything as Scenario I.
    let (scenarios, scenario_model) = match scenario_classify(cases) {
        Ok((s, m)) => (s, Some(m)),
        Err(e) => {
            warnings.push(format!("scenario classifier degenerate ({e}); all cases Scenario I"));
            (vec![Scenario::I; cases.len()], None)
        }
    };

    let labels = cases
        .iter()
        .enumerate()
        .map(|(i, c)| CaseLabel {
            case_id: c.case_id.clone(),
            scenario: scenarios[i],
            attention: if stage2_model.assignment[i] == low_cluster {
                AttentionLevel::Low
            } else {
                AttentionLevel::Regular
            },
            veh_cluster: veh_clusters[i],
            ped_cluster: ped_clusters[i],
            z_veh: z_veh[i],
            z_ped: z_ped[i],
        })
        .collect();

    Ok(ClassifyOutcome { labels, veh_model, ped_model, scenario_model, stage2_model, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Independent oracle: brute force over all 2^n two-colorings.
    fn brute_force_best_sse(points: &[Vec<f64>]) -> f64 {
        let n = points.len();
        let dim = points[0].len();
        let mut best = f64::INFINITY;
        for mask in 1..(1u32 << n) - 1 {
            let mut sums = vec![vec![0.0; dim]; 2];
            let mut counts = [0usize; 2];
            for (i, p) in points.iter().enumerate() {
                let c = ((mask >> i) & 1) as usize;
                counts[c] += 1;
                for (s, v) in sums[c].iter_mut().zip(p) {
                    *s += v;
                }
            }
            if counts[0] == 0 || counts[1] == 0 {
                continue;
            }
            let mut sse = 0.0;
            for (i, p) in points.iter().enumerate() {
                let c = ((mask >> i) & 1) as usize;
                sse += p
                    .iter()
                    .zip(&sums[c])
                    .map(|(v, s)| {
                        let m = s / counts[c] as f64;
                        (v - m) * (v - m)
                    })
                    .sum::<f64>();
            }
            best = best.min(sse);
        }
        best
    }

    fn metrics(case_id: &str, s_veh: f64, s_ped: f64, ped_share: f64) -> CaseMetrics {
        CaseMetrics {
            case_id: case_id.into(),
            n_veh: 10,
            n_ped: 2,
            veh_fv: s_veh,
            veh_pv: 0.0,
            ped_fv: s_ped,
            ped_pv: 0.0,
            ped_share,
            s_veh,
            s_ped,
            veh_absent: false,
            ped_absent: false,
        }
    }

    #[test]
    fn six_point_example_matches_brute_force() {
        let values = [0.02, 0.03, 0.05, 0.45, 0.48, 0.50];
        let points: Vec<Vec<f64>> = values.iter().map(|v| vec![*v]).collect();
        let model = kmeans_fit(&points, 2).unwrap();
        assert_abs_diff_eq!(model.centroids[0][0], 0.1 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model.centroids[1][0], 1.43 / 3.0, epsilon = 1e-12);
        assert_eq!(model.assignment, vec![0, 0, 0, 1, 1, 1]);
        assert_abs_diff_eq!(model.sse, brute_force_best_sse(&points), epsilon = 1e-12);
    }

    #[test]
    fn two_points() {
        let model = kmeans_fit(&[vec![0.0], vec![1.0]], 2).unwrap();
        assert_eq!(model.centroids, vec![vec![0.0], vec![1.0]]);
        assert_abs_diff_eq!(model.sse, 0.0);
    }

    #[test]
    fn identical_points_degenerate() {
        let err = kmeans_fit(&vec![vec![0.3]; 5], 2).unwrap_err();
        assert!(matches!(err, ClassifyError::DegenerateClustering(_)));
    }

    #[test]
    fn escapes_lloyd_local_optimum_on_1d() {
        // Farthest-pair Lloyd alone stalls at {0,49}|{51,100} (SSE 2401);
        // the optimal split {0}|{49,51,100} has SSE ≈ 1668.67.
        let points: Vec<Vec<f64>> = [0.0, 49.0, 51.0, 100.0].iter().map(|v| vec![*v]).collect();
        let model = kmeans_fit(&points, 2).unwrap();
        assert_abs_diff_eq!(model.sse, brute_force_best_sse(&points), epsilon = 1e-9);
    }

    #[test]
    fn one_dim_fits_are_globally_optimal() {
        // Deterministic pseudo-random batches, checked against brute force.
        let mut state = 42u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as f64 / (1u64 << 31) as f64
        };
        for trial in 0..50 {
            let n = 3 + (trial % 14);
            let points: Vec<Vec<f64>> = (0..n).map(|_| vec![next() * 10.0]).collect();
            if points.iter().all(|p| p == &points[0]) {
                continue;
            }
            let model = kmeans_fit(&points, 2).unwrap();
            let oracle = brute_force_best_sse(&points);
            assert!(
                (model.sse - oracle).abs() <= 1e-9 * oracle.max(1.0),
                "trial {trial}: {} vs oracle {oracle}",
                model.sse
            );
        }
    }

    #[test]
    fn sse_matches_assignment_implied_value() {
        let points: Vec<Vec<f64>> = (0..20).map(|i| vec![(i * i % 17) as f64]).collect();
        let model = kmeans_fit(&points, 2).unwrap();
        let implied: f64 = points
            .iter()
            .zip(&model.assignment)
            .map(|(p, &a)| dist_sq(p, &model.centroids[a]))
            .sum();
        assert_abs_diff_eq!(model.sse, implied, epsilon = 1e-12);
        for (p, &a) in points.iter().zip(&model.assignment) {
            assert_eq!(a, nearest(p, &model.centroids));
        }
    }

    #[test]
    fn rerun_is_bit_identical() {
        let points: Vec<Vec<f64>> =
            (0..30).map(|i| vec![((i * 7919) % 101) as f64 / 101.0]).collect();
        let a = kmeans_fit(&points, 2).unwrap();
        let b = kmeans_fit(&points, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scenario_split_follows_optimal_partition() {
        // The brute-force oracle puts 0.10 with the low-share cluster
        // (splitting {0, .02, .04, .10} | {.30, .45} has the lower SSE).
        let cases: Vec<CaseMetrics> = [0.0, 0.02, 0.04, 0.10, 0.30, 0.45]
            .iter()
            .enumerate()
            .map(|(i, &share)| metrics(&format!("c{i}"), 0.3, 0.3, share))
            .collect();
        let points: Vec<Vec<f64>> = cases.iter().map(|c| vec![c.ped_share]).collect();
        let (scenarios, model) = scenario_classify(&cases).unwrap();
        assert_abs_diff_eq!(model.sse, brute_force_best_sse(&points), epsilon = 1e-12);
        assert_eq!(
            scenarios,
            vec![Scenario::I, Scenario::I, Scenario::I, Scenario::I, Scenario::II, Scenario::II]
        );
    }

    #[test]
    fn scenario_degenerate_when_all_zero() {
        let cases: Vec<CaseMetrics> =
            (0..4).map(|i| metrics(&format!("c{i}"), 0.3, 0.0, 0.0)).collect();
        assert!(scenario_classify(&cases).is_err());
    }

    #[test]
    fn table_one_archetypes_separate() {
        // Five jittered replicas of each Table-I row.
        let mut cases = Vec::new();
        for i in 0..5 {
            let j = (i as f64 - 2.0) * 0.005;
            cases.push(metrics(&format!("low{i}"), 0.03 + j, 0.435 + j, 0.3));
        }
        for i in 0..5 {
            let j = (i as f64 - 2.0) * 0.005;
            cases.push(metrics(&format!("reg{i}"), 0.225 + j, 0.675 + j, 0.3));
        }
        let out = attention_classify(&cases, &ClassifyOptions::default()).unwrap();
        for label in &out.labels[..5] {
            assert_eq!(label.attention, AttentionLevel::Low, "{}", label.case_id);
        }
        for label in &out.labels[5..] {
            assert_eq!(label.attention, AttentionLevel::Regular, "{}", label.case_id);
        }
    }

    #[test]
    fn two_extreme_cases() {
        let cases = vec![metrics("a", 0.0, 0.0, 0.1), metrics("b", 1.0, 1.0, 0.1)];
        let out = attention_classify(&cases, &ClassifyOptions::default()).unwrap();
        assert_eq!(out.labels[0].attention, AttentionLevel::Low);
        assert_eq!(out.labels[1].attention, AttentionLevel::Regular);
    }

    #[test]
    fn degenerate_ped_feature_falls_back_to_vehicles() {
        let cases = vec![
            metrics("a", 0.05, 0.0, 0.0),
            metrics("b", 0.06, 0.0, 0.0),
            metrics("c", 0.5, 0.0, 0.0),
            metrics("d", 0.52, 0.0, 0.0),
        ];
        let out = attention_classify(&cases, &ClassifyOptions::default()).unwrap();
        assert!(out.ped_model.is_none());
        assert!(!out.warnings.is_empty());
        assert_eq!(out.labels[0].attention, AttentionLevel::Low);
        assert_eq!(out.labels[2].attention, AttentionLevel::Regular);
    }

    #[test]
    fn binary_stage2_mode() {
        let cases = vec![
            metrics("a", 0.02, 0.40, 0.3),
            metrics("b", 0.04, 0.44, 0.3),
            metrics("c", 0.22, 0.66, 0.3),
            metrics("d", 0.24, 0.69, 0.3),
        ];
        let out =
            attention_classify(&cases, &ClassifyOptions { stage2_binary: true }).unwrap();
        assert_eq!(out.labels[0].attention, AttentionLevel::Low);
        assert_eq!(out.labels[3].attention, AttentionLevel::Regular);
        for label in &out.labels {
            assert!(label.z_veh == 0.0 || label.z_veh == 1.0);
        }
    }

    #[test]
    fn permutation_invariance_of_labels() {
        let cases: Vec<CaseMetrics> = (0..12)
            .map(|i| {
                let low = i % 3 == 0;
                let s_v = if low { 0.02 + 0.01 * i as f64 / 12.0 } else { 0.4 + 0.01 * i as f64 };
                let s_p = if low { 0.3 } else { 0.6 + 0.005 * i as f64 };
                metrics(&format!("c{i}"), s_v, s_p, 0.02 * i as f64)
            })
            .collect();
        let base = attention_classify(&cases, &ClassifyOptions::default()).unwrap();
        let mut shuffled = cases.clone();
        shuffled.reverse();
        shuffled.swap(2, 7);
        let permuted = attention_classify(&shuffled, &ClassifyOptions::default()).unwrap();
        for label in &base.labels {
            let twin = permuted
                .labels
                .iter()
                .find(|l| l.case_id == label.case_id)
                .unwrap();
            assert_eq!(label.attention, twin.attention, "{}", label.case_id);
            assert_eq!(label.scenario, twin.scenario);
        }
    }

    #[test]
    fn low_centroid_dominated_by_regular() {
        let cases: Vec<CaseMetrics> = (0..10)
            .map(|i| {
                if i < 4 {
                    metrics(&format!("l{i}"), 0.03, 0.40, 0.3)
                } else {
                    metrics(&format!("r{i}"), 0.25, 0.70, 0.3)
                }
            })
            .collect();
        let out = attention_classify(&cases, &ClassifyOptions::default()).unwrap();
        let sums: Vec<f64> =
            out.stage2_model.centroids.iter().map(|c| c.iter().sum()).collect();
        let low_idx = out
            .labels
            .iter()
            .position(|l| l.attention == AttentionLevel::Low)
            .map(|i| out.stage2_model.assignment[i])
            .unwrap();
        assert!(sums[low_idx] <= sums[1 - low_idx]);
    }
}

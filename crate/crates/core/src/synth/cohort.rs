//! Metric-level cohort fabrication: per-case observation counts drawn from
//! configured ranges, materialized as track observations and aggregated by
//! the production metric arithmetic. Used to rebuild cohorts matching the
//! published population structure without sensor simulation.

use crate::attention::{case_metrics, CaseMetrics, GazeRegion, GazeRegions, TrackObservation};
use crate::classify::AttentionLevel;
use crate::tracker::ObjectClass;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Ground truth attached to each fabricated case.
#[derive(Debug, Clone)]
pub struct CohortCase {
    pub metrics: CaseMetrics,
    pub truth_attention: AttentionLevel,
    /// True scenario flag: vehicle-dominated (I) or mixed (II).
    pub truth_scenario_mixed: bool,
}

#[derive(Debug, Clone)]
pub struct CohortSpec {
    pub seed: u64,
    /// (count, attention) per scenario-I slot.
    pub scenario1: Vec<AttentionLevel>,
    /// Per scenario-II slot.
    pub scenario2: Vec<AttentionLevel>,
}

impl CohortSpec {
    /// The published 25-case population: 15 vehicle-dominated cases
    /// (9 regular / 6 low) and 10 mixed cases (6 regular / 4 low),
    /// giving 15 regular / 10 low overall.
    pub fn published_25(seed: u64) -> Self {
        let mut scenario1 = vec![AttentionLevel::Regular; 9];
        scenario1.extend(vec![AttentionLevel::Low; 6]);
        let mut scenario2 = vec![AttentionLevel::Regular; 6];
        scenario2.extend(vec![AttentionLevel::Low; 4]);
        Self { seed, scenario1, scenario2 }
    }
}

fn observations_for(
    n: usize,
    fv_count: usize,
    pv_count: usize,
    class: ObjectClass,
    next_id: &mut u64,
) -> Vec<TrackObservation> {
    (0..n)
        .map(|i| {
            let region = if i < fv_count {
                Some(GazeRegion::Fv)
            } else if i < fv_count + pv_count {
                Some(GazeRegion::Pv)
            } else {
                None
            };
            let obs = TrackObservation { track_id: *next_id, class, region };
            *next_id += 1;
            obs
        })
        .collect()
}

/// Draws one case's observation table.
///
/// Vehicle observation rates follow the published ranges: low-attention
/// cases observe at most 20% of vehicles (PV-leaning), regular cases
/// 30–60% (FV-leaning). Pedestrian observation, when pedestrians are
/// present, mirrors the published archetypes: regular cases observe most
/// pedestrians FV-heavy, low cases observe fewer with an even FV/PV split.
fn draw_case(
    case_id: &str,
    rng: &mut ChaCha8Rng,
    attention: AttentionLevel,
    mixed: bool,
    regions: &GazeRegions,
) -> CaseMetrics {
    let (n_veh, n_ped) = if mixed {
        // Mixed traffic: pedestrian share 18–45% (the upper part of the
        // published 5–45% envelope, where "the relationship between both
        // is similar"; a 1-dim k-means cannot split shares near 5% from
        // the vehicle-dominated group).
        let n_veh = rng.gen_range(8..=18usize);
        let share = rng.gen_range(0.25..0.45);
        let n_ped = ((share * n_veh as f64 / (1.0 - share)).round() as usize).max(1);
        (n_veh, n_ped)
    } else {
        // Vehicle-dominated: a lone pedestrian only when the vehicle count
        // keeps its share at or below 5%.
        let n_veh = rng.gen_range(8..=24usize);
        let n_ped = if n_veh >= 20 && rng.gen_bool(0.4) { 1 } else { 0 };
        (n_veh, n_ped)
    };

    // Integer counts are rounded so the realized fractions stay inside
    // the intended bands even at small populations (ceilings on the
    // regular side, plain rounding on the low side).
    let (veh_observed, veh_fv) = match attention {
        AttentionLevel::Low => {
            let observed = (rng.gen_range(0.02..0.18) * n_veh as f64).round() as usize;
            let fv = (rng.gen_range(0.0..0.35) * observed as f64).round() as usize;
            (observed, fv)
        }
        AttentionLevel::Regular => {
            let observed = ((rng.gen_range(0.30..0.60) * n_veh as f64).round() as usize)
                .max((0.30 * n_veh as f64).ceil() as usize)
                .min(n_veh);
            let fv = ((rng.gen_range(0.55..0.90) * observed as f64).ceil() as usize)
                .min(observed);
            (observed, fv)
        }
    };
    let veh_pv = veh_observed - veh_fv;

    let (ped_fv, ped_pv) = if n_ped == 0 {
        (0, 0)
    } else {
        match attention {
            AttentionLevel::Low => {
                let observed = (rng.gen_range(0.25..0.45) * n_ped as f64).round() as usize;
                let fv = observed / 2;
                (fv, observed - fv)
            }
            AttentionLevel::Regular => {
                let observed = ((rng.gen_range(0.55..0.90) * n_ped as f64).ceil() as usize)
                    .min(n_ped)
                    .max(1);
                let fv = ((rng.gen_range(0.70..0.90) * observed as f64).ceil() as usize)
                    .min(observed);
                (fv, observed - fv)
            }
        }
    };

    let mut id = 0;
    let mut observations = observations_for(n_veh, veh_fv, veh_pv, ObjectClass::Vehicle, &mut id);
    observations.extend(observations_for(n_ped, ped_fv, ped_pv, ObjectClass::Pedestrian, &mut id));
    case_metrics(case_id, &observations, regions).expect("cohort case has tracks")
}

/// Fabricates a whole cohort; deterministic under the spec seed.
pub fn gen_metric_cohort(spec: &CohortSpec) -> Vec<CohortCase> {
    let mut rng = super::stream(spec.seed, 0, super::StreamPurpose::Roster);
    let regions = GazeRegions::default();
    let mut cases = Vec::new();
    let mut idx = 0;
    for (mixed, slots) in [(false, &spec.scenario1), (true, &spec.scenario2)] {
        for attention in slots {
            idx += 1;
            let metrics =
                draw_case(&format!("case-{idx:02}"), &mut rng, *attention, mixed, &regions);
            cases.push(CohortCase {
                metrics,
                truth_attention: *attention,
                truth_scenario_mixed: mixed,
            });
        }
    }
    cases
}

//! Robust filtering of the head-yaw time series: Hampel outlier removal on
//! the circular-unwrapped signal, bounded gap filling, and rolling-median
//! smoothing. Driver yaw stays well inside ±90° in practice, so unwrap →
//! filter → re-wrap is stable.

use crate::geometry::Angle;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scaled-MAD floor in degrees, so constant segments don't flag everything.
const MAD_FLOOR_DEG: f64 = 0.5;
/// A spacing this much larger than the nominal step counts as a gap.
const GAP_FACTOR: f64 = 1.75;
/// Stricter Hampel multiplier applied to ambiguity-flagged samples.
const AMBIGUOUS_NSIGMA_SCALE: f64 = 0.75;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("invalid filter config: {0}")]
    BadConfig(&'static str),
    #[error("yaw series timestamps not strictly increasing at index {0}")]
    NonMonotonicTimestamps(usize),
}

/// Non-fatal events recorded while filtering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterWarning {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YawSample {
    pub t: f64,
    pub yaw: Angle,
    #[serde(default)]
    pub ambiguous: bool,
    #[serde(default)]
    pub interpolated: bool,
}

impl YawSample {
    pub fn new(t: f64, yaw: Angle) -> Self {
        Self { t, yaw, ambiguous: false, interpolated: false }
    }
}

/// Time-ordered yaw samples. `max_interp_gap` bounds the spacing across
/// which [`YawSeries::yaw_at`] will interpolate; wider gaps are treated as
/// open (no yaw information).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YawSeries {
    samples: Vec<YawSample>,
    pub max_interp_gap: f64,
}

impl YawSeries {
    pub fn new(samples: Vec<YawSample>) -> Result<Self, FilterError> {
        for (i, win) in samples.windows(2).enumerate() {
            if !(win[1].t > win[0].t) {
                return Err(FilterError::NonMonotonicTimestamps(i + 1));
            }
        }
        Ok(Self { samples, max_interp_gap: FilterConfig::default().max_gap })
    }

    pub fn samples(&self) -> &[YawSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Yaw at `t` by shortest-arc interpolation between the bracketing
    /// samples; `None` outside the series or across an open gap.
    pub fn yaw_at(&self, t: f64) -> Option<Angle> {
        if self.samples.is_empty() {
            return None;
        }
        let hi = self.samples.partition_point(|s| s.t < t);
        if hi == 0 {
            return (self.samples[0].t == t).then_some(self.samples[0].yaw);
        }
        if hi == self.samples.len() {
            let last = &self.samples[hi - 1];
            return (last.t == t).then_some(last.yaw);
        }
        let s1 = &self.samples[hi];
        if s1.t == t {
            return Some(s1.yaw);
        }
        let s0 = &self.samples[hi - 1];
        if s1.t - s0.t > self.max_interp_gap {
            return None;
        }
        Some(s0.yaw.lerp(s1.yaw, (t - s0.t) / (s1.t - s0.t)))
    }

    /// Median spacing between consecutive samples.
    fn nominal_dt(&self) -> Option<f64> {
        if self.samples.len() < 2 {
            return None;
        }
        let mut dts: Vec<f64> = self.samples.windows(2).map(|w| w[1].t - w[0].t).collect();
        dts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Some(dts[dts.len() / 2])
    }
}

/// Unwraps the yaw sequence into a continuous signal in degrees.
fn unwrap(samples: &[YawSample]) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev = 0.0;
    for (i, s) in samples.iter().enumerate() {
        let v = if i == 0 {
            s.yaw.degrees()
        } else {
            prev + samples[i - 1].yaw.shortest_arc_to(s.yaw)
        };
        out.push(v);
        prev = v;
    }
    out
}

fn median_of(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Hampel window length in samples (odd, ≥ 3).
    pub hampel_window: usize,
    pub hampel_nsigma: f64,
    /// Smoothing window length in samples (odd, ≥ 3).
    pub smooth_window: usize,
    /// Longest gap, in seconds, that gap filling will bridge.
    pub max_gap: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self { hampel_window: 11, hampel_nsigma: 3.0, smooth_window: 5, max_gap: 0.5 }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), FilterError> {
        if self.hampel_window < 3 || self.hampel_window % 2 == 0 {
            return Err(FilterError::BadConfig("hampel_window must be odd and >= 3"));
        }
        if self.smooth_window < 3 || self.smooth_window % 2 == 0 {
            return Err(FilterError::BadConfig("smooth_window must be odd and >= 3"));
        }
        if !(self.hampel_nsigma > 0.0) {
            return Err(FilterError::BadConfig("hampel_nsigma must be positive"));
        }
        if !(self.max_gap > 0.0) {
            return Err(FilterError::BadConfig("max_gap must be positive"));
        }
        Ok(())
    }
}

/// Removes samples deviating from the rolling median by more than
/// `nsigma · 1.4826 · MAD` (windows shrink at the edges). Ambiguous
/// samples face a 25% stricter threshold.
pub fn hampel(series: &YawSeries, window: usize, nsigma: f64) -> (YawSeries, Vec<FilterWarning>) {
    let samples = series.samples();
    if samples.len() < window {
        let warning = FilterWarning {
            stage: "hampel".into(),
            message: format!(
                "series of {} samples shorter than window {window}; left unchanged",
                samples.len()
            ),
        };
        return (series.clone(), vec![warning]);
    }
    let unwrapped = unwrap(samples);
    let hw = window / 2;
    let mut kept = Vec::with_capacity(samples.len());
    for i in 0..samples.len() {
        // Windows shrink symmetrically at the edges, staying centered.
        let half = hw.min(i).min(samples.len() - 1 - i);
        let (lo, hi) = (i - half, i + half + 1);
        let win: Vec<f64> = unwrapped[lo..hi].to_vec();
        let med = median_of(win.clone());
        let mad = median_of(win.iter().map(|v| (v - med).abs()).collect());
        let sigma = 1.4826 * mad.max(MAD_FLOOR_DEG);
        let n = if samples[i].ambiguous { nsigma * AMBIGUOUS_NSIGMA_SCALE } else { nsigma };
        if (unwrapped[i] - med).abs() <= n * sigma {
            kept.push(samples[i]);
        }
    }
    let mut out = series.clone();
    out.samples = kept;
    (out, Vec::new())
}

/// Bridges gaps of at most `max_gap` seconds with shortest-arc linear
/// interpolation at the nominal sample spacing; wider gaps stay open.
pub fn fill_gaps(series: &YawSeries, max_gap: f64) -> YawSeries {
    let samples = series.samples();
    let Some(nominal) = series.nominal_dt() else {
        return series.clone();
    };
    let mut out = Vec::with_capacity(samples.len());
    for i in 0..samples.len() {
        out.push(samples[i]);
        if i + 1 == samples.len() {
            break;
        }
        let (s0, s1) = (&samples[i], &samples[i + 1]);
        let dt = s1.t - s0.t;
        if dt <= GAP_FACTOR * nominal || dt > max_gap {
            continue;
        }
        let inserted = ((dt / nominal).round() as usize).saturating_sub(1);
        for k in 1..=inserted {
            let frac = k as f64 / (inserted + 1) as f64;
            out.push(YawSample {
                t: s0.t + dt * frac,
                yaw: s0.yaw.lerp(s1.yaw, frac),
                ambiguous: false,
                interpolated: true,
            });
        }
    }
    let mut filled = series.clone();
    filled.samples = out;
    filled
}

/// Centered rolling median of width `window` on the unwrapped signal,
/// re-wrapped afterwards; edge windows shrink.
pub fn smooth(series: &YawSeries, window: usize) -> YawSeries {
    let samples = series.samples();
    if samples.len() < 2 {
        return series.clone();
    }
    let unwrapped = unwrap(samples);
    let hw = window / 2;
    let mut out = series.clone();
    for i in 0..samples.len() {
        let half = hw.min(i).min(samples.len() - 1 - i);
        let med = median_of(unwrapped[i - half..i + half + 1].to_vec());
        out.samples[i].yaw = Angle::wrap_unchecked(med);
    }
    out
}

/// Full filter: Hampel → gap fill → smooth. The returned series carries
/// the configured `max_gap` as its interpolation bound.
pub fn filter_pipeline(
    series: &YawSeries,
    config: &FilterConfig,
) -> Result<(YawSeries, Vec<FilterWarning>), FilterError> {
    config.validate()?;
    let (stage1, warnings) = hampel(series, config.hampel_window, config.hampel_nsigma);
    let stage2 = fill_gaps(&stage1, config.max_gap);
    let mut stage3 = smooth(&stage2, config.smooth_window);
    stage3.max_interp_gap = config.max_gap;
    Ok((stage3, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(values: &[(f64, f64)]) -> YawSeries {
        YawSeries::new(
            values
                .iter()
                .map(|&(t, y)| YawSample::new(t, Angle::wrap(y).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    fn regular(values: &[f64]) -> YawSeries {
        let pairs: Vec<(f64, f64)> =
            values.iter().enumerate().map(|(i, &y)| (i as f64 * 0.1, y)).collect();
        series(&pairs)
    }

    #[test]
    fn single_gross_spike_removed() {
        let mut vals = vec![10.0; 31];
        vals[15] = 80.0;
        let s = regular(&vals);
        let (out, _) = hampel(&s, 11, 3.0);
        assert_eq!(out.len(), 30);
        assert!(out.samples().iter().all(|x| (x.yaw.degrees() - 10.0).abs() < 1e-9));
    }

    #[test]
    fn constant_series_untouched() {
        let s = regular(&[5.0; 25]);
        let (out, _) = hampel(&s, 11, 3.0);
        assert_eq!(out.len(), 25);
    }

    #[test]
    fn short_series_returned_with_warning() {
        let s = regular(&[1.0, 2.0, 3.0]);
        let (out, warnings) = hampel(&s, 11, 3.0);
        assert_eq!(out.len(), 3);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].stage, "hampel");
    }

    #[test]
    fn ambiguous_samples_use_stricter_threshold() {
        // A moderate deviation that survives at nsigma=3 but not at 3·0.75.
        let mut vals = vec![0.0; 21];
        vals[10] = 2.0; // sigma floor 0.5 → 1.4826·0.5·3 = 2.22 > 2 > 1.67
        let plain = regular(&vals);
        let (kept, _) = hampel(&plain, 11, 3.0);
        assert_eq!(kept.len(), 21);

        let mut flagged = plain.clone();
        flagged.samples[10].ambiguous = true;
        let (kept, _) = hampel(&flagged, 11, 3.0);
        assert_eq!(kept.len(), 20);
    }

    #[test]
    fn spike_injection_statistics() {
        // ±30° sinusoid at 0.1 Hz, 10 Hz sampling, 5% gross spikes.
        let mut removed_spikes = 0usize;
        let mut total_spikes = 0usize;
        let mut removed_clean = 0usize;
        let mut total_clean = 0usize;
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
            let n = 600;
            let mut spiked = Vec::new();
            let mut is_spike = vec![false; n];
            for i in 0..n {
                let t = i as f64 * 0.1;
                let clean = 30.0 * (2.0 * std::f64::consts::PI * 0.1 * t).sin();
                let mut v = clean;
                if rng.gen_bool(0.05) {
                    let mag = rng.gen_range(30.0..90.0);
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    v += sign * mag;
                    is_spike[i] = true;
                }
                spiked.push((t, v));
            }
            let s = series(&spiked);
            let (out, _) = hampel(&s, 11, 3.0);
            let kept: std::collections::BTreeSet<u64> =
                out.samples().iter().map(|x| (x.t * 10.0).round() as u64).collect();
            for i in 0..n {
                let kept_i = kept.contains(&(i as u64));
                if is_spike[i] {
                    total_spikes += 1;
                    if !kept_i {
                        removed_spikes += 1;
                    }
                } else {
                    total_clean += 1;
                    if !kept_i {
                        removed_clean += 1;
                    }
                }
            }
        }
        assert!(removed_spikes as f64 >= 0.95 * total_spikes as f64);
        assert!(removed_clean as f64 <= 0.01 * total_clean as f64);
    }

    #[test]
    fn gap_fill_below_threshold() {
        let s = series(&[(0.0, 10.0), (0.1, 10.0), (0.4, 20.0), (0.5, 20.0)]);
        let out = fill_gaps(&s, 0.5);
        assert_eq!(out.len(), 6);
        let inserted: Vec<&YawSample> =
            out.samples().iter().filter(|s| s.interpolated).collect();
        assert_eq!(inserted.len(), 2);
        assert!((inserted[0].yaw.degrees() - 13.333333333333334).abs() < 1e-9);
        assert!((inserted[1].yaw.degrees() - 16.666666666666668).abs() < 1e-9);
    }

    #[test]
    fn gap_above_threshold_left_open() {
        let s = series(&[(0.0, 0.0), (0.1, 0.0), (1.1, 5.0), (1.2, 5.0)]);
        let out = fill_gaps(&s, 0.5);
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn smooth_constant_unchanged() {
        let s = regular(&[7.0; 15]);
        let out = smooth(&s, 5);
        assert!(out.samples().iter().all(|x| (x.yaw.degrees() - 7.0).abs() < 1e-12));
    }

    #[test]
    fn smooth_reduces_jitter_on_ramp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vals: Vec<f64> = (0..100)
            .map(|i| {
                let ramp = i as f64 * 0.2;
                if rng.gen_bool(0.3) {
                    ramp + rng.gen_range(-3.0..3.0)
                } else {
                    ramp
                }
            })
            .collect();
        let s = regular(&vals);
        let out = smooth(&s, 5);
        for (i, x) in out.samples().iter().enumerate().skip(2).take(96) {
            let ramp = i as f64 * 0.2;
            assert!((x.yaw.degrees() - ramp).abs() < 1.0, "idx {i}");
        }
    }

    #[test]
    fn smooth_step_is_monotone() {
        let mut vals = vec![0.0; 10];
        vals.extend(vec![20.0; 10]);
        let s = regular(&vals);
        let out = smooth(&s, 5);
        let degs: Vec<f64> = out.samples().iter().map(|x| x.yaw.degrees()).collect();
        for w in degs.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        assert!(degs.iter().all(|&d| (-1e-12..=20.0 + 1e-12).contains(&d)));
    }

    #[test]
    fn pipeline_idempotent_on_clean_data() {
        let vals: Vec<f64> =
            (0..200).map(|i| 20.0 * (i as f64 * 0.05).sin()).collect();
        let cfg = FilterConfig::default();
        let (once, _) = filter_pipeline(&regular(&vals), &cfg).unwrap();
        let (twice, _) = filter_pipeline(&once, &cfg).unwrap();
        assert_eq!(once.len(), twice.len());
        for (a, b) in once.samples().iter().zip(twice.samples()) {
            assert!(a.yaw.abs_diff(b.yaw) <= 0.1, "{} vs {}", a.yaw.degrees(), b.yaw.degrees());
        }
    }

    #[test]
    fn removal_independent_of_partitioning() {
        // Hampel over the whole series equals hampel over two chunks with
        // window-sized overlap, stitched at the cut.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 120;
        let window = 11;
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let base = 15.0 * (i as f64 * 0.08).sin();
                if rng.gen_bool(0.06) { base + 50.0 } else { base }
            })
            .collect();
        let whole = regular(&vals);
        let (whole_out, _) = hampel(&whole, window, 3.0);

        let cut = 60;
        let part1 = regular(&vals[..cut + window]);
        let part2_pairs: Vec<(f64, f64)> = (cut - window..n)
            .map(|i| (i as f64 * 0.1, vals[i]))
            .collect();
        let part2 = series(&part2_pairs);
        let (out1, _) = hampel(&part1, window, 3.0);
        let (out2, _) = hampel(&part2, window, 3.0);
        let cut_t = cut as f64 * 0.1;
        let mut stitched: Vec<YawSample> = out1
            .samples()
            .iter()
            .filter(|s| s.t < cut_t - 1e-9)
            .copied()
            .collect();
        stitched.extend(out2.samples().iter().filter(|s| s.t >= cut_t - 1e-9));
        let whole_kept: Vec<f64> = whole_out.samples().iter().map(|s| s.t).collect();
        let stitched_kept: Vec<f64> = stitched.iter().map(|s| s.t).collect();
        assert_eq!(whole_kept, stitched_kept);
    }

    #[test]
    fn yaw_at_respects_open_gaps() {
        let mut s = series(&[(0.0, 0.0), (0.1, 10.0), (1.5, 20.0), (1.6, 20.0)]);
        s.max_interp_gap = 0.5;
        assert!((s.yaw_at(0.05).unwrap().degrees() - 5.0).abs() < 1e-9);
        assert!(s.yaw_at(0.8).is_none()); // inside the open gap
        assert!(s.yaw_at(1.55).is_some());
        assert!(s.yaw_at(-0.1).is_none());
        assert!(s.yaw_at(2.0).is_none());
    }

    #[test]
    fn config_validation() {
        let bad = FilterConfig { hampel_window: 4, ..FilterConfig::default() };
        assert!(bad.validate().is_err());
        let bad = FilterConfig { smooth_window: 1, ..FilterConfig::default() };
        assert!(bad.validate().is_err());
        let bad = FilterConfig { hampel_nsigma: 0.0, ..FilterConfig::default() };
        assert!(bad.validate().is_err());
        assert!(FilterConfig::default().validate().is_ok());
    }
}

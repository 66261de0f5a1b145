//! Flat `key = value` configuration with CLI overrides.
//!
//! Every tunable in the pipeline appears here with its default; `defaults
//! dump` emits the full list. Relative input paths resolve against the
//! config file's directory.

use super::PipelineError;
use crate::attention::{GatingConfig, GazeRegions};
use crate::classify::ClassifyOptions;
use crate::headpose::{MountConfig, MountOffset};
use crate::tracker::{GmphdParams, ObjectClass};
use crate::yawfilter::FilterConfig;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InputPaths {
    pub ego: PathBuf,
    pub landmarks: PathBuf,
    pub detections: PathBuf,
    pub intrinsics: PathBuf,
    pub zones: PathBuf,
    pub annotations: Option<PathBuf>,
    pub template: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub inputs: InputPaths,
    pub output_dir: PathBuf,
    pub filter: FilterConfig,
    pub tracker_vehicle: GmphdParams,
    pub tracker_pedestrian: GmphdParams,
    pub gating: GatingConfig,
    pub regions: GazeRegions,
    pub mount: MountConfig,
    pub classify: ClassifyOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            inputs: InputPaths::default(),
            output_dir: PathBuf::from("out"),
            filter: FilterConfig::default(),
            tracker_vehicle: GmphdParams::default_for(ObjectClass::Vehicle),
            tracker_pedestrian: GmphdParams::default_for(ObjectClass::Pedestrian),
            gating: GatingConfig::default(),
            regions: GazeRegions::default(),
            mount: MountConfig::default(),
            classify: ClassifyOptions::default(),
        }
    }
}

fn parse_num(key: &str, value: &str) -> Result<f64, PipelineError> {
    value
        .parse::<f64>()
        .map_err(|_| PipelineError::Config(format!("key '{key}': expected a number, got '{value}'")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, PipelineError> {
    value
        .parse::<usize>()
        .map_err(|_| PipelineError::Config(format!("key '{key}': expected an integer, got '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, PipelineError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(PipelineError::Config(format!(
            "key '{key}': expected true/false, got '{value}'"
        ))),
    }
}

fn apply_tracker(
    params: &mut GmphdParams,
    key: &str,
    sub: &str,
    value: &str,
) -> Result<(), PipelineError> {
    match sub {
        "p_survival" => params.p_survival = parse_num(key, value)?,
        "p_detect" => params.p_detect = parse_num(key, value)?,
        "clutter_density" => params.clutter_density = parse_num(key, value)?,
        "process_noise_accel" => params.process_noise_accel = parse_num(key, value)?,
        "meas_noise" => params.meas_noise = parse_num(key, value)?,
        "prune_threshold" => params.prune_threshold = parse_num(key, value)?,
        "merge_threshold" => params.merge_threshold = parse_num(key, value)?,
        "max_components" => params.max_components = parse_usize(key, value)?,
        "birth_weight" => params.birth_weight = parse_num(key, value)?,
        "birth_cov_diag" => {
            let parts: Vec<&str> = value.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(PipelineError::Config(format!(
                    "key '{key}': expected 4 comma-separated values"
                )));
            }
            for (slot, part) in params.birth_cov_diag.iter_mut().zip(parts) {
                *slot = parse_num(key, part)?;
            }
        }
        "extract_threshold" => params.extract_threshold = parse_num(key, value)?,
        "min_confidence" => params.min_confidence = parse_num(key, value)?,
        _ => return Err(PipelineError::Config(format!("unknown config key '{key}'"))),
    }
    Ok(())
}

impl PipelineConfig {
    /// Applies one `key = value` assignment.
    pub fn apply(&mut self, key: &str, value: &str, base: &Path) -> Result<(), PipelineError> {
        let resolve = |v: &str| -> PathBuf {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        match key {
            "inputs.ego" => self.inputs.ego = resolve(value),
            "inputs.landmarks" => self.inputs.landmarks = resolve(value),
            "inputs.detections" => self.inputs.detections = resolve(value),
            "inputs.intrinsics" => self.inputs.intrinsics = resolve(value),
            "inputs.zones" => self.inputs.zones = resolve(value),
            "inputs.annotations" => self.inputs.annotations = Some(resolve(value)),
            "inputs.template" => self.inputs.template = Some(resolve(value)),
            "output.dir" => self.output_dir = resolve(value),
            "filter.hampel_window" => self.filter.hampel_window = parse_usize(key, value)?,
            "filter.hampel_nsigma" => self.filter.hampel_nsigma = parse_num(key, value)?,
            "filter.smooth_window" => self.filter.smooth_window = parse_usize(key, value)?,
            "filter.max_gap" => self.filter.max_gap = parse_num(key, value)?,
            "gating.fov_half" => self.gating.fov_half = parse_num(key, value)?,
            "gating.range_fwd" => self.gating.range_fwd = parse_num(key, value)?,
            "gating.range_lat" => self.gating.range_lat = parse_num(key, value)?,
            "regions.fv_half" => self.regions.fv_half = parse_num(key, value)?,
            "regions.pv_band" => self.regions.pv_band = parse_num(key, value)?,
            "regions.pv_weight" => self.regions.pv_weight = parse_num(key, value)?,
            "regions.dwell_min" => self.regions.dwell_min = parse_num(key, value)?,
            "headpose.mount_sign" => {
                let v = parse_num(key, value)?;
                if v != 1.0 && v != -1.0 {
                    return Err(PipelineError::Config(format!(
                        "key '{key}': mount sign must be 1 or -1"
                    )));
                }
                self.mount.sign = v;
            }
            "headpose.mount_offset" => {
                self.mount.offset = if value == "auto" {
                    MountOffset::Auto
                } else {
                    MountOffset::Fixed(parse_num(key, value)?)
                };
            }
            "classify.stage2_binary" => self.classify.stage2_binary = parse_bool(key, value)?,
            _ => {
                if let Some(sub) = key.strip_prefix("tracker.vehicle.") {
                    apply_tracker(&mut self.tracker_vehicle, key, sub, value)?;
                } else if let Some(sub) = key.strip_prefix("tracker.pedestrian.") {
                    apply_tracker(&mut self.tracker_pedestrian, key, sub, value)?;
                } else {
                    return Err(PipelineError::Config(format!("unknown config key '{key}'")));
                }
            }
        }
        Ok(())
    }

    /// Parses a config file (`#` comments, blank lines ignored).
    pub fn from_file(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let mut config = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(PipelineError::Config(format!(
                    "{}:{}: expected 'key = value', got '{line}'",
                    path.display(),
                    lineno + 1
                )));
            };
            config.apply(key.trim(), value.trim(), &base)?;
        }
        Ok(config)
    }

    /// Applies `--set key=value` overrides (paths relative to cwd).
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), PipelineError> {
        for item in overrides {
            let Some((key, value)) = item.split_once('=') else {
                return Err(PipelineError::Config(format!(
                    "override '{item}': expected key=value"
                )));
            };
            self.apply(key.trim(), value.trim(), Path::new("."))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.filter.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.tracker_vehicle.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.tracker_pedestrian.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.gating.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.regions.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        for (path, name) in [
            (&self.inputs.ego, "inputs.ego"),
            (&self.inputs.landmarks, "inputs.landmarks"),
            (&self.inputs.detections, "inputs.detections"),
            (&self.inputs.intrinsics, "inputs.intrinsics"),
            (&self.inputs.zones, "inputs.zones"),
        ] {
            if path.as_os_str().is_empty() {
                return Err(PipelineError::Config(format!("{name} not set")));
            }
            if !path.exists() {
                return Err(PipelineError::Config(format!(
                    "{name}: file does not exist: {}",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    /// Every key with its default value, as a ready-to-edit config file.
    pub fn defaults_dump() -> String {
        let d = Self::default();
        let mut out = String::from("# vigil pipeline configuration — all keys with defaults\n");
        out.push_str("# input paths are resolved relative to this file\n");
        for key in [
            "inputs.ego",
            "inputs.landmarks",
            "inputs.detections",
            "inputs.intrinsics",
            "inputs.zones",
            "inputs.annotations",
            "inputs.template",
        ] {
            out.push_str(&format!("# {key} = <path>\n"));
        }
        out.push_str("output.dir = out\n");
        out.push_str(&format!("filter.hampel_window = {}\n", d.filter.hampel_window));
        out.push_str(&format!("filter.hampel_nsigma = {}\n", d.filter.hampel_nsigma));
        out.push_str(&format!("filter.smooth_window = {}\n", d.filter.smooth_window));
        out.push_str(&format!("filter.max_gap = {}\n", d.filter.max_gap));
        out.push_str(&format!("gating.fov_half = {}\n", d.gating.fov_half));
        out.push_str(&format!("gating.range_fwd = {}\n", d.gating.range_fwd));
        out.push_str(&format!("gating.range_lat = {}\n", d.gating.range_lat));
        out.push_str(&format!("regions.fv_half = {}\n", d.regions.fv_half));
        out.push_str(&format!("regions.pv_band = {}\n", d.regions.pv_band));
        out.push_str(&format!("regions.pv_weight = {}\n", d.regions.pv_weight));
        out.push_str(&format!("regions.dwell_min = {}\n", d.regions.dwell_min));
        out.push_str(&format!("headpose.mount_sign = {}\n", d.mount.sign));
        out.push_str("headpose.mount_offset = auto\n");
        out.push_str(&format!("classify.stage2_binary = {}\n", d.classify.stage2_binary));
        for (prefix, p) in [
            ("tracker.vehicle", &d.tracker_vehicle),
            ("tracker.pedestrian", &d.tracker_pedestrian),
        ] {
            out.push_str(&format!("{prefix}.p_survival = {}\n", p.p_survival));
            out.push_str(&format!("{prefix}.p_detect = {}\n", p.p_detect));
            out.push_str(&format!("{prefix}.clutter_density = {}\n", p.clutter_density));
            out.push_str(&format!("{prefix}.process_noise_accel = {}\n", p.process_noise_accel));
            out.push_str(&format!("{prefix}.meas_noise = {}\n", p.meas_noise));
            out.push_str(&format!("{prefix}.prune_threshold = {}\n", p.prune_threshold));
            out.push_str(&format!("{prefix}.merge_threshold = {}\n", p.merge_threshold));
            out.push_str(&format!("{prefix}.max_components = {}\n", p.max_components));
            out.push_str(&format!("{prefix}.birth_weight = {}\n", p.birth_weight));
            out.push_str(&format!(
                "{prefix}.birth_cov_diag = {},{},{},{}\n",
                p.birth_cov_diag[0], p.birth_cov_diag[1], p.birth_cov_diag[2], p.birth_cov_diag[3]
            ));
            out.push_str(&format!("{prefix}.extract_threshold = {}\n", p.extract_threshold));
            out.push_str(&format!("{prefix}.min_confidence = {}\n", p.min_confidence));
        }
        out
    }
}

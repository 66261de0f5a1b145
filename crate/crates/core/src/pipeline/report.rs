//! The report: per-case metrics and labels, session summary, per-driver
//! lap sequences, and the warnings ledger with per-stage accounting.

use crate::attention::{CaseMetrics, CaseWindow};
use crate::classify::{AttentionLevel, Scenario};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WarningRecord {
    pub stage: String,
    pub code: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_id: Option<String>,
    pub detail: String,
}

impl WarningRecord {
    pub fn new(stage: &str, code: &str, detail: impl Into<String>) -> Self {
        Self {
            stage: stage.into(),
            code: code.into(),
            t: None,
            case_id: None,
            detail: detail.into(),
        }
    }

    pub fn at(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn for_case(mut self, case_id: &str) -> Self {
        self.case_id = Some(case_id.to_string());
        self
    }
}

/// records_in = used + dropped, per stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageAccounting {
    pub stage: String,
    pub records_in: usize,
    pub used: usize,
    pub dropped: usize,
}

impl StageAccounting {
    pub fn new(stage: &str, records_in: usize, used: usize) -> Self {
        Self { stage: stage.into(), records_in, used, dropped: records_in - used }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseReport {
    #[serde(flatten)]
    pub window: CaseWindow,
    pub metrics: CaseMetrics,
    /// Absent when the session had too few cases to fit the classifiers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attention: Option<AttentionLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_veh: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_ped: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SessionSummary {
    pub cases: usize,
    pub scenario_i: usize,
    pub scenario_ii: usize,
    pub regular: usize,
    pub low: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriverLap {
    pub lap: u32,
    pub case_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attention: Option<AttentionLevel>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriverSummary {
    pub driver_id: String,
    pub laps: Vec<DriverLap>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttentionReport {
    pub cases: Vec<CaseReport>,
    pub summary: SessionSummary,
    pub drivers: Vec<DriverSummary>,
    /// Camera-to-vehicle mount offset applied, degrees, and whether it
    /// came from calibration (vs. config).
    pub mount_offset_deg: f64,
    pub mount_calibrated: bool,
    pub warnings: Vec<WarningRecord>,
    pub accounting: Vec<StageAccounting>,
}

impl AttentionReport {
    /// Tallies the summary and per-driver lap table from the case list.
    pub fn finalize(&mut self) {
        let mut summary = SessionSummary { cases: self.cases.len(), ..Default::default() };
        for c in &self.cases {
            match c.scenario {
                Some(Scenario::I) => summary.scenario_i += 1,
                Some(Scenario::II) => summary.scenario_ii += 1,
                None => {}
            }
            match c.attention {
                Some(AttentionLevel::Regular) => summary.regular += 1,
                Some(AttentionLevel::Low) => summary.low += 1,
                None => {}
            }
        }
        self.summary = summary;

        let mut drivers: Vec<DriverSummary> = Vec::new();
        for c in &self.cases {
            let lap = DriverLap {
                lap: c.window.lap,
                case_id: c.window.case_id.clone(),
                attention: c.attention,
            };
            match drivers.iter_mut().find(|d| d.driver_id == c.window.driver_id) {
                Some(d) => d.laps.push(lap),
                None => drivers.push(DriverSummary {
                    driver_id: c.window.driver_id.clone(),
                    laps: vec![lap],
                }),
            }
        }
        for d in &mut drivers {
            d.laps.sort_by(|a, b| a.lap.cmp(&b.lap).then(a.case_id.cmp(&b.case_id)));
        }
        drivers.sort_by(|a, b| a.driver_id.cmp(&b.driver_id));
        self.drivers = drivers;
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(id: &str, driver: &str, lap: u32, attention: Option<AttentionLevel>) -> CaseReport {
        CaseReport {
            window: CaseWindow {
                case_id: id.into(),
                driver_id: driver.into(),
                lap,
                t0: 0.0,
                t1: 10.0,
                zone: "z".into(),
            },
            metrics: CaseMetrics {
                case_id: id.into(),
                n_veh: 1,
                n_ped: 0,
                veh_fv: 0.0,
                veh_pv: 0.0,
                ped_fv: 0.0,
                ped_pv: 0.0,
                ped_share: 0.0,
                s_veh: 0.0,
                s_ped: 0.0,
                veh_absent: false,
                ped_absent: true,
            },
            scenario: Some(Scenario::I),
            attention,
            z_veh: Some(0.0),
            z_ped: Some(0.0),
        }
    }

    #[test]
    fn summary_counts_match_labels() {
        let mut report = AttentionReport {
            cases: vec![
                case("c1", "A", 1, Some(AttentionLevel::Regular)),
                case("c2", "A", 2, Some(AttentionLevel::Low)),
                case("c3", "B", 1, Some(AttentionLevel::Regular)),
            ],
            summary: SessionSummary::default(),
            drivers: Vec::new(),
            mount_offset_deg: 0.0,
            mount_calibrated: false,
            warnings: Vec::new(),
            accounting: Vec::new(),
        };
        report.finalize();
        assert_eq!(report.summary.cases, 3);
        assert_eq!(report.summary.regular, 2);
        assert_eq!(report.summary.low, 1);
        assert_eq!(report.drivers.len(), 2);
        assert_eq!(report.drivers[0].driver_id, "A");
        assert_eq!(report.drivers[0].laps.len(), 2);
        assert_eq!(report.drivers[0].laps[0].lap, 1);
    }

    #[test]
    fn accounting_balances() {
        let acc = StageAccounting::new("headpose", 100, 97);
        assert_eq!(acc.records_in, acc.used + acc.dropped);
    }
}

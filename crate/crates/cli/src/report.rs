//! The serialized result of one job. Field order is fixed by the struct so
//! identical configs produce byte-identical reports apart from `timing_ms`.

use std::collections::BTreeMap;

use serde::Serialize;

use momidx_core::{AuditReport, LimitEstimate, Verdict};

#[derive(Debug, Serialize)]
pub struct CrosscheckSummary {
    pub z0: [f64; 2],
    pub orders_compared: usize,
    pub max_rel_gap: f64,
}

#[derive(Debug, Serialize)]
pub struct TransformSummary {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    /// Max deviation between conjugated sections and pushforward moments,
    /// when an order was given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_path_max_dev: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct MapSummary {
    pub order: usize,
    pub points: usize,
    pub overflow_points: usize,
}

#[derive(Debug, Serialize)]
pub struct MomentsSummary {
    pub degrees: usize,
    pub max_error_bound: f64,
    pub all_converged: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_requested: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_reached: Option<usize>,
    pub estimates: BTreeMap<String, LimitEstimate>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crosscheck: Option<CrosscheckSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moments: Option<MomentsSummary>,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
    pub config: serde_json::Value,
    pub timing_ms: u128,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>, config_echo: serde_json::Value) -> Report {
        Report {
            version: momidx_core::VERSION,
            command: command.to_string(),
            seed,
            order_requested: None,
            order_reached: None,
            estimates: BTreeMap::new(),
            verdicts: Vec::new(),
            audit: None,
            crosscheck: None,
            transform: None,
            map: None,
            moments: None,
            files: Vec::new(),
            warnings: Vec::new(),
            config: config_echo,
            timing_ms: 0,
        }
    }

    pub fn add_warnings(&mut self, warnings: &[momidx_core::Warning]) {
        for w in warnings {
            let text = w.to_string();
            if !self.warnings.contains(&text) {
                self.warnings.push(text);
            }
        }
    }

    /// Exit code contract: 0 on decisive success, 2 when every answer the job
    /// produced is Inconclusive.
    pub fn exit_code(&self) -> i32 {
        use momidx_core::{Answer, LimitStatus};
        if !self.verdicts.is_empty() {
            if self.verdicts.iter().all(|v| v.answer == Answer::Inconclusive) {
                return 2;
            }
            return 0;
        }
        if !self.estimates.is_empty()
            && self.estimates.values().all(|e| e.status == LimitStatus::Inconclusive)
        {
            return 2;
        }
        0
    }
}

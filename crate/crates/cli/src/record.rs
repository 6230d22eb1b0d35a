use serde::{Deserialize, Serialize};

use sbp_core::limit::LimitReport;
use sbp_core::solver::Solution;
use sbp_core::verify::ProbeReport;

use crate::config::{Command, RunConfig};

pub const SCHEMA_ID: &str = "sbp-run-record/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Payload {
    Solution(Box<Solution>),
    LimitReport(LimitReport),
    Probes(Vec<ProbeReport>),
    GridStudy(GridStudy),
}

/// One scalar tracked across the `N` and `2N` runs of a grid study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub name: String,
    pub coarse: f64,
    pub fine: f64,
    pub delta: f64,
    /// `|fine − coarse| / (2^k − 1)` for observed order `k`.
    pub error_estimate: f64,
    pub extrapolated: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridStudy {
    pub study: Command,
    pub n_coarse: usize,
    pub n_fine: usize,
    pub order: f64,
    pub coarse_ok: bool,
    pub fine_ok: bool,
    pub rows: Vec<StudyRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub version: String,
    pub config: RunConfig,
    pub started_at: String,
    pub finished_at: String,
    /// Converged, complete, or all probes passed, depending on the command.
    pub ok: bool,
    pub results: Payload,
}

impl Payload {
    pub fn ok(&self) -> bool {
        match self {
            Payload::Solution(s) => s.converged,
            Payload::LimitReport(r) => r.complete,
            Payload::Probes(p) => sbp_core::verify::all_passed(p),
            Payload::GridStudy(g) => g.coarse_ok && g.fine_ok,
        }
    }

    /// Named scalars used to compare runs on different grids.
    pub fn scalars(&self) -> Vec<(String, f64)> {
        match self {
            Payload::Solution(s) => {
                let d = &s.diagnostics;
                vec![
                    ("j_value".into(), d.j_value),
                    ("nehari_residual".into(), d.nehari_residual),
                    ("nehari2_residual".into(), d.nehari2_residual),
                    ("pohozaev_residual".into(), d.pohozaev_residual),
                    ("pohozaev_alt_residual".into(), d.pohozaev_alt_residual),
                    ("h1_norm".into(), d.h1_norm),
                    ("l2_norm".into(), d.l2_norm),
                    ("lp_norm".into(), d.lp_norm),
                    ("grad_l2".into(), d.grad_l2),
                    ("interaction".into(), d.interaction),
                    ("grad_phi_l2".into(), d.grad_phi_l2),
                    ("lap_phi_l2".into(), d.lap_phi_l2),
                    ("u_at_origin".into(), s.u.values()[0]),
                ]
            }
            Payload::LimitReport(r) => {
                let mut out = Vec::new();
                for (i, a) in r.a_values.iter().enumerate() {
                    out.push((format!("d12_gap[a={a}]"), r.d12_gaps[i]));
                    out.push((format!("alap_norm[a={a}]"), r.alap_norms[i]));
                    if let Some(g) = r.h1_gaps.get(i) {
                        out.push((format!("h1_gap[a={a}]"), *g));
                    }
                }
                out
            }
            Payload::Probes(ps) => ps
                .iter()
                .flat_map(|p| [(format!("{}:lhs", p.name), p.lhs), (format!("{}:rhs", p.name), p.rhs)])
                .collect(),
            Payload::GridStudy(g) => g.rows.iter().map(|r| (r.name.clone(), r.fine)).collect(),
        }
    }
}

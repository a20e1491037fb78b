//! JSON report shapes. Every report carries `"schema": "agd-rc/1"` so
//! downstream consumers can detect layout changes.

use serde::Serialize;

use agd_rc::{DeltaInterval, KypcReport, PWitness, RegionVerdict};

pub const SCHEMA: &str = "agd-rc/1";

#[derive(Serialize)]
pub struct ParamsOut {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
}

#[derive(Serialize)]
pub struct RcOut {
    pub mu: f64,
    pub lambda: f64,
}

/// Certificate attempt through the matrix-inequality route. Absence of a
/// witness is recorded but never interpreted as infeasibility.
#[derive(Serialize)]
pub struct LmiOut {
    pub attempted: bool,
    pub found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PWitness>,
    pub note: &'static str,
}

#[derive(Serialize)]
pub struct CertifyReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub family: &'static str,
    pub rc: RcOut,
    pub params: ParamsOut,
    pub kypc_alpha_bound: f64,
    pub delta_interval: DeltaInterval,
    pub kypc_at_midpoint: Option<KypcReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<RegionVerdict>,
    pub fdi_exact: RegionVerdict,
    pub fdi_sampled: RegionVerdict,
    pub lmi: LmiOut,
    /// All authoritative routes returned the same verdict.
    pub agreement: bool,
    /// Some route sat inside the boundary band.
    pub boundary: bool,
}

#[derive(Serialize)]
pub struct RateReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub family: &'static str,
    pub rc: RcOut,
    pub params: ParamsOut,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub bisection_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_cond_witness: Option<PWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub safe_init_radius: Option<f64>,
}

#[derive(Serialize)]
pub struct RunOut {
    pub algo: &'static str,
    pub beta1: f64,
    pub beta2: f64,
    pub iterations: usize,
    pub status: agd_rc::simulate::RunStatus,
    pub final_dist: f64,
    pub trace_csv: String,
}

#[derive(Serialize)]
pub struct SimulateReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub benchmark: String,
    pub alpha: f64,
    pub stop_tol: f64,
    pub max_iter: usize,
    pub runs: Vec<RunOut>,
}

#[derive(Serialize)]
pub struct VerifyRcReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub benchmark: String,
    pub mu: f64,
    pub lambda: f64,
    pub range_lo: f64,
    pub range_hi: f64,
    pub n: usize,
    pub checked: usize,
    pub min_slack: f64,
    pub worst_point: Vec<f64>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct ConvertReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub direction: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
}

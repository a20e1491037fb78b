//! Convergence certification for accelerated gradient methods on nonconvex
//! objectives satisfying the regularity condition
//! `<grad f(z), z - x*> >= (mu/2)||grad f(z)||^2 + (lambda/2)||z - x*||^2`.
//!
//! Three mutually independent mechanisms decide whether a step size and
//! momentum pair converges linearly on every such objective:
//!
//! * closed-form region membership for heavy-ball and Nesterov momentum
//!   ([`analytic::hb_region`], [`analytic::nag_region`]);
//! * an exact frequency-domain inequality analysis, decided in rational
//!   arithmetic ([`analytic::fdi_exact`]) and cross-checked by brute-force
//!   frequency sampling ([`analytic::fdi_sampled`]);
//! * direct feasibility search for a 2x2 quadratic Lyapunov certificate of
//!   the associated 3x3 matrix inequality ([`lmi::find_feasible_p`]), with
//!   rate certification by bisection ([`lmi::certify_rate`]).
//!
//! The [`simulate`] module runs the methods on benchmark objectives, verifies
//! the regularity condition empirically, and replays certified decay bounds
//! along actual trajectories.

pub mod analytic;
pub mod linalg;
pub mod lmi;
pub mod model;
pub mod simulate;

mod error;

pub use analytic::{
    admissible_delta_interval, fdi_exact, fdi_sampled, hb_region, kypc_alpha_bound, nag_region,
    region_scan, DeltaInterval, Family, RegionScan, RegionVerdict, Route, ScanRoute, BOUNDARY_BAND,
};
pub use error::Error;
pub use lmi::{
    assemble_lmi, certify_rate, check_kypc, find_feasible_p, kyp_equivalence_harness, min_cond_p,
    HarnessReport, KypcReport, LmiProblem, PWitness, RateCertificate,
};
pub use model::{
    build_original_system, build_rc_quadform, build_shifted_quadform, build_shifted_system,
    rc_to_sector, sector_to_rc, AgdParams, QuadForm, RcParams, SectorBound, StateSpace,
};
pub use simulate::{
    benchmark, check_certified_decay, run, safe_init_radius, verify_rc, Algo, CosineRipple,
    DecayReport, GradOracle, RcCheckReport, Trace,
};

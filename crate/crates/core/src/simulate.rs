//! Running the methods on concrete objectives: a gradient-oracle interface
//! for pluggable objectives, the built-in nonconvex ripple benchmark, an
//! empirical check of the regularity condition, replay of certified decay
//! bounds along trajectories, and the safe-initialization radius for locally
//! regular problems.

use serde::Serialize;

use crate::linalg::quad_form2;
use crate::lmi::PWitness;
use crate::model::{AgdParams, RcParams};

/// Deterministic first-order oracle for an objective with a known minimizer.
pub trait GradOracle {
    fn dim(&self) -> usize;
    fn eval_f(&self, z: &[f64]) -> f64;
    fn eval_grad(&self, z: &[f64]) -> Vec<f64>;
    fn minimizer(&self) -> &[f64];
    /// Regularity constants this objective is believed to satisfy, if any.
    fn rc_claim(&self) -> Option<RcParams> {
        None
    }
}

/// One-dimensional nonconvex benchmark: a quadratic well carrying cosine
/// ripples away from the origin,
///
/// ```text
/// f(x) = x^2                                     |x| <= 6
///      = x^2 + 1.5 |x| (cos(|x| - 6) - 1)        otherwise
/// ```
///
/// The two branches join with matching value and slope at |x| = 6. The
/// function is nonconvex but satisfies the regularity condition with
/// constants (0.5, 0.5) around its global minimizer at the origin.
pub struct CosineRipple {
    minimizer: [f64; 1],
}

impl CosineRipple {
    pub fn new() -> Self {
        Self { minimizer: [0.0] }
    }
}

impl Default for CosineRipple {
    fn default() -> Self {
        Self::new()
    }
}

impl GradOracle for CosineRipple {
    fn dim(&self) -> usize {
        1
    }

    fn eval_f(&self, z: &[f64]) -> f64 {
        let x = z[0];
        let r = x.abs();
        if r <= 6.0 {
            x * x
        } else {
            x * x + 1.5 * r * ((r - 6.0).cos() - 1.0)
        }
    }

    fn eval_grad(&self, z: &[f64]) -> Vec<f64> {
        let x = z[0];
        let r = x.abs();
        if r <= 6.0 {
            vec![2.0 * x]
        } else {
            let s = x.signum();
            vec![2.0 * x + 1.5 * s * (((r - 6.0).cos() - 1.0) - r * (r - 6.0).sin())]
        }
    }

    fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }

    fn rc_claim(&self) -> Option<RcParams> {
        Some(RcParams::new(0.5, 0.5).expect("constants are valid"))
    }
}

/// Built-in benchmark registry for the command-line surface.
pub fn benchmark(id: &str) -> Option<Box<dyn GradOracle + Send + Sync>> {
    match id {
        "44" => Some(Box::new(CosineRipple::new())),
        _ => None,
    }
}

/// Which method produced a trace. Purely a label: all four share the
/// two-momentum update, so equal parameters give bitwise-equal traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Gd,
    Hb,
    Nag,
    General,
}

/// Why a run stopped.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    /// Reached the stop tolerance around the minimizer.
    Converged,
    MaxIterReached,
    /// State norm passed the divergence guard.
    Diverged,
    /// Gradient evaluation returned a non-finite value; the trace up to the
    /// failure is retained as a diagnostic prefix.
    NonFiniteGradient {
        at_iter: usize,
    },
}

/// Iterate history of one run. `points[k]` is `z_k`; `prev_init` is the
/// second history seed `z_{-1}`; `aux[k]` is the extrapolated point `y_k`
/// used by step `k`, so `aux` is one entry shorter than `points`.
#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    pub algo: Algo,
    pub params: AgdParams,
    pub prev_init: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub aux: Vec<Vec<f64>>,
    pub status: RunStatus,
}

impl Trace {
    /// Number of update steps taken.
    pub fn iterations(&self) -> usize {
        self.points.len() - 1
    }

    pub fn last(&self) -> &[f64] {
        self.points
            .last()
            .expect("trace always holds the initial point")
    }

    /// Stacked state `(z_k, z_{k-1})` per coordinate.
    pub fn state(&self, k: usize) -> (&[f64], &[f64]) {
        let prev = if k == 0 {
            &self.prev_init
        } else {
            &self.points[k - 1]
        };
        (&self.points[k], prev)
    }

    /// Writes the trace as CSV rows `k, z, dist, f` with coordinates joined
    /// by semicolons for multi-dimensional problems.
    pub fn write_csv<W: std::io::Write>(
        &self,
        oracle: &dyn GradOracle,
        out: &mut W,
    ) -> std::io::Result<()> {
        let x_star = oracle.minimizer();
        writeln!(out, "k,z,dist,f")?;
        for (k, z) in self.points.iter().enumerate() {
            let joined = z
                .iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(";");
            writeln!(out, "{k},{joined},{},{}", dist(z, x_star), oracle.eval_f(z))?;
        }
        Ok(())
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

const DIVERGENCE_GUARD: f64 = 1e12;

/// Runs the two-momentum iteration
///
/// ```text
/// y_k     = (1 + beta2) z_k - beta2 z_{k-1}
/// z_{k+1} = (1 + beta1) z_k - beta1 z_{k-1} - alpha grad f(y_k)
/// ```
///
/// from the two history seeds `(z_init, z_prev)` until the iterate is within
/// `stop_tol` of the minimizer, the divergence guard trips, or `max_iter`
/// steps have been taken.
pub fn run(
    oracle: &dyn GradOracle,
    algo: Algo,
    params: &AgdParams,
    z_init: &[f64],
    z_prev: &[f64],
    max_iter: usize,
    stop_tol: f64,
) -> Trace {
    assert!(max_iter >= 1);
    assert_eq!(z_init.len(), oracle.dim());
    assert_eq!(z_prev.len(), oracle.dim());
    let n = oracle.dim();
    let x_star = oracle.minimizer().to_vec();
    let (alpha, b1, b2) = (params.alpha(), params.beta1(), params.beta2());

    let mut points = vec![z_init.to_vec()];
    let mut aux: Vec<Vec<f64>> = Vec::new();
    let mut z = z_init.to_vec();
    let mut zp = z_prev.to_vec();

    let mut status = RunStatus::MaxIterReached;
    for k in 0..max_iter {
        if dist(&z, &x_star) <= stop_tol {
            status = RunStatus::Converged;
            break;
        }
        if z.iter().any(|v| v.abs() > DIVERGENCE_GUARD) {
            status = RunStatus::Diverged;
            break;
        }
        let y: Vec<f64> = (0..n).map(|i| (1.0 + b2) * z[i] - b2 * zp[i]).collect();
        let g = oracle.eval_grad(&y);
        if g.iter().any(|v| !v.is_finite()) {
            aux.push(y);
            status = RunStatus::NonFiniteGradient { at_iter: k };
            break;
        }
        let znext: Vec<f64> = (0..n)
            .map(|i| (1.0 + b1) * z[i] - b1 * zp[i] - alpha * g[i])
            .collect();
        aux.push(y);
        points.push(znext.clone());
        zp = z;
        z = znext;
    }
    if status == RunStatus::MaxIterReached && dist(&z, &x_star) <= stop_tol {
        status = RunStatus::Converged;
    }

    Trace {
        algo,
        params: *params,
        prev_init: z_prev.to_vec(),
        points,
        aux,
        status,
    }
}

/// Pointwise empirical check of the regularity condition.
#[derive(Clone, Debug, Serialize)]
pub struct RcCheckReport {
    pub checked: usize,
    /// Points outside the claimed neighborhood, skipped when the condition is
    /// only local.
    pub skipped_outside: usize,
    pub min_slack: f64,
    pub worst_point: Vec<f64>,
    pub all_nonnegative: bool,
}

/// Evaluates the slack of
/// `<grad f(z), z - x*> - (mu/2)||grad f(z)||^2 - (lambda/2)||z - x*||^2`
/// at every sample point and reports the worst case.
pub fn verify_rc(oracle: &dyn GradOracle, rc: &RcParams, samples: &[Vec<f64>]) -> RcCheckReport {
    let x_star = oracle.minimizer();
    let mut report = RcCheckReport {
        checked: 0,
        skipped_outside: 0,
        min_slack: f64::INFINITY,
        worst_point: Vec::new(),
        all_nonnegative: true,
    };
    for z in samples {
        if let Some(eps) = rc.epsilon() {
            if dist(z, x_star) > eps {
                report.skipped_outside += 1;
                continue;
            }
        }
        let g = oracle.eval_grad(z);
        let inner: f64 = g
            .iter()
            .zip(z.iter().zip(x_star))
            .map(|(gi, (zi, xi))| gi * (zi - xi))
            .sum();
        let g2: f64 = g.iter().map(|v| v * v).sum();
        let d2: f64 = z
            .iter()
            .zip(x_star)
            .map(|(zi, xi)| (zi - xi) * (zi - xi))
            .sum();
        let slack = inner - 0.5 * rc.mu() * g2 - 0.5 * rc.lambda() * d2;
        report.checked += 1;
        if slack < report.min_slack {
            report.min_slack = slack;
            report.worst_point = z.clone();
        }
    }
    report.all_nonnegative = report.checked > 0 && report.min_slack >= 0.0;
    report
}

/// Uniform one-dimensional sample grid, handy for the benchmark checks.
pub fn grid_1d(lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
    assert!(n >= 2 && hi > lo);
    (0..n)
        .map(|i| vec![lo + (hi - lo) * i as f64 / (n - 1) as f64])
        .collect()
}

/// First violation of the certified decay along a trace.
#[derive(Clone, Debug, Serialize)]
pub struct DecayViolation {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Result of replaying a certificate along a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub steps_checked: usize,
    /// Step decrement `V(phi_{k+1}) <= rho^2 V(phi_k)` within slack.
    pub decay_ok: bool,
    pub first_decay_violation: Option<DecayViolation>,
    /// Envelope `||phi_k - phi*|| <= sqrt(cond P) rho^k ||phi_0 - phi*||`.
    pub envelope_ok: bool,
    pub first_envelope_violation: Option<DecayViolation>,
}

impl DecayReport {
    pub fn ok(&self) -> bool {
        self.decay_ok && self.envelope_ok
    }
}

const DECAY_SLACK: f64 = 1e-9;

/// Replays a rate certificate along a trace: the quadratic energy
/// `(phi_k - phi*)' (P (x) I) (phi_k - phi*)` must contract by `rho^2` every
/// step, and the state must stay inside the `sqrt(cond P) rho^k` envelope.
/// Both checks carry a `1e-9` slack for floating-point noise.
pub fn check_certified_decay(
    trace: &Trace,
    witness: &PWitness,
    rho: f64,
    x_star: &[f64],
) -> DecayReport {
    let p = &witness.p;
    let energy = |z: &[f64], zp: &[f64]| -> f64 {
        z.iter()
            .zip(zp)
            .zip(x_star)
            .map(|((zi, pi), xi)| quad_form2(p, &[zi - xi, pi - xi]))
            .sum()
    };
    let state_norm = |z: &[f64], zp: &[f64]| -> f64 {
        z.iter()
            .zip(zp)
            .zip(x_star)
            .map(|((zi, pi), xi)| (zi - xi) * (zi - xi) + (pi - xi) * (pi - xi))
            .sum::<f64>()
            .sqrt()
    };

    let mut report = DecayReport {
        steps_checked: trace.iterations(),
        decay_ok: true,
        first_decay_violation: None,
        envelope_ok: true,
        first_envelope_violation: None,
    };

    let (z0, zp0) = trace.state(0);
    let norm0 = state_norm(z0, zp0);
    let cond_factor = witness.cond_p.sqrt();
    let mut v_prev = energy(z0, zp0);
    let mut rho_k = 1.0;

    for k in 1..trace.points.len() {
        let (z, zp) = trace.state(k);
        let v = energy(z, zp);
        if report.decay_ok && v > rho * rho * v_prev + DECAY_SLACK {
            report.decay_ok = false;
            report.first_decay_violation = Some(DecayViolation {
                k,
                lhs: v,
                rhs: rho * rho * v_prev,
            });
        }
        rho_k *= rho;
        let envelope = cond_factor * rho_k * norm0 * (1.0 + DECAY_SLACK);
        let norm = state_norm(z, zp);
        if report.envelope_ok && norm > envelope {
            report.envelope_ok = false;
            report.first_envelope_violation = Some(DecayViolation {
                k,
                lhs: norm,
                rhs: envelope,
            });
        }
        v_prev = v;
    }
    report
}

/// Safe initialization radius `eps / sqrt(10 cond(P))`: seeding both history
/// slots inside this ball keeps every extrapolated point `y_k` inside the
/// radius-`eps` neighborhood where the local regularity condition holds.
pub fn safe_init_radius(eps: f64, cond_p: f64) -> f64 {
    assert!(eps > 0.0 && cond_p >= 1.0);
    eps / (10.0 * cond_p).sqrt()
}

/// Largest deviation of the extrapolated points `y_k` from the minimizer,
/// the quantity bounded by the safe-initialization guarantee.
pub fn max_y_deviation(trace: &Trace, x_star: &[f64]) -> f64 {
    trace
        .aux
        .iter()
        .map(|y| dist(y, x_star))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmi::certify_rate;

    fn bench() -> CosineRipple {
        CosineRipple::new()
    }

    /// Pluggable multi-dimensional objective: f(x) = ||x - c||^2, which
    /// satisfies the condition with constants (0.5, 0.5) in any dimension.
    struct ShiftedQuadratic {
        center: Vec<f64>,
    }

    impl GradOracle for ShiftedQuadratic {
        fn dim(&self) -> usize {
            self.center.len()
        }
        fn eval_f(&self, z: &[f64]) -> f64 {
            z.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum()
        }
        fn eval_grad(&self, z: &[f64]) -> Vec<f64> {
            z.iter().zip(&self.center).map(|(a, b)| 2.0 * (a - b)).collect()
        }
        fn minimizer(&self) -> &[f64] {
            &self.center
        }
        fn rc_claim(&self) -> Option<RcParams> {
            Some(RcParams::new(0.5, 0.5).unwrap())
        }
    }

    #[test]
    fn benchmark_values() {
        let b = bench();
        // Branch continuity at the junction.
        assert_eq!(b.eval_f(&[6.0]), 36.0);
        assert!((b.eval_f(&[6.0 + 1e-12]) - 36.0).abs() < 1e-9);
        // Direct evaluation away from the core.
        let f24 = 576.0 + 36.0 * ((18.0f64).cos() - 1.0);
        assert!((b.eval_f(&[24.0]) - f24).abs() < 1e-12);
        assert!((f24 - 563.77).abs() < 0.01);
        // Gradient at the minimizer is exactly zero.
        assert_eq!(b.eval_grad(&[0.0]), vec![0.0]);
    }

    #[test]
    fn benchmark_gradient_matches_finite_difference() {
        let b = bench();
        let h = 1e-6;
        for &x in &[0.3, 3.0, 5.9, 6.5, 7.2, 11.0, 24.0, -8.3, -24.0, 49.0] {
            let g = b.eval_grad(&[x])[0];
            let fd = (b.eval_f(&[x + h]) - b.eval_f(&[x - h])) / (2.0 * h);
            assert!(
                (g - fd).abs() / (1.0 + g.abs()) < 1e-6,
                "x={x}: analytic {g} vs central difference {fd}"
            );
        }
    }

    #[test]
    fn gd_converges_on_benchmark() {
        let b = bench();
        let p = AgdParams::gd(0.1).unwrap();
        let t = run(&b, Algo::Gd, &p, &[24.0], &[24.0], 1000, 1e-6);
        assert_eq!(t.status, RunStatus::Converged);
        assert!(t.last()[0].abs() <= 1e-6);
        assert_eq!(t.aux.len(), t.points.len() - 1);
    }

    #[test]
    fn fixed_point_stays_fixed() {
        let b = bench();
        let p = AgdParams::hb(0.1, 0.59).unwrap();
        let t = run(&b, Algo::Hb, &p, &[0.0], &[0.0], 50, 1e-12);
        assert_eq!(t.status, RunStatus::Converged);
        assert!(t.points.iter().all(|z| z[0] == 0.0));
    }

    #[test]
    fn zero_momentum_is_gd_bitwise() {
        let b = bench();
        let hb = run(
            &b,
            Algo::Hb,
            &AgdParams::hb(0.1, 0.0).unwrap(),
            &[24.0],
            &[24.0],
            200,
            1e-6,
        );
        let gd = run(
            &b,
            Algo::Gd,
            &AgdParams::gd(0.1).unwrap(),
            &[24.0],
            &[24.0],
            200,
            1e-6,
        );
        assert_eq!(hb.points, gd.points);
        let gen = run(
            &b,
            Algo::General,
            &AgdParams::new(0.1, 0.59, 0.0).unwrap(),
            &[24.0],
            &[24.0],
            200,
            1e-6,
        );
        let hb59 = run(
            &b,
            Algo::Hb,
            &AgdParams::hb(0.1, 0.59).unwrap(),
            &[24.0],
            &[24.0],
            200,
            1e-6,
        );
        assert_eq!(gen.points, hb59.points);

        let gen = run(
            &b,
            Algo::General,
            &AgdParams::new(0.1, 0.69, 0.69).unwrap(),
            &[24.0],
            &[24.0],
            200,
            1e-6,
        );
        let nag = run(
            &b,
            Algo::Nag,
            &AgdParams::nag(0.1, 0.69).unwrap(),
            &[24.0],
            &[24.0],
            200,
            1e-6,
        );
        assert_eq!(gen.points, nag.points);
        assert_eq!(gen.aux, nag.aux);
    }

    #[test]
    fn divergent_run_is_guarded() {
        let b = bench();
        // Far above the stable step-size range.
        let p = AgdParams::hb(8.0, 0.9).unwrap();
        let t = run(&b, Algo::Hb, &p, &[24.0], &[24.0], 100_000, 1e-9);
        assert_eq!(t.status, RunStatus::Diverged);
    }

    #[test]
    fn rc_holds_on_benchmark_grid() {
        let b = bench();
        let rc = RcParams::new(0.5, 0.5).unwrap();
        let report = verify_rc(&b, &rc, &grid_1d(-50.0, 50.0, 2001));
        assert!(
            report.all_nonnegative,
            "min slack {} at {:?}",
            report.min_slack, report.worst_point
        );

        // On the quadratic core the slack is exactly 0.75 z^2.
        let report = verify_rc(&b, &rc, &[vec![2.0]]);
        assert!((report.min_slack - 3.0).abs() < 1e-12);

        // At the minimizer the slack is zero.
        let report = verify_rc(&b, &rc, &[vec![0.0]]);
        assert_eq!(report.min_slack, 0.0);
    }

    #[test]
    fn quadratic_constraint_replay_along_trace() {
        let b = bench();
        let rc = RcParams::new(0.5, 0.5).unwrap();
        let m = crate::model::build_rc_quadform(&rc);
        let p = AgdParams::hb(0.1, 0.59).unwrap();
        let t = run(&b, Algo::Hb, &p, &[24.0], &[24.0], 1000, 1e-6);
        for y in &t.aux {
            let g = b.eval_grad(y);
            let val = m.eval_nd(&[y[0]], &[g[0]]);
            assert!(val >= -1e-12, "constraint violated at y={}", y[0]);
        }
    }

    #[test]
    fn certified_decay_replay() {
        let b = bench();
        let rc = RcParams::new(0.5, 0.5).unwrap();
        let p = AgdParams::hb(0.1, 0.59).unwrap();
        let cert = certify_rate(&rc, &p, 1e-5).expect("stable point certifies");
        let t = run(&b, Algo::Hb, &p, &[24.0], &[24.0], 1000, 1e-6);
        let report = check_certified_decay(&t, &cert.witness, cert.rho, &[0.0]);
        assert!(report.ok(), "{report:?}");

        // A corrupted rate must be caught.
        let report = check_certified_decay(&t, &cert.witness, cert.rho / 2.0, &[0.0]);
        assert!(!report.decay_ok);
        assert!(report.first_decay_violation.is_some());
    }

    #[test]
    fn decay_trivial_on_fixed_point() {
        let b = bench();
        let rc = RcParams::new(0.5, 0.5).unwrap();
        let p = AgdParams::gd(0.5).unwrap();
        let cert = certify_rate(&rc, &p, 1e-2).expect("interior point");
        let t = run(&b, Algo::Gd, &p, &[0.0], &[0.0], 10, 1e-12);
        let report = check_certified_decay(&t, &cert.witness, cert.rho, &[0.0]);
        assert!(report.ok());
    }

    #[test]
    fn safe_radius_values() {
        assert!((safe_init_radius(1.0, 1.0) - 1.0 / 10.0f64.sqrt()).abs() < 1e-15);
        assert!((safe_init_radius(1.0, 10.0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn safe_radius_keeps_y_local() {
        let b = bench();
        let rc = RcParams::new(0.5, 0.5).unwrap();
        let p = AgdParams::hb(0.1, 0.59).unwrap();
        let cert = certify_rate(&rc, &p, 1e-5).expect("stable point certifies");
        let eps = 10.0;
        let r = safe_init_radius(eps, cert.witness.cond_p);
        let t = run(&b, Algo::Hb, &p, &[r], &[r], 1000, 1e-9);
        assert!(max_y_deviation(&t, &[0.0]) <= eps);
    }

    #[test]
    fn multidim_trace_decay_and_csv() {
        // The analysis is dimension-free: the same 2x2 certificate bounds the
        // per-coordinate stacked state of a 2-d run.
        let oracle = ShiftedQuadratic { center: vec![1.0, -2.0] };
        let rc = RcParams::new(0.5, 0.5).unwrap();
        let p = AgdParams::hb(0.1, 0.59).unwrap();
        let cert = certify_rate(&rc, &p, 1e-5).expect("stable point certifies");

        let t = run(&oracle, Algo::Hb, &p, &[9.0, 8.0], &[9.0, 8.0], 1000, 1e-8);
        assert_eq!(t.status, RunStatus::Converged);
        let report = check_certified_decay(&t, &cert.witness, cert.rho, &[1.0, -2.0]);
        assert!(report.ok(), "{report:?}");

        let rc_report = verify_rc(&oracle, &rc, &[vec![3.0, 4.0], vec![-7.0, 0.5]]);
        assert!(rc_report.all_nonnegative);

        let mut buf = Vec::new();
        t.write_csv(&oracle, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("0,9;8,"));
    }

    #[test]
    fn csv_shape() {
        let b = bench();
        let p = AgdParams::gd(0.1).unwrap();
        let t = run(&b, Algo::Gd, &p, &[24.0], &[24.0], 5, 1e-12);
        let mut buf = Vec::new();
        t.write_csv(&b, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("k,z,dist,f"));
        assert_eq!(text.lines().count(), t.points.len() + 1);
        assert!(text.lines().nth(1).unwrap().starts_with("0,24,24,"));
    }
}

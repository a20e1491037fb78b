//! Closed-form stability analysis: theorem-style region membership for
//! heavy-ball and Nesterov momentum, the step-size restriction that makes the
//! shifted realization admissible, the admissible shift interval, and the
//! frequency-domain inequality decided both exactly and on a sampled grid.
//!
//! The frequency-domain route is canonical. The inequality is a quadratic in
//! `u = cos(omega)` that must be strictly negative on `[-1, 1]`; `fdi_exact`
//! decides it in exact rational arithmetic (endpoints plus interior vertex),
//! while `fdi_sampled` brute-forces a frequency grid and serves as the
//! independent cross-check. The closed-form heavy-ball region is equivalent to
//! the exact route away from branch boundaries; the closed-form Nesterov region
//! is partly implicit and is reported alongside the canonical verdict with
//! disagreements flagged, never silently reconciled.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::model::{AgdParams, RcParams};
use crate::Error;

/// Half-width of the band around every strict inequality inside which a
/// verdict is flagged as a boundary call.
pub const BOUNDARY_BAND: f64 = 1e-3;

/// Leading coefficients smaller than this collapse the quadratic to the
/// linear endpoint analysis.
const DEGENERATE_LEAD: f64 = 1e-14;

/// Which analysis produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    TheoremHb,
    TheoremNag,
    FdiExact,
    FdiSampled,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::TheoremHb => "theorem-hb",
            Route::TheoremNag => "theorem-nag",
            Route::FdiExact => "fdi-exact",
            Route::FdiSampled => "fdi-sampled",
        }
    }
}

/// Stability verdict for one parameter point.
///
/// `margin` is the signed distance of the governing inequality from its
/// boundary (positive strictly inside the stable region); `stable` is exactly
/// `margin > 0`, so boundary points come back unstable with a near-zero margin
/// and a `boundary` flag in `detail`.
#[derive(Clone, Debug, Serialize)]
pub struct RegionVerdict {
    pub stable: bool,
    pub route: Route,
    pub margin: f64,
    pub detail: String,
}

impl RegionVerdict {
    fn new(route: Route, margin: f64, mut detail: String) -> Self {
        if margin.abs() <= BOUNDARY_BAND {
            detail.push_str("; boundary");
        }
        Self {
            stable: margin > 0.0,
            route,
            margin,
            detail,
        }
    }

    /// True when the margin lies inside the boundary band.
    pub fn is_boundary(&self) -> bool {
        self.margin.abs() <= BOUNDARY_BAND
    }
}

/// Interval of admissible shifts; empty intervals are a normal outcome.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DeltaInterval {
    pub lo: f64,
    pub hi: f64,
    pub nonempty: bool,
}

impl DeltaInterval {
    pub fn empty() -> Self {
        Self {
            lo: 0.0,
            hi: 0.0,
            nonempty: false,
        }
    }

    /// Five deterministic interior candidates: the (already shrunk) endpoints,
    /// the midpoint, and the quartiles.
    pub fn sweep_points(&self) -> Vec<f64> {
        if !self.nonempty {
            return Vec::new();
        }
        if self.lo == self.hi {
            return vec![self.lo];
        }
        let w = self.hi - self.lo;
        vec![
            self.lo,
            self.lo + 0.25 * w,
            self.lo + 0.5 * w,
            self.lo + 0.75 * w,
            self.hi,
        ]
    }

    pub fn midpoint(&self) -> Option<f64> {
        if self.nonempty {
            Some(0.5 * (self.lo + self.hi))
        } else {
            None
        }
    }

    pub fn contains(&self, delta: f64) -> bool {
        self.nonempty && self.lo <= delta && delta <= self.hi
    }
}

/// Largest step size for which some shifted realization satisfies the side
/// conditions of the frequency-domain equivalence:
/// `2 (1 + beta1) (1 + sqrt(1 - mu lambda)) / (lambda (1 + 2 beta2))`.
///
/// A parameter point admits an admissible shift exactly when
/// `0 < alpha <` this value.
pub fn kypc_alpha_bound(rc: &RcParams, beta1: f64, beta2: f64) -> f64 {
    let s = (1.0 - rc.mu() * rc.lambda()).max(0.0).sqrt();
    2.0 * (1.0 + beta1) * (1.0 + s) / (rc.lambda() * (1.0 + 2.0 * beta2))
}

/// Interval of shifts `delta` for which the shifted realization satisfies all
/// side conditions: the Schur window `(-2(1+beta1)/(1+2beta2), 0)` intersected
/// with the window `[-alpha lambda / (1 - sqrt(1 - mu lambda)),
/// -alpha lambda / (1 + sqrt(1 - mu lambda))]` on which the shifted constraint
/// matrix keeps a nonnegative upper-left entry.
///
/// Endpoints are shrunk inward by a relative `1e-12` to stay clear of the
/// measure-zero degeneracies at the window edges. The interval is nonempty
/// exactly when `alpha < kypc_alpha_bound`, with the single-point interval at
/// `mu * lambda = 1` kept as a degenerate special case.
pub fn admissible_delta_interval(rc: &RcParams, p: &AgdParams) -> DeltaInterval {
    let s = (1.0 - rc.mu() * rc.lambda()).max(0.0).sqrt();
    let schur_lo = -2.0 * (1.0 + p.beta1()) / (1.0 + 2.0 * p.beta2());
    let al = p.alpha() * rc.lambda();
    if s == 0.0 {
        let d0 = -al;
        if d0 > schur_lo && d0 < 0.0 {
            return DeltaInterval {
                lo: d0,
                hi: d0,
                nonempty: true,
            };
        }
        return DeltaInterval::empty();
    }
    let lo = (-al / (1.0 - s)).max(schur_lo) * (1.0 - 1e-12);
    let hi = (-al / (1.0 + s)) * (1.0 + 1e-12);
    if lo < hi && hi < 0.0 {
        DeltaInterval {
            lo,
            hi,
            nonempty: true,
        }
    } else {
        DeltaInterval::empty()
    }
}

/// Coefficients `(a, b, c)` of the frequency-domain inequality
/// `a u^2 + b u + c < 0`, `u = cos(omega)`, in double precision.
pub(crate) fn fdi_coeffs(rc: &RcParams, p: &AgdParams) -> (f64, f64, f64) {
    let (mu, lam) = (rc.mu(), rc.lambda());
    let (al, b1, b2) = (p.alpha(), p.beta1(), p.beta2());
    let a = 4.0 * (al * b2 - mu * b1);
    let b = 2.0
        * (mu * (1.0 + b1) * (1.0 + b1) + lam * al * al * b2 * (1.0 + b2)
            - al * (1.0 + b1) * (1.0 + 2.0 * b2));
    let c = 2.0 * al * (1.0 + b1 + 2.0 * b1 * b2)
        - 2.0 * mu * (1.0 + b1 * b1)
        - lam * al * al * (b2 * b2 + (1.0 + b2) * (1.0 + b2));
    (a, b, c)
}

/// Exact-rational evaluation of the inequality maximum over `u` in `[-1, 1]`.
///
/// Every `f64` input converts exactly to a rational, so the coefficients and
/// the candidate values (endpoints plus the interior vertex) are computed
/// without rounding and the sign of the maximum is decided exactly. Only the
/// final margin is rounded back to double precision.
mod exact {
    use super::*;

    fn rat(x: f64) -> BigRational {
        BigRational::from_f64(x).expect("finite input")
    }

    pub(super) struct FdiMax {
        pub max: BigRational,
        pub at: &'static str,
    }

    pub(super) fn fdi_max(rc: &RcParams, p: &AgdParams) -> FdiMax {
        let mu = rat(rc.mu());
        let lam = rat(rc.lambda());
        let al = rat(p.alpha());
        let b1 = rat(p.beta1());
        let b2 = rat(p.beta2());
        let one = BigRational::from_integer(1.into());
        let two = BigRational::from_integer(2.into());
        let four = BigRational::from_integer(4.into());

        let a = &four * (&al * &b2 - &mu * &b1);
        let one_b1 = &one + &b1;
        let one_b2 = &one + &b2;
        let b = &two
            * (&mu * &one_b1 * &one_b1 + &lam * &al * &al * &b2 * &one_b2
                - &al * &one_b1 * (&one + &two * &b2));
        let c = &two * &al * (&one + &b1 + &two * &b1 * &b2)
            - &two * &mu * (&one + &b1 * &b1)
            - &lam * &al * &al * (&b2 * &b2 + &one_b2 * &one_b2);

        let h = |u: &BigRational| (&a * u + &b) * u + &c;
        let at_pos = h(&one);
        let at_neg = h(&(-&one));

        let (mut max, mut at) = if at_pos >= at_neg {
            (at_pos, "u=+1")
        } else {
            (at_neg, "u=-1")
        };

        // Interior vertex, skipped for degenerate leading coefficients where
        // the maximum is attained at an endpoint anyway.
        if a.to_f64().is_some_and(|af| af.abs() >= DEGENERATE_LEAD) {
            let vertex = -&b / (&two * &a);
            if vertex.abs() < one {
                let hv = h(&vertex);
                if hv > max {
                    max = hv;
                    at = "vertex";
                }
            }
        } else if a.is_zero() && b.is_zero() {
            at = "constant";
        } else if !a.is_zero() {
            at = if at == "u=+1" {
                "u=+1 (degenerate lead)"
            } else {
                "u=-1 (degenerate lead)"
            };
        }

        FdiMax { max, at }
    }
}

/// Exact decision of the frequency-domain inequality on the whole frequency
/// axis, combined with the step-size restriction.
///
/// The margin is the smaller of the inequality slack at its worst frequency
/// and the distance of `alpha` to the admissibility bound; the point is stable
/// exactly when both are strictly positive.
pub fn fdi_exact(rc: &RcParams, p: &AgdParams) -> RegionVerdict {
    let m = exact::fdi_max(rc, p);
    let fdi_margin = -m.max.to_f64().unwrap_or(f64::NAN);
    let alpha_margin = kypc_alpha_bound(rc, p.beta1(), p.beta2()) - p.alpha();
    let (margin, detail) = if alpha_margin < fdi_margin {
        (
            alpha_margin,
            format!("alpha-bound binding; fdi max at {}", m.at),
        )
    } else {
        (fdi_margin, format!("fdi max at {}", m.at))
    };
    RegionVerdict::new(Route::FdiExact, margin, detail)
}

/// Brute-force check of the same inequality on a uniform frequency grid over
/// `[0, pi]` (the inequality depends on the frequency only through its cosine,
/// so the other half circle is redundant). Serves as the independent oracle
/// for `fdi_exact`.
pub fn fdi_sampled(rc: &RcParams, p: &AgdParams, n_samples: usize) -> RegionVerdict {
    assert!(n_samples >= 2, "need at least the two endpoint samples");
    let (a, b, c) = fdi_coeffs(rc, p);
    let mut max = f64::NEG_INFINITY;
    let mut argmax = 0.0f64;
    let denom = (n_samples - 1) as f64;
    for i in 0..n_samples {
        let omega = std::f64::consts::PI * i as f64 / denom;
        let u = omega.cos();
        let h = (a * u + b) * u + c;
        if h > max {
            max = h;
            argmax = omega;
        }
    }
    let fdi_margin = -max;
    let alpha_margin = kypc_alpha_bound(rc, p.beta1(), p.beta2()) - p.alpha();
    let (margin, detail) = if alpha_margin < fdi_margin {
        (
            alpha_margin,
            format!("alpha-bound binding; {n_samples} samples, max at omega={argmax:.6}"),
        )
    } else {
        (
            fdi_margin,
            format!("{n_samples} samples, max at omega={argmax:.6}"),
        )
    };
    RegionVerdict::new(Route::FdiSampled, margin, detail)
}

/// Closed-form heavy-ball region membership.
///
/// The region is the union of the window `H1(beta) <= alpha <=
/// 2(beta+1)(1 - sqrt(1 - mu lambda))/lambda` and the low-step-size branch
/// `0 < alpha <= min(H1, H2)`, with
/// `H1 = mu (beta^2 + 6 beta + 1)/(beta + 1)` and `H2` the smaller root of the
/// quadratic `P1 alpha^2 - P2 alpha + P3`. Membership is evaluated strictly;
/// the verdict records which branch decided the point.
pub fn hb_region(rc: &RcParams, alpha: f64, beta: f64) -> RegionVerdict {
    assert!(
        alpha > 0.0 && beta > 0.0 && beta < 1.0,
        "closed-form region requires alpha > 0 and beta in (0, 1)"
    );
    let (mu, lam) = (rc.mu(), rc.lambda());
    let s = (1.0 - mu * lam).max(0.0).sqrt();

    let h1 = mu * (beta * beta + 6.0 * beta + 1.0) / (beta + 1.0);
    let p1 = 4.0 * mu * lam * beta - beta * beta - 1.0 - 2.0 * beta;
    let p2 = 2.0 * mu * beta + 2.0 * mu * beta * beta - 2.0 * mu * beta.powi(3) - 2.0 * mu;
    let p3 = 4.0 * mu * mu * beta.powi(3) + 4.0 * mu * mu * beta
        - 6.0 * mu * mu * beta * beta
        - mu * mu * beta.powi(4)
        - mu * mu;
    let disc = (p2 * p2 - 4.0 * p1 * p3).max(0.0);
    let h2 = (p2 - disc.sqrt()) / (2.0 * p1);
    let window_hi = 2.0 * (beta + 1.0) * (1.0 - s) / lam;

    let margin_window = (alpha - h1).min(window_hi - alpha);
    let margin_low = h1.min(h2) - alpha;

    let (margin, which) = if margin_window >= margin_low {
        (
            margin_window,
            "window branch [H1, 2(1+beta)(1-sqrt(1-mu*lambda))/lambda]",
        )
    } else {
        (margin_low, "low-step branch (0, min(H1, H2)]")
    };
    let detail = format!("H1={h1:.9} H2={h2:.9} window_hi={window_hi:.9}; {which}");
    RegionVerdict::new(Route::TheoremHb, margin, detail)
}

/// Closed-form Nesterov region membership.
///
/// The explicit branch `N1(beta) <= alpha < 2(beta+1)(1 - sqrt(1 - mu
/// lambda))/(lambda (1 + 2 beta))` is implemented verbatim. The second branch
/// is only implicit through a quartic side condition; here it is
/// taken as `alpha <= N1` together with either `alpha` below the
/// vertex-entry threshold (the smaller root of the `Q3` quadratic, below which
/// the inequality maximum sits at `cos(omega) = 1` and the point is stable
/// outright) or `g(S) <= 0` evaluated at the axis of symmetry `S`.
///
/// This route is reported alongside the canonical `fdi_exact` verdict and is
/// known to disagree with it in patches; callers flag any mismatch rather than
/// reconciling it.
pub fn nag_region(rc: &RcParams, alpha: f64, beta: f64) -> RegionVerdict {
    assert!(
        alpha > 0.0 && beta > 0.0 && beta < 1.0,
        "closed-form region requires alpha > 0 and beta in (0, 1)"
    );
    let (mu, lam) = (rc.mu(), rc.lambda());
    let q = mu * lam;
    let s = (1.0 - q).max(0.0).sqrt();

    if alpha == mu {
        // The quadratic degenerates to a line with nonpositive slope; the
        // worst frequency is cos(omega) = -1 and membership reduces to
        // 4(1-q) beta^2 + 4(1-q) beta - q < 0.
        let val = 4.0 * (1.0 - q) * beta * beta + 4.0 * (1.0 - q) * beta - q;
        let margin = -mu * val;
        return RegionVerdict::new(
            Route::TheoremNag,
            margin,
            "alpha equals mu: endpoint test at cos(omega) = -1".to_string(),
        );
    }

    let q1 = 1.0 + 7.0 * beta + 2.0 * beta * beta;
    let q2 = 4.0 * mu * lam * beta * (1.0 + beta);
    let q3 = 1.0 - beta + 2.0 * beta * beta;
    let denom = 2.0 * lam * beta * (beta + 1.0);

    let n1 = (q1
        - (q1 * q1 - (1.0 + 6.0 * beta + beta * beta) * q2)
            .max(0.0)
            .sqrt())
        / denom;
    let vertex_entry = (q3 - (q3 * q3 - (1.0 - beta) * (1.0 - beta) * q2).max(0.0).sqrt()) / denom;
    let window_hi = 2.0 * (beta + 1.0) * (1.0 - s) / (lam * (1.0 + 2.0 * beta));

    let axis = ((mu - alpha) * (1.0 + beta) * (1.0 + beta)
        + (lam * alpha * alpha - alpha) * (beta + beta * beta))
        / (4.0 * mu * beta - 4.0 * alpha * beta);
    let g = 4.0 * mu * beta * axis * axis
        - 2.0 * (2.0 * mu * beta + mu * beta * beta - alpha * beta + mu - alpha) * axis
        + 2.0 * mu
        + 2.0 * mu * beta * beta
        - 2.0 * alpha
        - 2.0 * alpha * beta
        + lam * alpha * alpha;

    let margin_window = (alpha - n1).min(window_hi - alpha);
    let margin_low = (n1 - alpha).min((vertex_entry - alpha).max(-g));

    let (margin, which) = if margin_window >= margin_low {
        (
            margin_window,
            "window branch [N1, 2(1+beta)(1-sqrt(1-mu*lambda))/(lambda(1+2beta)))",
        )
    } else {
        (
            margin_low,
            "low-step branch (alpha <= N1 with vertex-entry or g(S) <= 0)",
        )
    };
    let detail = format!(
        "N1={n1:.9} vertex_entry={vertex_entry:.9} window_hi={window_hi:.9} g(S)={g:.9}; {which}"
    );
    RegionVerdict::new(Route::TheoremNag, margin, detail)
}

/// Algorithm family of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Hb,
    Nag,
    /// Two-momentum iteration with a fixed inner momentum while the scan
    /// varies `(alpha, beta1)`.
    General {
        beta2: f64,
    },
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Hb => "hb",
            Family::Nag => "nag",
            Family::General { .. } => "general",
        }
    }

    /// Method parameters for a grid cell of this family.
    pub fn params(&self, alpha: f64, beta: f64) -> Result<AgdParams, Error> {
        match self {
            Family::Hb => AgdParams::hb(alpha, beta),
            Family::Nag => AgdParams::nag(alpha, beta),
            Family::General { beta2 } => AgdParams::new(alpha, beta, *beta2),
        }
    }
}

/// Verdict route used for each cell of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanRoute {
    FdiExact,
    FdiSampled { n_samples: usize },
    Theorem,
}

/// Dense verdict grid over an `(alpha, beta)` rectangle.
///
/// Cells are stored row major with `alpha` varying fastest:
/// `cells[bi * alphas.len() + ai]`.
#[derive(Clone, Debug, Serialize)]
pub struct RegionScan {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub family: Family,
    pub route: ScanRoute,
    pub cells: Vec<RegionVerdict>,
}

impl RegionScan {
    pub fn cell(&self, ai: usize, bi: usize) -> &RegionVerdict {
        &self.cells[bi * self.alphas.len() + ai]
    }

    pub fn stable_count(&self) -> usize {
        self.cells.iter().filter(|c| c.stable).count()
    }
}

/// Evaluates the requested route on every grid cell. Cells are independent
/// and evaluated in parallel; the output ordering is deterministic (row
/// major).
///
/// Theorem cells additionally run the canonical exact route and flag any
/// disagreement in their detail string.
pub fn region_scan(
    rc: &RcParams,
    family: Family,
    alphas: &[f64],
    betas: &[f64],
    route: ScanRoute,
) -> Result<RegionScan, Error> {
    if alphas.is_empty() || betas.is_empty() {
        return Err(Error::InvalidGrid("empty alpha or beta grid".into()));
    }
    for g in [alphas, betas] {
        if g.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(
                "grid values must be strictly increasing".into(),
            ));
        }
    }
    if alphas[0] <= 0.0 {
        return Err(Error::InvalidGrid("alpha grid must be positive".into()));
    }
    match route {
        ScanRoute::Theorem => {
            if matches!(family, Family::General { .. }) {
                return Err(Error::UnsupportedRoute {
                    route: "theorem",
                    family: "general",
                });
            }
            if betas[0] <= 0.0 {
                return Err(Error::InvalidGrid(
                    "theorem route requires beta in (0, 1)".into(),
                ));
            }
        }
        ScanRoute::FdiSampled { n_samples } => {
            if n_samples < 2 {
                return Err(Error::InvalidGrid(
                    "sampled route needs n_samples >= 2".into(),
                ));
            }
        }
        ScanRoute::FdiExact => {}
    }
    if let Family::General { beta2 } = family {
        if !(0.0..1.0).contains(&beta2) {
            return Err(Error::InvalidGrid("beta2 must lie in [0, 1)".into()));
        }
    }
    if *betas.last().unwrap() >= 1.0 || betas[0] < 0.0 {
        return Err(Error::InvalidGrid("beta grid must lie in [0, 1)".into()));
    }

    let na = alphas.len();
    let cells: Vec<RegionVerdict> = (0..na * betas.len())
        .into_par_iter()
        .map(|idx| {
            let alpha = alphas[idx % na];
            let beta = betas[idx / na];
            let p = family
                .params(alpha, beta)
                .expect("grid validation guarantees valid parameters");
            match route {
                ScanRoute::FdiExact => fdi_exact(rc, &p),
                ScanRoute::FdiSampled { n_samples } => fdi_sampled(rc, &p, n_samples),
                ScanRoute::Theorem => {
                    let mut v = match family {
                        Family::Hb => hb_region(rc, alpha, beta),
                        Family::Nag => nag_region(rc, alpha, beta),
                        Family::General { .. } => unreachable!("validated above"),
                    };
                    let canon = fdi_exact(rc, &p);
                    if canon.stable != v.stable {
                        v.detail.push_str("; disagrees with fdi-exact");
                    }
                    v
                }
            }
        })
        .collect();

    Ok(RegionScan {
        alphas: alphas.to_vec(),
        betas: betas.to_vec(),
        family,
        route,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rc55() -> RcParams {
        RcParams::new(0.5, 0.5).unwrap()
    }

    #[test]
    fn alpha_bound_values() {
        let b = kypc_alpha_bound(&rc55(), 0.0, 0.0);
        assert!((b - 2.0 * (1.0 + 0.75f64.sqrt()) / 0.5).abs() < 1e-12);
        assert!((b - 7.464101615).abs() < 1e-8);

        let b = kypc_alpha_bound(&RcParams::new(1.0, 1.0).unwrap(), 0.0, 0.0);
        assert!((b - 2.0).abs() < 1e-15);

        let b = kypc_alpha_bound(&rc55(), 0.59, 0.0);
        assert!((b - 11.867922).abs() < 1e-5);
    }

    #[test]
    fn delta_interval_values() {
        let p = AgdParams::hb(0.1, 0.59).unwrap();
        let iv = admissible_delta_interval(&rc55(), &p);
        assert!(iv.nonempty);
        assert!((iv.lo + 0.373205).abs() < 1e-5);
        assert!((iv.hi + 0.0267949).abs() < 1e-6);
        assert!(iv.lo < iv.hi && iv.hi < 0.0);

        // Interval is empty exactly above the admissibility bound.
        let bound = kypc_alpha_bound(&rc55(), 0.59, 0.0);
        let above = AgdParams::hb(bound * 1.01, 0.59).unwrap();
        assert!(!admissible_delta_interval(&rc55(), &above).nonempty);
        let below = AgdParams::hb(bound * 0.99, 0.59).unwrap();
        assert!(admissible_delta_interval(&rc55(), &below).nonempty);

        // Degenerate single point at mu*lambda = 1.
        let rc = RcParams::new(1.0, 1.0).unwrap();
        let p = AgdParams::gd(0.5).unwrap();
        let iv = admissible_delta_interval(&rc, &p);
        assert!(iv.nonempty);
        assert_eq!(iv.lo, iv.hi);
        assert!((iv.lo + 0.5).abs() < 1e-15);
        // ...unless the point falls outside the Schur window.
        let p = AgdParams::gd(2.5).unwrap();
        assert!(!admissible_delta_interval(&rc, &p).nonempty);
    }

    #[test]
    fn fdi_exact_reference_points() {
        // Stable heavy-ball point just below the threshold.
        let v = fdi_exact(&rc55(), &AgdParams::hb(0.1, 0.59).unwrap());
        assert!(v.stable, "{v:?}");

        // Unstable just above.
        let v = fdi_exact(&rc55(), &AgdParams::hb(0.1, 0.60).unwrap());
        assert!(!v.stable, "{v:?}");

        // Gradient descent: linear inequality, slack lambda*alpha^2 at u = 1.
        let v = fdi_exact(&rc55(), &AgdParams::gd(0.1).unwrap());
        assert!(v.stable);
        assert!((v.margin - 0.005).abs() < 1e-12, "margin {}", v.margin);
    }

    #[test]
    fn fdi_sampled_matches_exact() {
        for (alpha, beta) in [(0.1, 0.59), (0.1, 0.60), (0.1, 0.3), (0.5, 0.2), (1.2, 0.4)] {
            let p = AgdParams::hb(alpha, beta).unwrap();
            let e = fdi_exact(&rc55(), &p);
            let s = fdi_sampled(&rc55(), &p, 10_000);
            if e.margin.abs() > 1e-6 {
                assert_eq!(e.stable, s.stable, "alpha={alpha} beta={beta}");
            }
            assert!((e.margin - s.margin).abs() < 1e-5);
        }
    }

    #[test]
    fn hb_region_reference_points() {
        let v = hb_region(&rc55(), 0.1, 0.59);
        assert!(v.stable);
        // min(H1, H2) = H2 = mu (1-beta)^2 / (1+beta - 2 sqrt(mu lambda beta))
        // which is 0.10226486 here.
        assert!((v.margin - 0.00226486).abs() < 1e-6, "margin {}", v.margin);

        let v = hb_region(&rc55(), 0.1, 0.60);
        assert!(!v.stable);

        // At small beta the low-step branch tends to min(H1, H2) -> mu.
        let v = hb_region(&rc55(), 0.49, 1e-9);
        assert!(v.stable);
        let v = hb_region(&rc55(), 0.51, 1e-9);
        // 0.51 > mu but still inside the window branch [H1, 0.536].
        assert!(v.stable);
        let v = hb_region(&rc55(), 0.54, 1e-9);
        assert!(!v.stable);
    }

    #[test]
    fn hb_threshold_reference_value() {
        // sup { beta : stable } at alpha = 0.1 is close to 0.5942.
        let mut lo = 0.5;
        let mut hi = 0.7;
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if hb_region(&rc55(), 0.1, mid).stable {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 0.5942).abs() < 5e-4, "threshold {lo}");
    }

    #[test]
    fn nag_region_reference_points() {
        // Stable just below the 0.695 reference threshold.
        assert!(nag_region(&rc55(), 0.1, 0.69).stable);

        // Above the threshold the canonical route rejects the point. The
        // closed-form route's implicit second branch over-covers there; a
        // theorem-route scan must flag the mismatch instead of hiding it.
        assert!(!fdi_exact(&rc55(), &AgdParams::nag(0.1, 0.71).unwrap()).stable);
        let scan = region_scan(&rc55(), Family::Nag, &[0.1], &[0.71], ScanRoute::Theorem).unwrap();
        if scan.cells[0].stable {
            assert!(
                scan.cells[0].detail.contains("disagrees with fdi-exact"),
                "{:?}",
                scan.cells[0]
            );
        }

        // alpha = mu branch: stable up to the closed-form beta bound.
        let q = 0.25f64;
        let bound = (-1.0 + q + (1.0 - q).sqrt()) / (2.0 * (1.0 - q));
        let v = nag_region(&rc55(), 0.5, bound - 1e-3);
        assert!(v.stable, "{v:?}");
        let v = nag_region(&rc55(), 0.5, bound + 1e-3);
        assert!(!v.stable, "{v:?}");
    }

    #[test]
    fn nag_threshold_via_fdi() {
        let mut lo = 0.6;
        let mut hi = 0.8;
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if fdi_exact(&rc55(), &AgdParams::nag(0.1, mid).unwrap()).stable {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 0.6950).abs() < 5e-4, "threshold {lo}");
    }

    #[test]
    fn nag_matches_gd_limit() {
        // As beta -> 0 the Nesterov region agrees with the heavy-ball region.
        for alpha in [0.05, 0.2, 0.4, 0.52, 0.6, 0.9] {
            let n = nag_region(&rc55(), alpha, 1e-9);
            let h = hb_region(&rc55(), alpha, 1e-9);
            assert_eq!(n.stable, h.stable, "alpha={alpha}: {n:?} vs {h:?}");
        }
    }

    #[test]
    fn scan_single_cell_matches_pointwise() {
        let scan = region_scan(&rc55(), Family::Hb, &[0.1], &[0.59], ScanRoute::FdiExact).unwrap();
        let point = fdi_exact(&rc55(), &AgdParams::hb(0.1, 0.59).unwrap());
        assert_eq!(scan.cells.len(), 1);
        assert_eq!(scan.cells[0].stable, point.stable);
        assert_eq!(scan.cells[0].margin, point.margin);
    }

    #[test]
    fn scan_rejects_bad_grids() {
        let rc = rc55();
        assert!(region_scan(&rc, Family::Hb, &[], &[0.5], ScanRoute::FdiExact).is_err());
        assert!(region_scan(&rc, Family::Hb, &[0.2, 0.1], &[0.5], ScanRoute::FdiExact).is_err());
        assert!(region_scan(&rc, Family::Hb, &[0.1], &[1.0], ScanRoute::FdiExact).is_err());
        assert!(region_scan(
            &rc,
            Family::General { beta2: 0.2 },
            &[0.1],
            &[0.5],
            ScanRoute::Theorem
        )
        .is_err());
    }

    #[test]
    fn sampled_half_circle_equals_full_circle() {
        // cos-symmetry: sampling [0, 2pi] discovers nothing new.
        let full_circle = |rc: &RcParams, p: &AgdParams, n: usize| -> bool {
            let (a, b, c) = fdi_coeffs(rc, p);
            let mut max = f64::NEG_INFINITY;
            for i in 0..n {
                let omega = 2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64;
                let u = omega.cos();
                max = max.max((a * u + b) * u + c);
            }
            let am = kypc_alpha_bound(rc, p.beta1(), p.beta2()) - p.alpha();
            (-max).min(am) > 0.0
        };
        for (alpha, beta) in [(0.1, 0.3), (0.1, 0.62), (0.4, 0.1), (0.9, 0.8)] {
            let p = AgdParams::hb(alpha, beta).unwrap();
            for n in [4usize, 9, 101] {
                assert_eq!(
                    fdi_sampled(&rc55(), &p, n).stable,
                    full_circle(&rc55(), &p, 2 * n - 1)
                );
            }
        }
    }

    proptest! {
        // The admissibility bound grows with beta1 and shrinks with beta2 and
        // lambda.
        #[test]
        fn alpha_bound_monotonicity(mu in 0.05..1.0f64, lam in 0.05..1.0f64,
                                    b1 in 0.0..0.9f64, b2 in 0.0..0.9f64,
                                    db in 1e-3..0.09f64) {
            prop_assume!(mu * lam <= 1.0);
            let rc = RcParams::new(mu, lam).unwrap();
            prop_assert!(kypc_alpha_bound(&rc, b1 + db, b2) > kypc_alpha_bound(&rc, b1, b2));
            prop_assert!(kypc_alpha_bound(&rc, b1, b2 + db) < kypc_alpha_bound(&rc, b1, b2));
            if mu * (lam + db) <= 1.0 {
                let rc2 = RcParams::new(mu, lam + db).unwrap();
                prop_assert!(kypc_alpha_bound(&rc2, b1, b2) < kypc_alpha_bound(&rc, b1, b2));
            }
        }

        // Exact and sampled oracles agree away from the boundary.
        #[test]
        fn exact_vs_sampled(mu in 0.1..1.0f64, lam in 0.1..1.0f64,
                            alpha in 0.01..2.0f64, b1 in 0.0..0.95f64, b2 in 0.0..0.95f64) {
            prop_assume!(mu * lam <= 1.0);
            let rc = RcParams::new(mu, lam).unwrap();
            let p = AgdParams::new(alpha, b1, b2).unwrap();
            let e = fdi_exact(&rc, &p);
            if e.margin.abs() > 1e-6 {
                let s = fdi_sampled(&rc, &p, 10_000);
                prop_assert_eq!(e.stable, s.stable);
            }
        }

        // Nesterov energy for the degenerate alpha == mu branch matches the
        // canonical route.
        #[test]
        fn alpha_eq_mu_matches_fdi(mu in 0.1..1.0f64, t in 0.1..0.99f64, beta in 0.01..0.99f64) {
            let lam = t / mu;
            let rc = RcParams::new(mu, lam).unwrap();
            let v = nag_region(&rc, mu, beta);
            let f = fdi_exact(&rc, &AgdParams::nag(mu, beta).unwrap());
            if v.margin.abs() > 1e-9 && f.margin.abs() > 1e-9 {
                prop_assert_eq!(v.stable, f.stable, "mu={} lam={} beta={}", mu, lam, beta);
            }
        }
    }
}

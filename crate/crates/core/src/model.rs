//! Domain types: regularity constants, method parameters, state-space
//! realizations of the iteration, quadratic input/output constraints, and the
//! sector-bound conversion.
//!
//! Matrices are stored dimension-free: every realization is the 2x2 block of a
//! block-Kronecker system, and all downstream analysis works per coordinate, so
//! the `A (x) I_n` lift is never materialized.

use serde::Serialize;

use crate::linalg::{Mat2, Vec2};
use crate::Error;

/// Constants `(mu, lambda)` of the regularity condition
/// `<grad f(z), z - x*> >= (mu/2)||grad f(z)||^2 + (lambda/2)||z - x*||^2`,
/// with an optional neighborhood radius `epsilon` when the condition only
/// holds locally.
///
/// Cauchy-Schwarz forces `mu * lambda <= 1`; construction rejects anything
/// else rather than clamping, so `sqrt(1 - mu*lambda)` stays real downstream.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RcParams {
    mu: f64,
    lambda: f64,
    epsilon: Option<f64>,
}

impl RcParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self, Error> {
        if !mu.is_finite() || mu <= 0.0 {
            return Err(Error::InvalidRc {
                mu,
                lambda,
                reason: "mu must be positive and finite",
            });
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidRc {
                mu,
                lambda,
                reason: "lambda must be positive and finite",
            });
        }
        if mu * lambda > 1.0 {
            return Err(Error::InvalidRc {
                mu,
                lambda,
                reason: "mu * lambda must not exceed 1",
            });
        }
        Ok(Self {
            mu,
            lambda,
            epsilon: None,
        })
    }

    /// Marks the condition as holding only on the ball of radius `epsilon`
    /// around the minimizer.
    pub fn with_epsilon(self, epsilon: f64) -> Result<Self, Error> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidRc {
                mu: self.mu,
                lambda: self.lambda,
                reason: "epsilon must be positive and finite",
            });
        }
        Ok(Self {
            epsilon: Some(epsilon),
            ..self
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }
}

/// Step size and momentum pair of the two-momentum iteration
///
/// ```text
/// y_k     = (1 + beta2) z_k - beta2 z_{k-1}
/// z_{k+1} = (1 + beta1) z_k - beta1 z_{k-1} - alpha grad f(y_k)
/// ```
///
/// Heavy-ball is `beta2 = 0`, Nesterov acceleration is `beta1 = beta2`, and
/// plain gradient descent is `beta1 = beta2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AgdParams {
    alpha: f64,
    beta1: f64,
    beta2: f64,
}

impl AgdParams {
    pub fn new(alpha: f64, beta1: f64, beta2: f64) -> Result<Self, Error> {
        let reject = |reason| {
            Err(Error::InvalidAgd {
                alpha,
                beta1,
                beta2,
                reason,
            })
        };
        if !alpha.is_finite() || alpha <= 0.0 {
            return reject("alpha must be positive and finite");
        }
        if !(0.0..1.0).contains(&beta1) {
            return reject("beta1 must lie in [0, 1)");
        }
        if !(0.0..1.0).contains(&beta2) {
            return reject("beta2 must lie in [0, 1)");
        }
        Ok(Self {
            alpha,
            beta1,
            beta2,
        })
    }

    /// Gradient descent: no momentum.
    pub fn gd(alpha: f64) -> Result<Self, Error> {
        Self::new(alpha, 0.0, 0.0)
    }

    /// Heavy-ball: momentum on the iterate, gradient taken at `z_k`.
    pub fn hb(alpha: f64, beta: f64) -> Result<Self, Error> {
        Self::new(alpha, beta, 0.0)
    }

    /// Nesterov acceleration: gradient taken at the extrapolated point.
    pub fn nag(alpha: f64, beta: f64) -> Result<Self, Error> {
        Self::new(alpha, beta, beta)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }
}

/// Two-state single-input single-output realization of a method, possibly in
/// the slack-shifted form.
///
/// The second state row always implements the one-step delay
/// (`a[1] = [1, 0]`, `b[1] = 0`), and `d` is zero for every realization built
/// here; the matrix-inequality assembly nevertheless accepts a general `d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StateSpace {
    pub a: Mat2,
    pub b: Vec2,
    pub c: Vec2,
    pub d: f64,
    /// Shift used to build this realization, absent for the original form.
    pub delta: Option<f64>,
}

impl StateSpace {
    /// One step of the state recursion: `phi' = A phi + B u`.
    pub fn step(&self, phi: &Vec2, u: f64) -> Vec2 {
        [
            self.a[0][0] * phi[0] + self.a[0][1] * phi[1] + self.b[0] * u,
            self.a[1][0] * phi[0] + self.a[1][1] * phi[1] + self.b[1] * u,
        ]
    }

    /// Output map: `y = C phi + D u`.
    pub fn output(&self, phi: &Vec2, u: f64) -> f64 {
        self.c[0] * phi[0] + self.c[1] * phi[1] + self.d * u
    }
}

/// Symmetric 2x2 matrix encoding a quadratic constraint on stacked
/// `(y_k - y*, u_k - u*)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadForm {
    m: Mat2,
}

impl QuadForm {
    /// Builds the form from its upper triangle, so it is symmetric by
    /// construction.
    pub fn from_upper(m00: f64, m01: f64, m11: f64) -> Self {
        Self {
            m: [[m00, m01], [m01, m11]],
        }
    }

    pub fn new(m: Mat2) -> Result<Self, Error> {
        if m[0][1] != m[1][0] {
            return Err(Error::InvalidQuadForm("matrix must be exactly symmetric"));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> &Mat2 {
        &self.m
    }

    /// Evaluates the form on a scalar `(dy, du)` pair.
    pub fn eval(&self, dy: f64, du: f64) -> f64 {
        crate::linalg::quad_form2(&self.m, &[dy, du])
    }

    /// Evaluates the form on stacked vectors coordinate by coordinate, i.e.
    /// through the Kronecker-lifted matrix without materializing it.
    pub fn eval_nd(&self, dy: &[f64], du: &[f64]) -> f64 {
        assert_eq!(dy.len(), du.len());
        dy.iter().zip(du).map(|(&y, &u)| self.eval(y, u)).sum()
    }
}

/// Slopes `0 < m <= L` of the two lines bounding a sector nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorBound {
    m_lo: f64,
    l_hi: f64,
}

impl SectorBound {
    pub fn new(m_lo: f64, l_hi: f64) -> Result<Self, Error> {
        if !m_lo.is_finite() || m_lo <= 0.0 {
            return Err(Error::InvalidSector {
                m_lo,
                l_hi,
                reason: "lower slope must be positive",
            });
        }
        if !l_hi.is_finite() || l_hi < m_lo {
            return Err(Error::InvalidSector {
                m_lo,
                l_hi,
                reason: "upper slope must be finite and at least the lower slope",
            });
        }
        Ok(Self { m_lo, l_hi })
    }

    pub fn m_lo(&self) -> f64 {
        self.m_lo
    }

    pub fn l_hi(&self) -> f64 {
        self.l_hi
    }
}

/// Realization of the iteration as a linear system under gradient feedback
/// `u_k = grad f(y_k)`:
///
/// ```text
/// A = [1+beta1  -beta1]   B = [-alpha]   C = [1+beta2  -beta2]   D = 0
///     [1         0    ]       [ 0    ]
/// ```
pub fn build_original_system(p: &AgdParams) -> StateSpace {
    StateSpace {
        a: [[1.0 + p.beta1(), -p.beta1()], [1.0, 0.0]],
        b: [-p.alpha(), 0.0],
        c: [1.0 + p.beta2(), -p.beta2()],
        d: 0.0,
        delta: None,
    }
}

/// Realization with a slack multiple of the output moved into the feedback,
/// `u_k = -alpha grad f(y_k) - delta y_k`. The iterates are unchanged for any
/// `delta`; the shift only exists so the side conditions of the
/// frequency-domain equivalence can be met.
pub fn build_shifted_system(p: &AgdParams, delta: f64) -> StateSpace {
    StateSpace {
        a: [
            [
                1.0 + p.beta1() + delta + delta * p.beta2(),
                -(p.beta1() + delta * p.beta2()),
            ],
            [1.0, 0.0],
        ],
        b: [1.0, 0.0],
        c: [1.0 + p.beta2(), -p.beta2()],
        d: 0.0,
        delta: Some(delta),
    }
}

/// Quadratic form of the regularity condition on `(y - y*, u - u*)` with
/// `u = grad f(y)`:
///
/// ```text
/// M = [-lambda  1  ]
///     [ 1      -mu ]
/// ```
pub fn build_rc_quadform(rc: &RcParams) -> QuadForm {
    QuadForm::from_upper(-rc.lambda(), 1.0, -rc.mu())
}

/// Quadratic bound on the shifted feedback `u = -alpha grad f(y) - delta y`:
///
/// ```text
/// M' = [-(2 alpha delta + lambda alpha^2 + mu delta^2)   -alpha - mu delta]
///      [-alpha - mu delta                                 -mu             ]
/// ```
pub fn build_shifted_quadform(rc: &RcParams, p: &AgdParams, delta: f64) -> QuadForm {
    let alpha = p.alpha();
    QuadForm::from_upper(
        -(2.0 * alpha * delta + rc.lambda() * alpha * alpha + rc.mu() * delta * delta),
        -alpha - rc.mu() * delta,
        -rc.mu(),
    )
}

/// Converts a sector bound into the equivalent regularity constants
/// `lambda = 2mL/(m+L)`, `mu = 2/(m+L)`.
pub fn sector_to_rc(s: &SectorBound) -> RcParams {
    let sum = s.m_lo() + s.l_hi();
    let mu = 2.0 / sum;
    let mut lambda = 2.0 * s.m_lo() * s.l_hi() / sum;
    // mu*lambda = 4mL/(m+L)^2 <= 1 exactly; trim the last-ulp rounding cases
    // so the validated constructor cannot reject a mathematically valid pair.
    while mu * lambda > 1.0 {
        lambda = f64::from_bits(lambda.to_bits() - 1);
    }
    RcParams::new(mu, lambda).expect("sector conversion always yields valid constants")
}

/// Converts regularity constants into the equivalent sector slopes
/// `m = (1 - sqrt(1 - lambda mu))/mu`, `L = (1 + sqrt(1 - lambda mu))/mu`.
///
/// Validity of the input (`mu * lambda <= 1`) makes this total; the collapsed
/// sector `m = L = 1/mu` appears exactly at `mu * lambda = 1`.
pub fn rc_to_sector(rc: &RcParams) -> SectorBound {
    let s = (1.0 - rc.mu() * rc.lambda()).max(0.0).sqrt();
    let m_lo = (1.0 - s) / rc.mu();
    let l_hi = (1.0 + s) / rc.mu();
    SectorBound::new(m_lo, l_hi)
        .expect("conversion of valid constants always yields a valid sector")
}

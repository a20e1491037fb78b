//! Small fixed-size symmetric linear algebra for the certification routines.
//!
//! All matrices in this crate are 2x2 (certificates, quadratic constraints) or
//! 3x3 (assembled matrix inequalities), so everything is closed form: 2x2
//! eigenvalues from the characteristic quadratic, symmetric 3x3 eigenvalues via
//! the trigonometric solution of the characteristic cubic followed by Newton
//! polishing, and definiteness tests through leading principal minors. No
//! iterative eigensolver is involved, which keeps results deterministic.

/// 2-vector.
pub type Vec2 = [f64; 2];
/// 2x2 matrix, row major.
pub type Mat2 = [[f64; 2]; 2];
/// 3x3 matrix, row major.
pub type Mat3 = [[f64; 3]; 3];

/// Matrix-vector product `m * v`.
pub fn mat2_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Quadratic form `v' * m * v`.
pub fn quad_form2(m: &Mat2, v: &Vec2) -> f64 {
    let mv = mat2_vec(m, v);
    v[0] * mv[0] + v[1] * mv[1]
}

/// Builds a symmetric 2x2 matrix from its upper triangle.
pub fn sym2(m00: f64, m01: f64, m11: f64) -> Mat2 {
    [[m00, m01], [m01, m11]]
}

/// Eigenvalues of a symmetric 2x2 matrix, returned as `(min, max)`.
pub fn sym2_eigs(m: &Mat2) -> (f64, f64) {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let half_diff = 0.5 * (m[0][0] - m[1][1]);
    let r = half_diff.hypot(m[0][1]);
    (mean - r, mean + r)
}

/// Condition number of a symmetric positive definite 2x2 matrix.
///
/// Returns `f64::INFINITY` when the smallest eigenvalue is not positive.
pub fn sym2_cond(m: &Mat2) -> f64 {
    let (lo, hi) = sym2_eigs(m);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// Determinant of a 3x3 matrix.
pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Characteristic polynomial of a 3x3 matrix as `p(t) = t^3 + c2 t^2 + c1 t + c0`,
/// with `p(t) = det(tI - m)`.
fn char3(m: &Mat3) -> (f64, f64, f64) {
    let tr = m[0][0] + m[1][1] + m[2][2];
    // Sum of principal 2x2 minors.
    let m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    (-tr, m2, -det3(m))
}

/// Eigenvalues of a symmetric 3x3 matrix, ascending.
///
/// Trigonometric solution of the characteristic cubic with two Newton polishing
/// steps per root. Accurate to a few ulps for well-scaled inputs; the input is
/// rescaled by its largest entry first so the routine behaves uniformly across
/// problem scales.
pub fn sym3_eigs(m: &Mat3) -> [f64; 3] {
    let scale = m.iter().flatten().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return [0.0, 0.0, 0.0];
    }
    let inv = 1.0 / scale;
    let a: Mat3 = [
        [m[0][0] * inv, m[0][1] * inv, m[0][2] * inv],
        [m[1][0] * inv, m[1][1] * inv, m[1][2] * inv],
        [m[2][0] * inv, m[2][1] * inv, m[2][2] * inv],
    ];

    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let mut eigs = if p1 == 0.0 {
        [a[0][0], a[1][1], a[2][2]]
    } else {
        let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
        let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let ip = 1.0 / p;
        let b: Mat3 = [
            [(a[0][0] - q) * ip, a[0][1] * ip, a[0][2] * ip],
            [a[1][0] * ip, (a[1][1] - q) * ip, a[1][2] * ip],
            [a[2][0] * ip, a[2][1] * ip, (a[2][2] - q) * ip],
        ];
        let r = (det3(&b) / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
        let e2 = 3.0 * q - e1 - e3;
        [e3, e2, e1]
    };

    // Newton polishing on the characteristic cubic; clustered roots are left
    // alone when the derivative degenerates.
    let (c2, c1, c0) = char3(&a);
    for e in eigs.iter_mut() {
        for _ in 0..2 {
            let t = *e;
            let pv = ((t + c2) * t + c1) * t + c0;
            let dv = (3.0 * t + 2.0 * c2) * t + c1;
            if dv.abs() < 1e-12 {
                break;
            }
            let step = pv / dv;
            if !step.is_finite() || step.abs() > 0.5 * (1.0 + t.abs()) {
                break;
            }
            *e = t - step;
        }
    }
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    [eigs[0] * scale, eigs[1] * scale, eigs[2] * scale]
}

/// Largest eigenvalue of a symmetric 3x3 matrix.
pub fn sym3_max_eig(m: &Mat3) -> f64 {
    sym3_eigs(m)[2]
}

/// Tests `m + margin*I < 0` (strict) through leading principal minors.
///
/// Independent of the eigenvalue path: a symmetric matrix is negative definite
/// exactly when its leading principal minors alternate in sign starting
/// negative.
pub fn is_neg_def3(m: &Mat3, margin: f64) -> bool {
    let s: Mat3 = [
        [m[0][0] + margin, m[0][1], m[0][2]],
        [m[1][0], m[1][1] + margin, m[1][2]],
        [m[2][0], m[2][1], m[2][2] + margin],
    ];
    let d1 = s[0][0];
    let d2 = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    let d3 = det3(&s);
    d1 < 0.0 && d2 > 0.0 && d3 < 0.0
}

/// Tests `m - margin*I > 0` (strict) through leading principal minors.
pub fn is_pos_def2(m: &Mat2, margin: f64) -> bool {
    let d1 = m[0][0] - margin;
    let d2 = (m[0][0] - margin) * (m[1][1] - margin) - m[0][1] * m[1][0];
    d1 > 0.0 && d2 > 0.0
}

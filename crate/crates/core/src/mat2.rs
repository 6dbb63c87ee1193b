//! 2x2 real matrices with a carried log scale factor.
//!
//! Ordered products of segment exponentials `exp{d (lambda X + b Z)}` overflow
//! f64 for large beta, so every matrix is stored as `exp(log_scale) * m` with
//! `m` renormalized to unit max entry after each multiplication.

pub(crate) const LN_2: f64 = std::f64::consts::LN_2;

/// `ln cosh(x)`, stable for large |x|.
pub(crate) fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `ln(2 cosh(x))`.
pub(crate) fn log_2cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// Logistic function, stable on both tails.
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Row-major 2x2 matrix; index convention `m[to][from]`, with row/column 0
/// corresponding to spin +1 and 1 to spin -1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    /// Pauli Z = diag(1, -1) in the spin basis.
    pub const PAULI_Z: Mat2 = Mat2([[1.0, 0.0], [0.0, -1.0]]);

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, &v| acc.max(v.abs()))
    }
}

/// A 2x2 matrix `exp(log_scale) * m`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Scaled {
    pub m: Mat2,
    pub log_scale: f64,
}

impl Scaled {
    pub fn identity() -> Self {
        Scaled {
            m: Mat2::IDENTITY,
            log_scale: 0.0,
        }
    }

    pub fn from_mat(m: Mat2) -> Self {
        Scaled { m, log_scale: 0.0 }.renormalized()
    }

    fn renormalized(mut self) -> Self {
        let s = self.m.max_abs();
        if s > 0.0 && s.is_finite() {
            for row in self.m.0.iter_mut() {
                for v in row.iter_mut() {
                    *v /= s;
                }
            }
            self.log_scale += s.ln();
        }
        self
    }

    /// `self * rhs` (apply `rhs` first in time-ordered products).
    pub fn mul(&self, rhs: &Scaled) -> Scaled {
        Scaled {
            m: self.m.mul(&rhs.m),
            log_scale: self.log_scale + rhs.log_scale,
        }
        .renormalized()
    }

    /// Trace as `(sign, ln |trace|)`; sign is 0 for an exactly zero trace.
    pub fn signed_log_trace(&self) -> (f64, f64) {
        let t = self.m.trace();
        if t == 0.0 {
            (0.0, f64::NEG_INFINITY)
        } else {
            (t.signum(), t.abs().ln() + self.log_scale)
        }
    }

    /// Entry `(to, from)` as `(sign, ln |entry|)`.
    pub fn signed_log_entry(&self, to: usize, from: usize) -> (f64, f64) {
        let v = self.m.0[to][from];
        if v == 0.0 {
            (0.0, f64::NEG_INFINITY)
        } else {
            (v.signum(), v.abs().ln() + self.log_scale)
        }
    }
}

/// `exp{d (lambda X + b Z)}` as a scaled matrix.
///
/// Closed form: `cosh(dR) I + sinh(dR)/R (lambda X + b Z)` with
/// `R = sqrt(lambda^2 + b^2)`; the factor `cosh(dR)` is carried in the log
/// scale. At `R -> 0` the ratio `tanh(dR)/R` has the analytic limit `d`.
pub(crate) fn segment_exp(d: f64, lambda: f64, b: f64) -> Scaled {
    debug_assert!(d >= 0.0);
    let r = lambda.hypot(b);
    let x = d * r;
    // tau = tanh(dR)/R = d * tanh(x)/x
    let tau = if x < 1e-8 {
        d * (1.0 - x * x / 3.0)
    } else {
        x.tanh() / r
    };
    Scaled {
        m: Mat2([[1.0 + tau * b, tau * lambda], [tau * lambda, 1.0 - tau * b]]),
        log_scale: log_cosh(x),
    }
}

/// `exp{a Z} = diag(e^a, e^-a)` as a scaled matrix.
pub(crate) fn z_tilt(a: f64) -> Scaled {
    let s = a.abs();
    Scaled {
        m: Mat2([[(a - s).exp(), 0.0], [0.0, (-a - s).exp()]]),
        log_scale: s,
    }
}

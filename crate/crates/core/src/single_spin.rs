//! Exact computations for the one-circle spin measure with transverse weight
//! `lambda` and (piecewise) constant longitudinal field.
//!
//! Everything reduces to ordered products of 2x2 matrix exponentials
//! `exp{d (lambda X + b Z)}` around the circle:
//!
//! * the log moment generating functional
//!   `Lambda(h) = ln Tr prod_k exp{d_k (lambda X + b_k Z)} - ln Tr exp{beta lambda X}`,
//!   exact for piecewise constant fields;
//! * correlation functions, obtained by inserting Pauli Z at the requested
//!   times;
//! * closed forms and analytic derivatives for constant fields, where
//!   `Lambda(c 1) = ln cosh(beta R) - ln cosh(beta lambda)` with
//!   `R = sqrt(lambda^2 + c^2)`.
//!
//! Near `R -> 0` the formulas have removable singularities; series branches
//! keep every function accurate there.

use crate::circle::PiecewiseField;
use crate::mat2::{log_2cosh, log_cosh, segment_exp, z_tilt, Mat2, Scaled};
use crate::{QcwError, Result};

/// Stable `sech^2(x)`.
fn sech_sq(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    let d = 1.0 + e * e;
    4.0 * e * e / (d * d)
}

/// `Lambda(c 1) = ln cosh(beta R) - ln cosh(beta lambda)`, normalized so that
/// `Lambda(0) = 0`.
pub fn log_mgf_const(c: f64, lambda: f64, beta: f64) -> f64 {
    let r = lambda.hypot(c);
    log_cosh(beta * r) - log_cosh(beta * lambda)
}

/// Magnetization `M(c) = (1/beta) dLambda/dc = (c/R) tanh(beta R)`.
pub fn magnetization_const(c: f64, lambda: f64, beta: f64) -> f64 {
    let r = lambda.hypot(c);
    let x = beta * r;
    if x < 1e-4 {
        // tanh(x)/x = 1 - x^2/3 + O(x^4)
        beta * c * (1.0 - x * x / 3.0)
    } else {
        c * x.tanh() / r
    }
}

/// Variance density `v(c) = (1/beta) d^2 Lambda / dc^2`; at `c = 0` this is
/// the curve function `tanh(lambda beta)/lambda`.
pub fn variance_const(c: f64, lambda: f64, beta: f64) -> f64 {
    let r = lambda.hypot(c);
    let x = beta * r;
    if x < 1e-4 {
        beta * (1.0 - beta * beta * (r * r + 2.0 * c * c) / 3.0)
    } else {
        let t_over_r = x.tanh() / r;
        let s2 = sech_sq(x);
        t_over_r + (c * c / (r * r)) * (beta * s2 - t_over_r)
    }
}

/// Analytic `d^3 Lambda(c 1) / dc^3`.
pub fn log_mgf_third_deriv_const(c: f64, lambda: f64, beta: f64) -> f64 {
    let r = lambda.hypot(c);
    let x = beta * r;
    if x < 2e-3 {
        // -2 beta^4 c [1 - (4 beta^2 / 15)(5 c^2 + 3 lambda^2)] + O(x^4)
        return -2.0 * beta.powi(4)
            * c
            * (1.0 - 4.0 * beta * beta * (5.0 * c * c + 3.0 * lambda * lambda) / 15.0);
    }
    let t = x.tanh();
    let s2 = sech_sq(x);
    // F(R) = ln cosh(beta R): F' = beta t, F'' = beta^2 s2, F''' = -2 beta^3 s2 t
    let f1 = beta * t;
    let f2 = beta * beta * s2;
    let f3 = -2.0 * beta.powi(3) * s2 * t;
    f3 * c.powi(3) / r.powi(3) + 3.0 * lambda * lambda * c * (f2 * r - f1) / r.powi(5)
}

/// Fourth semi-invariant `s4 = -d^4 Lambda(h 1)/dh^4 |_{h=0}`, closed form
/// `3 beta [tanh(x) - x sech^2(x)] / lambda^3` with `x = beta lambda`;
/// strictly positive, with limit `2 beta^4` as `lambda -> 0`.
pub fn s4(lambda: f64, beta: f64) -> f64 {
    let x = beta * lambda;
    if x < 1e-2 {
        let x2 = x * x;
        2.0 * beta.powi(4) * (1.0 - 0.8 * x2 + (17.0 / 35.0) * x2 * x2)
    } else {
        3.0 * beta * (x.tanh() - x * sech_sq(x)) / lambda.powi(3)
    }
}

/// Zero-field two-point function
/// `mu(sigma_0 sigma_t) = cosh(lambda (beta - 2t)) / cosh(lambda beta)`.
pub fn two_point(t: f64, lambda: f64, beta: f64) -> Result<f64> {
    if !(0.0..=beta).contains(&t) {
        return Err(QcwError::param(format!("t = {t} outside [0, {beta}]")));
    }
    Ok((log_cosh(lambda * (beta - 2.0 * t)) - log_cosh(lambda * beta)).exp())
}

fn check_sorted(times: &[f64], beta: f64) -> Result<()> {
    for w in times.windows(2) {
        if w[0] > w[1] {
            return Err(QcwError::param("insertion times must be sorted"));
        }
    }
    if times.iter().any(|&t| !(0.0..beta).contains(&t)) {
        return Err(QcwError::param("insertion times must lie in [0, beta)"));
    }
    Ok(())
}

/// Multi-point correlator `< prod_i sigma(t_i) >` under the constant field
/// `c`, computed by inserting Z into the segment product at each time.
/// Times must be sorted; coincident times are allowed (sigma^2 = 1 emerges
/// from Z^2 = I).
pub fn correlator(times: &[f64], c: f64, lambda: f64, beta: f64) -> Result<f64> {
    check_sorted(times, beta)?;
    let mut acc = Scaled::identity();
    let mut prev = 0.0;
    for &t in times {
        acc = segment_exp(t - prev, lambda, c).mul(&acc);
        acc = Scaled::from_mat(Mat2::PAULI_Z).mul(&acc);
        prev = t;
    }
    acc = segment_exp(beta - prev, lambda, c).mul(&acc);
    let (sign, log_num) = acc.signed_log_trace();
    let log_den = log_2cosh(beta * lambda.hypot(c));
    Ok(sign * (log_num - log_den).exp())
}

/// Third Ursell function
/// `U(r,s,t) = <srss st> - <sr ss><st> - <ss st><sr> - <sr st><ss> + 2<sr><ss><st>`
/// under the constant field `c`, all correlators exact.
pub fn ursell3(r: f64, s: f64, t: f64, c: f64, lambda: f64, beta: f64) -> Result<f64> {
    if !(r <= s && s <= t) {
        return Err(QcwError::param("ursell3 times must satisfy r <= s <= t"));
    }
    let c3 = correlator(&[r, s, t], c, lambda, beta)?;
    let c_rs = correlator(&[r, s], c, lambda, beta)?;
    let c_st = correlator(&[s, t], c, lambda, beta)?;
    let c_rt = correlator(&[r, t], c, lambda, beta)?;
    let m_r = correlator(&[r], c, lambda, beta)?;
    let m_s = correlator(&[s], c, lambda, beta)?;
    let m_t = correlator(&[t], c, lambda, beta)?;
    Ok(c3 - c_rs * m_t - c_st * m_r - c_rt * m_s + 2.0 * m_r * m_s * m_t)
}

/// Right-hand side of the random-current bound on the third Ursell function
/// for ordered `r <= s <= t` and constant field `c >= 0`:
/// `-<sigma_0> e^{-(4 lambda + 2c) beta} (lambda^2/2) [(s-r)^2 + (t-s)^2 + (beta+r-t)^2]`.
pub fn rcb_bound(r: f64, s: f64, t: f64, c: f64, lambda: f64, beta: f64) -> f64 {
    let geom = (s - r).powi(2) + (t - s).powi(2) + (beta + r - t).powi(2);
    -magnetization_const(c, lambda, beta)
        * (-(4.0 * lambda + 2.0 * c) * beta).exp()
        * (lambda * lambda / 2.0)
        * geom
}

/// `Lambda(h)` for a piecewise constant field, exact: the ordered product of
/// the segment exponentials, normalized by `Tr exp{beta lambda X}`.
pub fn log_mgf_piecewise(h: &PiecewiseField, lambda: f64) -> f64 {
    let beta = h.beta();
    let mut acc = Scaled::identity();
    for (d, b) in h.segments() {
        acc = segment_exp(d, lambda, b).mul(&acc);
    }
    let (sign, log_num) = acc.signed_log_trace();
    debug_assert!(sign > 0.0);
    log_num - log_2cosh(beta * lambda)
}

/// Log moment generating function of the increment vector
/// `(sigma(t_1) - sigma(t_0), ..., sigma(t_0) - sigma(t_{n-1}))` around the
/// circle: `g[i]` weights the increment from `times[i]` to the cyclically
/// next point. The telescoping sum gives each time `t_j` the net diagonal
/// tilt `a_j = g_{j-1} - g_j` (indices mod n), so a constant `g` yields 0.
/// The background field is the constant `c`.
pub fn log_mgf_increments(
    times: &[f64],
    g: &[f64],
    c: f64,
    lambda: f64,
    beta: f64,
) -> Result<f64> {
    if times.is_empty() || times.len() != g.len() {
        return Err(QcwError::param(
            "need equally many partition times and coefficients",
        ));
    }
    for w in times.windows(2) {
        if w[0] >= w[1] {
            return Err(QcwError::param("partition must be strictly increasing"));
        }
    }
    check_sorted(times, beta)?;
    let n = times.len();
    let mut acc = Scaled::identity();
    let mut prev = 0.0;
    for j in 0..n {
        let a_j = g[(j + n - 1) % n] - g[j];
        acc = segment_exp(times[j] - prev, lambda, c).mul(&acc);
        acc = z_tilt(a_j).mul(&acc);
        prev = times[j];
    }
    acc = segment_exp(beta - prev, lambda, c).mul(&acc);
    let (sign, log_num) = acc.signed_log_trace();
    debug_assert!(sign > 0.0);
    Ok(log_num - log_2cosh(beta * lambda.hypot(c)))
}

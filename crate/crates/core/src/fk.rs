//! Exact samplers for the Fortuin-Kasteleyn puncture marginal and the
//! one-circle spin measure via Edwards-Sokal painting.
//!
//! At zero field the FK measure reweights Poisson(lambda) by `2^{#xi}`,
//! which resums into an explicit mixture: the empty configuration with
//! probability `2 e^{-lambda beta} / (e^{lambda beta} + e^{-lambda beta})`,
//! otherwise a zero-truncated Poisson(2 lambda beta) number of uniform
//! points. At positive field the sampler proposes from Poisson(2 lambda) and
//! rejects; the density ratio of the field-weighted FK law with respect to
//! the proposal is `prod_j cosh(h |I_j|)` for nonempty configurations and
//! `2 cosh(h beta)` for the empty one, so dividing by its supremum
//! `2 cosh(h beta)` gives an exact acceptance probability in (0, 1].

use rand::Rng;

use crate::circle::{sample_poisson, sorted_uniform_times, PointSet, SpinPath};
use crate::mat2::{log_cosh, sigmoid};
use crate::stats::{ks_dominated, poisson_sf, DominationKs};
use crate::{QcwError, Result};

/// Dominating Poisson intensity for the FK marginal: splitting a component
/// multiplies the cluster weight by at most 2, so arrivals are added at
/// conditional rate at most `2 lambda` regardless of `h`.
#[derive(Clone, Copy, Debug)]
pub struct Envelope {
    pub eta: f64,
}

impl Envelope {
    pub fn for_model(lambda: f64) -> Self {
        Envelope { eta: 2.0 * lambda }
    }
}

/// Exact draw from the zero-field FK measure `Q^beta_lambda`.
pub fn sample_q_zero<R: Rng + ?Sized>(lambda: f64, beta: f64, rng: &mut R) -> Result<PointSet> {
    if !(lambda >= 0.0) || !(beta > 0.0) {
        return Err(QcwError::param("need lambda >= 0 and beta > 0"));
    }
    if lambda == 0.0 {
        return PointSet::empty(beta);
    }
    let x = lambda * beta;
    // P(empty) = 2 e^{-x} / (e^x + e^{-x}) = 2 / (e^{2x} + 1)
    let p_empty = 2.0 / ((2.0 * x).exp() + 1.0);
    if rng.random::<f64>() < p_empty {
        return PointSet::empty(beta);
    }
    // n >= 1 with pmf proportional to (2x)^n / n!: zero-truncated Poisson
    let mu = 2.0 * x;
    let n = sample_zero_truncated_poisson(mu, rng);
    Ok(sorted_uniform_times(n, beta, rng))
}

/// Zero-truncated Poisson by inversion; exact for any positive mean.
fn sample_zero_truncated_poisson<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> usize {
    // q_n = P(N = n | N >= 1), built from the recurrence p_{n+1} = p_n mu/(n+1)
    let mut u = rng.random::<f64>() * (-(-mu).exp_m1()); // u in (0, 1 - e^{-mu})
    let mut n = 1usize;
    let mut p = mu * (-mu).exp();
    loop {
        if u < p || n > 10_000_000 {
            return n;
        }
        u -= p;
        n += 1;
        p *= mu / n as f64;
    }
}

/// Exact draw from the field-weighted FK measure `Q^beta_{lambda, h}` for
/// `h >= 0`, by rejection from Poisson(2 lambda).
pub fn sample_q_field<R: Rng + ?Sized>(
    lambda: f64,
    h: f64,
    beta: f64,
    rng: &mut R,
) -> Result<PointSet> {
    if !(h >= 0.0) {
        return Err(QcwError::param("sample_q_field requires h >= 0"));
    }
    if h == 0.0 {
        return sample_q_zero(lambda, beta, rng);
    }
    if lambda == 0.0 {
        return PointSet::empty(beta);
    }
    let log_sup = std::f64::consts::LN_2 + log_cosh(h * beta);
    loop {
        let xi = sample_poisson(2.0 * lambda, beta, rng)?;
        let log_ratio = if xi.is_empty() {
            log_sup
        } else {
            xi.components()
                .iter()
                .map(|arc| log_cosh(h * arc.length))
                .sum::<f64>()
        };
        let log_accept = log_ratio - log_sup;
        if log_accept > 1e-9 {
            return Err(QcwError::InvariantViolation(format!(
                "rejection acceptance ratio exceeds 1: log = {log_accept}"
            )));
        }
        if rng.random::<f64>().ln() < log_accept {
            return Ok(xi);
        }
    }
}

/// Edwards-Sokal painting: color each component `I` of the punctured circle
/// +1 with probability `e^{h|I|} / (e^{h|I|} + e^{-h|I|})`, independently;
/// the jumps of the resulting trajectory are exactly the punctures
/// separating unlike colors.
pub fn paint<R: Rng + ?Sized>(xi: &PointSet, h: f64, rng: &mut R) -> SpinPath {
    let beta = xi.beta();
    let arcs = xi.components();
    let colors: Vec<i8> = arcs
        .iter()
        .map(|arc| {
            if rng.random::<f64>() < sigmoid(2.0 * h * arc.length) {
                1
            } else {
                -1
            }
        })
        .collect();
    if xi.is_empty() {
        return SpinPath::constant(colors[0], beta).expect("valid constant path");
    }
    let n = arcs.len();
    // arc k runs from times[k]; its predecessor around the circle is k-1
    let mut jumps = Vec::new();
    for k in 0..n {
        let prev = (k + n - 1) % n;
        if colors[k] != colors[prev] {
            jumps.push(xi.times()[k]);
        }
    }
    // time 0 lies in the wrap arc (the one starting at the last puncture)
    // unless 0 is itself a puncture, in which case it starts arc 0
    let initial = if xi.times()[0] == 0.0 {
        colors[0]
    } else {
        colors[n - 1]
    };
    // a puncture at exactly 0 cannot be represented as a jump in (0, beta);
    // the color choice above makes the path right-continuous at 0 and the
    // event has probability zero under the continuous sampler
    jumps.retain(|&t| t > 0.0);
    if jumps.len() % 2 == 1 {
        jumps.pop();
    }
    SpinPath::new(initial, jumps, beta).expect("painted path is valid")
}

/// Draw from the one-circle spin measure `mu^beta_{lambda, h}` by sampling
/// the FK marginal and painting. Negative `h` is handled by a global flip.
pub fn sample_spin_path<R: Rng + ?Sized>(
    lambda: f64,
    h: f64,
    beta: f64,
    rng: &mut R,
) -> Result<SpinPath> {
    let habs = h.abs();
    let xi = sample_q_field(lambda, habs, beta, rng)?;
    let path = paint(&xi, habs, rng);
    Ok(if h < 0.0 { path.flipped() } else { path })
}

/// Report of the empirical stochastic-domination check of FK arrival counts
/// against Poisson(eta beta) with `eta = 2 lambda`.
#[derive(Clone, Copy, Debug)]
pub struct DominationReport {
    pub envelope: Envelope,
    pub ks: DominationKs,
}

/// Verify empirically that arrival counts under `Q^beta_{lambda, h}` are
/// stochastically dominated by Poisson(2 lambda beta), via a one-sided
/// Kolmogorov-Smirnov statistic on counting functionals.
pub fn domination_check<R: Rng + ?Sized>(
    lambda: f64,
    h: f64,
    beta: f64,
    samples: usize,
    rng: &mut R,
) -> Result<DominationReport> {
    let envelope = Envelope::for_model(lambda);
    let counts: Vec<u64> = (0..samples.max(1))
        .map(|_| sample_q_field(lambda, h, beta, rng).map(|xi| xi.len() as u64))
        .collect::<Result<_>>()?;
    let mean = envelope.eta * beta;
    let ks = ks_dominated(&counts, |k| poisson_sf(k, mean), 0.01)?;
    Ok(DominationReport { envelope, ks })
}

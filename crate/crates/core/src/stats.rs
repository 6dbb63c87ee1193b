//! Statistical utilities shared by the samplers and verification suites:
//! batch means, autocorrelation, goodness-of-fit tests, and a one-sided
//! Kolmogorov-Smirnov check for stochastic domination of counts.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

use crate::{QcwError, Result};

/// Sample mean and batch-mean standard error.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BatchMeans {
    pub mean: f64,
    pub std_err: f64,
    pub n_batches: usize,
}

/// Split a series into `n_batches` contiguous batches and estimate the mean
/// with the batch-mean standard error.
pub fn batch_means(series: &[f64], n_batches: usize) -> Result<BatchMeans> {
    if n_batches < 2 || series.len() < n_batches {
        return Err(QcwError::param(format!(
            "need at least {n_batches} samples for {n_batches} batches, got {}",
            series.len()
        )));
    }
    let means = batch_mean_series(series, n_batches);
    let mean = means.iter().sum::<f64>() / n_batches as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n_batches - 1) as f64;
    Ok(BatchMeans {
        mean,
        std_err: (var / n_batches as f64).sqrt(),
        n_batches,
    })
}

/// Per-batch means (equal batch sizes; a trailing remainder is dropped).
pub fn batch_mean_series(series: &[f64], n_batches: usize) -> Vec<f64> {
    let size = series.len() / n_batches;
    (0..n_batches)
        .map(|b| series[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect()
}

/// Integrated autocorrelation time with the standard self-consistent window
/// (window grows until it exceeds `c` times the running tau estimate).
pub fn integrated_autocorr_time(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 4 {
        return 0.5;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if var <= 0.0 {
        return 0.5;
    }
    let c = 6.0;
    let mut tau = 0.5;
    for t in 1..n / 2 {
        let mut acc = 0.0;
        for i in 0..n - t {
            acc += (series[i] - mean) * (series[i + t] - mean);
        }
        let rho = acc / ((n - t) as f64 * var);
        tau += rho;
        if (t as f64) >= c * tau {
            break;
        }
    }
    tau.max(0.5)
}

/// Effective sample size `n / (2 tau_int)`.
pub fn effective_sample_size(series: &[f64]) -> f64 {
    series.len() as f64 / (2.0 * integrated_autocorr_time(series))
}

/// Poisson pmf, computed in log space.
pub fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * mean.ln() - mean - ln_gamma(k as f64 + 1.0)).exp()
}

/// Poisson survival function `P(X >= k)`.
pub fn poisson_sf(k: u64, mean: f64) -> f64 {
    // sum the lighter tail for accuracy
    let cdf: f64 = (0..k).map(|i| poisson_pmf(i, mean)).sum();
    (1.0 - cdf).max(0.0)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square goodness-of-fit of observed counts against expected
/// probabilities. Bins are merged from the right until every expected count
/// is at least `min_expected`.
pub fn chi_square_gof(observed: &[u64], probs: &[f64], min_expected: f64) -> Result<GofResult> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(QcwError::param("observed and probs must match and be nonempty"));
    }
    let n: u64 = observed.iter().sum();
    let nf = n as f64;
    let mut bins: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (o, p) in observed.iter().zip(probs) {
        acc_o += *o as f64;
        acc_e += p * nf;
        if acc_e >= min_expected {
            bins.push((acc_o, acc_e));
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 || acc_o > 0.0 {
        if let Some(last) = bins.last_mut() {
            last.0 += acc_o;
            last.1 += acc_e;
        } else {
            bins.push((acc_o, acc_e));
        }
    }
    if bins.len() < 2 {
        return Err(QcwError::param("too few bins after merging"));
    }
    let statistic: f64 = bins
        .iter()
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = bins.len() - 1;
    let chi = ChiSquared::new(dof as f64)
        .map_err(|e| QcwError::Numeric(format!("chi-square dof: {e}")))?;
    Ok(GofResult {
        statistic,
        dof,
        p_value: 1.0 - chi.cdf(statistic),
    })
}

/// Two-sample chi-square test on count histograms (same binning), merging
/// sparse bins from the right.
pub fn chi_square_two_sample(a: &[u64], b: &[u64], min_expected: f64) -> Result<GofResult> {
    if a.len() != b.len() || a.is_empty() {
        return Err(QcwError::param("histograms must match and be nonempty"));
    }
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let (naf, nbf) = (na as f64, nb as f64);
    // merge bins until the pooled expected count is adequate in both samples
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut acc_a, mut acc_b) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc_a += *x as f64;
        acc_b += *y as f64;
        let pooled = (acc_a + acc_b) / (naf + nbf);
        if pooled * naf.min(nbf) >= min_expected {
            bins.push((acc_a, acc_b));
            acc_a = 0.0;
            acc_b = 0.0;
        }
    }
    if acc_a > 0.0 || acc_b > 0.0 {
        if let Some(last) = bins.last_mut() {
            last.0 += acc_a;
            last.1 += acc_b;
        }
    }
    if bins.len() < 2 {
        return Err(QcwError::param("too few bins after merging"));
    }
    let mut statistic = 0.0;
    for (x, y) in &bins {
        let tot = x + y;
        let ea = tot * naf / (naf + nbf);
        let eb = tot * nbf / (naf + nbf);
        statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    }
    let dof = bins.len() - 1;
    let chi = ChiSquared::new(dof as f64)
        .map_err(|e| QcwError::Numeric(format!("chi-square dof: {e}")))?;
    Ok(GofResult {
        statistic,
        dof,
        p_value: 1.0 - chi.cdf(statistic),
    })
}

/// One-sided Kolmogorov-Smirnov style check that empirical counts are
/// stochastically dominated by a reference distribution given through its
/// survival function: the violation statistic is
/// `max_k [ emp_sf(k) - ref_sf(k) ]`, positive values meaning the empirical
/// law puts more mass on large counts than the reference allows.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DominationKs {
    pub max_violation: f64,
    pub threshold: f64,
    pub n_samples: usize,
    pub dominated: bool,
}

pub fn ks_dominated<F: Fn(u64) -> f64>(
    counts: &[u64],
    ref_sf: F,
    alpha: f64,
) -> Result<DominationKs> {
    if counts.is_empty() {
        return Err(QcwError::param("no samples"));
    }
    let n = counts.len();
    let max_count = *counts.iter().max().unwrap();
    let mut max_violation = f64::NEG_INFINITY;
    for k in 0..=max_count + 1 {
        let emp_sf = counts.iter().filter(|&&c| c >= k).count() as f64 / n as f64;
        let v = emp_sf - ref_sf(k);
        if v > max_violation {
            max_violation = v;
        }
    }
    // one-sided DKW bound: P(sup emp - true > eps) <= exp(-2 n eps^2)
    let threshold = ((1.0 / alpha).ln() / (2.0 * n as f64)).sqrt();
    Ok(DominationKs {
        max_violation,
        threshold,
        n_samples: n,
        dominated: max_violation <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn batch_means_iid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let series: Vec<f64> = (0..4096).map(|_| rng.random_range(0.0..1.0)).collect();
        let bm = batch_means(&series, 32).unwrap();
        assert!((bm.mean - 0.5).abs() < 5.0 * bm.std_err);
        // iid uniform: se should be near sqrt(1/12 / n)
        let expect = (1.0 / 12.0 / 4096.0_f64).sqrt();
        assert!(bm.std_err < 3.0 * expect && bm.std_err > expect / 3.0);
    }

    #[test]
    fn autocorr_time_of_iid_is_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let series: Vec<f64> = (0..20_000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let tau = integrated_autocorr_time(&series);
        assert!((tau - 0.5).abs() < 0.15, "tau = {tau}");
        assert!(effective_sample_size(&series) > 0.7 * series.len() as f64);
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        let total: f64 = (0..60).map(|k| poisson_pmf(k, 5.0)).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
        assert_relative_eq!(poisson_sf(0, 3.0), 1.0);
    }

    #[test]
    fn chi_square_accepts_true_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mean = 4.0;
        let mut counts = vec![0u64; 30];
        for _ in 0..50_000 {
            // inversion sampling from the pmf
            let mut u: f64 = rng.random();
            let mut k = 0usize;
            while k < 29 {
                let p = poisson_pmf(k as u64, mean);
                if u < p {
                    break;
                }
                u -= p;
                k += 1;
            }
            counts[k] += 1;
        }
        let probs: Vec<f64> = (0..30).map(|k| poisson_pmf(k, mean)).collect();
        let gof = chi_square_gof(&counts, &probs, 5.0).unwrap();
        assert!(gof.p_value > 0.01, "p = {}", gof.p_value);
    }

    #[test]
    fn domination_detects_violation_and_accepts_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // counts from Poisson(2) dominated by Poisson(3)
        let draws: Vec<u64> = (0..20_000)
            .map(|_| {
                let mut u: f64 = rng.random();
                let mut k = 0u64;
                while k < 40 {
                    let p = poisson_pmf(k, 2.0);
                    if u < p {
                        break;
                    }
                    u -= p;
                    k += 1;
                }
                k
            })
            .collect();
        let ok = ks_dominated(&draws, |k| poisson_sf(k, 3.0), 0.01).unwrap();
        assert!(ok.dominated);
        // but Poisson(2) draws are not dominated by Poisson(1)
        let bad = ks_dominated(&draws, |k| poisson_sf(k, 1.0), 0.01).unwrap();
        assert!(!bad.dominated);
    }
}

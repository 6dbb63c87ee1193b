//! Value types and elementary geometry on the time circle of circumference
//! beta: Poisson puncture sets, piecewise constant spin trajectories and
//! piecewise constant fields.
//!
//! All types are immutable values; sampling takes an explicitly owned
//! generator. Times are plain doubles and coincident times are forbidden
//! (a probability-zero event under the continuous distributions used here;
//! samplers redraw on the rare rounding collision).

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::{QcwError, Result};

/// Strictly increasing arrival times of a point process on `[0, beta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    times: Vec<f64>,
    beta: f64,
}

/// One connected component of the punctured circle: starts at `start`, runs
/// clockwise for `length`, wrapping modulo beta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

/// Piecewise constant trajectory `sigma: S_beta -> {-1, +1}`, stored as the
/// value at time 0 plus its sign-change times. Periodicity on the circle
/// forces an even number of jumps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinPath {
    initial_sign: i8,
    jumps: Vec<f64>,
    beta: f64,
}

/// Piecewise constant real field on the circle: `values[k]` on
/// `[breakpoints[k], breakpoints[k+1])`, wrapping so that the last value
/// extends from the last breakpoint around through `breakpoints[0]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseField {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    beta: f64,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(QcwError::param(format!("beta must be positive, got {beta}")));
    }
    Ok(())
}

fn check_sorted_in(times: &[f64], lo: f64, hi: f64, what: &str) -> Result<()> {
    for w in times.windows(2) {
        if !(w[0] < w[1]) {
            return Err(QcwError::param(format!("{what} must be strictly increasing")));
        }
    }
    if let (Some(&first), Some(&last)) = (times.first(), times.last()) {
        if first < lo || last >= hi {
            return Err(QcwError::param(format!(
                "{what} must lie in [{lo}, {hi})"
            )));
        }
    }
    Ok(())
}

impl PointSet {
    pub fn new(times: Vec<f64>, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        check_sorted_in(&times, 0.0, beta, "point set times")?;
        Ok(Self { times, beta })
    }

    pub fn empty(beta: f64) -> Result<Self> {
        Self::new(Vec::new(), beta)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of connected components of the punctured circle; the
    /// unpunctured circle counts as one component.
    pub fn component_count(&self) -> usize {
        self.times.len().max(1)
    }

    /// Connected components of `S_beta \ xi`. Lengths always sum to beta.
    pub fn components(&self) -> Vec<Arc> {
        let n = self.times.len();
        if n == 0 {
            return vec![Arc {
                start: 0.0,
                length: self.beta,
            }];
        }
        (0..n)
            .map(|k| {
                let start = self.times[k];
                let length = if k + 1 < n {
                    self.times[k + 1] - start
                } else {
                    self.beta - start + self.times[0]
                };
                Arc { start, length }
            })
            .collect()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()).is_ok()
    }
}

/// Draw a homogeneous Poisson point process of the given intensity on the
/// circle: the count is Poisson(intensity * beta) and positions are i.i.d.
/// uniform, returned sorted. Deterministic given the generator state.
pub fn sample_poisson<R: Rng + ?Sized>(intensity: f64, beta: f64, rng: &mut R) -> Result<PointSet> {
    check_beta(beta)?;
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(QcwError::param(format!(
            "intensity must be nonnegative, got {intensity}"
        )));
    }
    if intensity == 0.0 {
        return PointSet::empty(beta);
    }
    let pois = Poisson::new(intensity * beta)
        .map_err(|e| QcwError::param(format!("bad Poisson mean: {e}")))?;
    let n = pois.sample(rng) as usize;
    Ok(sorted_uniform_times(n, beta, rng))
}

/// `n` i.i.d. uniform positions on `[0, beta)`, sorted; redraws on the
/// rounding-collision event so times are strictly increasing.
pub(crate) fn sorted_uniform_times<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> PointSet {
    loop {
        let mut times: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..beta)).collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if times.windows(2).all(|w| w[0] < w[1]) {
            return PointSet { times, beta };
        }
    }
}

impl SpinPath {
    pub fn new(initial_sign: i8, jumps: Vec<f64>, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if initial_sign != 1 && initial_sign != -1 {
            return Err(QcwError::param("initial sign must be +1 or -1"));
        }
        check_sorted_in(&jumps, 0.0, beta, "jump times")?;
        if jumps.first().is_some_and(|&t| t <= 0.0) {
            return Err(QcwError::param("jump times must lie in (0, beta)"));
        }
        if jumps.len() % 2 != 0 {
            return Err(QcwError::param(
                "periodicity requires an even number of jumps",
            ));
        }
        Ok(Self {
            initial_sign,
            jumps,
            beta,
        })
    }

    pub fn constant(sign: i8, beta: f64) -> Result<Self> {
        Self::new(sign, Vec::new(), beta)
    }

    pub fn initial_sign(&self) -> i8 {
        self.initial_sign
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Right-continuous evaluation, periodic with period beta.
    pub fn value_at(&self, t: f64) -> i8 {
        let t = t.rem_euclid(self.beta);
        // number of jumps in (0, t]
        let flips = self.jumps.partition_point(|&u| u <= t);
        if flips % 2 == 0 {
            self.initial_sign
        } else {
            -self.initial_sign
        }
    }

    /// The same trajectory with all signs reversed.
    pub fn flipped(&self) -> SpinPath {
        SpinPath {
            initial_sign: -self.initial_sign,
            jumps: self.jumps.clone(),
            beta: self.beta,
        }
    }

    /// Exact `\int_0^beta sigma(t) dt` from the jump structure.
    pub fn time_integral(&self) -> f64 {
        let mut total = 0.0;
        let mut sign = self.initial_sign as f64;
        let mut prev = 0.0;
        for &t in &self.jumps {
            total += sign * (t - prev);
            sign = -sign;
            prev = t;
        }
        total + sign * (self.beta - prev)
    }
}

/// True iff every jump of `sigma` is an arrival of `xi` (`sigma ~ xi`).
/// A jump-free path is compatible with every point set.
pub fn compatible(sigma: &SpinPath, xi: &PointSet) -> Result<bool> {
    if sigma.beta != xi.beta {
        return Err(QcwError::param(format!(
            "beta mismatch: path has {}, point set has {}",
            sigma.beta, xi.beta
        )));
    }
    Ok(sigma.jumps.iter().all(|&t| xi.contains(t)))
}

impl PiecewiseField {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if breakpoints.is_empty() {
            return Err(QcwError::param("field needs at least one breakpoint"));
        }
        if breakpoints.len() != values.len() {
            return Err(QcwError::param(
                "breakpoints and values must have equal length",
            ));
        }
        check_sorted_in(&breakpoints, 0.0, beta, "field breakpoints")?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(QcwError::param("field values must be finite"));
        }
        Ok(Self {
            breakpoints,
            values,
            beta,
        })
    }

    pub fn constant(value: f64, beta: f64) -> Result<Self> {
        Self::new(vec![0.0], vec![value], beta)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let t = t.rem_euclid(self.beta);
        let idx = self.breakpoints.partition_point(|&u| u <= t);
        if idx == 0 {
            // before the first breakpoint: wrap interval of the last value
            *self.values.last().unwrap()
        } else {
            self.values[idx - 1]
        }
    }

    /// Segments `(duration, value)` covering `[0, beta)` in time order.
    pub fn segments(&self) -> Vec<(f64, f64)> {
        let k = self.breakpoints.len();
        let mut segs = Vec::with_capacity(k + 1);
        if self.breakpoints[0] > 0.0 {
            segs.push((self.breakpoints[0], self.values[k - 1]));
        }
        for i in 0..k {
            let end = if i + 1 < k {
                self.breakpoints[i + 1]
            } else {
                self.beta
            };
            let d = end - self.breakpoints[i];
            if d > 0.0 {
                segs.push((d, self.values[i]));
            }
        }
        segs
    }

    /// `\int_0^beta h(t) dt`.
    pub fn integral(&self) -> f64 {
        self.segments().iter().map(|(d, v)| d * v).sum()
    }

    /// Squared L2 norm `\int_0^beta h(t)^2 dt`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.segments().iter().map(|(d, v)| d * v * v).sum()
    }

    /// Pointwise absolute value.
    pub fn abs_field(&self) -> PiecewiseField {
        PiecewiseField {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
            beta: self.beta,
        }
    }

    /// The rotated field `t -> h(t + s)`.
    pub fn rotated(&self, s: f64) -> PiecewiseField {
        let mut pairs: Vec<(f64, f64)> = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(&b, &v)| ((b - s).rem_euclid(self.beta), v))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        PiecewiseField {
            breakpoints: pairs.iter().map(|p| p.0).collect(),
            values: pairs.iter().map(|p| p.1).collect(),
            beta: self.beta,
        }
    }

    /// The same field with extra breakpoints inserted (values unchanged).
    pub fn refined(&self, extra: &[f64]) -> Result<PiecewiseField> {
        let mut bps = self.breakpoints.clone();
        for &t in extra {
            if !(0.0..self.beta).contains(&t) {
                return Err(QcwError::param("refinement points must lie in [0, beta)"));
            }
            if !bps.contains(&t) {
                bps.push(t);
            }
        }
        bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let values = bps.iter().map(|&b| self.value_at(b)).collect();
        PiecewiseField::new(bps, values, self.beta)
    }
}

/// Empirical mean `m_N(t) = N^{-1} sum_i sigma_i(t)` as a step function with
/// breakpoints at the union of all jump times.
pub fn mean_path(paths: &[SpinPath]) -> Result<PiecewiseField> {
    let first = paths
        .first()
        .ok_or_else(|| QcwError::param("mean_path needs at least one path"))?;
    let beta = first.beta;
    if paths.iter().any(|p| p.beta != beta) {
        return Err(QcwError::param("all paths must share beta"));
    }
    let n = paths.len() as f64;
    let mut bps: Vec<f64> = std::iter::once(0.0)
        .chain(paths.iter().flat_map(|p| p.jumps.iter().copied()))
        .collect();
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bps.dedup();
    let values = bps
        .iter()
        .map(|&t| paths.iter().map(|p| p.value_at(t) as f64).sum::<f64>() / n)
        .collect();
    PiecewiseField::new(bps, values, beta)
}

use serde::{Deserialize, Serialize};

use crate::{QcwError, Result};

/// Interaction polynomial P, stored with the constant term first.
///
/// The model requires super-linear growth at infinity: positive leading
/// coefficient and degree at least two. The standard Curie-Weiss interaction
/// is `P(x) = x^2 / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let degree = coeffs
            .iter()
            .rposition(|&c| c != 0.0)
            .ok_or_else(|| QcwError::param("polynomial must be nonzero"))?;
        if degree < 2 {
            return Err(QcwError::param(format!(
                "polynomial degree {degree} < 2: no super-linear growth"
            )));
        }
        if coeffs[degree] <= 0.0 {
            return Err(QcwError::param(
                "leading polynomial coefficient must be positive",
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(QcwError::param("polynomial coefficients must be finite"));
        }
        let mut coeffs = coeffs;
        coeffs.truncate(degree + 1);
        Ok(Self { coeffs })
    }

    /// `x^2 / 2`, the standard quadratic interaction.
    pub fn quadratic_standard() -> Self {
        Self {
            coeffs: vec![0.0, 0.0, 0.5],
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True when P is exactly quadratic, the case covered by the total-spin
    /// block decomposition and the one-dimensional variational analysis.
    pub fn is_quadratic(&self) -> bool {
        self.degree() == 2
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// Parameters of one model instance: inverse temperature, transverse field,
/// longitudinal field and the interaction polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: f64,
    pub lambda: f64,
    pub h: f64,
    pub polynomial: Polynomial,
}

impl ModelParams {
    pub fn new(beta: f64, lambda: f64, h: f64, polynomial: Polynomial) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(QcwError::param(format!("beta must be positive, got {beta}")));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(QcwError::param(format!(
                "lambda must be nonnegative, got {lambda}"
            )));
        }
        if !h.is_finite() {
            return Err(QcwError::param("h must be finite"));
        }
        Ok(Self {
            beta,
            lambda,
            h,
            polynomial,
        })
    }

    /// Standard model: `P(x) = x^2 / 2`.
    pub fn standard(beta: f64, lambda: f64, h: f64) -> Result<Self> {
        Self::new(beta, lambda, h, Polynomial::quadratic_standard())
    }
}

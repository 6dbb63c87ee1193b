//! Finite-difference derivatives with Richardson extrapolation.
//!
//! Used as an independent cross-check against the analytic derivative
//! formulas, and for the finite-difference gradients of the dual-field
//! optimizer. The extrapolation table halves the step each level; central
//! stencils make every column gain two orders.

/// k-th derivative of `f` at `x` via central differences with Richardson
/// extrapolation: base step `h0`, halved `levels` times.
pub fn richardson_derivative<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    order: u32,
    h0: f64,
    levels: usize,
) -> f64 {
    assert!((1..=4).contains(&order), "supported orders are 1..=4");
    assert!(h0 > 0.0 && levels >= 1);
    let stencil = |h: f64| -> f64 {
        match order {
            1 => (f(x + h) - f(x - h)) / (2.0 * h),
            2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
            3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h))
                / (2.0 * h * h * h),
            _ => (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                / (h * h * h * h),
        }
    };
    let mut table: Vec<f64> = Vec::with_capacity(levels + 1);
    for i in 0..=levels {
        let h = h0 / (1u64 << i) as f64;
        let mut value = stencil(h);
        // column j removes the O(h^{2j}) term
        let mut factor = 4.0;
        for prev in table.iter_mut() {
            let improved = (factor * value - *prev) / (factor - 1.0);
            *prev = value;
            value = improved;
            factor *= 4.0;
        }
        table.push(value);
    }
    *table.last().unwrap()
}

/// Central-difference gradient of a multivariate function, one coordinate at
/// a time with a relative step.
pub fn central_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], step: f64) -> Vec<f64> {
    let mut grad = vec![0.0; x.len()];
    let mut work = x.to_vec();
    for k in 0..x.len() {
        let h = step * (1.0 + x[k].abs());
        work[k] = x[k] + h;
        let fp = f(&work);
        work[k] = x[k] - h;
        let fm = f(&work);
        work[k] = x[k];
        grad[k] = (fp - fm) / (2.0 * h);
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derivatives_of_exp() {
        for order in 1..=4 {
            let d = richardson_derivative(|x| x.exp(), 0.3, order, 1e-3 * 8.0, 4);
            assert_relative_eq!(d, 0.3_f64.exp(), max_relative = 1e-7);
        }
    }

    #[test]
    fn fourth_derivative_of_log_cosh() {
        // d^4/dx^4 log cosh(x) = -2 sech^2(x) (sech^2(x) - 2 tanh^2(x))
        let x: f64 = 0.4;
        let s2 = 1.0 / x.cosh().powi(2);
        let t2 = x.tanh().powi(2);
        let exact = -2.0 * s2 * (s2 - 2.0 * t2);
        let d = richardson_derivative(|u| u.cosh().ln(), x, 4, 1e-2, 4);
        assert_relative_eq!(d, exact, max_relative = 1e-6);
    }

    #[test]
    fn gradient_of_quadratic() {
        let g = central_gradient(|x| x[0] * x[0] + 3.0 * x[1], &[2.0, -1.0], 1e-6);
        assert_relative_eq!(g[0], 4.0, max_relative = 1e-8);
        assert_relative_eq!(g[1], 3.0, max_relative = 1e-8);
    }
}

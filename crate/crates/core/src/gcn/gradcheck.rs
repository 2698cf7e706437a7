//! Finite-difference gradient verification.
//!
//! Every analytic backward pass in this crate is validated against central
//! differences of a scalar probe `loss(v) = sum(weights .* forward(v))`,
//! where the probe weights double as the upstream gradient. The utilities
//! here are exported so integration suites can run the same checks.

/// `|a - b| / max(|a|, |b|, floor)` — relative error with an absolute floor
/// so that near-zero gradients are compared absolutely.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Central difference `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn central_difference(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], i: usize, step: f64) -> f64 {
    let mut probe = x.to_vec();
    probe[i] = x[i] + step;
    let plus = f(&probe);
    probe[i] = x[i] - step;
    let minus = f(&probe);
    (plus - minus) / (2.0 * step)
}

/// Worst relative error between `analytic` and central differences of `f`
/// over every coordinate, with the offending index.
pub fn max_gradient_error(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x: &[f64],
    analytic: &[f64],
    step: f64,
) -> (f64, usize) {
    assert_eq!(x.len(), analytic.len());
    let mut worst = (0.0, 0);
    for i in 0..x.len() {
        let numeric = central_difference(f, x, i, step);
        let err = relative_error(analytic[i], numeric, 1e-5);
        if err > worst.0 {
            worst = (err, i);
        }
    }
    worst
}

pub const DEFAULT_STEP: f64 = 1e-5;
pub const DEFAULT_TOL: f64 = 1e-4;

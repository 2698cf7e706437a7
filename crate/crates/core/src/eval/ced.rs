//! Cumulative error distribution curves and their area under curve.

use crate::error::{CoreError, Result};
use std::io::Write;

pub const DEFAULT_CED_STEPS: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct CedCurve {
    pub thresholds: Vec<f64>,
    /// Fraction of samples with error at or below each threshold.
    pub fractions: Vec<f64>,
    /// Trapezoid area under the curve over `[0, cutoff]`.
    pub auc: f64,
    pub cutoff: f64,
}

/// `steps` evenly spaced thresholds covering `[0, cutoff]`.
pub fn uniform_thresholds(cutoff: f64, steps: usize) -> Result<Vec<f64>> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(CoreError::invalid(format!(
            "cutoff must be positive and finite, got {cutoff}"
        )));
    }
    if steps < 2 {
        return Err(CoreError::invalid("threshold grid needs at least 2 steps"));
    }
    Ok((0..steps)
        .map(|i| cutoff * i as f64 / (steps - 1) as f64)
        .collect())
}

/// Empirical distribution of `errors` sampled at `thresholds`, with the
/// area under the curve integrated up to `cutoff`.
pub fn ced(errors: &[f64], thresholds: &[f64], cutoff: f64) -> Result<CedCurve> {
    if errors.is_empty() {
        return Err(CoreError::invalid("CED needs at least one error value"));
    }
    if let Some(bad) = errors.iter().find(|e| !e.is_finite() || **e < 0.0) {
        return Err(CoreError::invalid(format!(
            "errors must be finite and non-negative, got {bad}"
        )));
    }
    if thresholds.is_empty() {
        return Err(CoreError::invalid("CED needs at least one threshold"));
    }
    if thresholds[0] < 0.0 || !thresholds.iter().all(|t| t.is_finite()) {
        return Err(CoreError::invalid(
            "thresholds must be finite and non-negative",
        ));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoreError::invalid("thresholds must be strictly ascending"));
    }
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(CoreError::invalid(format!(
            "cutoff must be positive and finite, got {cutoff}"
        )));
    }

    let mut sorted = errors.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let count = sorted.len() as f64;
    let fraction = |t: f64| sorted.partition_point(|e| *e <= t) as f64 / count;

    let fractions: Vec<f64> = thresholds.iter().map(|&t| fraction(t)).collect();

    // Integration nodes: the sampled points inside [0, cutoff], padded with
    // exact endpoint evaluations so the integral always spans the full range.
    let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(thresholds.len() + 2);
    if thresholds[0] > 0.0 {
        nodes.push((0.0, fraction(0.0)));
    }
    for (&t, &f) in thresholds.iter().zip(&fractions) {
        if t <= cutoff {
            nodes.push((t, f));
        }
    }
    if nodes.last().map(|&(t, _)| t < cutoff).unwrap_or(true) {
        nodes.push((cutoff, fraction(cutoff)));
    }
    let auc = nodes
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum();

    Ok(CedCurve {
        thresholds: thresholds.to_vec(),
        fractions,
        auc,
        cutoff,
    })
}

/// `threshold,fraction` rows followed by a summary comment line.
pub fn write_ced_csv<W: Write>(w: &mut W, curve: &CedCurve) -> Result<()> {
    writeln!(w, "threshold,fraction")?;
    for (t, f) in curve.thresholds.iter().zip(&curve.fractions) {
        writeln!(w, "{t},{f}")?;
    }
    writeln!(w, "# auc={} cutoff={}", curve.auc, curve.cutoff)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// The integral of the empirical distribution has the closed form
    /// `mean(max(0, cutoff - e))`, since each sample contributes a unit step
    /// from its error value onward.
    fn exact_auc(errors: &[f64], cutoff: f64) -> f64 {
        errors.iter().map(|e| (cutoff - e).max(0.0)).sum::<f64>() / errors.len() as f64
    }

    #[test]
    fn all_zero_errors_saturate_the_curve() {
        let thresholds = uniform_thresholds(0.1, DEFAULT_CED_STEPS).unwrap();
        let curve = ced(&[0.0; 5], &thresholds, 0.1).unwrap();
        assert!(curve.fractions.iter().all(|&f| f == 1.0));
        assert!((curve.auc - 0.1).abs() < 1e-12);
    }

    #[test]
    fn single_error_steps_at_its_value() {
        let thresholds = vec![0.0, 0.04, 0.05, 0.08, 0.1];
        let curve = ced(&[0.05], &thresholds, 0.1).unwrap();
        assert_eq!(curve.fractions, vec![0.0, 0.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn fractions_are_monotone_in_unit_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for _ in 0..20 {
            let errors: Vec<f64> = (0..50).map(|_| rng.gen_range(0.0..0.2)).collect();
            let thresholds = uniform_thresholds(0.1, 128).unwrap();
            let curve = ced(&errors, &thresholds, 0.1).unwrap();
            assert!(curve
                .fractions
                .windows(2)
                .all(|w| w[0] <= w[1] && (0.0..=1.0).contains(&w[0])));
            assert!(curve.auc >= 0.0 && curve.auc <= 0.1 + 1e-12);
        }
    }

    #[test]
    fn auc_approaches_the_fine_grid_and_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let errors: Vec<f64> = (0..300).map(|_| rng.gen_range(0.0..0.15)).collect();
        let cutoff = 0.1;
        let coarse = ced(
            &errors,
            &uniform_thresholds(cutoff, DEFAULT_CED_STEPS).unwrap(),
            cutoff,
        )
        .unwrap();
        let fine = ced(
            &errors,
            &uniform_thresholds(cutoff, 1 << 16).unwrap(),
            cutoff,
        )
        .unwrap();
        let exact = exact_auc(&errors, cutoff);
        assert!((coarse.auc - fine.auc).abs() / fine.auc < 1e-3);
        assert!((fine.auc - exact).abs() / exact < 1e-4);
    }

    #[test]
    fn integration_pads_missing_endpoints() {
        // thresholds cover only part of [0, cutoff]; padding keeps the
        // integral over the full range
        let curve = ced(&[0.02], &[0.03, 0.05], 0.1).unwrap();
        // exact integral: 0 before 0.02, 1 after -> 0.08
        assert!((curve.auc - 0.08).abs() < 0.011);
        let full = ced(&[0.02], &uniform_thresholds(0.1, 4096).unwrap(), 0.1).unwrap();
        assert!((full.auc - 0.08).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_inputs() {
        let thresholds = uniform_thresholds(0.1, 16).unwrap();
        assert!(ced(&[], &thresholds, 0.1).is_err());
        assert!(ced(&[0.05, -0.01], &thresholds, 0.1).is_err());
        assert!(ced(&[0.05, f64::NAN], &thresholds, 0.1).is_err());
        assert!(ced(&[0.05], &[0.1, 0.05], 0.1).is_err());
        assert!(ced(&[0.05], &[], 0.1).is_err());
        assert!(ced(&[0.05], &thresholds, 0.0).is_err());
        assert!(uniform_thresholds(0.1, 1).is_err());
        assert!(uniform_thresholds(-0.5, 16).is_err());
    }

    #[test]
    fn csv_rows_and_trailer() {
        let curve = ced(&[0.0, 0.1], &[0.0, 0.05, 0.1], 0.1).unwrap();
        let mut buf = Vec::new();
        write_ced_csv(&mut buf, &curve).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "threshold,fraction");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "0,0.5");
        assert!(lines[4].starts_with("# auc="), "{}", lines[4]);
        assert!(lines[4].contains("cutoff=0.1"));
    }
}

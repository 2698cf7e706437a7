//! Leaky rectified activation.

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};

fn check_slope(slope: f64) -> Result<()> {
    if !(slope > 0.0 && slope < 1.0) {
        return Err(CoreError::invalid(format!(
            "leaky slope must lie in (0, 1), got {slope}"
        )));
    }
    Ok(())
}

/// `y = x` for `x >= 0`, `slope * x` otherwise.
pub fn leaky_relu(x: &DenseMatrix, slope: f64) -> Result<DenseMatrix> {
    check_slope(slope)?;
    Ok(x.map(|v| if v >= 0.0 { v } else { slope * v }))
}

/// Upstream gradient times the activation's derivative at the forward
/// input; the kink at 0 takes the `x >= 0` branch.
pub fn leaky_relu_backward(x: &DenseMatrix, slope: f64, upstream: &DenseMatrix) -> Result<DenseMatrix> {
    check_slope(slope)?;
    Ok(x.zip_map(upstream, |v, g| if v >= 0.0 { g } else { slope * g }))
}

//! Normal quantile functions used by the grid-mapped baselines.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

fn check_unit(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("quantile argument {p} outside (0, 1)")))
    }
}

/// Quantile of the standard normal distribution.
pub fn standard_normal_quantile(p: f64) -> Result<f64> {
    check_unit(p)?;
    let n = Normal::standard();
    Ok(n.inverse_cdf(p))
}

/// Quantile of a real normal with variance 1/2.
pub fn half_variance_quantile(p: f64) -> Result<f64> {
    Ok(standard_normal_quantile(p)? * std::f64::consts::FRAC_1_SQRT_2)
}

use crate::error::Error;
use serde::{Deserialize, Serialize};

/// Numerical thresholds used across the toolkit.
///
/// All fields are strictly positive.  The CLI exposes them through a global
/// `--tol name=value` flag, hence [`Tolerances::set`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// On-curve residual bound for sup-norm-normalized points.
    pub on_curve_abs: f64,
    /// Relative threshold (against the spectral radius) below which an
    /// eigenvalue counts as zero when computing signatures.
    pub kernel_rank_rel: f64,
    /// Residual bound for Newton solves (pole equation).
    pub newton_residual: f64,
    /// Half-width of the guard band around degenerate parameters.
    pub degenerate_k_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            on_curve_abs: 1e-9,
            kernel_rank_rel: 1e-8,
            newton_residual: 1e-10,
            degenerate_k_band: 1e-6,
        }
    }
}

impl Tolerances {
    /// Set a field by name; used by the CLI `--tol` flag.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), Error> {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "tolerance {name} must be strictly positive, got {value}"
            )));
        }
        match name {
            "on_curve_abs" => self.on_curve_abs = value,
            "kernel_rank_rel" => self.kernel_rank_rel = value,
            "newton_residual" => self.newton_residual = value,
            "degenerate_k_band" => self.degenerate_k_band = value,
            _ => return Err(Error::InvalidInput(format!("unknown tolerance {name}"))),
        }
        Ok(())
    }

    /// Guard for parameters near a degenerate family member.
    pub fn check_band(&self, k: f64, center: f64) -> Result<(), Error> {
        if (k - center).abs() <= self.degenerate_k_band {
            Err(Error::DegenerateParameter(k))
        } else {
            Ok(())
        }
    }
}

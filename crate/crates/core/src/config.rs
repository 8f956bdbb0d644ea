use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by the dynamical- and parameter-plane code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Radius beyond which the Böttcher coordinate is evaluated by its product formula.
    pub r_big: f64,
    /// Tail diameter below which a ray counts as landed.
    pub land_tol: f64,
    /// Image-space distance to a critical value below which a ray counts as crashed.
    pub crash_tol: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Iteration budget for escape and Böttcher evaluation.
    pub escape_iter: usize,
    pub steps_per_level: usize,
    /// Separation below which two parameter rays count as co-landing.
    pub wake_tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            r_big: 1e8,
            land_tol: 1e-8,
            crash_tol: 1e-9,
            newton_tol: 1e-13,
            max_newton: 64,
            escape_iter: 5000,
            steps_per_level: 8,
            wake_tol: 1e-3,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("r_big", self.r_big),
            ("land_tol", self.land_tol),
            ("crash_tol", self.crash_tol),
            ("newton_tol", self.newton_tol),
            ("wake_tol", self.wake_tol),
        ];
        for (name, v) in reals {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.r_big <= 2.0 {
            return Err(Error::InvalidArgument("r_big must exceed 2".into()));
        }
        for (name, v) in [
            ("max_newton", self.max_newton),
            ("escape_iter", self.escape_iter),
            ("steps_per_level", self.steps_per_level),
        ] {
            if v == 0 {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// Potential at ray depth 0.
    pub fn g0(&self) -> f64 {
        self.r_big.ln()
    }
}

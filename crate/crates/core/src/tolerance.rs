use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every routine.
///
/// `eps_geom` drives rank, face and membership decisions, `eps_opt` the
/// convergence of the moment-map solver and `eps_limit` the jitter allowed
/// when judging limits and monotone curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_geom: f64,
    pub eps_opt: f64,
    pub eps_limit: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_geom: 1e-9,
            eps_opt: 1e-10,
            eps_limit: 1e-6,
        }
    }
}

impl Tolerance {
    pub fn new(eps_geom: f64, eps_opt: f64, eps_limit: f64) -> Result<Self> {
        let tol = Self {
            eps_geom,
            eps_opt,
            eps_limit,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;
        if !(finite_pos(self.eps_geom) && finite_pos(self.eps_opt) && finite_pos(self.eps_limit)) {
            return Err(Error::InvalidGeometry(
                "tolerances must be finite and strictly positive".into(),
            ));
        }
        if self.eps_opt > self.eps_geom {
            return Err(Error::InvalidGeometry(
                "optimizer tolerance must not exceed the geometric tolerance".into(),
            ));
        }
        Ok(())
    }
}

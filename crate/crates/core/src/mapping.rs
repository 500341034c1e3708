//! The `tanh(a x)` map between the real line and `(-1, 1)`.

use crate::error::{Result, ZsError};

/// `H(x) = tanh(a x)` with steepness `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainMap {
    a: f64,
}

impl DomainMap {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(ZsError::invalid(format!("map steepness must be positive and finite, got {a}")));
        }
        Ok(DomainMap { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn forward(&self, x: f64) -> f64 {
        (self.a * x).tanh()
    }

    /// `atanh(chi) / a`; the endpoints map to signed infinity.
    pub fn inverse(&self, chi: f64) -> Result<f64> {
        check_unit(chi)?;
        Ok(if chi == 1.0 {
            f64::INFINITY
        } else if chi == -1.0 {
            f64::NEG_INFINITY
        } else {
            // std's atanh is not exactly odd; keep mirrored nodes mirrored
            (chi.abs().atanh() / self.a).copysign(chi)
        })
    }

    /// `H'(x)` at the point `x = H⁻¹(chi)`, written as `a (1 - chi²)`.
    pub fn derivative_at_image(&self, chi: f64) -> Result<f64> {
        check_unit(chi)?;
        Ok(self.a * (1.0 - chi * chi))
    }
}

fn check_unit(chi: f64) -> Result<()> {
    if chi.abs() <= 1.0 {
        Ok(())
    } else {
        Err(ZsError::invalid(format!("mapped coordinate {chi} lies outside [-1, 1]")))
    }
}

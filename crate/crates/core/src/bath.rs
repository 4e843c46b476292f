//! Thermal damping bath.

use crate::{Error, Result, Sym2};

/// Damping rate `k` and mean thermal occupation `n̄` of the bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    pub k: f64,
    pub n_bar: f64,
}

impl BathParams {
    pub fn new(k: f64, n_bar: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::invalid("k", format!("must be finite and >= 0, got {k}")));
        }
        if !(n_bar.is_finite() && n_bar >= 0.0) {
            return Err(Error::invalid("n_bar", format!("must be finite and >= 0, got {n_bar}")));
        }
        Ok(BathParams { k, n_bar })
    }

    /// `k(2n̄ + 1)`, the strength of the injected noise.
    pub fn noise_strength(&self) -> f64 {
        self.k * (2.0 * self.n_bar + 1.0)
    }

    /// Diffusion matrix of the covariance, `k(2n̄+1)·diag(1/ω₀, ω₀)` in
    /// `(q, p)` ordering, for mode operators referenced to `ω₀`.
    pub fn diffusion(&self, omega0: f64) -> Sym2 {
        let c = self.noise_strength();
        Sym2::diagonal(c / omega0, c * omega0)
    }
}

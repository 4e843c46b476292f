//! Time series of evolved states, shared by both engines.

use crate::state::{state_to_params_with_det, von_neumann_entropy};
use crate::{Error, GaussianState, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: GaussianState,
    /// `det σ`.
    pub d: f64,
    /// Von Neumann entropy.
    pub s: f64,
    pub r: f64,
    pub nu: f64,
}

impl Sample {
    /// Derives entropy, squeezing and impurity from `state` and its
    /// determinant `d`, with mode operators referenced to `omega0`.
    pub fn new(t: f64, state: GaussianState, d: f64, omega0: f64) -> Result<Self> {
        let params = state_to_params_with_det(&state, omega0, d)?;
        let d = d.max(0.25);
        Ok(Sample {
            t,
            state,
            d,
            s: von_neumann_entropy(d)?,
            r: params.r,
            nu: params.nu,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    samples: Vec<Sample>,
}

impl Trajectory {
    /// Requires strictly increasing sample times.
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::invalid("samples", "times must be strictly increasing"));
        }
        Ok(Trajectory { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }
}

/// `n_steps + 1` equally spaced times from 0 to `t_max`.
pub fn uniform_grid(t_max: f64, n_steps: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::invalid("t_max", format!("must be finite and positive, got {t_max}")));
    }
    if n_steps < 2 {
        return Err(Error::invalid("n_steps", format!("must be at least 2, got {n_steps}")));
    }
    Ok((0..=n_steps)
        .map(|i| if i == n_steps { t_max } else { t_max * i as f64 / n_steps as f64 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_ends() {
        let g = uniform_grid(10.0, 4).unwrap();
        assert_eq!(g, vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert!(uniform_grid(1.0, 1).is_err());
        assert!(uniform_grid(0.0, 5).is_err());
    }

    #[test]
    fn sample_diagnostics() {
        let s = Sample::new(0.0, GaussianState::new(0.0, 0.0, 3.5, 0.0, 3.5).unwrap(), 12.25, 1.0).unwrap();
        assert!((s.nu - 3.0).abs() < 1e-14);
        assert!((s.s - (4.0 * 4f64.ln() - 3.0 * 3f64.ln())).abs() < 1e-14);
        assert_eq!(s.r, 0.0);
    }

    #[test]
    fn times_must_increase() {
        let s = Sample::new(1.0, GaussianState::vacuum(), 0.25, 1.0).unwrap();
        assert!(Trajectory::new(vec![s, s]).is_err());
        assert_eq!(Trajectory::new(vec![s]).unwrap().len(), 1);
    }
}

//! Time dependence of the squared oscillator frequency.

use crate::{Error, Result};

/// The squared frequency `ω²(t)` driving `φ̈ + ω²(t)φ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyProfile {
    /// `ω² = ω₀²`.
    Constant { omega0: f64 },
    /// `ω = iω₀`, so `ω² = -ω₀²`.
    Inverted { omega0: f64 },
    /// `ω = ω₀ √(1 + γt)`, so `ω² = ω₀²(1 + γt)`; negative past `t = -1/γ`.
    SqrtRamp { omega0: f64, gamma: f64 },
    /// Linear interpolation of `(t, ω²)` samples.
    Tabulated(Table),
}

/// Strictly increasing `(t, ω²)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Table {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("table", "need at least two samples"));
        }
        if samples.iter().any(|(t, w)| !t.is_finite() || !w.is_finite()) {
            return Err(Error::invalid("table", "samples must be finite"));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("table", "sample times must be strictly increasing"));
        }
        let (times, values) = samples.into_iter().unzip();
        Ok(Table { times, values })
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    fn eval(&self, t: f64) -> Result<f64> {
        let (start, end) = (self.start(), self.end());
        if !(start..=end).contains(&t) {
            return Err(Error::OutOfRange { t, start, end });
        }
        // first index with times[i] > t, clamped so that [i-1, i] brackets t
        let i = self
            .times
            .partition_point(|&x| x <= t)
            .clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (w0, w1) = (self.values[i - 1], self.values[i]);
        let s = (t - t0) / (t1 - t0);
        Ok(w0 + s * (w1 - w0))
    }
}

impl FrequencyProfile {
    pub fn constant(omega0: f64) -> Result<Self> {
        check_omega0(omega0)?;
        Ok(FrequencyProfile::Constant { omega0 })
    }

    pub fn inverted(omega0: f64) -> Result<Self> {
        check_omega0(omega0)?;
        Ok(FrequencyProfile::Inverted { omega0 })
    }

    pub fn sqrt_ramp(omega0: f64, gamma: f64) -> Result<Self> {
        check_omega0(omega0)?;
        if !gamma.is_finite() {
            return Err(Error::invalid("gamma", "must be finite"));
        }
        Ok(FrequencyProfile::SqrtRamp { omega0, gamma })
    }

    /// A tabulated profile. The table must bracket `t = 0` with `ω²(0) ≠ 0`,
    /// since the mode operators are referenced to `ω₀ = |ω(0)|`.
    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        let table = Table::new(samples)?;
        let w2 = table
            .eval(0.0)
            .map_err(|_| Error::invalid("table", "samples must bracket t = 0"))?;
        if w2 == 0.0 {
            return Err(Error::invalid("table", "ω²(0) must be non-zero"));
        }
        Ok(FrequencyProfile::Tabulated(table))
    }

    pub fn omega_squared(&self, t: f64) -> Result<f64> {
        match self {
            FrequencyProfile::Constant { omega0 } => Ok(omega0 * omega0),
            FrequencyProfile::Inverted { omega0 } => Ok(-omega0 * omega0),
            FrequencyProfile::SqrtRamp { omega0, gamma } => Ok(omega0 * omega0 * (1.0 + gamma * t)),
            FrequencyProfile::Tabulated(table) => table.eval(t),
        }
    }

    /// The reference frequency `ω₀ = |ω(0)|` at which the mode operators
    /// `a = √(ω₀/2)(q + ip/ω₀)` are defined.
    pub fn reference_frequency(&self) -> f64 {
        match self {
            FrequencyProfile::Constant { omega0 }
            | FrequencyProfile::Inverted { omega0 }
            | FrequencyProfile::SqrtRamp { omega0, .. } => *omega0,
            FrequencyProfile::Tabulated(table) => table
                .eval(0.0)
                .map(|w2| w2.abs().sqrt())
                .expect("tabulated profiles bracket t = 0"),
        }
    }

    /// Whether `ω²` is independent of time.
    pub fn is_autonomous(&self) -> bool {
        matches!(
            self,
            FrequencyProfile::Constant { .. } | FrequencyProfile::Inverted { .. }
        )
    }
}

fn check_omega0(omega0: f64) -> Result<()> {
    if omega0.is_finite() && omega0 > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("omega0", format!("must be finite and positive, got {omega0}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_profiles() {
        let c = FrequencyProfile::constant(1.0).unwrap();
        let i = FrequencyProfile::inverted(1.0).unwrap();
        let r = FrequencyProfile::sqrt_ramp(1.0, 1.0).unwrap();
        assert_eq!(c.omega_squared(7.0).unwrap(), 1.0);
        assert_eq!(i.omega_squared(7.0).unwrap(), -1.0);
        assert_eq!(r.omega_squared(3.0).unwrap(), 4.0);
        // past t = -1/γ the ramp turns into an inverted oscillator
        assert_eq!(r.omega_squared(-3.0).unwrap(), -2.0);
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let p = FrequencyProfile::tabulated(vec![(-1.0, 1.0), (0.0, 1.0), (2.0, 5.0)]).unwrap();
        assert_eq!(p.omega_squared(1.0).unwrap(), 3.0);
        assert_eq!(p.omega_squared(2.0).unwrap(), 5.0);
        assert_eq!(p.omega_squared(-1.0).unwrap(), 1.0);
        assert_eq!(p.reference_frequency(), 1.0);
        assert!(matches!(
            p.omega_squared(2.5),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn tabulated_rejects_bad_tables() {
        assert!(FrequencyProfile::tabulated(vec![(0.0, 1.0)]).is_err());
        assert!(FrequencyProfile::tabulated(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(FrequencyProfile::tabulated(vec![(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(FrequencyProfile::tabulated(vec![(-1.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn rejects_nonpositive_omega0() {
        assert!(FrequencyProfile::constant(0.0).is_err());
        assert!(FrequencyProfile::inverted(-1.0).is_err());
        assert!(FrequencyProfile::sqrt_ramp(f64::NAN, 1.0).is_err());
    }
}

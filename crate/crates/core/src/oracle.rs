//! Moment equations of the master equation, integrated directly.
//!
//! For `H = p²/2 + ω²(t) q²/2` and the thermal damping dissipator with mode
//! operator `a = √(ω₀/2)(q + ip/ω₀)`, first and second moments obey
//!
//! ```text
//! ṁ = A m,   σ̇ = A σ + σ Aᵀ + D_c,
//! A = [[-k, 1], [-ω²(t), -k]],   D_c = k(2n̄+1)·diag(1/ω₀, ω₀).
//! ```
//!
//! The derivation is written out in `docs/moment_equations.md`. Nothing here
//! goes through the characteristic-function engine.
//!
//! Besides the five moments the integrator carries `D = det σ`, which obeys
//! `Ḋ = -4kD + D_c,qq σ_pp + D_c,pp σ_qq` (Jacobi's formula with
//! `tr A = -2k`). Unstable runs inflate the entries far beyond `D`, so its
//! value cannot be recovered from them.

use crate::ode::{integrate_through, OdeOptions};
use crate::trajectory::{Sample, Trajectory};
use crate::{BathParams, Error, FrequencyProfile, GaussianState, Mat2, Result, Sym2};

#[derive(Debug, Clone)]
pub struct MomentOdeSystem<'a> {
    profile: &'a FrequencyProfile,
    k: f64,
    diffusion_q: f64,
    diffusion_p: f64,
}

impl<'a> MomentOdeSystem<'a> {
    pub fn new(profile: &'a FrequencyProfile, bath: &BathParams) -> Self {
        let omega0 = profile.reference_frequency();
        let c = bath.k * (2.0 * bath.n_bar + 1.0);
        MomentOdeSystem {
            profile,
            k: bath.k,
            diffusion_q: c / omega0,
            diffusion_p: c * omega0,
        }
    }

    pub fn drift(&self, t: f64) -> Result<Mat2> {
        let w2 = self.profile.omega_squared(t)?;
        Ok(Mat2::new(-self.k, 1.0, -w2, -self.k))
    }

    pub fn diffusion(&self) -> Sym2 {
        Sym2::diagonal(self.diffusion_q, self.diffusion_p)
    }

    /// `A σ + σ Aᵀ + D_c`.
    pub fn covariance_rate(&self, t: f64, sigma: &Sym2) -> Result<Sym2> {
        let [[a, b], [c, d]] = self.drift(t)?.0;
        let Sym2 { xx, xy, yy } = *sigma;
        Ok(Sym2::new(
            2.0 * (a * xx + b * xy) + self.diffusion_q,
            c * xx + (a + d) * xy + b * yy,
            2.0 * (c * xy + d * yy) + self.diffusion_p,
        ))
    }

    /// Right-hand side for `(m_q, m_p, σ_qq, σ_qp, σ_pp, D)`.
    pub fn rhs(&self, t: f64, y: &[f64; 6]) -> Result<[f64; 6]> {
        let a = self.drift(t)?;
        let [dmq, dmp] = a.apply([y[0], y[1]]);
        let ds = self.covariance_rate(t, &Sym2::new(y[2], y[3], y[4]))?;
        let trace = a.0[0][0] + a.0[1][1];
        let dd = 2.0 * trace * y[5] + self.diffusion_q * y[4] + self.diffusion_p * y[2];
        Ok([dmq, dmp, ds.xx, ds.xy, ds.yy, dd])
    }
}

/// Integrates the moment equations from `state0` at `t = 0` through every
/// time of `t_grid` (strictly increasing, starting at or after 0).
pub fn oracle_evolve(
    state0: &GaussianState,
    profile: &FrequencyProfile,
    bath: &BathParams,
    t_grid: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    if t_grid.first().is_some_and(|&t| !(t >= 0.0)) {
        return Err(Error::invalid("t_grid", "times must start at or after 0"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("t_grid", "times must be strictly increasing"));
    }
    let system = MomentOdeSystem::new(profile, bath);
    let omega0 = profile.reference_frequency();
    let y0 = [
        state0.mean_q,
        state0.mean_p,
        state0.s_qq,
        state0.s_qp,
        state0.s_pp,
        state0.det(),
    ];
    let mut stops: Vec<f64> = Vec::with_capacity(t_grid.len());
    let mut knots = match profile {
        FrequencyProfile::Tabulated(table) => table.samples().map(|(t, _)| t).filter(|&t| t > 0.0).collect(),
        _ => Vec::new(),
    }
    .into_iter()
    .peekable();
    // tabulated knots become extra stops so that no step straddles a kink
    for &t in t_grid {
        while let Some(&knot) = knots.peek() {
            if knot < t {
                stops.push(knot);
                knots.next();
            } else {
                break;
            }
        }
        stops.push(t);
    }

    let mut samples = Vec::with_capacity(t_grid.len());
    let mut grid = t_grid.iter().peekable();
    let mut failure = None;
    integrate_through(|t, y| system.rhs(t, y), 0.0, y0, &stops, OdeOptions::new(tol), |t, y| {
        if failure.is_some() || grid.peek() != Some(&&t) {
            return;
        }
        grid.next();
        let sample = GaussianState::with_det([y[0], y[1]], Sym2::new(y[2], y[3], y[4]), y[5])
            .and_then(|state| Sample::new(t, state, y[5], omega0));
        match sample {
            Ok(s) => samples.push(s),
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Trajectory::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::params_to_state;
    use crate::GaussianParams;
    use num_complex::Complex64;

    fn bath(k: f64, n_bar: f64) -> BathParams {
        BathParams::new(k, n_bar).unwrap()
    }

    #[test]
    fn drift_trace_and_diffusion() {
        let p = FrequencyProfile::sqrt_ramp(1.0, 1.0).unwrap();
        let sys = MomentOdeSystem::new(&p, &bath(0.7, 2.0));
        for t in [-0.5, 0.0, 3.0] {
            let a = sys.drift(t).unwrap();
            assert_eq!(a.0[0][0] + a.0[1][1], -1.4);
        }
        assert_eq!(sys.diffusion(), Sym2::diagonal(3.5, 3.5));
    }

    #[test]
    fn thermal_state_is_stationary() {
        for (omega0, k, n_bar) in [(1.0, 0.5, 0.0), (1.0, 1.5, 3.0), (2.0, 1.0, 1.0)] {
            let p = FrequencyProfile::constant(omega0).unwrap();
            let sys = MomentOdeSystem::new(&p, &bath(k, n_bar));
            let s = n_bar + 0.5;
            let rate = sys.covariance_rate(0.0, &Sym2::diagonal(s / omega0, s * omega0)).unwrap();
            assert!(rate.max_abs() <= 1e-12, "{rate:?}");
        }
    }

    #[test]
    fn thermalizes() {
        let p = FrequencyProfile::constant(1.0).unwrap();
        let traj = oracle_evolve(&GaussianState::vacuum(), &p, &bath(1.0, 3.0), &[0.0, 20.0], 1e-10).unwrap();
        let last = traj.last().unwrap();
        assert!(last.state.sigma().max_abs_diff(&Sym2::diagonal(3.5, 3.5)) < 1e-6);
        assert!((last.d - 12.25).abs() < 1e-5);
    }

    #[test]
    fn iho_saturates() {
        let s0 = params_to_state(&GaussianParams::new(Complex64::new(0.0, 0.0), 1.0, 0.0, 0.0).unwrap());
        let p = FrequencyProfile::inverted(1.0).unwrap();
        let traj = oracle_evolve(&s0, &p, &bath(1.5, 0.0), &[0.0, 10.0, 20.0], 1e-10).unwrap();
        assert_eq!(traj.len(), 3);
        assert!((traj.last().unwrap().d - 0.45).abs() < 1e-3);
    }

    #[test]
    fn unitary_runs_conserve_det() {
        let s0 = params_to_state(&GaussianParams::new(Complex64::new(0.5, 0.1), 1.0, 0.4, 3.0).unwrap());
        let grid: Vec<f64> = (0..=40).map(|i| 0.5 * i as f64).collect();
        for p in [
            FrequencyProfile::constant(1.0).unwrap(),
            FrequencyProfile::inverted(1.0).unwrap(),
            FrequencyProfile::sqrt_ramp(1.0, 1.0).unwrap(),
        ] {
            let traj = oracle_evolve(&s0, &p, &bath(0.0, 2.0), &grid, 1e-10).unwrap();
            for s in traj.samples() {
                assert!((s.d - s0.det()).abs() <= 1e-9, "{p:?} t={} d={}", s.t, s.d);
            }
        }
    }

    #[test]
    fn free_means_follow_the_oscillator() {
        let s0 = GaussianState::new(1.0, 0.0, 0.5, 0.0, 0.5).unwrap();
        let p = FrequencyProfile::constant(1.0).unwrap();
        let traj = oracle_evolve(&s0, &p, &bath(0.0, 0.0), &[std::f64::consts::FRAC_PI_2], 1e-12).unwrap();
        let s = traj.samples()[0].state;
        assert!(s.mean_q.abs() < 1e-10 && (s.mean_p + 1.0).abs() < 1e-10);
    }

    #[test]
    fn tabulated_profiles_and_bad_grids() {
        let p = FrequencyProfile::tabulated(vec![(-1.0, 1.0), (1.0, 1.0), (2.0, 4.0)]).unwrap();
        let traj = oracle_evolve(&GaussianState::vacuum(), &p, &bath(0.2, 0.0), &[0.5, 1.5, 2.0], 1e-10).unwrap();
        assert_eq!(traj.times().collect::<Vec<_>>(), vec![0.5, 1.5, 2.0]);
        assert!(oracle_evolve(&GaussianState::vacuum(), &p, &bath(0.2, 0.0), &[0.5, 3.0], 1e-10).is_err());
        assert!(oracle_evolve(&GaussianState::vacuum(), &p, &bath(0.2, 0.0), &[1.0, 0.5], 1e-10).is_err());
        assert!(oracle_evolve(&GaussianState::vacuum(), &p, &bath(0.2, 0.0), &[-1.0], 1e-10).is_err());
    }
}

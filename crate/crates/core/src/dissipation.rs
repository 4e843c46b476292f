//! Dissipative evolution through the characteristic (chord) function.
//!
//! With `χ(ξ) = exp(-i(ξ_p q̄ - ξ_q p̄) - ½ ξᵀ Σ_χ ξ)` over `ξ = (ξ_p, ξ_q)`,
//! the bath turns `χ_t(ξ)` into `χ₀` at the damped, classically transported
//! argument times `exp(-½ ξᵀ M(t) ξ)`. The dual covariance is `Σ_χ = K σ K`
//! with `K = diag(1, -1)`, and in covariance space the solution reads
//!
//! ```text
//! σ(t) = e^{-2kt} R σ(0) Rᵀ + N(t),   N = K M K,
//! M(t) = ∫₀ᵗ e^{2k(s-t)} P Bᵀ(s) diag(cω₀, c/ω₀) B(s) P ds,
//! ```
//!
//! where `R = R(0 → t)`, `B(s) = R(t → s)`, `c = k(2n̄ + 1)` and `P` swaps
//! the two components. For autonomous profiles `B(s)` depends only on
//! `s - t`; otherwise the two-time propagator is used.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::BathParams;
use crate::propagator::{BackwardSweep, ForwardSweep};
use crate::quadrature::{self, QuadOptions};
use crate::trajectory::{uniform_grid, Sample, Trajectory};
use crate::state::params_to_state_scaled;
use crate::{Error, FrequencyProfile, GaussianParams, GaussianState, Mat2, Result, Sym2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Local tolerance of the propagator integration.
    pub ode: f64,
    /// Quadrature tolerance for the noise matrix.
    pub quad: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { ode: 1e-10, quad: 1e-10 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tol.ode", self.ode), ("tol.quad", self.quad)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// A state together with its determinant.
///
/// For long unstable evolutions the covariance entries grow much faster
/// than `det σ`, so the determinant is carried separately rather than
/// recomputed from the entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolved {
    pub state: GaussianState,
    pub det: f64,
    /// Whether `det` was evaluated from the same matrices as the entries
    /// (and so matches them to rounding). Otherwise it comes from positive
    /// integrals and is more accurate than the entries can express.
    pub det_from_matrix: bool,
}

impl Evolved {
    pub fn from_state(state: GaussianState) -> Self {
        Evolved {
            state,
            det: state.det(),
            det_from_matrix: true,
        }
    }
}

/// `∫ e^{2k(s-t₁)} Bᵀ diag(cω₀, c/ω₀) B ds` over `[t₀, t₁]`, with
/// `B = R(t₁ → s)` from `sweep`.
fn kernel_integral(
    sweep: &BackwardSweep<'_>,
    omega0: f64,
    bath: &BathParams,
    t0: f64,
    tol: &Tolerances,
) -> Result<Sym2> {
    let t1 = sweep.end();
    let c = bath.noise_strength();
    if c == 0.0 || t1 == t0 {
        return Ok(Sym2::ZERO);
    }
    let (wq, wp) = (c * omega0, c / omega0);
    let k = bath.k;
    let integrand = |s: f64| -> Result<[f64; 3]> {
        let [[a, b], [cc, d]] = sweep.at(s)?.0;
        let w = (2.0 * k * (s - t1)).exp();
        Ok([
            w * (wq * a * a + wp * cc * cc),
            w * (wq * a * b + wp * cc * d),
            w * (wq * b * b + wp * d * d),
        ])
    };
    let panel = 0.1f64.min(1.0 / (2.0 * k + 2.0 * omega0));
    let g = quadrature::integrate(integrand, t0, t1, QuadOptions::new(tol.quad, panel))?;
    Ok(Sym2::from_array(g))
}

fn swap(g: Sym2) -> Sym2 {
    Sym2::new(g.yy, g.xy, g.xx)
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// The matrix `M(t)` of the characteristic-function solution, in
/// `(ξ_p, ξ_q)` ordering.
pub fn m_matrix(profile: &FrequencyProfile, bath: &BathParams, t: f64, tol: &Tolerances) -> Result<Sym2> {
    check_time(t)?;
    let sweep = BackwardSweep::new(profile, 0.0, t, tol.ode)?;
    kernel_integral(&sweep, profile.reference_frequency(), bath, 0.0, tol).map(swap)
}

/// The accumulated noise `N(t) = K M(t) K` in covariance space.
pub fn noise_matrix(profile: &FrequencyProfile, bath: &BathParams, t: f64, tol: &Tolerances) -> Result<Sym2> {
    m_matrix(profile, bath, t, tol).map(|m| m.reflect())
}

/// `(1 - e^{-at})/a`, continued by `t` at `a = 0`.
fn relaxation(a: f64, t: f64) -> f64 {
    if a.abs() < 1e-8 {
        t
    } else {
        -(-a * t).exp_m1() / a
    }
}

/// `M(t)` for the inverted oscillator `ω² = -ω₀²`, in closed form.
pub fn m_matrix_iho_closed(omega0: f64, bath: &BathParams, t: f64) -> Sym2 {
    let h = bath.k * (bath.n_bar + 0.5);
    let plus = relaxation(2.0 * bath.k + 2.0 * omega0, t);
    let minus = relaxation(2.0 * bath.k - 2.0 * omega0, t);
    Sym2::new(h * (plus + minus) / omega0, h * (plus - minus), h * (plus + minus) * omega0)
}

/// Long-time limit of `det σ` for the inverted oscillator, which exists
/// only when damping outpaces the instability.
pub fn d_asymptote_iho(omega0: f64, bath: &BathParams) -> Result<f64> {
    let k = bath.k;
    if k <= omega0 {
        return Err(Error::NoAsymptote { k, omega0 });
    }
    let h = k * (bath.n_bar + 0.5);
    Ok(h * h / (k * k - omega0 * omega0))
}

/// The dual covariance `Σ_χ = K σ K` in `(ξ_p, ξ_q)` ordering.
pub fn dual_covariance(state: &GaussianState) -> Sym2 {
    state.sigma().reflect()
}

/// `χ(ξ)` normalized to `χ(0) = 1`.
pub fn chi_at(state: &GaussianState, xi_p: f64, xi_q: f64) -> Complex64 {
    let phase = -(xi_p * state.mean_q - xi_q * state.mean_p);
    let quad = xi_p * xi_p * state.s_qq - 2.0 * xi_p * xi_q * state.s_qp + xi_q * xi_q * state.s_pp;
    Complex64::from_polar((-0.5 * quad).exp(), phase)
}

/// `R` rescaled to unit determinant when its computed determinant is
/// reliable; integration error otherwise leaks into `det σ`.
fn unimodular(r: Mat2) -> Mat2 {
    let [[a, b], [c, d]] = r.0;
    let bc = b * c;
    let w = a.mul_add(d, -bc) - b.mul_add(c, -bc);
    if (w - 1.0).abs() < 1e-6 {
        let s = w.sqrt().recip();
        Mat2::new(a * s, b * s, c * s, d * s)
    } else {
        r
    }
}

/// `det σ(t₁)` from integrals with positive integrands, for when
/// `det(U + N)` of the computed matrices is swamped by rounding.
///
/// With `X(s) = R(t₀ → s) σ₀ R(t₀ → s)ᵀ` and `C = diag(c_q, c_p)`,
///
/// ```text
/// det σ = e^{-4kΔ} det σ₀ + det N + e^{-2kΔ} ∫ e^{-2k(t₁-s)} (c_p X_qq + c_q X_pp) ds
/// ```
///
/// and, for autonomous profiles, Jacobi's formula for `N` gives
///
/// ```text
/// det N = ∫₀^Δ e^{-2kx} ψ(x) (1 - e^{-4k(Δ-x)}) / 4k dx,   ψ = c_p Y_qq + c_q Y_pp,
/// ```
///
/// with `Y(x) = R(0 → x) C R(0 → x)ᵀ`. Otherwise `det N` is taken from
/// the matrix itself.
fn det_from_integrals(
    from: &Evolved,
    profile: &FrequencyProfile,
    bath: &BathParams,
    t0: f64,
    t1: f64,
    noise: &Sym2,
    tol: &Tolerances,
) -> Result<f64> {
    let omega0 = profile.reference_frequency();
    let diffusion = bath.diffusion(omega0);
    let (cq, cp) = (diffusion.xx, diffusion.yy);
    let k = bath.k;
    let dt = t1 - t0;
    let sigma0 = from.state.sigma();
    let autonomous = profile.is_autonomous() && k > 0.0;
    let sweep = ForwardSweep::new(profile, t0, t1, tol.ode)?;
    let integrand = |s: f64| -> Result<[f64; 2]> {
        let r = sweep.at(s)?;
        let x_s = r.congruence(&sigma0);
        let cross = (2.0 * k * (s - t1)).exp() * (cp * x_s.xx + cq * x_s.yy);
        let noise = if autonomous {
            let y = r.congruence(&diffusion);
            let lag = s - t0;
            (-2.0 * k * lag).exp() * (cp * y.xx + cq * y.yy) * -(-4.0 * k * (dt - lag)).exp_m1() / (4.0 * k)
        } else {
            0.0
        };
        Ok([cross, noise])
    };
    let panel = 0.1f64.min(1.0 / (2.0 * k + 2.0 * omega0));
    let [cross, det_noise] = quadrature::integrate(integrand, t0, t1, QuadOptions::new(tol.quad, panel))?;
    let det_noise = if autonomous { det_noise } else { noise.det() };
    Ok((-4.0 * k * dt).exp() * from.det + det_noise + (-2.0 * k * dt).exp() * cross)
}

/// Evolves `from` (given at time `t0`) to time `t1 ≥ t0`.
pub fn evolve_between(
    from: &Evolved,
    profile: &FrequencyProfile,
    bath: &BathParams,
    t0: f64,
    t1: f64,
    tol: &Tolerances,
) -> Result<Evolved> {
    tol.validate()?;
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Error::invalid("t", format!("need finite t0 ≤ t1, got {t0} and {t1}")));
    }
    if t1 == t0 {
        return Ok(*from);
    }
    let omega0 = profile.reference_frequency();
    let sweep = BackwardSweep::new(profile, t0, t1, tol.ode)?;
    let noise = swap(kernel_integral(&sweep, omega0, bath, t0, tol)?).reflect();
    let r = unimodular(sweep.forward_from(t0)?);

    let dt = t1 - t0;
    let damp = (-bath.k * dt).exp();
    let transported = r.congruence(&from.state.sigma()).scale(damp * damp);
    let [mq, mp] = r.apply(from.state.mean());
    let sigma = transported + noise;
    // det(U + N) = det U + det N + mixed terms, with det U known exactly
    let free = damp.powi(4) * from.det;
    let mut det = free + noise.det() + transported.mixed_det(&noise);
    let (u, n) = (transported, noise);
    let magnitude = (u.xx * n.yy).abs() + (u.yy * n.xx).abs() + 2.0 * (u.xy * n.xy).abs() + (n.xx * n.yy).abs() + n.xy * n.xy;
    let det_from_matrix = 16.0 * f64::EPSILON * magnitude <= 1e-12 * det.abs();
    if !det_from_matrix {
        det = det_from_integrals(from, profile, bath, t0, t1, &noise, tol)?;
    }
    let state = GaussianState::with_det([damp * mq, damp * mp], sigma, det)?;
    Ok(Evolved {
        state,
        det,
        det_from_matrix,
    })
}

/// Evolves `state0` from time 0 to `t`, returning the state and `det σ(t)`.
pub fn evolve_with_det(
    state0: &GaussianState,
    profile: &FrequencyProfile,
    bath: &BathParams,
    t: f64,
    tol: &Tolerances,
) -> Result<Evolved> {
    check_time(t)?;
    evolve_between(&Evolved::from_state(*state0), profile, bath, 0.0, t, tol)
}

pub fn evolve(
    state0: &GaussianState,
    profile: &FrequencyProfile,
    bath: &BathParams,
    t: f64,
    tol: &Tolerances,
) -> Result<GaussianState> {
    evolve_with_det(state0, profile, bath, t, tol).map(|e| e.state)
}

/// Samples on `grid` (non-decreasing from 0), each evolved independently
/// from `state0`; samples are computed in parallel on the current rayon pool.
pub fn trajectory_on(
    state0: &GaussianState,
    profile: &FrequencyProfile,
    bath: &BathParams,
    grid: &[f64],
    tol: &Tolerances,
) -> Result<Trajectory> {
    let omega0 = profile.reference_frequency();
    let samples = grid
        .par_iter()
        .map(|&t| {
            let e = evolve_with_det(state0, profile, bath, t, tol)?;
            Sample::new(t, e.state, e.det, omega0)
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(samples)
}

/// Uniform-grid trajectory from the parametrized initial state.
pub fn trajectory(
    params0: &GaussianParams,
    profile: &FrequencyProfile,
    bath: &BathParams,
    t_max: f64,
    n_steps: usize,
    tol: &Tolerances,
) -> Result<Trajectory> {
    let grid = uniform_grid(t_max, n_steps)?;
    let state0 = params_to_state_scaled(params0, profile.reference_frequency());
    trajectory_on(&state0, profile, bath, &grid, tol)
}

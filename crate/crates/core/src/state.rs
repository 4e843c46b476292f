//! Gaussian state representations and their scalar diagnostics.
//!
//! Quadratures are dimensionless with respect to a reference frequency
//! `ω₀`: the mode operator is `a = √(ω₀/2)(q + ip/ω₀)`, which reduces to
//! `a = (q + ip)/√2` for `ω₀ = 1`. The plain conversion functions use
//! `ω₀ = 1`; the `*_scaled` variants take it explicitly.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::profile::FrequencyProfile;
use crate::{Error, Result, Sym2, HEISENBERG_TOL};

/// Displacement `α`, squeezing `(r, φ)` and impurity `ν` of a single-mode
/// Gaussian state `D(α) S(r, φ) ρ_th(ν) S† D†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub alpha: Complex64,
    pub r: f64,
    pub phi: f64,
    pub nu: f64,
}

/// First moments and symmetrized covariance matrix in `(q, p)` ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean_q: f64,
    pub mean_p: f64,
    pub s_qq: f64,
    pub s_qp: f64,
    pub s_pp: f64,
}

/// Coefficients of `H = f₁(a†a + ½) + f₂(a†² + a²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub f1: f64,
    pub f2: f64,
}

impl GaussianParams {
    /// Validates and normalizes: `φ` is wrapped into `(-π, π]`, and set to 0
    /// when `r = 0`.
    pub fn new(alpha: Complex64, r: f64, phi: f64, nu: f64) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::invalid("r", format!("must be finite and >= 0, got {r}")));
        }
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(Error::invalid("nu", format!("must be finite and >= 0, got {nu}")));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        let phi = if r == 0.0 { 0.0 } else { wrap_phase(phi) };
        Ok(GaussianParams { alpha, r, phi, nu })
    }

    pub fn vacuum() -> Self {
        GaussianParams {
            alpha: Complex64::new(0.0, 0.0),
            r: 0.0,
            phi: 0.0,
            nu: 0.0,
        }
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p - 2.0 * PI
    } else {
        p
    }
}

impl GaussianState {
    pub fn new(mean_q: f64, mean_p: f64, s_qq: f64, s_qp: f64, s_pp: f64) -> Result<Self> {
        let state = GaussianState {
            mean_q,
            mean_p,
            s_qq,
            s_qp,
            s_pp,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn from_parts(mean: [f64; 2], sigma: Sym2) -> Result<Self> {
        GaussianState::new(mean[0], mean[1], sigma.xx, sigma.xy, sigma.yy)
    }

    /// Like [`from_parts`](Self::from_parts), but checks the Heisenberg bound
    /// on a separately known `det σ` instead of the product of the entries.
    pub fn with_det(mean: [f64; 2], sigma: Sym2, det: f64) -> Result<Self> {
        let state = GaussianState {
            mean_q: mean[0],
            mean_p: mean[1],
            s_qq: sigma.xx,
            s_qp: sigma.xy,
            s_pp: sigma.yy,
        };
        state.validate_entries()?;
        check_heisenberg(det, 0.0)?;
        Ok(state)
    }

    pub fn vacuum() -> Self {
        GaussianState {
            mean_q: 0.0,
            mean_p: 0.0,
            s_qq: 0.5,
            s_qp: 0.0,
            s_pp: 0.5,
        }
    }

    pub fn sigma(&self) -> Sym2 {
        Sym2::new(self.s_qq, self.s_qp, self.s_pp)
    }

    pub fn mean(&self) -> [f64; 2] {
        [self.mean_q, self.mean_p]
    }

    /// `det σ`, evaluated with a fused multiply-add to limit cancellation.
    pub fn det(&self) -> f64 {
        det_fma(self.s_qq, self.s_pp, self.s_qp)
    }

    /// Rounding uncertainty of [`det`](Self::det) inherited from the
    /// entries themselves.
    pub fn det_rounding(&self) -> f64 {
        4.0 * f64::EPSILON * (self.s_qq * self.s_pp).abs().max(self.s_qp * self.s_qp)
    }

    fn validate(&self) -> Result<()> {
        self.validate_entries()?;
        check_heisenberg(self.det(), self.det_rounding())?;
        Ok(())
    }

    fn validate_entries(&self) -> Result<()> {
        let entries = [self.mean_q, self.mean_p, self.s_qq, self.s_qp, self.s_pp];
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("state", "moments must be finite"));
        }
        if self.s_qq <= 0.0 || self.s_pp <= 0.0 {
            return Err(Error::invalid("state", "variances must be positive"));
        }
        Ok(())
    }
}

/// Kahan's fma-based evaluation of `a·b - c²`.
fn det_fma(a: f64, b: f64, c: f64) -> f64 {
    let cc = c * c;
    let err = c.mul_add(-c, cc);
    a.mul_add(b, -cc) + err
}

fn check_heisenberg(det: f64, slack: f64) -> Result<f64> {
    if det < 0.25 - HEISENBERG_TOL - slack || det.is_nan() {
        Err(Error::HeisenbergViolation { det })
    } else {
        Ok(det.max(0.25))
    }
}

/// Covariance and means of the state with parameters `params`, with mode
/// operators referenced to `ω₀ = 1`.
pub fn params_to_state(params: &GaussianParams) -> GaussianState {
    params_to_state_scaled(params, 1.0)
}

pub fn params_to_state_scaled(params: &GaussianParams, omega0: f64) -> GaussianState {
    let GaussianParams { alpha, r, phi, nu } = *params;
    let thermal = nu + 0.5;
    // cosh 2r ± cos φ sinh 2r written as sums of positive terms
    let (grow, shrink) = ((2.0 * r).exp(), (-2.0 * r).exp());
    let (sin_half, cos_half) = (0.5 * phi).sin_cos();
    let (c2, s2) = (cos_half * cos_half, sin_half * sin_half);
    let scale = omega0.sqrt();
    GaussianState {
        mean_q: SQRT_2 * alpha.re / scale,
        mean_p: SQRT_2 * alpha.im * scale,
        s_qq: thermal * (grow * c2 + shrink * s2) / omega0,
        s_qp: thermal * phi.sin() * (2.0 * r).sinh(),
        s_pp: thermal * (grow * s2 + shrink * c2) * omega0,
    }
}

pub fn state_to_params(state: &GaussianState) -> Result<GaussianParams> {
    state_to_params_scaled(state, 1.0)
}

pub fn state_to_params_scaled(state: &GaussianState, omega0: f64) -> Result<GaussianParams> {
    let det = check_heisenberg(state.det(), state.det_rounding())?;
    params_with_det(state, omega0, det)
}

/// Like [`state_to_params_scaled`] but with `det σ` supplied by the caller,
/// for evolutions where the determinant is known more accurately than the
/// cancellation-prone product of the entries.
pub fn state_to_params_with_det(
    state: &GaussianState,
    omega0: f64,
    det: f64,
) -> Result<GaussianParams> {
    let det = check_heisenberg(det, 0.0)?;
    params_with_det(state, omega0, det)
}

fn params_with_det(state: &GaussianState, omega0: f64, det: f64) -> Result<GaussianParams> {
    let scale = omega0.sqrt();
    let alpha = Complex64::new(state.mean_q * scale, state.mean_p / scale) / SQRT_2;
    let qq = state.s_qq * omega0;
    let pp = state.s_pp / omega0;
    // σ_aa = ⟨a²⟩ - ⟨a⟩² and σ_a†a - ½ = ½ (⟨q²⟩ + ⟨p²⟩) in scaled units
    let sigma_aa = Complex64::new(0.5 * (qq - pp), state.s_qp);
    let modulus = sigma_aa.norm();
    let half_trace = 0.5 * (qq + pp);
    let symplectic = det.sqrt();

    let (r, phi) = if modulus <= 1e-15 * half_trace {
        (0.0, 0.0)
    } else {
        let ratio = modulus / half_trace;
        let r = if ratio < 0.5 {
            0.5 * ratio.atanh()
        } else {
            // cosh 2r = half_trace / √det, better conditioned at large r
            0.5 * (half_trace / symplectic).max(1.0).acosh()
        };
        (r, sigma_aa.arg())
    };
    GaussianParams::new(alpha, r, phi, symplectic - 0.5)
}

/// `√det σ`, which equals `ν + ½`.
pub fn symplectic_eigenvalue(state: &GaussianState) -> f64 {
    state.det().max(0.0).sqrt()
}

/// Von Neumann entropy of a single-mode Gaussian state with `det σ = d`.
pub fn von_neumann_entropy(d: f64) -> Result<f64> {
    let d = check_heisenberg(d, 0.0)?;
    let x = d.sqrt();
    let upper = (x + 0.5) * (x + 0.5).ln();
    let lower = x - 0.5;
    let lower = if lower > 0.0 { lower * lower.ln() } else { 0.0 };
    Ok(upper - lower)
}

pub fn mode_coefficients(profile: &FrequencyProfile, t: f64) -> Result<ModeCoefficients> {
    let omega0 = profile.reference_frequency();
    let ratio = profile.omega_squared(t)? / (omega0 * omega0);
    Ok(ModeCoefficients {
        f1: 0.5 * omega0 * (ratio + 1.0),
        f2: 0.25 * omega0 * (ratio - 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E2: f64 = 7.38905609893065;

    fn params(r: f64, phi: f64, nu: f64) -> GaussianParams {
        GaussianParams::new(Complex64::new(0.0, 0.0), r, phi, nu).unwrap()
    }

    #[test]
    fn vacuum_and_thermal() {
        let s = params_to_state(&params(0.0, 0.0, 0.0));
        assert_eq!((s.mean_q, s.mean_p), (0.0, 0.0));
        assert_eq!((s.s_qq, s.s_qp, s.s_pp), (0.5, 0.0, 0.5));
        let s = params_to_state(&params(0.0, 0.0, 3.0));
        assert_eq!((s.s_qq, s.s_qp, s.s_pp), (3.5, 0.0, 3.5));
    }

    #[test]
    fn squeezed_vacuum() {
        let s = params_to_state(&params(1.0, 0.0, 0.0));
        assert!((s.s_qq - E2 / 2.0).abs() < 1e-14);
        assert!((s.s_pp - 0.5 / E2).abs() < 1e-15);
        assert!((s.s_qq - 3.694528).abs() < 1e-6);
        assert!((s.s_pp - 0.067668).abs() < 1e-6);
        assert_eq!(s.s_qp, 0.0);
        assert!((s.det() - 0.25).abs() < 1e-15);
        let back = state_to_params(&s).unwrap();
        assert!((back.r - 1.0).abs() < 1e-12);
        assert_eq!(back.phi, 0.0);
        assert!(back.nu.abs() < 1e-12);
    }

    #[test]
    fn displacement_maps_to_means() {
        let p = GaussianParams::new(Complex64::new(0.3, -1.2), 0.0, 0.0, 0.0).unwrap();
        let s = params_to_state(&p);
        assert!((s.mean_q - SQRT_2 * 0.3).abs() < 1e-15);
        assert!((s.mean_p + SQRT_2 * 1.2).abs() < 1e-15);
        let back = state_to_params(&s).unwrap();
        assert!((back.alpha - p.alpha).norm() < 1e-15);
    }

    #[test]
    fn state_to_params_examples() {
        let p = state_to_params(&GaussianState::vacuum()).unwrap();
        assert_eq!((p.r, p.phi, p.nu), (0.0, 0.0, 0.0));
        let s = GaussianState::new(0.0, 0.0, E2 / 2.0, 0.0, 0.5 / E2).unwrap();
        let p = state_to_params(&s).unwrap();
        assert!((p.r - 1.0).abs() < 1e-12 && p.phi == 0.0 && p.nu.abs() < 1e-12);
        let s = GaussianState::new(0.0, 0.0, 3.5, 0.0, 3.5).unwrap();
        let p = state_to_params(&s).unwrap();
        assert_eq!((p.r, p.phi), (0.0, 0.0));
        assert!((p.nu - 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_params() {
        let z = Complex64::new(0.0, 0.0);
        assert!(GaussianParams::new(z, -0.1, 0.0, 0.0).is_err());
        assert!(GaussianParams::new(z, 0.0, 0.0, -1.0).is_err());
        assert!(GaussianParams::new(z, 0.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn phase_normalization() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(GaussianParams::new(z, 0.0, 2.0, 0.0).unwrap().phi, 0.0);
        let p = GaussianParams::new(z, 1.0, -PI, 0.0).unwrap();
        assert_eq!(p.phi, PI);
        let p = GaussianParams::new(z, 1.0, 3.0 * PI / 2.0, 0.0).unwrap();
        assert!((p.phi + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn heisenberg_violation_is_reported() {
        let err = GaussianState::new(0.0, 0.0, 0.4, 0.0, 0.4).unwrap_err();
        assert!(matches!(err, Error::HeisenbergViolation { .. }));
        // within the slack: accepted and clamped
        let s = GaussianState::new(0.0, 0.0, 0.5, 0.0, 0.5 - 1e-10).unwrap();
        assert_eq!(state_to_params(&s).unwrap().nu, 0.0);
    }

    #[test]
    fn symplectic_eigenvalues() {
        assert_eq!(symplectic_eigenvalue(&GaussianState::vacuum()), 0.5);
        let s = GaussianState::new(0.0, 0.0, E2 / 2.0, 0.0, 0.5 / E2).unwrap();
        assert!((symplectic_eigenvalue(&s) - 0.5).abs() < 1e-15);
        let s = params_to_state(&params(0.0, 0.0, 3.0));
        assert_eq!(symplectic_eigenvalue(&s), 3.5);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(von_neumann_entropy(0.25).unwrap(), 0.0);
        let expected = 4.0 * 4f64.ln() - 3.0 * 3f64.ln();
        assert!((von_neumann_entropy(12.25).unwrap() - expected).abs() < 1e-14);
        assert!((von_neumann_entropy(12.25).unwrap() - 2.249341).abs() < 1e-6);
        assert!((von_neumann_entropy(0.45).unwrap() - 0.48653).abs() < 5e-5);
        assert_eq!(von_neumann_entropy(0.25 - 5e-10).unwrap(), 0.0);
        assert!(matches!(
            von_neumann_entropy(0.2),
            Err(Error::HeisenbergViolation { .. })
        ));
    }

    #[test]
    fn mode_coefficient_examples() {
        let c = mode_coefficients(&FrequencyProfile::constant(1.0).unwrap(), 4.2).unwrap();
        assert_eq!((c.f1, c.f2), (1.0, 0.0));
        let c = mode_coefficients(&FrequencyProfile::constant(2.7).unwrap(), 0.3).unwrap();
        assert_eq!(c.f2, 0.0);
        let c = mode_coefficients(&FrequencyProfile::inverted(1.0).unwrap(), 1.0).unwrap();
        assert_eq!((c.f1, c.f2), (0.0, -0.5));
        let c = mode_coefficients(&FrequencyProfile::sqrt_ramp(1.0, 1.0).unwrap(), 3.0).unwrap();
        assert_eq!((c.f1, c.f2), (2.5, 0.75));
    }

    #[test]
    fn scaled_conversion_roundtrips() {
        let p = GaussianParams::new(Complex64::new(0.4, 0.1), 0.7, 1.1, 0.5).unwrap();
        let s = params_to_state_scaled(&p, 2.5);
        let back = state_to_params_scaled(&s, 2.5).unwrap();
        assert!((back.alpha - p.alpha).norm() < 1e-14);
        assert!((back.r - p.r).abs() < 1e-12);
        assert!((back.phi - p.phi).abs() < 1e-12);
        assert!((back.nu - p.nu).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn roundtrip(r in 0.0..3.0f64, phi in -PI..PI, nu in 0.0..10.0f64,
                     re in -3.0..3.0f64, im in -3.0..3.0f64) {
            let p = GaussianParams::new(Complex64::new(re, im), r, phi, nu).unwrap();
            let back = state_to_params(&params_to_state(&p)).unwrap();
            prop_assert!((back.r - p.r).abs() < 1e-10);
            prop_assert!((back.nu - p.nu).abs() < 1e-10);
            prop_assert!((back.alpha - p.alpha).norm() < 1e-10);
            if p.r > 1e-8 {
                let dphi = wrap_phase(back.phi - p.phi).abs();
                // arg(σ_aa) carries an absolute error of order ε/r
                prop_assert!(dphi < 1e-10f64.max(1e-14 / r), "dphi = {}", dphi);
            }
        }

        #[test]
        fn det_is_thermal_factor_squared(r in 0.0..3.0f64, phi in -PI..PI, nu in 0.0..10.0f64) {
            let s = params_to_state(&params(r, phi, nu));
            let expected = (nu + 0.5) * (nu + 0.5);
            // the entries carry rounding of order ε·s_qq·s_pp, which the
            // determinant cannot undo when σ is strongly squeezed
            let slack = 1e-12 * expected + s.det_rounding();
            prop_assert!((s.det() - expected).abs() <= slack,
                "rel err {}", (s.det() - expected).abs() / expected);
        }

        #[test]
        fn entropy_monotone(d in 0.25..100.0f64, step in 1e-6..10.0f64) {
            prop_assert!(von_neumann_entropy(d + step).unwrap() > von_neumann_entropy(d).unwrap());
        }

        #[test]
        fn symplectic_eigenvalue_rotation_invariant(r in 0.0..3.0f64, phi in -PI..PI,
                                                    nu in 0.0..10.0f64, theta in -PI..PI) {
            let s = params_to_state(&params(r, phi, nu));
            let rot = crate::Mat2::new(theta.cos(), theta.sin(), -theta.sin(), theta.cos());
            let rotated = rot.congruence(&s.sigma());
            let s2 = GaussianState::from_parts([0.0, 0.0], rotated).unwrap();
            let (a, b) = (symplectic_eigenvalue(&s), symplectic_eigenvalue(&s2));
            prop_assert!((a - b).abs() <= 1e-9 * a);
        }
    }
}

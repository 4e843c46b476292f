//! Classical propagators of `φ̈ + ω²(t)φ = 0`.
//!
//! `R(s → t)` maps phase-space points `(q, p)` at time `s` to time `t`:
//!
//! ```text
//! R = [[u, v], [u̇, v̇]]
//! ```
//!
//! where `u` and `v` solve the oscillator equation with `u(s) = 1, u̇(s) = 0`
//! and `v(s) = 0, v̇(s) = 1`. Every such matrix has unit determinant (the
//! Wronskian `u v̇ - v u̇`).
//!
//! Two-time propagators are integrated directly from `s` to `t` rather than
//! assembled as `R(0 → t) R(0 → s)⁻¹`: for unstable profiles the product of
//! two exponentially large factors loses every significant digit of the
//! `O(1)` result.

use crate::airy::airy;
use crate::ode::{integrate_through, OdeOptions};
use crate::profile::FrequencyProfile;
use crate::{Error, Mat2, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorMatrix {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
}

impl PropagatorMatrix {
    pub const IDENTITY: PropagatorMatrix = PropagatorMatrix {
        u: 1.0,
        v: 0.0,
        du: 0.0,
        dv: 1.0,
    };

    pub fn wronskian(&self) -> f64 {
        self.u * self.dv - self.v * self.du
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.u, self.v, self.du, self.dv)
    }

    pub fn from_matrix(m: Mat2) -> Self {
        let [[u, v], [du, dv]] = m.0;
        PropagatorMatrix { u, v, du, dv }
    }

    /// `self` after `first`, i.e. `self · first`.
    pub fn compose(&self, first: &PropagatorMatrix) -> Self {
        Self::from_matrix(self.matrix() * first.matrix())
    }

    /// The reverse propagator, using unit determinant.
    pub fn inverse(&self) -> Self {
        Self::from_matrix(self.matrix().adjugate())
    }

    pub fn max_abs_diff(&self, other: &PropagatorMatrix) -> f64 {
        self.matrix().max_abs_diff(&other.matrix())
    }
}

/// `d/dt R = J(t) R` with `J = [[0, 1], [-ω², 0]]`, for `R` stored row-major.
fn flow(profile: &FrequencyProfile) -> impl FnMut(f64, &[f64; 4]) -> Result<[f64; 4]> + '_ {
    move |t, r| {
        let w2 = profile.omega_squared(t)?;
        Ok([r[2], r[3], -w2 * r[0], -w2 * r[1]])
    }
}

/// Interpolation knots of a tabulated profile strictly between `from` and
/// `to`, in the direction of travel.
fn knots_between(profile: &FrequencyProfile, from: f64, to: f64) -> Vec<f64> {
    let mut knots: Vec<f64> = match profile {
        FrequencyProfile::Tabulated(table) => {
            let (lo, hi) = (from.min(to), from.max(to));
            table
                .samples()
                .map(|(t, _)| t)
                .filter(|&t| t > lo && t < hi)
                .collect()
        }
        _ => Vec::new(),
    };
    if to < from {
        knots.reverse();
    }
    knots
}

/// Integrates `R` from `from` to `to`, stopping at interpolation knots of
/// tabulated profiles so that steps never straddle a kink.
fn transport(profile: &FrequencyProfile, from: f64, start: Mat2, to: f64, tol: f64) -> Result<Mat2> {
    let [[a, b], [c, d]] = start.0;
    let mut stops = knots_between(profile, from, to);
    stops.push(to);
    let mut out = [a, b, c, d];
    integrate_through(flow(profile), from, out, &stops, OdeOptions::new(tol), |_, y| out = *y)?;
    Ok(Mat2::new(out[0], out[1], out[2], out[3]))
}

/// `R(0 → t)`, integrated with local tolerance `tol`.
pub fn fundamental_pair(profile: &FrequencyProfile, t: f64, tol: f64) -> Result<PropagatorMatrix> {
    two_time_propagator(profile, 0.0, t, tol)
}

/// `R(t_from → t_to)`.
pub fn two_time_propagator(
    profile: &FrequencyProfile,
    t_from: f64,
    t_to: f64,
    tol: f64,
) -> Result<PropagatorMatrix> {
    if !(t_from.is_finite() && t_to.is_finite()) {
        return Err(Error::invalid("t", "times must be finite"));
    }
    transport(profile, t_from, Mat2::IDENTITY, t_to, tol).map(PropagatorMatrix::from_matrix)
}

pub fn constant_propagator_closed(omega0: f64, t: f64) -> PropagatorMatrix {
    let (sin, cos) = (omega0 * t).sin_cos();
    PropagatorMatrix {
        u: cos,
        v: sin / omega0,
        du: -omega0 * sin,
        dv: cos,
    }
}

pub fn iho_propagator_closed(omega0: f64, t: f64) -> PropagatorMatrix {
    let x = omega0 * t;
    let (sinh, cosh) = (x.sinh(), x.cosh());
    PropagatorMatrix {
        u: cosh,
        v: sinh / omega0,
        du: omega0 * sinh,
        dv: cosh,
    }
}

/// `R(0 → t)` for `ω²(t) = ω₀²(1 + γt)` from Airy functions.
///
/// With `β = (ω₀²/γ²)^{1/3}` and `z(t) = -β(1 + γt)`, any `y(z(t))` with
/// `y″ = z y` solves the oscillator equation; `dz/dt = -γβ`. The constants
/// for each initial-value problem follow from the Airy Wronskian `1/π`.
pub fn ramp_propagator_closed(omega0: f64, gamma: f64, t: f64) -> Result<PropagatorMatrix> {
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(Error::invalid(
            "gamma",
            "must be finite and non-zero; use the constant-frequency propagator for γ = 0",
        ));
    }
    let beta = (omega0 / gamma.abs()).powf(2.0 / 3.0);
    let slope = -gamma * beta;
    let start = airy(-beta)?;
    let now = airy(-beta * (1.0 + gamma * t))?;
    let pi = std::f64::consts::PI;
    Ok(PropagatorMatrix {
        u: pi * (start.dbi * now.ai - start.dai * now.bi),
        du: pi * slope * (start.dbi * now.dai - start.dai * now.dbi),
        v: pi / slope * (start.ai * now.bi - start.bi * now.ai),
        dv: pi * (start.ai * now.dbi - start.bi * now.dai),
    })
}

/// Closed-form `R(0 → t)` where one exists.
pub fn closed_form(profile: &FrequencyProfile, t: f64) -> Option<Result<PropagatorMatrix>> {
    match *profile {
        FrequencyProfile::Constant { omega0 } => Some(Ok(constant_propagator_closed(omega0, t))),
        FrequencyProfile::Inverted { omega0 } => Some(Ok(iho_propagator_closed(omega0, t))),
        FrequencyProfile::SqrtRamp { omega0, gamma } if gamma != 0.0 => {
            Some(ramp_propagator_closed(omega0, gamma, t))
        }
        FrequencyProfile::SqrtRamp { omega0, .. } => Some(Ok(constant_propagator_closed(omega0, t))),
        FrequencyProfile::Tabulated(_) => None,
    }
}

/// Spacing of the anchor points of a sweep.
const ANCHOR_SPACING: f64 = 0.25;

/// Propagators `R(origin → s)` for every `s` between `origin` and `limit`.
///
/// One continuous integration from `origin` records anchors every
/// [`ANCHOR_SPACING`]; a query integrates only from the nearest anchor on the
/// origin side. Chaining many short integrations instead would accumulate
/// one local error per query.
#[derive(Debug, Clone)]
struct Anchors {
    origin: f64,
    limit: f64,
    // ordered from `origin` towards `limit`
    points: Vec<(f64, Mat2)>,
}

impl Anchors {
    fn new(profile: &FrequencyProfile, origin: f64, limit: f64, tol: f64) -> Result<Self> {
        if !(origin.is_finite() && limit.is_finite()) {
            return Err(Error::invalid("t", "sweep limits must be finite"));
        }
        let n = ((limit - origin).abs() / ANCHOR_SPACING).ceil() as usize;
        let times: Vec<f64> = (1..=n)
            .map(|i| if i == n { limit } else { origin + (limit - origin) * i as f64 / n as f64 })
            .collect();
        let mut points = Vec::with_capacity(n + 1);
        points.push((origin, Mat2::IDENTITY));
        if n > 0 {
            let mut stops = knots_between(profile, origin, limit);
            stops.extend_from_slice(&times);
            if limit < origin {
                stops.sort_by(|x, y| y.total_cmp(x));
            } else {
                stops.sort_by(f64::total_cmp);
            }
            let mut next = times.iter().peekable();
            let ident = [1.0, 0.0, 0.0, 1.0];
            integrate_through(flow(profile), origin, ident, &stops, OdeOptions::new(tol), |t, y| {
                if next.peek() == Some(&&t) {
                    next.next();
                    points.push((t, Mat2::new(y[0], y[1], y[2], y[3])));
                }
            })?;
        }
        Ok(Anchors { origin, limit, points })
    }

    fn at(&self, profile: &FrequencyProfile, s: f64, tol: f64) -> Result<Mat2> {
        let (lo, hi) = (self.origin.min(self.limit), self.origin.max(self.limit));
        if !(s >= lo && s <= hi) {
            return Err(Error::invalid(
                "s",
                format!("{s} is outside the swept interval [{lo}, {hi}]"),
            ));
        }
        let forward = self.limit >= self.origin;
        // anchors not yet past s, measured from the origin
        let passed = self
            .points
            .partition_point(|&(t, _)| if forward { t <= s } else { t >= s });
        let (t, start) = self.points[passed - 1];
        if t == s {
            return Ok(start);
        }
        transport(profile, t, start, s, tol)
    }
}

/// Backward propagators `R(end → s)` for `start ≤ s ≤ end`.
#[derive(Debug, Clone)]
pub struct BackwardSweep<'a> {
    profile: &'a FrequencyProfile,
    tol: f64,
    anchors: Anchors,
}

impl<'a> BackwardSweep<'a> {
    pub fn new(profile: &'a FrequencyProfile, start: f64, end: f64, tol: f64) -> Result<Self> {
        if start > end {
            return Err(Error::invalid("start", format!("{start} lies after the end {end}")));
        }
        Ok(BackwardSweep {
            profile,
            tol,
            anchors: Anchors::new(profile, end, start, tol)?,
        })
    }

    pub fn end(&self) -> f64 {
        self.anchors.origin
    }

    /// `R(end → s)`.
    pub fn at(&self, s: f64) -> Result<Mat2> {
        self.anchors.at(self.profile, s, self.tol)
    }

    /// `R(s → end)`, the forward propagator over the same interval.
    pub fn forward_from(&self, s: f64) -> Result<Mat2> {
        self.at(s).map(|m| m.adjugate())
    }
}

/// Forward propagators `R(start → s)` for `start ≤ s ≤ end`.
#[derive(Debug, Clone)]
pub struct ForwardSweep<'a> {
    profile: &'a FrequencyProfile,
    tol: f64,
    anchors: Anchors,
}

impl<'a> ForwardSweep<'a> {
    pub fn new(profile: &'a FrequencyProfile, start: f64, end: f64, tol: f64) -> Result<Self> {
        if start > end {
            return Err(Error::invalid("start", format!("{start} lies after the end {end}")));
        }
        Ok(ForwardSweep {
            profile,
            tol,
            anchors: Anchors::new(profile, start, end, tol)?,
        })
    }

    pub fn start(&self) -> f64 {
        self.anchors.origin
    }

    /// `R(start → s)`.
    pub fn at(&self, s: f64) -> Result<Mat2> {
        self.anchors.at(self.profile, s, self.tol)
    }
}

//! Adaptive Gauss–Kronrod (7, 15) quadrature of vector-valued integrands.
//!
//! Panels are processed from the upper limit downwards and the nodes of each
//! panel are visited in descending order; a rejected panel is redone as two
//! halves, upper half first. The order is fixed so that results are
//! reproducible bit for bit.

use crate::{Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are shared with the Gauss rule.
const XK: [f64; 8] = [
    0.991455371120812639,
    0.949107912342758525,
    0.864864423359769073,
    0.741531185599394440,
    0.586087235467691130,
    0.405845151377397167,
    0.207784955007898468,
    0.0,
];
const WK: [f64; 8] = [
    0.022935322010529225,
    0.063092092629978553,
    0.104790010322250184,
    0.140653259715525919,
    0.169004726639267903,
    0.190350578064785410,
    0.204432940075298892,
    0.209482141084727828,
];
// Gauss weights for XK[1], XK[3], XK[5] and the centre
const WG: [f64; 4] = [
    0.129484966168869693,
    0.279705391489276668,
    0.381830050505118945,
    0.417959183673469388,
];

const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub tol: f64,
    /// Upper bound on the width of the initial panels.
    pub max_panel: f64,
}

impl QuadOptions {
    pub fn new(tol: f64, max_panel: f64) -> Self {
        QuadOptions { tol, max_panel }
    }
}

struct Panel<const N: usize> {
    value: [f64; N],
    error: f64,
}

fn max_abs<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn gauss_kronrod<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<Panel<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    let mut add = |y: [f64; N], i: usize| {
        for j in 0..N {
            kronrod[j] += WK[i] * y[j];
            if i % 2 == 1 {
                gauss[j] += WG[i / 2] * y[j];
            } else if i == 7 {
                gauss[j] += WG[3] * y[j];
            }
        }
    };
    for i in 0..7 {
        add(f(c + h * XK[i])?, i);
    }
    add(f(c)?, 7);
    for i in (0..7).rev() {
        add(f(c - h * XK[i])?, i);
    }
    let mut value = [0.0; N];
    let mut diff = [0.0; N];
    for j in 0..N {
        value[j] = h * kronrod[j];
        diff[j] = h * (kronrod[j] - gauss[j]);
    }
    Ok(Panel {
        value,
        error: max_abs(&diff),
    })
}

/// `∫ₐᵇ f`, for `a ≤ b`.
///
/// A panel is accepted when the Kronrod–Gauss difference is below either its
/// share `tol·w/(b−a)` of the absolute budget or `tol` relative to the panel
/// value, so integrands of very large magnitude converge to relative accuracy.
pub fn integrate<const N: usize, F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<[f64; N]>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::invalid("limits", format!("need finite a ≤ b, got [{a}, {b}]")));
    }
    if !(opts.tol > 0.0 && opts.max_panel > 0.0) {
        return Err(Error::invalid("tol", "tolerance and panel width must be positive"));
    }
    let mut total = [0.0; N];
    let len = b - a;
    if len == 0.0 {
        return Ok(total);
    }
    let n = (len / opts.max_panel).ceil().max(1.0) as usize;
    let width = len / n as f64;
    // popped from the end: the rightmost panel first
    let mut stack: Vec<(f64, f64, u32)> = (0..n)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == n { b } else { a + (i + 1) as f64 * width };
            (lo, hi, 0)
        })
        .collect();
    while let Some((lo, hi, depth)) = stack.pop() {
        let panel = gauss_kronrod(&mut f, lo, hi)?;
        let budget = (opts.tol * (hi - lo) / len).max(opts.tol * max_abs(&panel.value));
        if !panel.error.is_finite() {
            return Err(Error::Quadrature {
                a: lo,
                b: hi,
                error: panel.error,
            });
        }
        if panel.error <= budget {
            for j in 0..N {
                total[j] += panel.value[j];
            }
            continue;
        }
        let mid = 0.5 * (lo + hi);
        if depth >= MAX_DEPTH || mid <= lo || mid >= hi {
            return Err(Error::Quadrature {
                a: lo,
                b: hi,
                error: panel.error,
            });
        }
        stack.push((lo, mid, depth + 1));
        stack.push((mid, hi, depth + 1));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(tol: f64) -> QuadOptions {
        QuadOptions::new(tol, 0.1)
    }

    #[test]
    fn weights_integrate_constants() {
        let k: f64 = 2.0 * WK[..7].iter().sum::<f64>() + WK[7];
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn polynomials_are_exact() {
        // G7 is exact to degree 13, so a degree-12 polynomial converges at once
        let v = integrate(|x| Ok([x.powi(12), 1.0]), -1.0, 2.0, opts(1e-14)).unwrap();
        assert!((v[0] - (2f64.powi(13) + 1.0) / 13.0).abs() < 1e-10);
        assert!((v[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_and_oscillatory() {
        let v = integrate(|x: f64| Ok([(-3.0 * x).exp(), (10.0 * x).cos()]), 0.0, 5.0, opts(1e-12)).unwrap();
        assert!((v[0] - (1.0 - (-15.0f64).exp()) / 3.0).abs() < 1e-12);
        assert!((v[1] - (50.0f64).sin() / 10.0).abs() < 1e-12);
    }

    #[test]
    fn large_integrands_converge_relatively() {
        let v = integrate(|x: f64| Ok([x.exp()]), 0.0, 30.0, opts(1e-10)).unwrap();
        let exact = 30f64.exp_m1();
        assert!(((v[0] - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn visits_nodes_from_the_top() {
        // smooth enough that no panel is refined
        let mut last = f64::INFINITY;
        let mut ordered = true;
        integrate(
            |x: f64| {
                ordered &= x < last;
                last = x;
                Ok([(5.0 * x).sin()])
            },
            0.0,
            3.0,
            QuadOptions::new(1e-10, 0.1),
        )
        .unwrap();
        assert!(ordered);
    }

    #[test]
    fn discontinuity_names_the_worst_panel() {
        let r = integrate(|x: f64| Ok([if x < 0.33 { 0.0 } else { 1.0 }]), 0.0, 1.0, opts(1e-14));
        match r {
            Err(Error::Quadrature { a, b, .. }) => assert!(a <= 0.33 && 0.33 <= b, "[{a}, {b}]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|_| Ok([1.0]), 2.0, 2.0, opts(1e-10)).unwrap(), [0.0]);
        assert!(integrate(|_| Ok([1.0]), 2.0, 1.0, opts(1e-10)).is_err());
    }
}

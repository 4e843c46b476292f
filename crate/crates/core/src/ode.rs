//! Adaptive Dormand–Prince 8(5,3) integration of small autonomous-size
//! systems `y' = f(t, y)`.
//!
//! Output at a requested time is produced by stepping exactly onto it; there
//! is no dense-output interpolation.

use crate::{Error, Result};

// Dormand–Prince 8(5,3) tableau
const C: [f64; 12] = [
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0,
];
const A: [[f64; 12]; 12] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0],
    [0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0],
    [-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0],
    [2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0],
];
const B: [f64; 12] = [
    0.054293734116568765,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    0.3111643669578199,
    -0.1521609496625161,
    0.20136540080403034,
    0.04471061572777259,
];
// error estimators of orders five and three
const E5: [f64; 12] = [
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294,
];
const E3: [f64; 12] = [
    -0.18980075407240762,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    -0.4226823213237919,
    -0.1521609496625161,
    0.20136540080403034,
    0.02265179219836082,
];

const STAGES: usize = 12;
const MAX_STEPS: usize = 5_000_000;

/// Step-size control settings. Absolute and relative tolerance are equal.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub tol: f64,
    pub max_step: f64,
}

impl OdeOptions {
    pub fn new(tol: f64) -> Self {
        OdeOptions {
            tol,
            max_step: f64::INFINITY,
        }
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: OdeOptions,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut out = y0;
    integrate_through(f, t0, y0, &[t1], opts, |_, y| out = *y)?;
    Ok(out)
}

/// Integrates from `t0` through every time in `stops` (monotone in the
/// direction of travel), calling `visit` with the state at each stop.
pub fn integrate_through<const N: usize, F, V>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    stops: &[f64],
    opts: OdeOptions,
    mut visit: V,
) -> Result<()>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    V: FnMut(f64, &[f64; N]),
{
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::invalid("tol", format!("must be positive, got {}", opts.tol)));
    }
    let Some(&last) = stops.last() else {
        return Ok(());
    };
    let dir = if last >= t0 { 1.0 } else { -1.0 };
    if stops
        .iter()
        .scan(t0, |prev, &s| {
            let ok = (s - *prev) * dir >= 0.0;
            *prev = s;
            Some(ok)
        })
        .any(|ok| !ok)
    {
        return Err(Error::invalid("stops", "output times must be monotone"));
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut h: Option<f64> = None;
    let mut steps = 0usize;

    for &stop in stops {
        while (stop - t) * dir > 0.0 {
            let remaining = (stop - t).abs();
            let mut step = match h {
                Some(h) => h,
                None => initial_step(&mut f, t, &y, &k1, dir, remaining, opts.tol)?,
            }
            .min(opts.max_step);
            let hits_stop = step >= remaining;
            if hits_stop {
                step = remaining;
            }
            let hs = dir * step;
            let (y_new, k7, err) = dp_step(&mut f, t, &y, &k1, hs, opts.tol)?;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Integration {
                    t,
                    reason: "maximum number of steps exceeded".into(),
                });
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-1.0 / 8.0)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = if hits_stop { stop } else { t + hs };
                y = y_new;
                k1 = k7;
                // a step clipped to hit an output time is not representative
                if !hits_stop || h.is_none() {
                    h = Some(step * factor);
                }
            } else {
                let next = step * factor.min(1.0);
                if next <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                    return Err(Error::Integration {
                        t,
                        reason: "step size underflow".into(),
                    });
                }
                h = Some(next);
            }
        }
        visit(stop, &y);
    }
    Ok(())
}

fn dp_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    tol: f64,
) -> Result<([f64; N], [f64; N], f64)>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut ks = [[0.0; N]; STAGES];
    ks[0] = *k1;
    for s in 1..STAGES {
        let mut ys = *y;
        for (j, k) in ks.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * k[i];
                }
            }
        }
        ks[s] = f(t + C[s] * h, &ys)?;
    }
    let mut y_new = *y;
    let mut e5 = [0.0; N];
    let mut e3 = [0.0; N];
    for (s, k) in ks.iter().enumerate() {
        for i in 0..N {
            y_new[i] += h * B[s] * k[i];
            e5[i] += E5[s] * k[i];
            e3[i] += E3[s] * k[i];
        }
    }
    if y_new.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration {
            t,
            reason: "non-finite state".into(),
        });
    }
    let k_last = f(t + h, &y_new)?;

    let (mut n5, mut n3) = (0.0f64, 0.0f64);
    for i in 0..N {
        let scale = tol + tol * y[i].abs().max(y_new[i].abs());
        n5 += (e5[i] / scale).powi(2);
        n3 += (e3[i] / scale).powi(2);
    }
    let err = if n5 == 0.0 && n3 == 0.0 {
        0.0
    } else {
        h.abs() * n5 / (((n5 + 0.01 * n3) * N as f64).sqrt())
    };
    if !err.is_finite() {
        return Err(Error::Integration {
            t,
            reason: "non-finite error estimate".into(),
        });
    }
    Ok((y_new, k_last, err))
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    dir: f64,
    remaining: f64,
    tol: f64,
) -> Result<f64>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let norm = |v: &[f64; N]| {
        v.iter()
            .zip(y)
            .map(|(x, y0)| (x / (tol + tol * y0.abs())).powi(2))
            .sum::<f64>()
            .sqrt()
            / (N as f64).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(k1);
    // the probe must stay inside the interval, whose end may be the edge
    // of the domain of f
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
    .min(remaining);
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += dir * h0 * k1[i];
    }
    let k2 = f(t + dir * h0, &y1)?;
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = k2[i] - k1[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 8.0)
    };
    Ok((100.0 * h0).min(h1))
}

//! The `evolve`, `sweep` and `figures` commands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use gausslind_core::dissipation::trajectory_on;
use gausslind_core::oracle::oracle_evolve;
use gausslind_core::state::params_to_state_scaled;
use gausslind_core::trajectory::uniform_grid;
use gausslind_core::{BathParams, FrequencyProfile, GaussianParams, Tolerances, Trajectory};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, Engine, RunConfig};
use crate::output;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown figure {0}; expected 1, 2, 4 or 5")]
    UnknownFigure(u32),
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error("{operation} failed: {source}")]
    Numeric {
        operation: String,
        #[source]
        source: gausslind_core::Error,
    },
    #[error("cannot write {target}: {source}")]
    Io {
        target: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::UnknownFigure(_) | CliError::Sweep(_) => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }

    fn io(target: impl AsRef<Path>) -> impl FnOnce(std::io::Error) -> CliError {
        let target = target.as_ref().display().to_string();
        move |source| CliError::Io { target, source }
    }
}

/// Largest chord–oracle disagreement over a run. Covariance entries are
/// relative to the largest oracle entry, means to the oracle's width
/// `√max σ`, and `D` to the oracle's `D`, all per sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Deviation {
    pub sigma: f64,
    pub mean: f64,
    pub det: f64,
}

impl Deviation {
    pub fn between(chord: &Trajectory, oracle: &Trajectory) -> Self {
        let mut dev = Deviation::default();
        for (a, b) in chord.samples().iter().zip(oracle.samples()) {
            let scale = b.state.sigma().max_abs();
            let ds = [
                a.state.s_qq - b.state.s_qq,
                a.state.s_qp - b.state.s_qp,
                a.state.s_pp - b.state.s_pp,
            ];
            let dm = [a.state.mean_q - b.state.mean_q, a.state.mean_p - b.state.mean_p];
            let max = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            dev.sigma = dev.sigma.max(max(&ds) / scale);
            dev.mean = dev.mean.max(max(&dm) / scale.sqrt());
            dev.det = dev.det.max((a.d - b.d).abs() / b.d);
        }
        dev
    }
}

/// The trajectories of one run; `oracle` is set for `engine = both`.
#[derive(Debug, Clone)]
pub struct Run {
    pub primary: Trajectory,
    pub oracle: Option<Trajectory>,
}

impl Run {
    pub fn deviation(&self) -> Option<Deviation> {
        self.oracle.as_ref().map(|o| Deviation::between(&self.primary, o))
    }

    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        match &self.oracle {
            Some(o) => output::write_paired(out, &self.primary, o),
            None => output::write_trajectory(out, &self.primary),
        }
    }
}

pub fn run(config: &RunConfig) -> Result<Run, CliError> {
    let numeric = |operation: &str| {
        let operation = operation.to_string();
        move |source| CliError::Numeric { operation, source }
    };
    let grid = uniform_grid(config.t_max, config.n_steps).map_err(numeric("uniform_grid"))?;
    let state0 = params_to_state_scaled(&config.initial, config.profile.reference_frequency());
    let chord = || {
        trajectory_on(&state0, &config.profile, &config.bath, &grid, &config.tol)
            .map_err(numeric("trajectory"))
    };
    let oracle = || {
        oracle_evolve(&state0, &config.profile, &config.bath, &grid, config.tol.ode)
            .map_err(numeric("oracle_evolve"))
    };
    Ok(match config.engine {
        Engine::Chord => Run {
            primary: chord()?,
            oracle: None,
        },
        Engine::Oracle => Run {
            primary: oracle()?,
            oracle: None,
        },
        Engine::Both => Run {
            primary: chord()?,
            oracle: Some(oracle()?),
        },
    })
}

/// Runs `config` and writes its CSV to `out`; returns the chord–oracle
/// deviation when both engines ran.
pub fn cmd_evolve(config: &RunConfig, out: &mut impl Write) -> Result<Option<Deviation>, CliError> {
    let run = run(config)?;
    run.write_csv(out).map_err(CliError::io("output"))?;
    Ok(run.deviation())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: f64,
    pub path: PathBuf,
    pub final_d: f64,
    pub final_s: f64,
    /// Least-squares slope of `S(t)` over samples with `t ≥ 0.75 t_max`.
    pub late_slope: f64,
    pub deviation: Option<Deviation>,
}

pub fn trajectory_file(out_dir: &Path, prefix: &str, k: f64) -> PathBuf {
    out_dir.join(format!("{prefix}{k}.csv"))
}

fn write_file(path: &Path, run: &Run) -> Result<(), CliError> {
    let file = File::create(path).map_err(CliError::io(path))?;
    let mut out = BufWriter::new(file);
    run.write_csv(&mut out).map_err(CliError::io(path))?;
    out.flush().map_err(CliError::io(path))
}

pub fn late_slope(traj: &Trajectory) -> f64 {
    let t_max = traj.last().map_or(0.0, |s| s.t);
    let pts: Vec<(f64, f64)> = traj
        .samples()
        .iter()
        .filter(|s| s.t >= 0.75 * t_max)
        .map(|s| (s.t, s.s))
        .collect();
    least_squares_slope(&pts)
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    sxy / sxx
}

fn sweep_with_prefix(
    config: &RunConfig,
    k_values: &[f64],
    out_dir: &Path,
    prefix: &str,
) -> Result<Vec<SweepRow>, CliError> {
    if k_values.is_empty() {
        return Err(CliError::Sweep("no k values given".into()));
    }
    if let Some(k) = k_values.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
        return Err(CliError::Sweep(format!("k = {k} must be finite and >= 0")));
    }
    std::fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;
    k_values
        .par_iter()
        .map(|&k| {
            let mut cfg = config.clone();
            cfg.bath = BathParams::new(k, config.bath.n_bar).map_err(|source| CliError::Numeric {
                operation: "sweep".into(),
                source,
            })?;
            let run = run(&cfg)?;
            let path = trajectory_file(out_dir, prefix, k);
            write_file(&path, &run)?;
            let last = run.primary.last().expect("grids have at least three samples");
            Ok(SweepRow {
                k,
                path,
                final_d: last.d,
                final_s: last.s,
                late_slope: late_slope(&run.primary),
                deviation: run.deviation(),
            })
        })
        .collect()
}

/// One trajectory file per `k` in `out_dir`, then `summary.csv` with the
/// final `D`, final `S` and late-time entropy slope of each.
pub fn cmd_sweep(config: &RunConfig, k_values: &[f64], out_dir: &Path) -> Result<Vec<SweepRow>, CliError> {
    let rows = sweep_with_prefix(config, k_values, out_dir, "k_")?;
    let path = out_dir.join("summary.csv");
    let mut text = String::from("k,final_D,final_S,late_slope\n");
    for r in &rows {
        text.push_str(&format!(
            "{:.11e},{:.11e},{:.11e},{:.11e}\n",
            r.k, r.final_d, r.final_s, r.late_slope
        ));
    }
    std::fs::write(&path, text).map_err(CliError::io(&path))?;
    Ok(rows)
}

pub const FIGURE_K: [f64; 3] = [0.5, 1.0, 1.5];

/// The configuration plotted in figure `id`, with `k` left at 0.
pub fn figure_config(id: u32) -> Result<RunConfig, CliError> {
    let numeric = |source| CliError::Numeric {
        operation: "figure_config".into(),
        source,
    };
    let zero = Complex64::new(0.0, 0.0);
    let (profile, initial, t_max) = match id {
        1 | 2 => (
            FrequencyProfile::inverted(1.0),
            GaussianParams::new(zero, 1.0, 0.0, 0.0),
            20.0,
        ),
        4 | 5 => (
            FrequencyProfile::sqrt_ramp(1.0, 1.0),
            GaussianParams::new(zero, 0.0, 0.0, if id == 4 { 0.0 } else { 3.0 }),
            10.0,
        ),
        _ => return Err(CliError::UnknownFigure(id)),
    };
    Ok(RunConfig {
        profile: profile.map_err(numeric)?,
        bath: BathParams::new(0.0, 0.0).map_err(numeric)?,
        initial: initial.map_err(numeric)?,
        t_max,
        n_steps: 200,
        tol: Tolerances::default(),
        engine: Engine::Chord,
    })
}

fn plot_script(id: u32, files: &[(f64, PathBuf)]) -> String {
    let (column, label) = if id == 1 { (2, "D(t)") } else { (3, "S(t)") };
    // dashed, solid and dotted for k = 0.5, 1, 1.5
    let dash = |k: f64| {
        if k == 0.5 {
            2
        } else if k == 1.0 {
            1
        } else {
            3
        }
    };
    let curves: Vec<String> = files
        .iter()
        .map(|(k, path)| {
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            format!("'{name}' using 1:{column} with lines dashtype {} title 'k={k}'", dash(*k))
        })
        .collect();
    format!(
        "# gnuplot script; run from this directory, e.g. `gnuplot -p fig{id}.gp`\n\
         # set terminal pngcairo; set output 'fig{id}.png'\n\
         set datafile separator ','\n\
         set key top left\n\
         set xlabel 't'\n\
         set ylabel '{label}'\n\
         plot {}\n",
        curves.join(", \\\n     ")
    )
}

/// Writes `fig<id>_k<k>.csv` for each plotted `k` and a gnuplot script
/// `fig<id>.gp` into `out_dir`; returns the paths written.
pub fn cmd_figures(id: u32, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let config = figure_config(id)?;
    let rows = sweep_with_prefix(&config, &FIGURE_K, out_dir, &format!("fig{id}_k"))?;
    let files: Vec<(f64, PathBuf)> = rows.into_iter().map(|r| (r.k, r.path)).collect();
    let script = out_dir.join(format!("fig{id}.gp"));
    std::fs::write(&script, plot_script(id, &files)).map_err(CliError::io(&script))?;
    let mut paths: Vec<PathBuf> = files.into_iter().map(|(_, p)| p).collect();
    paths.push(script);
    Ok(paths)
}

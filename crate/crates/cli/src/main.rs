use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gausslind::config::{Origin, RawConfig, RunConfig};
use gausslind::{cmd_evolve, cmd_figures, cmd_sweep, CliError, Deviation};

#[derive(Parser)]
#[command(name = "gausslind", version, about = "Damped Gaussian-state evolution under time-dependent oscillators")]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "GAUSSLIND_JOBS", default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one configuration and write its trajectory as CSV.
    Evolve {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evolve one configuration for several damping rates.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated damping rates.
        #[arg(long = "k-values", value_delimiter = ',', required = true)]
        k_values: Vec<f64>,
        #[arg(long, default_value = "sweep")]
        out_dir: PathBuf,
    },
    /// Write the data and a gnuplot script for figure 1, 2, 4 or 5.
    Figures {
        id: u32,
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// `key = value` configuration file; flags below override it.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long = "profile.kind", value_name = "constant|inverted|sqrt_ramp|tabulated")]
    profile_kind: Option<String>,
    #[arg(long = "profile.omega0", value_name = "W")]
    profile_omega0: Option<String>,
    #[arg(long = "profile.gamma", value_name = "G")]
    profile_gamma: Option<String>,
    #[arg(long = "profile.table", value_name = "PATH")]
    profile_table: Option<String>,
    #[arg(long = "bath.k", value_name = "K")]
    bath_k: Option<String>,
    #[arg(long = "bath.n_bar", value_name = "N")]
    bath_n_bar: Option<String>,
    #[arg(long = "initial.alpha_re", value_name = "X", allow_hyphen_values = true)]
    initial_alpha_re: Option<String>,
    #[arg(long = "initial.alpha_im", value_name = "X", allow_hyphen_values = true)]
    initial_alpha_im: Option<String>,
    #[arg(long = "initial.r", value_name = "R")]
    initial_r: Option<String>,
    #[arg(long = "initial.phi", value_name = "PHI", allow_hyphen_values = true)]
    initial_phi: Option<String>,
    #[arg(long = "initial.nu", value_name = "NU")]
    initial_nu: Option<String>,
    #[arg(long = "grid.t_max", value_name = "T")]
    grid_t_max: Option<String>,
    #[arg(long = "grid.n_steps", value_name = "N")]
    grid_n_steps: Option<String>,
    #[arg(long = "tol.ode", value_name = "TOL")]
    tol_ode: Option<String>,
    #[arg(long = "tol.quad", value_name = "TOL")]
    tol_quad: Option<String>,
    #[arg(long, value_name = "chord|oracle|both")]
    engine: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::read(path)?,
            None => RawConfig::default(),
        };
        let flags = [
            ("profile.kind", &self.profile_kind),
            ("profile.omega0", &self.profile_omega0),
            ("profile.gamma", &self.profile_gamma),
            ("profile.table", &self.profile_table),
            ("bath.k", &self.bath_k),
            ("bath.n_bar", &self.bath_n_bar),
            ("initial.alpha_re", &self.initial_alpha_re),
            ("initial.alpha_im", &self.initial_alpha_im),
            ("initial.r", &self.initial_r),
            ("initial.phi", &self.initial_phi),
            ("initial.nu", &self.initial_nu),
            ("grid.t_max", &self.grid_t_max),
            ("grid.n_steps", &self.grid_n_steps),
            ("tol.ode", &self.tol_ode),
            ("tol.quad", &self.tol_quad),
            ("engine", &self.engine),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                raw.set(key, v, Origin::Flag)?;
            }
        }
        Ok(raw.build()?)
    }
}

fn report(label: &str, dev: &Deviation) {
    eprintln!(
        "{label}max relative deviation chord vs oracle: sigma {:.3e}, mean {:.3e}, D {:.3e}",
        dev.sigma, dev.mean, dev.det
    );
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Evolve { config, output } => {
            let config = config.resolve()?;
            let dev = match output {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|source| CliError::Io {
                        target: path.display().to_string(),
                        source,
                    })?;
                    let mut out = std::io::BufWriter::new(file);
                    let dev = cmd_evolve(&config, &mut out)?;
                    out.flush().map_err(|source| CliError::Io {
                        target: path.display().to_string(),
                        source,
                    })?;
                    dev
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut out = std::io::BufWriter::new(stdout.lock());
                    let dev = cmd_evolve(&config, &mut out)?;
                    out.flush().map_err(|source| CliError::Io {
                        target: "stdout".into(),
                        source,
                    })?;
                    dev
                }
            };
            if let Some(dev) = dev {
                report("", &dev);
            }
        }
        Command::Sweep {
            config,
            k_values,
            out_dir,
        } => {
            let config = config.resolve()?;
            for row in cmd_sweep(&config, &k_values, &out_dir)? {
                if let Some(dev) = row.deviation {
                    report(&format!("k={}: ", row.k), &dev);
                }
            }
        }
        Command::Figures { id, out_dir } => {
            for path in cmd_figures(id, &out_dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use clap::{Args, Parser, Subcommand};
use jumptime_cli::commands::{self, SweepSpec};
use jumptime_cli::config::ExperimentConfig;
use jumptime_cli::report::OutputDir;
use jumptime_cli::verify;
use jumptime_core::CoreError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit codes: 0 success, 1 acceptance/consistency failure, 2 config
/// error, 3 dark-contact domain error.
const EXIT_CONSISTENCY: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DARK: u8 = 3;

#[derive(Parser)]
#[command(
    name = "jumptime",
    version,
    about = "Dissipative two-band lattice models under quantum-jump unraveling",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (one run per directory).
    #[arg(long)]
    out: PathBuf,
    /// Override the trajectory count.
    #[arg(long)]
    trajectories: Option<u64>,
    /// Override the maximum jump count.
    #[arg(long)]
    n_max: Option<usize>,
    /// Override the lattice cells per axis, comma separated.
    #[arg(long, value_delimiter = ',')]
    cells: Option<Vec<usize>>,
    /// Override the base seed.
    #[arg(long)]
    base_seed: Option<u64>,
}

impl CommonArgs {
    fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::from_file(&self.config)?;
        if let Some(n) = self.trajectories {
            cfg.run.trajectories = n;
        }
        if let Some(n) = self.n_max {
            cfg.run.n_max = n;
        }
        if let Some(cells) = &self.cells {
            cfg.run.cells = cells.clone();
            if cfg.run.init_cell.len() != cells.len() {
                cfg.run.init_cell = vec![0; cells.len()];
            }
        }
        if let Some(s) = self.base_seed {
            cfg.run.base_seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Trajectory ensemble read out at jump counts.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Trajectory ensemble read out at fixed walltimes.
    Walltime {
        #[command(flatten)]
        common: CommonArgs,
        /// Also integrate the dense master equation for comparison.
        #[arg(long)]
        with_master: bool,
        /// Override the final time (units of 1/gamma).
        #[arg(long)]
        t_max: Option<f64>,
        /// Override the number of readout bins.
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Deterministic jumptime kernel evolution.
    JumptimeMap {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of jumps to apply.
        #[arg(long, default_value_t = 4)]
        steps: usize,
    },
    /// Winding numbers, jumptime phases, residuals, curvature.
    Topology {
        #[command(flatten)]
        common: CommonArgs,
        /// Starting Brillouin-zone grid size per axis.
        #[arg(long)]
        np: Option<usize>,
        /// Sweep parameter: v_over_w (ssh) or u_over_w (torus2d).
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        sweep_from: f64,
        #[arg(long, default_value_t = 10.0)]
        sweep_to: f64,
        #[arg(long, default_value_t = 40)]
        sweep_steps: usize,
    },
    /// Walltime steady state: closed form, numeric blocks, crossover table.
    SteadyState {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Four-panel topological-transport reproduction.
    Fig2 {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 700)]
        trajectories: u64,
        #[arg(long, default_value_t = 7)]
        base_seed: u64,
    },
    /// Run the acceptance suite and print the pass/fail matrix.
    Verify {
        /// Write the report JSON here as well.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn classify(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<CoreError>() {
        return match core {
            CoreError::DarkContact { .. } | CoreError::DarkDivergence { .. } => EXIT_DARK,
            CoreError::InvalidModel(_) | CoreError::InvalidArgument(_) => EXIT_CONFIG,
            _ => EXIT_CONSISTENCY,
        };
    }
    if err.downcast_ref::<serde_json::Error>().is_some()
        || err.downcast_ref::<std::io::Error>().is_some()
    {
        return EXIT_CONFIG;
    }
    EXIT_CONSISTENCY
}

fn init_threads() {
    if let Ok(n) = std::env::var("JUMPTIME_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Run a command body inside an output directory, always finishing the
/// manifest, and translate errors to exit codes.
fn with_output(
    out_path: &PathBuf,
    command: &str,
    cfg_hash: &str,
    body: impl FnOnce(&mut OutputDir) -> anyhow::Result<()>,
) -> ExitCode {
    let mut out = match OutputDir::create(out_path, command, cfg_hash) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let result = body(&mut out);
    let code = match &result {
        Ok(()) => 0u8,
        Err(e) => {
            eprintln!("error: {e:#}");
            classify(e)
        }
    };
    if let Err(e) = out.finish(result.err().map(|e| format!("{e:#}"))) {
        eprintln!("error writing manifest: {e:#}");
        return ExitCode::from(EXIT_CONSISTENCY);
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { common } => match common.load() {
            Ok(cfg) => with_output(&common.out, "simulate", &cfg.content_hash(), |out| {
                commands::cmd_simulate(&cfg, out)
            }),
            Err(e) => config_error(&common.out, "simulate", e),
        },
        Command::Walltime {
            common,
            with_master,
            t_max,
            bins,
        } => match common.load() {
            Ok(mut cfg) => {
                if let Some(t) = t_max {
                    cfg.run.t_max = t;
                }
                if let Some(b) = bins {
                    cfg.run.walltime_bins = b;
                }
                with_output(&common.out, "walltime", &cfg.content_hash(), |out| {
                    commands::cmd_walltime(&cfg, out, with_master)
                })
            }
            Err(e) => config_error(&common.out, "walltime", e),
        },
        Command::JumptimeMap { common, steps } => match common.load() {
            Ok(cfg) => with_output(&common.out, "jumptime-map", &cfg.content_hash(), |out| {
                commands::cmd_jumptime_map(&cfg, out, steps)
            }),
            Err(e) => config_error(&common.out, "jumptime-map", e),
        },
        Command::Topology {
            common,
            np,
            sweep,
            sweep_from,
            sweep_to,
            sweep_steps,
        } => match common.load() {
            Ok(cfg) => {
                let sweep = sweep.map(|parameter| SweepSpec {
                    parameter,
                    from: sweep_from,
                    to: sweep_to,
                    steps: sweep_steps,
                });
                with_output(&common.out, "topology", &cfg.content_hash(), |out| {
                    commands::cmd_topology(&cfg, out, np, sweep)
                })
            }
            Err(e) => config_error(&common.out, "topology", e),
        },
        Command::SteadyState { common } => match common.load() {
            Ok(cfg) => with_output(&common.out, "steady-state", &cfg.content_hash(), |out| {
                commands::cmd_steady_state(&cfg, out)
            }),
            Err(e) => config_error(&common.out, "steady-state", e),
        },
        Command::Fig2 {
            out,
            trajectories,
            base_seed,
        } => with_output(&out, "fig2", "builtin-fig2", |o| {
            commands::cmd_fig2(o, trajectories, base_seed)
        }),
        Command::Verify { out } => {
            let checks = verify::run_all();
            for chk in &checks {
                println!("{}", chk.line());
            }
            let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
            println!(
                "verify: {}/{} criteria passed",
                checks.len() - failed.len(),
                checks.len()
            );
            if let Some(path) = out {
                #[derive(serde::Serialize)]
                struct Line {
                    id: String,
                    name: String,
                    passed: bool,
                    details: String,
                    seconds: f64,
                }
                let lines: Vec<Line> = checks
                    .iter()
                    .map(|chk| Line {
                        id: chk.id.into(),
                        name: chk.name.into(),
                        passed: chk.passed,
                        details: chk.details.clone(),
                        seconds: chk.seconds,
                    })
                    .collect();
                if let Err(e) = std::fs::create_dir_all(&path).and_then(|_| {
                    std::fs::write(
                        path.join("verify_report.json"),
                        serde_json::to_string_pretty(&lines).unwrap(),
                    )
                }) {
                    eprintln!("error writing report: {e}");
                }
            }
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CONSISTENCY)
            }
        }
    }
}

/// Config failed to parse: still write a manifest recording the error.
fn config_error(out: &PathBuf, command: &str, err: anyhow::Error) -> ExitCode {
    eprintln!("error: {err:#}");
    if let Ok(o) = OutputDir::create(out, command, "unparsed-config") {
        let _ = o.finish(Some(format!("{err:#}")));
    }
    ExitCode::from(EXIT_CONFIG)
}

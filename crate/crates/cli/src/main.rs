use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsd_nmr_cli::config::{
    parse_convention, parse_frame, parse_gate, parse_sharing, parse_source, SimulationConfig,
};
use qsd_nmr_cli::oracle::{compare_oracle, InitialState, OracleOptions};
use qsd_nmr_cli::output::plot_signal_noise;
use qsd_nmr_cli::runner::run_with_stem_rows;
use qsd_nmr_cli::sweep::{parse_pairs, sweep};
use qsd_nmr_cli::{figures::reproduce_figures, CliError, CliResult};

/// Quantum-state-diffusion simulator for measurement in a liquid-NMR qubit.
#[derive(Parser)]
#[command(name = "qsd-nmr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its per-step CSV.
    Run(RunArgs),
    /// Run the five published weight presets and emit CSVs and SVG plots.
    ReproduceFigures(FiguresArgs),
    /// Compare the trajectory ensemble mean against the master-equation
    /// oracle (exit status reports pass/fail).
    CompareOracle(OracleArgs),
    /// Run a grid of (alpha, beta) pairs and tabulate signal/noise medians.
    Sweep(SweepArgs),
}

/// Configuration file plus per-field overrides; flags win over the file,
/// the file wins over the defaults.
#[derive(Args)]
struct ConfigArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Hamiltonian weight in [0, 1].
    #[arg(long)]
    alpha: Option<f64>,
    /// Environment weight in [0, 1].
    #[arg(long)]
    beta: Option<f64>,
    /// Larmor angular frequency, rad/s.
    #[arg(long)]
    omega0: Option<f64>,
    /// Sample temperature, K.
    #[arg(long)]
    temperature: Option<f64>,
    /// Measurement duration, s.
    #[arg(long)]
    duration: Option<f64>,
    /// Number of integration steps.
    #[arg(long)]
    steps: Option<usize>,
    /// RNG seed; recorded in every report.
    #[arg(long)]
    seed: Option<u64>,
    /// Wiener-increment normalization.
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    /// Evolution frame during the measurement.
    #[arg(long, value_enum)]
    frame: Option<FrameArg>,
    /// One shared or two independent noise realizations per step.
    #[arg(long, value_enum)]
    noise_sharing: Option<SharingArg>,
    /// Whose expectation values drive each basis state.
    #[arg(long, value_enum)]
    expectation_source: Option<SourceArg>,
    /// Number of trajectories averaged in the output.
    #[arg(long)]
    ensemble_size: Option<usize>,
    /// Gate applied to the thermal state before measuring.
    #[arg(long, value_enum)]
    gate: Option<GateArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    AppendixComplex,
    GisinPercival,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Laboratory,
    Rotating,
}

#[derive(Clone, Copy, ValueEnum)]
enum SharingArg {
    Shared,
    Independent,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    PerState,
    AppendixCompat,
}

#[derive(Clone, Copy, ValueEnum)]
enum GateArg {
    X,
    Y,
    Z,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitialStateArg {
    Ground,
    Excited,
    Plus,
}

impl ConfigArgs {
    fn build(&self) -> CliResult<SimulationConfig> {
        let mut cfg = SimulationConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.beta {
            cfg.beta = v;
        }
        if let Some(v) = self.omega0 {
            cfg.omega0 = v;
        }
        if let Some(v) = self.temperature {
            cfg.temperature = v;
        }
        if let Some(v) = self.duration {
            cfg.duration = v;
        }
        if let Some(v) = self.steps {
            cfg.steps = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.convention {
            cfg.convention = parse_convention(match v {
                ConventionArg::AppendixComplex => "appendix-complex",
                ConventionArg::GisinPercival => "gisin-percival",
            })?;
        }
        if let Some(v) = self.frame {
            cfg.frame = parse_frame(match v {
                FrameArg::Laboratory => "laboratory",
                FrameArg::Rotating => "rotating",
            })?;
        }
        if let Some(v) = self.noise_sharing {
            cfg.noise_sharing = parse_sharing(match v {
                SharingArg::Shared => "shared",
                SharingArg::Independent => "independent",
            })?;
        }
        if let Some(v) = self.expectation_source {
            cfg.expectation_source = parse_source(match v {
                SourceArg::PerState => "per-state",
                SourceArg::AppendixCompat => "appendix-compat",
            })?;
        }
        if let Some(v) = self.ensemble_size {
            cfg.ensemble_size = v;
        }
        if let Some(v) = self.gate {
            cfg.gate = parse_gate(match v {
                GateArg::X => "x",
                GateArg::Y => "y",
                GateArg::Z => "z",
                GateArg::None => "none",
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory for the CSV (and plot, if requested).
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Also draw the signal/noise SVG next to the CSV.
    #[arg(long)]
    plot: bool,
}

#[derive(Args)]
struct FiguresArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Initial pure state of every trajectory.
    #[arg(long, value_enum, default_value = "excited")]
    psi0: InitialStateArg,
    /// Ensemble size K (at least 100).
    #[arg(long, default_value_t = 2000)]
    trajectories: usize,
    /// Duration in inverse-rate units of the Lindblad operator.
    #[arg(long, default_value_t = 1.0)]
    duration: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Number of sampled comparison times, endpoints included.
    #[arg(long, default_value_t = 21)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated `alpha:beta` pairs, e.g. `1:0,0.7:0.3,0:1`.
    #[arg(long)]
    pairs: String,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run(args) => {
            let config = args.config.build()?;
            let stem = format!(
                "run_alpha{:.4}_beta{:.4}_seed{}",
                config.alpha, config.beta, config.seed
            );
            let (report, rows) = run_with_stem_rows(&config, &args.out_dir, &stem)?;
            if args.plot {
                let plot_path = args.out_dir.join(format!("{stem}.svg"));
                let title = format!("alpha = {}, beta = {}", config.alpha, config.beta);
                if let Err(err) = plot_signal_noise(&plot_path, &title, &rows, None) {
                    eprintln!(
                        "warning: plot {} failed: {err}; CSV kept",
                        plot_path.display()
                    );
                }
            }
            println!("{report}");
            Ok(())
        }
        Command::ReproduceFigures(args) => {
            let config = args.config.build()?;
            let reports = reproduce_figures(&config, &args.out_dir)?;
            for report in &reports {
                println!(
                    "alpha = {}, beta = {}: median |Re Mx| = {:e}, median |Re My| = {:e} -> {}",
                    report.config.alpha,
                    report.config.beta,
                    report.summary.median_mx_abs_re,
                    report.summary.median_my_abs_re,
                    report.csv_path.display()
                );
            }
            Ok(())
        }
        Command::CompareOracle(args) => {
            let options = OracleOptions {
                psi0: match args.psi0 {
                    InitialStateArg::Ground => InitialState::Ground,
                    InitialStateArg::Excited => InitialState::Excited,
                    InitialStateArg::Plus => InitialState::Plus,
                },
                trajectories: args.trajectories,
                duration: args.duration,
                steps: args.steps,
                samples: args.samples,
                seed: args.seed,
            };
            let report = compare_oracle(&options)?;
            println!("{report}");
            if report.pass {
                Ok(())
            } else {
                Err(CliError::Numerical(
                    "ensemble mean deviates from the master-equation oracle beyond 4 sigma".into(),
                ))
            }
        }
        Command::Sweep(args) => {
            let pairs = parse_pairs(&args.pairs)?;
            let config = args.config.build()?;
            let (rows, path) = sweep(&pairs, &config, &args.out_dir)?;
            println!("alpha    beta     median|Re Mx|  median|Re My|  noise/signal");
            for row in &rows {
                println!(
                    "{:<8} {:<8} {:<14.6e} {:<14.6e} {:.6e}",
                    row.alpha, row.beta, row.median_mx_abs_re, row.median_my_abs_re,
                    row.noise_to_signal
                );
            }
            println!("table written to {}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not errors; anything else is a
            // configuration problem (exit code 1).
            if err.use_stderr() {
                eprint!("{err}");
                return ExitCode::from(1);
            }
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}

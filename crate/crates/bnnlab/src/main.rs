use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bnnlab::compare::compare;
use bnnlab::config::{parse_algo, RawConfig};
use bnnlab::figures::run_figures_preset;
use bnnlab::plotdata::emit_plot_data;
use bnnlab::runner::run_experiment;
use bnnlab::{HarnessError, Result};

#[derive(Parser)]
#[command(
    name = "bnnlab",
    about = "BNN learning dynamics laboratory for two-player zero-sum games",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct RunFlags {
    /// Flat key-value config file (TOML); CLI flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Game: rps | brps | brps_w | kuhn | leduc, optionally with inline
    /// params like brps:12,1,1 or kuhn:2
    #[arg(long)]
    game: Option<String>,
    /// Nonstationary payoff schedule for the rps family, e.g.
    /// direct:(12,1,1)x2500;(6.5,6.5,1)x2500;(1,12,1)x2500
    #[arg(long)]
    schedule: Option<String>,
    /// Nonstationary bet-size schedule for kuhn, e.g. direct:1x2500;2x2500
    #[arg(long)]
    bet_schedule: Option<String>,
    /// Algorithm: bnn | replicator | reg-rd:lambda=..,k_ref=.. | bnnac:k=..
    #[arg(long)]
    algo: Option<String>,
    /// Noise level (Gaussian); shorthand for --noise gauss:SIGMA
    #[arg(long)]
    sigma: Option<f64>,
    /// Noise spec: gauss:0.1 | uniform:0.1
    #[arg(long)]
    noise: Option<String>,
    /// Step schedule: power:c=1,t0=10 | const:0.05
    #[arg(long)]
    eta: Option<String>,
    /// Iterations per seed
    #[arg(long)]
    iters: Option<u64>,
    /// Diagnostics every this many iterations
    #[arg(long)]
    eval_interval: Option<u64>,
    /// Seeds: inclusive range 0..29 or list 0,3,17
    #[arg(long)]
    seeds: Option<String>,
    /// Initial profile: random | uniform
    #[arg(long)]
    init: Option<String>,
    /// Simplex floor applied after every step
    #[arg(long)]
    policy_floor: Option<f64>,
    /// Include a Monte-Carlo bias table in the summary (normal form)
    #[arg(long)]
    bias_probe: bool,
    /// Label used in file names; derived from the config when omitted
    #[arg(long)]
    label: Option<String>,
}

impl RunFlags {
    fn to_raw(&self) -> RawConfig {
        RawConfig {
            game: self.game.clone(),
            schedule: self.schedule.clone(),
            bet_schedule: self.bet_schedule.clone(),
            algo: self.algo.clone(),
            sigma: self.sigma,
            noise: self.noise.clone(),
            eta: self.eta.clone(),
            iters: self.iters,
            eval_interval: self.eval_interval,
            seeds: self.seeds.clone(),
            init: self.init.clone(),
            policy_floor: self.policy_floor,
            bias_probe: self.bias_probe.then_some(true),
            label: self.label.clone(),
        }
    }

    fn resolve(&self) -> Result<bnnlab::ExperimentConfig> {
        let file = match &self.config {
            Some(path) => RawConfig::from_toml(&std::fs::read_to_string(path)?)?,
            None => RawConfig::default(),
        };
        file.overlay(self.to_raw()).resolve()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment over its seed list and write traces + summary
    Run {
        #[command(flatten)]
        flags: RunFlags,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Run several algorithms on one game and compare per-stage statistics
    Compare {
        #[command(flatten)]
        flags: RunFlags,
        /// Semicolon-separated algorithm specs, e.g.
        /// "bnn;reg-rd:lambda=0.1,k_ref=500"
        #[arg(long)]
        algos: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproduce the benchmark figure matrix at desk scale
    Figures {
        /// Preset name (appendix)
        #[arg(long, default_value = "appendix")]
        preset: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate run directories into gnuplot-ready data files
    PlotData {
        /// Directory tree containing run outputs
        dir: PathBuf,
        /// Destination (default: DIR/plot)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a game tree in the line-oriented debug format
    DumpTree {
        /// kuhn | leduc
        #[arg(long, default_value = "kuhn")]
        game: String,
        /// Bet size for kuhn
        #[arg(long, default_value_t = 1.0)]
        bet_size: f64,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { flags, out } => {
            let cfg = flags.resolve()?;
            let summary = run_experiment(&cfg, &out)?;
            eprintln!(
                "{}: {} seeds, final mean NashConv {:.6}",
                cfg.label,
                summary.per_seed.len(),
                summary.tail.nash_conv_mean
            );
            Ok(())
        }
        Command::Compare { flags, algos, out } => {
            let base = flags.resolve()?;
            let specs = algos
                .split(';')
                .map(|s| parse_algo(s.trim()))
                .collect::<Result<Vec<_>>>()?;
            if specs.len() < 2 {
                return Err(HarnessError::Config(
                    "compare needs at least two algorithm specs".into(),
                ));
            }
            let summary = compare(&base, &specs, &out)?;
            for algo in &summary.algos {
                eprintln!(
                    "{}: final-stage mean NashConv {:.6}",
                    algo.label, algo.final_stage_mean_nash_conv
                );
            }
            Ok(())
        }
        Command::Figures { preset, out } => {
            let figures = run_figures_preset(&preset, &out)?;
            eprintln!("wrote {} figure directories under {}", figures.len(), out.display());
            Ok(())
        }
        Command::PlotData { dir, out } => {
            let out = out.unwrap_or_else(|| dir.join("plot"));
            let files = emit_plot_data(&dir, &out)?;
            eprintln!("wrote {} data files to {}", files.len(), out.display());
            Ok(())
        }
        Command::DumpTree { game, bet_size } => {
            let dump = match game.as_str() {
                "kuhn" => bnn_core::efg::kuhn::build_kuhn::<f64>(bet_size).dump(),
                "leduc" => bnn_core::efg::leduc::build_leduc::<f64>().dump(),
                other => {
                    return Err(HarnessError::Config(format!(
                        "unknown tree '{other}' (kuhn|leduc)"
                    )))
                }
            };
            print!("{dump}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

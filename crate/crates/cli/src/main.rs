use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ecfr::embed_net::{Optimizer, TrainConfig};
use ecfr::harness::{self, Budget, ExperimentSpec, SolverKind};

#[derive(Parser)]
#[command(name = "ecfr", version, about = "CFR solvers in infoset space and in a learned advisor space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one embedding network per abstracted round.
    TrainEmbedding(Common),
    /// Run a solver and record its exploitability curve.
    Solve(Common),
    /// Exploitability of a strategy written by `solve`.
    Eval(EvalArgs),
    /// Solve several solvers on one game and merge their curves.
    Compare(Common),
    /// Per-round hand counts.
    Enumerate(EnumerateArgs),
}

#[derive(Args, Clone)]
struct GameArgs {
    /// Preset: kuhn, numeral20, numeral211, numeral211-1h.
    #[arg(long, default_value = "numeral20")]
    game: String,
    /// Game config file (`key = value` lines); overrides --game.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Allow full-scale games.
    #[arg(long)]
    full: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptimizerArg {
    Sgd,
    Momentum,
    Adam,
}

#[derive(Args, Clone)]
struct Common {
    #[command(flatten)]
    game: GameArgs,
    /// vanilla, embedding or bucketed; a comma list for `compare`.
    #[arg(long, default_value = "embedding")]
    solver: String,
    /// Advisors per abstracted round: a percentage of the class count (40%) or counts (225,396).
    #[arg(long)]
    m: Option<String>,
    /// Buckets per abstracted round, same forms as --m. Defaults to --m.
    #[arg(long)]
    buckets: Option<String>,
    /// Bucket map CSV to use instead of EHS clustering.
    #[arg(long)]
    bucket_map: Option<PathBuf>,
    #[arg(long, default_value_t = 1024)]
    iters: u64,
    /// Sampled deals per iteration (embedding solver); exact enumeration when omitted.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    eval_every: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Threads; results are identical for any value.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Artifact root for trained networks.
    #[arg(long, env = "ECFR_DATA_DIR", default_value = "ecfr-data")]
    data_dir: PathBuf,
    /// Reach-weighted advisor average instead of the plain running mean.
    #[arg(long)]
    weighted_average: bool,
    #[arg(long, value_enum, default_value = "adam")]
    optimizer: OptimizerArg,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Output directory of a `solve` run.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Strategy file; defaults to `<out>/strategy.bin`.
    #[arg(long)]
    strategy: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Only this round (1-based).
    #[arg(long)]
    round: Option<usize>,
    /// Also count suit-isomorphism classes (builds the hand space).
    #[arg(long)]
    classes: bool,
}

impl GameArgs {
    fn load(&self) -> Result<ecfr::GameConfig> {
        Ok(harness::resolve_game(&self.game, self.config.as_deref())?)
    }
}

impl Common {
    fn spec(&self, solver: SolverKind, out: PathBuf) -> Result<ExperimentSpec> {
        let mut train = TrainConfig {
            optimizer: match self.optimizer {
                OptimizerArg::Sgd => Optimizer::Sgd,
                OptimizerArg::Momentum => Optimizer::Momentum(0.9),
                OptimizerArg::Adam => Optimizer::Adam,
            },
            ..TrainConfig::default()
        };
        if let Some(lr) = self.lr {
            train.learning_rate = lr;
        } else if !matches!(train.optimizer, Optimizer::Adam) {
            train.learning_rate = 0.05;
        }
        if let Some(e) = self.epochs {
            train.epochs = e;
        }
        if let Some(b) = self.batch_size {
            train.batch_size = b;
        }
        let parse = |s: &Option<String>| -> Result<Option<Budget>> {
            s.as_deref().map(str::parse::<Budget>).transpose().map_err(Into::into)
        };
        if self.workers == 0 {
            bail!("--workers must be at least 1");
        }
        Ok(ExperimentSpec {
            game: self.game.load()?,
            solver,
            m: parse(&self.m)?,
            buckets: parse(&self.buckets)?,
            bucket_map: self.bucket_map.clone(),
            iterations: self.iters,
            budget: self.budget,
            seed: self.seed,
            eval_every: self.eval_every,
            weighted_average: self.weighted_average,
            train,
            out,
            data_dir: self.data_dir.clone(),
            workers: self.workers,
            full: self.game.full,
        })
    }

    fn solvers(&self) -> Result<Vec<SolverKind>> {
        let v = self
            .solver
            .split(',')
            .map(|s| s.trim().parse::<SolverKind>())
            .collect::<ecfr::Result<Vec<_>>>()?;
        if v.is_empty() {
            bail!("no solver given");
        }
        Ok(v)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::TrainEmbedding(c) => {
            let spec = c.spec(SolverKind::Embedding, c.out.clone())?;
            for s in harness::train_embedding(&spec)? {
                println!(
                    "round {}: m = {}, mse {:.6} (mean predictor {:.6}) -> {}",
                    s.round + 1,
                    s.m,
                    s.final_mse,
                    s.baseline_mse,
                    s.path.display()
                );
            }
        }
        Command::Solve(c) => {
            let solvers = c.solvers()?;
            if solvers.len() != 1 {
                bail!("solve takes one solver; use compare for several");
            }
            let spec = c.spec(solvers[0], c.out.clone())?;
            println!("{}", spec.header());
            let outcome = harness::solve_with(&spec, |row| {
                eprintln!("iteration {:>6}  {:.3} mb/g", row.iteration, row.report.epsilon_mbg);
            })?;
            if let Some(last) = outcome.metrics.last() {
                println!("{}", last.report);
            }
            println!("wrote {}", outcome.dir.display());
        }
        Command::Eval(e) => {
            let game = e.game.load()?;
            let path = e.strategy.clone().unwrap_or_else(|| e.out.join(harness::STRATEGY_FILE));
            let report = harness::evaluate(&game, &path, e.workers)
                .with_context(|| format!("evaluating {}", path.display()))?;
            println!("{}", ecfr::best_response::ExploitabilityReport::CSV_HEADER);
            println!("{}", report.csv_row());
            println!("{report}");
        }
        Command::Compare(c) => {
            let specs = c
                .solvers()?
                .into_iter()
                .map(|s| c.spec(s, c.out.join(s.name())))
                .collect::<Result<Vec<_>>>()?;
            let outcome = harness::compare_with(&specs, &c.out, |label, row| {
                eprintln!("{label:<10} iteration {:>6}  {:.3} mb/g", row.iteration, row.report.epsilon_mbg);
            })?;
            print!("{}", outcome.summary);
            println!("wrote {}", c.out.join(harness::COMPARE_FILE).display());
        }
        Command::Enumerate(e) => {
            let game = e.game.load()?;
            let mut counts = harness::enumerate(&game, e.classes)?;
            if let Some(r) = e.round {
                if r == 0 || r > counts.len() {
                    bail!("round {r} out of 1..={}", counts.len());
                }
                counts.retain(|c| c.round == r);
            }
            print!("{}", harness::enumerate_csv(&game, &counts));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

//! The experiment commands behind the `ecfr` binary.
//!
//! Every result file starts with a `#` header line carrying the tool version,
//! a SHA-256 of everything that can change the numbers, and the seed. Apart
//! from `timing.csv`, outputs depend only on that configuration.

use std::fmt::{self, Write as _};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::abstraction::{bucketed_cfr, BucketMap, ClusterConfig, FeatureMode};
use crate::best_response::{best_response_value, ExploitabilityReport};
use crate::config::GameConfig;
use crate::embed_net::{default_m, load_params, save_params, train_round, Dataset, TrainConfig};
use crate::embedding_cfr::{EmbeddingCfr, EmbeddingConfig, EmbeddingProvider, Sampling};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::hand_strength::StrengthTable;
use crate::solver::checkpoint::{load_table, save_table};
use crate::solver::{Policy, RowTable, StrategyTable, TabularCfr};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const METRICS_FILE: &str = "metrics.csv";
pub const TIMING_FILE: &str = "timing.csv";
pub const STRATEGY_FILE: &str = "strategy.bin";
pub const BUCKETS_FILE: &str = "buckets.csv";
pub const CHECKPOINT_DIR: &str = "checkpoint";
pub const COMPARE_FILE: &str = "compare.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Advisor counts used for the full game regardless of its class counts.
const NUMERAL211_BUDGET: [usize; 2] = [225, 396];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Vanilla,
    Embedding,
    Bucketed,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Vanilla => "vanilla",
            SolverKind::Embedding => "embedding",
            SolverKind::Bucketed => "bucketed",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vanilla" | "cfr" => Ok(SolverKind::Vanilla),
            "embedding" | "ecfr" => Ok(SolverKind::Embedding),
            "bucketed" | "ehs" => Ok(SolverKind::Bucketed),
            other => Err(Error::Config(format!(
                "unknown solver {other:?} (expected vanilla, embedding or bucketed)"
            ))),
        }
    }
}

/// Per-round size of an abstraction: a share of each round's class count, or explicit counts.
#[derive(Clone, Debug, PartialEq)]
pub enum Budget {
    Fraction(f64),
    PerRound(Vec<usize>),
}

impl FromStr for Budget {
    type Err = Error;

    /// `"40%"` or a comma list such as `"225,396"` (rounds 2 onwards).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad budget {s:?}: use a percentage like 40% or counts like 225,396"));
        if let Some(p) = s.trim().strip_suffix('%') {
            let v: f64 = p.trim().parse().map_err(|_| bad())?;
            if !(v > 0.0 && v <= 100.0) {
                return Err(bad());
            }
            return Ok(Budget::Fraction(v / 100.0));
        }
        let counts = s
            .split(',')
            .map(|x| x.trim().parse::<usize>().ok().filter(|&c| c > 0))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(bad)?;
        Ok(Budget::PerRound(counts))
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Fraction(x) => write!(f, "{}%", x * 100.0),
            Budget::PerRound(v) => {
                let s: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                f.write_str(&s.join(","))
            }
        }
    }
}

impl Budget {
    /// Counts for every round; round 1 is never abstracted.
    pub fn resolve(&self, game: &Game) -> Result<Vec<Option<usize>>> {
        let rounds = game.num_rounds();
        let mut out = vec![None; rounds];
        match self {
            Budget::Fraction(x) => {
                for (r, o) in out.iter_mut().enumerate().skip(1) {
                    let n = game.hands.num_classes(r);
                    *o = Some(((n as f64 * x).round() as usize).clamp(1, n));
                }
            }
            Budget::PerRound(v) => {
                if v.len() != rounds.saturating_sub(1) {
                    return Err(Error::Config(format!(
                        "budget lists {} counts but the game has {} abstracted rounds",
                        v.len(),
                        rounds.saturating_sub(1)
                    )));
                }
                for (o, &c) in out.iter_mut().skip(1).zip(v) {
                    *o = Some(c);
                }
            }
        }
        Ok(out)
    }
}

/// Everything one experiment needs.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub game: GameConfig,
    pub solver: SolverKind,
    /// Advisors per round; defaults to a tenth of the class count (225/396 on the full game).
    pub m: Option<Budget>,
    /// Buckets per round; defaults to `m`.
    pub buckets: Option<Budget>,
    /// Use this bucket map instead of clustering.
    pub bucket_map: Option<PathBuf>,
    pub iterations: u64,
    /// Sampled deals per iteration; exact enumeration when absent.
    pub budget: Option<usize>,
    pub seed: u64,
    pub eval_every: u64,
    pub weighted_average: bool,
    pub train: TrainConfig,
    pub out: PathBuf,
    pub data_dir: PathBuf,
    /// Threads for the two best-response passes. Results do not depend on it.
    pub workers: usize,
    pub full: bool,
}

impl ExperimentSpec {
    pub fn new(game: GameConfig, solver: SolverKind, out: impl Into<PathBuf>) -> Self {
        ExperimentSpec {
            game,
            solver,
            m: None,
            buckets: None,
            bucket_map: None,
            iterations: 1024,
            budget: None,
            seed: 0,
            eval_every: 8,
            weighted_average: false,
            train: TrainConfig::default(),
            out: out.into(),
            data_dir: PathBuf::from("ecfr-data"),
            workers: 1,
            full: false,
        }
    }

    /// The settings that can change a result, one per line.
    pub fn canonical_text(&self) -> String {
        let mut s = self.game.to_text();
        let opt = |b: &Option<Budget>| b.as_ref().map_or("default".to_string(), |b| b.to_string());
        let _ = writeln!(s, "solver = {}", self.solver);
        let _ = writeln!(s, "m = {}", opt(&self.m));
        let _ = writeln!(s, "buckets = {}", opt(&self.buckets));
        let map = self.bucket_map.as_ref().map_or("none".into(), |p| p.display().to_string());
        let _ = writeln!(s, "bucket_map = {map}");
        let _ = writeln!(s, "iterations = {}", self.iterations);
        let budget = self.budget.map_or("exact".into(), |b| b.to_string());
        let _ = writeln!(s, "sampling = {budget}");
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "eval_every = {}", self.eval_every);
        let _ = writeln!(s, "weighted_average = {}", self.weighted_average);
        let _ = writeln!(s, "train = {:?}", self.train);
        let _ = writeln!(s, "version = {VERSION}");
        s
    }

    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }

    pub fn header(&self) -> String {
        format!("# ecfr {VERSION} config_sha256={} seed={}", self.config_hash(), self.seed)
    }

    /// Refuses full-scale games unless `full` is set.
    pub fn check_scale(&self) -> Result<()> {
        if !self.full && self.game.deal_count() > 100_000_000 {
            return Err(Error::Config(format!(
                "{} has {} deals; runs at this scale take days, pass --full to proceed",
                self.game.name,
                self.game.deal_count()
            )));
        }
        Ok(())
    }

    fn default_budget(&self, game: &Game) -> Vec<Option<usize>> {
        let is_full = self.game == GameConfig::numeral211();
        (0..game.num_rounds())
            .map(|r| match r {
                0 => None,
                _ if is_full && r <= NUMERAL211_BUDGET.len() => Some(NUMERAL211_BUDGET[r - 1]),
                _ => Some(default_m(game.hands.num_classes(r))),
            })
            .collect()
    }

    pub fn advisor_budget(&self, game: &Game) -> Result<Vec<Option<usize>>> {
        match &self.m {
            Some(b) => b.resolve(game),
            None => Ok(self.default_budget(game)),
        }
    }

    pub fn bucket_budget(&self, game: &Game) -> Result<Vec<Option<usize>>> {
        match (&self.buckets, &self.m) {
            (Some(b), _) | (None, Some(b)) => b.resolve(game),
            (None, None) => Ok(self.default_budget(game)),
        }
    }

    /// Where the network for `round` (0-based) with `m` advisors lives.
    pub fn net_path(&self, round: usize, m: usize) -> PathBuf {
        self.data_dir
            .join(&self.game.name)
            .join(format!("embedding_round{}_m{m}.bin", round + 1))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Best responses for both players, on two threads when `workers > 1`.
pub fn exploitability_with<P: Policy + Sync>(game: &Game, profile: &P, workers: usize) -> ExploitabilityReport {
    let (b1, b2) = if workers > 1 {
        std::thread::scope(|s| {
            let h = s.spawn(|| best_response_value(game, profile, 1));
            let b1 = best_response_value(game, profile, 0);
            (b1, h.join().expect("best-response thread"))
        })
    } else {
        (best_response_value(game, profile, 0), best_response_value(game, profile, 1))
    };
    let epsilon = b1 + b2;
    ExploitabilityReport {
        b1,
        b2,
        epsilon,
        epsilon_mbg: epsilon / game.config.blind_unit as f64 * 1000.0,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainSummary {
    pub round: usize,
    pub m: usize,
    pub path: PathBuf,
    pub final_mse: f64,
    pub baseline_mse: f64,
}

/// Trains one network per abstracted round and stores it under the data dir.
/// Loss curves go to `train_loss_round<r>.csv` in the output dir.
pub fn train_embedding(spec: &ExperimentSpec) -> Result<Vec<TrainSummary>> {
    spec.check_scale()?;
    let game = Game::new(spec.game.clone())?;
    let strength = StrengthTable::build(&game.hands);
    let budget = spec.advisor_budget(&game)?;
    let mut out = Vec::new();
    for (round, m) in budget.iter().enumerate() {
        let Some(m) = *m else { continue };
        let data = Dataset::build(&game, &strength, round)?;
        let config = TrainConfig {
            m,
            seed: spec.seed.wrapping_add(round as u64),
            ..spec.train.clone()
        };
        let (params, report) = train_round(
            &config,
            &data,
            game.config.num_suits as usize,
            game.config.num_ranks as usize,
        )?;
        let path = spec.net_path(round, m);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        save_params(&path, &params)?;
        let mut w = create(&spec.out.join(format!("train_loss_round{}.csv", round + 1)))?;
        writeln!(w, "{}", spec.header())?;
        writeln!(w, "epoch,loss")?;
        for (e, l) in report.epoch_loss.iter().enumerate() {
            writeln!(w, "{},{l:.9}", e + 1)?;
        }
        w.flush()?;
        out.push(TrainSummary {
            round,
            m,
            path,
            final_mse: report.final_mse,
            baseline_mse: report.baseline_mse,
        });
    }
    let mut w = create(&spec.out.join("train_summary.csv"))?;
    writeln!(w, "{}", spec.header())?;
    writeln!(w, "round,m,final_mse,baseline_mse")?;
    for s in &out {
        writeln!(w, "{},{},{:.9},{:.9}", s.round + 1, s.m, s.final_mse, s.baseline_mse)?;
    }
    w.flush()?;
    Ok(out)
}

/// One evaluation point of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricRow {
    pub iteration: u64,
    pub report: ExploitabilityReport,
}

impl MetricRow {
    pub const CSV_HEADER: &'static str = "iteration,b1,b2,epsilon,epsilon_mbg";

    pub fn csv_row(&self) -> String {
        format!("{},{}", self.iteration, self.report.csv_row())
    }
}

enum Runner {
    Tabular(TabularCfr),
    Embedding(Box<EmbeddingCfr>),
}

impl Runner {
    fn iterate(&mut self) {
        match self {
            Runner::Tabular(s) => s.iterate(),
            Runner::Embedding(s) => s.iterate(),
        }
    }

    fn average(&self) -> RowTable {
        match self {
            Runner::Tabular(s) => s.average_classes(),
            Runner::Embedding(s) => s.average_classes(),
        }
    }
}

/// Loads the trained networks a spec needs; a missing file names the command that makes it.
pub fn load_provider(spec: &ExperimentSpec, game: &Game) -> Result<EmbeddingProvider> {
    let mut provider = EmbeddingProvider::empty(game);
    for (round, m) in spec.advisor_budget(game)?.iter().enumerate() {
        let Some(m) = *m else { continue };
        let path = spec.net_path(round, m);
        if !path.exists() {
            return Err(Error::MissingArtifact {
                path,
                hint: format!(
                    "run `ecfr train-embedding --game {} --m {}` with the same ECFR_DATA_DIR first",
                    spec.game.name,
                    spec.m.as_ref().map_or("<default>".into(), |b| b.to_string())
                ),
            });
        }
        let params = load_params(&path)?;
        if params.m != m {
            return Err(Error::Checkpoint(format!("{} holds m = {}, expected {m}", path.display(), params.m)));
        }
        let cache = crate::embed_net::CoordinateCache::build(game, &params, round)?;
        provider.set_from_cache(game, &cache)?;
    }
    Ok(provider)
}

/// Builds or reads the bucket map of a bucketed run.
pub fn load_buckets(spec: &ExperimentSpec, game: &Game) -> Result<BucketMap> {
    if let Some(path) = &spec.bucket_map {
        if !path.exists() {
            return Err(Error::MissingArtifact {
                path: path.clone(),
                hint: "pass a CSV with header round,canonical_hand_id,bucket".into(),
            });
        }
        return BucketMap::read_csv(game, BufReader::new(File::open(path)?));
    }
    let strength = StrengthTable::build(&game.hands);
    let cluster = ClusterConfig {
        seed: spec.seed,
        ..ClusterConfig::new(1)
    };
    BucketMap::cluster(game, &strength, &spec.bucket_budget(game)?, FeatureMode::Ehs, &cluster)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub metrics: Vec<MetricRow>,
    pub dir: PathBuf,
}

pub fn solve(spec: &ExperimentSpec) -> Result<SolveOutcome> {
    solve_with(spec, |_| {})
}

/// Runs a solver, evaluating the average strategy every `eval_every`
/// iterations. Writes `metrics.csv`, `timing.csv` and `strategy.bin`, plus
/// `buckets.csv` or the advisor checkpoint for the abstracted solvers.
pub fn solve_with(spec: &ExperimentSpec, mut on_eval: impl FnMut(&MetricRow)) -> Result<SolveOutcome> {
    spec.check_scale()?;
    if spec.eval_every == 0 {
        return Err(Error::Config("--eval-every must be positive".into()));
    }
    if spec.budget.is_some() && spec.solver != SolverKind::Embedding {
        return Err(Error::Config("--budget only applies to the embedding solver".into()));
    }
    let game = Game::new(spec.game.clone())?;
    fs::create_dir_all(&spec.out)?;
    let mut runner = match spec.solver {
        SolverKind::Vanilla => Runner::Tabular(TabularCfr::vanilla(game.clone())),
        SolverKind::Bucketed => {
            let map = load_buckets(spec, &game)?;
            let mut w = create(&spec.out.join(BUCKETS_FILE))?;
            map.write_csv(&mut w)?;
            w.flush()?;
            Runner::Tabular(bucketed_cfr(game.clone(), &map))
        }
        SolverKind::Embedding => {
            let provider = load_provider(spec, &game)?;
            let config = EmbeddingConfig {
                abstract_from: 1,
                sampling: match spec.budget {
                    Some(budget) => Sampling::Deals { budget, seed: spec.seed },
                    None => Sampling::Exact,
                },
                weighted_average: spec.weighted_average,
            };
            Runner::Embedding(Box::new(EmbeddingCfr::new(game.clone(), provider, config)?))
        }
    };
    let mut metrics_w = create(&spec.out.join(METRICS_FILE))?;
    writeln!(metrics_w, "{}", spec.header())?;
    writeln!(metrics_w, "{}", MetricRow::CSV_HEADER)?;
    let mut timing_w = create(&spec.out.join(TIMING_FILE))?;
    writeln!(timing_w, "{}", spec.header())?;
    writeln!(timing_w, "iteration,wall_seconds")?;
    let start = Instant::now();
    let mut metrics = Vec::new();
    for t in 1..=spec.iterations {
        runner.iterate();
        if t % spec.eval_every == 0 {
            let row = MetricRow {
                iteration: t,
                report: exploitability_with(&game, &runner.average(), spec.workers),
            };
            writeln!(metrics_w, "{}", row.csv_row())?;
            metrics_w.flush()?;
            writeln!(timing_w, "{t},{:.3}", start.elapsed().as_secs_f64())?;
            timing_w.flush()?;
            on_eval(&row);
            metrics.push(row);
        }
    }
    let average = runner.average();
    save_table(&spec.out.join(STRATEGY_FILE), &game, &StrategyTable::from_rows(&game, &average))?;
    if let Runner::Embedding(s) = &runner {
        s.save(&spec.out.join(CHECKPOINT_DIR))?;
    }
    Ok(SolveOutcome {
        metrics,
        dir: spec.out.clone(),
    })
}

/// Exploitability of a saved strategy table.
pub fn evaluate(config: &GameConfig, strategy: &Path, workers: usize) -> Result<ExploitabilityReport> {
    if !strategy.exists() {
        return Err(Error::MissingArtifact {
            path: strategy.to_path_buf(),
            hint: "run `ecfr solve` with the same --out first".into(),
        });
    }
    let game = Game::new(config.clone())?;
    let rows = load_table(strategy, config)?.to_rows(&game)?;
    Ok(exploitability_with(&game, &rows, workers))
}

/// Reads the rows of a `metrics.csv`, returning `None` when its header
/// belongs to a different configuration.
pub fn read_metrics(path: &Path, header: &str) -> Result<Option<Vec<MetricRow>>> {
    let r = BufReader::new(File::open(path)?);
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(h)) if h == header => {}
        _ => return Ok(None),
    }
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() || line.starts_with("iteration") {
            continue;
        }
        let bad = || Error::Parse(format!("{}: bad metrics line {line:?}", path.display()));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(bad());
        }
        let num = |i: usize| f[i].parse::<f64>().map_err(|_| bad());
        rows.push(MetricRow {
            iteration: f[0].parse().map_err(|_| bad())?,
            report: ExploitabilityReport {
                b1: num(1)?,
                b2: num(2)?,
                epsilon: num(3)?,
                epsilon_mbg: num(4)?,
            },
        });
    }
    Ok(Some(rows))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareOutcome {
    /// `(label, rows)` per spec, in input order.
    pub runs: Vec<(String, Vec<MetricRow>)>,
    pub summary: String,
}

/// Solves each spec (reusing a finished run whose header matches) and merges
/// the ε curves onto one iteration grid in `out/compare.csv`.
pub fn compare(specs: &[ExperimentSpec], out: &Path) -> Result<CompareOutcome> {
    compare_with(specs, out, |_, _| {})
}

pub fn compare_with(
    specs: &[ExperimentSpec],
    out: &Path,
    mut on_eval: impl FnMut(&str, &MetricRow),
) -> Result<CompareOutcome> {
    if specs.is_empty() {
        return Err(Error::Config("nothing to compare".into()));
    }
    let mut runs = Vec::new();
    for spec in specs {
        let label = spec.solver.name().to_string();
        let existing = spec.out.join(METRICS_FILE);
        let cached = if existing.exists() {
            read_metrics(&existing, &spec.header())?.filter(|rows| {
                rows.len() as u64 == spec.iterations / spec.eval_every && spec.out.join(STRATEGY_FILE).exists()
            })
        } else {
            None
        };
        let rows = match cached {
            Some(rows) => rows,
            None => solve_with(spec, |row| on_eval(&label, row))?.metrics,
        };
        runs.push((label, rows));
    }
    let mut grid: Vec<u64> = runs.iter().flat_map(|(_, r)| r.iter().map(|m| m.iteration)).collect();
    grid.sort_unstable();
    grid.dedup();
    let mut hasher = Sha256::new();
    for s in specs {
        hasher.update(s.config_hash().as_bytes());
    }
    let header = format!(
        "# ecfr {VERSION} config_sha256={} seed={}",
        hex::encode(hasher.finalize()),
        specs[0].seed
    );
    let mut w = create(&out.join(COMPARE_FILE))?;
    writeln!(w, "{header}")?;
    let labels: Vec<&str> = runs.iter().map(|(l, _)| l.as_str()).collect();
    writeln!(w, "iteration,{}", labels.iter().map(|l| format!("{l}_mbg")).collect::<Vec<_>>().join(","))?;
    for t in &grid {
        let cells: Vec<String> = runs
            .iter()
            .map(|(_, rows)| {
                rows.iter()
                    .find(|r| r.iteration == *t)
                    .map_or(String::new(), |r| format!("{:.6}", r.report.epsilon_mbg))
            })
            .collect();
        writeln!(w, "{t},{}", cells.join(","))?;
    }
    w.flush()?;
    let summary = summarize(&runs);
    let mut w = create(&out.join(SUMMARY_FILE))?;
    writeln!(w, "{header}")?;
    w.write_all(summary.as_bytes())?;
    w.flush()?;
    Ok(CompareOutcome { runs, summary })
}

fn summarize(runs: &[(String, Vec<MetricRow>)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<12} {:>10} {:>16}", "solver", "iteration", "final mb/g");
    let mut finals = Vec::new();
    for (label, rows) in runs {
        match rows.last() {
            Some(r) => {
                let _ = writeln!(s, "{label:<12} {:>10} {:>16.3}", r.iteration, r.report.epsilon_mbg);
                finals.push((label.as_str(), r.report.epsilon_mbg));
            }
            None => {
                let _ = writeln!(s, "{label:<12} {:>10} {:>16}", "-", "-");
            }
        }
    }
    finals.sort_by(|a, b| a.1.total_cmp(&b.1));
    let order: Vec<&str> = finals.iter().map(|f| f.0).collect();
    let _ = writeln!(s, "ordering (least exploitable first): {}", order.join(" < "));
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundCount {
    /// 1-based.
    pub round: usize,
    /// Distinct private views of one player.
    pub hands: u64,
    /// Suit-isomorphism classes, when computed.
    pub classes: Option<usize>,
}

/// Per-round view counts; class counts need the hand space to be built.
pub fn enumerate(config: &GameConfig, with_classes: bool) -> Result<Vec<RoundCount>> {
    config.validate()?;
    let game = if with_classes { Some(Game::new(config.clone())?) } else { None };
    Ok((0..config.num_rounds())
        .map(|r| RoundCount {
            round: r + 1,
            hands: config.hands_per_player(r),
            classes: game.as_ref().map(|g| g.hands.num_classes(r)),
        })
        .collect())
}

pub fn enumerate_csv(config: &GameConfig, counts: &[RoundCount]) -> String {
    let mut s = String::new();
    let hash = hex::encode(Sha256::digest(config.to_text().as_bytes()));
    let _ = writeln!(s, "# ecfr {VERSION} config_sha256={hash} seed=0");
    let _ = writeln!(s, "round,hands,classes");
    for c in counts {
        let classes = c.classes.map_or(String::new(), |n| n.to_string());
        let _ = writeln!(s, "{},{},{classes}", c.round, c.hands);
    }
    s
}

/// Shared by the binary: the game from `--config` if given, else the preset.
pub fn resolve_game(preset: &str, config: Option<&Path>) -> Result<GameConfig> {
    match config {
        Some(p) => GameConfig::load(p),
        None => GameConfig::preset(preset),
    }
}

/// The data root: `ECFR_DATA_DIR` when set, else `./ecfr-data`.
pub fn data_dir_from_env() -> PathBuf {
    std::env::var_os("ECFR_DATA_DIR").map_or_else(|| PathBuf::from("ecfr-data"), PathBuf::from)
}

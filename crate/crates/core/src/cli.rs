//! The `rulegame` command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::agents::AgentKind;
use crate::counting::{count_initial_configs, rule_space_upper_bound, scientific};
use crate::engine::EpisodeParams;
use crate::harness::{
    detect_interesting_pairs, read_curves_csv, read_difficulty_csv, transfer_index,
    write_curves_csv, write_difficulty_csv, write_pairs_csv, DifficultyMeasure, DifficultyTable,
    ExperimentConfig, HarnessError, TrainingRun, CURVE_HEADER, DIFFICULTY_HEADER,
};
use crate::rule::{canonical_form, parse_rule, rule_size, validate, RuleAst};
use crate::service::{self, ServiceConfig, DEFAULT_PORT};
use crate::transcript::{
    export_curves, replay_recorded, replay_transcript, TranscriptError, TranscriptStore,
};

#[derive(Debug, Parser)]
#[command(
    name = "rulegame",
    version,
    about = "Hidden-rule block removal games: rules, agents, statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and check a rule file; exit 0 iff the rule is valid.
    Validate(ValidateArgs),
    /// Train learners on a rule and write learning curves as CSV.
    Train(TrainArgs),
    /// Find rule pairs whose difficulty order reverses between two learners.
    Pairs(PairsArgs),
    /// Measure how pre-training on one rule speeds learning of another.
    Transfer(TransferArgs),
    /// Count initial boards with exactly K pieces.
    Count(CountArgs),
    /// Upper bound on the number of distinct rules for a board length.
    Rulespace(RulespaceArgs),
    /// Replay stored sessions through the engine and report divergences.
    Replay(ReplayArgs),
    /// Run the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Rule file.
    rule: PathBuf,
    /// Experiment config supplying the board parameters.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AgentArg {
    Random,
    Qlearn,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rule file.
    #[arg(long)]
    rule: PathBuf,
    /// Curve CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Overrides `agent.kind`.
    #[arg(long, value_enum)]
    agent: Option<AgentArg>,
    /// Overrides `agent.seedCount`.
    #[arg(long)]
    seeds: Option<usize>,
    /// Overrides `run.episodes`.
    #[arg(long)]
    episodes: Option<usize>,
    /// Label for the rule column; defaults to the rule file's stem.
    #[arg(long)]
    rule_id: Option<String>,
    /// Also write one machine session transcript per seed here.
    #[arg(long)]
    transcripts: Option<PathBuf>,
    /// Also write per-seed difficulty samples here.
    #[arg(long)]
    difficulty: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeasureArg {
    Criterion,
    Asymptote,
}

impl From<MeasureArg> for DifficultyMeasure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Criterion => DifficultyMeasure::EpisodesToCriterion,
            MeasureArg::Asymptote => DifficultyMeasure::AsymptotePoint,
        }
    }
}

#[derive(Debug, Args)]
struct PairsArgs {
    /// Difficulty or curve CSV files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// First learner.
    #[arg(long)]
    x: String,
    /// Second learner.
    #[arg(long)]
    y: String,
    /// Significance level; defaults to `run.alpha` of the config.
    #[arg(long)]
    alpha: Option<f64>,
    /// Measure applied to curve inputs.
    #[arg(long, value_enum, default_value = "criterion")]
    measure: MeasureArg,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pair report CSV to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TransferArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rule trained on first.
    #[arg(long)]
    from: PathBuf,
    /// Rule evaluated.
    #[arg(long)]
    to: PathBuf,
    /// Pre-training episodes; defaults to the evaluation budget.
    #[arg(long)]
    pretrain: Option<usize>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    seeds: Option<usize>,
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(value_name = "L")]
    length: u64,
    #[arg(value_name = "K")]
    pieces: u64,
    #[arg(value_name = "C")]
    colors: u64,
}

#[derive(Debug, Args)]
struct RulespaceArgs {
    #[arg(value_name = "L")]
    length: u64,
    #[arg(value_name = "C")]
    colors: u64,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// Transcript directory.
    #[arg(long)]
    data_dir: PathBuf,
    /// Sessions to replay; all sessions when omitted.
    #[arg(long = "session")]
    sessions: Vec<String>,
    /// Replay against this rule instead of the recorded one.
    #[arg(long)]
    rule: Option<PathBuf>,
    /// Also write the sessions' learning curves here.
    #[arg(long)]
    curves: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "RULEGAME_PORT", default_value_t = DEFAULT_PORT)]
    port: u16,
    /// Directory of `*.rule` files addressable by rule_id.
    #[arg(long, env = "RULEGAME_RULES_DIR")]
    rules_dir: Option<PathBuf>,
    /// Transcript directory.
    #[arg(long, env = "RULEGAME_DATA_DIR", default_value = "data")]
    data_dir: PathBuf,
    /// Static client files served under /app/.
    #[arg(long, env = "RULEGAME_STATIC_DIR")]
    static_dir: Option<PathBuf>,
    /// Experiment config supplying default board parameters.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_)
            | HarnessError::Schema(_)
            | HarnessError::InvalidArgument(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<TranscriptError> for CliError {
    fn from(e: TranscriptError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`], with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate(a) => cmd_validate(a, out),
        Command::Train(a) => cmd_train(a, out),
        Command::Pairs(a) => cmd_pairs(a, out, err),
        Command::Transfer(a) => cmd_transfer(a, out),
        Command::Count(a) => cmd_count(a, out),
        Command::Rulespace(a) => cmd_rulespace(a, out),
        Command::Replay(a) => cmd_replay(a, out),
        Command::Serve(a) => cmd_serve(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let (CliError::Usage(m) | CliError::Runtime(m)) = &e;
            let _ = writeln!(err, "error: {m}");
            e.code()
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    match path {
        Some(p) => Ok(ExperimentConfig::load(p)?),
        None => Ok(ExperimentConfig::default()),
    }
}

fn read_rule(path: &Path) -> Result<RuleAst, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_rule(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Parses and validates a rule file against `params`.
fn checked_rule(path: &Path, params: &EpisodeParams) -> Result<RuleAst, CliError> {
    let rule = read_rule(path)?;
    let report = validate(&rule, params);
    if !report.ok {
        return Err(CliError::Usage(format!(
            "{}: {}",
            path.display(),
            report.errors.join("; ")
        )));
    }
    Ok(rule)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_err(path, e))
}

fn out_err(e: std::io::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

fn cmd_validate(a: ValidateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = load_config(a.config.as_deref())?;
    let rule = read_rule(&a.rule)?;
    let report = validate(&rule, &config.params());
    let size = rule_size(&rule);
    write!(out, "{report}").map_err(out_err)?;
    writeln!(out, "canonical: {}", canonical_form(&rule)).map_err(out_err)?;
    writeln!(
        out,
        "size: {} terms, {} codebook symbols, {} bytes",
        size.term_count, size.codebook_count, size.canonical_bytes
    )
    .map_err(out_err)?;
    Ok(if report.ok { 0 } else { 2 })
}

fn cmd_train(a: TrainArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut config = load_config(a.config.as_deref())?;
    if let Some(kind) = a.agent {
        config.agent.kind = match kind {
            AgentArg::Random => AgentKind::Random,
            AgentArg::Qlearn => AgentKind::Qlearn,
        }
        .name()
        .to_string();
    }
    if let Some(n) = a.seeds {
        config.agent.seed_count = n;
    }
    if let Some(n) = a.episodes {
        config.run.episodes = n;
    }
    config.check()?;
    let params = config.params();
    let rule = checked_rule(&a.rule, &params)?;
    let rule_id = match a.rule_id {
        Some(id) => id,
        None => a
            .rule
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "rule".into()),
    };
    let mut run = TrainingRun::new(
        rule_id,
        rule,
        config.agent_config()?,
        params,
        config.run.episodes,
    );
    run.max_attempts = config.run.max_attempts;
    let seeds = config.seeds();

    let curves = match &a.transcripts {
        Some(dir) => run.run_recorded(&seeds, &TranscriptStore::open(dir)?)?,
        None => run.run(&seeds)?,
    };
    let mut w = create(&a.out)?;
    write_curves_csv(&mut w, &curves)?;
    w.flush().map_err(|e| io_err(&a.out, e))?;

    let settings = config.measure_settings();
    let table =
        DifficultyTable::from_curves(&curves, DifficultyMeasure::EpisodesToCriterion, &settings);
    if let Some(path) = &a.difficulty {
        let mut w = create(path)?;
        write_difficulty_csv(&mut w, &table)?;
        w.flush().map_err(|e| io_err(path, e))?;
    }
    let rows: usize = curves.iter().map(|c| c.episodes.len()).sum();
    writeln!(
        out,
        "rule {} learner {}: {} seeds, {} rows -> {}",
        run.rule_id,
        run.learner_id(),
        curves.len(),
        rows,
        a.out.display()
    )
    .map_err(out_err)?;
    let reached = curves
        .iter()
        .filter(|c| {
            !crate::harness::difficulty_of(c, DifficultyMeasure::EpisodesToCriterion, &settings).1
        })
        .count();
    writeln!(out, "criterion reached in {reached}/{} seeds", curves.len()).map_err(out_err)?;
    Ok(0)
}

fn read_table(
    path: &Path,
    measure: DifficultyMeasure,
    config: &ExperimentConfig,
) -> Result<DifficultyTable, CliError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    let first = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    let header: Vec<String> = String::from_utf8_lossy(first)
        .trim_end_matches('\r')
        .split(',')
        .map(str::to_string)
        .collect();
    let context = |e: HarnessError| CliError::from(e).with_path(path);
    if header == CURVE_HEADER {
        let curves = read_curves_csv(bytes.as_slice()).map_err(context)?;
        Ok(DifficultyTable::from_curves(
            &curves,
            measure,
            &config.measure_settings(),
        ))
    } else if header == DIFFICULTY_HEADER {
        read_difficulty_csv(bytes.as_slice(), measure).map_err(context)
    } else {
        Err(CliError::Usage(format!(
            "{}: header matches neither `{}` nor `{}`",
            path.display(),
            CURVE_HEADER.join(","),
            DIFFICULTY_HEADER.join(",")
        )))
    }
}

impl CliError {
    fn with_path(self, path: &Path) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            CliError::Runtime(m) => CliError::Runtime(format!("{}: {m}", path.display())),
        }
    }
}

fn cmd_pairs(a: PairsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let config = load_config(a.config.as_deref())?;
    let alpha = a.alpha.unwrap_or(config.run.alpha);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Usage(format!("alpha {alpha} must lie in (0, 1)")));
    }
    if a.x == a.y {
        return Err(CliError::Usage(
            "--x and --y must name different learners".into(),
        ));
    }
    let measure = DifficultyMeasure::from(a.measure);
    let mut table = DifficultyTable::new(measure);
    for path in &a.inputs {
        table.extend(&read_table(path, measure, &config)?);
    }

    let mut shared = DifficultyTable::new(measure);
    for rule in table.rules() {
        match (table.sample(rule, &a.x), table.sample(rule, &a.y)) {
            (Some(xs), Some(ys)) => {
                shared.insert(rule, &a.x, xs.to_vec())?;
                shared.insert(rule, &a.y, ys.to_vec())?;
            }
            _ => {
                let _ = writeln!(
                    err,
                    "warning: rule {rule} lacks samples for one learner; skipped"
                );
            }
        }
    }
    if shared.rules().len() < 2 {
        return Err(CliError::Usage(format!(
            "fewer than two rules have samples for both {} and {}",
            a.x, a.y
        )));
    }
    let pairs = detect_interesting_pairs(&shared, &a.x, &a.y, alpha)?;
    let mut w = create(&a.out)?;
    write_pairs_csv(&mut w, &pairs)?;
    w.flush().map_err(|e| io_err(&a.out, e))?;
    writeln!(
        out,
        "{} rules, {} interesting pairs at alpha={alpha} -> {}",
        shared.rules().len(),
        pairs.len(),
        a.out.display()
    )
    .map_err(out_err)?;
    for p in &pairs {
        writeln!(
            out,
            "  {} vs {}: {} (p_x={:.3e}, p_y={:.3e})",
            p.rule_a, p.rule_b, p.direction, p.p_axis_x, p.p_axis_y
        )
        .map_err(out_err)?;
    }
    Ok(0)
}

fn cmd_transfer(a: TransferArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut config = load_config(a.config.as_deref())?;
    if let Some(n) = a.episodes {
        config.run.episodes = n;
    }
    if let Some(n) = a.seeds {
        config.agent.seed_count = n;
    }
    config.check()?;
    let params = config.params();
    let from = checked_rule(&a.from, &params)?;
    let to = checked_rule(&a.to, &params)?;
    let pretrain = a.pretrain.unwrap_or(config.run.episodes);
    let report = transfer_index(
        &from,
        &to,
        config.agent_config()?,
        &params,
        pretrain,
        config.run.episodes,
        &config.seeds(),
        &config.measure_settings(),
    )?;
    let show = |c: &Option<usize>| c.map_or("-".to_string(), |e| e.to_string());
    writeln!(out, "transfer index: {}", report.index).map_err(out_err)?;
    writeln!(out, "seed naive pretrained difference").map_err(out_err)?;
    for (i, seed) in config.seeds().iter().enumerate() {
        writeln!(
            out,
            "{seed} {} {} {}",
            show(&report.naive[i]),
            show(&report.pretrained[i]),
            report.differences[i]
        )
        .map_err(out_err)?;
    }
    Ok(0)
}

fn cmd_count(a: CountArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.pieces > a.length {
        return Err(CliError::Usage(format!(
            "K={} exceeds L={}",
            a.pieces, a.length
        )));
    }
    if a.colors == 0 || a.length == 0 {
        return Err(CliError::Usage("L and C must be positive".into()));
    }
    let n = count_initial_configs(a.length, a.pieces, a.colors);
    writeln!(out, "{n}").map_err(out_err)?;
    writeln!(out, "≈{}", scientific(&n, 3)).map_err(out_err)?;
    Ok(0)
}

fn cmd_rulespace(a: RulespaceArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.colors == 0 || a.length == 0 {
        return Err(CliError::Usage("L and C must be positive".into()));
    }
    if a.colors.saturating_mul(a.length) > 1 << 20 {
        return Err(CliError::Usage("L*C too large".into()));
    }
    let n = rule_space_upper_bound(a.length, a.colors);
    writeln!(out, "{n}").map_err(out_err)?;
    writeln!(out, "≈{}", scientific(&n, 3)).map_err(out_err)?;
    Ok(0)
}

fn cmd_replay(a: ReplayArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if !a.data_dir.is_dir() {
        return Err(CliError::Usage(format!(
            "{} is not a directory",
            a.data_dir.display()
        )));
    }
    let rule = a.rule.as_deref().map(read_rule).transpose()?;
    let store = TranscriptStore::open(&a.data_dir)?;
    let ids = if a.sessions.is_empty() {
        store.session_ids()?
    } else {
        a.sessions.clone()
    };
    let mut dirty = 0;
    for id in &ids {
        let report = match &rule {
            Some(r) => {
                let t = store.read_session(id)?;
                replay_transcript(&t, r, &t.header.params())?
            }
            None => replay_recorded(&store, id)?,
        };
        writeln!(
            out,
            "{id}: {} episodes, {} attempts, {} divergences{}",
            report.episodes,
            report.attempts,
            report.divergences.len(),
            if report.rule_matches {
                ""
            } else {
                ", rule differs from recorded hash"
            }
        )
        .map_err(out_err)?;
        for d in &report.divergences {
            writeln!(
                out,
                "  episode {} attempt {}: {} ({})",
                d.episode,
                d.attempt,
                d.fields.join(","),
                d.detail
            )
            .map_err(out_err)?;
        }
        if !report.is_clean() {
            dirty += 1;
        }
    }
    if let Some(path) = &a.curves {
        let curves = export_curves(&store, &ids)?;
        let mut w = create(path)?;
        write_curves_csv(&mut w, &curves)?;
        w.flush().map_err(|e| io_err(path, e))?;
    }
    writeln!(
        out,
        "{} sessions replayed, {dirty} with divergences",
        ids.len()
    )
    .map_err(out_err)?;
    Ok(if dirty == 0 { 0 } else { 1 })
}

fn cmd_serve(a: ServeArgs) -> Result<i32, CliError> {
    let config = load_config(a.config.as_deref())?;
    if let Some(dir) = &a.rules_dir {
        if !dir.is_dir() {
            return Err(CliError::Usage(format!(
                "{} is not a directory",
                dir.display()
            )));
        }
    }
    let service_config = ServiceConfig {
        port: a.port,
        rules_dir: a.rules_dir,
        data_dir: a.data_dir,
        static_dir: a.static_dir,
        params: config.params(),
    };
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    runtime
        .block_on(service::serve(service_config))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(0)
}

//! Command-line front end: planner, simulator, optimizer, game solver and
//! transcript verifier.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use relcommit::adversary::{self, AttackResult, StrategyFile};
use relcommit::exact::{self, Rational};
use relcommit::games::{self, GameFile};
use relcommit::gf::{FieldConfig, FieldTables};
use relcommit::harness::{self, Part, RunReport, SimulationConfig};
use relcommit::magnitude::Magnitude;
use relcommit::protocol::Verdict;
use relcommit::spacetime::{self, SpacetimeConfig, SPEED_OF_LIGHT};

#[derive(Parser)]
#[command(name = "relcommit", version, about = "Relativistic bit commitment simulator and security toolkit")]
struct Cli {
    /// Seed for commands that draw randomness (overrides a config's seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the main output (table, transcript or witness) to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Rounds and lifetime for a target binding level.
    Params(ParamsArgs),
    /// Execute a simulation config file.
    Run { config: PathBuf },
    /// Exact optimal classical attack on a small instance.
    AttackOpt(FieldArgs),
    /// Exact binding advantage of a strategy file.
    AttackEval { strategy: PathBuf },
    /// Exact classical value of a game spec file.
    GameValue {
        game: PathBuf,
        #[arg(long, default_value_t = 4)]
        workers: usize,
    },
    /// Re-verify a transcript file.
    VerifyTranscript { transcript: PathBuf },
}

#[derive(clap::Args)]
struct ParamsArgs {
    /// Binding level as a power of two: epsilon = 2^-E.
    #[arg(long = "epsilon-exp", conflicts_with = "epsilon", required_unless_present = "epsilon")]
    epsilon_exp: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Field size as a power of two: q = 2^B.
    #[arg(long = "q-bits", conflicts_with = "q", required_unless_present = "q")]
    q_bits: Option<f64>,
    /// Field size as a decimal integer.
    #[arg(long)]
    q: Option<String>,
    /// Station separation in meters; repeat for several rows.
    #[arg(long, required = true)]
    distance: Vec<f64>,
    #[arg(long, default_value_t = SPEED_OF_LIGHT)]
    speed: f64,
    #[arg(long, default_value_t = 0.0)]
    processing: f64,
    #[arg(long, default_value_t = 0.0)]
    local: f64,
}

#[derive(clap::Args)]
struct FieldArgs {
    #[arg(long)]
    characteristic: u64,
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[arg(long)]
    rounds: usize,
}

struct CliError {
    kind: String,
    part: Option<Part>,
    message: String,
}

impl CliError {
    fn new(kind: &str, message: impl ToString) -> Self {
        Self { kind: kind.into(), part: None, message: message.to_string() }
    }

    fn at(kind: &str, part: Part, message: impl ToString) -> Self {
        Self { kind: kind.into(), part: Some(part), message: message.to_string() }
    }

    fn line(&self) -> String {
        let mut s = format!("error: kind={}", self.kind);
        match self.part {
            Some(Part::Round(j)) => write!(s, " round={j}").unwrap(),
            Some(Part::Header) => s.push_str(" part=header"),
            Some(Part::Footer) => s.push_str(" part=footer"),
            None => {}
        }
        write!(s, " message={:?}", self.message).unwrap();
        s
    }
}

impl From<harness::HarnessError> for CliError {
    fn from(e: harness::HarnessError) -> Self {
        Self { kind: e.kind().into(), part: e.part(), message: e.to_string() }
    }
}

macro_rules! simple_error {
    ($t:ty, $kind:literal) => {
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::new($kind, e)
            }
        }
    };
}
simple_error!(relcommit::games::GameError, "game");
simple_error!(relcommit::adversary::AdversaryError, "adversary");
simple_error!(relcommit::gf::GfError, "field");
simple_error!(relcommit::spacetime::SpacetimeError, "spacetime");
simple_error!(std::io::Error, "io");

/// Output of a command: the report for stdout (or `--out`) plus any
/// invariant violations found.
struct Outcome {
    report: String,
    /// Written to `--out` instead of the report when present.
    artifact: Option<String>,
    failures: Vec<CliError>,
}

impl Outcome {
    fn report(report: String) -> Self {
        Self { report, artifact: None, failures: Vec::new() }
    }
}

/// Key/value report rendered as aligned text or two-column CSV.
struct Table {
    rows: Vec<(String, String)>,
}

impl Table {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn row(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.rows.push((key.into(), value.to_string()));
        self
    }

    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                out.push_str("key,value\n");
                for (k, v) in &self.rows {
                    writeln!(out, "{k},{v}").unwrap();
                }
            }
            Format::Text => {
                let w = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.rows {
                    writeln!(out, "{k:<w$}  {v}").unwrap();
                }
            }
        }
        out
    }
}

fn decimal(r: &Rational) -> String {
    format!("{:.12}", exact::to_f64(r))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn params(args: &ParamsArgs, format: Format) -> Result<Outcome, CliError> {
    let epsilon = match (args.epsilon_exp, args.epsilon) {
        (Some(e), _) => Magnitude::pow2(-e),
        (None, Some(x)) => Magnitude::from_f64(x),
        _ => unreachable!("clap enforces one of the two"),
    };
    let q = match (args.q_bits, &args.q) {
        (Some(b), _) => Magnitude::pow2(b),
        (None, Some(text)) => {
            let n: BigUint = text.parse().map_err(|_| CliError::new("usage", format!("q '{text}' is not an integer")))?;
            Magnitude::from_biguint(&n)
        }
        _ => unreachable!("clap enforces one of the two"),
    };
    let header = ["epsilon", "q_bits", "distance_m", "rounds", "total_time_s", "total_time_years", "min_distance_m"];
    let mut rows = Vec::new();
    for &d in &args.distance {
        let cfg = SpacetimeConfig::new(d, args.speed, args.processing, args.local)?;
        let row = spacetime::plan(epsilon, q, &cfg)?;
        rows.push([
            row.epsilon.to_string(),
            format!("{}", row.q_bits()),
            format!("{}", row.distance_m),
            row.rounds.to_string(),
            row.total_time_s.to_string(),
            years(row.years()),
            format!("{}", spacetime::min_distance(args.processing, &cfg)),
        ]);
    }
    let mut out = String::new();
    match format {
        Format::Csv => {
            writeln!(out, "{}", header.join(",")).unwrap();
            for r in &rows {
                writeln!(out, "{}", r.join(",")).unwrap();
            }
        }
        Format::Text => {
            let widths: Vec<usize> =
                (0..header.len()).map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap()).collect();
            let line = |cells: Vec<&str>| cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ");
            writeln!(out, "{}", line(header.to_vec())).unwrap();
            for r in &rows {
                writeln!(out, "{}", line(r.iter().map(String::as_str).collect())).unwrap();
            }
        }
    }
    Ok(Outcome::report(out))
}

fn attack_rows(t: &mut Table, r: &AttackResult, rounds: usize, q: usize) {
    let bound_sq = exact::ratio((8 * rounds * rounds) as i64, q as i64);
    let bound = exact::to_f64(&bound_sq).sqrt().min(1.0);
    t.row("p0", &r.p0)
        .row("p1", &r.p1)
        .row("epsilon", &r.epsilon)
        .row("epsilon_decimal", decimal(&r.epsilon))
        .row("bound", format!("{bound:.12}"))
        .row("within_bound", r.within_binding_bound(rounds, q));
}

fn attack_opt(args: &FieldArgs, format: Format) -> Result<Outcome, CliError> {
    let field = FieldConfig { characteristic: args.characteristic, degree: args.degree, modulus: None }.build()?;
    let tables = Arc::new(FieldTables::new(&field)?);
    let (result, witness) = adversary::optimal_attack_exact(&tables, args.rounds)?;
    let mut t = Table::new();
    t.row("field", &field).row("rounds", args.rounds);
    attack_rows(&mut t, &result, args.rounds, tables.order());
    let mut failures = Vec::new();
    if !result.within_binding_bound(args.rounds, tables.order()) {
        failures.push(CliError::new("binding_bound", "optimum exceeds the binding bound"));
    }
    Ok(Outcome { report: t.render(format), artifact: Some(StrategyFile::from_strategy(&witness).to_json()), failures })
}

fn attack_eval(path: &Path, format: Format) -> Result<Outcome, CliError> {
    let strategy = StrategyFile::from_json(&read(path)?)?.to_strategy()?;
    let result = adversary::attack_value(&strategy)?;
    let q = strategy.field_tables().order();
    let mut t = Table::new();
    t.row("field", strategy.field_tables().spec()).row("rounds", strategy.rounds());
    attack_rows(&mut t, &result, strategy.rounds(), q);
    Ok(Outcome::report(t.render(format)))
}

fn game_value(path: &Path, workers: usize, format: Format) -> Result<Outcome, CliError> {
    let spec = GameFile::parse(&read(path)?)?.build()?;
    let sol = games::classical_value_exact(&spec, workers)?;
    let tables = spec.tables();
    let hex = |v: &[usize]| v.iter().map(|&i| tables.element(i).to_hex()).collect::<Vec<_>>().join(" ");
    let mut t = Table::new();
    t.row("field", tables.spec())
        .row("value", &sol.value)
        .row("value_decimal", decimal(&sol.value))
        .row("f", hex(&sol.strategy.f))
        .row("g", hex(&sol.strategy.g));
    let mut failures = Vec::new();
    if spec.bob_is_uniform() {
        let p = spec.alice().max_prob();
        let bound = games::lemma1_bound(&p, &BigUint::from(spec.order())).to_f64();
        t.row("max_alice_prob", &p)
            .row("bound", format!("{bound:.12}"))
            .row("slack", format!("{:.12}", bound - exact::to_f64(&sol.value)));
        if !games::lemma1_holds(&sol.value, &p, spec.order() as u64) {
            failures.push(CliError::new("value_bound", "value exceeds p + sqrt(2/q)"));
        }
    } else {
        t.row("bound", "n/a (Bob's inputs are not uniform)");
    }
    Ok(Outcome::report(t.render(format)))
        .map(|mut o| {
            o.failures = failures;
            o
        })
}

fn timing_failures(violations: &[spacetime::Violation]) -> Vec<CliError> {
    violations
        .iter()
        .map(|v| {
            CliError::at(
                "timing",
                Part::Round(v.round),
                format!("response at {} s, light-cone deadline {} s", v.response_time, v.deadline),
            )
        })
        .collect()
}

fn reveal_failure(check: Verdict, rounds: usize) -> Option<CliError> {
    (!check.is_accept()).then(|| CliError::at("reveal_mismatch", Part::Round(rounds), "revealed a_k does not match the chain"))
}

fn run_config(path: &Path, seed: Option<u64>, format: Format) -> Result<Outcome, CliError> {
    let mut cfg = SimulationConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let mut t = Table::new();
    t.row("mode", cfg.mode.name()).row("seed", cfg.seed).row("field", cfg.params.field()).row("rounds", cfg.params.rounds());
    match harness::run(&cfg)? {
        RunReport::Simulation(out) => {
            t.row("revealed_bit", out.transcript.revealed_bit.map_or(-1, i32::from))
                .row("reveal_check", out.reveal_check.as_str())
                .row("timing", if out.timing_ok() { "ok".to_string() } else { format!("{} violation(s)", out.violations.len()) })
                .row("verdict", out.verdict.as_str())
                .row("reveal_time_s", out.reveal_time)
                .row("verified_at_s", out.verified_at)
                .row("frames", out.deliveries.len());
            let mut failures = Vec::new();
            // a failed cheat is the expected outcome of an attack, not a fault
            if !matches!(cfg.mode, harness::RunMode::Attack(_)) {
                failures.extend(timing_failures(&out.violations));
                failures.extend(reveal_failure(out.reveal_check, cfg.params.rounds()));
            }
            Ok(Outcome { report: t.render(format), artifact: Some(out.to_jsonl()?), failures })
        }
        RunReport::Trials(stats) => {
            t.row("trials", stats.trials)
                .row("successes", stats.successes)
                .row("rate", format!("{:.6}", stats.rate()))
                .row("expected", &stats.expected)
                .row("expected_decimal", decimal(&stats.expected))
                .row("sigma", format!("{:.6}", stats.sigma()))
                .row("z", format!("{:.3}", stats.z_score()));
            Ok(Outcome::report(t.render(format)))
        }
        RunReport::Hiding(r) => {
            t.row("challenge_vectors", r.challenge_vectors)
                .row("identical", r.identical)
                .row("uniform", r.uniform)
                .row("perfectly_hiding", r.perfectly_hiding());
            let mut failures = Vec::new();
            if let Some((b, j)) = &r.first_failure {
                failures.push(CliError::at("hiding", Part::Round(*j), format!("challenge vector {b:?}")));
            }
            Ok(Outcome { report: t.render(format), artifact: None, failures })
        }
    }
}

fn verify(path: &Path, format: Format) -> Result<Outcome, CliError> {
    let report = harness::verify_text(&read(path)?)?;
    let mut t = Table::new();
    t.row("mode", &report.mode)
        .row("field", report.transcript.params().field())
        .row("rounds", report.transcript.params().rounds())
        .row("reveal_check", report.reveal_check.as_str())
        .row("timing", if report.violations.is_empty() { "ok".to_string() } else { format!("{} violation(s)", report.violations.len()) })
        .row("verdict", report.verdict.as_str());
    let mut failures = timing_failures(&report.violations);
    failures.extend(reveal_failure(report.reveal_check, report.transcript.params().rounds()));
    Ok(Outcome { report: t.render(format), artifact: None, failures })
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Params(args) => params(args, cli.format),
        Command::Run { config } => run_config(config, cli.seed, cli.format),
        Command::AttackOpt(args) => attack_opt(args, cli.format),
        Command::AttackEval { strategy } => attack_eval(strategy, cli.format),
        Command::GameValue { game, workers } => game_value(game, *workers, cli.format),
        Command::VerifyTranscript { transcript } => verify(transcript, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}", e.line());
            return ExitCode::FAILURE;
        }
    };
    match (&cli.out, &outcome.artifact) {
        (Some(path), Some(artifact)) => {
            if let Err(e) = std::fs::write(path, artifact) {
                eprintln!("{}", CliError::new("io", format!("{}: {e}", path.display())).line());
                return ExitCode::FAILURE;
            }
            print!("{}", outcome.report);
        }
        (Some(path), None) => {
            if let Err(e) = std::fs::write(path, &outcome.report) {
                eprintln!("{}", CliError::new("io", format!("{}: {e}", path.display())).line());
                return ExitCode::FAILURE;
            }
        }
        (None, _) => print!("{}", outcome.report),
    }
    for f in &outcome.failures {
        eprintln!("{}", f.line());
    }
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn years(y: f64) -> String {
    if y >= 1.0 {
        format!("{y:.3}")
    } else {
        format!("{y:.3e}")
    }
}

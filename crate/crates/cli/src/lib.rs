//! Subcommands of the `scene-director` binary.
//!
//! | exit | meaning |
//! |-----:|---------|
//! | 0 | success |
//! | 2 | usage error (bad flags or values) |
//! | 3 | I/O error reading or writing a file |
//! | 4 | scene file malformed or invalid |
//! | 5 | provider request failed |
//! | 6 | reply or plan does not parse |
//! | 7 | plan parses but is not structurally valid |
//! | 8 | simulation failed |
//! | 9 | provider configuration error |

use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use scene_director::benchmark::{
    build_scenario, markdown_report, records_csv, reference_markdown, run_benchmark_with,
    summarize, ScenarioClass, ScenarioLabel,
};
use scene_director::director::{check_reply, emit_plan, ActionPlan, Strictness};
use scene_director::gateway::{
    ConfigError, Gateway, GatewayError, GenerationResult, ProviderConfig, ProviderSet, RetryPolicy,
};
use scene_director::scene::{
    estimate_scenarios, load_scene, read_scene, validate_scene, ScenarioParams, Scene, SceneError,
};
use scene_director::serialize_scene;
use scene_director::sim::{
    check_feasibility, render_timeline, simulate, ConflictPolicy, SimError, TimelineFormat,
};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_SCENE: u8 = 4;
pub const EXIT_PROVIDER: u8 = 5;
pub const EXIT_PARSE: u8 = 6;
pub const EXIT_INVALID: u8 = 7;
pub const EXIT_SIMULATION: u8 = 8;
pub const EXIT_CONFIG: u8 = 9;

#[derive(Debug, Parser)]
#[command(
    name = "scene-director",
    version,
    about = "Describe a scene, ask a language model for a SceneDirector plan, validate it, and simulate it."
)]
pub struct Cli {
    /// Provider configuration file (TOML, one table per provider).
    #[arg(
        long,
        global = true,
        env = "SCENE_DIRECTOR_CONFIG",
        value_name = "PATH"
    )]
    pub config: Option<PathBuf>,

    /// Append raw request and response bodies to this JSONL file.
    #[arg(long, global = true, value_name = "PATH")]
    pub debug_log: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a scene file against the scene rules.
    Validate(ValidateArgs),
    /// Print the plain-language scene description sent to the model.
    Serialize(SerializeArgs),
    /// Ask a provider for a plan and print the raw reply.
    Generate(GenerateArgs),
    /// Parse and validate a plan file against a scene.
    Parse(ParseArgs),
    /// Execute a plan and print its trace or timeline.
    Simulate(SimulateArgs),
    /// Full pipeline: writes scene_description.txt, reply.txt, validity.json,
    /// trace.jsonl, and timeline.txt or timeline.svg to a directory.
    Run(RunArgs),
    /// Latency and validity sweep over scenario classes.
    Bench(BenchArgs),
    /// Count potential interaction scenarios, (m * v * d)^n.
    Estimate(EstimateArgs),
}

/// Where the scene comes from: a file or a built-in scenario class.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["scene", "scenario"])))]
pub struct SceneSource {
    /// Scene JSON file.
    #[arg(long, value_name = "PATH")]
    pub scene: Option<PathBuf>,

    /// Built-in scenario class instead of a file (1O-1A, 5O-1A, 5O-2A, 5O-5A, 10O-5A).
    #[arg(long, value_name = "CLASS")]
    pub scenario: Option<ScenarioLabel>,

    /// Layout seed for --scenario.
    #[arg(long, default_value_t = 0, requires = "scenario")]
    pub layout_seed: u64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub source: SceneSource,
}

#[derive(Debug, Args)]
pub struct SerializeArgs {
    #[command(flatten)]
    pub source: SceneSource,

    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub source: SceneSource,

    /// Provider name from the configuration (chatgpt, claude, gemini, grok, mock, or a custom table).
    #[arg(long, value_name = "NAME")]
    pub provider: String,

    /// Write the reply to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Retry timeouts, connection failures, 429 and 5xx up to this many attempts.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub retries: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// File holding a SceneDirector string (a raw model reply is fine).
    #[arg(long, value_name = "PATH")]
    pub plan: PathBuf,

    #[command(flatten)]
    pub source: SceneSource,

    /// Treat speed and duration range violations as errors.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Wait,
    Fail,
}

impl From<PolicyArg> for ConflictPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Wait => ConflictPolicy::Wait,
            PolicyArg::Fail => ConflictPolicy::Fail,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TimelineArg {
    Text,
    Svg,
}

impl From<TimelineArg> for TimelineFormat {
    fn from(t: TimelineArg) -> Self {
        match t {
            TimelineArg::Text => TimelineFormat::Text,
            TimelineArg::Svg => TimelineFormat::Svg,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SceneSource,

    /// File holding the SceneDirector plan.
    #[arg(long, value_name = "PATH")]
    pub plan: PathBuf,

    /// What to do when an agent reaches an object another agent holds.
    #[arg(long, value_enum, default_value = "wait")]
    pub policy: PolicyArg,

    /// Print a timeline in this format instead of the JSONL trace.
    #[arg(long, value_enum, value_name = "FORMAT")]
    pub timeline: Option<TimelineArg>,

    /// Also write the JSONL trace to this file.
    #[arg(long, value_name = "PATH")]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: SceneSource,

    #[arg(long, value_name = "NAME")]
    pub provider: String,

    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    #[arg(long, value_enum, default_value = "wait")]
    pub policy: PolicyArg,

    /// Treat speed and duration range violations as errors.
    #[arg(long)]
    pub strict: bool,

    #[arg(long, value_enum, default_value = "text", value_name = "FORMAT")]
    pub timeline: TimelineArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Provider name; repeat for several. Runs in the order given.
    #[arg(long = "provider", value_name = "NAME", required = true)]
    pub providers: Vec<String>,

    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    /// `all` or a comma-separated list such as `1O-1A,5O-2A`.
    #[arg(long, default_value = "all", value_name = "LIST")]
    pub classes: String,

    #[arg(long, default_value_t = 0)]
    pub layout_seed: u64,

    /// Directory for records.csv, stats.json, report.md, and reference.md.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Interactable objects.
    #[arg(long)]
    pub m: u64,
    /// Spatial or contextual variants per object.
    #[arg(long)]
    pub v: u64,
    /// Distinct duration or timing variants.
    #[arg(long)]
    pub d: u64,
    /// Agents.
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Scene(String),
    #[error(transparent)]
    Provider(GatewayError),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Config(ConfigError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Scene(_) => EXIT_SCENE,
            CliError::Provider(_) => EXIT_PROVIDER,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Simulation(_) => EXIT_SIMULATION,
            CliError::Config(_) => EXIT_CONFIG,
        }
    }
}

impl From<GatewayError> for CliError {
    fn from(e: GatewayError) -> Self {
        match e {
            GatewayError::Config(c) => CliError::Config(c),
            GatewayError::Scene(msg) => CliError::Scene(msg),
            other => CliError::Provider(other),
        }
    }
}

impl From<SceneError> for CliError {
    fn from(e: SceneError) -> Self {
        match e {
            SceneError::Io { path, source } => CliError::Io {
                path: path.into(),
                source,
            },
            other => CliError::Scene(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

impl SceneSource {
    fn load(&self) -> Result<Scene, CliError> {
        match (&self.scene, self.scenario) {
            (Some(path), _) => Ok(load_scene(path)?),
            (None, Some(label)) => Ok(build_scenario(ScenarioClass::new(label, self.layout_seed))),
            (None, None) => Err(CliError::Usage(
                "one of --scene or --scenario is required".into(),
            )),
        }
    }
}

struct Context {
    providers: ProviderSet,
    gateway: Gateway,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, CliError> {
        let providers = match &cli.config {
            Some(path) => ProviderSet::load(path).map_err(CliError::Config)?,
            None => ProviderSet::default(),
        };
        let mut gateway = Gateway::new()?;
        if let Some(path) = &cli.debug_log {
            gateway = gateway
                .with_debug_log(path)
                .map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
        }
        Ok(Self { providers, gateway })
    }

    fn provider(&self, name: &str) -> Result<&ProviderConfig, CliError> {
        self.providers.get(name).map_err(CliError::Config)
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Serialize(args) => cmd_serialize(args),
        Command::Generate(args) => cmd_generate(&Context::new(&cli)?, args),
        Command::Parse(args) => cmd_parse(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Run(args) => cmd_run(&Context::new(&cli)?, args),
        Command::Bench(args) => cmd_bench(&Context::new(&cli)?, args),
        Command::Estimate(args) => cmd_estimate(args),
    }
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let scene = match &args.source.scene {
        Some(path) => read_scene(&read(path)?)?,
        None => args.source.load()?,
    };
    let violations = validate_scene(&scene);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("{v}");
        }
        return Err(CliError::Scene(format!(
            "{} rule violation(s)",
            violations.len()
        )));
    }
    println!(
        "ok: {} agent(s), {} object(s)",
        scene.agents.len(),
        scene.objects.len()
    );
    Ok(())
}

fn describe(scene: &Scene) -> Result<String, CliError> {
    serialize_scene(scene)
        .map(|d| d.as_str().to_owned())
        .map_err(|e| CliError::Scene(e.to_string()))
}

fn cmd_serialize(args: &SerializeArgs) -> Result<(), CliError> {
    let scene = args.source.load()?;
    emit(args.out.as_deref(), &describe(&scene)?)
}

fn cmd_generate(ctx: &Context, args: &GenerateArgs) -> Result<(), CliError> {
    let scene = args.source.load()?;
    let config = ctx.provider(&args.provider)?;
    let result = match args.retries {
        Some(attempts) => ctx.gateway.generate_with_retry(
            config,
            &scene,
            RetryPolicy {
                attempts,
                ..RetryPolicy::default()
            },
        )?,
        None => ctx.gateway.generate(config, &scene)?,
    };
    eprintln!(
        "{} ({}) answered in {:.3} s",
        result.provider, result.model_name, result.latency
    );
    let mut text = result.raw_text;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    emit(args.out.as_deref(), &text)
}

fn strictness(strict: bool) -> Strictness {
    if strict {
        Strictness::Strict
    } else {
        Strictness::Lenient
    }
}

/// Parses and validates a reply, mapping failures to exit codes.
fn checked_plan(
    reply: &str,
    scene: &Scene,
    mode: Strictness,
) -> (Result<ActionPlan, CliError>, serde_json::Value) {
    let (plan, report) = check_reply(reply, scene, mode);
    let summary = json!({
        "strictness": mode,
        "report": report,
        "canonical_plan": plan.as_ref().map(emit_plan),
        "predicted_conflicts": plan.as_ref().map(|p| check_feasibility(scene, p)),
    });
    let outcome = match plan {
        None => Err(CliError::Parse(
            report
                .violations
                .first()
                .map(|v| format!("{}: {}", v.location, v.message))
                .unwrap_or_else(|| "reply does not parse".into()),
        )),
        Some(_) if !report.is_structurally_valid => {
            let first = report.errors().next().expect("invalid report has an error");
            Err(CliError::Invalid(format!(
                "{} error(s); first: {} {}",
                report.errors().count(),
                first.location,
                first.message
            )))
        }
        Some(plan) => Ok(plan),
    };
    (outcome, summary)
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value");
    s.push('\n');
    s
}

fn cmd_parse(args: &ParseArgs) -> Result<(), CliError> {
    let scene = args.source.load()?;
    let reply = read(&args.plan)?;
    let (outcome, summary) = checked_plan(&reply, &scene, strictness(args.strict));
    print!("{}", pretty(&summary));
    outcome.map(|_| ())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let scene = args.source.load()?;
    let reply = read(&args.plan)?;
    let (outcome, _) = checked_plan(&reply, &scene, Strictness::Lenient);
    let plan = outcome?;
    let trace = simulate(&scene, &plan, args.policy.into())?;
    if let Some(path) = &args.trace_out {
        write(path, &trace.to_jsonl())?;
    }
    match args.timeline {
        Some(format) => print!("{}", render_timeline(&trace, format.into())),
        None => print!("{}", trace.to_jsonl()),
    }
    for c in &trace.conflicts {
        eprintln!("waited: {c}");
    }
    Ok(())
}

pub const SCENE_DESCRIPTION_FILE: &str = "scene_description.txt";
pub const REPLY_FILE: &str = "reply.txt";
pub const VALIDITY_FILE: &str = "validity.json";
pub const TRACE_FILE: &str = "trace.jsonl";

fn generation_json(g: &GenerationResult) -> serde_json::Value {
    json!({
        "provider": g.provider,
        "model_name": g.model_name,
        "latency_s": g.latency,
        "timestamp": g.timestamp,
    })
}

fn cmd_run(ctx: &Context, args: &RunArgs) -> Result<(), CliError> {
    let scene = args.source.load()?;
    let config = ctx.provider(&args.provider)?;
    fs::create_dir_all(&args.out).map_err(|source| CliError::Io {
        path: args.out.clone(),
        source,
    })?;
    let out = |name: &str| args.out.join(name);

    write(&out(SCENE_DESCRIPTION_FILE), &describe(&scene)?)?;
    let generation = ctx.gateway.generate(config, &scene)?;
    write(&out(REPLY_FILE), &generation.raw_text)?;

    let (outcome, mut summary) =
        checked_plan(&generation.raw_text, &scene, strictness(args.strict));
    summary["generation"] = generation_json(&generation);
    write(&out(VALIDITY_FILE), &pretty(&summary))?;
    let plan = outcome?;

    let trace = simulate(&scene, &plan, args.policy.into())?;
    write(&out(TRACE_FILE), &trace.to_jsonl())?;
    let format = TimelineFormat::from(args.timeline);
    write(
        &out(&format!("timeline.{}", format.extension())),
        &render_timeline(&trace, format),
    )?;
    println!(
        "ok: {} agent(s), {} event(s), finished at {:.3} s, {} wait(s); artifacts in {}",
        trace.final_states.len(),
        trace.events.len(),
        trace.end_time(),
        trace.conflicts.len(),
        args.out.display()
    );
    Ok(())
}

fn parse_classes(list: &str, layout_seed: u64) -> Result<Vec<ScenarioClass>, CliError> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(ScenarioClass::all(layout_seed));
    }
    let mut classes = Vec::new();
    for token in list.split(',').filter(|t| !t.trim().is_empty()) {
        let label: ScenarioLabel =
            token
                .parse()
                .map_err(|e: scene_director::benchmark::UnknownScenario| {
                    CliError::Usage(e.to_string())
                })?;
        classes.push(ScenarioClass::new(label, layout_seed));
    }
    if classes.is_empty() {
        return Err(CliError::Usage("--classes is empty".into()));
    }
    Ok(classes)
}

fn cmd_bench(ctx: &Context, args: &BenchArgs) -> Result<(), CliError> {
    let classes = parse_classes(&args.classes, args.layout_seed)?;
    let providers = args
        .providers
        .iter()
        .map(|name| ctx.provider(name).cloned())
        .collect::<Result<Vec<_>, _>>()?;
    let records = run_benchmark_with(
        &ctx.gateway,
        &providers,
        &classes,
        args.trials as usize,
        |r| {
            eprintln!(
                "{} {} trial {}: {:.3} s{}",
                r.provider,
                r.scenario,
                r.trial,
                r.latency,
                if r.retained { "" } else { " (not retained)" }
            )
        },
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let stats = summarize(&records);
    let report = markdown_report(&stats);

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        write(&dir.join("records.csv"), &records_csv(&records))?;
        write(
            &dir.join("stats.json"),
            &pretty(&serde_json::to_value(&stats).expect("stats serialize")),
        )?;
        write(&dir.join("report.md"), &report)?;
        write(&dir.join("reference.md"), &reference_markdown())?;
    }
    print!("{report}");
    Ok(())
}

fn cmd_estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let params = ScenarioParams::new(args.m, args.v, args.d, args.n)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    println!("{}", estimate_scenarios(params));
    Ok(())
}

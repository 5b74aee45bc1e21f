//! The `bddl` command-line front end.
//!
//! Every command is deterministic given its arguments and input files.
//! Exit codes: 0 success, 1 usage, 2 parse, 3 validation or feasibility,
//! 4 runtime (replay or scoring) failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::corpus;
use crate::episode::{parse_script, record_episode, EpisodeError};
use crate::logic::{activity_volume, flatten, GoalOptions, Universe, DEFAULT_CAP};
use crate::sampler::{check_goal_feasibility, instantiate};
use crate::scoring::{
    normalize_to_human, score_stream, FactMode, LogReader, MetricsReport, NormalizeConfig,
    Reference, ScoringContext,
};
use crate::syntax::{
    parse_domain, parse_problem, ActivityDefinition, DomainDefinition, Position, SyntaxError, Term,
};
use crate::taxonomy::Taxonomy;
use crate::world::{SceneManifest, WorldConfig};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "BDDL_CONFIG";
pub const CLI_CONFIG_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Human,
    /// Flat `key=value` lines.
    Machine,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "bddl", version, about = "Validate, flatten, instantiate and score BDDL activities")]
struct Cli {
    /// Config file (TOML); defaults to $BDDL_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Taxonomy file; the bundled taxonomy if omitted.
    #[arg(long, global = true)]
    taxonomy: Option<PathBuf>,
    /// Domain file; the bundled domain if omitted.
    #[arg(long, global = true)]
    domain: Option<PathBuf>,
    /// World thresholds file overriding the scene's `[config]`.
    #[arg(long, global = true)]
    world: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, check applicability and goal feasibility.
    Validate { problem: PathBuf },
    /// Print the flattened goal options and the activity volume.
    Flatten {
        problem: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Instantiate the activity in a scene and print the resulting state as JSON.
    Sample {
        problem: PathBuf,
        /// Scene manifest; the bundled kitchen if omitted.
        #[arg(long)]
        scene: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Compute metrics for a trajectory log.
    Score {
        log: PathBuf,
        problem: PathBuf,
        /// Directory of human logs (`*.jsonl`) or reports (`*.json`).
        #[arg(long)]
        baselines: Option<PathBuf>,
        /// Ignore cached facts and recompute them from each snapshot.
        #[arg(long)]
        recompute: bool,
        #[arg(long, value_enum, default_value = "best")]
        reference: RefArg,
        #[arg(long, default_value_t = NormalizeConfig::default().max_ratio)]
        max_ratio: f64,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Replay a primitive script in a sampled scene and write the log.
    Demo {
        problem: PathBuf,
        #[arg(long)]
        scene: Option<PathBuf>,
        /// One primitive per line; the bundled packing-lunches script if omitted.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RefArg {
    Best,
    Mean,
}

/// Defaults read from a config file. Relative paths resolve against its directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub config_version: u32,
    pub taxonomy: Option<PathBuf>,
    pub domain: Option<PathBuf>,
    pub scene: Option<PathBuf>,
    pub world: Option<PathBuf>,
    pub seed: Option<u64>,
    pub cap: Option<usize>,
    pub format: Option<Format>,
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = read(path)?;
        let mut cfg: CliConfig = toml::from_str(&text)
            .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
        if cfg.config_version != CLI_CONFIG_VERSION {
            return Err(Failure::new(
                EXIT_PARSE,
                format!(
                    "{}: unsupported config_version {} (expected {CLI_CONFIG_VERSION})",
                    path.display(),
                    cfg.config_version
                ),
            ));
        }
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.taxonomy, &mut cfg.domain, &mut cfg.scene, &mut cfg.world]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        for p in [&cfg.taxonomy, &cfg.domain, &cfg.scene, &cfg.world].into_iter().flatten() {
            if !p.exists() {
                return Err(Failure::new(
                    EXIT_USAGE,
                    format!("{}: referenced file {} does not exist", path.display(), p.display()),
                ));
            }
        }
        Ok(cfg)
    }
}

/// A command failure: exit code plus diagnostic for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    /// Printed to standard output before the diagnostic (e.g. a feasibility report).
    pub output: Option<String>,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into(), output: None }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn write_out(path: &Option<PathBuf>, text: &str, stdout: &mut String) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::new(EXIT_RUNTIME, format!("{}: {e}", p.display()))),
        None => {
            stdout.push_str(text);
            Ok(())
        }
    }
}

fn syntax_failure(path: &Path, e: &SyntaxError) -> Failure {
    Failure::new(EXIT_PARSE, format!("{}:{}: {}", path.display(), e.pos, e.kind))
}

/// Position of the first occurrence of `needle` in `text`, or 1:1.
fn locate(text: &str, needle: &str) -> Position {
    let Some(at) = text.find(needle) else {
        return Position { line: 1, col: 1 };
    };
    let before = &text[..at];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Position { line, col }
}

/// Loaded inputs shared by the commands.
struct Context {
    taxonomy: Taxonomy,
    domain: DomainDefinition,
    scene: Option<PathBuf>,
    world: Option<WorldConfig>,
    seed: u64,
    cap: usize,
    format: Format,
}

impl Context {
    fn load(cli: &Cli, env_config: Option<PathBuf>) -> Result<Self, Failure> {
        let cfg = match cli.config.clone().or(env_config) {
            Some(p) => CliConfig::load(&p)?,
            None => CliConfig { config_version: CLI_CONFIG_VERSION, ..Default::default() },
        };
        let taxonomy = match cli.taxonomy.as_ref().or(cfg.taxonomy.as_ref()) {
            Some(p) => Taxonomy::from_toml(&read(p)?)
                .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", p.display())))?,
            None => corpus::taxonomy(),
        };
        let domain = match cli.domain.as_ref().or(cfg.domain.as_ref()) {
            Some(p) => parse_domain(&read(p)?).map_err(|e| syntax_failure(p, &e))?,
            None => corpus::domain(),
        };
        let world = match cli.world.as_ref().or(cfg.world.as_ref()) {
            Some(p) => Some(
                WorldConfig::from_toml(&read(p)?)
                    .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", p.display())))?,
            ),
            None => None,
        };
        Ok(Context {
            taxonomy,
            domain,
            scene: cfg.scene,
            world,
            seed: cfg.seed.unwrap_or(0),
            cap: cfg.cap.unwrap_or(DEFAULT_CAP),
            format: cli.format.or(cfg.format).unwrap_or(Format::Human),
        })
    }

    fn problem(&self, path: &Path) -> Result<(String, ActivityDefinition), Failure> {
        let text = read(path)?;
        let def = parse_problem(&text, &self.domain).map_err(|e| syntax_failure(path, &e))?;
        Ok((text, def))
    }

    fn manifest(&self, flag: &Option<PathBuf>) -> Result<SceneManifest, Failure> {
        let mut m = match flag.as_ref().or(self.scene.as_ref()) {
            Some(p) => SceneManifest::from_toml(&read(p)?)
                .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", p.display())))?,
            None => corpus::kitchen_scene(),
        };
        if let Some(w) = &self.world {
            m.config = w.clone();
        }
        Ok(m)
    }

    fn universe(&self, path: &Path, text: &str, def: &ActivityDefinition) -> Result<Universe, Failure> {
        for (c, cat) in &def.objects {
            if !self.taxonomy.contains(cat) {
                let pos = locate(text, &c.to_string());
                return Err(Failure::new(
                    EXIT_INVALID,
                    format!("{}:{pos}: unknown category `{cat}`", path.display()),
                ));
            }
        }
        Universe::new(&def.objects, &self.taxonomy)
            .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
    }

    fn options(&self, path: &Path, text: &str, def: &ActivityDefinition, cap: usize) -> Result<GoalOptions, Failure> {
        let universe = self.universe(path, text, def)?;
        match &def.goal {
            Some(g) => flatten(g, &universe, cap)
                .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display()))),
            None => Ok(GoalOptions::trivial()),
        }
    }
}

fn validate(ctx: &Context, path: &Path) -> Result<String, Failure> {
    let (text, def) = ctx.problem(path)?;
    let universe = ctx.universe(path, &text, &def)?;
    let category = |t: &Term| {
        t.as_constant()
            .and_then(|c| def.objects.iter().find(|(k, _)| k == c))
            .map(|(_, cat)| cat)
    };
    for lit in &def.init {
        let f = &lit.formula;
        let sig = ctx.domain.predicate(f.predicate.as_str()).expect("parser checked predicates");
        let cats: Vec<_> = f.args.iter().map(category).collect();
        let ok = ctx
            .taxonomy
            .applicable_to_args(sig, &cats)
            .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
        if !ok {
            let pos = locate(&text, &f.to_string());
            return Err(Failure::new(
                EXIT_INVALID,
                format!("{}:{pos}: `{}` is not applicable to its arguments", path.display(), f),
            ));
        }
    }
    let report = check_goal_feasibility(&def, &universe, &ctx.taxonomy, &ctx.domain, ctx.cap)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    let mut out = String::new();
    match ctx.format {
        Format::Json => out = serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Machine => {
            let _ = writeln!(out, "feasible={}", report.feasible);
            let _ = writeln!(out, "objects={}", def.objects.len());
            let _ = writeln!(out, "options={}", report.options);
            let _ = writeln!(out, "consistent={}", report.consistent);
            let _ = writeln!(out, "truncated={}", report.truncated);
            for r in &report.rejected {
                let v = serde_json::to_string(&r.violation).expect("violation serializes");
                let _ = writeln!(out, "rejected.{}={v}", r.index);
            }
        }
        Format::Human => {
            let _ = writeln!(
                out,
                "{}: {} objects, {} goal option(s), {} consistent{}",
                path.display(),
                def.objects.len(),
                report.options,
                report.consistent,
                if report.truncated { " (truncated)" } else { "" }
            );
            for r in &report.rejected {
                let _ = writeln!(out, "  option {} rejected: {:?}", r.index + 1, r.violation);
            }
        }
    }
    if report.feasible {
        Ok(out)
    } else {
        let pos = locate(&text, "(:goal");
        Err(Failure {
            code: EXIT_INVALID,
            message: format!("{}:{pos}: goal has no consistent option", path.display()),
            output: Some(out),
        })
    }
}

fn render_flatten(opts: &GoalOptions, format: Format) -> String {
    let volume = activity_volume(opts).ok();
    let mut out = String::new();
    match format {
        Format::Json => {
            let v = serde_json::json!({ "options": opts.options, "truncated": opts.truncated, "volume": volume });
            out = serde_json::to_string_pretty(&v).expect("json") + "\n";
        }
        Format::Machine => {
            let _ = writeln!(out, "options={}", opts.options.len());
            for (i, o) in opts.options.iter().enumerate() {
                let lits: Vec<String> = o.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "option.{i}={}", lits.join(" "));
            }
            let _ = writeln!(out, "volume={}", volume.map_or("none".into(), |v| v.to_string()));
            let _ = writeln!(out, "truncated={}", opts.truncated);
        }
        Format::Human => {
            for (i, o) in opts.options.iter().enumerate() {
                let _ = writeln!(out, "option {}:", i + 1);
                for l in o {
                    let _ = writeln!(out, "  {l}");
                }
            }
            let _ = writeln!(out, "options: {}", opts.options.len());
            match volume {
                Some(v) => {
                    let _ = writeln!(out, "volume: {v}");
                }
                None => out.push_str("volume: none\n"),
            }
            if opts.truncated {
                out.push_str("truncated\n");
            }
        }
    }
    out
}

fn render_report(r: &MetricsReport, format: Format) -> String {
    match format {
        Format::Json => r.to_json() + "\n",
        Format::Machine => r.to_table(),
        Format::Human => {
            let mut out = String::new();
            let _ = writeln!(out, "q_final           {}", r.q_final);
            let series: Vec<String> = r.q_series.iter().map(|q| format!("{q:.3}")).collect();
            let _ = writeln!(out, "q_series          {}", series.join(" "));
            let units = ["s", "m", "m", "facts", "facts", "m", "m", "m"];
            for ((k, v), u) in r.efficiency().into_iter().zip(units) {
                let _ = writeln!(out, "{k:<17} {v:.6} {u}");
            }
            if let Some(n) = &r.normalized {
                out.push_str("human-relative (1 = parity, higher is better)\n");
                for (k, v) in n {
                    let _ = writeln!(out, "  {k:<15} {v:.6}");
                }
            }
            out
        }
    }
}

fn score_file(path: &Path, ctx: &ScoringContext) -> Result<MetricsReport, Failure> {
    let file = std::fs::File::open(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let fail = |e| Failure::new(EXIT_RUNTIME, format!("{}: {e}", path.display()));
    let reader = LogReader::new(std::io::BufReader::new(file)).map_err(fail)?;
    let header = reader.header.clone();
    score_stream(&header, reader, ctx).map_err(fail)
}

fn baselines(dir: &Path, ctx: &ScoringContext) -> Result<Vec<MetricsReport>, Failure> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        match p.extension().and_then(|e| e.to_str()) {
            Some("jsonl") => out.push(score_file(&p, ctx)?),
            Some("json") => out.push(
                serde_json::from_str(&read(&p)?)
                    .map_err(|e| Failure::new(EXIT_RUNTIME, format!("{}: {e}", p.display())))?,
            ),
            _ => {}
        }
    }
    Ok(out)
}

fn episode_failure(path: &Path, e: EpisodeError) -> Failure {
    let code = match e {
        EpisodeError::Parse { .. } | EpisodeError::Wait { .. } => EXIT_PARSE,
        EpisodeError::Sample(_) => EXIT_INVALID,
        _ => EXIT_RUNTIME,
    };
    Failure::new(code, format!("{}: {e}", path.display()))
}

fn execute(cli: Cli, env_config: Option<PathBuf>) -> Result<String, Failure> {
    let ctx = Context::load(&cli, env_config)?;
    let mut stdout = String::new();
    match &cli.command {
        Command::Validate { problem } => return validate(&ctx, problem),
        Command::Flatten { problem, cap } => {
            let (text, def) = ctx.problem(problem)?;
            let opts = ctx.options(problem, &text, &def, cap.unwrap_or(ctx.cap))?;
            return Ok(render_flatten(&opts, ctx.format));
        }
        Command::Sample { problem, scene, seed, out } => {
            let (_, def) = ctx.problem(problem)?;
            let manifest = ctx.manifest(scene)?;
            let r = instantiate(&def, &manifest, &ctx.taxonomy, &ctx.domain, seed.unwrap_or(ctx.seed))
                .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", problem.display())))?;
            let text = serde_json::to_string_pretty(&r).expect("state serializes") + "\n";
            write_out(out, &text, &mut stdout)?;
        }
        Command::Score { log, problem, baselines: dir, recompute, reference, max_ratio, cap } => {
            let (text, def) = ctx.problem(problem)?;
            let options = ctx.options(problem, &text, &def, cap.unwrap_or(ctx.cap))?;
            let sctx = ScoringContext {
                def: &def,
                options: &options,
                taxonomy: &ctx.taxonomy,
                domain: &ctx.domain,
                mode: if *recompute { FactMode::Recompute } else { FactMode::PreferCached },
            };
            let mut report = score_file(log, &sctx)?;
            if let Some(dir) = dir {
                let humans = baselines(dir, &sctx)?;
                let cfg = NormalizeConfig {
                    reference: match reference {
                        RefArg::Best => Reference::Best,
                        RefArg::Mean => Reference::Mean,
                    },
                    max_ratio: *max_ratio,
                };
                let norm = normalize_to_human(&report, &humans, &cfg)
                    .map_err(|e| Failure::new(EXIT_RUNTIME, format!("{}: {e}", dir.display())))?;
                report.normalized = Some(norm);
            }
            stdout = render_report(&report, ctx.format);
        }
        Command::Demo { problem, scene, script, seed, out } => {
            let (_, def) = ctx.problem(problem)?;
            let manifest = ctx.manifest(scene)?;
            let (script_path, script_text) = match script {
                Some(p) => (p.clone(), read(p)?),
                None => (PathBuf::from("<bundled script>"), corpus::PACKING_LUNCHES_SCRIPT.to_string()),
            };
            let steps = parse_script(&script_text).map_err(|e| episode_failure(&script_path, e))?;
            let seed = seed.unwrap_or(ctx.seed);
            let inst = instantiate(&def, &manifest, &ctx.taxonomy, &ctx.domain, seed)
                .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", problem.display())))?;
            let log = record_episode(inst.state, &steps, &def, &ctx.taxonomy, &ctx.domain, &manifest.name, Some(seed))
                .map_err(|e| episode_failure(&script_path, e))?;
            write_out(out, &log.to_jsonl(), &mut stdout)?;
        }
    }
    Ok(stdout)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, env_config: Option<PathBuf>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, env_config) {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            EXIT_OK
        }
        Err(f) => {
            if let Some(out) = &f.output {
                let _ = stdout.write_all(out.as_bytes());
            }
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point for the binary: real arguments, environment and streams.
pub fn main() -> i32 {
    let env_config = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    run(std::env::args_os(), env_config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

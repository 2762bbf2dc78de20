//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or domain errors, 2 when a
//! computation contradicts the classification (a failing lemma check, or a
//! grid cell that completes outside the predicted set).

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::builders::NamedFamily;
use crate::intset::{BoundedSet, ProgressionSpec};
use crate::repfn::{profile, Variant};
use crate::solver::{classify_grid, forced_extend, match_family, predicted_completed, write_grid_csv, RRule, Status};
use crate::verify::{run_suite, BoundProfile, LemmaId, DEFAULT_SEED};

/// Environment variable that relocates relative `--out` paths.
pub const OUT_DIR_ENV: &str = "NATPART_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_COUNTEREXAMPLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "natpart", version, about = "Partitions of ℕ minus a progression with equal representation functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a named set family: s1t1:<l>, s2t2:<l>, s1t1+1:<l>, ef:<u>, xy, uv.
    Build(BuildArgs),
    /// Emit representation-function profiles as CSV.
    Repfn(RepfnArgs),
    /// Run the forced extension for one progression.
    Solve(SolveArgs),
    /// Classify every (r, m) cell of a grid.
    Classify(ClassifyArgs),
    /// Run the lemma verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = RunConfig::DEFAULT_BOUND)]
    bound: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RepfnArgs {
    /// Compare the two sets of a named family (columns n, R2_A, R2_B, equal).
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    family: Option<String>,
    /// Profile one set read from a set literal file (columns n, R1, R2, R3).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = RunConfig::DEFAULT_BOUND)]
    bound: usize,
    /// Largest n to emit; defaults to the window's last value.
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Emit {
    Sets,
    Json,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = RunConfig::DEFAULT_BOUND)]
    bound: usize,
    #[arg(long, value_enum, default_value_t = Emit::Sets)]
    emit: Emit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long, default_value_t = RunConfig::DEFAULT_M_MAX)]
    m_max: usize,
    #[arg(long, default_value_t = RunConfig::DEFAULT_R_MAX_FACTOR)]
    r_max_factor: usize,
    #[arg(long, default_value_t = RunConfig::DEFAULT_BOUND)]
    bound: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// A lemma id (lemma2, lemma3, ..., theorem1, kernel) or `all`.
    #[arg(long, default_value = "all")]
    lemma: String,
    #[arg(long, default_value = "quick")]
    bound_profile: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

/// Options shared by the subcommands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub bound: usize,
    pub m_max: usize,
    pub r_rule: RRule,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    pub const DEFAULT_BOUND: usize = 4096;
    pub const DEFAULT_M_MAX: usize = 33;
    pub const DEFAULT_R_MAX_FACTOR: usize = 2;

    pub fn validate(&self) -> Result<(), String> {
        if self.bound < 4 {
            return Err(format!("bound must be at least 4, got {}", self.bound));
        }
        if self.m_max < 2 {
            return Err(format!("m-max must be at least 2, got {}", self.m_max));
        }
        Ok(())
    }

    /// Resolves an output path against the output directory, if any.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.output_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            bound: Self::DEFAULT_BOUND,
            m_max: Self::DEFAULT_M_MAX,
            r_rule: RRule { max_factor: Self::DEFAULT_R_MAX_FACTOR },
            output_dir: std::env::var_os(OUT_DIR_ENV).map(PathBuf::from),
            seed: DEFAULT_SEED,
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn domain(message: impl ToString) -> Failure {
    Failure { code: EXIT_DOMAIN, message: message.to_string() }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Results go to `stdout`; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            return if err.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_DOMAIN
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let base = RunConfig::default();
    match command {
        Command::Build(args) => {
            let config = RunConfig { bound: args.bound, ..base };
            config.validate().map_err(domain)?;
            cmd_build(&config, &args, stdout)
        }
        Command::Repfn(args) => {
            let config = RunConfig { bound: args.bound, ..base };
            config.validate().map_err(domain)?;
            cmd_repfn(&config, &args, stdout)
        }
        Command::Solve(args) => {
            let config = RunConfig { bound: args.bound, ..base };
            config.validate().map_err(domain)?;
            cmd_solve(&config, &args, stdout)
        }
        Command::Classify(args) => {
            let config = RunConfig {
                bound: args.bound,
                m_max: args.m_max,
                r_rule: RRule { max_factor: args.r_max_factor },
                ..base
            };
            config.validate().map_err(domain)?;
            cmd_classify(&config, &args, stdout, stderr)
        }
        Command::Verify(args) => {
            let config = RunConfig { seed: args.seed, ..base };
            cmd_verify(&config, &args, stdout)
        }
    }
}

fn emit(config: &RunConfig, out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let path = config.resolve(path);
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| domain(format!("{}: {e}", parent.display())))?;
            }
            fs::write(&path, text).map_err(|e| domain(format!("{}: {e}", path.display())))
        }
        None => stdout.write_all(text.as_bytes()).map_err(domain),
    }
}

fn labelled_sets(sets: &[(&str, &BoundedSet)]) -> String {
    sets.iter().map(|(label, set)| format!("# {label}\n{set}")).collect()
}

fn cmd_build(config: &RunConfig, args: &BuildArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let named: NamedFamily = args.family.parse().map_err(domain)?;
    let pair = named.build(config.bound).map_err(domain)?;
    let (first, second) = match named {
        NamedFamily::Partition(_) => ("A", "B"),
        NamedFamily::EF(_) => ("E", "F"),
        NamedFamily::XY => ("X", "Y"),
        NamedFamily::UV => ("U", "V"),
    };
    let text = labelled_sets(&[(first, &pair.first), (second, &pair.second), ("T", &pair.excluded)]);
    emit(config, args.out.as_deref(), &text, stdout)?;
    Ok(EXIT_OK)
}

fn csv_text<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String, Failure> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(domain)?;
    }
    let bytes = writer.into_inner().map_err(|e| domain(e.to_string()))?;
    String::from_utf8(bytes).map_err(domain)
}

#[derive(Serialize)]
struct PairRow {
    n: usize,
    #[serde(rename = "R2_A")]
    r2_a: u64,
    #[serde(rename = "R2_B")]
    r2_b: u64,
    equal: bool,
}

#[derive(Serialize)]
struct SingleRow {
    n: usize,
    #[serde(rename = "R1")]
    r1: u64,
    #[serde(rename = "R2")]
    r2: u64,
    #[serde(rename = "R3")]
    r3: u64,
}

fn cmd_repfn(config: &RunConfig, args: &RepfnArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let text = if let Some(path) = &args.input {
        let literal = fs::read_to_string(path).map_err(|e| domain(format!("{}: {e}", path.display())))?;
        let set: BoundedSet = literal.parse().map_err(domain)?;
        let n_max = args.n_max.unwrap_or(set.bound().saturating_sub(1));
        let p1 = profile(&set, Variant::R1, n_max).map_err(domain)?;
        let p2 = profile(&set, Variant::R2, n_max).map_err(domain)?;
        let p3 = profile(&set, Variant::R3, n_max).map_err(domain)?;
        csv_text((0..=n_max).map(|n| SingleRow { n, r1: p1.values[n], r2: p2.values[n], r3: p3.values[n] }))?
    } else {
        let name = args.family.as_deref().unwrap_or_default();
        let named: NamedFamily = name.parse().map_err(domain)?;
        let pair = named.build(config.bound).map_err(domain)?;
        let n_max = args.n_max.unwrap_or(pair.first.bound() - 1);
        let pa = profile(&pair.first, Variant::R2, n_max).map_err(domain)?;
        let pb = profile(&pair.second, Variant::R2, n_max).map_err(domain)?;
        csv_text((0..=n_max).map(|n| PairRow {
            n,
            r2_a: pa.values[n],
            r2_b: pb.values[n],
            equal: pa.values[n] == pb.values[n],
        }))?
    };
    emit(config, args.out.as_deref(), &text, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_solve(config: &RunConfig, args: &SolveArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let p = ProgressionSpec::new(args.r, args.m).map_err(domain)?;
    let out = forced_extend(p, config.bound).map_err(domain)?;
    let family = if out.is_completed() {
        match_family(&out, p, crate::solver::l_max_for(p.m())).map_err(domain)?.family
    } else {
        None
    };
    let text = match args.emit {
        Emit::Sets => {
            let mut text = format!("status={}\n", out.status);
            if let Some(f) = family {
                text.push_str(&format!("family={f}\n"));
            }
            if let Some(c) = out.contradiction {
                text.push_str(&format!(
                    "contradiction_at={} position={} forced_value={}\n",
                    c.sum, c.position, c.forced_value
                ));
            }
            text + &labelled_sets(&[("A", &out.a), ("B", &out.b)])
        }
        Emit::Json => {
            #[derive(Serialize)]
            struct SolveJson<'a> {
                outcome: &'a crate::solver::ExtensionOutcome,
                family: Option<String>,
            }
            let json = SolveJson { outcome: &out, family: family.map(|f| f.to_string()) };
            serde_json::to_string_pretty(&json).map_err(domain)? + "\n"
        }
    };
    stdout.write_all(text.as_bytes()).map_err(domain)?;
    Ok(EXIT_OK)
}

fn cmd_classify(
    config: &RunConfig,
    args: &ClassifyArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let records = classify_grid(2..=config.m_max, config.r_rule, config.bound).map_err(domain)?;
    let text = match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_grid_csv(&records, &mut buf).map_err(domain)?;
            String::from_utf8(buf).map_err(domain)?
        }
        Format::Json => serde_json::to_string_pretty(&records).map_err(domain)? + "\n",
    };
    emit(config, args.out.as_deref(), &text, stdout)?;

    let predicted = predicted_completed(config.m_max, config.r_rule);
    let completed: BTreeSet<(usize, usize)> =
        records.iter().filter(|r| r.status == Status::Completed).map(|r| (r.r, r.m)).collect();
    let survivors: Vec<_> = completed.difference(&predicted).collect();
    let missing: Vec<_> = predicted.difference(&completed).collect();
    if survivors.is_empty() && missing.is_empty() {
        return Ok(EXIT_OK);
    }
    let _ = writeln!(
        stderr,
        "classification differs from prediction at bound {}: unexpected completions {survivors:?}, missing {missing:?}; \
         retry with a larger --bound",
        config.bound
    );
    Ok(EXIT_COUNTEREXAMPLE)
}

fn cmd_verify(config: &RunConfig, args: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let profile: BoundProfile = args.bound_profile.parse().map_err(domain)?;
    let only = if args.lemma == "all" { Vec::new() } else { vec![args.lemma.parse::<LemmaId>().map_err(domain)?] };
    let report = run_suite(profile, config.seed, &only).map_err(domain)?;
    let mut summary = String::new();
    for entry in &report.lemmas {
        let verdict = if entry.passed() { "PASS" } else { "FAIL" };
        summary.push_str(&format!(
            "{verdict} {} instances={} passed={} rejected={}",
            entry.lemma, entry.instance_count, entry.pass_count, entry.rejected_count
        ));
        if let Some(f) = &entry.first_failure {
            summary.push_str(&format!(" first_failure=[{}] lhs={} rhs={}", f.inputs, f.lhs, f.rhs));
        }
        summary.push('\n');
    }
    stdout.write_all(summary.as_bytes()).map_err(domain)?;
    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&report).map_err(domain)? + "\n";
        emit(config, Some(path), &json, stdout)?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_COUNTEREXAMPLE })
}

//! Command-line front end of the WFOMC engine.

pub mod bench;
pub mod decimal;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Zero;
use wfomc_core::liftability::{self, RuReport, RuWitness, S2Report};
use wfomc_core::oracle::oracle_wfomc_with;
use wfomc_core::parser::parse_theory;
use wfomc_core::preprocess::{compile, Compiled};
use wfomc_core::{engine::wfomc_with, Cache, EngineConfig, Error, Mode, Stats};

pub use decimal::{format_decimal, render};

/// Exit code for malformed input.
pub const EXIT_INPUT: i32 = 1;
/// Exit code for budget, ground-limit, timeout and zero-denominator failures.
pub const EXIT_LIMIT: i32 = 2;
/// Exit code when the oracle refuses an oversized grounding.
pub const EXIT_ORACLE: i32 = 3;

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OracleLimit { .. } => EXIT_ORACLE,
            Error::UnsupportedExistential(_) | Error::FormulaTooLarge { .. } => EXIT_INPUT,
            _ => EXIT_LIMIT,
        };
        CliError::new(code, e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "wfomc", about = "Exact weighted first-order model counting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weighted model count of a theory.
    Count {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Print engine counters.
        #[arg(long)]
        stats: bool,
    },
    /// Exact quotient of two weighted model counts.
    Ratio {
        numerator: PathBuf,
        denominator: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Membership in FO², RU, S²FO² and S²RU.
    Check {
        file: PathBuf,
        #[command(flatten)]
        domains: DomainArgs,
    },
    /// Brute-force count over all interpretations.
    Oracle {
        file: PathBuf,
        /// Largest number of ground atoms to enumerate.
        #[arg(long, default_value_t = 20)]
        limit: u64,
        #[command(flatten)]
        domains: DomainArgs,
    },
    /// Runtime sweep over domain sizes, written as CSV.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[value(name = "R")]
    R,
    #[value(name = "RD")]
    Rd,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::R => Mode::R,
            ModeArg::Rd => Mode::RD,
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct DomainArgs {
    /// Override a domain size, as NAME=N. Repeatable.
    #[arg(long = "set-domain", value_parser = parse_domain_override)]
    pub set_domain: Vec<(String, u64)>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "RD")]
    pub mode: ModeArg,
    /// Abort after this many engine nodes.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Largest grounding the fallback may produce, in ground atoms.
    #[arg(long = "ground-limit")]
    pub ground_limit: Option<u64>,
    /// Disable the canonical-key cache.
    #[arg(long = "no-cache")]
    pub no_cache: bool,
    #[command(flatten)]
    pub domains: DomainArgs,
}

impl RunArgs {
    pub fn config(&self) -> EngineConfig {
        let mut cfg = EngineConfig::new(self.mode.into());
        if let Some(l) = self.ground_limit {
            cfg.ground_atom_limit = l;
        }
        cfg.node_budget = self.budget;
        cfg.use_cache = !self.no_cache;
        cfg
    }
}

fn parse_domain_override(s: &str) -> Result<(String, u64), String> {
    let (name, n) = s.split_once('=').ok_or_else(|| format!("expected NAME=N, got {s}"))?;
    let n = n.trim().parse::<u64>().map_err(|e| format!("bad size in {s}: {e}"))?;
    Ok((name.trim().to_string(), n))
}

/// Parse, apply domain overrides and compile a theory file.
pub fn load(path: &Path, domains: &[(String, u64)]) -> Result<Compiled, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    load_str(&text, domains).map_err(|e| CliError::new(e.code, format!("{}: {}", path.display(), e.message)))
}

pub fn load_str(text: &str, domains: &[(String, u64)]) -> Result<Compiled, CliError> {
    let mut src = parse_theory(text).map_err(|e| CliError::new(EXIT_INPUT, e.to_string()))?;
    for (name, n) in domains {
        src.set_domain(name, *n).map_err(|e| CliError::new(EXIT_INPUT, e.to_string()))?;
    }
    compile(&src).map_err(|e| {
        let mut err = CliError::from(e);
        err.code = EXIT_INPUT;
        err
    })
}

/// Exact count of a compiled theory with a fresh cache.
pub fn count_compiled(c: &Compiled, cfg: &EngineConfig) -> Result<(BigRational, Stats), CliError> {
    let cache = Cache::new();
    Ok(wfomc_with(&c.theory, cfg, &cache)?)
}

/// Run a parsed command line, returning what goes to standard output.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Count { file, run, stats } => cmd_count(&file, &run, stats),
        Command::Ratio { numerator, denominator, run } => cmd_ratio(&numerator, &denominator, &run),
        Command::Check { file, domains } => cmd_check(&file, &domains.set_domain),
        Command::Oracle { file, limit, domains } => cmd_oracle(&file, limit, &domains.set_domain),
        Command::Bench(args) => bench::cmd_bench(&args),
    }
}

pub fn cmd_count(file: &Path, run: &RunArgs, stats: bool) -> Result<String, CliError> {
    let c = load(file, &run.domains.set_domain)?;
    let start = Instant::now();
    let (v, st) = count_compiled(&c, &run.config())?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut out = render(&v);
    out.push('\n');
    if stats {
        write_stats(&mut out, &st, elapsed);
    }
    Ok(out)
}

fn write_stats(out: &mut String, s: &Stats, seconds: f64) {
    let _ = writeln!(out, "seconds: {seconds:.6}");
    let rows = [
        ("nodes", s.nodes),
        ("cache_hits", s.cache_hits),
        ("cache_misses", s.cache_misses),
        ("decompositions", s.decompositions),
        ("lifted_decompositions", s.lifted_decompositions),
        ("case_analyses", s.case_analyses),
        ("lifted_case_analyses", s.lifted_case_analyses),
        ("rewrites", s.rewrites),
        ("domain_recursions", s.domain_recursions),
        ("forced_recursions", s.forced_recursions),
        ("groundings", s.groundings),
        ("probes_accepted", s.probes_accepted),
        ("probes_rejected", s.probes_rejected),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k}: {v}");
    }
}

pub fn cmd_ratio(num: &Path, den: &Path, run: &RunArgs) -> Result<String, CliError> {
    let cfg = run.config();
    let a = count_compiled(&load(num, &run.domains.set_domain)?, &cfg)?.0;
    let b = count_compiled(&load(den, &run.domains.set_domain)?, &cfg)?.0;
    if b.is_zero() {
        return Err(CliError::new(EXIT_LIMIT, format!("{} has weighted model count 0", den.display())));
    }
    Ok(format!("{}\n", render(&(a / b))))
}

pub fn cmd_oracle(file: &Path, limit: u64, domains: &[(String, u64)]) -> Result<String, CliError> {
    let c = load(file, domains)?;
    let v = oracle_wfomc_with(&c.original, &c.existentials, limit)?;
    Ok(format!("{}\n", render(&v)))
}

pub fn cmd_check(file: &Path, domains: &[(String, u64)]) -> Result<String, CliError> {
    let c = load(file, domains)?;
    let r = liftability::check(&c.theory);
    let mut out = String::new();
    let fo2 = match &r.fo2.offending {
        None => "every clause has at most two variables".to_string(),
        Some(cl) => format!("clause with more than two variables: {cl}"),
    };
    let _ = writeln!(out, "FO2: {} ({fo2})", if r.fo2.member { "yes" } else { "no" });
    let _ = writeln!(out, "RU: {} ({})", r.ru.verdict, ru_summary(&r.ru));
    let _ = writeln!(out, "S2FO2: {} ({})", r.s2fo2.verdict, s2_summary(&r.s2fo2));
    let _ = writeln!(out, "S2RU: {} ({})", r.s2ru.verdict, s2_summary(&r.s2ru));
    Ok(out)
}

fn ru_summary(r: &RuReport) -> String {
    match &r.witness {
        RuWitness::Trace(steps) => format!("{} rule applications", steps.len()),
        RuWitness::Stuck(t) => format!("no rule applies to: {}", one_line(t)),
        RuWitness::Repeated(t) => format!("shape repeats below itself: {}", one_line(t)),
        RuWitness::NodeCap => format!("exploration exceeded {} theories", liftability::RU_NODE_CAP),
    }
}

fn s2_summary(r: &S2Report) -> String {
    let mut s = format!(
        "alpha predicates {{{}}}, {} alpha clauses, {} beta clauses",
        r.alpha_preds.join(", "),
        r.alpha_clauses.len(),
        r.beta_clauses.len()
    );
    if let Some(ru) = &r.beta_ru {
        let _ = write!(s, "; beta RU {}: {}", ru.verdict, ru_summary(ru));
    }
    if !r.same_domain_excluded.is_empty() {
        let _ = write!(s, "; same-domain predicates not considered: {}", r.same_domain_excluded.join(", "));
    }
    s
}

/// First two clauses of a multi-line theory dump, on one line.
fn one_line(t: &str) -> String {
    let lines: Vec<String> =
        t.lines().map(|l| l.split_whitespace().collect::<Vec<_>>().join(" ")).filter(|l| !l.is_empty()).collect();
    let mut s = lines.iter().take(2).cloned().collect::<Vec<_>>().join("; ");
    if lines.len() > 2 {
        let _ = write!(s, "; and {} more", lines.len() - 2);
    }
    s
}

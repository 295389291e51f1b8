//! Runtime sweeps over domain sizes.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, ValueEnum};
use num_rational::BigRational;
use wfomc_core::engine::wfomc_with;
use wfomc_core::{Cache, EngineConfig, Error, Mode};

use crate::{load, CliError, DomainArgs, EXIT_INPUT};

pub const CSV_HEADER: [&str; 8] = ["theory", "mode", "n", "seconds", "nodes", "cache_hits", "value", "status"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BenchMode {
    #[value(name = "R")]
    R,
    #[value(name = "RD")]
    Rd,
    #[value(name = "both")]
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    pub file: PathBuf,
    /// Domain whose size is swept.
    #[arg(long)]
    pub domain: String,
    /// Sizes as A:B or A:B:STEP, inclusive.
    #[arg(long, value_parser = parse_sizes)]
    pub sizes: Sizes,
    #[arg(long, value_enum, default_value = "RD")]
    pub mode: BenchMode,
    /// Per-row timeout in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Rows run concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long = "ground-limit")]
    pub ground_limit: Option<u64>,
    /// Start every row with an empty cache instead of one shared per mode.
    #[arg(long = "fresh-cache")]
    pub fresh_cache: bool,
    #[command(flatten)]
    pub domains: DomainArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sizes {
    pub start: u64,
    pub end: u64,
    pub step: u64,
}

impl Sizes {
    pub fn values(&self) -> Vec<u64> {
        (self.start..=self.end).step_by(self.step as usize).collect()
    }
}

pub fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<u64>().map_err(|e| format!("bad size {p:?}: {e}"));
    let (start, end, step) = match parts.as_slice() {
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err(format!("expected A:B or A:B:STEP, got {s}")),
    };
    if step == 0 || start > end {
        return Err(format!("empty or invalid range {s}"));
    }
    Ok(Sizes { start, end, step })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub theory: String,
    pub mode: &'static str,
    pub n: u64,
    pub seconds: Option<f64>,
    pub nodes: Option<u64>,
    pub cache_hits: Option<u64>,
    pub value: Option<BigRational>,
    pub status: String,
}

impl BenchRow {
    pub fn record(&self) -> Vec<String> {
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.theory.clone(),
            self.mode.to_string(),
            self.n.to_string(),
            self.seconds.map(|s| format!("{s:.6}")).unwrap_or_default(),
            opt(self.nodes),
            opt(self.cache_hits),
            self.value.as_ref().map(|v| v.to_string()).unwrap_or_default(),
            self.status.clone(),
        ]
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::R => "R",
        Mode::RD => "RD",
    }
}

fn run_row(args: &BenchArgs, theory: &str, mode: Mode, n: u64, cache: &Cache<BigRational>) -> BenchRow {
    let mut row = BenchRow {
        theory: theory.to_string(),
        mode: mode_name(mode),
        n,
        seconds: None,
        nodes: None,
        cache_hits: None,
        value: None,
        status: String::new(),
    };
    let mut domains = args.domains.set_domain.clone();
    domains.push((args.domain.clone(), n));
    let compiled = match load(&args.file, &domains) {
        Ok(c) => c,
        Err(e) => {
            row.status = format!("error: {}", e.message);
            return row;
        }
    };
    let mut cfg = EngineConfig::new(mode);
    if let Some(l) = args.ground_limit {
        cfg.ground_atom_limit = l;
    }
    let start = Instant::now();
    cfg.deadline = Some(start + Duration::from_secs_f64(args.timeout));
    let fresh;
    let cache = if args.fresh_cache {
        fresh = Cache::new();
        &fresh
    } else {
        cache
    };
    let result = wfomc_with(&compiled.theory, &cfg, cache);
    row.seconds = Some(start.elapsed().as_secs_f64());
    match result {
        Ok((v, st)) => {
            row.nodes = Some(st.nodes);
            row.cache_hits = Some(st.cache_hits);
            row.value = Some(v);
            row.status = "ok".into();
        }
        Err(Error::Timeout) => row.status = "timeout".into(),
        Err(e) => row.status = format!("error: {e}"),
    }
    row
}

/// Run the sweep. Sizes are processed in increasing order, `jobs` at a time;
/// once a size times out, larger sizes of the same mode are marked `skipped`.
pub fn sweep(args: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    if !args.file.exists() {
        return Err(CliError::new(EXIT_INPUT, format!("{}: no such file", args.file.display())));
    }
    // Fail early on parse errors and unknown domains.
    let first = args.sizes.start;
    let mut domains = args.domains.set_domain.clone();
    domains.push((args.domain.clone(), first));
    load(&args.file, &domains)?;

    let theory = args.file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let modes: Vec<Mode> = match args.mode {
        BenchMode::R => vec![Mode::R],
        BenchMode::Rd => vec![Mode::RD],
        BenchMode::Both => vec![Mode::R, Mode::RD],
    };
    let sizes = args.sizes.values();
    let jobs = args.jobs.max(1);
    let mut rows = Vec::new();
    for mode in modes {
        let cache = Cache::new();
        let mut timed_out = false;
        for chunk in sizes.chunks(jobs) {
            if timed_out {
                rows.extend(chunk.iter().map(|&n| BenchRow {
                    theory: theory.clone(),
                    mode: mode_name(mode),
                    n,
                    seconds: None,
                    nodes: None,
                    cache_hits: None,
                    value: None,
                    status: "skipped".into(),
                }));
                continue;
            }
            let batch = run_chunk(args, &theory, mode, chunk, &cache, jobs);
            timed_out = batch.iter().any(|r| r.status == "timeout");
            rows.extend(batch);
        }
    }
    Ok(rows)
}

#[cfg(feature = "parallel")]
fn run_chunk(args: &BenchArgs, theory: &str, mode: Mode, chunk: &[u64], cache: &Cache<BigRational>, jobs: usize) -> Vec<BenchRow> {
    use rayon::prelude::*;
    if jobs == 1 {
        return chunk.iter().map(|&n| run_row(args, theory, mode, n, cache)).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| chunk.par_iter().map(|&n| run_row(args, theory, mode, n, cache)).collect()),
        Err(_) => chunk.iter().map(|&n| run_row(args, theory, mode, n, cache)).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_chunk(args: &BenchArgs, theory: &str, mode: Mode, chunk: &[u64], cache: &Cache<BigRational>, _jobs: usize) -> Vec<BenchRow> {
    chunk.iter().map(|&n| run_row(args, theory, mode, n, cache)).collect()
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], w: W) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::new(EXIT_INPUT, e.to_string());
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        wr.write_record(r.record()).map_err(io)?;
    }
    wr.flush().map_err(|e| CliError::new(EXIT_INPUT, e.to_string()))
}

pub fn cmd_bench(args: &BenchArgs) -> Result<String, CliError> {
    let rows = sweep(args)?;
    match &args.csv {
        Some(path) => {
            let f = std::fs::File::create(path)
                .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
            write_csv(&rows, f)?;
            Ok(format!("{} rows written to {}\n", rows.len(), path.display()))
        }
        None => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            Ok(String::from_utf8_lossy(&buf).into_owned())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges() {
        assert_eq!(parse_sizes("2:10:4").unwrap().values(), vec![2, 6, 10]);
        assert_eq!(parse_sizes("3:5").unwrap().values(), vec![3, 4, 5]);
        assert!(parse_sizes("5:3").is_err());
        assert!(parse_sizes("1:5:0").is_err());
        assert!(parse_sizes("x").is_err());
    }

    #[test]
    fn empty_fields_for_missing_values() {
        let row = BenchRow {
            theory: "t".into(),
            mode: "R",
            n: 4,
            seconds: None,
            nodes: None,
            cache_hits: None,
            value: None,
            status: "timeout".into(),
        };
        assert_eq!(row.record(), vec!["t", "R", "4", "", "", "", "", "timeout"]);
    }
}

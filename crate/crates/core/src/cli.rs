//! Command-line front end: `count`, `count-corank`, `verify`, `partitions`,
//! `series`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 budget or usage error.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cache::Cache;
use crate::enumeration::{
    self, CountRecord, EnumerationError, Method, Status, VerificationReport, ENGINE_VERSION,
};
use crate::partition::{enumerate_partitions, partition_to_map};
use crate::search::{SearchConfig, DEFAULT_MAX_STEPS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Inclusive integer range written `a..b`, `a..=b` or `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeArg {
    pub lo: u64,
    pub hi: u64,
}

impl RangeArg {
    pub fn iter(self) -> impl Iterator<Item = u64> {
        self.lo..=self.hi
    }
}

impl FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad bound {t:?}: {e}"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(RangeArg { lo, hi })
    }
}

impl fmt::Display for RangeArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FullRankMethod {
    /// φ_n(r)
    Oracle,
    /// f_n(r)
    Unital,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorankMethod {
    Oracle,
    Formula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    F,
    Phi,
}

#[derive(Debug, Parser)]
#[command(
    name = "sublattice",
    version,
    about = "Count multiplicative sublattices of Z^n and check the co-rank counting identity"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON-lines cache of computed counts
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Oracle entries range over [0, M·r]
    #[arg(long, global = true, default_value_t = 1)]
    pub bound_multiplier: u64,
    /// Maximum candidate rows examined per enumeration
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STEPS)]
    pub budget: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// φ_n(r) or f_n(r) for full-rank lattices
    Count {
        #[arg(long)]
        n: RangeArg,
        #[arg(long)]
        r: RangeArg,
        #[arg(long, value_enum, default_value = "oracle")]
        method: FullRankMethod,
    },
    /// φ_{ambient, corank}(torsion)
    CountCorank {
        #[arg(long)]
        ambient: usize,
        #[arg(long)]
        corank: usize,
        #[arg(long)]
        torsion: RangeArg,
        #[arg(long, value_enum, default_value = "oracle")]
        method: CorankMethod,
    },
    /// Oracle count against S(n+k+1, n+1)·φ_n(r), with witness checks
    Verify {
        #[arg(long)]
        n: RangeArg,
        #[arg(long)]
        k: RangeArg,
        #[arg(long)]
        r: RangeArg,
    },
    /// Partitions of {0..n+k} into n+1 blocks and their ordered maps
    Partitions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Coefficients f_n(1..=r_max) (or φ_n) with running partial sums
    Series {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r_max: u64,
        #[arg(long, value_enum, default_value = "f")]
        kind: SeriesKind,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
}

enum Cell {
    Int(u128),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

fn int(v: impl Into<u128>) -> Cell {
    Cell::Int(v.into())
}

fn text(s: impl Into<String>) -> Cell {
    Cell::Text(s.into())
}

/// Streams rows as an aligned table, RFC-4180 CSV, or JSON lines.
struct Emitter<'a> {
    format: Format,
    header: Vec<&'static str>,
    out: &'a mut dyn Write,
    started: bool,
}

impl<'a> Emitter<'a> {
    fn new(format: Format, header: Vec<&'static str>, out: &'a mut dyn Write) -> Self {
        Emitter {
            format,
            header,
            out,
            started: false,
        }
    }

    fn width(&self, i: usize) -> usize {
        self.header[i].len().max(8)
    }

    fn write_cells(&mut self, cells: &[String]) -> io::Result<()> {
        match self.format {
            Format::Table => {
                let line: Vec<String> = cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| format!("{c:>w$}", w = self.width(i)))
                    .collect();
                writeln!(self.out, "{}", line.join("  ").trim_end())
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut *self.out);
                w.write_record(cells).map_err(io::Error::other)?;
                w.flush()
            }
            Format::Json => unreachable!(),
        }
    }

    fn header(&mut self) -> io::Result<()> {
        if !self.started {
            self.started = true;
            if self.format != Format::Json {
                let h: Vec<String> = self.header.iter().map(|s| s.to_string()).collect();
                self.write_cells(&h)?;
            }
        }
        Ok(())
    }

    /// `json` replaces the default object built from the header.
    fn row(&mut self, cells: Vec<Cell>, json: Option<String>) -> io::Result<()> {
        self.header()?;
        if self.format == Format::Json {
            let line = json.unwrap_or_else(|| {
                let fields: Vec<String> = self
                    .header
                    .iter()
                    .zip(&cells)
                    .map(|(h, c)| {
                        let v = match c {
                            Cell::Int(v) => v.to_string(),
                            Cell::Text(s) => serde_json::to_string(s).expect("strings serialize"),
                        };
                        format!(
                            "{}:{v}",
                            serde_json::to_string(h).expect("strings serialize")
                        )
                    })
                    .collect();
                format!("{{{}}}", fields.join(","))
            });
            return writeln!(self.out, "{line}");
        }
        let cells: Vec<String> = cells.iter().map(ToString::to_string).collect();
        self.write_cells(&cells)
    }

    /// Comment line; omitted in JSON output.
    fn note(&mut self, msg: &str) -> io::Result<()> {
        if self.format != Format::Json {
            writeln!(self.out, "# {msg}")?;
        }
        Ok(())
    }
}

struct Context {
    cfg: SearchConfig,
    cache: Cache,
    bound_multiplier: u64,
}

impl Context {
    fn cached(
        &mut self,
        n: usize,
        k: usize,
        r: u64,
        method: Method,
        compute: impl FnOnce(&SearchConfig) -> Result<u128, EnumerationError>,
    ) -> Result<CountRecord, EnumerationError> {
        if let Some(hit) = self.cache.get(n, k, r, method, ENGINE_VERSION) {
            return Ok(hit.value.clone());
        }
        let record = CountRecord::new(n, k, r, compute(&self.cfg)?, method);
        self.cache.insert(record.clone());
        Ok(record)
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn to_usize(v: u64) -> usize {
    usize::try_from(v).unwrap_or(usize::MAX)
}

const COUNT_HEADER: [&str; 5] = ["n", "k", "r", "method", "count"];

fn count_row(
    em: &mut Emitter<'_>,
    res: Result<CountRecord, EnumerationError>,
    key: (usize, usize, u64, Method),
) -> io::Result<bool> {
    let (n, k, r, method) = key;
    match res {
        Ok(rec) => {
            let json = serde_json::to_string(&rec).expect("records serialize");
            em.row(
                vec![
                    int(n as u64),
                    int(k as u64),
                    int(r),
                    text(method.as_str()),
                    int(rec.count),
                ],
                Some(json),
            )?;
            Ok(true)
        }
        Err(e) => {
            let json = format!(
                r#"{{"n":{n},"k":{k},"r":{r},"method":"{}","status":"incomplete","error":{}}}"#,
                method.as_str(),
                serde_json::to_string(&e.to_string()).expect("strings serialize")
            );
            em.row(
                vec![
                    int(n as u64),
                    int(k as u64),
                    int(r),
                    text(method.as_str()),
                    text("incomplete"),
                ],
                Some(json),
            )?;
            Ok(false)
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let common = cli.common;
    if common.bound_multiplier == 0 {
        return Err(CliError::Usage(
            "--bound-multiplier must be at least 1".into(),
        ));
    }
    let cfg = SearchConfig {
        jobs: common
            .jobs
            .unwrap_or_else(|| SearchConfig::default().jobs)
            .max(1),
        max_steps: common.budget,
    };
    let cache = match &common.cache {
        Some(p) => {
            Cache::open(p).map_err(|e| CliError::Usage(format!("cache {}: {e}", p.display())))?
        }
        None => Cache::in_memory(),
    };
    let mut ctx = Context {
        cfg,
        cache,
        bound_multiplier: common.bound_multiplier,
    };
    let format = common.format;
    let code = match cli.command {
        Command::Count { n, r, method } => {
            let mut em = Emitter::new(format.unwrap_or(Format::Table), COUNT_HEADER.to_vec(), out);
            let mut complete = true;
            for n in n.iter().map(to_usize) {
                for r in r.iter() {
                    let res = match method {
                        FullRankMethod::Oracle => ctx.cached(n, 0, r, Method::Oracle, |c| {
                            enumeration::phi(n, r, c).map(u128::from)
                        }),
                        FullRankMethod::Unital => {
                            if n == 0 {
                                return Err(CliError::Usage("f_n is defined for n >= 1".into()));
                            }
                            ctx.cached(n, 0, r, Method::Unital, |c| {
                                enumeration::f_count(n, r, c).map(u128::from)
                            })
                        }
                    };
                    let m = match method {
                        FullRankMethod::Oracle => Method::Oracle,
                        FullRankMethod::Unital => Method::Unital,
                    };
                    complete &= count_row(&mut em, res, (n, 0, r, m))?;
                }
            }
            if complete {
                EXIT_OK
            } else {
                EXIT_USAGE
            }
        }
        Command::CountCorank {
            ambient,
            corank,
            torsion,
            method,
        } => {
            if corank > ambient {
                return Err(CliError::Usage(format!(
                    "--corank {corank} exceeds --ambient {ambient}"
                )));
            }
            let n = ambient - corank;
            let bound = ctx.bound_multiplier;
            let mut em = Emitter::new(format.unwrap_or(Format::Table), COUNT_HEADER.to_vec(), out);
            let mut complete = true;
            for r in torsion.iter() {
                let (m, res) = match method {
                    CorankMethod::Formula => (
                        Method::Formula,
                        ctx.cached(n, corank, r, Method::Formula, |c| {
                            enumeration::phi_corank_formula(n, corank, r, c)
                        }),
                    ),
                    // oracle counts are cached only at the default entry bound
                    CorankMethod::Oracle if bound == 1 => (
                        Method::Oracle,
                        ctx.cached(n, corank, r, Method::Oracle, |c| {
                            enumeration::enumerate_corank_oracle(ambient, corank, r, 1, c)
                                .map(|v| v.len() as u128)
                        }),
                    ),
                    CorankMethod::Oracle => (
                        Method::Oracle,
                        enumeration::enumerate_corank_oracle(ambient, corank, r, bound, &ctx.cfg)
                            .map(|v| {
                                CountRecord::new(n, corank, r, v.len() as u128, Method::Oracle)
                            }),
                    ),
                };
                complete &= count_row(&mut em, res, (n, corank, r, m))?;
            }
            if complete {
                EXIT_OK
            } else {
                EXIT_USAGE
            }
        }
        Command::Verify { n, k, r } => {
            run_verify(&ctx, n, k, r, format.unwrap_or(Format::Table), out, err)?
        }
        Command::Partitions { n, k } => {
            let mut em = Emitter::new(
                format.unwrap_or(Format::Table),
                vec!["index", "partition", "map"],
                out,
            );
            for (i, p) in enumerate_partitions(n + k + 1, n + 1).iter().enumerate() {
                let g = partition_to_map(p, n).expect("block count matches");
                let json = format!(
                    r#"{{"index":{i},"partition":{},"map":{}}}"#,
                    serde_json::to_string(p).expect("partitions serialize"),
                    serde_json::to_string(&g).expect("maps serialize")
                );
                em.row(
                    vec![int(i as u64), text(p.to_string()), text(g.to_string())],
                    Some(json),
                )?;
            }
            EXIT_OK
        }
        Command::Series {
            n,
            r_max,
            kind,
            output,
            max_n,
        } => {
            if n > max_n {
                return Err(CliError::Usage(format!("n = {n} exceeds --max-n {max_n}")));
            }
            if kind == SeriesKind::F && n == 0 {
                return Err(CliError::Usage("f_n is defined for n >= 1".into()));
            }
            let mut file;
            let sink: &mut dyn Write = match &output {
                Some(p) => {
                    file = io::BufWriter::new(fs::File::create(p)?);
                    &mut file
                }
                None => out,
            };
            let code = run_series(
                &mut ctx,
                n,
                r_max,
                kind,
                format.unwrap_or(Format::Csv),
                sink,
            )?;
            sink.flush()?;
            code
        }
    };
    ctx.cache
        .flush()
        .map_err(|e| CliError::Usage(format!("writing cache: {e}")))?;
    Ok(code)
}

fn run_series(
    ctx: &mut Context,
    n: usize,
    r_max: u64,
    kind: SeriesKind,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let (label, method) = match kind {
        SeriesKind::F => ("f", Method::Unital),
        SeriesKind::Phi => ("phi", Method::Oracle),
    };
    let mut em = Emitter::new(format, vec!["r", label, "N"], out);
    let mut partial: u128 = 0;
    for r in 1..=r_max {
        let res = ctx.cached(n, 0, r, method, |c| match kind {
            SeriesKind::F => enumeration::f_count(n, r, c).map(u128::from),
            SeriesKind::Phi => enumeration::phi(n, r, c).map(u128::from),
        });
        match res {
            Ok(rec) => {
                partial += rec.count;
                em.row(vec![int(r), int(rec.count), int(partial)], None)?;
            }
            Err(e) => {
                em.header()?;
                if format == Format::Json {
                    writeln!(
                        em.out,
                        r#"{{"truncated_at":{r},"error":{}}}"#,
                        serde_json::to_string(&e.to_string()).expect("strings serialize")
                    )?;
                } else {
                    em.note(&format!("truncated at r={r}: {e}"))?;
                }
                return Ok(EXIT_USAGE);
            }
        }
    }
    Ok(EXIT_OK)
}

fn run_verify(
    ctx: &Context,
    n: RangeArg,
    k: RangeArg,
    r: RangeArg,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let started = Instant::now();
    let header = vec![
        "n",
        "k",
        "r",
        "oracle",
        "formula",
        "stirling",
        "phi",
        "witnesses",
        "status",
    ];
    let mut em = Emitter::new(format, header, out);
    let (mut passed, mut failed, mut incomplete) = (0u64, 0u64, 0u64);
    let mut first_failure: Option<VerificationReport> = None;
    for n in n.iter().map(to_usize) {
        for k in k.iter().map(to_usize) {
            for r in r.iter() {
                match enumeration::verify_main_theorem(n, k, r, ctx.bound_multiplier, &ctx.cfg) {
                    Ok(rep) => {
                        let status = match rep.status {
                            Status::Pass => {
                                passed += 1;
                                "pass"
                            }
                            Status::Fail => {
                                failed += 1;
                                if first_failure.is_none() {
                                    first_failure = Some(rep.clone());
                                }
                                "fail"
                            }
                        };
                        let json = serde_json::to_string(&rep).expect("reports serialize");
                        em.row(
                            vec![
                                int(rep.n as u64),
                                int(rep.k as u64),
                                int(rep.r),
                                int(rep.oracle_count),
                                int(rep.formula_count),
                                int(rep.stirling_factor),
                                int(rep.phi_base),
                                int(rep.witnesses_checked as u64),
                                text(status),
                            ],
                            Some(json),
                        )?;
                    }
                    Err(e) => {
                        incomplete += 1;
                        let json = format!(
                            r#"{{"n":{n},"k":{k},"r":{r},"status":"incomplete","error":{}}}"#,
                            serde_json::to_string(&e.to_string()).expect("strings serialize")
                        );
                        let dash = || text("-");
                        em.row(
                            vec![
                                int(n as u64),
                                int(k as u64),
                                int(r),
                                dash(),
                                dash(),
                                dash(),
                                dash(),
                                dash(),
                                text("incomplete"),
                            ],
                            Some(json),
                        )?;
                        writeln!(err, "n={n} k={k} r={r}: {e}")?;
                    }
                }
            }
        }
    }
    let total = passed + failed + incomplete;
    em.note(&format!(
        "cells: {total}  passed: {passed}  failed: {failed}  incomplete: {incomplete}"
    ))?;
    writeln!(
        err,
        "verified {total} cells ({passed} passed, {failed} failed, {incomplete} incomplete) in {:.2}s",
        started.elapsed().as_secs_f64()
    )?;
    if let Some(rep) = first_failure {
        match &rep.counterexample {
            Some(l) => writeln!(
                err,
                "counterexample at n={} k={} r={}: {}",
                rep.n,
                rep.k,
                rep.r,
                serde_json::to_string(l).expect("lattices serialize")
            )?,
            None => writeln!(
                err,
                "count mismatch at n={} k={} r={}: oracle {} vs formula {}",
                rep.n, rep.k, rep.r, rep.oracle_count, rep.formula_count
            )?,
        }
        return Ok(EXIT_VERIFICATION_FAILED);
    }
    Ok(if incomplete > 0 { EXIT_USAGE } else { EXIT_OK })
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run(cli, &mut out, &mut err);
    let _ = out.flush();
    code
}

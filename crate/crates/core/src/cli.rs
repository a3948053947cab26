//! Command-line front end. All per-line commands stream standard input to
//! standard output.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::canonical::{canonicalize, is_canonical, scan_stats};
use crate::census::{lineage, run_census, Census, CensusConfig, CensusRow, Reduction};
use crate::error::{MolrError, Result};
use crate::extension::{extend_tuple, maximality, open_positions, Maximality};
use crate::io::{format_rectangle, format_tuple, parse_tuple_at};
use crate::tuple::{is_normalized, Tuple};
use crate::youden::{classify_tuple, juxtapose, orthogonal_complements, reduced_complements, BalanceReport};

pub const TSV_HEADER: &str =
    "n\tk\tnormalized_total\tnormalized_generated\tclasses\tmaximal\ttrivial_aut\taut_histogram\tnormalized_orbit";

#[derive(Parser, Debug)]
#[command(name = "molr", version, about = "Mutually orthogonal Latin rectangles up to isotopism")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate isotopism classes of k×n triples for k = 2..=kmax.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kmax: usize,
        /// Keep only classes with a non-trivial autotopism group at every level.
        #[arg(long)]
        stepwise: bool,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Abort after generating this many extension triples.
        #[arg(long)]
        budget: Option<u64>,
        /// Canonicalize every extension instead of testing canonicity.
        #[arg(long)]
        full_canonicalize: bool,
        /// Children held in memory per level before spilling to disk.
        #[arg(long, default_value_t = 4_000_000)]
        memory_records: usize,
    },
    /// Replace each input triple by its canonical representative.
    Canon {
        /// Sort descending and drop duplicates.
        #[arg(long)]
        dedup: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Autotopism order, valid transform count and class size of normalized triples.
    Aut,
    /// Validity, normalization, canonicity, maximality and open positions.
    Verify,
    /// Column-intersection balance of every member.
    Youden,
    /// All one-row extensions of each input.
    Extend,
    /// All rectangles orthogonal to every member of each input.
    Complements {
        /// Only complements whose first row is the identity.
        #[arg(long)]
        reduced: bool,
    },
    /// Place the tuples of B to the right of those of A, line by line.
    Juxtapose {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Autotopism orders along the generation chain of every top-level class.
    Lineage {
        #[arg(long)]
        dir: PathBuf,
    },
}

enum Failure {
    Input(MolrError),
    Budget(String),
}

impl From<MolrError> for Failure {
    fn from(e: MolrError) -> Self {
        Failure::Input(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(MolrError::Input(e.to_string()))
    }
}

/// Parses `std::env::args` and runs; returns the process exit status.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("molr: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("molr: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> std::result::Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match command {
        Command::Census {
            n,
            kmax,
            stepwise,
            jobs,
            out: dir,
            budget,
            full_canonicalize,
            memory_records,
        } => {
            let mut config = CensusConfig::new(n, kmax);
            config.mode.stepwise_symmetric = stepwise;
            config.jobs = jobs;
            config.budget = budget;
            config.memory_records = memory_records.max(1);
            if full_canonicalize {
                config.reduction = Reduction::FullCanonicalize;
            }
            let census = run_census(&config)?;
            write_census(&census, &dir)?;
            let tsv = census_tsv(&census.rows());
            out.write_all(tsv.as_bytes())?;
            out.flush()?;
            if let Some(k) = census.exhausted_at {
                return Err(Failure::Budget(format!(
                    "budget of {} extensions exhausted while building k={k}; output covers k < {k} only",
                    budget.unwrap_or(0)
                )));
            }
        }
        Command::Canon { dedup, jobs } => {
            let tuples = read_stdin()?;
            let canon = with_jobs(jobs, || {
                let mut c: Vec<Tuple> = tuples.par_iter().map(canonicalize).collect();
                if dedup {
                    c.par_sort_unstable_by(|a, b| b.cmp(a));
                    c.dedup();
                }
                c
            })?;
            for t in canon {
                writeln!(out, "{t}")?;
            }
        }
        Command::Aut => {
            for t in read_stdin()? {
                let stats = scan_stats(&t)?;
                writeln!(
                    out,
                    "{t}\t{}\t{}\t{}",
                    stats.aut_order,
                    stats.valid_count,
                    stats.valid_count / stats.aut_order
                )?;
            }
        }
        Command::Verify => {
            let mut bad = 0usize;
            for (line_no, line) in stdin_lines()? {
                match parse_tuple_at(&line, line_no) {
                    Ok(t) => writeln!(out, "{}", verify_line(&t))?,
                    Err(e) => {
                        bad += 1;
                        writeln!(out, "{line}\tvalid=false\terror=line {line_no}: {e}")?;
                    }
                }
            }
            out.flush()?;
            if bad > 0 {
                return Err(MolrError::Input(format!("{bad} invalid line(s)")).into());
            }
        }
        Command::Youden => {
            for t in read_stdin()? {
                writeln!(out, "{}", youden_line(&t))?;
            }
        }
        Command::Extend => {
            for t in read_stdin()? {
                for ext in extend_tuple(&t)? {
                    writeln!(out, "{}", ext.append_to(&t))?;
                }
            }
        }
        Command::Complements { reduced } => {
            for (i, t) in read_stdin()?.iter().enumerate() {
                let comps = if reduced {
                    reduced_complements(t)
                } else {
                    orthogonal_complements(t)
                };
                for c in comps {
                    writeln!(out, "{}\t{}", i + 1, format_rectangle(&c))?;
                }
            }
        }
        Command::Juxtapose { a, b } => {
            let left = read_file(&a)?;
            let right = read_file(&b)?;
            if left.len() != right.len() {
                return Err(MolrError::Input(format!(
                    "{} has {} tuples but {} has {}",
                    a.display(),
                    left.len(),
                    b.display(),
                    right.len()
                ))
                .into());
            }
            for (x, y) in left.iter().zip(&right) {
                writeln!(out, "{}", juxtapose(x, y)?)?;
            }
        }
        Command::Lineage { dir } => {
            let census = read_census_dir(&dir)?;
            for chain in lineage(&census)? {
                let orders: Vec<String> = chain.orders.iter().map(u64::to_string).collect();
                writeln!(out, "{}\t{}\t{}", chain.case, orders.join(","), chain.top)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| MolrError::Input(e.to_string())),
    }
}

/// Non-blank, non-comment lines of standard input with 1-based line numbers.
fn stdin_lines() -> Result<Vec<(usize, String)>> {
    let mut lines = Vec::new();
    for (i, line) in io::stdin().lock().lines().enumerate() {
        let line = line.map_err(|e| MolrError::Input(e.to_string()))?;
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            lines.push((i + 1, trimmed.to_string()));
        }
    }
    Ok(lines)
}

fn parse_lines(lines: Vec<(usize, String)>, origin: &str) -> Result<Vec<Tuple>> {
    lines
        .into_iter()
        .map(|(no, line)| {
            parse_tuple_at(&line, no).map_err(|e| match e {
                e @ MolrError::Syntax { .. } => MolrError::Input(format!("{origin}: {e}")),
                e => MolrError::Input(format!("{origin}: line {no}: {e}")),
            })
        })
        .collect()
}

fn read_stdin() -> Result<Vec<Tuple>> {
    parse_lines(stdin_lines()?, "<stdin>")
}

fn read_file(path: &Path) -> Result<Vec<Tuple>> {
    let text = fs::read_to_string(path)
        .map_err(|e| MolrError::Input(format!("{}: {e}", path.display())))?;
    let lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    parse_lines(lines, &path.display().to_string())
}

pub fn reps_file_name(k: usize, n: usize) -> String {
    format!("reps_k{k}n{n}.molr")
}

fn write_census(census: &Census, dir: &Path) -> Result<()> {
    let io_err = |e: io::Error| MolrError::Input(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io_err)?;
    for level in &census.levels {
        let mut text = String::new();
        for class in &level.classes {
            text.push_str(&format_tuple(&class.record.triple));
            text.push('\n');
        }
        fs::write(dir.join(reps_file_name(level.k, census.n)), text).map_err(io_err)?;
    }
    fs::write(dir.join("census.tsv"), census_tsv(&census.rows())).map_err(io_err)?;
    let marker = dir.join("INCOMPLETE");
    match census.exhausted_at {
        Some(k) => fs::write(
            &marker,
            format!("generation budget exhausted while building k={k}\n"),
        )
        .map_err(io_err)?,
        None if marker.exists() => fs::remove_file(&marker).map_err(io_err)?,
        None => {}
    }
    Ok(())
}

/// Census table with a header line; one row per k.
pub fn census_tsv(rows: &[CensusRow]) -> String {
    let mut s = String::from(TSV_HEADER);
    s.push('\n');
    for r in rows {
        let maximal = r.maximal.map_or("-".to_string(), |m| m.to_string());
        let hist: Vec<String> = r.aut_histogram.iter().map(|(o, c)| format!("{o}:{c}")).collect();
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.n,
            r.k,
            r.normalized_total,
            r.normalized_generated,
            r.classes,
            maximal,
            r.trivial_aut,
            hist.join(","),
            r.normalized_orbit
        );
    }
    s
}

/// Reads `reps_k{k}n{n}.molr` for k = 2, 3, ... from `dir`.
pub fn read_census_dir(dir: &Path) -> Result<Census> {
    let mut found: Vec<(usize, usize, PathBuf)> = Vec::new();
    let entries = fs::read_dir(dir).map_err(|e| MolrError::Input(format!("{}: {e}", dir.display())))?;
    for entry in entries {
        let path = entry.map_err(|e| MolrError::Input(e.to_string()))?.path();
        let Some(name) = path.file_name().and_then(|s| s.to_str()) else {
            continue;
        };
        if let Some((k, n)) = parse_reps_name(name) {
            found.push((k, n, path));
        }
    }
    found.sort();
    let n = match found.first() {
        Some(&(_, n, _)) => n,
        None => return Err(MolrError::Input(format!("no representative files in {}", dir.display()))),
    };
    if found.iter().any(|f| f.1 != n) {
        return Err(MolrError::Input("representative files for several orders".into()));
    }
    let mut reps = Vec::new();
    for (i, (k, _, path)) in found.iter().enumerate() {
        if *k != i + 2 {
            return Err(MolrError::Input(format!("missing {}", reps_file_name(i + 2, n))));
        }
        reps.push(read_file(path)?);
    }
    Census::from_representatives(n, reps)
}

fn parse_reps_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix("reps_k")?.strip_suffix(".molr")?;
    let (k, n) = rest.split_once('n')?;
    Some((k.parse().ok()?, n.parse().ok()?))
}

fn verify_line(t: &Tuple) -> String {
    let normalized = is_normalized(t);
    let canonical = normalized && is_canonical(t);
    let m = maximality(t);
    let open = match open_positions(t) {
        Ok(cols) => {
            let cols: Vec<String> = cols.iter().map(usize::to_string).collect();
            format!("{{{}}}", cols.join(","))
        }
        Err(_) => "-".to_string(),
    };
    let m_name = match m {
        Maximality::Extendable => "extendable",
        Maximality::Maximal => "maximal",
        Maximality::Complete => "complete",
    };
    format!(
        "{t}\tvalid=true\tnormalized={normalized}\tcanonical={canonical}\tmaximal={}\tstatus={m_name}\topen_positions={open}",
        m == Maximality::Maximal
    )
}

fn opt(x: Option<u32>) -> String {
    x.map_or("-".to_string(), |v| v.to_string())
}

fn youden_line(t: &Tuple) -> String {
    let c = classify_tuple(t);
    let mut s = format!("{t}");
    if c.applicable {
        let params: Vec<String> = c.params.iter().map(|p| opt(*p)).collect();
        let _ = write!(
            s,
            "\tparams=({})\tpartially_balanced={}\tyouden={}",
            params.join(","),
            c.all_partially_balanced,
            c.all_youden
        );
    } else {
        s.push_str("\tparams=n/a\tpartially_balanced=n/a\tyouden=n/a");
    }
    for (i, m) in c.members.iter().enumerate() {
        let BalanceReport {
            lambda_cc,
            lambda_cc_p,
            min_intersection,
            max_intersection,
            ..
        } = *m;
        let _ = write!(
            s,
            "\tm{i}=min:{min_intersection},max:{max_intersection},lambda_cc:{},lambda_cc_p:{}",
            opt(lambda_cc),
            opt(lambda_cc_p)
        );
    }
    s
}

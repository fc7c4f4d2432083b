//! Command-line front end for the `moykr` binary.

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moykr_core::invariant::{self, compute_closed_traced, oracle, BraidSpec, InvariantResult};
use moykr_core::simplify::{verify_catalog, Trace};
use moykr_core::LaurentPoly;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "moykr",
    version,
    about = "Khovanov-Rozansky polynomials of 2-strand braid links via MOY graph complexes"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the pipeline for one braid.
    Compute(ComputeArgs),
    /// Evaluate the closed-form polynomial for one braid.
    Oracle(OracleArgs),
    /// Run the pipeline over ranges of levels and crossings.
    Sweep(SweepArgs),
    /// Check the relation catalog and the open normal forms.
    Selftest,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    /// Level n (at least 2).
    #[arg(long, env = "MOYKR_N", default_value_t = 2, value_parser = parse_level)]
    pub n: usize,
    /// Number of crossings.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// Also print the Jones polynomial (t = -1).
    #[arg(long)]
    pub jones: bool,
    /// Compare against the closed form; exit 1 on mismatch.
    #[arg(long)]
    pub check: bool,
    /// Print the simplification log to stderr.
    #[arg(long)]
    pub trace: bool,
    /// Append one JSON line per result to this file.
    #[arg(long)]
    pub results: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, env = "MOYKR_N", default_value_t = 2, value_parser = parse_level)]
    pub n: usize,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[arg(long)]
    pub jones: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Levels, e.g. `2..5` (inclusive) or `3`.
    #[arg(long, default_value = "2..5", value_parser = parse_level_range)]
    pub n_range: RangeInclusive<usize>,
    /// Crossings, e.g. `1..10` (inclusive).
    #[arg(long, default_value = "1..10", value_parser = parse_crossing_range)]
    pub k_range: RangeInclusive<usize>,
    #[arg(long)]
    pub jones: bool,
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub results: Option<PathBuf>,
}

fn parse_level(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 2 {
        return Err(format!("level must be at least 2, got {n}"));
    }
    Ok(n)
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let bound = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (bound(a)?, bound(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = bound(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok(lo..=hi)
}

fn parse_level_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let r = parse_range(s)?;
    if *r.start() < 2 {
        return Err("levels start at 2".into());
    }
    Ok(r)
}

fn parse_crossing_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let r = parse_range(s)?;
    if *r.start() < 1 {
        return Err("crossings start at 1".into());
    }
    Ok(r)
}

/// One result in the JSON output and the results file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    pub k: usize,
    /// `[q exponent, t exponent, coefficient]` triples.
    pub poincare: LaurentPoly,
    pub poincare_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jones: Option<LaurentPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches_oracle: Option<bool>,
    /// Sorted q-shifts of the reduced complex, from degree `min_degree` up.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spaces: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub min_degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

impl Record {
    fn from_result(r: &InvariantResult, jones: bool, check: bool, trace: bool) -> Self {
        Record {
            n: r.spec.n,
            k: r.spec.crossings,
            poincare: r.poincare.clone(),
            poincare_text: r.poincare.to_string(),
            jones: jones.then(|| r.jones.clone()),
            matches_oracle: check.then(|| r.poincare == oracle(r.spec)),
            spaces: Some(r.reduced.spaces.iter().map(|v| v.shifts.clone()).collect()),
            min_degree: r.reduced.min_degree,
            trace: trace.then(|| r.trace.iter().map(|e| e.to_string()).collect()),
        }
    }

    fn text(&self) -> String {
        let mut s = self.poincare_text.clone();
        if let Some(j) = &self.jones {
            s.push_str(&format!("\njones: {j}"));
        }
        if let Some(ok) = self.matches_oracle {
            s.push_str(if ok { "\noracle: match" } else { "\noracle: MISMATCH" });
        }
        s
    }
}

fn append_results(path: &PathBuf, records: &[Record]) -> io::Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    for r in records {
        writeln!(f, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}

/// Exit status: 0 on success, 1 on a mismatch or pipeline failure.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    match &cli.command {
        Command::Compute(a) => compute(cli.format, a, out, err),
        Command::Oracle(a) => {
            let spec = BraidSpec::new(a.n, a.k as usize).expect("validated by the parser");
            let p = oracle(spec);
            let jones = a.jones.then(|| invariant::jones_formula(spec));
            match cli.format {
                Format::Text => {
                    writeln!(out, "{p}")?;
                    if let Some(j) = jones {
                        writeln!(out, "jones: {j}")?;
                    }
                }
                Format::Json => {
                    let rec = Record {
                        n: a.n,
                        k: a.k as usize,
                        poincare_text: p.to_string(),
                        poincare: p,
                        jones,
                        matches_oracle: None,
                        spaces: None,
                        min_degree: 0,
                        trace: None,
                    };
                    writeln!(out, "{}", serde_json::to_string(&rec)?)?;
                }
            }
            Ok(0)
        }
        Command::Sweep(a) => sweep(cli.format, a, out, err),
        Command::Selftest => selftest(cli.format, out),
    }
}

fn compute(format: Format, a: &ComputeArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let spec = BraidSpec::new(a.n, a.k as usize).expect("validated by the parser");
    let mut trace = Trace::new();
    let r = match compute_closed_traced(spec, &mut trace) {
        Ok(r) => r,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(1);
        }
    };
    if a.trace {
        for ev in &r.trace {
            writeln!(err, "{ev}")?;
        }
    }
    let rec = Record::from_result(&r, a.jones, a.check, a.trace && format == Format::Json);
    match format {
        Format::Text => writeln!(out, "{}", rec.text())?,
        Format::Json => writeln!(out, "{}", serde_json::to_string(&rec)?)?,
    }
    if let Some(path) = &a.results {
        append_results(path, std::slice::from_ref(&rec))?;
    }
    Ok(if rec.matches_oracle == Some(false) { 1 } else { 0 })
}

fn sweep(format: Format, a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let specs: Vec<BraidSpec> = a
        .n_range
        .clone()
        .flat_map(|n| a.k_range.clone().map(move |k| BraidSpec::new(n, k).expect("validated by the parser")))
        .collect();
    let results: Vec<_> = specs.par_iter().map(|&s| (s, invariant::compute_closed(s))).collect();
    let mut status = 0;
    let mut records = Vec::new();
    if format == Format::Text {
        writeln!(out, "{:>3} {:>3}  poincare", "n", "k")?;
    }
    for (spec, r) in results {
        let rec = match r {
            Ok(r) => Record::from_result(&r, a.jones, a.check, false),
            Err(e) => {
                writeln!(err, "n={} k={}: {e}", spec.n, spec.crossings)?;
                status = 1;
                continue;
            }
        };
        if rec.matches_oracle == Some(false) {
            status = 1;
        }
        match format {
            Format::Text => {
                let mut line = format!("{:>3} {:>3}  {}", rec.n, rec.k, rec.poincare_text);
                if let Some(j) = &rec.jones {
                    line.push_str(&format!("  | jones {j}"));
                }
                if let Some(ok) = rec.matches_oracle {
                    line.push_str(if ok { "  ok" } else { "  MISMATCH" });
                }
                writeln!(out, "{line}")?;
            }
            Format::Json => writeln!(out, "{}", serde_json::to_string(&rec)?)?,
        }
        records.push(rec);
    }
    if let Some(path) = &a.results {
        append_results(path, &records)?;
    }
    Ok(status)
}

#[derive(Serialize)]
struct SelftestLine {
    check: String,
    passed: bool,
    assumed: bool,
    detail: String,
}

fn selftest(format: Format, out: &mut dyn Write) -> io::Result<i32> {
    let report = verify_catalog();
    let mut lines: Vec<SelftestLine> = report
        .checks
        .iter()
        .map(|c| SelftestLine { check: c.tag.clone(), passed: c.passed, assumed: c.assumed, detail: c.detail.clone() })
        .collect();
    for k in 1..=6 {
        let spec = BraidSpec::new(2, k).expect("valid");
        let (passed, detail) = match (invariant::compute_open(spec), invariant::open_normal_form(spec)) {
            (Ok(got), Ok(want)) => (got == want, format!("{} degrees", got.objects().len())),
            (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
        };
        lines.push(SelftestLine { check: format!("open normal form k={k}"), passed, assumed: false, detail });
    }
    let ok = lines.iter().all(|l| l.passed);
    for l in &lines {
        match format {
            Format::Text => {
                let mark = if l.passed { "ok  " } else { "FAIL" };
                let note = if l.assumed { " (assumed)" } else { "" };
                writeln!(out, "{mark} {}{note}: {}", l.check, l.detail)?;
            }
            Format::Json => writeln!(out, "{}", serde_json::to_string(l)?)?,
        }
    }
    if format == Format::Text {
        let passed = lines.iter().filter(|l| l.passed).count();
        writeln!(out, "{passed}/{} checks passed", lines.len())?;
    }
    Ok(if ok { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let cli = Cli::try_parse_from(std::iter::once("moykr").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        let code = run(&cli, &mut out, &mut io::sink()).unwrap();
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..5").unwrap(), 2..=5);
        assert_eq!(parse_range("2..=5").unwrap(), 2..=5);
        assert_eq!(parse_range("4").unwrap(), 4..=4);
        assert!(parse_range("5..2").is_err());
        assert!(parse_level_range("1..3").is_err());
        assert!(parse_crossing_range("0..3").is_err());
    }

    #[test]
    fn rejects_level_one() {
        assert!(Cli::try_parse_from(["moykr", "compute", "--n", "1", "--k", "2"]).is_err());
        assert!(Cli::try_parse_from(["moykr", "compute", "--n", "2", "--k", "0"]).is_err());
    }

    #[test]
    fn compute_text() {
        assert_eq!(run_args(&["compute", "--n", "2", "--k", "3"]), (0, "q + q^3 + t^2*q^5 + t^3*q^9\n".into()));
    }

    #[test]
    fn oracle_json_round_trips() {
        let (code, out) = run_args(&["--format", "json", "oracle", "--n", "3", "--k", "2", "--jones"]);
        assert_eq!(code, 0);
        let rec: Record = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(serde_json::to_string(&rec).unwrap(), out.trim());
        assert_eq!(rec.poincare, oracle(BraidSpec::new(3, 2).unwrap()));
    }
}

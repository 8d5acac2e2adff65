use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use plumbing_core::families::{self, ClaimReport, FixtureSet, XPrimeRow};
use plumbing_core::format::{self, GraphJson};
use plumbing_core::par::Mode;
use plumbing_core::{calculus, seifert, FamilySpec, FormSummary, MoveRecord, PlumbingGraph};
use serde::Serialize;

/// Plumbing graph toolkit: intersection forms, moves, Seifert data, families.
#[derive(Parser, Debug)]
#[command(name = "plumbtool", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format. Defaults to csv for `scan` and json elsewhere.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Determinant and form summary of a graph file (`-` for stdin).
    Det { file: PathBuf },
    /// Signature and form summary.
    Sig { file: PathBuf },
    /// Homology-sphere check and form summary.
    IsHs { file: PathBuf },
    /// Reduce to normal form with blow-downs and 0-chain absorptions.
    Normalize { file: PathBuf },
    /// Compare the boundaries of two graphs.
    Compare { first: PathBuf, second: PathBuf },
    /// Generate a family member or a Brieskorn plumbing:
    /// `gen RamanujamW 3`, `gen brieskorn 2 3 7`.
    Gen {
        family: String,
        #[arg(allow_negative_numbers = true)]
        params: Vec<i64>,
    },
    /// Central-weight obstruction verdict for a star-shaped graph.
    Obstruct { file: PathBuf },
    /// Check the family claims for parameters up to the bound.
    Verify {
        #[arg(long, default_value_t = 8)]
        bound: u32,
    },
    /// Parameter scans.
    Scan {
        #[command(subcommand)]
        scan: Scan,
    },
    /// Seifert invariants of a star-shaped graph.
    SeifertData { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum Scan {
    /// det and homology-sphere verdict of X'(a, b) over a rectangle.
    Xprime {
        #[arg(long, value_parser = parse_range)]
        a: (i64, i64),
        #[arg(long, value_parser = parse_range)]
        b: (i64, i64),
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad bound `{lo}`"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad bound `{hi}`"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut out = Vec::new();
    let status = match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<ClaimsFailedError>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if io::stdout().write_all(&out).is_err() {
        return ExitCode::from(2);
    }
    status
}

/// A failed claim check: reported, then exit 1.
#[derive(Debug)]
struct ClaimsFailedError;

impl std::fmt::Display for ClaimsFailedError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("one or more claims failed")
    }
}

impl std::error::Error for ClaimsFailedError {}

fn read_graph(path: &Path) -> Result<PlumbingGraph> {
    let src = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    format::parse_graph(&src).with_context(|| format!("parsing {}", path.display()))
}

fn fixtures() -> Result<FixtureSet> {
    match std::env::var_os("PLUMBTOOL_FIXTURES") {
        Some(dir) => FixtureSet::from_dir(Path::new(&dir)).map_err(|e| anyhow!(e)),
        None => Ok(FixtureSet::builtin()),
    }
}

fn json_line<T: Serialize>(out: &mut Vec<u8>, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.push(b'\n');
    Ok(())
}

fn csv_line(out: &mut Vec<u8>, fields: &[String]) {
    out.extend_from_slice(fields.join(",").as_bytes());
    out.push(b'\n');
}

fn write_graph(out: &mut Vec<u8>, g: &PlumbingGraph, fmt: Format) -> Result<()> {
    match fmt {
        Format::Json => json_line(out, &GraphJson::from_graph(g)),
        Format::Text => {
            out.extend_from_slice(format::to_text(g).as_bytes());
            Ok(())
        }
        Format::Csv => bail!("csv output is not available for graphs"),
    }
}

fn write_summary(out: &mut Vec<u8>, s: &FormSummary, fmt: Format) -> Result<()> {
    let [p, m, z] = s.signature.as_array();
    match fmt {
        Format::Json => json_line(out, s)?,
        Format::Csv => {
            csv_line(
                out,
                &[
                    "det",
                    "n_plus",
                    "n_minus",
                    "n_zero",
                    "unimodular",
                    "negative_definite",
                    "homology_sphere",
                ]
                .map(String::from),
            );
            csv_line(
                out,
                &[
                    s.det.to_string(),
                    p.to_string(),
                    m.to_string(),
                    z.to_string(),
                    s.unimodular.to_string(),
                    s.negative_definite.to_string(),
                    s.homology_sphere.to_string(),
                ],
            );
        }
        Format::Text => {
            let text = format!(
                "det: {}\nsignature: {p} {m} {z}\nunimodular: {}\nnegative_definite: {}\nhomology_sphere: {}\n",
                s.det, s.unimodular, s.negative_definite, s.homology_sphere
            );
            out.extend_from_slice(text.as_bytes());
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Normalized<'a> {
    graph: GraphJson,
    moves: &'a [MoveRecord],
    reached_fixed_point: bool,
}

#[derive(Serialize)]
struct VerdictOut<T: Serialize> {
    verdict: T,
}

fn run(cli: &Cli, out: &mut Vec<u8>) -> Result<()> {
    let fmt = cli.format.unwrap_or(match cli.command {
        Command::Scan { .. } => Format::Csv,
        _ => Format::Json,
    });
    let no_csv = |what: &str| -> Result<()> {
        if fmt == Format::Csv {
            bail!("csv output is not available for `{what}`")
        }
        Ok(())
    };
    match &cli.command {
        Command::Det { file } | Command::Sig { file } | Command::IsHs { file } => {
            let g = read_graph(file)?;
            write_summary(out, &FormSummary::of(&g), fmt)?;
        }
        Command::Normalize { file } => {
            no_csv("normalize")?;
            let g = read_graph(file)?;
            let report = calculus::reduce_to_normal_form(&g);
            match fmt {
                Format::Text => write_graph(out, &report.final_graph, fmt)?,
                _ => json_line(
                    out,
                    &Normalized {
                        graph: GraphJson::from_graph(&report.final_graph),
                        moves: &report.moves,
                        reached_fixed_point: report.reached_fixed_point,
                    },
                )?,
            }
        }
        Command::Compare { first, second } => {
            no_csv("compare")?;
            let verdict = calculus::same_boundary(&read_graph(first)?, &read_graph(second)?);
            match fmt {
                Format::Text => out.extend_from_slice(format!("{verdict:?}\n").as_bytes()),
                _ => json_line(out, &VerdictOut { verdict })?,
            }
        }
        Command::Gen { family, params } => {
            let g = if family.eq_ignore_ascii_case("brieskorn") {
                let [a1, a2, a3] = params[..] else {
                    bail!("gen brieskorn takes three exponents");
                };
                let exps: Vec<u64> = [a1, a2, a3]
                    .iter()
                    .map(|&x| u64::try_from(x).map_err(|_| anyhow!("exponents must be positive")))
                    .collect::<Result<_>>()?;
                seifert::brieskorn_plumbing(exps[0], exps[1], exps[2])?
            } else {
                let family: families::Family = family.parse()?;
                fixtures()?.generate(&FamilySpec::new(family, params))?
            };
            write_graph(out, &g, fmt)?;
        }
        Command::Obstruct { file } => {
            no_csv("obstruct")?;
            let verdict = seifert::central_weight_obstruction(&read_graph(file)?);
            match fmt {
                Format::Text => out.extend_from_slice(format!("{verdict:?}\n").as_bytes()),
                _ => json_line(out, &VerdictOut { verdict })?,
            }
        }
        Command::SeifertData { file } => {
            no_csv("seifert-data")?;
            let data = seifert::seifert_data_from_star(&read_graph(file)?)?;
            match fmt {
                Format::Text => {
                    let arms: Vec<String> = data
                        .arms
                        .iter()
                        .map(|(a, b)| format!("({a},{b})"))
                        .collect();
                    let text = format!(
                        "central_weight: {}\narms: {}\neuler: {}\n",
                        data.central_weight,
                        arms.join(" "),
                        data.euler
                    );
                    out.extend_from_slice(text.as_bytes());
                }
                _ => json_line(out, &data)?,
            }
        }
        Command::Verify { bound } => {
            if *bound == 0 {
                bail!("--bound must be at least 1");
            }
            let reports = families::verify_claims_with(&fixtures()?, *bound, Mode::Parallel);
            write_reports(out, &reports, fmt)?;
            if reports.iter().any(|r| !r.pass) {
                return Err(ClaimsFailedError.into());
            }
        }
        Command::Scan {
            scan: Scan::Xprime { a, b },
        } => {
            let rows = families::xprime_scan(&fixtures()?, a.0..=a.1, b.0..=b.1, Mode::Parallel)?;
            write_rows(out, &rows, fmt)?;
        }
    }
    Ok(())
}

fn write_reports(out: &mut Vec<u8>, reports: &[ClaimReport], fmt: Format) -> Result<()> {
    let witness = |r: &ClaimReport| {
        r.witness
            .as_ref()
            .map(|w| w.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
            .unwrap_or_default()
    };
    match fmt {
        Format::Json => json_line(out, &reports)?,
        Format::Csv => {
            csv_line(
                out,
                &["claim_id", "range", "pass", "witness"].map(String::from),
            );
            for r in reports {
                csv_line(
                    out,
                    &[
                        r.claim_id.clone(),
                        format!("\"{}\"", r.range),
                        r.pass.to_string(),
                        witness(r),
                    ],
                );
            }
        }
        Format::Text => {
            for r in reports {
                let status = if r.pass { "PASS" } else { "FAIL" };
                let mut line = format!("{} {status} {}", r.claim_id, r.range);
                if !r.pass {
                    line.push_str(&format!(" witness: {}", witness(r)));
                }
                if let Some(note) = &r.note {
                    line.push_str(&format!(" ({note})"));
                }
                line.push('\n');
                out.extend_from_slice(line.as_bytes());
            }
        }
    }
    Ok(())
}

fn write_rows(out: &mut Vec<u8>, rows: &[XPrimeRow], fmt: Format) -> Result<()> {
    match fmt {
        Format::Json => json_line(out, &rows)?,
        Format::Csv | Format::Text => {
            let sep = if fmt == Format::Csv { "," } else { " " };
            out.extend_from_slice(["a", "b", "det", "is_hs"].join(sep).as_bytes());
            out.push(b'\n');
            for r in rows {
                let line = [
                    r.a.to_string(),
                    r.b.to_string(),
                    r.det.to_string(),
                    r.is_hs.to_string(),
                ];
                out.extend_from_slice(line.join(sep).as_bytes());
                out.push(b'\n');
            }
        }
    }
    Ok(())
}

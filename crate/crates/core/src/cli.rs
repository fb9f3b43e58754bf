//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal-consistency
//! failure (including a failed family cross-check).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channel::QubitChannel;
use crate::error::{Error, Result};
use crate::families::{cross_check, FamilyKind};
use crate::nonlocality::classify;
use crate::parallel::{thread_cap_from_env, with_threads, Execution};
use crate::sweep::{discrepancy_report, read_csv, write_csv, write_json, Sweep, SweepMode, SweepRequest, SweepRow};

#[derive(Parser, Debug)]
#[command(name = "nonloc", version, about = "Nonlocality generation by qubit channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a channel given as JSON {"lambda":[..],"t":[..]}
    Check {
        /// Input file, or `-` for stdin
        #[arg(default_value = "-")]
        input: String,
    },
    /// Print the 4x4 Choi matrix of a channel
    Choi {
        #[arg(default_value = "-")]
        input: String,
        /// Emit [[re, im], ..] rows as JSON
        #[arg(long)]
        json: bool,
    },
    /// Classify every node of a parameter grid
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
        /// Output file (stdout if omitted)
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compare a family's closed-form generating range with CH1/CH2 on a grid
    Family {
        /// Family name, or `all`
        kind: String,
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[arg(long)]
        json: bool,
    },
    /// Summarize where the CH1/CH2 verdict and direct CHSH violation disagree
    Report {
        /// Read rows from a sweep CSV instead of sweeping
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
        /// Number of example rows to include
        #[arg(long, default_value_t = 10)]
        examples: usize,
    },
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value = "cube3d", value_parser = parse_mode)]
    mode: SweepMode,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t3: f64,
    /// Points per axis
    #[arg(long, default_value_t = 101)]
    res: usize,
    /// Axis bounds `lo:hi`, one per axis
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    bounds: Vec<[f64; 2]>,
    /// Family for `family_1d`
    #[arg(long, value_parser = parse_family)]
    family: Option<FamilyKind>,
    /// Thermal parameter for gad / shifted_depolarizing
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    p: f64,
    /// Axis (1-3) for linear / dephasing
    #[arg(long, default_value_t = 3)]
    axis: u8,
    /// Run on one thread
    #[arg(long)]
    sequential: bool,
}

impl GridArgs {
    fn request(&self) -> SweepRequest {
        SweepRequest {
            mode: self.mode,
            t3: self.t3,
            resolution: self.res,
            bounds: self.bounds.clone(),
            family: self.family,
            p: self.p,
            axis: self.axis,
        }
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn rows(&self) -> Result<Vec<SweepRow>> {
        let sweep = Sweep::new(&self.request())?;
        let exec = self.execution();
        with_threads(thread_cap_from_env()?, || sweep.rows(exec))?
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_mode(s: &str) -> std::result::Result<SweepMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> std::result::Result<FamilyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_bounds(s: &str) -> std::result::Result<[f64; 2], String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}"));
    Ok([num(lo)?, num(hi)?])
}

fn read_input(input: &str) -> Result<String> {
    let mut text = String::new();
    if input == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        File::open(input)?.read_to_string(&mut text)?;
    }
    Ok(text)
}

fn read_channel(input: &str) -> Result<QubitChannel> {
    Ok(serde_json::from_str(&read_input(input)?)?)
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn fmt_complex(z: num_complex::Complex64) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    format!("{:>8.5}{}{:.5}i", z.re, if im < 0.0 { '-' } else { '+' }, im.abs())
}

fn cmd_choi(input: &str, json: bool, out: &mut dyn Write) -> Result<()> {
    let choi = read_channel(input)?.choi();
    if json {
        let rows: Vec<Vec<[f64; 2]>> = choi
            .entries()
            .iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        return print_json(out, &rows);
    }
    for row in choi.entries() {
        let cells: Vec<String> = row.iter().map(|&z| fmt_complex(z)).collect();
        writeln!(out, "{}", cells.join("  "))?;
    }
    Ok(())
}

fn cmd_sweep(grid: &GridArgs, out_path: Option<&PathBuf>, format: Format, out: &mut dyn Write) -> Result<()> {
    let rows = grid.rows()?;
    let write = |w: &mut dyn Write| match format {
        Format::Csv => write_csv(&rows, w),
        Format::Json => write_json(&rows, w),
    };
    match out_path {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write(&mut file)?;
            file.flush()?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
        }
        None => {
            write(out)?;
            if format == Format::Json {
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn cmd_family(kind: &str, grid: usize, json: bool, out: &mut dyn Write) -> Result<()> {
    let kinds = if kind.eq_ignore_ascii_case("all") {
        FamilyKind::ALL.to_vec()
    } else {
        vec![kind.parse()?]
    };
    let checks = kinds
        .into_iter()
        .map(|k| cross_check(k, grid))
        .collect::<Result<Vec<_>>>()?;
    if json {
        print_json(out, &checks)?;
    } else {
        for c in &checks {
            writeln!(out, "family: {}", c.kind)?;
            writeln!(out, "range: {}", c.range)?;
            writeln!(
                out,
                "cross-check: {} ({} points, {} generating, {} mismatches, {} cp failures, {} p-dependent)",
                if c.passed() { "PASS" } else { "FAIL" },
                c.points,
                c.generating,
                c.mismatches.len(),
                c.cp_failures.len(),
                c.p_dependent.len()
            )?;
        }
    }
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed()).map(|c| c.kind.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::InternalConsistency(format!("cross-check failed for {}", failed.join(", "))))
    }
}

fn cmd_report(input: Option<&PathBuf>, grid: &GridArgs, examples: usize, out: &mut dyn Write) -> Result<()> {
    let rows = match input {
        Some(path) => read_csv(BufReader::new(File::open(path)?))?,
        None => grid.rows()?,
    };
    print_json(out, &discrepancy_report(&rows, examples)?)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Check { input } => print_json(out, &classify(&read_channel(&input)?)?),
        Command::Choi { input, json } => cmd_choi(&input, json, out),
        Command::Sweep { grid, out: path, format } => cmd_sweep(&grid, path.as_ref(), format, out),
        Command::Family { kind, grid, json } => cmd_family(&kind, grid, json, out),
        Command::Report { input, grid, examples } => cmd_report(input.as_ref(), &grid, examples, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out).and_then(|()| out.flush().map_err(Error::from)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("nonloc").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run_args(&[]).0, 1);
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["sweep", "--mode", "cube9d"]).0, 1);
        assert_eq!(run_args(&["sweep", "--bounds", "0,1"]).0, 1);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn data_errors_exit_2() {
        let (code, _, err) = run_args(&["check", "/nonexistent/channel.json"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error:"));
        assert_eq!(run_args(&["sweep", "--res", "1"]).0, 2);
        assert_eq!(run_args(&["family", "amplitude"]).0, 2);
    }

    #[test]
    fn family_reports_range() {
        let (code, out, _) = run_args(&["family", "gad", "--grid", "21"]);
        assert_eq!(code, 0);
        assert!(out.contains("range: |λ| < 1"));
        assert!(out.contains("cross-check: PASS"));
    }

    #[test]
    fn sweep_to_stdout() {
        let (code, out, _) = run_args(&["sweep", "--res", "2", "--t3=-0.5", "--sequential"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 9);
        assert!(out.lines().nth(1).unwrap().contains("-5.0000000000000000e-1"));
    }

    #[test]
    fn bounds_parsing() {
        assert_eq!(parse_bounds("-0.5:1").unwrap(), [-0.5, 1.0]);
        assert!(parse_bounds("x:1").is_err());
    }
}

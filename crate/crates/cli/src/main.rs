use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nambu_core::harness::{
    eval_bracket, reconstruct, BracketOutcome, PbTable, PointSource, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use nambu_core::systems::BUILTIN_NAMES;
use nambu_core::{builtin, run_suite, Selector, SuiteOptions, Tolerance};
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "nambu", version, about = "Verify canonical Nambu bracket identities on sampled phase-space points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every registered check for the selected systems.
    Verify {
        /// Built-in name, system file, or `all`.
        #[arg(long, default_value = "all")]
        system: String,
        #[arg(long)]
        constraint_set: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        rtol: Option<f64>,
        #[arg(long)]
        atol: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Parameter override, `name=value`. Repeatable.
        #[arg(long = "param", value_parser = parse_assignment)]
        params: Vec<(String, f64)>,
    },
    /// Evaluate one Nambu bracket at one point.
    Bracket {
        #[arg(long)]
        system: String,
        /// Comma-separated coordinates, `f:<coordinate>`, or constant names.
        #[arg(long, value_delimiter = ',', required = true)]
        args: Vec<String>,
        #[arg(long, conflicts_with = "at")]
        seed: Option<u64>,
        /// Explicit point, `q1=...,p1=...,...`.
        #[arg(long, value_delimiter = ',', value_parser = parse_assignment)]
        at: Option<Vec<(String, f64)>>,
        #[arg(long = "param", value_parser = parse_assignment)]
        params: Vec<(String, f64)>,
    },
    /// Integrate a Poisson-bracket table into a constraint functional.
    Reconstruct {
        #[arg(long)]
        system: String,
        #[arg(long)]
        table: PathBuf,
        /// Point where the result vanishes, `name=value`. Unnamed constants sit at 0.
        #[arg(long = "gauge", value_parser = parse_assignment)]
        gauge: Vec<(String, f64)>,
    },
    /// List the built-in systems.
    List,
}

fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", value.trim()))?;
    Ok((name.trim().to_string(), v))
}

fn complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:e}", z.re)
    } else {
        format!("{:e}{:+e}i", z.re, z.im)
    }
}

fn print_bracket(out: &BracketOutcome) {
    let point: Vec<String> = out.point.iter().map(|(n, v)| format!("{n}={v}")).collect();
    println!("point: {}", point.join(","));
    println!("{{{}}} = {}", out.args.join(","), complex(out.value));
    if let Some(fdot) = out.time_derivative {
        println!("df/dt = {}", complex(fdot));
    }
    for p in &out.predictions {
        println!(
            "{}: N = {}, N*df/dt = {}, residual = {:e} [{}]",
            p.label,
            complex(p.normalization),
            complex(p.value),
            p.residual,
            p.provenance.label()
        );
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match cli.command {
        Command::Verify {
            system,
            constraint_set,
            samples,
            seed,
            rtol,
            atol,
            format,
            params,
        } => {
            let selector = Selector::parse(&system).map_err(|e| err(&e))?;
            let mut tolerance = Tolerance::default();
            if let Some(r) = rtol {
                tolerance.rtol = r;
            }
            if let Some(a) = atol {
                tolerance.atol = a;
            }
            let opts = SuiteOptions {
                seed,
                samples,
                tolerance,
                params,
                constraint_set,
            };
            let report = run_suite(&selector, &opts).map_err(|e| err(&e))?;
            match format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => print!("{}", report.to_json()),
            }
            Ok(report.passed())
        }
        Command::Bracket {
            system,
            args,
            seed,
            at,
            params,
        } => {
            let sys = Selector::parse(&system).and_then(|s| s.single()).map_err(|e| err(&e))?;
            let sys = sys.with_params(&params).map_err(|e| err(&e))?;
            let source = match at {
                Some(values) => PointSource::Explicit(values),
                None => PointSource::Seed(seed.unwrap_or(DEFAULT_SEED)),
            };
            let out = eval_bracket(&sys, &args, &source).map_err(|e| err(&e))?;
            print_bracket(&out);
            Ok(true)
        }
        Command::Reconstruct { system, table, gauge } => {
            let sys = Selector::parse(&system).and_then(|s| s.single()).map_err(|e| err(&e))?;
            let text = std::fs::read_to_string(&table).map_err(|e| format!("{}: {e}", table.display()))?;
            let mut t: PbTable = text.parse().map_err(|e| err(&e))?;
            for (name, v) in gauge {
                t.gauge.insert(&name, v);
            }
            let out = reconstruct(&sys, &t).map_err(|e| err(&e))?;
            println!("F = {}", out.functional.to_expr());
            match out.reference {
                Some((name, r)) => {
                    let ok = r <= Tolerance::default().rtol;
                    println!("max partial mismatch against {name}: {r:e}");
                    println!("{}", if ok { "compatible" } else { "MISMATCH" });
                    Ok(ok)
                }
                None => Ok(true),
            }
        }
        Command::List => {
            println!("{:<28} {:>3} {:>3} {:>3}", "system", "m", "n", "s");
            for name in BUILTIN_NAMES {
                let sys = builtin(name).map_err(|e| err(&e))?;
                println!("{:<28} {:>3} {:>3} {:>3}", name, sys.m(), sys.n(), sys.s());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

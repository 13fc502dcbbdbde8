//! `pseudoform` command-line front end.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pseudoform::ambient::{sample_sigma, AmbientKind, EmbeddingConfig};
use pseudoform::exec::Execution;
use pseudoform::report::Tolerances;
use pseudoform::suite::{
    derive_seed, render_json, render_markdown, table_eigen, write_json_value, SuiteConfig, SuiteKind, SuiteReport,
    MAX_EIGEN_DEGREE,
};
use pseudoform::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "pseudoform", version, about = "Exterior-calculus identity verification on pseudo-spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite (or `all`) over the geometry grid.
    Verify(VerifyArgs),
    /// Tabulate `□φ/φ` for spherical harmonics on round spheres.
    TableEigen(EigenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Args)]
struct Common {
    /// Dimensions of Σ_n, comma separated.
    #[arg(long = "n", value_delimiter = ',', default_value = "2,3,4")]
    ns: Vec<usize>,
    /// Radius parameter; Σ_n is y² = −ε/H².
    #[arg(long = "H", default_value_t = 1.0)]
    h: f64,
    #[arg(long, default_value_t = 25)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// algebra, restriction, weitzenboeck, sections or all.
    suite: String,
    #[command(flatten)]
    common: Common,
    /// Signs ε, comma separated (`+1,-1`).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1,-1")]
    eps: Vec<i8>,
    /// Round spheres only.
    #[arg(long)]
    euclidean: bool,
    /// Ambient kinds, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_ambient, default_value = "rn1,rn2")]
    ambient: Vec<AmbientKind>,
    #[arg(long, default_value_t = 10)]
    fields: usize,
    #[arg(long, default_value_t = 3)]
    field_degree: u32,
    /// Tolerance override `key=value`; repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tol: Vec<String>,
    /// Disable data parallelism.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct EigenArgs {
    #[command(flatten)]
    common: Common,
    /// Largest harmonic degree.
    #[arg(long, default_value_t = MAX_EIGEN_DEGREE)]
    l_max: u32,
}

fn parse_ambient(s: &str) -> Result<AmbientKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "rn1" => Ok(AmbientKind::Rn1),
        "rn2" => Ok(AmbientKind::Rn2),
        _ => Err(format!("unknown ambient {s:?}, expected rn1 or rn2")),
    }
}

/// A failure with the exit code it maps to.
struct Exit(u8, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Config(_)) { EXIT_CONFIG } else { EXIT_FAIL };
        Exit(code, e.to_string())
    }
}

fn config(args: &VerifyArgs) -> Result<SuiteConfig, Exit> {
    let suite: SuiteKind = args.suite.parse()?;
    let mut tolerances = Tolerances::default();
    for t in &args.tol {
        let (k, v) =
            t.split_once('=').ok_or_else(|| Exit(EXIT_CONFIG, format!("--tol expects key=value, got {t:?}")))?;
        let v: f64 = v.trim().parse().map_err(|_| Exit(EXIT_CONFIG, format!("bad tolerance value in {t:?}")))?;
        tolerances.set(k.trim(), v)?;
    }
    let c = &args.common;
    let sc = SuiteConfig {
        suite,
        ns: c.ns.clone(),
        eps: args.eps.clone(),
        euclidean: args.euclidean,
        ambients: args.ambient.clone(),
        h: c.h,
        samples: c.samples,
        fields: args.fields,
        field_degree: args.field_degree,
        seed: c.seed,
        tolerances,
        execution: if args.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    sc.validate()?;
    Ok(sc)
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), Exit> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Exit(EXIT_FAIL, format!("writing {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Exit(EXIT_FAIL, e.to_string()))
        }
    }
}

/// Failing gating records, one JSON object per line.
fn failure_lines(report: &SuiteReport) -> String {
    let mut out = String::new();
    for r in report.failures() {
        let v = serde_json::to_value(r).expect("records serialize");
        let mut line = String::new();
        write_json_value(&v, 0, &mut line);
        out.push_str(&line.lines().map(str::trim).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

fn verify(args: &VerifyArgs) -> Result<bool, Exit> {
    let sc = config(args)?;
    let report = pseudoform::suite::run(&sc)?;
    let text = match args.common.format {
        Format::Json => render_json(&report),
        Format::Markdown => render_markdown(&report),
    };
    emit(&text, args.common.output.as_ref())?;
    if !report.pass {
        eprintln!("{} gating check(s) failed:", report.summary.failed);
        eprint!("{}", failure_lines(&report));
    }
    Ok(report.pass)
}

fn eigen(args: &EigenArgs) -> Result<bool, Exit> {
    let c = &args.common;
    if c.samples == 0 {
        return Err(Exit(EXIT_CONFIG, "samples must be at least 1".into()));
    }
    if args.l_max > MAX_EIGEN_DEGREE {
        return Err(Exit(EXIT_CONFIG, format!("l-max is at most {MAX_EIGEN_DEGREE}")));
    }
    let mut tables = Vec::new();
    for &n in &c.ns {
        if !(2..=6).contains(&n) {
            return Err(Exit(EXIT_CONFIG, format!("n must be in 2..=6, got {n}")));
        }
        let cfg = EmbeddingConfig::sphere(n, c.h)?;
        let points =
            sample_sigma(&cfg, derive_seed(c.seed, &format!("table-eigen/{}/points", cfg.label())), c.samples)?;
        let rows = table_eigen(&cfg, &points, args.l_max)?;
        tables.push((cfg, rows));
    }
    let text = match c.format {
        Format::Json => {
            let v = json!(tables
                .iter()
                .map(|(cfg, rows)| json!({ "geometry": cfg.label(), "n": cfg.n, "H": cfg.h, "rows": rows }))
                .collect::<Vec<_>>());
            let mut s = String::new();
            write_json_value(&v, 0, &mut s);
            s.push('\n');
            s
        }
        Format::Markdown => {
            let mut s = String::from("# Spherical-harmonic eigenvalues\n");
            for (cfg, rows) in &tables {
                s.push_str(&format!(
                    "\n## {}\n\n| l | expected | measured | max ratio error | samples |\n|---|---|---|---|---|\n",
                    cfg.label()
                ));
                for r in rows {
                    s.push_str(&format!(
                        "| {} | {} | {:.12} | {:.3e} | {} |\n",
                        r.l, r.expected, r.measured, r.max_ratio_error, r.samples
                    ));
                }
            }
            s
        }
    };
    emit(&text, c.output.as_ref())?;
    Ok(true)
}

fn init_threads() -> Result<(), Exit> {
    let Ok(raw) = std::env::var("PSEUDOFORM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Exit(EXIT_CONFIG, format!("PSEUDOFORM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| Exit(EXIT_FAIL, e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match &cli.command {
        Command::Verify(a) => verify(a),
        Command::TableEigen(a) => eigen(a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

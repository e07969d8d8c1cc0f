use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use skewnet::cohomology::CohomologyTable;
use skewnet::correspondence::{random_regular_net, GenerateOptions};
use skewnet::ideals::{ALTERNATE_PRIME, DEFAULT_DEGREE_CAP, DEFAULT_PRIME};
use skewnet::pipeline::{report_diff, run_check, run_pipeline, PipelineOptions, StageReport, Status, CHECK_NAMES};
use skewnet::{ANet, Error, Field};

const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "skewnet", version, about = "Exact checks for nets of skew forms")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Small fields enumerated for the singularity sets, e.g. "2,3,7".
    #[arg(long, global = true, env = "SKEWNET_FIELDS", default_value = "2,3")]
    fields: String,
    /// Working prime for Hilbert functions and random samples.
    #[arg(long, global = true, env = "SKEWNET_PRIME", default_value_t = DEFAULT_PRIME)]
    prime: u32,
    /// Second prime for cross-checks.
    #[arg(long, global = true, env = "SKEWNET_ALT_PRIME", default_value_t = ALTERNATE_PRIME)]
    alt_prime: u32,
    #[arg(long, global = true, env = "SKEWNET_DEGREE_CAP", default_value_t = DEFAULT_DEGREE_CAP)]
    degree_cap: usize,
    /// Random samples per fiber check.
    #[arg(long, global = true, env = "SKEWNET_SAMPLES", default_value_t = 1000)]
    samples: usize,
    #[arg(long, global = true, env = "SKEWNET_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "SKEWNET_WORKERS", default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a random regular net with smooth Pfaffian hypersurface.
    Generate {
        #[arg(long, default_value_t = 3)]
        bound: i64,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long = "two-m", default_value_t = 6)]
        two_m: usize,
        #[arg(long, default_value_t = 200)]
        max_attempts: usize,
        /// Output path, "-" for stdout.
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Run every stage on a fixture and write the JSON report.
    Pipeline {
        /// Fixture path, "-" for stdin.
        fixture: PathBuf,
        /// Report path, "-" for stdout.
        #[arg(long, default_value = "-")]
        report: PathBuf,
    },
    /// Run one named check.
    Verify {
        fixture: PathBuf,
        check: String,
        /// Print the stage as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Compare two reports.
    ReportDiff { left: PathBuf, right: PathBuf },
}

fn parse_fields(s: &str) -> skewnet::Result<Vec<Field>> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    parts.push(cur);
    parts
        .iter()
        .map(|p| p.trim())
        .filter(|p| !p.is_empty())
        .map(|p| match p.parse::<u64>() {
            Ok(q) => Field::prime(q),
            Err(_) => p.parse(),
        })
        .collect()
}

fn read_input(path: &Path) -> skewnet::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn write_output(path: &Path, text: &str) -> skewnet::Result<()> {
    if path == Path::new("-") {
        io::stdout().write_all(text.as_bytes())?;
    } else {
        fs::write(path, text)?;
    }
    Ok(())
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Inconclusive(_) | Error::LimitExceeded { .. } | Error::NoStabilization { .. } | Error::RetryCapExceeded { .. } => 2,
        Error::IrregularNet(_) | Error::NotOnVariety(_) => 1,
        _ => EXIT_INPUT,
    }
}

fn print_table(t: &CohomologyTable) {
    println!("{}", t.name);
    let head: Vec<String> = t.twists.iter().map(|t| format!("{t:>6}")).collect();
    println!("  p\\t {}", head.join(""));
    for &p in &t.degrees {
        let row: Vec<String> = t
            .twists
            .iter()
            .map(|&tw| {
                let c = t.cell(p, tw).expect("cell");
                let v = c.computed.map(|v| v.to_string()).unwrap_or_else(|| "?".into());
                let mark = if c.verdict == skewnet::correspondence::Tri::Yes { "" } else { "!" };
                format!("{:>6}", format!("{v}{mark}"))
            })
            .collect();
        println!("  {p:>3} {}", row.join(""));
    }
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Inconclusive => "INCONCLUSIVE",
    }
}

fn print_stage(s: &StageReport) {
    println!("{}: {}", s.name, status_text(s.status));
    println!("  {}", s.witness);
    if let Ok(t) = serde_json::from_value::<CohomologyTable>(s.detail.clone()) {
        print_table(&t);
    }
}

fn run(cli: Cli) -> skewnet::Result<u8> {
    let c = &cli.common;
    if c.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(c.workers)
            .build_global()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    let opts = PipelineOptions {
        fields: parse_fields(&c.fields)?,
        prime: c.prime,
        alt_prime: c.alt_prime,
        degree_cap: c.degree_cap,
        samples: c.samples,
        seed: c.seed,
    };
    match &cli.cmd {
        Cmd::Generate { bound, n, two_m, max_attempts, out } => {
            let mut g = if (*n, *two_m) == (5, 6) { GenerateOptions::v14() } else { GenerateOptions::shape(*n, *two_m) };
            g.bound = *bound;
            g.max_attempts = *max_attempts;
            let net = random_regular_net(c.seed, &g, &opts.hilbert_config())?;
            eprintln!("attempts: {}", net.attempts);
            write_output(out, &net.net.to_json_pretty()?)?;
            Ok(0)
        }
        Cmd::Pipeline { fixture, report } => {
            let net = ANet::from_json(&read_input(fixture)?)?;
            let start = Instant::now();
            let r = run_pipeline(&net, &opts)?;
            for s in &r.stages {
                eprintln!("{:<24} {}", s.name, status_text(s.status));
            }
            if let Some(h) = &r.halted {
                eprintln!("halted: {h}");
            }
            eprintln!("overall: {} in {:.1?}", status_text(r.status), start.elapsed());
            write_output(report, &r.to_json()?)?;
            Ok(r.status.exit_code() as u8)
        }
        Cmd::Verify { fixture, check, json } => {
            if !CHECK_NAMES.contains(&check.as_str()) {
                eprintln!("unknown check `{check}`; known checks: {}", CHECK_NAMES.join(", "));
                return Ok(EXIT_INPUT);
            }
            let net = ANet::from_json(&read_input(fixture)?)?;
            let s = run_check(&net, check, &opts)?;
            if *json {
                println!("{}", serde_json::to_string_pretty(&s)?);
            } else {
                print_stage(&s);
            }
            Ok(s.status.exit_code() as u8)
        }
        Cmd::ReportDiff { left, right } => {
            let d = report_diff(&read_input(left)?, &read_input(right)?)?;
            if d.identical {
                println!("identical");
                Ok(0)
            } else {
                for p in &d.differences {
                    println!("differs: {p}");
                }
                Ok(1)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}

mod jobs;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use jobs::JobError;

#[derive(Parser)]
#[command(name = "zhufusion", version, about = "Exact Zhu-algebra, fusion and intertwining computations")]
struct Cli {
    /// Run the acceptance suite and print a summary table.
    #[arg(long)]
    self_test: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    #[command(subcommand)]
    Zhu(Zhu),
    #[command(subcommand)]
    Fusion(Fusion),
    #[command(subcommand)]
    Intertwine(Intertwine),
    #[command(subcommand)]
    Log(Log),
    /// Read a JSON job (with a "cmd" field) from stdin.
    Run,
}

#[derive(Args)]
struct ModuleArgs {
    /// vacuum or verma
    #[arg(long)]
    module: String,
    #[arg(long)]
    c: String,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    window: Option<u64>,
    #[arg(long)]
    general_cap: Option<u64>,
}

impl ModuleArgs {
    fn into_job(self, cmd: &str) -> Value {
        json!({"cmd": cmd, "module": self.module, "c": self.c, "h": self.h, "window": self.window, "general-cap": self.general_cap})
    }
}

#[derive(Subcommand)]
enum Zhu {
    /// Normal form of an element in the Zhu quotient.
    Reduce {
        #[command(flatten)]
        module: ModuleArgs,
        /// Element JSON, `@file`, or `-` for stdin.
        #[arg(long)]
        element: String,
    },
    /// Product of a vacuum state with an element, plus its normal form.
    Product {
        #[command(flatten)]
        module: ModuleArgs,
        /// circle, star-left, star-right or residue
        #[arg(long, default_value = "star-left")]
        op: String,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
        #[arg(long)]
        a: String,
        #[arg(long)]
        u: String,
    },
}

#[derive(Subcommand)]
enum Fusion {
    /// Dimension of Hom over the Zhu algebra between two modules.
    HomDim {
        #[arg(long)]
        dim2: u64,
        #[arg(long)]
        dim3: u64,
        #[arg(long)]
        h2: Option<String>,
        #[arg(long)]
        h3: Option<String>,
        /// Also count solutions by brute force up to this polynomial degree.
        #[arg(long)]
        verify_degree: Option<u64>,
    },
}

#[derive(Subcommand)]
enum Intertwine {
    /// Dimension of truncated integer-graded intertwining families.
    Solve {
        #[arg(long)]
        c: String,
        #[arg(long)]
        h1: String,
        #[arg(long)]
        h2: String,
        #[arg(long)]
        h3: String,
        #[arg(long)]
        depth: u64,
        #[arg(long, default_value_t = 4)]
        weight_cap: u64,
        /// Force the degree-zero blocks to vanish.
        #[arg(long)]
        pin_ophi_zero: bool,
        /// Include the solution families in the report.
        #[arg(long)]
        families: bool,
    },
    /// Residual of every interior instance for a given family.
    Check {
        /// Family JSON, `@file`, or `-` for stdin.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 4)]
        weight_cap: u64,
    },
}

#[derive(Subcommand)]
enum Log {
    /// Logarithmic transform round trip on supplied graded data.
    Roundtrip {
        /// Spec JSON, `@file`, or `-` for stdin.
        #[arg(long)]
        spec: String,
    },
}

fn read_json(arg: &str) -> Result<Value> {
    let text = if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else if let Some(path) = arg.strip_prefix('@') {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).context("parsing JSON input")
}

fn build_job(command: Command) -> Result<Value> {
    Ok(match command {
        Command::Zhu(Zhu::Reduce { module, element }) => {
            let mut job = module.into_job("zhu reduce");
            job["element"] = read_json(&element)?;
            job
        }
        Command::Zhu(Zhu::Product { module, op, k, a, u }) => {
            let mut job = module.into_job("zhu product");
            job["op"] = json!(op);
            job["k"] = json!(k);
            job["a"] = read_json(&a)?;
            job["u"] = read_json(&u)?;
            job
        }
        Command::Fusion(Fusion::HomDim { dim2, dim3, h2, h3, verify_degree }) => {
            json!({"cmd": "fusion hom-dim", "dim2": dim2, "dim3": dim3, "h2": h2, "h3": h3, "verify-degree": verify_degree})
        }
        Command::Intertwine(Intertwine::Solve { c, h1, h2, h3, depth, weight_cap, pin_ophi_zero, families }) => json!({
            "cmd": "intertwine solve", "c": c, "h1": h1, "h2": h2, "h3": h3, "depth": depth,
            "weight-cap": weight_cap, "pin-ophi-zero": pin_ophi_zero, "families": families,
        }),
        Command::Intertwine(Intertwine::Check { family, weight_cap }) => {
            json!({"cmd": "intertwine check", "family": read_json(&family)?, "weight-cap": weight_cap})
        }
        Command::Log(Log::Roundtrip { spec }) => {
            let mut job = read_json(&spec)?;
            if !job.is_object() {
                anyhow::bail!("log spec must be a JSON object");
            }
            job["cmd"] = json!("log roundtrip");
            job
        }
        Command::Run => read_json("-")?,
    })
}

fn emit(out: &Option<PathBuf>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn self_test(out: &Option<PathBuf>) -> Result<ExitCode> {
    let reports = zhufusion::acceptance::run_all();
    let mut table = String::new();
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        table += &format!("{:>2}  {status}  {:<50} {:>6.1}s  {}\n", r.id, r.name, r.seconds, r.detail);
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    table += &format!("{passed}/{} criteria passed\n", reports.len());
    match out {
        Some(path) => fs::write(path, &table).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{table}"),
    }
    Ok(if passed == reports.len() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = (|| -> Result<ExitCode> {
        if cli.self_test {
            return self_test(&cli.out);
        }
        let Some(command) = cli.command else {
            anyhow::bail!("no command given; see --help");
        };
        let job = build_job(command)?;
        match jobs::run(&job) {
            Ok(report) => {
                emit(&cli.out, &report)?;
                Ok(ExitCode::SUCCESS)
            }
            Err(e) => {
                let report = e.to_json();
                if matches!(e, JobError::Failed(_)) {
                    emit(&cli.out, &report)?;
                } else {
                    eprintln!("{}", serde_json::to_string(&report)?);
                }
                Ok(ExitCode::from(if matches!(e, JobError::Failed(_)) { 1 } else { 2 }))
            }
        }
    })();
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({"error": {"code": "io", "message": format!("{e:#}")}}));
            ExitCode::from(2)
        }
    }
}

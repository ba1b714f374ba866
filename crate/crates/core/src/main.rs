use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use zeno_chain::runner::output::{write_csv, write_jsonl};
use zeno_chain::runner::verify::run_checks;
use zeno_chain::runner::{convergence_scan, execute, OutputFormat, ScenarioKind, ScenarioSpec, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "zeno-chain", version, about = "Quantum Zeno transfer along a three-mode chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a `key = value` config file.
    Run {
        config: PathBuf,
        /// Output file (defaults to the config's `output`, then $ZENO_CHAIN_OUT_DIR, then stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Override the Monte Carlo seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check the built-in invariants.
    Verify,
    /// List scenarios and their keys.
    Scenarios,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, format, seed, jobs } => match run(&config, out, format, seed, jobs) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
        },
        Command::Verify => {
            let outcomes = run_checks();
            for c in &outcomes {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                println!("{verdict}  {:<36} worst {:.3e}  tol {:.1e}", c.name, c.worst, c.tolerance);
            }
            if outcomes.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Scenarios => {
            println!("every scenario needs: scenario, kappa1 + kappa2 (or kappa + theta), t, n (or n_list)\n");
            for kind in ScenarioKind::ALL {
                println!("{:<20} {}", kind.name(), kind.summary());
                if !kind.extra_keys().is_empty() {
                    println!("{:<20} keys: {}", "", kind.extra_keys().join(", "));
                }
            }
            ExitCode::SUCCESS
        }
    }
}

fn destination(config: &Path, spec: &ScenarioSpec, out: Option<PathBuf>) -> Option<PathBuf> {
    out.or_else(|| spec.output.clone()).or_else(|| {
        let dir = std::env::var_os(OUT_DIR_ENV)?;
        let stem = config.file_stem()?;
        let ext = match spec.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        };
        Some(Path::new(&dir).join(stem).with_extension(ext))
    })
}

/// Returns `Ok(false)` when rows were written but invariants were violated.
fn run(
    config: &Path,
    out: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    jobs: Option<usize>,
) -> Result<bool, String> {
    let text = fs::read_to_string(config).map_err(|e| format!("{}: {e}", config.display()))?;
    let mut spec = ScenarioSpec::from_config_str(&text).map_err(|e| format!("{}: {e}", config.display()))?;
    if let Some(s) = seed {
        spec.seed = Some(s);
    }
    if let Some(f) = format {
        spec.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Jsonl => OutputFormat::Jsonl,
        };
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| e.to_string())?;

    let rows = pool
        .install(|| {
            if spec.sweep.is_none() && spec.n_list.len() > 1 {
                let scan = convergence_scan(&spec)?;
                let fmt = |s: Option<f64>| s.map_or("n/a".to_string(), |x| format!("{x:.3}"));
                eprintln!(
                    "convergence: |p - p_limit| ~ n^{}, 1 - P ~ n^{}",
                    fmt(scan.error_slope),
                    fmt(scan.loss_slope)
                );
                Ok(scan.rows)
            } else {
                execute(&spec)
            }
        })
        .map_err(|e| e.to_string())?;

    let flat: Vec<_> = rows.iter().map(|e| &e.row).collect();
    let emit = |w: &mut dyn Write, fmt: OutputFormat| -> io::Result<()> {
        match fmt {
            OutputFormat::Csv => write_csv(&mut *w, flat.iter().copied()),
            OutputFormat::Jsonl => write_jsonl(&mut *w, flat.iter().copied()),
        }?;
        w.flush()
    };
    match destination(config, &spec, out) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
            let mut w = BufWriter::new(File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?);
            emit(&mut w, spec.format).map_err(|e| e.to_string())?;
            if spec.mirror_jsonl && spec.format == OutputFormat::Csv {
                let mirror = path.with_extension("jsonl");
                let mut w = BufWriter::new(File::create(&mirror).map_err(|e| format!("{}: {e}", mirror.display()))?);
                emit(&mut w, OutputFormat::Jsonl).map_err(|e| e.to_string())?;
            }
        }
        None => emit(&mut io::stdout().lock(), spec.format).map_err(|e| e.to_string())?,
    }

    let violations: Vec<&String> = rows.iter().flat_map(|e| &e.violations).collect();
    for v in &violations {
        eprintln!("violation: {v}");
    }
    Ok(violations.is_empty())
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use eikonal_lab::config::ScenarioConfig;
use eikonal_lab::report::{verify_manifest, ScenarioReport};
use eikonal_lab::{io, probes, run_scenario};

const IDENTITIES: &str = include_str!("../scenarios/identities.json");

/// Numerical experiments on Eikonal solutions.
///
/// Reports are written below `$EIKONAL_LAB_OUT` (default `./lab_out`) unless
/// `--out` is given. The exit status is 0 when every verdict passes, 1 when a
/// verdict fails and 2 on usage or configuration errors.
#[derive(Parser)]
#[command(name = "eikonal-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its report directory.
    Run {
        config: PathBuf,
        /// Report directory; defaults to `$EIKONAL_LAB_OUT/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the scenario name.
        #[arg(long)]
        name: Option<String>,
    },
    /// Check a scenario file without running it.
    Validate { config: PathBuf },
    /// Tabulate the determinant kernel `f`, `g` and `f/g²` on `[0, 2π]`.
    Kcurve {
        #[arg(long, default_value_t = 720)]
        samples: usize,
        /// Directory for `kcurve.csv` and `kcurve.svg`; prints CSV when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in entropy and kernel identity checks.
    Identities {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the verdicts of a report directory and verify its manifest.
    Report { dir: PathBuf },
    /// Sample the scenario's generator and write `u` and `∇u`.
    Export {
        config: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Bin,
}

fn out_root() -> PathBuf {
    std::env::var_os("EIKONAL_LAB_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("lab_out"))
}

fn execute(config: ScenarioConfig, out: Option<PathBuf>) -> anyhow::Result<bool> {
    config.validate()?;
    let report = run_scenario(&config);
    let dir = out.unwrap_or_else(|| out_root().join(&config.name));
    report.write(&dir)?;
    print!("{}", report.summary());
    println!("report written to {}", dir.display());
    Ok(report.passed())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run { config, out, seed, name } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = name {
                cfg.name = n;
            }
            execute(cfg, out)
        }
        Command::Validate { config } => {
            ScenarioConfig::load(&config)?.validate()?;
            println!("{} is valid", config.display());
            Ok(true)
        }
        Command::Kcurve { samples, out } => {
            if samples == 0 {
                bail!("--samples must be positive");
            }
            let table = probes::kcurve_table(samples);
            match out {
                None => print!("{}", table.to_csv()),
                Some(dir) => {
                    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
                    fs::write(dir.join("kcurve.csv"), table.to_csv())?;
                    fs::write(dir.join("kcurve.svg"), probes::kcurve_plot(&table))?;
                    println!("wrote {}", dir.join("kcurve.csv").display());
                }
            }
            Ok(true)
        }
        Command::Identities { out } => execute(ScenarioConfig::from_json(IDENTITIES)?, out),
        Command::Report { dir } => {
            let report = ScenarioReport::read(&dir)?;
            print!("{}", report.summary());
            let bad = verify_manifest(&dir)?;
            for p in &bad {
                println!("manifest mismatch: {p}");
            }
            Ok(report.passed() && bad.is_empty())
        }
        Command::Export { config, n, format, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            cfg.validate()?;
            let gen = cfg.generator.as_ref().context("the scenario has no generator")?.build()?;
            let (u, grad) = gen.sample(&cfg.domain.grid(n)?);
            let ext = match format {
                Format::Csv => "csv",
                Format::Bin => "bin",
            };
            fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
            let file = |name: &str| -> anyhow::Result<fs::File> {
                let p: PathBuf = Path::new(&out).join(format!("{name}.{ext}"));
                fs::File::create(&p).with_context(|| format!("cannot create {}", p.display()))
            };
            match format {
                Format::Csv => {
                    io::write_csv(&u, file("u")?)?;
                    io::write_csv(&grad, file("grad_u")?)?;
                }
                Format::Bin => {
                    io::write_binary(&u, file("u")?)?;
                    io::write_binary(&grad, file("grad_u")?)?;
                }
            }
            println!("wrote u.{ext} and grad_u.{ext} to {}", out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

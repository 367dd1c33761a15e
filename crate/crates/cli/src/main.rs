//! `hclust`: cluster measures described in TOML spec files.

mod error;
mod expr;
mod report;
mod spec;
mod tables;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hclust_core::clustering::{is_adapted, refine_and_cluster, Schedule};
use hclust_core::number::parse_rational;

use crate::error::CliError;
use crate::report::Provenance;
use crate::spec::RunSpec;

#[derive(Parser, Debug)]
#[command(
    name = "hclust",
    version,
    about = "Hierarchical clustering of finite measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Outputs {
    /// Write the JSON report here.
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Write the DOT rendering here.
    #[arg(long)]
    out_dot: Option<PathBuf>,
    /// Default directory for outputs not given explicitly.
    #[arg(long, env = "HCLUST_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cluster the measure of a spec file and emit the forest.
    Cluster {
        spec: PathBuf,
        /// `disjoint` or `tau:<p/q>`; overrides the spec.
        #[arg(long)]
        separation: Option<String>,
        /// Grid depth; overrides the spec.
        #[arg(long)]
        depth: Option<u32>,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Check that the simple measure Q of a spec is adapted to the density P.
    CheckAdapted {
        /// Spec holding `[simple]` (and `P`, unless given separately).
        spec: PathBuf,
        /// Spec holding the density `P`.
        density_spec: Option<PathBuf>,
        #[arg(long)]
        separation: Option<String>,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Cluster a grid formula along a sequence of depths and take the limit.
    Approx {
        spec: PathBuf,
        /// Comma-separated increasing depths.
        #[arg(long, value_delimiter = ',', required = true)]
        depths: Vec<u32>,
        /// In-cell sample offset, a rational in [0, 1].
        #[arg(long, default_value = "1/2")]
        offset: String,
        #[arg(long)]
        separation: Option<String>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Regenerate the example tables and diff them against the goldens.
    ReproduceTables {
        #[arg(long, env = "HCLUST_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        golden_dir: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn emit(text: &str, path: Option<PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            std::fs::write(&p, text).map_err(|e| CliError::io(&p, e))
        }
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                Err(CliError::io("<stdout>", e))
            }
            _ => Ok(()),
        },
    }
}

fn stem(spec: &Path) -> String {
    spec.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "forest".into())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Cluster {
            spec,
            separation,
            depth,
            outputs,
        } => {
            let text = read(&spec)?;
            let run = RunSpec::parse(&text)?;
            let rel = run.relation(separation.as_deref())?;
            let model = run.model(&rel, depth)?;
            let forest = report::cluster(&model, &rel)?;
            let provenance = Provenance::new(&text, model.engine(), &rel, model.depth());
            let rep = report::forest_report(&model, &forest, provenance)?;
            let configured = run.output.clone().unwrap_or_default();
            let in_dir = |ext: &str| {
                outputs
                    .out_dir
                    .as_ref()
                    .map(|d| d.join(format!("{}.{ext}", stem(&spec))))
            };
            let json_path = outputs
                .out_json
                .or(configured.json)
                .or_else(|| in_dir("json"));
            let dot_path = outputs.out_dot.or(configured.dot).or_else(|| in_dir("dot"));
            if json_path.is_some() || dot_path.is_none() {
                emit(&rep.to_json(), json_path)?;
            }
            match dot_path {
                Some(p) => emit(&forest.to_dot(), Some(p)),
                None => Ok(()),
            }
        }
        Command::CheckAdapted {
            spec,
            density_spec,
            separation,
            depth,
            out_json,
        } => {
            let text = read(&spec)?;
            let mut run = RunSpec::parse(&text)?;
            let mut hashed = text.clone();
            if let Some(p) = density_spec {
                let ptext = read(&p)?;
                let prun = RunSpec::parse(&ptext)?;
                run.density = prun.density;
                run.grid = prun.grid;
                if prun.ambient.is_some() {
                    run.ambient = prun.ambient;
                }
                hashed.push_str(&ptext);
            }
            let rel = run.relation(separation.as_deref())?;
            let (q, p) = run.adaptedness_pair(&rel, depth)?;
            let rep = is_adapted(&q, &p)?;
            let json = report::adaptedness_json(
                &rep,
                Provenance::new(&hashed, "adaptedness", &rel, depth),
            );
            emit(
                &(serde_json::to_string_pretty(&json).expect("report serializes") + "\n"),
                out_json,
            )?;
            match rep.failure() {
                None => Ok(()),
                Some(reason) => Err(CliError::NotAdapted(reason.to_string())),
            }
        }
        Command::Approx {
            spec,
            depths,
            offset,
            separation,
            out_json,
        } => {
            let text = read(&spec)?;
            let run = RunSpec::parse(&text)?;
            let rel = run.relation(separation.as_deref())?;
            let (domain, expr) = run.formula()?;
            let offset = parse_rational(&offset)?;
            let zero_division = std::cell::Cell::new(false);
            let f = |p: &[hclust_core::Rational]| {
                expr.eval(p).unwrap_or_else(|| {
                    zero_division.set(true);
                    hclust_core::Rational::from_integer(0.into())
                })
            };
            let schedule = Schedule { depths, offset };
            let result = refine_and_cluster(domain, &f, &schedule, &rel);
            if zero_division.get() {
                return Err(CliError::Spec(
                    "grid.formula divides by zero at a sample point".into(),
                ));
            }
            let rep = result?;
            let json = report::refine_json(
                &rep,
                Provenance::new(&text, "approx", &rel, schedule.depths.last().copied()),
            );
            emit(
                &(serde_json::to_string_pretty(&json).expect("report serializes") + "\n"),
                out_json,
            )
        }
        Command::ReproduceTables {
            out_dir,
            golden_dir,
        } => {
            for path in tables::reproduce(&out_dir, golden_dir.as_deref())? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `netspectra` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric or I/O failure, 3 the
//! requested quantity is well defined but absent (no separated leading
//! eigenvalue, hub below the critical degree).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netspectra::manifest::{EnsembleParams, RunCommand, RunManifest, Sweep};
use netspectra::{MatrixKind, ModelSpec};

mod run;
mod svg;

use run::{CliError, Outcome};

#[derive(Parser, Debug)]
#[command(
    name = "netspectra",
    version,
    about = "Analytic and sampled spectra of random graphs with given expected degrees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic spectral density of the modularity matrix on a grid.
    Density {
        model: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        zmin: f64,
        #[arg(long, allow_negative_numbers = true)]
        zmax: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
        /// Imaginary offset; defaults to (zmax - zmin) / (10 points).
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write an SVG plot next to the CSV.
        #[arg(long)]
        svg: bool,
    },
    /// Pooled eigenvalue histogram of sampled networks.
    Empirical {
        model: PathBuf,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 25)]
        reps: usize,
        #[arg(long, default_value_t = 60)]
        bins: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = KindArg::Modularity)]
        kind: KindArg,
        /// Histogram range `lo:hi`; defaults to the analytic band widened by 2.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        /// Also dump every eigenvalue, one per line.
        #[arg(long)]
        eigenvalues: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Leading adjacency eigenvalue: exact, approximate and (optionally) sampled.
    Leading {
        model: PathBuf,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues and eigenvector localization produced by a hub.
    Hub {
        model: PathBuf,
        #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
        kn: Option<f64>,
        /// `lo:hi:steps` equally spaced hub degrees.
        #[arg(long)]
        sweep: Option<String>,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, requires = "out")]
        svg: bool,
    },
    /// Sample one network and write its edge list.
    Sample {
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Append a vertex of this expected degree (repeatable).
        #[arg(long = "hub")]
        hubs: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-run a manifest, regenerating its outputs.
    Replay {
        manifest: PathBuf,
        /// Where to write outputs; defaults to the manifest's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    /// Also measure sampled networks.
    #[arg(long)]
    empirical: bool,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 25)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl EnsembleArgs {
    fn params(&self) -> Option<EnsembleParams> {
        self.empirical.then_some(EnsembleParams { n: self.n, replicates: self.reps })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Adjacency,
    Modularity,
}

impl From<KindArg> for MatrixKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Adjacency => MatrixKind::Adjacency,
            KindArg::Modularity => MatrixKind::Modularity,
        }
    }
}

fn load_model(path: &Path) -> Result<ModelSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read model file {}: {e}", path.display())))?;
    let spec = ModelSpec::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    spec.build().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(spec)
}

fn parse_numbers(text: &str, count: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != count {
        return Err(CliError::Usage(format!("{what} must have {count} ':'-separated fields, got {text:?}")));
    }
    parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {p:?} in {what}"))))
        .collect()
}

fn parse_sweep(text: &str) -> Result<Sweep, CliError> {
    let v = parse_numbers(text, 3, "--sweep")?;
    if !(v[2] >= 1.0 && v[2].fract() == 0.0) {
        return Err(CliError::Usage(format!("--sweep steps must be a positive integer, got {}", v[2])));
    }
    Ok(Sweep { lo: v[0], hi: v[1], steps: v[2] as usize })
}

/// Splits `--out` into the output directory and the primary file name.
fn split_out(out: &Path) -> Result<(PathBuf, String), CliError> {
    let name = out
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CliError::Usage(format!("--out {} has no file name", out.display())))?
        .to_string();
    let dir = out.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((dir, name))
}

fn build(command: Command) -> Result<(RunManifest, PathBuf, bool), CliError> {
    let version = env!("CARGO_PKG_VERSION").to_string();
    let manifest = |model, base_seed, run, out: &Path| -> Result<(RunManifest, PathBuf, bool), CliError> {
        let (dir, name) = split_out(out)?;
        Ok((RunManifest { version: version.clone(), model, base_seed, run, outputs: vec![name] }, dir, true))
    };
    match command {
        Command::Density { model, zmin, zmax, points, eta, out, svg } => {
            let run = RunCommand::Density { zmin, zmax, points, eta, svg };
            manifest(load_model(&model)?, 0, run, &out)
        }
        Command::Empirical { model, n, reps, bins, seed, kind, range, eigenvalues, out, svg } => {
            let range = match range {
                Some(r) => {
                    let v = parse_numbers(&r, 2, "--range")?;
                    Some([v[0], v[1]])
                }
                None => None,
            };
            let run = RunCommand::Empirical { n, replicates: reps, bins, kind: kind.into(), range, eigenvalues, svg };
            manifest(load_model(&model)?, seed, run, &out)
        }
        Command::Leading { model, ensemble, out } => {
            let run = RunCommand::Leading { empirical: ensemble.params() };
            let spec = load_model(&model)?;
            match out {
                Some(out) => manifest(spec, ensemble.seed, run, &out),
                None => Ok((stdout_manifest(version, spec, ensemble.seed, run), PathBuf::new(), false)),
            }
        }
        Command::Hub { model, kn, sweep, ensemble, out, svg } => {
            let sweep = sweep.as_deref().map(parse_sweep).transpose()?;
            let run = RunCommand::Hub { kn, sweep, empirical: ensemble.params(), svg };
            let spec = load_model(&model)?;
            match out {
                Some(out) => manifest(spec, ensemble.seed, run, &out),
                None => Ok((stdout_manifest(version, spec, ensemble.seed, run), PathBuf::new(), false)),
            }
        }
        Command::Sample { model, n, seed, hubs, out } => {
            manifest(load_model(&model)?, seed, RunCommand::Sample { n, hubs }, &out)
        }
        Command::Replay { manifest: path, out_dir } => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("cannot read manifest {}: {e}", path.display())))?;
            let m = RunManifest::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            if m.version != version {
                eprintln!("warning: manifest written by version {}, replaying with {version}", m.version);
            }
            let dir = out_dir.unwrap_or_else(|| path.parent().map(Path::to_path_buf).unwrap_or_default());
            Ok((m, dir, true))
        }
    }
}

/// A manifest for a run that only prints to stdout; it is never written.
fn stdout_manifest(version: String, model: ModelSpec, base_seed: u64, run: RunCommand) -> RunManifest {
    RunManifest { version, model, base_seed, run, outputs: vec!["stdout".into()] }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = build(cli.command).and_then(|(manifest, dir, write)| run::execute(&manifest, &dir, write));
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Absent(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

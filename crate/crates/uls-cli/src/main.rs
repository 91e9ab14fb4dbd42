//! `uls`: command-line interface for unlabeled-sensing identifiability.
//!
//! Subcommands inspect transform spectra, certify transform sets, decode
//! sensing instances by enumeration, construct undersampled collision
//! witnesses, simulate instance directories, and run seeded Monte Carlo
//! experiments with machine-readable JSON reports.
//!
//! Exit codes: `0` success, `1` negative verdict (a set that is not
//! identifiable, an ambiguous or infeasible decode, a failed experiment),
//! `2` input or configuration error, `3` numerical failure.

mod experiment;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error as ThisError;
use uls_core::decode::{decode, simulate_instance, Classification};
use uls_core::error::Error as CoreError;
use uls_core::identifiability::{certify_set, converse_witness, SetCategory};
use uls_core::random::sample_gaussian_vector;
use uls_core::report::{ComplexJson, DecodeResultJson, SetVerdictJson, SpectrumJson, WitnessJson};
use uls_core::spectrum::eigenstructure;
use uls_core::{random_gaussian_matrix, Field, Matrix, Tolerance};

use experiment::{
    parse_single_transform, run_experiment, ExperimentConfig, ExperimentKind, FieldArg,
    SIGNAL_SEED_SALT,
};

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// Maps an error to the documented exit codes: input and configuration
    /// problems exit 2, numerical failures exit 3.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Config(_) => 2,
            CliError::Core(core) => match core {
                CoreError::Parse { .. }
                | CoreError::Dimension(_)
                | CoreError::Precondition(_)
                | CoreError::InvalidTransform(_)
                | CoreError::InvalidTolerance(_) => 2,
                CoreError::NotInvertible(_)
                | CoreError::NotDiagonalizable { .. }
                | CoreError::RankDeficient { .. }
                | CoreError::Numerical(_) => 3,
            },
        }
    }
}

#[derive(Parser)]
#[command(
    name = "uls",
    version,
    about = "Identifiability certificates, enumeration decoding, and seeded experiments \
             for unlabeled sensing with finite transform sets"
)]
struct Cli {
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Relative residual cutoff for range membership and candidate
    /// agreement.
    #[arg(long, global = true)]
    residual_tol: Option<f64>,
    /// Base seed for randomized subcommands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the clustered spectrum of one transform as JSON.
    Spectrum {
        /// File holding one transform line or a dense matrix block.
        transform_file: PathBuf,
    },
    /// Classify a transform set: unique, up-to-scale, or not identifiable.
    Certify {
        /// Signal dimension n.
        #[arg(long)]
        n: usize,
        /// File with one transform per line.
        transforms_file: PathBuf,
    },
    /// Decode a sensing instance directory by transform enumeration.
    Decode {
        /// Directory holding files A, y, transforms, and optionally truth.
        instance_dir: PathBuf,
    },
    /// Construct an explicit collision witness in the undersampled regime.
    Witness {
        /// Measurement dimension m.
        #[arg(long)]
        m: usize,
        /// Signal dimension n (must satisfy n <= m < 2n).
        #[arg(long)]
        n: usize,
        /// First transform specifier (identity, cyclic-shift, swap,
        /// scalar(c), diag(...)).
        #[arg(long)]
        t1: String,
        /// Second transform specifier.
        #[arg(long)]
        t2: String,
    },
    /// Simulate a sensing instance and write it as an instance directory.
    Simulate {
        /// Measurement dimension m.
        #[arg(long)]
        m: usize,
        /// Signal dimension n.
        #[arg(long)]
        n: usize,
        /// Transform family (all-permutations, cyclic-shift, swap,
        /// scalar(c), diag(...), identity).
        #[arg(long)]
        family: String,
        /// Index of the transform that generates the observation.
        #[arg(long)]
        which: usize,
        /// Output instance directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a seeded Monte Carlo experiment and write a JSON report.
    Experiment {
        /// Experiment kind.
        #[arg(long, value_enum)]
        kind: ExperimentKind,
        /// Measurement dimension m.
        #[arg(long)]
        m: usize,
        /// Signal dimension n.
        #[arg(long)]
        n: usize,
        /// Transform family specifier.
        #[arg(long)]
        family: String,
        /// Number of trials.
        #[arg(long)]
        trials: usize,
        /// Scalar field for the random sensing matrices.
        #[arg(long, value_enum, default_value = "complex")]
        field: FieldArg,
        /// Output report path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let tol = tolerance(&cli)?;
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Spectrum { transform_file } => {
            let t = io::load_transform_block(&transform_file)?;
            let spectrum = eigenstructure(&t, &tol)?;
            print_json(&SpectrumJson::from_structure(&spectrum))?;
            Ok(0)
        }
        Command::Certify { n, transforms_file } => {
            let transforms = io::load_transforms(&transforms_file)?;
            let verdict = certify_set(&transforms, n, &tol)?;
            print_json(&SetVerdictJson::from_verdict(&verdict))?;
            Ok(match verdict.category {
                SetCategory::Unique | SetCategory::UpToScale(_) => 0,
                SetCategory::MixedOrNotIdentifiable => 1,
            })
        }
        Command::Decode { instance_dir } => {
            let instance = io::load_instance(&instance_dir)?;
            let result = decode(&instance, &tol)?;
            print_json(&DecodeResultJson::from_result(&result))?;
            Ok(match result.classification {
                Classification::Unique(_) | Classification::UpToScale { .. } => 0,
                Classification::Ambiguous | Classification::Infeasible => 1,
            })
        }
        Command::Witness { m, n, t1, t2 } => {
            let t1 = parse_single_transform(&t1, m)?;
            let t2 = parse_single_transform(&t2, m)?;
            let a = random_gaussian_matrix(m, n, Field::Complex, seed);
            let witness = converse_witness(&a, &t1, &t2, &tol)?;
            // The witness only means something relative to the sensing
            // matrix, so the report carries the matrix that was drawn.
            print_json(&WitnessReport {
                m,
                n,
                seed,
                a: matrix_rows(&a),
                witness: WitnessJson::from_witness(&witness),
            })?;
            Ok(0)
        }
        Command::Simulate {
            m,
            n,
            family,
            which,
            out,
        } => {
            let transforms = experiment::family_transform_set(&family, m)?;
            let a = random_gaussian_matrix(m, n, Field::Complex, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ SIGNAL_SEED_SALT);
            let x = sample_gaussian_vector(&mut rng, n, Field::Complex);
            let instance = simulate_instance(a, transforms, &x, which)?;
            io::save_instance(&out, &instance)?;
            println!(
                "wrote instance to {} (m={m}, n={n}, transform {which} of {})",
                out.display(),
                instance.transforms().len()
            );
            Ok(0)
        }
        Command::Experiment {
            kind,
            m,
            n,
            family,
            trials,
            field,
            out,
        } => {
            let config = ExperimentConfig {
                kind,
                m,
                n,
                transform_family: family,
                trials,
                seed,
                field,
                rank_tol: tol.rank_tol,
                residual_tol: tol.residual_tol,
            };
            let report = run_experiment(&config)?;
            save_json(&out, &report)?;
            println!(
                "experiment {} on family '{}' (m={m}, n={n}, {trials} trials, seed {seed}): {} -> {}",
                kind_label(kind),
                report.config.transform_family,
                if report.pass { "pass" } else { "fail" },
                out.display()
            );
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}

fn kind_label(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::IntersectionLaw => "intersection-law",
        ExperimentKind::DecodeSweep => "decode-sweep",
        ExperimentKind::ConverseDemo => "converse-demo",
        ExperimentKind::DeterminantDichotomy => "determinant-dichotomy",
    }
}

fn tolerance(cli: &Cli) -> Result<Tolerance, CliError> {
    let defaults = Tolerance::default();
    Ok(Tolerance::new(
        cli.rank_tol.unwrap_or(defaults.rank_tol),
        cli.residual_tol.unwrap_or(defaults.residual_tol),
    )?)
}

/// Witness output: the collision data together with the drawn sensing
/// matrix, so the claim can be checked without rerunning the command.
#[derive(Serialize)]
struct WitnessReport {
    m: usize,
    n: usize,
    seed: u64,
    /// Row-major rows of the sensing matrix the witness collides through.
    a: Vec<Vec<ComplexJson>>,
    #[serde(flatten)]
    witness: WitnessJson,
}

fn matrix_rows(a: &Matrix) -> Vec<Vec<ComplexJson>> {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a.get(i, j).into()).collect())
        .collect()
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let body = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("report serialization failed: {e}")))?;
    println!("{body}");
    Ok(())
}

fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let body = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("report serialization failed: {e}")))?;
    std::fs::write(path, body + "\n").map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

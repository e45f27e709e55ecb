//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse/validation/file error,
//! 3 verification failure. Failures print a single machine-readable JSON
//! object to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use conley::bench::{scaling_run, GeneratorConfig, PosetShape};
use conley::connect::{compute_with_state, ConleyComplex, IndexGenerator, PipelineOptions};
use conley::io::{parse_auto, serialize_result};
use conley::oracle;
use conley::reduction::{clearing_reduce, ReduceOptions};

#[derive(Parser)]
#[command(
    name = "conley",
    about = "Connection matrices of poset-graded chain complexes over prime fields",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a complex or filtration file and report every violated invariant.
    Validate {
        file: PathBuf,
        #[arg(long)]
        field: Option<u64>,
    },
    /// Compute the Conley complex and connection matrix.
    Compute {
        file: PathBuf,
        #[command(flatten)]
        opts: ComputeOpts,
    },
    /// Run only the perturbation verification path and print its result.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        field: Option<u64>,
    },
    /// Time the pipeline on random instances and emit a CSV table.
    Bench(BenchOpts),
}

#[derive(Args)]
struct ComputeOpts {
    /// Field characteristic (overrides the file header; default 2).
    #[arg(long)]
    field: Option<u64>,
    /// Skip the optional row/column pruning step (the result is identical).
    #[arg(long)]
    no_prune: bool,
    /// Cross-check the result against the perturbation and zigzag oracles.
    #[arg(long)]
    verify: bool,
    /// Reduce poset grades on parallel workers.
    #[arg(long)]
    parallel_grades: bool,
    /// Write the result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchOpts {
    /// Comma-separated instance sizes, e.g. 250,500,1000.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    field: u64,
    #[arg(long, default_value_t = 4)]
    poset_size: usize,
    /// chain | antichain | random
    #[arg(long, default_value = "chain")]
    shape: String,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Input { kind: &'static str, message: String },
    Invalid(Vec<String>),
    Verification(Vec<String>),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input { .. } | Failure::Invalid(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Failure::Usage(message) => serde_json::json!({
                "error": { "kind": "usage", "message": message }
            }),
            Failure::Input { kind, message } => serde_json::json!({
                "error": { "kind": kind, "message": message }
            }),
            Failure::Invalid(violations) => serde_json::json!({
                "error": { "kind": "validate", "violations": violations }
            }),
            Failure::Verification(failures) => serde_json::json!({
                "error": { "kind": "verification", "failures": failures }
            }),
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input {
        kind: "file",
        message: format!("{}: {e}", path.display()),
    })
}

fn load_complex(path: &Path, field: Option<u64>) -> Result<conley::GradedComplex, Failure> {
    let text = read_input(path)?;
    parse_auto(&text, field).map_err(|e| match e {
        conley::io::IoError::Invalid(report) => {
            Failure::Invalid(report.violations.iter().map(|v| v.to_string()).collect())
        }
        other => Failure::Input {
            kind: "parse",
            message: other.to_string(),
        },
    })
}

fn write_output(target: Option<&Path>, text: &str) -> Result<(), Failure> {
    match target {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input {
            kind: "file",
            message: format!("{}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_compute(file: &Path, opts: &ComputeOpts) -> Result<(), Failure> {
    let cx = load_complex(file, opts.field)?;
    let pipeline = PipelineOptions {
        prune: !opts.no_prune,
        parallel: opts.parallel_grades,
        ..Default::default()
    };
    let (conley, state) = compute_with_state(&cx, pipeline).map_err(|e| Failure::Input {
        kind: "compute",
        message: e.to_string(),
    })?;
    if opts.verify {
        let report =
            oracle::verify_state(&state, Some(conley.delta())).map_err(|e| Failure::Input {
                kind: "oracle",
                message: e.to_string(),
            })?;
        if !report.is_ok() {
            return Err(Failure::Verification(
                report.failures.iter().map(|f| f.to_string()).collect(),
            ));
        }
    }
    write_output(
        opts.output.as_deref(),
        &serialize_result(&conley, Some(&cx)),
    )
}

fn run_validate(file: &Path, field: Option<u64>) -> Result<(), Failure> {
    let cx = load_complex(file, field)?;
    println!(
        "ok: {} generators over Z/{}Z, {} poset elements",
        cx.len(),
        cx.field().characteristic(),
        cx.poset().len()
    );
    Ok(())
}

fn run_oracle(file: &Path, field: Option<u64>) -> Result<(), Failure> {
    let cx = load_complex(file, field)?;
    let state = clearing_reduce(&cx, ReduceOptions::default()).map_err(|e| Failure::Input {
        kind: "compute",
        message: e.to_string(),
    })?;
    let to_input = |e: oracle::OracleError| Failure::Input {
        kind: "oracle",
        message: e.to_string(),
    };
    let blocks = oracle::split_blocks(&state).map_err(to_input)?;
    let mut failures = blocks.verify_anticommutation();
    let maps = oracle::build_contraction(&blocks).map_err(to_input)?;
    failures.extend(oracle::verify_contraction(&maps, &state).failures);
    let zigzag = oracle::zigzag_dm(&blocks);
    let perturbation = maps.dm_columns();
    if zigzag != perturbation {
        failures.push(oracle::IdentityFailure {
            identity: "zigzag = perturbation",
            detail: "the two oracle routes disagree".into(),
        });
    }
    if !failures.is_empty() {
        return Err(Failure::Verification(
            failures.iter().map(|f| f.to_string()).collect(),
        ));
    }
    // Assemble the oracle's own view of the Conley complex and print it.
    let index_gens: Vec<IndexGenerator> = blocks
        .morse_positions()
        .iter()
        .map(|&p| {
            let g = cx.generator(p);
            let chain = state
                .separating_basis()
                .cell(g.grade, g.dim)
                .homology
                .iter()
                .find(|c| c.pivot == p)
                .expect("morse position has a homology chain")
                .chain
                .clone();
            IndexGenerator {
                id: g.id.clone(),
                grade: g.grade,
                dim: g.dim,
                pivot: p,
                chain,
            }
        })
        .collect();
    let oracle_view =
        ConleyComplex::from_oracle(cx.poset_arc(), cx.field(), index_gens, perturbation);
    print!("{}", serialize_result(&oracle_view, Some(&cx)));
    Ok(())
}

fn run_bench(opts: &BenchOpts) -> Result<(), Failure> {
    let shape = match opts.shape.as_str() {
        "chain" => PosetShape::Chain,
        "antichain" => PosetShape::Antichain,
        "random" => PosetShape::RandomDag { edge_prob: 0.35 },
        other => {
            return Err(Failure::Usage(format!(
                "unknown poset shape `{other}` (chain | antichain | random)"
            )))
        }
    };
    let cfg = GeneratorConfig {
        seed: opts.seed,
        poset_size: opts.poset_size,
        shape,
        max_dim: opts.max_dim,
        density: opts.density,
        characteristic: opts.field,
        ..Default::default()
    };
    let table = scaling_run(&opts.sizes, &cfg).map_err(|e| Failure::Input {
        kind: "bench",
        message: e.to_string(),
    })?;
    let mut csv = table.to_csv();
    if let Some(slope) = table.loglog_slope() {
        csv.push_str(&format!("# loglog_slope,{slope:.3}\n"));
    }
    write_output(opts.csv.as_deref(), &csv)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            if e.use_stderr() {
                let failure = Failure::Usage(e.to_string());
                eprintln!("{}", failure.to_json());
                return ExitCode::from(failure.exit_code());
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let result = match &cli.command {
        Command::Validate { file, field } => run_validate(file, *field),
        Command::Compute { file, opts } => run_compute(file, opts),
        Command::Oracle { file, field } => run_oracle(file, *field),
        Command::Bench(opts) => run_bench(opts),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.to_json());
            ExitCode::from(failure.exit_code())
        }
    }
}

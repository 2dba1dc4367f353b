//! Command-line front end used by the `qem` binary.
//!
//! All subcommands are deterministic: the same inputs produce byte-identical
//! outputs. File outputs are written to a temporary file in the target
//! directory and renamed into place on success, so a failed run never
//! leaves a partial file behind.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::dataset::load_observations;
use crate::fit::{grid_search, refine, FitResult, GridSpec};
use crate::model::{
    predict_table, sequential_acceptance, trace_evolution, uf_decomposition, Cue, ModelParams,
    Probe, WordClass,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("failed to write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    /// Exit status: 2 for bad inputs or configuration, 1 for output
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Output(_) => 1,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "qem",
    version,
    about = "Two-stage Hamiltonian belief dynamics for three-list source recognition"
)]
pub struct QemCli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the 64 predicted acceptance probabilities and 16 unpacking factors as CSV.
    Predict {
        /// Parameters JSON file.
        #[arg(long)]
        params: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the eight drivers to an observations CSV by grid search plus simplex refinement.
    Fit {
        /// Observations CSV file.
        #[arg(long)]
        data: PathBuf,
        /// Lower grid bound applied to every driver.
        #[arg(long, default_value_t = -1.0)]
        grid_min: f64,
        /// Upper grid bound applied to every driver.
        #[arg(long, default_value_t = 1.0)]
        grid_max: f64,
        /// Grid points per driver.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..))]
        grid_points: u32,
        /// Refinement levels.
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        levels: u32,
        /// Skip the simplex refinement after the grid search.
        #[arg(long)]
        no_refine: bool,
        /// Output file for the fit-result JSON; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the acceptance-probability time course for one word class and cue as CSV.
    Trace {
        /// Parameters JSON file.
        #[arg(long)]
        params: PathBuf,
        /// Word class: HFC, HFA, LFC, or LFA.
        #[arg(long = "class", value_parser = parse_word_class)]
        word_class: WordClass,
        /// Cue list: L1, L2, L3, or L4.
        #[arg(long, value_parser = parse_cue)]
        cue: Cue,
        /// Samples per evolution stage; the output has twice this many rows.
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        steps: u32,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the 16 unpacking factors with their verbatim and gist balance terms.
    Uf {
        /// Parameters JSON file.
        #[arg(long)]
        params: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Show how the joint probability of two sequential single-list probes depends on their order.
    DemoOrder {
        /// Parameters JSON file.
        #[arg(long)]
        params: PathBuf,
        /// Word class: HFC, HFA, LFC, or LFA.
        #[arg(long = "class", value_parser = parse_word_class)]
        word_class: WordClass,
        /// Cue list: L1, L2, L3, or L4.
        #[arg(long, value_parser = parse_cue)]
        cue: Cue,
        /// First probe: L1, L2, or L3.
        #[arg(long, value_parser = parse_single_probe)]
        first: Probe,
        /// Second probe: L1, L2, or L3 (must differ from the first).
        #[arg(long, value_parser = parse_single_probe)]
        second: Probe,
    },
}

fn parse_word_class(s: &str) -> Result<WordClass, String> {
    s.parse()
}

fn parse_cue(s: &str) -> Result<Cue, String> {
    s.parse()
}

fn parse_single_probe(s: &str) -> Result<Probe, String> {
    let probe: Probe = s.parse()?;
    if probe.is_union() {
        return Err("the union probe L123 cannot be queried sequentially; pick L1, L2, or L3"
            .to_string());
    }
    Ok(probe)
}

/// Executes a parsed command line.
pub fn run(cli: QemCli) -> Result<(), CliError> {
    match cli.command {
        Command::Predict { params, out } => run_predict(&params, out.as_deref()),
        Command::Fit {
            data,
            grid_min,
            grid_max,
            grid_points,
            levels,
            no_refine,
            out,
        } => run_fit(
            &data,
            grid_min,
            grid_max,
            grid_points as usize,
            levels as usize,
            no_refine,
            out.as_deref(),
        ),
        Command::Trace {
            params,
            word_class,
            cue,
            steps,
            out,
        } => run_trace(&params, word_class, cue, steps as usize, out.as_deref()),
        Command::Uf { params, out } => run_uf(&params, out.as_deref()),
        Command::DemoOrder {
            params,
            word_class,
            cue,
            first,
            second,
        } => run_demo_order(&params, word_class, cue, first, second),
    }
}

fn load_params(path: &Path) -> Result<ModelParams, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read params file {}: {e}", path.display())))?;
    let params: ModelParams = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("invalid params file {}: {e}", path.display())))?;
    params
        .validate()
        .map_err(|e| CliError::Input(format!("invalid params file {}: {e}", path.display())))?;
    Ok(params)
}

/// Writes to stdout, or atomically to a file via a same-directory
/// temporary.
fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(content.as_bytes())?;
            tmp.persist(path).map_err(|e| CliError::Output(e.error))?;
            Ok(())
        }
    }
}

fn run_predict(params_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let params = load_params(params_path)?;
    let table = predict_table(&params).map_err(input_err)?;
    let mut text = String::from("word_class,cue,probe,probability\n");
    for (class, cue, probe, p) in table.cells() {
        let _ = writeln!(text, "{class},{cue},{probe},{p:.6}");
    }
    text.push_str("word_class,cue,UF\n");
    for (class, cue, uf) in table.unpacking_cells() {
        let _ = writeln!(text, "{class},{cue},{uf:.6}");
    }
    write_output(out, &text)
}

fn run_fit(
    data_path: &Path,
    grid_min: f64,
    grid_max: f64,
    grid_points: usize,
    levels: usize,
    no_refine: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let file = fs::File::open(data_path)
        .map_err(|e| CliError::Input(format!("cannot read data file {}: {e}", data_path.display())))?;
    let obs = load_observations(file)
        .map_err(|e| CliError::Input(format!("{}: {e}", data_path.display())))?;

    let spec = GridSpec::uniform(grid_min, grid_max, grid_points, levels, 0.5);
    let coarse = grid_search(&obs, &spec, &ModelParams::zero_drivers()).map_err(input_err)?;
    let result = if no_refine {
        FitResult {
            trajectory: None,
            ..coarse
        }
    } else {
        let polished = refine(&obs, &coarse.params).map_err(input_err)?;
        FitResult {
            params: polished.params,
            rmse: polished.rmse,
            evaluations: coarse.evaluations + polished.evaluations,
            trajectory: None,
        }
    };

    eprintln!("rmse: {:.6}", result.rmse);
    let mut json = serde_json::to_string_pretty(&result).expect("fit result serializes");
    json.push('\n');
    write_output(out, &json)
}

fn run_trace(
    params_path: &Path,
    word_class: WordClass,
    cue: Cue,
    steps: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let params = load_params(params_path)?;
    let points = trace_evolution(word_class, cue, &params, steps).map_err(input_err)?;
    let mut text = String::from("t,p_L1,p_L2,p_L3,p_L123\n");
    for p in points {
        let _ = writeln!(
            text,
            "{:.6},{:.6},{:.6},{:.6},{:.6}",
            p.t, p.p_l1, p.p_l2, p.p_l3, p.p_l123
        );
    }
    write_output(out, &text)
}

fn run_uf(params_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let params = load_params(params_path)?;
    let table = predict_table(&params).map_err(input_err)?;
    let mut text = String::from("word_class,cue,UF,verbatim_balance,gist_balance\n");
    for (class, cue, uf) in table.unpacking_cells() {
        let d = uf_decomposition(class, cue, &params).map_err(input_err)?;
        let _ = writeln!(
            text,
            "{class},{cue},{uf:.6},{:.6},{:.6}",
            d.verbatim_balance, d.gist_balance
        );
    }
    write_output(out, &text)
}

fn run_demo_order(
    params_path: &Path,
    word_class: WordClass,
    cue: Cue,
    first: Probe,
    second: Probe,
) -> Result<(), CliError> {
    if first == second {
        return Err(CliError::Input(format!(
            "the two probes must differ, got {first} twice"
        )));
    }
    let params = load_params(params_path)?;
    let forward =
        sequential_acceptance(word_class, cue, first, second, &params).map_err(input_err)?;
    let backward =
        sequential_acceptance(word_class, cue, second, first, &params).map_err(input_err)?;

    let mut text = String::new();
    let _ = writeln!(
        text,
        "order {first},{second}: p_first={:.6} p_joint={:.6}",
        forward.p_first, forward.p_joint
    );
    let _ = writeln!(
        text,
        "order {second},{first}: p_first={:.6} p_joint={:.6}",
        backward.p_first, backward.p_joint
    );
    let _ = writeln!(
        text,
        "joint difference: {:.6}",
        forward.p_joint - backward.p_joint
    );
    write_output(None, &text)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qreadout_core::experiment::{
    compare, emit_outputs, load_report, run_scenario, Column, ExperimentError, NoiseMode,
    RunOptions, Scenario, ScenarioConfig, Settings,
};

/// Two-qubit readout experiments: calibration, circuits, multiplied and
/// conditional readout paradigms, and coupler characterization.
#[derive(Debug, Parser)]
#[command(name = "qreadout", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single-qubit calibration matrices for both qubits and their product.
    Calibrate(RunArgs),
    /// Prepare the four basis states and read them out.
    Init(RunArgs),
    /// Run a single-qubit gate circuit (`circuit.file`) on the four basis states.
    SingleQubit(RunArgs),
    /// CNOT on the four basis states.
    Cnot(RunArgs),
    /// Bell circuit on the four basis states.
    Bell(RunArgs),
    /// |11⟩–|02⟩ swap population over detuning and pulse length.
    Chevron(RunArgs),
    /// Fit the qubit–qubit coupling to avoided-crossing spectroscopy.
    AlcFit(RunArgs),
    /// Extract the conditional phase and leakage from On/Off fringes.
    CondOsc(RunArgs),
    /// Per-state fidelity deltas between two run reports.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Flat `key = value` config; built-in device defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run seed (or `seed =` in the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Shots per prepared state.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    shots: Option<u64>,
    /// Repetitions.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    reps: Option<u64>,
    /// Also write every shot to shots_rep<k>.csv.
    #[arg(long)]
    dump_shots: bool,
    /// Readout noise: off, default or custom.
    #[arg(long, value_parser = parse_noise)]
    noise: Option<NoiseMode>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    report_a: PathBuf,
    report_b: PathBuf,
    /// Fidelity column taken from A: multiplied or conditional.
    #[arg(long, default_value = "conditional", value_parser = parse_column)]
    column_a: Column,
    /// Fidelity column taken from B.
    #[arg(long, default_value = "conditional", value_parser = parse_column)]
    column_b: Column,
}

fn parse_noise(s: &str) -> Result<NoiseMode, String> {
    s.parse().map_err(|e: ExperimentError| e.to_string())
}

fn parse_column(s: &str) -> Result<Column, String> {
    s.parse().map_err(|e: ExperimentError| e.to_string())
}

fn run(scenario: Scenario, args: RunArgs) -> Result<(), ExperimentError> {
    let options = RunOptions {
        seed: args.seed,
        n_shots: args.shots.map(|n| n as usize),
        repetitions: args.reps.map(|n| n as usize),
        noise: args.noise,
        dump_shots: args.dump_shots,
    };
    let config = match &args.config {
        Some(path) => ScenarioConfig::load(scenario, path, &options)?,
        None => ScenarioConfig::resolve(scenario, Settings::default(), &options, None)?,
    };
    for w in &config.warnings {
        eprintln!("warning: {w}");
    }
    let output = run_scenario(&config)?;
    for path in emit_outputs(&output, &args.out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{:+.2}%", 100.0 * v))
}

fn run_compare(args: CompareArgs) -> Result<(), ExperimentError> {
    let a = load_report(&args.report_a)?;
    let b = load_report(&args.report_b)?;
    let rows = compare(&a, &b, args.column_a, args.column_b)?;
    println!(
        "{:<8} {:>10} {:>10} {:>10} {:>10}",
        "state", "A", "B", "A-B", "rel"
    );
    for r in rows {
        println!(
            "{:<8} {:>10.6} {:>10.6} {:>+10.6} {:>10}",
            format!("|{}>", r.label),
            r.a,
            r.b,
            r.delta,
            fmt_opt(r.relative)
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Calibrate(a) => run(Scenario::Calibrate, a),
        Command::Init(a) => run(Scenario::Init, a),
        Command::SingleQubit(a) => run(Scenario::SingleQubit, a),
        Command::Cnot(a) => run(Scenario::Cnot, a),
        Command::Bell(a) => run(Scenario::Bell, a),
        Command::Chevron(a) => run(Scenario::Chevron, a),
        Command::AlcFit(a) => run(Scenario::AlcFit, a),
        Command::CondOsc(a) => run(Scenario::CondOsc, a),
        Command::Compare(a) => run_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qreadout: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

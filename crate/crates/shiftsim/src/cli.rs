//! Command-line front end. Exit codes: 0 success, 1 a check failed,
//! 2 usage, file or parse error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use shiftsim_core::cells::{build_ff, build_full_adder, build_mux4, overlap_stress};
use shiftsim_core::datapath::{build_alu, build_system_with, build_usr_with};
use shiftsim_core::harness::{
    check_alu_exhaustive, check_system_random, check_usr_exhaustive, check_usr_random, delay_report_with, CheckReport,
    DelayReport,
};
use shiftsim_core::{simulate, CellDelayConfig, FfModel, FlipFlopVariant, Netlist, Time};

use crate::json::{parse_config, parse_netlist, parse_stimulus, serialize_netlist};
use crate::waves::write_vcd;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser)]
#[command(name = "shiftsim", version, about = "Four-valued gate-level simulator for a shift-register datapath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a JSON netlist under a JSON stimulus.
    Simulate {
        netlist: PathBuf,
        stimulus: PathBuf,
        /// End of the run in ns.
        #[arg(long)]
        until: u64,
        /// Write the waveform here instead of printing final output values.
        #[arg(long)]
        vcd: Option<PathBuf>,
    },
    /// Write a catalog circuit as a JSON netlist.
    Build {
        cell: CellArg,
        /// Flip-flop used by usr and system.
        #[arg(long, default_value = "dff")]
        ff: FlipFlopVariant,
        #[arg(long, value_enum, default_value_t = ModelArg::Behavioral)]
        model: ModelArg,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare a circuit against its golden model.
    Check {
        circuit: CircuitArg,
        #[arg(long, default_value = "dff")]
        ff: FlipFlopVariant,
        #[arg(long, value_enum, default_value_t = ModelArg::Behavioral)]
        model: ModelArg,
        /// Check this netlist file instead of the built-in circuit.
        #[arg(long)]
        netlist: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random steps; usr runs its exhaustive check when absent.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Measure clock-to-output delay of the shift register for each flip-flop.
    Delay {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = DelayModelArg::Behavioral)]
        model: DelayModelArg,
        #[arg(long)]
        json: bool,
    },
    /// Overlap the two clock phases and report which flip-flops keep their state.
    Stress {
        /// Overlap in ps.
        #[arg(long, default_value_t = 2000)]
        overlap_ps: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CellArg {
    Dff,
    Dtgms,
    Mtspc,
    Tgms,
    Mux4,
    Fulladder,
    Usr,
    Alu,
    System,
}

#[derive(Clone, Copy, ValueEnum)]
enum CircuitArg {
    Alu,
    Usr,
    System,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Behavioral,
    Structural,
}

#[derive(Clone, Copy, ValueEnum)]
enum DelayModelArg {
    Behavioral,
    Structural,
    Calibrated,
}

impl From<ModelArg> for FfModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Behavioral => FfModel::Behavioral,
            ModelArg::Structural => FfModel::Structural,
        }
    }
}

struct Failed(String);

impl<E: std::fmt::Display> From<E> for Failed {
    fn from(e: E) -> Self {
        Failed(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failed> {
    fs::read_to_string(path).map_err(|e| Failed(format!("{}: {e}", path.display())))
}

fn with_path<T, E: std::fmt::Display>(path: &Path, r: Result<T, E>) -> Result<T, Failed> {
    r.map_err(|e| Failed(format!("{}: {e}", path.display())))
}

fn load_config(path: Option<&Path>) -> Result<CellDelayConfig, Failed> {
    match path {
        None => Ok(CellDelayConfig::default()),
        Some(p) => with_path(p, parse_config(&read(p)?)),
    }
}

fn load_netlist(path: &Path) -> Result<Netlist, Failed> {
    with_path(path, parse_netlist(&read(path)?))
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failed> {
    match path {
        Some(p) => with_path(p, fs::write(p, text)),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

/// Run the tool on `args` (including the program name) and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failed(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failed> {
    match command {
        Command::Simulate { netlist, stimulus, until, vcd } => {
            let n = load_netlist(&netlist)?;
            let stim = with_path(&stimulus, parse_stimulus(&read(&stimulus)?))?;
            let w = simulate(&n, &stim, Time::ns(until))?;
            match vcd {
                Some(path) => {
                    let file = with_path(&path, fs::File::create(&path))?;
                    with_path(&path, write_vcd(std::io::BufWriter::new(file), &w, n.name()))?;
                }
                None => {
                    for name in n.output_names() {
                        let id = w.net_id(name).expect("outputs are nets");
                        writeln!(out, "{name} = {}", w.final_value(id).to_char())?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Build { cell, ff, model, config, output } => {
            let cfg = load_config(config.as_deref())?;
            let model = model.into();
            let n = match cell {
                CellArg::Dff => build_ff(FlipFlopVariant::Dff, &cfg, model),
                CellArg::Dtgms => build_ff(FlipFlopVariant::Dtgms, &cfg, model),
                CellArg::Mtspc => build_ff(FlipFlopVariant::Mtspc, &cfg, model),
                CellArg::Tgms => build_ff(FlipFlopVariant::Tgms, &cfg, model),
                CellArg::Mux4 => build_mux4(&cfg),
                CellArg::Fulladder => build_full_adder(&cfg),
                CellArg::Usr => build_usr_with(ff, &cfg, model),
                CellArg::Alu => build_alu(&cfg),
                CellArg::System => build_system_with(ff, &cfg, model),
            };
            write_output(output.as_deref(), &serialize_netlist(&n), out)?;
            Ok(EXIT_OK)
        }
        Command::Check { circuit, ff, model, netlist, seed, steps, config, json } => {
            let cfg = load_config(config.as_deref())?;
            let n = match &netlist {
                Some(p) => load_netlist(p)?,
                None => match circuit {
                    CircuitArg::Alu => build_alu(&cfg),
                    CircuitArg::Usr => build_usr_with(ff, &cfg, model.into()),
                    CircuitArg::System => build_system_with(ff, &cfg, model.into()),
                },
            };
            let report = match (circuit, steps) {
                (CircuitArg::Alu, _) => check_alu_exhaustive(&n)?,
                (CircuitArg::Usr, None) => check_usr_exhaustive(&n)?,
                (CircuitArg::Usr, Some(steps)) => check_usr_random(&n, seed, steps)?,
                (CircuitArg::System, steps) => check_system_random(&n, seed, steps.unwrap_or(1000))?,
            };
            print_check(&report, json, out)?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Delay { config, model, json } => {
            let cfg = load_config(config.as_deref())?;
            let model = match model {
                DelayModelArg::Behavioral => FfModel::Behavioral,
                DelayModelArg::Structural => FfModel::Structural,
                DelayModelArg::Calibrated => FfModel::Calibrated(Time::ZERO),
            };
            let report = delay_report_with(&cfg, model);
            print_delays(&report, json, out)?;
            Ok(if report.entries.iter().all(|e| e.measured.is_ok()) { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Stress { overlap_ps, config } => {
            let cfg = load_config(config.as_deref())?;
            for v in FlipFlopVariant::ALL {
                let outcome = overlap_stress(v, Time::ps(overlap_ps), &cfg)?;
                writeln!(out, "{:<22} {outcome:?}", v.label())?;
            }
            Ok(EXIT_OK)
        }
    }
}

const SHOWN_FAILURES: usize = 10;

fn print_check(report: &CheckReport, as_json: bool, out: &mut dyn Write) -> Result<(), Failed> {
    let passed = report.cases - report.failures.len();
    if as_json {
        let failures: Vec<_> = report
            .failures
            .iter()
            .take(SHOWN_FAILURES)
            .map(|f| json!({"case": f.case, "stimulus": f.stimulus, "expected": f.expected, "observed": f.observed}))
            .collect();
        let doc = json!({
            "circuit": report.circuit,
            "cases": report.cases,
            "passed": passed,
            "failed": report.failures.len(),
            "failures": failures,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        writeln!(out, "{}: {passed}/{} pass", report.circuit, report.cases)?;
        for f in report.failures.iter().take(SHOWN_FAILURES) {
            writeln!(out, "  case {}: {} expected {} observed {}", f.case, f.stimulus, f.expected, f.observed)?;
        }
        if report.failures.len() > SHOWN_FAILURES {
            writeln!(out, "  ... {} more", report.failures.len() - SHOWN_FAILURES)?;
        }
    }
    Ok(())
}

fn print_delays(report: &DelayReport, as_json: bool, out: &mut dyn Write) -> Result<(), Failed> {
    let min: Vec<&str> = report.min_set().into_iter().map(|v| v.label()).collect();
    if as_json {
        let entries: Vec<_> = report
            .entries
            .iter()
            .map(|e| match &e.measured {
                Ok(t) => json!({"variant": e.variant.name(), "delay_ps": t.as_ps(), "delay_ns": e.ns(), "reference_ns": e.reference_ns}),
                Err(msg) => json!({"variant": e.variant.name(), "error": msg, "reference_ns": e.reference_ns}),
            })
            .collect();
        let doc = json!({"entries": entries, "minimum": report.min_set().iter().map(|v| v.name()).collect::<Vec<_>>()});
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        writeln!(out, "{:<22} {:>9} {:>9}", "flip-flop", "delay_ns", "reference")?;
        for e in &report.entries {
            let measured = match (&e.measured, e.ns()) {
                (Ok(_), Some(ns)) => ns.to_string(),
                (Err(msg), _) => format!("error: {msg}"),
                _ => "-".to_string(),
            };
            writeln!(out, "{:<22} {measured:>9} {:>9}", e.variant.label(), e.reference_ns)?;
        }
        writeln!(out, "minimum: {}", min.join(", "))?;
    }
    Ok(())
}

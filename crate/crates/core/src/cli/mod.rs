//! The `entfid` command-line front end.
//!
//! Exit codes: 0 success, 1 property violation, 2 input or validation error.

pub mod factory;
pub mod output;
pub mod suites;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channels::{channel_from_unitary_rep, QuantumChannel, UnitaryRep};
use crate::error::{Error, Result};
use crate::extremal::{f1_search, f2_search, knill_laflamme_check, SearchBudget, MAX_AUX_DIM};
use crate::fidelity::{fidelity_report, kraus_sum, uhlmann_fidelity};
use crate::numerics::ComplexMatrix;
use crate::states::DensityOperator;

use factory::{epr_half, family_member, load_channel, load_state, CHANNEL_SPECS, STATE_SPECS};
use output::{csv, fmt12, json12};
use suites::{run_suites, PropertyRow, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

const ABOUT: &str = "Fidelity and entanglement fidelity of quantum states and channels.

All fidelities use the squared convention: F(|a>,|b>) = |<a|b>|^2, and in general
F(rho1, rho2) = (tr |sqrt(rho1) sqrt(rho2)|)^2. Floats are printed at 12 significant digits.";

const AFTER_HELP: &str = "\
--state and --channel take a JSON file path or a factory spec `name[:key=value,...]`.

State files:   {\"dim\": n, \"entries\": [[re, im], ...]}  (row-major)
               {\"dim\": n, \"amplitudes\": [[re, im], ...]}
Channel files: {\"dim_in\": n, \"dim_out\": m, \"kraus\": [{\"dim\": n, \"entries\": ...}, ...]}

Exit codes: 0 success, 1 property violation, 2 input or validation error.";

#[derive(Debug, Parser)]
#[command(name = "entfid", version, about = ABOUT, after_help = AFTER_HELP)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed for stochastic commands.
    #[arg(long, global = true, env = "ENTFID_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format (each command has its own default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// F(rho, E(rho)) and both entanglement-fidelity formulas for one state and channel (default JSON).
    #[command(after_help = format!("States:\n{STATE_SPECS}\n\nChannels:\n{CHANNEL_SPECS}\n\nCSV columns: quantity,value"))]
    Report(ReportArgs),
    /// Seeded property batches (default CSV).
    #[command(after_help = "CSV columns: property,samples,max_violation,tolerance,pass\n\
        Exit 1 when any batch exceeds its tolerance.")]
    Verify(VerifyArgs),
    /// The EPR storage example: identical state fidelity, different entanglement fidelity.
    #[command(name = "epr-demo", after_help = "CSV columns: channel,quantity,value,expected,pass")]
    EprDemo(EprArgs),
    /// Empirical check of F_e >= 1 - 3 eps / 2, with eps estimated over pure inputs (default JSON).
    #[command(name = "kl-check", after_help = format!("Channels:\n{CHANNEL_SPECS}"))]
    KlCheck(KlArgs),
    /// F(rho, E(rho)) and F_e(rho, E) across a channel family (default CSV).
    #[command(after_help = "Families: identity, depolarizing, dephasing, amplitude_damping, replace_mixed\n\
        CSV columns: parameter,fidelity,entanglement_fidelity")]
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// State: JSON file or spec.
    #[arg(long)]
    pub state: String,
    /// Channel: JSON file or spec.
    #[arg(long)]
    pub channel: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Instances per property batch.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Largest system dimension drawn.
    #[arg(long, default_value_t = 4)]
    pub max_dim: usize,
    /// Auxiliary dimension for the search batches (default: rank of each state).
    #[arg(long)]
    pub dt: Option<usize>,
    /// Restarts per search.
    #[arg(long, default_value_t = 2)]
    pub restarts: usize,
    /// Tolerance override, `property=value` (repeatable).
    #[arg(long = "tol", value_name = "PROPERTY=VALUE")]
    pub tolerances: Vec<String>,
    #[arg(long, hide = true)]
    pub inject_faulty_channel: bool,
}

#[derive(Debug, Args)]
pub struct EprArgs {
    /// Also minimize over extensions and auxiliary dynamics.
    #[arg(long)]
    pub search: bool,
    /// Auxiliary dimension for the searches.
    #[arg(long, default_value_t = 2)]
    pub dt: usize,
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
}

#[derive(Debug, Args)]
pub struct KlArgs {
    /// Channel: JSON file or spec (square).
    #[arg(long)]
    pub channel: String,
    /// System dimension for specs without `d`.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Random states checked besides I/d.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Channel family.
    #[arg(long)]
    pub family: String,
    /// Comma-separated parameter values.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    /// Input state: JSON file or spec.
    #[arg(long, default_value = "mixed:d=2")]
    pub state: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&config) {
        Ok((text, code)) => {
            let written = match &config.out {
                Some(path) => std::fs::write(path, &text)
                    .map_err(|e| format!("cannot write `{}`: {e}", path.display())),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => code,
                Err(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    EXIT_INPUT
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn exit_for(pass: bool) -> i32 {
    if pass {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn execute(config: &RunConfig) -> Result<(String, i32)> {
    match &config.command {
        Command::Report(a) => cmd_report(a, config.format.unwrap_or(Format::Json)),
        Command::Verify(a) => cmd_verify(a, config.seed, config.format.unwrap_or(Format::Csv)),
        Command::EprDemo(a) => cmd_epr_demo(a, config.seed, config.format),
        Command::KlCheck(a) => cmd_kl_check(a, config.seed, config.format.unwrap_or(Format::Json)),
        Command::Sweep(a) => cmd_sweep(a, config.format.unwrap_or(Format::Csv)),
    }
}

fn cmd_report(args: &ReportArgs, format: Format) -> Result<(String, i32)> {
    let rho = load_state(&args.state)?;
    let e = load_channel(&args.channel, Some(rho.dim()))?;
    let report = fidelity_report(&rho, &e)?;
    let text = match format {
        Format::Json => json12(&report),
        Format::Csv => {
            let mut rows = vec![
                vec!["fidelity".into(), fmt12(report.fidelity)],
                vec!["fe_purification".into(), fmt12(report.fe_purification)],
                vec!["fe_kraus".into(), fmt12(report.fe_kraus)],
                vec!["fe_delta".into(), fmt12(report.fe_delta)],
            ];
            rows.extend(
                report
                    .inequalities
                    .iter()
                    .map(|c| vec![c.name.clone(), c.pass.to_string()]),
            );
            csv(&["quantity", "value"], &rows)
        }
    };
    Ok((text, exit_for(report.all_pass())))
}

fn parse_tolerances(items: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for item in items {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("--tol `{item}`: expected property=value")))?;
        if !suites::is_property(name) {
            return Err(Error::Input(format!("--tol `{item}`: unknown property `{name}`")));
        }
        let v: f64 = value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| Error::Input(format!("--tol `{item}`: bad tolerance `{value}`")))?;
        map.insert(name.to_string(), v);
    }
    Ok(map)
}

fn cmd_verify(args: &VerifyArgs, seed: u64, format: Format) -> Result<(String, i32)> {
    if args.max_dim < 2 {
        return Err(Error::Input(format!("--max-dim must be at least 2, got {}", args.max_dim)));
    }
    if let Some(dt) = args.dt {
        if dt == 0 || dt > MAX_AUX_DIM {
            return Err(Error::Input(format!("--dt must be in 1..={MAX_AUX_DIM}, got {dt}")));
        }
    }
    if args.samples == 0 {
        return Err(Error::Input("--samples must be positive".into()));
    }
    if args.restarts == 0 {
        return Err(Error::Input("--restarts must be positive".into()));
    }
    let config = SuiteConfig {
        seed,
        samples: args.samples,
        max_dim: args.max_dim,
        aux_dim: args.dt,
        restarts: args.restarts,
        tolerance_overrides: parse_tolerances(&args.tolerances)?,
        inject_faulty_channel: args.inject_faulty_channel,
    };
    let rows = run_suites(&config);
    let pass = rows.iter().all(|r| r.pass);
    Ok((render_rows(&rows, format), exit_for(pass)))
}

fn render_rows(rows: &[PropertyRow], format: Format) -> String {
    match format {
        Format::Json => json12(&rows),
        Format::Csv => csv(
            &["property", "samples", "max_violation", "tolerance", "pass"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.property.clone(),
                        r.samples.to_string(),
                        fmt12(r.max_violation),
                        fmt12(r.tolerance),
                        r.pass.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    }
}

/// Agreement required between the demo's computed and expected values.
const EPR_TOL: f64 = 1e-6;

#[derive(Debug, Serialize)]
struct DemoRow {
    channel: &'static str,
    quantity: &'static str,
    value: f64,
    expected: f64,
    pass: bool,
}

/// `E2` on Alice's qubit: swap with a maximally mixed ancilla, trace the ancilla.
fn swap_with_mixed_ancilla() -> Result<QuantumChannel> {
    let swap = ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])?;
    channel_from_unitary_rep(&UnitaryRep::new(swap, DensityOperator::maximally_mixed(2), 2)?)
}

fn cmd_epr_demo(args: &EprArgs, seed: u64, format: Option<Format>) -> Result<(String, i32)> {
    let rho_a = epr_half()?;
    let channels = [
        ("E1", QuantumChannel::identity(2), 1.0, 1.0),
        ("E2", swap_with_mixed_ancilla()?, 1.0, 0.25),
    ];
    let budget = if args.search {
        Some(SearchBudget::new(args.restarts, 1500, seed, args.dt)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    let mut push = |channel, quantity, value: f64, expected: f64| {
        rows.push(DemoRow {
            channel,
            quantity,
            value,
            expected,
            pass: (value - expected).abs() <= EPR_TOL,
        })
    };
    for (name, e, f_expected, fe_expected) in &channels {
        let out = e.apply(&rho_a)?;
        push(*name, "fidelity", uhlmann_fidelity(&rho_a, &out)?.value, *f_expected);
        push(*name, "entanglement_fidelity", kraus_sum(rho_a.matrix(), e), *fe_expected);
        if let Some(b) = &budget {
            push(*name, "f2_search", f2_search(&rho_a, e, b)?.min_value, *fe_expected);
            push(*name, "f1_search", f1_search(&rho_a, e, b)?.min_value, *fe_expected);
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    let text = match format {
        Some(Format::Json) => json12(&rows),
        Some(Format::Csv) => csv(
            &["channel", "quantity", "value", "expected", "pass"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.channel.to_string(),
                        r.quantity.to_string(),
                        fmt12(r.value),
                        fmt12(r.expected),
                        r.pass.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        None => demo_table(&rows, budget.as_ref()),
    };
    Ok((text, exit_for(pass)))
}

fn demo_table(rows: &[DemoRow], budget: Option<&SearchBudget>) -> String {
    let mut s = String::new();
    s.push_str("Alice and Bob share (|01> - |10>)/sqrt(2); Alice's qubit is rho_A = I/2.\n");
    s.push_str("E1: identity.  E2: swap with a maximally mixed ancilla qubit, so rho_A -> I/2.\n");
    s.push_str("Fidelities are squared overlaps.\n\n");
    s.push_str(&format!(
        "{:<8}{:<24}{:<16}{:<16}{}\n",
        "channel", "quantity", "value", "expected", "match"
    ));
    for r in rows {
        s.push_str(&format!(
            "{:<8}{:<24}{:<16}{:<16}{}\n",
            r.channel,
            r.quantity,
            fmt12(r.value),
            fmt12(r.expected),
            if r.pass { "yes" } else { "NO" }
        ));
    }
    if let Some(b) = budget {
        s.push_str(&format!(
            "\nsearch: d_T = {}, {} restarts, seed {}\n",
            b.aux_dim, b.restarts, b.seed
        ));
    }
    s.push_str(if rows.iter().all(|r| r.pass) {
        "\nBoth channels store rho_A perfectly (F = 1); only E1 preserves the entanglement.\n"
    } else {
        "\nMISMATCH with the expected values.\n"
    });
    s
}

fn cmd_kl_check(args: &KlArgs, seed: u64, format: Format) -> Result<(String, i32)> {
    let e = load_channel(&args.channel, Some(args.dim))?;
    let budget = SearchBudget::new(args.restarts.max(1), 2000, seed, 1)?;
    let report = knill_laflamme_check(&e, args.samples, &budget)?;
    let text = match format {
        Format::Json => json12(&report),
        Format::Csv => {
            let v = serde_json::to_value(&report).expect("plain data serializes");
            let rows: Vec<Vec<String>> = v
                .as_object()
                .expect("struct serializes to object")
                .iter()
                .map(|(k, v)| {
                    let value = v.as_f64().filter(|_| !v.is_u64()).map(fmt12).unwrap_or_else(|| v.to_string());
                    vec![k.clone(), value]
                })
                .collect();
            csv(&["quantity", "value"], &rows)
        }
    };
    Ok((text, exit_for(report.pass)))
}

#[derive(Debug, Serialize)]
struct SweepRow {
    parameter: f64,
    fidelity: f64,
    entanglement_fidelity: f64,
}

fn cmd_sweep(args: &SweepArgs, format: Format) -> Result<(String, i32)> {
    let grid: Vec<f64> = args
        .grid
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Input(format!("--grid: `{s}` is not a number")))
        })
        .collect::<Result<_>>()?;
    if grid.is_empty() {
        return Err(Error::Input("--grid: empty parameter grid".into()));
    }
    let rho = load_state(&args.state)?;
    let rows = grid
        .iter()
        .map(|&p| {
            let e = family_member(&args.family, p, rho.dim())?;
            Ok(SweepRow {
                parameter: p,
                fidelity: uhlmann_fidelity(&rho, &e.apply(&rho)?)?.value,
                entanglement_fidelity: kraus_sum(rho.matrix(), &e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let text = match format {
        Format::Json => json12(&rows),
        Format::Csv => csv(
            &["parameter", "fidelity", "entanglement_fidelity"],
            &rows
                .iter()
                .map(|r| vec![fmt12(r.parameter), fmt12(r.fidelity), fmt12(r.entanglement_fidelity)])
                .collect::<Vec<_>>(),
        ),
    };
    Ok((text, EXIT_OK))
}

//! Command-line front-end: sweeps, regime optimization, verification runs
//! and target inversion.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use mzqubit::analytic::{solve_target, QubitTarget, SolveStrategy, TargetFamily};
use mzqubit_explorer::config::ConfigFile;
use mzqubit_explorer::emit::{emit, Format};
use mzqubit_explorer::optimize::{optimize_regime, Objective, OptimizeSpec, SearchBox};
use mzqubit_explorer::presets;
use mzqubit_explorer::sweep::{
    run_sweep, Axis, EngineChoice, Param, Quantity, SweepSpec,
};
use mzqubit_explorer::verify;
use mzqubit_explorer::{ExplorerError, Result};

#[derive(Parser)]
#[command(
    name = "mzqubit",
    version,
    about = "Conditional double-interferometer qubit source: sweeps, optimization, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate quantities over a parameter grid and emit CSV or JSON.
    Sweep(SweepArgs),
    /// Search for an optimal working regime.
    Optimize(OptimizeArgs),
    /// Run cross-engine and invariant verification; exits nonzero on any violation.
    Verify(VerifyArgs),
    /// Invert a target superposition a0|0> + a1|1> into device settings.
    Solve(SolveArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Named sweep preset (fig2, fig3, fig4-eta100, fig4-eta50).
    #[arg(long)]
    preset: Option<String>,
    /// First phase shift: a value, or "lo:hi" to sweep.
    #[arg(long)]
    phi1: Option<String>,
    /// Second phase shift: a value, or "lo:hi" to sweep.
    #[arg(long)]
    phi2: Option<String>,
    /// Coherent amplitude modulus: a value, or "lo:hi" to sweep.
    #[arg(long)]
    gamma_abs: Option<String>,
    /// Coherent amplitude phase: a value, or "lo:hi" to sweep.
    #[arg(long)]
    gamma_arg: Option<String>,
    /// Quantum efficiency: a value, or "lo:hi" to sweep.
    #[arg(long)]
    eta: Option<String>,
    /// Comma-separated quantities (p10, p01, pstar, pyn, fyn, pyn_bal,
    /// fyn_bal, p_pc, f_pc, overlap, coeffs).
    #[arg(long)]
    quantities: Option<String>,
    /// Computational route: analytic, numeric, or both.
    #[arg(long)]
    engine: Option<String>,
    /// Points per swept axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Explicit Fock cutoff for numeric evaluation.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Key-value config file standing in for flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Named optimization preset (fig2).
    #[arg(long)]
    preset: Option<String>,
    /// Objective: pstar (balanced-target probability) or
    /// pyn-constrained (click probability under a fidelity floor).
    #[arg(long)]
    objective: Option<String>,
    /// Fidelity floor for the constrained objective.
    #[arg(long)]
    fidelity_min: Option<f64>,
    /// Quantum efficiency for the constrained objective.
    #[arg(long)]
    eta: Option<f64>,
    /// Search interval for the first phase shift, "lo:hi".
    #[arg(long)]
    phi1: Option<String>,
    /// Search interval for the second phase shift, "lo:hi".
    #[arg(long)]
    phi2: Option<String>,
    /// Points per side of the initial scan.
    #[arg(long)]
    grid: Option<usize>,
    /// Write the outcome as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Verification preset: standard, fine, or appendix.
    #[arg(long, default_value = "standard")]
    preset: String,
    /// Multiplies every tolerance; a failure-path test hook.
    #[arg(long, hide = true, default_value_t = 1.0)]
    tolerance_scale: f64,
    /// Write the report as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Vacuum amplitude, "re" or "re,im".
    #[arg(long)]
    a0: String,
    /// One-photon amplitude, "re" or "re,im".
    #[arg(long)]
    a1: String,
    /// Representative selection: max-prob (default) or fixed.
    #[arg(long)]
    strategy: Option<String>,
    /// First phase shift for the fixed strategy.
    #[arg(long)]
    phi1: Option<f64>,
    /// Second phase shift for the fixed strategy.
    #[arg(long)]
    phi2: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep(args) => run_sweep_command(args).map(|_| ExitCode::SUCCESS),
        Command::Optimize(args) => run_optimize_command(args).map(|_| ExitCode::SUCCESS),
        Command::Verify(args) => run_verify_command(args),
        Command::Solve(args) => run_solve_command(args).map(|_| ExitCode::SUCCESS),
    }
}

/// "x" fixes a parameter; "lo:hi" declares an axis.
enum ValueOrRange {
    Value(f64),
    Range(f64, f64),
}

fn parse_value_or_range(s: &str, flag: &str) -> Result<ValueOrRange> {
    let bad = || ExplorerError::Spec(format!("--{flag}: expected a number or lo:hi, got {s:?}"));
    if let Some((lo, hi)) = s.split_once(':') {
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        Ok(ValueOrRange::Range(lo, hi))
    } else {
        Ok(ValueOrRange::Value(s.trim().parse().map_err(|_| bad())?))
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn run_sweep_command(args: SweepArgs) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let preset = cfg
        .merge(args.preset.as_deref(), "preset")
        .map(str::to_string);

    let mut spec = match &preset {
        Some(name) => presets::sweep_preset(name)?,
        None => SweepSpec {
            axes: Vec::new(),
            fixed: Default::default(),
            quantities: Vec::new(),
            engine: EngineChoice::Analytic,
            cutoff: None,
        },
    };

    let grid = match args.grid {
        Some(g) => Some(g),
        None => match cfg.get("grid") {
            Some(s) => Some(s.parse().map_err(|_| {
                ExplorerError::Spec(format!("config grid: expected an integer, got {s:?}"))
            })?),
            None => None,
        },
    };
    let default_count = grid.unwrap_or(25);

    // Parameter flags override preset axes/fixed values. Axis order is the
    // canonical phi1, phi2, gamma_abs, gamma_arg, eta.
    let param_flags: [(Param, Option<&str>, &str); 5] = [
        (Param::Phi1, cfg.merge(args.phi1.as_deref(), "phi1"), "phi1"),
        (Param::Phi2, cfg.merge(args.phi2.as_deref(), "phi2"), "phi2"),
        (
            Param::GammaAbs,
            cfg.merge(args.gamma_abs.as_deref(), "gamma-abs"),
            "gamma-abs",
        ),
        (
            Param::GammaArg,
            cfg.merge(args.gamma_arg.as_deref(), "gamma-arg"),
            "gamma-arg",
        ),
        (Param::Eta, cfg.merge(args.eta.as_deref(), "eta"), "eta"),
    ];
    for (param, value, flag) in param_flags {
        let Some(raw) = value else { continue };
        spec.axes.retain(|a| a.param != param);
        match parse_value_or_range(raw, flag)? {
            ValueOrRange::Value(v) => match param {
                Param::Phi1 => spec.fixed.phi1 = v,
                Param::Phi2 => spec.fixed.phi2 = v,
                Param::GammaAbs => spec.fixed.gamma_abs = v,
                Param::GammaArg => spec.fixed.gamma_arg = v,
                Param::Eta => spec.fixed.eta = v,
            },
            ValueOrRange::Range(lo, hi) => spec.axes.push(Axis {
                param,
                lo,
                hi,
                count: default_count,
            }),
        }
    }

    if let Some(raw) = cfg.merge(args.quantities.as_deref(), "quantities") {
        spec.quantities = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                Quantity::parse(s)
                    .ok_or_else(|| ExplorerError::Spec(format!("unknown quantity {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
    }
    if let Some(raw) = cfg.merge(args.engine.as_deref(), "engine") {
        spec.engine = EngineChoice::parse(raw)
            .ok_or_else(|| ExplorerError::Spec(format!("unknown engine {raw:?}")))?;
    }
    if let Some(n) = args.cutoff {
        spec.cutoff = Some(n);
    } else if let Some(s) = cfg.get("cutoff") {
        spec.cutoff = Some(s.parse().map_err(|_| {
            ExplorerError::Spec(format!("config cutoff: expected an integer, got {s:?}"))
        })?);
    }

    let started = std::time::Instant::now();
    let result = run_sweep(&spec)?;
    eprintln!(
        "swept {} points in {} ms",
        result.records.len(),
        started.elapsed().as_millis()
    );

    let format = match cfg.merge(args.format.as_deref(), "format") {
        Some(raw) => Format::parse(raw)
            .ok_or_else(|| ExplorerError::Spec(format!("unknown format {raw:?}")))?,
        None => Format::Csv,
    };
    let out = args
        .out
        .clone()
        .or_else(|| cfg.get("out").map(PathBuf::from));
    emit(&result, format, out.as_deref())?;
    Ok(())
}

fn run_optimize_command(args: OptimizeArgs) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let preset = cfg
        .merge(args.preset.as_deref(), "preset")
        .map(str::to_string);

    let mut spec = match &preset {
        Some(name) => presets::optimize_preset(name)?,
        None => OptimizeSpec {
            objective: Objective::MaxBalancedTargetProbability,
            search_box: SearchBox {
                phi1: (0.05, 1.52),
                phi2: (0.05, 1.52),
            },
            eta: 1.0,
            coarse_grid: 33,
            refinement_levels: 3,
        },
    };

    if let Some(raw) = cfg.merge(args.objective.as_deref(), "objective") {
        spec.objective = match raw {
            "pstar" => Objective::MaxBalancedTargetProbability,
            "pyn-constrained" => Objective::MaxPynGivenFidelity {
                fidelity_min: args
                    .fidelity_min
                    .or_else(|| cfg.get("fidelity-min").and_then(|s| s.parse().ok()))
                    .ok_or_else(|| {
                        ExplorerError::Spec("pyn-constrained requires --fidelity-min".into())
                    })?,
            },
            other => {
                return Err(ExplorerError::Spec(format!(
                    "unknown objective {other:?} (pstar, pyn-constrained)"
                )))
            }
        };
    } else if let Some(f_min) = args.fidelity_min {
        spec.objective = Objective::MaxPynGivenFidelity { fidelity_min: f_min };
    }
    if let Some(eta) = args.eta.or_else(|| cfg.get("eta").and_then(|s| s.parse().ok())) {
        spec.eta = eta;
    }
    for (flag, raw, slot) in [
        ("phi1", cfg.merge(args.phi1.as_deref(), "phi1"), 0usize),
        ("phi2", cfg.merge(args.phi2.as_deref(), "phi2"), 1usize),
    ] {
        if let Some(raw) = raw {
            let range = match parse_value_or_range(raw, flag)? {
                ValueOrRange::Range(lo, hi) => (lo, hi),
                ValueOrRange::Value(v) => (v, v),
            };
            if slot == 0 {
                spec.search_box.phi1 = range;
            } else {
                spec.search_box.phi2 = range;
            }
        }
    }
    if let Some(g) = args.grid {
        spec.coarse_grid = g;
    }

    let outcome = optimize_regime(&spec)?;
    println!(
        "optimum: phi1 = {:.6}, phi2 = {:.6}, |gamma| = {:.6}",
        outcome.phi1, outcome.phi2, outcome.gamma_abs
    );
    println!("  probability = {:.8}", outcome.probability);
    if let Some(f) = outcome.fidelity {
        println!("  fidelity    = {:.8}", f);
    }
    if !outcome.feasible {
        println!("  NOTE: constraints infeasible; best infeasible point reported");
    }
    println!(
        "  evaluations = {}, coarse-scan best = {:.8}",
        outcome.evaluations, outcome.coarse_best
    );
    if let Some(path) = &args.out {
        let mut payload = serde_json::to_string_pretty(&outcome)?;
        payload.push('\n');
        std::fs::write(path, payload)?;
    }
    Ok(())
}

fn run_verify_command(args: VerifyArgs) -> Result<ExitCode> {
    let report = verify::run(&args.preset, args.tolerance_scale)?;
    print!("{}", report.render_text());
    if let Some(path) = &args.out {
        let mut payload = serde_json::to_string_pretty(&report)?;
        payload.push('\n');
        std::fs::write(path, payload)?;
    }
    if report.all_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}

fn parse_complex(s: &str, flag: &str) -> Result<Complex64> {
    let bad = || ExplorerError::Spec(format!("--{flag}: expected re or re,im, got {s:?}"));
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok(Complex64::new(s.trim().parse().map_err(|_| bad())?, 0.0)),
    }
}

fn run_solve_command(args: SolveArgs) -> Result<()> {
    let a0 = parse_complex(&args.a0, "a0")?;
    let a1 = parse_complex(&args.a1, "a1")?;
    let target = QubitTarget::new(a0, a1).map_err(ExplorerError::Core)?;

    let strategy = match args.strategy.as_deref() {
        None | Some("max-prob") => SolveStrategy::MaxProbability,
        Some("fixed") => SolveStrategy::FixedPhases {
            phi1: args.phi1.ok_or_else(|| {
                ExplorerError::Spec("--strategy fixed requires --phi1 and --phi2".into())
            })?,
            phi2: args.phi2.ok_or_else(|| {
                ExplorerError::Spec("--strategy fixed requires --phi1 and --phi2".into())
            })?,
        },
        Some(other) => {
            return Err(ExplorerError::Spec(format!(
                "unknown strategy {other:?} (max-prob, fixed)"
            )))
        }
    };

    let solution = solve_target(&target, strategy).map_err(ExplorerError::Core)?;
    println!(
        "target: ({:.6}{:+.6}i)|0> + ({:.6}{:+.6}i)|1>",
        target.a0.re, target.a0.im, target.a1.re, target.a1.im
    );
    match solution.family {
        TargetFamily::General {
            amplitude_ratio,
            relative_phase,
        } => {
            println!(
                "family: gamma = {amplitude_ratio:.6} tan(phi1) tan(phi2) exp({relative_phase:+.6}i), free (phi1, phi2)"
            );
        }
        TargetFamily::Vacuum => println!("family: gamma = 0, any phases with sin(phi1) sin(phi2) != 0"),
        TargetFamily::OnePhoton => println!("family: phi1 = 0, any gamma != 0"),
    }
    println!(
        "representative: phi1 = {:.6}, phi2 = {:.6}, gamma = {:.6}{:+.6}i",
        solution.phi1, solution.phi2, solution.gamma.re, solution.gamma.im
    );
    println!("herald probability there: {:.8}", solution.probability);
    Ok(())
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kottler_audit::config::{parse_configs, ScenarioConfig};
use kottler_audit::io::{emit_audit_json, emit_trace_csv};
use kottler_audit::scenario::{build_background, run_scenario, RunOptions, ScenarioOutcome};
use kottler_core::kottler::{ch_mass_extrapolated, ch_mass_integral, mass_upper_bound, radius_bounds};

const EXIT_USAGE: u8 = 2;

/// Kottler static black holes and inverse mean curvature flow: scenario runner.
#[derive(Debug, Parser)]
#[command(name = "kottler-audit", version)]
struct Cli {
    /// Scenario configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for traces and reports.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Run only this scenario of the configuration.
    #[arg(long, global = true, value_name = "NAME")]
    scenario: Option<String>,
    /// Multiplies every check tolerance.
    #[arg(long, global = true, value_name = "FLOAT", default_value_t = 1.0)]
    tolerance_scale: f64,
    /// Suppress progress and report output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print horizon radius, surface gravity, mass and bounds.
    Background,
    /// Run the flow, write the trace CSV and the audit JSON.
    Flow,
    /// Run the checks that do not need the flow and write the audit JSON.
    Audit,
    /// Print the CH mass convergence table.
    Chmass,
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn load(cli: &Cli) -> Result<Vec<ScenarioConfig>, String> {
    let path = cli.config.as_ref().ok_or("--config PATH is required")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let configs = parse_configs(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    match &cli.scenario {
        None => Ok(configs),
        Some(name) => {
            let chosen: Vec<_> = configs.into_iter().filter(|c| &c.name == name).collect();
            if chosen.is_empty() {
                Err(format!("no scenario named '{name}' in {}", path.display()))
            } else {
                Ok(chosen)
            }
        }
    }
}

fn print_background(config: &ScenarioConfig) -> Result<(), String> {
    let bg = build_background(config).map_err(|e| e.to_string())?;
    let horizon = bg.horizon();
    println!("scenario {}", config.name);
    println!("  {:<22} {}", "k", config.background.curvature_sign);
    println!("  {:<22} {}", "genus", config.background.genus);
    println!("  {:<22} {:.16e}", "m", bg.mass());
    println!("  {:<22} {:.16e}", "rho_m", bg.horizon_radius());
    println!("  {:<22} {:.16e}", "kappa", bg.surface_gravity());
    println!("  {:<22} {:.16e}", "horizon area", horizon.area);
    println!("  {:<22} {:.16e}", "c", horizon.hk_constant);
    println!("  {:<22} {:.16e}", "mass upper bound", mass_upper_bound(bg.base().area(), &[horizon]));
    if config.background.curvature_sign == 1 {
        match radius_bounds(bg.surface_gravity()) {
            Ok((lo, hi)) => {
                println!("  {:<22} [{lo:.16e}, {hi:.16e}]", "radius window");
                let four_pi = 4.0 * std::f64::consts::PI;
                println!("  {:<22} [{:.16e}, {:.16e}]", "area window", four_pi * lo * lo, four_pi * hi * hi);
            }
            Err(e) => println!("  {:<22} {e}", "radius window"),
        }
    }
    Ok(())
}

fn print_chmass(config: &ScenarioConfig) -> Result<(), String> {
    let bg = build_background(config).map_err(|e| e.to_string())?;
    let k = config.background.curvature_sign;
    println!("scenario {}: m = {:.16e}", config.name, bg.mass());
    println!("  {:>12}  {:>24}  {:>12}", "rho", "m(rho)", "error");
    for &rho in &config.audit.ch_radii {
        let value = ch_mass_integral(&bg, k, rho).map_err(|e| e.to_string())?;
        println!("  {rho:>12.4e}  {value:>24.16e}  {:>12.4e}", value - bg.mass());
    }
    let extrapolated = ch_mass_extrapolated(&bg, &config.audit.ch_radii).map_err(|e| e.to_string())?;
    println!("  {:>12}  {extrapolated:>24.16e}  {:>12.4e}", "extrapolated", extrapolated - bg.mass());
    Ok(())
}

fn write_outputs(outcome: &ScenarioOutcome, config: &ScenarioConfig, out: &Path) -> Result<(), String> {
    if let Some(trace) = &outcome.trace {
        emit_trace_csv(trace, &out.join(&config.audit.trace_file)).map_err(|e| e.to_string())?;
    }
    emit_audit_json(&outcome.audit, &out.join(&config.audit.report_file)).map_err(|e| e.to_string())
}

fn report(outcome: &ScenarioOutcome) {
    let audit = &outcome.audit;
    println!("scenario {}: {}", audit.scenario, if audit.passed { "PASS" } else { "FAIL" });
    if let Some(abort) = &audit.abort {
        println!("  flow aborted: {abort}");
    }
    for check in &audit.checks {
        let status = if check.passed { "pass" } else { "FAIL" };
        println!(
            "  [{status}] {:<28} value {:>12.4e} {:?} {:.4e} (tol {:.1e})  {}",
            check.name, check.value, check.relation, check.bound, check.tolerance, check.tag
        );
        if let Some(error) = &check.error {
            println!("         {error}");
        }
    }
}

fn run(cli: &Cli, configs: &[ScenarioConfig], with_flow: bool) -> ExitCode {
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        return usage_error(format!("{}: {e}", cli.out.display()));
    }
    let options = RunOptions { tolerance_scale: cli.tolerance_scale, with_flow };
    let outcomes: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|config| scope.spawn(move || run_scenario(config, options)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    });
    let mut code = 0;
    for (config, outcome) in configs.iter().zip(outcomes) {
        let outcome = match outcome {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: scenario {}: {e}", config.name);
                code = code.max(3);
                continue;
            }
        };
        if let Err(e) = write_outputs(&outcome, config, &cli.out) {
            return usage_error(e);
        }
        if !cli.quiet {
            report(&outcome);
        }
        code = code.max(outcome.audit.exit_code());
    }
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tolerance_scale.is_finite() && cli.tolerance_scale > 0.0) {
        return usage_error(format!("--tolerance-scale must be positive, got {}", cli.tolerance_scale));
    }
    let configs = match load(&cli) {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    if !cli.quiet {
        for line in configs.iter().flat_map(ScenarioConfig::validation_log) {
            eprintln!("{line}");
        }
    }
    let printed = match cli.command {
        Command::Flow => return run(&cli, &configs, true),
        Command::Audit => return run(&cli, &configs, false),
        Command::Background => configs.iter().try_for_each(print_background),
        Command::Chmass => configs.iter().try_for_each(print_chmass),
    };
    match printed {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

//! `edgeaudit`: privacy audits for graph releases, driven by JSON configs.
//!
//! Every subcommand reads one config file and emits one JSON report to
//! stdout (or `--out`). Reports are deterministic: same config, same seed,
//! same bytes, regardless of `--threads`. Errors are JSON on stderr with
//! distinct exit codes: 1 internal, 2 usage or bad config, 3 request beyond
//! the exact-enumeration capacity.

mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use edgeaudit_core::attacks::{aggregate_trials, queens_attack_trial_indexed, AttackResult};
use edgeaudit_core::audit::{
    audit_edge_dp, audit_edge_dp_grid, audit_pufferfish_edges, audit_pufferfish_edges_grid,
    power_curve, verify_lemma6_condition, GridSpec, DEFAULT_GRID_POINTS,
};
use edgeaudit_core::distributions::TwoQueensModel;
use edgeaudit_core::ergm::{compute_alpha, ErgmModel};
use edgeaudit_core::mechanisms::LaplaceEdgeCount;
use edgeaudit_core::rng::derive_seed;
use rayon::prelude::*;
use serde_json::{Map, Value};

use config::{
    build_distribution, build_err, build_ergm_model, build_mechanism, load_config, run_err,
    AttackQueensConfig, AuditDpConfig, AuditPufferfishConfig, CliError, ErgmAlphaConfig,
    Lemma6Config, Mechanism, PowerCurveConfig,
};

#[derive(Parser)]
#[command(name = "edgeaudit", version, about = "Privacy audits for graph releases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Worst-case output ratio over all single-edge neighbor pairs.
    AuditDp(CommonArgs),
    /// Per-edge secret leakage under a data distribution.
    AuditPufferfish(CommonArgs),
    /// Conditional-ratio certificate of a distribution.
    #[command(name = "lemma6")]
    Lemma6(CommonArgs),
    /// Conditional-odds slack of an ERGM family.
    ErgmAlpha(CommonArgs),
    /// Noisy-density re-identification experiment over graph sizes.
    AttackQueens(CommonArgs),
    /// Optimal error trade-off curve between two graphs' output laws.
    PowerCurve(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file for this command.
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Root seed; required by attack-queens, rejected elsewhere.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for attack-queens (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Grid resolution for continuous-output audits.
    #[arg(long)]
    grid_points: Option<usize>,
}

impl CommonArgs {
    /// Flags that silently do nothing are worse than an error. Only
    /// attack-queens consumes --seed and --threads, and it validates them
    /// itself.
    fn reject_unused(&self, command: &str, uses_grid: bool) -> Result<(), CliError> {
        if self.seed.is_some() {
            return Err(CliError::usage(format!("--seed is not used by {command}")));
        }
        if self.threads.is_some() {
            return Err(CliError::usage(format!("--threads is not used by {command}")));
        }
        if self.grid_points.is_some() && !uses_grid {
            return Err(CliError::usage(format!("--grid-points is not used by {command}")));
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return emit_error(&CliError::usage(e.to_string()));
        }
    };
    let outcome = match &cli.command {
        Command::AuditDp(args) => audit_dp(args),
        Command::AuditPufferfish(args) => audit_pufferfish(args),
        Command::Lemma6(args) => lemma6(args),
        Command::ErgmAlpha(args) => ergm_alpha(args),
        Command::AttackQueens(args) => attack_queens(args),
        Command::PowerCurve(args) => power_curve_cmd(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => emit_error(&e),
    }
}

fn emit_error(e: &CliError) -> ExitCode {
    let mut inner = Map::new();
    inner.insert("kind".into(), Value::String(e.kind.as_str().into()));
    inner.insert("message".into(), Value::String(e.message.clone()));
    let mut top = Map::new();
    top.insert("error".into(), Value::Object(inner));
    let bytes = report::to_json_bytes(&Value::Object(top));
    let _ = std::io::stderr().write_all(&bytes);
    ExitCode::from(e.kind.exit_code() as u8)
}

/// Echo the validated config into the report with its identity fields
/// normalized.
fn normalize_echo(mut raw: Map<String, Value>, command: &str) -> Map<String, Value> {
    raw.insert("command".into(), Value::String(command.into()));
    raw.insert("schema_version".into(), 1u64.into());
    raw
}

fn write_report(args: &CommonArgs, value: &Value) -> Result<(), CliError> {
    let bytes = report::to_json_bytes(value);
    match &args.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| CliError::internal(format!("cannot write report: {e}"))),
    }
}

fn audit_dp(args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, raw) = load_config::<AuditDpConfig>(&args.config, "audit-dp")?;
    let mut echo = normalize_echo(raw, "audit-dp");
    let result = match build_mechanism(&cfg.mechanism)? {
        Mechanism::Discrete(mech) => {
            args.reject_unused("audit-dp (finite-alphabet mechanism)", false)?;
            if let Some(n) = cfg.n {
                if n != mech.vertex_count() {
                    return Err(CliError::config(format!(
                        "config n = {n} contradicts the mechanism's vertex count {}",
                        mech.vertex_count()
                    )));
                }
            }
            report::dp_report_value(&audit_edge_dp(mech.as_ref()).map_err(run_err)?)
        }
        Mechanism::Laplace(mech) => {
            args.reject_unused("audit-dp", true)?;
            let n = cfg
                .n
                .ok_or_else(|| CliError::config("laplace_edge_count needs a top-level \"n\""))?;
            let grid = laplace_grid(args, &mech, n)?;
            echo.insert("grid".into(), report::grid_value(&grid));
            report::dp_report_value(&audit_edge_dp_grid(&mech, n, &grid).map_err(run_err)?)
        }
    };
    write_report(args, &report::envelope("audit-dp", echo, result))
}

fn laplace_grid(args: &CommonArgs, mech: &LaplaceEdgeCount, n: u32) -> Result<GridSpec, CliError> {
    let points = args.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
    GridSpec::for_laplace(mech, n, points).map_err(build_err)
}

fn audit_pufferfish(args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, raw) = load_config::<AuditPufferfishConfig>(&args.config, "audit-pufferfish")?;
    let mut echo = normalize_echo(raw, "audit-pufferfish");
    let dist = build_distribution(&cfg.distribution)?;
    let result = match build_mechanism(&cfg.mechanism)? {
        Mechanism::Discrete(mech) => {
            args.reject_unused("audit-pufferfish (finite-alphabet mechanism)", false)?;
            if mech.vertex_count() != dist.vertex_count() {
                return Err(CliError::config(format!(
                    "mechanism on {} vertices does not fit a distribution on {}",
                    mech.vertex_count(),
                    dist.vertex_count()
                )));
            }
            report::pufferfish_report_value(
                &audit_pufferfish_edges(mech.as_ref(), &dist).map_err(run_err)?,
            )
        }
        Mechanism::Laplace(mech) => {
            args.reject_unused("audit-pufferfish", true)?;
            let grid = laplace_grid(args, &mech, dist.vertex_count())?;
            echo.insert("grid".into(), report::grid_value(&grid));
            report::pufferfish_report_value(
                &audit_pufferfish_edges_grid(&mech, &dist, &grid).map_err(run_err)?,
            )
        }
    };
    if let Some(path) = &cfg.distribution_csv_out {
        report::write_distribution_csv(path, &dist)
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
    }
    write_report(args, &report::envelope("audit-pufferfish", echo, result))
}

fn lemma6(args: &CommonArgs) -> Result<(), CliError> {
    args.reject_unused("lemma6", false)?;
    let (cfg, raw) = load_config::<Lemma6Config>(&args.config, "lemma6")?;
    let dist = build_distribution(&cfg.distribution)?;
    let result = report::lemma6_report_value(&verify_lemma6_condition(&dist));
    if let Some(path) = &cfg.distribution_csv_out {
        report::write_distribution_csv(path, &dist)
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
    }
    write_report(args, &report::envelope("lemma6", normalize_echo(raw, "lemma6"), result))
}

fn ergm_alpha(args: &CommonArgs) -> Result<(), CliError> {
    args.reject_unused("ergm-alpha", false)?;
    let (cfg, raw) = load_config::<ErgmAlphaConfig>(&args.config, "ergm-alpha")?;
    let models: Vec<ErgmModel> =
        cfg.models.iter().map(build_ergm_model).collect::<Result<_, _>>()?;
    let result = compute_alpha(&models).map_err(run_err)?;
    write_report(
        args,
        &report::envelope(
            "ergm-alpha",
            normalize_echo(raw, "ergm-alpha"),
            report::alpha_result_value(&result),
        ),
    )
}

fn attack_queens(args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, raw) = load_config::<AttackQueensConfig>(&args.config, "attack-queens")?;
    let seed =
        args.seed.ok_or_else(|| CliError::usage("attack-queens requires --seed"))?;
    if args.grid_points.is_some() {
        return Err(CliError::usage("--grid-points is not used by attack-queens"));
    }
    if cfg.trials == 0 {
        return Err(CliError::config("trials must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::internal(format!("cannot build thread pool: {e}")))?;
    let mech = LaplaceEdgeCount::new(cfg.epsilon).map_err(build_err)?;
    let mut rows: Vec<AttackResult> = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let model = TwoQueensModel::new(n, cfg.a, cfg.b, cfg.q).map_err(build_err)?;
        // Same per-row seeds and per-trial streams as the serial sweep, so
        // the report is independent of --threads.
        let row_seed = derive_seed(seed, n as u64);
        let outcomes = pool
            .install(|| {
                (0..cfg.trials)
                    .into_par_iter()
                    .map(|t| queens_attack_trial_indexed(&model, &mech, row_seed, t))
                    .collect::<Result<Vec<_>, _>>()
            })
            .map_err(run_err)?;
        rows.push(aggregate_trials(&model, cfg.epsilon, row_seed, &outcomes).map_err(run_err)?);
    }
    if let Some(path) = &cfg.csv_out {
        report::write_attack_csv(path, &rows)
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
    }
    let mut echo = normalize_echo(raw, "attack-queens");
    echo.insert("seed".into(), seed.into());
    let mut result = Map::new();
    result.insert("rows".into(), Value::Array(rows.iter().map(report::attack_row_value).collect()));
    write_report(args, &report::envelope("attack-queens", echo, Value::Object(result)))
}

fn power_curve_cmd(args: &CommonArgs) -> Result<(), CliError> {
    args.reject_unused("power-curve", false)?;
    let (cfg, raw) = load_config::<PowerCurveConfig>(&args.config, "power-curve")?;
    let mech = match build_mechanism(&cfg.mechanism)? {
        Mechanism::Discrete(m) => m,
        Mechanism::Laplace(_) => {
            return Err(CliError::config(
                "power-curve needs a finite-alphabet mechanism, not laplace_edge_count",
            ))
        }
    };
    let g0 = cfg.g0.build()?;
    let g1 = cfg.g1.build()?;
    for g in [&g0, &g1] {
        if g.n() != mech.vertex_count() {
            return Err(CliError::config(format!(
                "graph on {} vertices does not fit a mechanism on {}",
                g.n(),
                mech.vertex_count()
            )));
        }
    }
    let curve =
        power_curve(&mech.output_pmf(&g0), &mech.output_pmf(&g1)).map_err(run_err)?;
    let mut result = Map::new();
    result.insert("vertices".into(), report::power_curve_value(&curve));
    if let Some(eps) = cfg.epsilon_line {
        result.insert(
            "max_excess_over_epsilon_line".into(),
            report::num(curve.max_excess_over(eps.exp())),
        );
    }
    if let Some(path) = &cfg.csv_out {
        report::write_power_curve_csv(path, &curve)
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
    }
    write_report(
        args,
        &report::envelope("power-curve", normalize_echo(raw, "power-curve"), Value::Object(result)),
    )
}

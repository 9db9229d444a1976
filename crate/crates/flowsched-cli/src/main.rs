//! Command-line front end: single runs, seeded sweeps, adversary attacks,
//! instance generation, and the bundled verification suite.
//!
//! Exit codes: 0 success, 2 configuration error, 3 checker or criterion
//! failure, 4 engine error.

mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flowsched::adversary::{meta_to_string, run_adversary, AdversaryConfig, AdversaryError};
use flowsched::analysis::{
    bin_shape_hook, check_covered_volume_unweighted, check_covered_volume_weighted,
    check_pending_bound, competitive_report, max_pending_ratio, no_violations_hook,
    partial_uniqueness_hook, reports_to_csv, theta, CheckReport, CheckStatus, EventChecker,
};
use flowsched::model::{
    instance_stats, make_instance, read_instance_file, write_instance_file, Instance,
};
use flowsched::oracles::{
    optimal_weighted_small, srpt, OracleError, OracleLimits, PendingSeries, PredSrptPolicy,
    SrptPolicy,
};
use flowsched::policy::{DensityWeightPolicy, SuperbinsPolicy, TwoBinsPolicy};
use flowsched::rat::{
    ceil_to_power, decimal_string, format_rat, format_rat_slash, parse_rat, rint, Rat,
};
use flowsched::sim::{
    flow_time_both_forms, simulate, trace_to_csv, CheckerHook, Policy, SimOptions, SimResult,
};
use flowsched::verify::run_all;
use flowsched::workloads::{gen_random, DistortionMode, RandomSpec, SplitMix64};

const EXIT_CONFIG: u8 = 2;
const EXIT_CHECK: u8 = 3;
const EXIT_ENGINE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "flowsched",
    version,
    about = "Exact event-driven simulator for online single-machine preemptive \
             scheduling with predicted processing times"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance file.
    Gen(GenArgs),
    /// Simulate one policy over one instance and write trace/metrics/checks.
    Run(RunArgs),
    /// Seeded experiment grid; one CSV row per (mu, seed, policy) cell.
    Sweep(SweepArgs),
    /// Adaptive lower-bound construction against a victim policy.
    Adversary(AdversaryArgs),
    /// Run the bundled verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Output instance file path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Distortion bound, e.g. `2` or `3/2`.
    #[arg(long, default_value = "1")]
    mu: String,
    #[arg(long, default_value_t = 32)]
    release_max: u64,
    #[arg(long, default_value_t = 1)]
    pred_min: u64,
    #[arg(long, default_value_t = 16)]
    pred_max: u64,
    /// Comma-separated weight choices, e.g. `1,2,4,8`.
    #[arg(long, default_value = "1")]
    weights: String,
    /// exact | uniform | extremal
    #[arg(long, default_value = "uniform")]
    distortion: String,
}

#[derive(Args)]
struct RunArgs {
    /// density-weight | two-bins | superbins | srpt | srpt-pred
    #[arg(long)]
    policy: String,
    #[arg(long)]
    instance: PathBuf,
    /// Re-declare the distortion bound (revalidates the instance).
    #[arg(long)]
    mu: Option<String>,
    /// all | none | comma-separated checker names
    #[arg(long, default_value = "all")]
    check: String,
    /// Output directory (default: $FLOWSCHED_OUT or `.`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated distortion bounds, e.g. `1,3/2,2`.
    #[arg(long, default_value = "1,2")]
    mu: String,
    /// Comma-separated policies.
    #[arg(long, default_value = "two-bins")]
    policies: String,
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Maximum jobs per instance (n is drawn in 1..=this).
    #[arg(long, default_value_t = 40)]
    n: usize,
    #[arg(long, default_value_t = 40)]
    release_max: u64,
    #[arg(long, default_value_t = 1)]
    pred_min: u64,
    #[arg(long, default_value_t = 16)]
    pred_max: u64,
    /// Weight choices for the weighted policies.
    #[arg(long, default_value = "1,2,4,8")]
    weights: String,
    #[arg(long, default_value = "uniform")]
    distortion: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the grid (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Also emit minimal SVG charts.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct AdversaryArgs {
    /// Distortion bound; must satisfy 1 < mu <= 2.
    #[arg(long)]
    mu: String,
    #[arg(long, default_value_t = 8)]
    phases: usize,
    #[arg(long, default_value_t = 200)]
    bombardment: usize,
    /// Victim policy: srpt-pred | two-bins.
    #[arg(long, default_value = "srpt-pred")]
    victim: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Filter criteria by id (e.g. `C2`) or tag (e.g. `unweighted`).
    #[arg(long)]
    only: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Adversary(args) => cmd_adversary(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { exit, message }) => {
            eprintln!("flowsched: {message}");
            ExitCode::from(exit)
        }
    }
}

struct CliError {
    exit: u8,
    message: String,
}

fn config_err(message: impl Into<String>) -> CliError {
    CliError {
        exit: EXIT_CONFIG,
        message: message.into(),
    }
}

fn check_err(message: impl Into<String>) -> CliError {
    CliError {
        exit: EXIT_CHECK,
        message: message.into(),
    }
}

fn engine_err(message: impl Into<String>) -> CliError {
    CliError {
        exit: EXIT_ENGINE,
        message: message.into(),
    }
}

fn out_dir(flag: Option<PathBuf>) -> Result<PathBuf, CliError> {
    let dir = flag.unwrap_or_else(|| {
        std::env::var_os("FLOWSCHED_OUT")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
    });
    fs::create_dir_all(&dir).map_err(|e| config_err(format!("cannot create {dir:?}: {e}")))?;
    Ok(dir)
}

fn parse_mu(text: &str) -> Result<Rat, CliError> {
    parse_rat(text).map_err(|e| config_err(format!("bad rational `{text}`: {e}")))
}

fn parse_weights(text: &str) -> Result<Vec<Rat>, CliError> {
    text.split(',')
        .map(|w| parse_rat(w.trim()).map_err(|e| config_err(format!("bad weight `{w}`: {e}"))))
        .collect()
}

fn parse_distortion(text: &str) -> Result<DistortionMode, CliError> {
    match text {
        "exact" => Ok(DistortionMode::Exact),
        "uniform" => Ok(DistortionMode::Uniform),
        "extremal" => Ok(DistortionMode::EXTREMAL_DEFAULT),
        other => Err(config_err(format!("unknown distortion mode `{other}`"))),
    }
}

const POLICY_NAMES: [&str; 5] = ["density-weight", "two-bins", "superbins", "srpt", "srpt-pred"];

fn build_policy(name: &str, inst: &Instance) -> Result<Box<dyn Policy>, CliError> {
    match name {
        "density-weight" => Ok(Box::new(DensityWeightPolicy::new(inst.mu()))),
        "superbins" => Ok(Box::new(SuperbinsPolicy::new(inst.mu().clone()))),
        "two-bins" => {
            if !inst.is_unit_weight() {
                return Err(config_err("policy two-bins requires unit weights"));
            }
            Ok(Box::new(TwoBinsPolicy::new(inst.mu().clone())))
        }
        "srpt" => Ok(Box::new(
            SrptPolicy::for_instance(inst).map_err(|e| config_err(format!("policy srpt: {e}")))?,
        )),
        "srpt-pred" => {
            if !inst.is_uniform_weight() {
                return Err(config_err("policy srpt-pred requires uniform weights"));
            }
            Ok(Box::new(PredSrptPolicy::new()))
        }
        other => Err(config_err(format!(
            "unknown policy `{other}` (expected one of {})",
            POLICY_NAMES.join(", ")
        ))),
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let spec = RandomSpec {
        n: args.n,
        release_max: args.release_max,
        pred_min: args.pred_min,
        pred_max: args.pred_max,
        weight_choices: parse_weights(&args.weights)?,
        mu: parse_mu(&args.mu)?,
        distortion: parse_distortion(&args.distortion)?,
        seed: args.seed,
    };
    let inst = gen_random(&spec).map_err(|e| config_err(e.to_string()))?;
    write_instance_file(&inst, &args.out).map_err(|e| config_err(e.to_string()))?;
    println!("wrote {} jobs to {}", inst.len(), args.out.display());
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CheckName {
    NoViolations,
    BinShape,
    PartialUniqueness,
    CoveredVolume,
    PendingBound,
    Duality,
}

impl CheckName {
    fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "no-violations" => Ok(Self::NoViolations),
            "bin-shape" => Ok(Self::BinShape),
            "partial-uniqueness" => Ok(Self::PartialUniqueness),
            "covered-volume" => Ok(Self::CoveredVolume),
            "pending-bound" => Ok(Self::PendingBound),
            "duality" => Ok(Self::Duality),
            other => Err(config_err(format!("unknown checker `{other}`"))),
        }
    }

    fn applicable(self, policy: &str) -> bool {
        match self {
            Self::NoViolations | Self::BinShape => matches!(policy, "two-bins" | "superbins"),
            Self::PartialUniqueness => policy == "density-weight",
            Self::CoveredVolume | Self::PendingBound => matches!(policy, "two-bins" | "superbins"),
            Self::Duality => true,
        }
    }
}

fn requested_checks(arg: &str, policy: &str) -> Result<Vec<CheckName>, CliError> {
    let all = [
        CheckName::NoViolations,
        CheckName::BinShape,
        CheckName::PartialUniqueness,
        CheckName::CoveredVolume,
        CheckName::PendingBound,
        CheckName::Duality,
    ];
    match arg {
        "none" => Ok(Vec::new()),
        "all" => Ok(all.into_iter().filter(|c| c.applicable(policy)).collect()),
        list => {
            let mut out = Vec::new();
            for name in list.split(',') {
                let check = CheckName::parse(name.trim())?;
                if !check.applicable(policy) {
                    return Err(config_err(format!(
                        "checker `{}` does not apply to policy `{policy}`",
                        name.trim()
                    )));
                }
                out.push(check);
            }
            Ok(out)
        }
    }
}

/// Reference run for oracle-relative checks: clairvoyant SRPT for
/// uniform-weight instances, the exhaustive oracle for small weighted ones.
fn reference_series(inst: &Instance) -> Result<Option<(Rat, PendingSeries, bool)>, CliError> {
    if inst.is_uniform_weight() {
        let (result, series) = srpt(inst).map_err(|e| engine_err(e.to_string()))?;
        return Ok(Some((result.flow_weighted, series, false)));
    }
    match optimal_weighted_small(inst, &OracleLimits::default()) {
        Ok((opt, series)) => Ok(Some((opt, series, true))),
        Err(OracleError::TooLarge) | Err(OracleError::NonIntegerData) => Ok(None),
        Err(e) => Err(engine_err(e.to_string())),
    }
}

fn duality_report(result: &SimResult, inst: &Instance) -> Result<CheckReport, CliError> {
    let (sum, integral) =
        flow_time_both_forms(result, inst).map_err(|e| engine_err(e.to_string()))?;
    Ok(if sum == integral {
        CheckReport {
            checker: "duality".to_string(),
            status: CheckStatus::Pass,
            first_failure: None,
            extremes: BTreeMap::new(),
        }
    } else {
        CheckReport {
            checker: "duality".to_string(),
            status: CheckStatus::Fail,
            first_failure: Some((
                0,
                format!(
                    "sum {} != integral {}",
                    format_rat(&sum),
                    format_rat(&integral)
                ),
            )),
            extremes: BTreeMap::new(),
        }
    })
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let dir = out_dir(args.out)?;
    let mut inst = read_instance_file(&args.instance).map_err(|e| config_err(e.to_string()))?;
    if let Some(mu) = args.mu {
        let mu = parse_mu(&mu)?;
        inst = make_instance(inst.jobs().to_vec(), mu).map_err(|e| config_err(e.to_string()))?;
    }
    let checks = requested_checks(&args.check, &args.policy)?;
    let mut policy = build_policy(&args.policy, &inst)?;

    let mut structural: Vec<EventChecker> = Vec::new();
    if checks.contains(&CheckName::NoViolations) {
        structural.push(no_violations_hook());
    }
    if checks.contains(&CheckName::BinShape) {
        structural.push(bin_shape_hook());
    }
    if checks.contains(&CheckName::PartialUniqueness) {
        structural.push(partial_uniqueness_hook());
    }
    let mut hooks: Vec<&mut dyn CheckerHook> = structural
        .iter_mut()
        .map(|c| c as &mut dyn CheckerHook)
        .collect();
    let result = simulate(&inst, policy.as_mut(), &mut hooks, &SimOptions::default())
        .map_err(|e| engine_err(e.to_string()))?;

    let stem = args
        .instance
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance")
        .to_string();
    let instance_id = format!("{stem}:{}", args.policy);
    let mut reports: Vec<(String, CheckReport)> = structural
        .iter()
        .map(|c| (instance_id.clone(), c.report()))
        .collect();

    if checks.contains(&CheckName::Duality) {
        reports.push((instance_id.clone(), duality_report(&result, &inst)?));
    }

    let needs_reference =
        checks.contains(&CheckName::CoveredVolume) || checks.contains(&CheckName::PendingBound);
    if needs_reference {
        match reference_series(&inst)? {
            None => {
                if args.check != "all" {
                    return Err(config_err(
                        "covered-volume/pending-bound need an exact reference; this instance \
                         is weighted and beyond the exhaustive oracle limits",
                    ));
                }
            }
            Some((_, series, weighted)) => {
                if checks.contains(&CheckName::CoveredVolume) {
                    let report = if weighted {
                        check_covered_volume_weighted(&result, &series, inst.mu())
                    } else {
                        check_covered_volume_unweighted(&result, &series, inst.mu())
                    };
                    reports.push((
                        instance_id.clone(),
                        report.map_err(|e| engine_err(e.to_string()))?,
                    ));
                }
                if checks.contains(&CheckName::PendingBound) {
                    let factor = if weighted {
                        let stats =
                            instance_stats(&inst).map_err(|e| engine_err(e.to_string()))?;
                        let (log_w, _) = ceil_to_power(&stats.ratio_w, &rint(2))
                            .map_err(|e| engine_err(e.to_string()))?;
                        rint(2) * theta(inst.mu()) * rint(log_w + 1)
                    } else {
                        rint(2) * theta(inst.mu())
                    };
                    let alg_series = PendingSeries::from_sim(&result);
                    let report = check_pending_bound(&alg_series, &series, &factor, weighted)
                        .map_err(|e| engine_err(e.to_string()))?;
                    reports.push((instance_id.clone(), report));
                }
            }
        }
    }

    fs::write(
        dir.join(format!("{stem}-trace.csv")),
        trace_to_csv(&result.trace),
    )
    .map_err(|e| engine_err(e.to_string()))?;
    fs::write(
        dir.join(format!("{stem}-metrics.csv")),
        metrics_csv(&stem, &args.policy, &inst, &result),
    )
    .map_err(|e| engine_err(e.to_string()))?;
    fs::write(
        dir.join(format!("{stem}-checks.csv")),
        reports_to_csv(&reports),
    )
    .map_err(|e| engine_err(e.to_string()))?;

    let failed: Vec<&str> = reports
        .iter()
        .filter(|(_, r)| !r.passed())
        .map(|(_, r)| r.checker.as_str())
        .collect();
    println!(
        "{} on {}: flow {} ({} checks, {} failed)",
        args.policy,
        stem,
        format_rat(&result.flow_weighted),
        reports.len(),
        failed.len()
    );
    if !failed.is_empty() {
        return Err(check_err(format!("checkers failed: {}", failed.join(", "))));
    }
    Ok(())
}

fn metrics_csv(stem: &str, policy: &str, inst: &Instance, result: &SimResult) -> String {
    let mut out = String::from(
        "instance,policy,n,mu,flow_weighted,flow_weighted_dec,flow_unweighted,flow_unweighted_dec\n",
    );
    out.push_str(&format!(
        "{stem},{policy},{},{},{},{},{},{}\n",
        inst.len(),
        format_rat_slash(inst.mu()),
        format_rat_slash(&result.flow_weighted),
        decimal_string(&result.flow_weighted, 20),
        format_rat_slash(&result.flow_unweighted),
        decimal_string(&result.flow_unweighted, 20),
    ));
    out
}

struct SweepRow {
    mu: Rat,
    seed: u64,
    policy: String,
    n: usize,
    ratio_p: Rat,
    ratio_w: Rat,
    ratio_d: Rat,
    flow: Rat,
    reference: Rat,
    reference_kind: &'static str,
    ratio: Option<Rat>,
    max_local_ratio: Option<Rat>,
}

fn sweep_cell(args: &SweepArgs, mu: &Rat, seed: u64, policy_name: &str) -> Result<SweepRow, CliError> {
    let unit = matches!(policy_name, "two-bins" | "srpt" | "srpt-pred");
    let mut meta = SplitMix64::new(seed ^ 0x5eed_cafe);
    let spec = RandomSpec {
        n: 1 + meta.below(args.n.max(1) as u64) as usize,
        release_max: args.release_max,
        pred_min: args.pred_min,
        pred_max: args.pred_max,
        weight_choices: if unit {
            vec![rint(1)]
        } else {
            parse_weights(&args.weights)?
        },
        mu: mu.clone(),
        distortion: parse_distortion(&args.distortion)?,
        seed,
    };
    let inst = gen_random(&spec).map_err(|e| config_err(e.to_string()))?;
    let stats = instance_stats(&inst).map_err(|e| config_err(e.to_string()))?;
    let mut policy = build_policy(policy_name, &inst)?;
    let result = simulate(&inst, policy.as_mut(), &mut [], &SimOptions::default())
        .map_err(|e| engine_err(e.to_string()))?;

    let (reference, reference_kind, series) = match reference_series(&inst)? {
        Some((value, series, weighted)) => {
            (value, if weighted { "exact" } else { "srpt" }, Some(series))
        }
        None => {
            // valid lower bound on any schedule: every job waits at least
            // its own processing time
            let lb = inst
                .jobs()
                .iter()
                .fold(rint(0), |acc, j| acc + &j.weight * &j.true_proc);
            (lb, "volume-lb", None)
        }
    };
    let ratio = competitive_report(&result.flow_weighted, &reference).ok();
    let max_local_ratio = match &series {
        Some(series) => {
            let alg_series = PendingSeries::from_sim(&result);
            max_pending_ratio(&alg_series, series, !inst.is_uniform_weight())
                .map_err(|e| engine_err(e.to_string()))?
        }
        None => None,
    };
    Ok(SweepRow {
        mu: mu.clone(),
        seed,
        policy: policy_name.to_string(),
        n: inst.len(),
        ratio_p: stats.ratio_p,
        ratio_w: stats.ratio_w,
        ratio_d: stats.ratio_d,
        flow: result.flow_weighted,
        reference,
        reference_kind,
        ratio,
        max_local_ratio,
    })
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let dir = out_dir(args.out.clone())?;
    let mus: Vec<Rat> = args
        .mu
        .split(',')
        .map(|m| parse_mu(m.trim()))
        .collect::<Result<_, _>>()?;
    let policies: Vec<String> = args
        .policies
        .split(',')
        .map(|p| p.trim().to_string())
        .collect();
    for p in &policies {
        if !POLICY_NAMES.contains(&p.as_str()) {
            return Err(config_err(format!("unknown policy `{p}`")));
        }
    }
    let mut cells = Vec::new();
    for mu in &mus {
        for seed in 0..args.seeds {
            for policy in &policies {
                cells.push((mu.clone(), seed, policy.clone()));
            }
        }
    }
    let workers = if args.jobs == 0 {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    } else {
        args.jobs
    };
    let rows = sweep_grid(&args, cells, workers)?;

    let mut csv = String::from(
        "mu,mu_dec,seed,policy,n,ratio_p,ratio_p_dec,ratio_w,ratio_w_dec,ratio_d,ratio_d_dec,\
         flow,flow_dec,reference,reference_dec,reference_kind,ratio,ratio_dec,\
         max_local_ratio,max_local_ratio_dec\n",
    );
    let opt_cols = |r: &Option<Rat>| match r {
        Some(v) => (format_rat_slash(v), decimal_string(v, 20)),
        None => (String::new(), String::new()),
    };
    for row in &rows {
        let (ratio, ratio_dec) = opt_cols(&row.ratio);
        let (local, local_dec) = opt_cols(&row.max_local_ratio);
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            format_rat_slash(&row.mu),
            decimal_string(&row.mu, 20),
            row.seed,
            row.policy,
            row.n,
            format_rat_slash(&row.ratio_p),
            decimal_string(&row.ratio_p, 20),
            format_rat_slash(&row.ratio_w),
            decimal_string(&row.ratio_w, 20),
            format_rat_slash(&row.ratio_d),
            decimal_string(&row.ratio_d, 20),
            format_rat_slash(&row.flow),
            decimal_string(&row.flow, 20),
            format_rat_slash(&row.reference),
            decimal_string(&row.reference, 20),
            row.reference_kind,
            ratio,
            ratio_dec,
            local,
            local_dec,
        ));
    }
    let csv_path = dir.join("sweep.csv");
    fs::write(&csv_path, csv).map_err(|e| engine_err(e.to_string()))?;
    println!("wrote {} rows to {}", rows.len(), csv_path.display());

    if args.svg {
        write_sweep_charts(&dir, &rows)?;
    }
    Ok(())
}

fn sweep_grid(
    args: &SweepArgs,
    cells: Vec<(Rat, u64, String)>,
    workers: usize,
) -> Result<Vec<SweepRow>, CliError> {
    if cells.is_empty() {
        return Ok(Vec::new());
    }
    let workers = workers.max(1).min(cells.len());
    let mut slots: Vec<Option<Result<SweepRow, CliError>>> = cells.iter().map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunk = cells.len().div_ceil(workers);
        for (input, output) in cells.chunks(chunk).zip(slots.chunks_mut(chunk)) {
            scope.spawn(move || {
                for ((mu, seed, policy), slot) in input.iter().zip(output.iter_mut()) {
                    *slot = Some(sweep_cell(args, mu, *seed, policy));
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("worker filled slot"))
        .collect()
}

fn to_f64(r: &Rat) -> f64 {
    decimal_string(r, 17).parse().unwrap_or(f64::NAN)
}

fn write_sweep_charts(dir: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    let points = |x: &dyn Fn(&SweepRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter()
            .filter_map(|r| r.ratio.as_ref().map(|ratio| (x(r), to_f64(ratio))))
            .collect()
    };
    let charts = [
        (
            "ratio_vs_mu.svg",
            "competitive ratio vs mu",
            "mu",
            points(&|r: &SweepRow| to_f64(&r.mu)),
        ),
        (
            "ratio_vs_log_p.svg",
            "competitive ratio vs log2 P",
            "log2 P",
            points(&|r: &SweepRow| to_f64(&r.ratio_p).log2()),
        ),
        (
            "ratio_vs_log_w.svg",
            "competitive ratio vs log2 W",
            "log2 W",
            points(&|r: &SweepRow| to_f64(&r.ratio_w).log2()),
        ),
    ];
    for (name, title, x_label, points) in charts {
        let chart = svg::Chart {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: "flow / reference".to_string(),
            points,
        };
        fs::write(dir.join(name), svg::render(&chart)).map_err(|e| engine_err(e.to_string()))?;
    }
    Ok(())
}

fn cmd_adversary(args: AdversaryArgs) -> Result<(), CliError> {
    let dir = out_dir(args.out)?;
    let mu = parse_mu(&args.mu)?;
    let cfg = AdversaryConfig {
        mu: mu.clone(),
        phases: args.phases,
        bombardment_count: args.bombardment,
    };
    let make_victim: Box<dyn Fn() -> Box<dyn Policy>> = match args.victim.as_str() {
        "srpt-pred" => Box::new(|| Box::new(PredSrptPolicy::new())),
        "two-bins" => Box::new(move || Box::new(TwoBinsPolicy::new(mu.clone()))),
        other => {
            return Err(config_err(format!(
                "victim `{other}` unsupported (expected srpt-pred or two-bins)"
            )))
        }
    };
    let outcome = run_adversary(&cfg, make_victim).map_err(|e| match e {
        AdversaryError::InvalidMu | AdversaryError::NoPhases => config_err(e.to_string()),
        other => engine_err(other.to_string()),
    })?;
    write_instance_file(&outcome.instance, &dir.join("adversary-instance.sppt"))
        .map_err(|e| engine_err(e.to_string()))?;
    fs::write(
        dir.join("adversary-instance.meta"),
        meta_to_string(&cfg, &outcome),
    )
    .map_err(|e| engine_err(e.to_string()))?;
    println!(
        "lambda={} x_bomb={} victim_flow={} opt_upper_bound={} ratio_lower_bound={} ({})",
        format_rat(&outcome.lambda),
        format_rat(&outcome.x_bomb),
        format_rat(&outcome.victim_flow),
        format_rat(&outcome.opt_upper_bound),
        format_rat(&outcome.ratio_lower_bound),
        decimal_string(&outcome.ratio_lower_bound, 6),
    );
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let outcomes = run_all(args.only.as_deref());
    if outcomes.is_empty() {
        return Err(config_err(format!(
            "no criteria match filter `{}`",
            args.only.unwrap_or_default()
        )));
    }
    let mut failed = 0usize;
    for outcome in &outcomes {
        println!("{}", outcome.line());
        if !outcome.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(check_err(format!("{failed} criteria failed")));
    }
    Ok(())
}

//! Command-line front end: instance generation, solving in each mode,
//! the equal-allocation baseline, shadow-price analysis and Benders traces.
//!
//! Exit codes: 0 success, 2 usage error, 3 iteration cap reached,
//! 4 infeasible or invalid instance.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tfacpp::analysis::{
    allocation_report, duals_from_json, AnalysisError, eam_baseline, growth_rate, marginal_profits, quadrant_grouping,
    write_allocation_csv, write_eam_csv, write_marginal_csv, write_quadrant_csv,
};
use tfacpp::benders::{benders_loop, BendersError, write_trace_csv, BendersMode, BendersOptions, OptimalityCut};
use tfacpp::colgen::{mip_finish, run_colgen, write_cg_trace_csv, write_month_report_csv, ColgenError, ColgenOptions};
use tfacpp::instance::{generate_synthetic, load_instance, perturb_demand, DemandLevel, Dims, Instance, InstanceError};
use tfacpp::models::{build_bim_legbased, build_pools, CoverMode, ModelOptions, Networks, Solution};
use tfacpp::pairing::DEFAULT_PAIRING_CAP;
use tfacpp::solver::{self, MipOptions, SolveStatus};
use tfacpp::timespace::DEFAULT_COUNT_TIME;

const EXIT_CAP: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;

#[derive(Parser)]
#[command(name = "tfacpp", version, about = "Tactical fleet assignment and crew pairing with crew flight time allocation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Instance JSON file.
    #[arg(long, global = true)]
    instance: Option<PathBuf>,
    /// Output file (generate, benders-trace) or directory (other commands).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for pricing and subproblem solves (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Convergence tolerance (pricing acceptance, Benders gap).
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Demand scenario applied to the instance before solving.
    #[arg(long, global = true, value_enum, default_value_t = Demand::Mid)]
    demand: Demand,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demand {
    High,
    Mid,
    Low,
}

impl From<Demand> for DemandLevel {
    fn from(d: Demand) -> Self {
        match d {
            Demand::High => DemandLevel::High,
            Demand::Mid => DemandLevel::Mid,
            Demand::Low => DemandLevel::Low,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Monolithic,
    BendersExact,
    BendersEmpirical,
    Colgen,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Cover {
    /// Every leg flown exactly once.
    Exact,
    /// Legs may be dropped at no penalty.
    Drop,
}

impl From<Cover> for CoverMode {
    fn from(c: Cover) -> Self {
        match c {
            Cover::Exact => CoverMode::Exact,
            Cover::Drop => CoverMode::AtMostOnce { drop_penalty: 0.0 },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Cuts {
    None,
    Exact,
    Empirical,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance.
    Generate(GenerateArgs),
    /// Solve an instance and write solution and reports.
    Solve(SolveArgs),
    /// Compare column generation against equal monthly crew allocation.
    Eam(EamArgs),
    /// Shadow-price analysis of an LP-mode solution.
    Analyze(AnalyzeArgs),
    /// Run the Benders loop and write its convergence trace.
    BendersTrace(BendersTraceArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 4)]
    stations: usize,
    #[arg(long, default_value_t = 2)]
    families: usize,
    #[arg(long, default_value_t = 3)]
    fleet_types: usize,
    #[arg(long, default_value_t = 12)]
    legs_per_month: usize,
    #[arg(long, default_value_t = 12)]
    months: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = Mode::Colgen)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = Cover::Exact)]
    cover: Cover,
    /// Monolithic mode: solve the LP relaxation.
    #[arg(long)]
    relax: bool,
    /// Monolithic mode: include crew pairing variables and costs.
    #[arg(long)]
    pairings: bool,
    /// Colgen mode: Benders cuts to add to every pricing problem.
    #[arg(long, value_enum, default_value_t = Cuts::None)]
    cuts: Cuts,
    /// Colgen mode: solve pricing problems as MIPs.
    #[arg(long)]
    integer_pricing: bool,
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
    /// Relative gap of MIP solves.
    #[arg(long, default_value_t = 1e-4)]
    gap: f64,
    #[arg(long, default_value_t = DEFAULT_PAIRING_CAP)]
    pairing_cap: usize,
    #[arg(long, default_value_t = DEFAULT_COUNT_TIME)]
    count_time: u32,
}

#[derive(Args)]
struct EamArgs {
    #[arg(long, value_enum, default_value_t = Cover::Drop)]
    cover: Cover,
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Solution JSON written by `solve`.
    #[arg(long)]
    solution: PathBuf,
    /// Aircraft threshold γ0 (money per aircraft and year).
    #[arg(long, default_value_t = 0.0)]
    gamma0: f64,
    /// Crew threshold β0 (money per crew member and year).
    #[arg(long, default_value_t = 0.0)]
    beta0: f64,
}

#[derive(Args)]
struct BendersTraceArgs {
    #[arg(long, value_enum, default_value_t = Cuts::Exact)]
    cuts: Cuts,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    #[arg(long, default_value_t = DEFAULT_PAIRING_CAP)]
    pairing_cap: usize,
}

#[derive(Debug)]
enum Outcome {
    Done,
    IterationCap,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.global.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global();
    }
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::IterationCap) => {
            eprintln!("warning: iteration cap reached before convergence");
            ExitCode::from(EXIT_CAP)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(ie) = cause.downcast_ref::<InstanceError>() {
            if matches!(ie, InstanceError::Validation(_) | InstanceError::MissingCost { .. }) {
                return EXIT_INFEASIBLE;
            }
        }
        if let Some(ce) = cause.downcast_ref::<ColgenError>() {
            if matches!(ce, ColgenError::InfeasibleMonth(_) | ColgenError::YearlyInfeasible(_)) {
                return EXIT_INFEASIBLE;
            }
        }
        if let Some(BendersError::Infeasible) = cause.downcast_ref::<BendersError>() {
            return EXIT_INFEASIBLE;
        }
        if cause.downcast_ref::<Infeasible>().is_some() {
            return EXIT_INFEASIBLE;
        }
        if let Some(AnalysisError::MissingDuals) = cause.downcast_ref::<AnalysisError>() {
            return 2;
        }
        if cause.downcast_ref::<Usage>().is_some() {
            return 2;
        }
    }
    1
}

#[derive(Debug)]
struct Infeasible(String);

impl std::fmt::Display for Infeasible {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "infeasible: {}", self.0)
    }
}

impl std::error::Error for Infeasible {}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for Usage {}

fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Generate(a) => cmd_generate(g, a),
        Command::Solve(a) => cmd_solve(g, a),
        Command::Eam(a) => cmd_eam(g, a),
        Command::Analyze(a) => cmd_analyze(g, a),
        Command::BendersTrace(a) => cmd_benders_trace(g, a),
    }
}

fn require<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    match p {
        Some(p) => Ok(p),
        None => Err(Usage(format!("missing required flag {flag}")).into()),
    }
}

fn load(g: &Global) -> Result<Instance> {
    let path = require(&g.instance, "--instance")?;
    let inst = load_instance(path).with_context(|| format!("loading {}", path.display()))?;
    Ok(perturb_demand(&inst, g.demand.into(), g.seed))
}

fn out_dir(g: &Global) -> Result<&Path> {
    let dir = require(&g.out, "--out")?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("writing {}", path.display()))?))
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn cmd_generate(g: &Global, a: &GenerateArgs) -> Result<Outcome> {
    let out = require(&g.out, "--out")?;
    let data = generate_synthetic(
        g.seed,
        Dims {
            stations: a.stations,
            families: a.families,
            fleet_types: a.fleet_types,
            legs_per_month: a.legs_per_month,
            months: a.months,
        },
    );
    let inst = Instance::new(data).map_err(InstanceError::Validation)?;
    inst.save(out)?;
    Ok(Outcome::Done)
}

/// Benders cuts generated by a full Benders run.
fn benders_cuts(inst: &Instance, nets: &Networks, kind: Cuts, pairing_cap: usize, g: &Global) -> Result<Vec<OptimalityCut>> {
    let mode = match kind {
        Cuts::None => return Ok(Vec::new()),
        Cuts::Exact => BendersMode::Exact,
        Cuts::Empirical => BendersMode::Empirical,
    };
    let pools = build_pools(inst, pairing_cap)?;
    let out = benders_loop(
        inst,
        nets,
        &pools,
        &BendersOptions {
            mode,
            tol: g.tol,
            ..BendersOptions::default()
        },
    )?;
    Ok(out.cuts)
}

fn cmd_solve(g: &Global, a: &SolveArgs) -> Result<Outcome> {
    let inst = load(g)?;
    let dir = out_dir(g)?;
    let nets = Networks::build(&inst, a.count_time);
    let cover: CoverMode = a.cover.into();
    let mut outcome = Outcome::Done;
    let (solution, extra) = match a.mode {
        Mode::Monolithic => {
            let pools = if a.pairings {
                Some(build_pools(&inst, a.pairing_cap)?)
            } else {
                None
            };
            let opts = ModelOptions {
                integer_x: !a.relax,
                integer_z: !a.relax,
                cover,
            };
            let ym = build_bim_legbased(&inst, &nets, pools.as_ref(), &opts);
            let res = if a.relax {
                solver::solve_lp(&ym.model)?
            } else {
                solver::solve_mip(&ym.model, &MipOptions::with_gap(a.gap))?
            };
            if !res.has_incumbent() {
                return Err(Infeasible(format!("monolithic model ended with status {:?}", res.status)).into());
            }
            let sol = ym.solution(&inst, &res, pools.as_ref());
            let mut w = create(dir, "convergence.csv")?;
            use std::io::Write;
            writeln!(w, "iteration,objective,wall_time")?;
            writeln!(w, "1,{:.6},{:.6}", res.objective, res.wall_time)?;
            let lp = if a.relax { Some(res.objective) } else { None };
            (sol, json!({"lp_objective": lp}))
        }
        Mode::BendersExact | Mode::BendersEmpirical => {
            let pools = build_pools(&inst, a.pairing_cap)?;
            let mode = if a.mode == Mode::BendersExact {
                BendersMode::Exact
            } else {
                BendersMode::Empirical
            };
            let out = benders_loop(
                &inst,
                &nets,
                &pools,
                &BendersOptions {
                    mode,
                    tol: g.tol,
                    max_iterations: a.max_iterations,
                    ..BendersOptions::default()
                },
            )?;
            write_trace_csv(&out.trace, create(dir, "convergence.csv")?)?;
            if !out.converged {
                outcome = Outcome::IterationCap;
            }
            let extra = json!({
                "upper_bound": out.upper_bound,
                "lower_bound": out.lower_bound,
                "master_objective": out.master_objective,
                "cuts": out.cuts.len(),
            });
            (out.solution, extra)
        }
        Mode::Colgen => {
            let cuts = benders_cuts(&inst, &nets, a.cuts, a.pairing_cap, g)?;
            let state = run_colgen(
                &inst,
                &nets,
                &cuts,
                &ColgenOptions {
                    tol: g.tol,
                    max_iterations: a.max_iterations,
                    cover,
                    integer_pricing: a.integer_pricing,
                    ..ColgenOptions::default()
                },
            )?;
            write_cg_trace_csv(&state.trace, create(dir, "convergence.csv")?)?;
            if !state.converged {
                outcome = Outcome::IterationCap;
            }
            let fin = mip_finish(&state, &inst, &nets, a.gap)?;
            write_month_report_csv(&fin.months, create(dir, "months.csv")?)?;
            let extra = json!({
                "lp_objective": state.lp_objective,
                "cgmp_calls": state.cgmp_calls,
                "cgsp_calls": state.cgsp_calls,
                "columns": state.total_columns(),
                "converged": state.converged,
                "uncovered_legs": fin.months.iter().flat_map(|m| m.uncovered.clone()).collect::<Vec<_>>(),
            });
            (fin.solution, extra)
        }
    };
    write_solution(&inst, dir, &solution, a, extra)?;
    write_allocation_csv(&allocation_report(&solution, &inst), create(dir, "allocation.csv")?)?;
    println!("objective {:.6}", solution.objective);
    Ok(outcome)
}

fn write_solution(inst: &Instance, dir: &Path, sol: &Solution, a: &SolveArgs, extra: serde_json::Value) -> Result<()> {
    let mut v = sol.to_json(inst);
    let obj = v.as_object_mut().expect("solution JSON is an object");
    obj.insert(
        "mode".into(),
        json!(Mode::value_variants()
            .iter()
            .find(|m| **m == a.mode)
            .and_then(|m| m.to_possible_value())
            .map(|p| p.get_name().to_string())),
    );
    obj.insert("cover".into(), serde_json::to_value(CoverMode::from(a.cover))?);
    if let serde_json::Value::Object(e) = extra {
        obj.extend(e);
    }
    write_json(dir, "solution.json", &v)
}

fn colgen_lp(inst: &Instance, nets: &Networks, cover: CoverMode, g: &Global, max_iterations: usize) -> Result<(f64, bool)> {
    let state = run_colgen(
        inst,
        nets,
        &[],
        &ColgenOptions {
            tol: g.tol,
            max_iterations,
            cover,
            ..ColgenOptions::default()
        },
    )?;
    Ok((state.lp_objective, state.converged))
}

fn cmd_eam(g: &Global, a: &EamArgs) -> Result<Outcome> {
    let inst = load(g)?;
    let dir = out_dir(g)?;
    let nets = Networks::build(&inst, DEFAULT_COUNT_TIME);
    let cover: CoverMode = a.cover.into();
    let eam = eam_baseline(&inst, &nets, &[], cover)?;
    let (cg, converged) = colgen_lp(&inst, &nets, cover, g, a.max_iterations)?;
    write_eam_csv(&eam, cg, create(dir, "eam.csv")?)?;
    println!(
        "cgmp profit {cg:.6} eam profit {:.6} growth {:.6}%",
        eam.profit,
        growth_rate(cg, eam.profit)
    );
    Ok(if converged { Outcome::Done } else { Outcome::IterationCap })
}

fn cmd_analyze(g: &Global, a: &AnalyzeArgs) -> Result<Outcome> {
    let inst = load(g)?;
    let dir = out_dir(g)?;
    let text = fs::read_to_string(&a.solution).with_context(|| format!("reading {}", a.solution.display()))?;
    let sol: serde_json::Value = serde_json::from_str(&text).context("parsing solution JSON")?;
    let duals = duals_from_json(&inst, &sol)?;
    let report = marginal_profits(Some(&duals), &inst)?;
    write_marginal_csv(&report, create(dir, "marginal.csv")?)?;
    write_quadrant_csv(&quadrant_grouping(&report, a.gamma0, a.beta0), create(dir, "quadrants.csv")?)?;

    let cover: CoverMode = match sol.get("cover") {
        Some(c) => serde_json::from_value(c.clone()).context("solution cover mode")?,
        None => CoverMode::Exact,
    };
    let nets = Networks::build(&inst, DEFAULT_COUNT_TIME);
    let eam = match eam_baseline(&inst, &nets, &[], cover) {
        Ok(e) => e,
        Err(e) if cover == CoverMode::Exact => {
            log::warn!("{e}; comparing with legs droppable instead");
            let drop = CoverMode::AtMostOnce { drop_penalty: 0.0 };
            let (cg, _) = colgen_lp(&inst, &nets, drop, g, 500)?;
            let eam = eam_baseline(&inst, &nets, &[], drop)?;
            write_eam_csv(&eam, cg, create(dir, "eam.csv")?)?;
            return Ok(Outcome::Done);
        }
        Err(e) => return Err(e.into()),
    };
    let cg = match sol.get("lp_objective").and_then(|v| v.as_f64()) {
        Some(v) => v,
        None => bail!("solution has no LP objective; solve with --mode colgen or --relax"),
    };
    write_eam_csv(&eam, cg, create(dir, "eam.csv")?)?;
    Ok(Outcome::Done)
}

fn cmd_benders_trace(g: &Global, a: &BendersTraceArgs) -> Result<Outcome> {
    let inst = load(g)?;
    let out = require(&g.out, "--out")?;
    let mode = match a.cuts {
        Cuts::Exact => BendersMode::Exact,
        Cuts::Empirical => BendersMode::Empirical,
        Cuts::None => return Err(Usage("benders-trace needs --cuts exact or empirical".into()).into()),
    };
    let nets = Networks::build(&inst, DEFAULT_COUNT_TIME);
    let pools = build_pools(&inst, a.pairing_cap)?;
    let res = benders_loop(
        &inst,
        &nets,
        &pools,
        &BendersOptions {
            mode,
            tol: g.tol,
            max_iterations: a.max_iterations,
            ..BendersOptions::default()
        },
    )?;
    if res.solution.status == SolveStatus::Infeasible {
        return Err(Infeasible("Benders master".into()).into());
    }
    write_trace_csv(&res.trace, BufWriter::new(File::create(out)?))?;
    Ok(if res.converged { Outcome::Done } else { Outcome::IterationCap })
}

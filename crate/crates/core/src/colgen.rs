//! Column generation over monthly fleet assignment schedules.
//!
//! The master selects a convex combination of monthly schedules per month
//! subject to the yearly crew-time rows; each month's pricing problem is a
//! fleet assignment with monthly crew caps whose per-leg profit is reduced
//! by the yearly crew price β. After the LP converges, each month is
//! re-solved as a MIP with its crew allocation t̃_b^m fixed from the LP.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::benders::OptimalityCut;
use crate::instance::{FamilyId, FleetId, Instance, LegId, MonthId};
use crate::models::{build_bmp_months, build_month_model, CoverMode, Duals, ModelOptions, Networks, Solution, YearModel};
use crate::solver::{self, LinearModel, MipOptions, RowId, RowSense, Sense, SolveStatus, SolverError, VarId};

/// One monthly fleet assignment schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub month: MonthId,
    /// Nonzero x_lf values.
    pub x: Vec<(LegId, FleetId, f64)>,
    /// η_b^m at the schedule.
    pub eta: BTreeMap<FamilyId, f64>,
    /// r_m^ψ = Σ r x − drop penalties − Σ_b η_b^m.
    pub profit: f64,
    /// t_mb^ψ per family.
    pub crew_time: BTreeMap<FamilyId, f64>,
}

impl Column {
    /// Recomputes (profit, crew time) from the schedule itself.
    pub fn recompute(&self, inst: &Instance, cover: CoverMode) -> (f64, BTreeMap<FamilyId, f64>) {
        let mut profit = 0.0;
        let mut time: BTreeMap<FamilyId, f64> = inst.families().map(|b| (b, 0.0)).collect();
        let mut covered = 0.0;
        for &(l, f, v) in &self.x {
            let b = inst.family_of(f);
            profit += inst.profit(l, f).unwrap_or(0.0) * v;
            *time.get_mut(&b).expect("family") += inst.leg_hours(l, b) * v;
            covered += v;
        }
        if let CoverMode::AtMostOnce { drop_penalty } = cover {
            profit -= drop_penalty * (inst.legs_in_month(self.month).len() as f64 - covered);
        }
        profit -= self.eta.values().sum::<f64>();
        (profit, time)
    }

    fn same_schedule(&self, other: &Column) -> bool {
        self.x.len() == other.x.len()
            && self
                .x
                .iter()
                .zip(&other.x)
                .all(|(a, b)| a.0 == b.0 && a.1 == b.1 && (a.2 - b.2).abs() < 1e-9)
    }
}

#[derive(Debug, Clone)]
pub struct ColgenOptions {
    /// Acceptance tolerance on χ_m − α_m, relative to max(1, |α_m|).
    pub tol: f64,
    pub max_iterations: usize,
    pub cover: CoverMode,
    /// Solve pricing problems as MIPs; LP pricing (the default) makes the
    /// master LP equal the leg-based model's LP relaxation.
    pub integer_pricing: bool,
    /// Gap of the zero-dual initialization MIPs.
    pub init_gap: f64,
    /// Penalty per hour of yearly crew time above budget; derived from the
    /// instance when `None`.
    pub big_m: Option<f64>,
}

impl Default for ColgenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iterations: 500,
            cover: CoverMode::Exact,
            integer_pricing: false,
            init_gap: 1e-2,
            big_m: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ColgenError {
    #[error("month {0} has no feasible schedule")]
    InfeasibleMonth(String),
    #[error("month {0} has no columns")]
    EmptyMonth(String),
    #[error("yearly crew budget of family {0} cannot be met")]
    YearlyInfeasible(String),
    #[error("master problem ended with status {0:?}")]
    Master(SolveStatus),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgTraceRow {
    pub iteration: usize,
    pub cgmp_calls: usize,
    pub cgsp_calls: usize,
    pub columns_added: usize,
    pub total_columns: usize,
    pub lp_objective: f64,
    pub cgmp_time: f64,
    pub avg_cgsp_time: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct CgState {
    pub columns: Vec<Vec<Column>>,
    /// Convexity duals α_m.
    pub alpha: Vec<f64>,
    /// Yearly crew-time duals β_b ≥ 0.
    pub beta: Vec<f64>,
    /// Count-row duals γ_f^m of the final pricing LPs.
    pub gamma: BTreeMap<(MonthId, FleetId), f64>,
    /// Master LP values u_m^ψ.
    pub u: Vec<Vec<f64>>,
    pub lp_objective: f64,
    pub cgmp_calls: usize,
    pub cgsp_calls: usize,
    pub trace: Vec<CgTraceRow>,
    pub converged: bool,
    pub big_m: f64,
    pub cover: CoverMode,
    pub cuts: Vec<OptimalityCut>,
}

impl CgState {
    pub fn total_columns(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// t̃_b^m = Σ_ψ t_mb^ψ u_m^ψ.
    pub fn crew_allocation(&self, m: MonthId, b: FamilyId) -> f64 {
        self.columns[m.0]
            .iter()
            .zip(&self.u[m.0])
            .map(|(c, u)| c.crew_time.get(&b).copied().unwrap_or(0.0) * u)
            .sum()
    }

    /// Σ_ψ r_m^ψ u_m^ψ.
    pub fn month_lp_objective(&self, m: MonthId) -> f64 {
        self.columns[m.0].iter().zip(&self.u[m.0]).map(|(c, u)| c.profit * u).sum()
    }

    /// Reduced cost test value χ of an existing column at the current duals.
    pub fn column_chi(&self, c: &Column) -> f64 {
        c.profit
            - c.crew_time
                .iter()
                .map(|(b, t)| self.beta[b.0] * t)
                .sum::<f64>()
    }

    pub fn duals(&self) -> Duals {
        Duals {
            alpha: self.alpha.iter().enumerate().map(|(m, &a)| (MonthId(m), a)).collect(),
            beta: self.beta.iter().enumerate().map(|(b, &v)| (FamilyId(b), v)).collect(),
            gamma: self.gamma.clone(),
            omega: BTreeMap::new(),
        }
    }
}

/// Master LP/MIP with its row and column handles.
pub struct Cgmp {
    pub model: LinearModel,
    pub u: Vec<Vec<VarId>>,
    pub convexity: Vec<RowId>,
    pub yearly: Vec<RowId>,
    pub slack: Vec<VarId>,
}

/// max Σ r u − M Σ s  s.t.  Σ_ψ u_m^ψ = 1 (∀m),  Σ_m Σ_ψ t u − s_b ≤ t_b (∀b).
pub fn build_cgmp(inst: &Instance, columns: &[Vec<Column>], big_m: f64, integer: bool) -> Result<Cgmp, ColgenError> {
    let mut model = LinearModel::new(Sense::Maximize);
    let mut u = Vec::with_capacity(columns.len());
    let mut convexity = Vec::with_capacity(columns.len());
    for (m, cols) in columns.iter().enumerate() {
        if cols.is_empty() {
            return Err(ColgenError::EmptyMonth(inst.month_name(MonthId(m)).to_string()));
        }
        // convexity rows bound u by 1, so the LP leaves it unbounded above
        let upper = if integer { 1.0 } else { f64::INFINITY };
        let vars: Vec<VarId> = cols
            .iter()
            .enumerate()
            .map(|(k, c)| model.add_var(format!("u_{m}_{k}"), 0.0, upper, integer, c.profit))
            .collect();
        let terms = vars.iter().map(|&v| (v, 1.0)).collect();
        convexity.push(model.add_row(format!("conv_{m}"), terms, RowSense::Eq, 1.0));
        u.push(vars);
    }
    let mut yearly = Vec::new();
    let mut slack = Vec::new();
    for b in inst.families() {
        let s = model.add_continuous(format!("slack_{}", b.index()), 0.0, f64::INFINITY, -big_m);
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for (m, cols) in columns.iter().enumerate() {
            for (c, &v) in cols.iter().zip(&u[m]) {
                let t = c.crew_time.get(&b).copied().unwrap_or(0.0);
                if t != 0.0 {
                    terms.push((v, t));
                }
            }
        }
        terms.push((s, -1.0));
        yearly.push(model.add_row(format!("year_{}", b.index()), terms, RowSense::Le, inst.yearly_budget(b)));
        slack.push(s);
    }
    Ok(Cgmp {
        model,
        u,
        convexity,
        yearly,
        slack,
    })
}

#[derive(Debug, Clone)]
pub struct Pricing {
    pub chi: f64,
    /// Priced schedule when the problem was feasible.
    pub column: Option<Column>,
    /// Count-row duals, LP pricing only.
    pub gamma: Option<Vec<f64>>,
    pub time: f64,
}

/// Solves the pricing problem of month `m` at crew prices `beta`.
pub fn price_month(
    inst: &Instance,
    nets: &Networks,
    m: MonthId,
    beta: &[f64],
    cuts: &[OptimalityCut],
    cover: CoverMode,
    integer: Option<f64>,
) -> Result<Pricing, SolverError> {
    let beta_map: BTreeMap<_, _> = beta.iter().enumerate().map(|(b, &v)| (FamilyId(b), v)).collect();
    let caps: BTreeMap<_, _> = inst.families().map(|b| (b, inst.monthly_budget(b, m))).collect();
    let opts = ModelOptions {
        integer_x: integer.is_some(),
        integer_z: false,
        cover,
    };
    let ym = build_month_model(inst, nets, m, &caps, &beta_map, cuts, &opts);
    let res = match integer {
        Some(gap) => solver::solve_mip(&ym.model, &MipOptions::with_gap(gap))?,
        None => solver::solve_lp(&ym.model)?,
    };
    if !res.is_optimal() && !(res.status == SolveStatus::Limit && res.has_incumbent()) {
        return Ok(Pricing {
            chi: f64::NEG_INFINITY,
            column: None,
            gamma: None,
            time: res.wall_time,
        });
    }
    let sol = ym.solution(inst, &res, None);
    let mut x: Vec<_> = sol.x_values.iter().map(|&(_, l, f, v)| (l, f, v)).collect();
    x.sort_by_key(|&(l, f, _)| (l, f));
    let eta: BTreeMap<_, _> = ym.eta.iter().map(|(&(_, b), &v)| (b, res.value(v))).collect();
    let mut column = Column {
        month: m,
        x,
        eta,
        profit: 0.0,
        crew_time: BTreeMap::new(),
    };
    let (profit, time) = column.recompute(inst, cover);
    column.profit = profit;
    column.crew_time = time;
    let gamma = res
        .duals
        .as_ref()
        .map(|_| ym.blocks[0].count.iter().map(|&r| res.dual(r).unwrap_or(0.0)).collect());
    Ok(Pricing {
        chi: res.objective,
        column: Some(column),
        gamma,
        time: res.wall_time,
    })
}

/// Upper bound on any sensible crew price: the largest profit per crew
/// hour of any (leg, fleet type), times ten.
fn default_big_m(inst: &Instance) -> f64 {
    let mut best: f64 = 1.0;
    for l in (0..inst.num_legs()).map(LegId) {
        for f in inst.fleets() {
            if let Some(r) = inst.profit(l, f) {
                let t = inst.leg_hours(l, inst.family_of(f));
                best = best.max(r.abs() / t);
            }
        }
    }
    10.0 * best
}

/// Whether the yearly crew budgets admit any monthly schedule (LP sense).
fn yearly_feasible(inst: &Instance, nets: &Networks, cover: CoverMode) -> Result<bool, ColgenError> {
    let opts = ModelOptions {
        integer_x: false,
        integer_z: false,
        cover,
    };
    let ym = crate::models::build_bim_legbased(inst, nets, None, &opts);
    let res = solver::solve_lp(&ym.model)?;
    Ok(res.status != SolveStatus::Infeasible)
}

/// Runs column generation to LP optimality of the master.
pub fn run_colgen(
    inst: &Instance,
    nets: &Networks,
    cuts: &[OptimalityCut],
    opts: &ColgenOptions,
) -> Result<CgState, ColgenError> {
    let start = Instant::now();
    let months: Vec<MonthId> = inst.months().collect();
    let zero = vec![0.0; inst.num_families()];
    let pricing_gap = opts.integer_pricing.then_some(solver::PRICING_MIP_GAP);

    // initial columns from zero-dual pricing MIPs, LP if the MIP fails
    let init: Vec<Column> = months
        .par_iter()
        .map(|&m| {
            let mut p = price_month(inst, nets, m, &zero, cuts, opts.cover, Some(opts.init_gap))?;
            if p.column.is_none() {
                p = price_month(inst, nets, m, &zero, cuts, opts.cover, None)?;
            }
            p.column
                .ok_or_else(|| ColgenError::InfeasibleMonth(inst.month_name(m).to_string()))
        })
        .collect::<Result<_, ColgenError>>()?;

    let base_m = opts.big_m.unwrap_or_else(|| default_big_m(inst));
    let mut state = CgState {
        columns: init.into_iter().map(|c| vec![c]).collect(),
        alpha: vec![0.0; months.len()],
        beta: zero.clone(),
        gamma: BTreeMap::new(),
        u: Vec::new(),
        lp_objective: f64::NEG_INFINITY,
        cgmp_calls: 0,
        cgsp_calls: months.len(),
        trace: Vec::new(),
        converged: false,
        big_m: base_m,
        cover: opts.cover,
        cuts: cuts.to_vec(),
    };

    loop {
        if state.cgmp_calls >= opts.max_iterations {
            break;
        }
        let t0 = Instant::now();
        let master = build_cgmp(inst, &state.columns, state.big_m, false)?;
        let res = solver::solve_lp(&master.model)?;
        if !res.is_optimal() {
            return Err(ColgenError::Master(res.status));
        }
        let cgmp_time = t0.elapsed().as_secs_f64();
        state.cgmp_calls += 1;
        state.lp_objective = res.objective;
        state.alpha = master.convexity.iter().map(|&r| res.dual(r).unwrap_or(0.0)).collect();
        state.beta = master.yearly.iter().map(|&r| res.dual(r).unwrap_or(0.0).max(0.0)).collect();
        state.u = master
            .u
            .iter()
            .map(|vs| vs.iter().map(|&v| res.value(v)).collect())
            .collect();
        let slack: f64 = master.slack.iter().map(|&s| res.value(s)).sum();

        let beta = state.beta.clone();
        let priced: Vec<Pricing> = months
            .par_iter()
            .map(|&m| price_month(inst, nets, m, &beta, cuts, opts.cover, pricing_gap))
            .collect::<Result<_, _>>()?;
        state.cgsp_calls += months.len();
        let avg_cgsp_time = priced.iter().map(|p| p.time).sum::<f64>() / months.len() as f64;

        let mut added = 0;
        for (m, p) in months.iter().zip(priced) {
            if let Some(g) = &p.gamma {
                for (f, &v) in g.iter().enumerate() {
                    state.gamma.insert((*m, FleetId(f)), v);
                }
            }
            let alpha = state.alpha[m.0];
            if p.chi > alpha + opts.tol * alpha.abs().max(1.0) {
                let col = p.column.expect("finite χ has a column");
                if !state.columns[m.0].iter().any(|c| c.same_schedule(&col)) {
                    state.columns[m.0].push(col);
                    added += 1;
                }
            }
        }
        state.trace.push(CgTraceRow {
            iteration: state.cgmp_calls,
            cgmp_calls: state.cgmp_calls,
            cgsp_calls: state.cgsp_calls,
            columns_added: added,
            total_columns: state.total_columns(),
            lp_objective: state.lp_objective,
            cgmp_time,
            avg_cgsp_time,
            wall_time: start.elapsed().as_secs_f64(),
        });
        log::info!(
            "colgen iteration {}: LP {:.3}, {added} column(s) added",
            state.cgmp_calls,
            state.lp_objective
        );
        if added == 0 {
            if slack > 1e-6 {
                let b = master
                    .slack
                    .iter()
                    .position(|&s| res.value(s) > 1e-6)
                    .unwrap_or(0);
                let infeasible = || ColgenError::YearlyInfeasible(inst.family(FamilyId(b)).id.clone());
                // Slack at convergence means either the budget cannot be met
                // or M undervalues it; settle which on the leg-based LP before
                // raising M, since huge penalties break the LP numerically.
                if !yearly_feasible(inst, nets, opts.cover)? || state.big_m > base_m * 1e4 {
                    return Err(infeasible());
                }
                state.big_m *= 100.0;
                continue;
            }
            state.converged = true;
            break;
        }
    }

    if opts.integer_pricing {
        // count-row duals come from the LP relaxation of the final pricing
        for &m in &months {
            let p = price_month(inst, nets, m, &state.beta, cuts, opts.cover, None)?;
            for (f, &v) in p.gamma.unwrap_or_default().iter().enumerate() {
                state.gamma.insert((m, FleetId(f)), v);
            }
        }
    }
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonthReport {
    pub month: String,
    pub lp_objective: f64,
    pub mip_objective: f64,
    /// (MIP − LP) / |LP|.
    pub gap: f64,
    pub mip_time: f64,
    /// Solved in the joint repair pass instead of at its own allocation t̃.
    pub repaired: bool,
    /// Legs left unassigned when no exact-cover schedule was found.
    pub uncovered: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct FinishOutcome {
    pub solution: Solution,
    pub months: Vec<MonthReport>,
    /// t̃_b^m used as monthly caps.
    pub allocation: BTreeMap<(MonthId, FamilyId), f64>,
}

/// Objective of month `m` inside a (possibly multi-month) model solution:
/// Σ r x − drop penalties − Σ_b η_b^m.
fn month_objective(inst: &Instance, ym: &YearModel, res: &solver::SolveResult, m: MonthId, cover: CoverMode) -> f64 {
    let blk = ym.block(m);
    let mut obj = 0.0;
    let mut covered = 0.0;
    for &(l, f, v) in &blk.x {
        let val = res.value(v);
        obj += inst.profit(l, f).unwrap_or(0.0) * val;
        covered += val;
    }
    if let CoverMode::AtMostOnce { drop_penalty } = cover {
        obj -= drop_penalty * (inst.legs_in_month(m).len() as f64 - covered);
    }
    obj - inst
        .families()
        .filter_map(|b| ym.eta.get(&(m, b)))
        .map(|&e| res.value(e))
        .sum::<f64>()
}

/// Restriction of a model solution to month `m`.
fn month_solution(sol: &Solution, m: MonthId) -> Solution {
    Solution {
        status: sol.status,
        objective: 0.0,
        assignment: sol.assignment.iter().filter(|((mm, _), _)| *mm == m).map(|(&k, &v)| (k, v)).collect(),
        x_values: sol.x_values.iter().filter(|x| x.0 == m).copied().collect(),
        fractional: false,
        ground_flows: sol.ground_flows.iter().filter(|((mm, _), _)| *mm == m).map(|(&k, v)| (k, v.clone())).collect(),
        pairing_selection: BTreeMap::new(),
        crew_time_used: sol.crew_time_used.iter().filter(|((mm, _), _)| *mm == m).map(|(&k, &v)| (k, v)).collect(),
        revenue: 0.0,
        crew_cost: 0.0,
        duals: None,
    }
}

/// Re-solves every month as a MIP with crew caps t̃_b^m from the LP master.
///
/// Months without an exact-cover schedule inside t̃ are repaired jointly:
/// one leg-based MIP over those months with exact cover, the instance's
/// monthly caps, and the yearly budget left after the other months. Only if
/// that fails too are months solved with droppable legs, which are then
/// reported as uncovered.
pub fn mip_finish(
    state: &CgState,
    inst: &Instance,
    nets: &Networks,
    gap: f64,
) -> Result<FinishOutcome, ColgenError> {
    let months: Vec<MonthId> = inst.months().collect();
    let allocation: BTreeMap<_, _> = months
        .iter()
        .flat_map(|&m| inst.families().map(move |b| (m, b)))
        .map(|(m, b)| ((m, b), state.crew_allocation(m, b)))
        .collect();
    let mip_opts = MipOptions::with_gap(gap);
    let integer = |cover| ModelOptions {
        integer_x: true,
        integer_z: false,
        cover,
    };
    let solve_month = |m: MonthId, cover: CoverMode| -> Result<(solver::SolveResult, YearModel), ColgenError> {
        let caps: BTreeMap<_, _> = inst
            .families()
            .map(|b| (b, allocation[&(m, b)] + 1e-7 * allocation[&(m, b)].max(1.0)))
            .collect();
        let ym = build_month_model(inst, nets, m, &caps, &BTreeMap::new(), &state.cuts, &integer(cover));
        let res = solver::solve_mip(&ym.model, &mip_opts)?;
        Ok((res, ym))
    };
    let report = |m: MonthId, obj: f64, time: f64, repaired: bool, sol: &Solution| {
        let lp = state.month_lp_objective(m);
        MonthReport {
            month: inst.month_name(m).to_string(),
            lp_objective: lp,
            mip_objective: obj,
            gap: (obj - lp) / lp.abs().max(1.0),
            mip_time: time,
            repaired,
            uncovered: inst
                .legs_in_month(m)
                .iter()
                .filter(|l| !sol.assignment.contains_key(&(m, **l)))
                .map(|&l| inst.leg(l).id.clone())
                .collect(),
        }
    };

    let first: Vec<(MonthId, solver::SolveResult, YearModel)> = months
        .par_iter()
        .map(|&m| solve_month(m, CoverMode::Exact).map(|(r, y)| (m, r, y)))
        .collect::<Result<_, _>>()?;
    let mut done: BTreeMap<MonthId, (MonthReport, Solution)> = BTreeMap::new();
    let mut failed = Vec::new();
    for (m, res, ym) in first {
        if res.has_incumbent() {
            let sol = ym.solution(inst, &res, None);
            done.insert(m, (report(m, res.objective, res.wall_time, false, &sol), sol));
        } else {
            failed.push(m);
        }
    }

    if !failed.is_empty() {
        let names: Vec<_> = failed.iter().map(|&m| inst.month_name(m)).collect();
        log::warn!("exact cover infeasible at t̃ in {names:?}; repairing jointly");
        let mut ym = build_bmp_months(inst, nets, &failed, &state.cuts, &integer(CoverMode::Exact));
        for b in inst.families() {
            let used: f64 = done
                .iter()
                .map(|(&m, (_, s))| s.crew_time_used.get(&(m, b)).copied().unwrap_or(0.0))
                .sum();
            ym.model.set_rhs(ym.yearly_rows[&b], (inst.yearly_budget(b) - used).max(0.0));
        }
        let res = solver::solve_mip(&ym.model, &mip_opts)?;
        if res.has_incumbent() {
            let sol = ym.solution(inst, &res, None);
            let time = res.wall_time / failed.len() as f64;
            for &m in &failed {
                let obj = month_objective(inst, &ym, &res, m, CoverMode::Exact);
                let ms = month_solution(&sol, m);
                done.insert(m, (report(m, obj, time, true, &ms), ms));
            }
        } else {
            log::warn!("joint repair infeasible; dropping legs in {names:?}");
            let cover = CoverMode::AtMostOnce { drop_penalty: 0.0 };
            for &m in &failed {
                let (res, ym) = solve_month(m, cover)?;
                if !res.has_incumbent() {
                    return Err(ColgenError::InfeasibleMonth(inst.month_name(m).to_string()));
                }
                let sol = ym.solution(inst, &res, None);
                done.insert(m, (report(m, res.objective, res.wall_time, false, &sol), sol));
            }
        }
    }

    let mut solution = Solution {
        status: SolveStatus::Optimal,
        duals: Some(state.duals()),
        ..Solution::default()
    };
    let mut reports = Vec::new();
    for (m, (report, sol)) in done {
        solution.objective += report.mip_objective;
        for &(mm, l, f, v) in &sol.x_values {
            debug_assert_eq!(mm, m);
            solution.revenue += inst.profit(l, f).unwrap_or(0.0) * v;
        }
        solution.assignment.extend(sol.assignment);
        solution.x_values.extend(sol.x_values);
        solution.ground_flows.extend(sol.ground_flows);
        solution.crew_time_used.extend(sol.crew_time_used);
        reports.push(report);
    }
    solution.crew_cost = solution.revenue - solution.objective;
    Ok(FinishOutcome {
        solution,
        months: reports,
        allocation,
    })
}

pub fn write_cg_trace_csv<W: Write>(rows: &[CgTraceRow], mut w: W) -> io::Result<()> {
    writeln!(
        w,
        "iteration,cgmp_calls,cgsp_calls,columns_added,total_columns,lp_objective,cgmp_time,avg_cgsp_time,wall_time"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            r.iteration,
            r.cgmp_calls,
            r.cgsp_calls,
            r.columns_added,
            r.total_columns,
            r.lp_objective,
            r.cgmp_time,
            r.avg_cgsp_time,
            r.wall_time
        )?;
    }
    Ok(())
}

pub fn write_month_report_csv<W: Write>(rows: &[MonthReport], mut w: W) -> io::Result<()> {
    writeln!(w, "month,lp_objective,mip_objective,gap,mip_time,repaired,uncovered")?;
    for r in rows {
        writeln!(
            w,
            "{},{:.6},{:.6},{:.9},{:.6},{},{}",
            r.month,
            r.lp_objective,
            r.mip_objective,
            r.gap,
            r.mip_time,
            r.repaired,
            r.uncovered.join(" ")
        )?;
    }
    Ok(())
}

//! Benders decomposition of the integrated model: crew pairing subproblems
//! per (month, family), exact and empirical optimality cuts, and the master
//! iteration loop.
//!
//! The subproblem for (m, b) is the LP relaxation of the crew pairing
//! problem with one row per leg of month m and right-hand side
//! Σ_{f∈F_b} x̄_lf. Keeping rows for unassigned legs (right-hand side 0)
//! makes its duals feasible for every pairing in the pool, so each cut is
//! valid at every assignment and tight at the one that generated it.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{FamilyId, Instance, LegId, MonthId};
use crate::models::{build_monolithic_bmp, ModelOptions, Networks, Pools, Solution};
use crate::pairing::{artificial_pairing, solve_cover, solve_cpp, Pairing, PairingError};
use crate::solver::{self, MipOptions, SolveStatus, SolverError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutKind {
    Exact,
    Empirical,
}

/// η_b^m ≥ Σ_l ω_l Σ_{f∈F_b} x_lf^m.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityCut {
    pub month: MonthId,
    pub family: FamilyId,
    pub coefficients: BTreeMap<LegId, f64>,
    pub kind: CutKind,
}

impl OptimalityCut {
    /// Right-hand side of the cut at an assignment given as the set of legs
    /// flown by the cut's family.
    pub fn evaluate(&self, legs: impl IntoIterator<Item = LegId>) -> f64 {
        legs.into_iter().map(|l| self.coefficients.get(&l).copied().unwrap_or(0.0)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BspResult {
    pub objective: f64,
    /// One dual per leg of the month.
    pub duals: BTreeMap<LegId, f64>,
    /// z values aligned with the pool.
    pub selection: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum BendersError {
    #[error("master problem is infeasible")]
    Infeasible,
    #[error("master problem ended with status {0:?}")]
    Master(SolveStatus),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Legs of month `m` flown by family `b` under `assignment`.
pub fn assigned_legs(
    inst: &Instance,
    assignment: &BTreeMap<(MonthId, LegId), crate::instance::FleetId>,
    m: MonthId,
    b: FamilyId,
) -> Vec<LegId> {
    inst.legs_in_month(m)
        .iter()
        .copied()
        .filter(|&l| assignment.get(&(m, l)).is_some_and(|&f| inst.family_of(f) == b))
        .collect()
}

/// Crew pairing LP of (m, b) at an assignment flying `assigned`.
pub fn solve_bsp(inst: &Instance, m: MonthId, assigned: &[LegId], pool: &[Pairing]) -> Result<BspResult, PairingError> {
    let legs = inst.legs_in_month(m);
    if assigned.is_empty() {
        return Ok(BspResult {
            objective: 0.0,
            duals: legs.iter().map(|&l| (l, 0.0)).collect(),
            selection: vec![0.0; pool.len()],
        });
    }
    let rows: Vec<(LegId, f64)> = legs
        .iter()
        .map(|&l| (l, if assigned.contains(&l) { 1.0 } else { 0.0 }))
        .collect();
    let sol = solve_cover(pool, &rows, true)?;
    let duals = sol.duals.expect("LP solve returns duals");
    Ok(BspResult {
        objective: sol.objective,
        duals: legs.iter().copied().zip(duals).collect(),
        selection: sol.selection,
    })
}

pub fn make_cut(duals: &BTreeMap<LegId, f64>, m: MonthId, b: FamilyId, kind: CutKind) -> OptimalityCut {
    OptimalityCut {
        month: m,
        family: b,
        coefficients: duals.clone(),
        kind,
    }
}

/// Crew prices estimated from a historical pool: LP duals of the crew
/// pairing problem covering `leg_universe`, scaled by `markup`. Legs the
/// pool cannot cover get a recourse pairing.
pub fn estimate_empirical_duals(
    inst: &Instance,
    historical: &[Pairing],
    m: MonthId,
    b: FamilyId,
    leg_universe: &[LegId],
    markup: f64,
) -> Result<BTreeMap<LegId, f64>, PairingError> {
    let mut pool: Vec<Pairing> = historical.to_vec();
    for &l in leg_universe {
        if !pool.iter().any(|p| p.artificial && p.covers(l)) {
            pool.push(artificial_pairing(inst, m, b, l));
        }
    }
    let sol = solve_cpp(&pool, leg_universe, true)?;
    Ok(leg_universe
        .iter()
        .copied()
        .zip(sol.duals.expect("LP solve returns duals"))
        .map(|(l, w)| (l, markup * w))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BendersMode {
    Exact,
    Empirical,
}

#[derive(Debug, Clone)]
pub struct BendersOptions {
    pub mode: BendersMode,
    /// Relative UB/LB gap for exact mode.
    pub tol: f64,
    pub max_iterations: usize,
    /// Relative gap of each master MIP solve.
    pub master_gap: f64,
    /// Pairings used to price empirical cuts; defaults to the full pool.
    pub historical: Option<Pools>,
}

impl Default for BendersOptions {
    fn default() -> Self {
        Self {
            mode: BendersMode::Exact,
            tol: 1e-6,
            max_iterations: 100,
            master_gap: 1e-8,
            historical: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub cuts_added: usize,
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct BendersOutcome {
    /// Best incumbent; its objective is Σ r x̄ minus true crew pairing cost.
    pub solution: Solution,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
    pub upper_bound: f64,
    pub lower_bound: f64,
    /// Objective of the final master problem (estimated crew cost).
    pub master_objective: f64,
    pub cuts: Vec<OptimalityCut>,
}

/// Evaluates an assignment against the true subproblems: returns each
/// (m, b) subproblem result.
pub fn evaluate_assignment(
    inst: &Instance,
    pools: &Pools,
    assignment: &BTreeMap<(MonthId, LegId), crate::instance::FleetId>,
) -> Result<BTreeMap<(MonthId, FamilyId), BspResult>, PairingError> {
    let keys: Vec<_> = pools.keys().copied().collect();
    keys.par_iter()
        .map(|&(m, b)| {
            let legs = assigned_legs(inst, assignment, m, b);
            solve_bsp(inst, m, &legs, &pools[&(m, b)]).map(|r| ((m, b), r))
        })
        .collect()
}

fn attach_bsp(sol: &mut Solution, pools: &Pools, bsp: &BTreeMap<(MonthId, FamilyId), BspResult>) {
    sol.crew_cost = bsp.values().map(|r| r.objective).sum();
    sol.objective = sol.revenue - sol.crew_cost;
    sol.pairing_selection = bsp
        .iter()
        .map(|(key, r)| {
            let picked = pools[key]
                .iter()
                .zip(&r.selection)
                .filter(|(_, &z)| z > 1e-6)
                .map(|(p, &z)| (p.id.clone(), z))
                .collect();
            (*key, picked)
        })
        .collect();
}

pub fn benders_loop(
    inst: &Instance,
    nets: &Networks,
    pools: &Pools,
    opts: &BendersOptions,
) -> Result<BendersOutcome, BendersError> {
    let start = Instant::now();
    let mut master = build_monolithic_bmp(inst, nets, &[], &ModelOptions::default());
    let mip_opts = MipOptions::with_gap(opts.master_gap);
    let mut cuts = Vec::new();

    if opts.mode == BendersMode::Empirical {
        let historical = opts.historical.as_ref().unwrap_or(pools);
        let markup = inst.crew_policy().empirical_markup;
        let keys: Vec<_> = pools.keys().copied().collect();
        let duals: Vec<_> = keys
            .par_iter()
            .map(|&(m, b)| {
                let hist = historical.get(&(m, b)).map(Vec::as_slice).unwrap_or(&[]);
                estimate_empirical_duals(inst, hist, m, b, inst.legs_in_month(m), markup)
                    .map(|w| make_cut(&w, m, b, CutKind::Empirical))
            })
            .collect::<Result<_, _>>()?;
        for cut in duals {
            master.add_cut(inst, &cut);
            cuts.push(cut);
        }
        let res = solver::solve_mip(&master.model, &mip_opts)?;
        match res.status {
            SolveStatus::Optimal => {}
            SolveStatus::Infeasible => return Err(BendersError::Infeasible),
            s => return Err(BendersError::Master(s)),
        }
        let mut sol = master.solution(inst, &res, None);
        let bsp = evaluate_assignment(inst, pools, &sol.assignment)?;
        attach_bsp(&mut sol, pools, &bsp);
        let lb = sol.objective;
        return Ok(BendersOutcome {
            trace: vec![TraceRow {
                iteration: 1,
                upper_bound: res.objective,
                lower_bound: lb,
                cuts_added: cuts.len(),
                wall_time: start.elapsed().as_secs_f64(),
            }],
            solution: sol,
            converged: true,
            upper_bound: res.objective,
            lower_bound: lb,
            master_objective: res.objective,
            cuts,
        });
    }

    let mut trace = Vec::new();
    let mut best: Option<Solution> = None;
    let mut lb = f64::NEG_INFINITY;
    let mut ub = f64::INFINITY;
    let mut master_objective = f64::NAN;
    let mut converged = false;
    for iteration in 1..=opts.max_iterations {
        let res = solver::solve_mip(&master.model, &mip_opts)?;
        match res.status {
            SolveStatus::Optimal => {}
            SolveStatus::Infeasible => return Err(BendersError::Infeasible),
            s => return Err(BendersError::Master(s)),
        }
        master_objective = res.objective;
        ub = ub.min(res.objective);
        let mut sol = master.solution(inst, &res, None);
        let bsp = evaluate_assignment(inst, pools, &sol.assignment)?;
        let mut added = 0;
        for (&(m, b), r) in &bsp {
            let eta = res.value(master.eta[&(m, b)]);
            if r.objective > eta + 1e-7 * r.objective.abs().max(1.0) {
                let cut = make_cut(&r.duals, m, b, CutKind::Exact);
                master.add_cut(inst, &cut);
                cuts.push(cut);
                added += 1;
            }
        }
        attach_bsp(&mut sol, pools, &bsp);
        if sol.objective > lb {
            lb = sol.objective;
            best = Some(sol);
        }
        trace.push(TraceRow {
            iteration,
            upper_bound: ub,
            lower_bound: lb,
            cuts_added: added,
            wall_time: start.elapsed().as_secs_f64(),
        });
        log::info!("benders iteration {iteration}: UB {ub:.3} LB {lb:.3} cuts {added}");
        if added == 0 || (ub - lb) / ub.abs().max(1.0) <= opts.tol {
            converged = true;
            break;
        }
    }
    Ok(BendersOutcome {
        solution: best.expect("at least one iteration ran"),
        trace,
        converged,
        upper_bound: ub,
        lower_bound: lb,
        master_objective,
        cuts,
    })
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut w: W) -> io::Result<()> {
    writeln!(w, "iteration,upper_bound,lower_bound,cuts_added,wall_time")?;
    for r in rows {
        writeln!(
            w,
            "{},{:.6},{:.6},{},{:.6}",
            r.iteration, r.upper_bound, r.lower_bound, r.cuts_added, r.wall_time
        )?;
    }
    Ok(())
}

//! Shadow-price analytics, the equal-allocation baseline and crew-time
//! allocation reports.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::benders::OptimalityCut;
use crate::instance::{FamilyId, FleetId, Instance, MonthId};
use crate::models::{build_month_model, CoverMode, Duals, ModelOptions, Networks, Solution};
use crate::solver::{self, LinearModel, RowSense, SolveResult, SolverError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("solution carries no dual values; re-solve in an LP mode (colgen or --relax) before analyzing")]
    MissingDuals,
    #[error("malformed duals: {0}")]
    Malformed(String),
    #[error("month {0} of the equal-allocation baseline is infeasible")]
    EamInfeasible(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrewMarginal {
    /// β_b, money per crew hour.
    pub dual: f64,
    /// β_b · t̄_b, money per crew member and year.
    pub yearly_marginal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AircraftMarginal {
    pub family: String,
    /// γ_f^m per month name.
    pub monthly: BTreeMap<String, f64>,
    /// γ_f = Σ_m γ_f^m.
    pub yearly: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalProfitReport {
    pub crew: BTreeMap<String, CrewMarginal>,
    pub aircraft: BTreeMap<String, AircraftMarginal>,
}

/// Yearly marginal profits of one more crew member per family and one more
/// aircraft per fleet type.
pub fn marginal_profits(duals: Option<&Duals>, inst: &Instance) -> Result<MarginalProfitReport, AnalysisError> {
    let d = duals.ok_or(AnalysisError::MissingDuals)?;
    let crew = inst
        .families()
        .map(|b| {
            let fam = inst.family(b);
            let beta = d.beta.get(&b).copied().unwrap_or(0.0);
            (
                fam.id.clone(),
                CrewMarginal {
                    dual: beta,
                    yearly_marginal: beta * fam.yearly_cap_per_crew,
                },
            )
        })
        .collect();
    let aircraft = inst
        .fleets()
        .map(|f| {
            let monthly: BTreeMap<String, f64> = inst
                .months()
                .map(|m| (inst.month_name(m).to_string(), d.gamma.get(&(m, f)).copied().unwrap_or(0.0)))
                .collect();
            let yearly = monthly.values().sum::<f64>() + 0.0;
            (
                inst.fleet(f).id.clone(),
                AircraftMarginal {
                    family: inst.family(inst.family_of(f)).id.clone(),
                    monthly,
                    yearly,
                },
            )
        })
        .collect();
    Ok(MarginalProfitReport { crew, aircraft })
}

/// Reads the `duals` object written by `Solution::to_json`.
pub fn duals_from_json(inst: &Instance, solution: &serde_json::Value) -> Result<Duals, AnalysisError> {
    let d = solution.get("duals").filter(|v| !v.is_null()).ok_or(AnalysisError::MissingDuals)?;
    let bad = |what: &str| AnalysisError::Malformed(what.to_string());
    let mut duals = Duals::default();
    for (name, v) in d.get("beta").and_then(|v| v.as_object()).ok_or_else(|| bad("beta"))? {
        let b = inst.family_id(name).ok_or_else(|| bad(name))?;
        duals.beta.insert(b, v.as_f64().ok_or_else(|| bad(name))?);
    }
    for (name, v) in d.get("alpha").and_then(|v| v.as_object()).into_iter().flatten() {
        let m = inst.month_id(name).ok_or_else(|| bad(name))?;
        duals.alpha.insert(m, v.as_f64().ok_or_else(|| bad(name))?);
    }
    for g in d.get("gamma").and_then(|v| v.as_array()).ok_or_else(|| bad("gamma"))? {
        let m = g["month"].as_str().and_then(|s| inst.month_id(s)).ok_or_else(|| bad("gamma month"))?;
        let f = g["fleet_type"]
            .as_str()
            .and_then(|s| inst.fleet_id(s))
            .ok_or_else(|| bad("gamma fleet type"))?;
        duals.gamma.insert((m, f), g["value"].as_f64().ok_or_else(|| bad("gamma value"))?);
    }
    Ok(duals)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Quadrant {
    I,
    II,
    III,
    IV,
}

impl Quadrant {
    /// Boundaries count as high on both axes.
    pub fn classify(gamma: f64, beta: f64, gamma0: f64, beta0: f64) -> Self {
        match (gamma >= gamma0, beta >= beta0) {
            (true, true) => Quadrant::I,
            (false, true) => Quadrant::II,
            (false, false) => Quadrant::III,
            (true, false) => Quadrant::IV,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantPoint {
    pub fleet_type: String,
    pub gamma: f64,
    pub family: String,
    pub beta: f64,
    pub quadrant: Quadrant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantGrouping {
    pub gamma0: f64,
    pub beta0: f64,
    pub points: Vec<QuadrantPoint>,
}

impl QuadrantGrouping {
    pub fn quadrant_of(&self, fleet_type: &str) -> Option<Quadrant> {
        self.points.iter().find(|p| p.fleet_type == fleet_type).map(|p| p.quadrant)
    }
}

/// Places every fleet type at (γ_f, β_b·t̄_b) of its family and groups the
/// points by the thresholds γ0 and β0 (both yearly money amounts).
pub fn quadrant_grouping(report: &MarginalProfitReport, gamma0: f64, beta0: f64) -> QuadrantGrouping {
    let points = report
        .aircraft
        .iter()
        .map(|(f, a)| {
            let beta = report.crew.get(&a.family).map_or(0.0, |c| c.yearly_marginal);
            QuadrantPoint {
                fleet_type: f.clone(),
                gamma: a.yearly,
                family: a.family.clone(),
                beta,
                quadrant: Quadrant::classify(a.yearly, beta, gamma0, beta0),
            }
        })
        .collect();
    QuadrantGrouping { gamma0, beta0, points }
}

/// Rows of `model` that violate complementary slackness at `res`: an
/// inequality row with slack beyond `tol` (relative to max(1, |rhs|)) whose
/// dual exceeds `tol` (relative to max(1, max |dual|)).
pub fn complementary_slackness_violations(model: &LinearModel, res: &SolveResult, tol: f64) -> Vec<String> {
    let Some(duals) = &res.duals else {
        return Vec::new();
    };
    let scale = duals.iter().fold(1.0f64, |a, d| a.max(d.abs()));
    model
        .constraints()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.sense != RowSense::Eq)
        .filter_map(|(i, c)| {
            let act = model.row_activity(solver::RowId(i), &res.primal);
            let slack = (c.rhs - act).abs();
            let tight = slack <= tol * c.rhs.abs().max(1.0);
            (!tight && duals[i].abs() > tol * scale).then(|| format!("{}: slack {slack}, dual {}", c.name, duals[i]))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EamMonth {
    pub month: String,
    pub lp_objective: f64,
    /// Σ r x of the month.
    pub profit: f64,
}

#[derive(Debug, Clone)]
pub struct EamOutcome {
    /// Σ_m Σ_l Σ_f r x, crew η excluded.
    pub profit: f64,
    pub months: Vec<EamMonth>,
    /// Per-crew monthly cap used for each family.
    pub monthly_cap_per_crew: BTreeMap<FamilyId, f64>,
    pub usage: BTreeMap<(MonthId, FamilyId), f64>,
    pub solution: Solution,
}

/// Per-crew monthly cap of the equal-allocation baseline: t̄_b / 12, never
/// above the family's own monthly cap.
pub fn eam_cap_per_crew(inst: &Instance, b: FamilyId, m: MonthId) -> f64 {
    let fam = inst.family(b);
    (fam.yearly_cap_per_crew / 12.0).min(fam.monthly_cap_per_crew[inst.month_name(m)])
}

/// Equal allocation: every month's pricing LP with crew cap k_b·t̄_b/12 and
/// no yearly price.
pub fn eam_baseline(
    inst: &Instance,
    nets: &Networks,
    cuts: &[OptimalityCut],
    cover: CoverMode,
) -> Result<EamOutcome, AnalysisError> {
    let opts = ModelOptions {
        integer_x: false,
        integer_z: false,
        cover,
    };
    let mut out = EamOutcome {
        profit: 0.0,
        months: Vec::new(),
        monthly_cap_per_crew: BTreeMap::new(),
        usage: BTreeMap::new(),
        solution: Solution::default(),
    };
    for m in inst.months() {
        let caps: BTreeMap<_, _> = inst
            .families()
            .map(|b| (b, f64::from(inst.family(b).crew_count) * eam_cap_per_crew(inst, b, m)))
            .collect();
        let ym = build_month_model(inst, nets, m, &caps, &BTreeMap::new(), cuts, &opts);
        let res = solver::solve_lp(&ym.model)?;
        if !res.is_optimal() {
            return Err(AnalysisError::EamInfeasible(inst.month_name(m).to_string()));
        }
        let sol = ym.solution(inst, &res, None);
        out.profit += sol.revenue;
        out.months.push(EamMonth {
            month: inst.month_name(m).to_string(),
            lp_objective: res.objective,
            profit: sol.revenue,
        });
        out.usage.extend(sol.crew_time_used.iter().map(|(&k, &v)| (k, v)));
        out.solution.objective += res.objective;
        out.solution.revenue += sol.revenue;
        out.solution.x_values.extend(sol.x_values);
        out.solution.assignment.extend(sol.assignment);
        out.solution.crew_time_used.extend(sol.crew_time_used);
        out.solution.fractional |= sol.fractional;
    }
    for b in inst.families() {
        out.monthly_cap_per_crew
            .insert(b, inst.family(b).yearly_cap_per_crew / 12.0);
    }
    Ok(out)
}

/// (CGMP profit − EAM profit) / EAM profit, in percent.
pub fn growth_rate(cgmp_profit: f64, eam_profit: f64) -> f64 {
    (cgmp_profit - eam_profit) / eam_profit * 100.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationRow {
    pub month: String,
    pub family: String,
    pub used_per_crew: f64,
    pub cap_per_crew: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyAllocation {
    pub family: String,
    pub yearly_used_per_crew: f64,
    pub yearly_cap_per_crew: f64,
    pub max_month: f64,
    pub min_month: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationReport {
    pub monthly: Vec<AllocationRow>,
    pub families: Vec<FamilyAllocation>,
}

/// Used crew flight time per crew member, per month and per year.
pub fn allocation_report(solution: &Solution, inst: &Instance) -> AllocationReport {
    let mut monthly = Vec::new();
    let mut families = Vec::new();
    for b in inst.families() {
        let fam = inst.family(b);
        let k = f64::from(fam.crew_count).max(1.0);
        let per_month: Vec<f64> = inst
            .months()
            .map(|m| solution.crew_time_used.get(&(m, b)).copied().unwrap_or(0.0) / k)
            .collect();
        for (m, &u) in inst.months().zip(&per_month) {
            monthly.push(AllocationRow {
                month: inst.month_name(m).to_string(),
                family: fam.id.clone(),
                used_per_crew: u,
                cap_per_crew: fam.monthly_cap_per_crew[inst.month_name(m)],
            });
        }
        let max = per_month.iter().copied().fold(0.0, f64::max);
        let min = per_month.iter().copied().fold(f64::INFINITY, f64::min);
        let min = if min.is_finite() { min } else { 0.0 };
        families.push(FamilyAllocation {
            family: fam.id.clone(),
            yearly_used_per_crew: per_month.iter().sum(),
            yearly_cap_per_crew: fam.yearly_cap_per_crew,
            max_month: max,
            min_month: min,
            diff: max - min,
        });
    }
    AllocationReport { monthly, families }
}

pub fn write_marginal_csv<W: Write>(report: &MarginalProfitReport, mut w: W) -> io::Result<()> {
    writeln!(w, "kind,name,family,month,dual,yearly_marginal")?;
    for (b, c) in &report.crew {
        writeln!(w, "crew,{b},{b},,{:.6},{:.6}", c.dual, c.yearly_marginal)?;
    }
    for (f, a) in &report.aircraft {
        for (m, g) in &a.monthly {
            writeln!(w, "aircraft,{f},{},{m},{g:.6},", a.family)?;
        }
        writeln!(w, "aircraft,{f},{},,,{:.6}", a.family, a.yearly)?;
    }
    Ok(())
}

pub fn write_quadrant_csv<W: Write>(grouping: &QuadrantGrouping, mut w: W) -> io::Result<()> {
    writeln!(w, "fleet_type,gamma,family,beta,quadrant")?;
    for p in &grouping.points {
        writeln!(w, "{},{:.6},{},{:.6},{:?}", p.fleet_type, p.gamma, p.family, p.beta, p.quadrant)?;
    }
    Ok(())
}

pub fn write_eam_csv<W: Write>(eam: &EamOutcome, cgmp_profit: f64, mut w: W) -> io::Result<()> {
    writeln!(w, "month,eam_lp_objective,eam_profit")?;
    for m in &eam.months {
        writeln!(w, "{},{:.6},{:.6}", m.month, m.lp_objective, m.profit)?;
    }
    writeln!(w)?;
    writeln!(w, "cgmp_profit,eam_profit,growth_rate_percent")?;
    writeln!(w, "{cgmp_profit:.6},{:.6},{:.6}", eam.profit, growth_rate(cgmp_profit, eam.profit))
}

pub fn write_allocation_csv<W: Write>(report: &AllocationReport, mut w: W) -> io::Result<()> {
    writeln!(w, "month,family,used_per_crew,cap_per_crew")?;
    for r in &report.monthly {
        writeln!(w, "{},{},{:.6},{:.6}", r.month, r.family, r.used_per_crew, r.cap_per_crew)?;
    }
    writeln!(w)?;
    writeln!(w, "family,yearly_used_per_crew,yearly_cap_per_crew,max_month,min_month,diff")?;
    for f in &report.families {
        writeln!(
            w,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            f.family, f.yearly_used_per_crew, f.yearly_cap_per_crew, f.max_month, f.min_month, f.diff
        )?;
    }
    Ok(())
}

/// Index helper for callers holding fleet names.
pub fn fleet_gamma(report: &MarginalProfitReport, inst: &Instance, f: FleetId) -> f64 {
    report.aircraft.get(&inst.fleet(f).id).map_or(0.0, |a| a.yearly)
}

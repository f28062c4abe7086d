//! Linear and mixed-integer model representation plus the HiGHS-backed
//! solve entry points.
//!
//! Every model in the crate is built as a [`LinearModel`] and handed to
//! [`solve_lp`] or [`solve_mip`]. Row duals are reported as the derivative of
//! the optimal objective with respect to the row right-hand side, in the
//! model's own objective sense. For a maximization with `<=` rows this makes
//! every dual nonnegative; for a minimization with `>=` rows likewise.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, Write};
use std::ops::Bound;
use std::time::Instant;

use highs::{HighsModelStatus, RowProblem, Sense as HighsSense};
use thiserror::Error;

/// Default primal feasibility tolerance for LP solves.
pub const LP_FEASIBILITY_TOL: f64 = 1e-7;
/// Default relative MIP gap.
pub const MIP_GAP: f64 = 1e-4;
/// Default relative gap for pricing-subproblem MIPs.
pub const PRICING_MIP_GAP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for RowSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate constraint name `{0}`")]
    DuplicateConstraint(String),
    #[error("non-finite coefficient in `{0}`")]
    NonFinite(String),
    #[error("variable `{0}` has lower bound above upper bound")]
    EmptyDomain(String),
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
    #[error("solver backend failure: {0}")]
    Backend(String),
}

/// A linear (or mixed-integer) optimization model.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub sense: Sense,
    /// Constant added to the objective value reported by the solver.
    pub objective_offset: f64,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
}

impl LinearModel {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            objective_offset: 0.0,
            variables: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        integer: bool,
        objective: f64,
    ) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
            integer,
            objective,
        });
        VarId(self.variables.len() - 1)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64, objective: f64) -> VarId {
        self.add_var(name, lower, upper, false, objective)
    }

    pub fn add_binary(&mut self, name: impl Into<String>, objective: f64) -> VarId {
        self.add_var(name, 0.0, 1.0, true, objective)
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: RowSense,
        rhs: f64,
    ) -> RowId {
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
        RowId(self.constraints.len() - 1)
    }

    pub fn set_objective(&mut self, var: VarId, coefficient: f64) {
        self.variables[var.0].objective = coefficient;
    }

    pub fn set_rhs(&mut self, row: RowId, rhs: f64) {
        self.constraints[row.0].rhs = rhs;
    }

    /// Appends terms to an existing row.
    pub fn add_terms(&mut self, row: RowId, terms: impl IntoIterator<Item = (VarId, f64)>) {
        self.constraints[row.0].terms.extend(terms);
    }

    pub fn set_integer(&mut self, var: VarId, integer: bool) {
        self.variables[var.0].integer = integer;
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn row(&self, id: RowId) -> &Constraint {
        &self.constraints[id.0]
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_mip(&self) -> bool {
        self.variables.iter().any(|v| v.integer)
    }

    /// Copy of the model with every integrality requirement dropped.
    pub fn relaxed(&self) -> LinearModel {
        let mut out = self.clone();
        for v in &mut out.variables {
            v.integer = false;
        }
        out
    }

    /// Objective value of `point`, including the constant offset.
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        self.objective_offset
            + self
                .variables
                .iter()
                .zip(point)
                .map(|(v, x)| v.objective * x)
                .sum::<f64>()
    }

    pub fn row_activity(&self, row: RowId, point: &[f64]) -> f64 {
        self.constraints[row.0]
            .terms
            .iter()
            .map(|(v, a)| a * point[v.0])
            .sum()
    }

    /// Largest bound or row violation of `point`; integrality is not checked.
    pub fn max_violation(&self, point: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, x) in self.variables.iter().zip(point) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let lhs = self.row_activity(RowId(i), point);
            let viol = match c.sense {
                RowSense::Le => lhs - c.rhs,
                RowSense::Ge => c.rhs - lhs,
                RowSense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen = HashSet::with_capacity(self.variables.len());
        for v in &self.variables {
            if !seen.insert(v.name.as_str()) {
                return Err(ModelError::DuplicateVariable(v.name.clone()));
            }
            if !v.objective.is_finite() || v.lower.is_nan() || v.upper.is_nan() {
                return Err(ModelError::NonFinite(v.name.clone()));
            }
            if v.lower > v.upper {
                return Err(ModelError::EmptyDomain(v.name.clone()));
            }
        }
        let mut seen = HashSet::with_capacity(self.constraints.len());
        for c in &self.constraints {
            if !seen.insert(c.name.as_str()) {
                return Err(ModelError::DuplicateConstraint(c.name.clone()));
            }
            if !c.rhs.is_finite() || c.terms.iter().any(|(_, a)| !a.is_finite()) {
                return Err(ModelError::NonFinite(c.name.clone()));
            }
        }
        Ok(())
    }

    /// Writes the model in CPLEX LP format.
    pub fn write_lp<W: Write>(&self, mut w: W) -> io::Result<()> {
        let name = |id: VarId| sanitize(&self.variables[id.0].name);
        writeln!(
            w,
            "{}",
            match self.sense {
                Sense::Maximize => "Maximize",
                Sense::Minimize => "Minimize",
            }
        )?;
        write!(w, " obj:")?;
        let mut any = false;
        for (i, v) in self.variables.iter().enumerate() {
            if v.objective != 0.0 {
                write!(w, " {:+} {}", v.objective, name(VarId(i)))?;
                any = true;
            }
        }
        if self.objective_offset != 0.0 {
            write!(w, " {:+}", self.objective_offset)?;
        } else if !any {
            write!(w, " 0")?;
        }
        writeln!(w)?;
        writeln!(w, "Subject To")?;
        for c in &self.constraints {
            write!(w, " {}:", sanitize(&c.name))?;
            if c.terms.is_empty() {
                write!(w, " 0")?;
            }
            for (v, a) in &c.terms {
                write!(w, " {:+} {}", a, name(*v))?;
            }
            writeln!(w, " {} {}", c.sense, c.rhs)?;
        }
        writeln!(w, "Bounds")?;
        for (i, v) in self.variables.iter().enumerate() {
            let n = name(VarId(i));
            match (v.lower.is_finite(), v.upper.is_finite()) {
                (true, true) => writeln!(w, " {} <= {} <= {}", v.lower, n, v.upper)?,
                (true, false) => writeln!(w, " {} >= {}", n, v.lower)?,
                (false, true) => writeln!(w, " -inf <= {} <= {}", n, v.upper)?,
                (false, false) => writeln!(w, " {} free", n)?,
            }
        }
        let ints: Vec<_> = (0..self.variables.len())
            .filter(|&i| self.variables[i].integer)
            .collect();
        if !ints.is_empty() {
            writeln!(w, "General")?;
            for i in ints {
                writeln!(w, " {}", name(VarId(i)))?;
            }
        }
        writeln!(w, "End")
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "_.[]".contains(c) { c } else { '_' })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// A time or iteration limit was reached; `primal` holds the best
    /// incumbent when one exists.
    Limit,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    /// Row duals, LP solves only.
    pub duals: Option<Vec<f64>>,
    /// Relative MIP gap, MIP solves only.
    pub gap: Option<f64>,
    pub wall_time: f64,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn value(&self, var: VarId) -> f64 {
        self.primal[var.0]
    }

    pub fn dual(&self, row: RowId) -> Option<f64> {
        self.duals.as_ref().map(|d| d[row.0])
    }

    pub fn has_incumbent(&self) -> bool {
        !self.primal.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MipOptions {
    pub gap: f64,
    pub time_limit: Option<f64>,
}

impl Default for MipOptions {
    fn default() -> Self {
        Self {
            gap: MIP_GAP,
            time_limit: None,
        }
    }
}

impl MipOptions {
    pub fn with_gap(gap: f64) -> Self {
        Self {
            gap,
            time_limit: None,
        }
    }
}

/// Solves the continuous relaxation of `model` and returns primal values and
/// row duals.
pub fn solve_lp(model: &LinearModel) -> Result<SolveResult, SolverError> {
    run(model, false, &MipOptions::default())
}

/// Solves `model` honoring integrality.
pub fn solve_mip(model: &LinearModel, options: &MipOptions) -> Result<SolveResult, SolverError> {
    run(model, true, options)
}

fn bounds(lower: f64, upper: f64) -> (Bound<f64>, Bound<f64>) {
    let lo = if lower.is_finite() { Bound::Included(lower) } else { Bound::Unbounded };
    let hi = if upper.is_finite() { Bound::Included(upper) } else { Bound::Unbounded };
    (lo, hi)
}

fn row_bounds(sense: RowSense, rhs: f64) -> (Bound<f64>, Bound<f64>) {
    match sense {
        RowSense::Le => (Bound::Unbounded, Bound::Included(rhs)),
        RowSense::Ge => (Bound::Included(rhs), Bound::Unbounded),
        RowSense::Eq => (Bound::Included(rhs), Bound::Included(rhs)),
    }
}

fn run(model: &LinearModel, integral: bool, options: &MipOptions) -> Result<SolveResult, SolverError> {
    model.validate()?;
    let start = Instant::now();
    let mip = integral && model.is_mip();

    if model.num_vars() == 0 {
        let feasible = model.constraints.iter().all(|c| match c.sense {
            RowSense::Le => 0.0 <= c.rhs + LP_FEASIBILITY_TOL,
            RowSense::Ge => 0.0 >= c.rhs - LP_FEASIBILITY_TOL,
            RowSense::Eq => c.rhs.abs() <= LP_FEASIBILITY_TOL,
        });
        return Ok(SolveResult {
            status: if feasible { SolveStatus::Optimal } else { SolveStatus::Infeasible },
            objective: model.objective_offset,
            primal: Vec::new(),
            duals: (!mip && feasible).then(|| vec![0.0; model.num_rows()]),
            gap: mip.then_some(0.0),
            wall_time: start.elapsed().as_secs_f64(),
        });
    }

    let mut result = solve_once(model, mip, options, true)?;
    if result.0 == HighsModelStatus::UnboundedOrInfeasible {
        result = solve_once(model, mip, options, false)?;
    }
    let (status, objective, primal, duals, gap) = result;
    let status = match status {
        HighsModelStatus::Optimal => SolveStatus::Optimal,
        HighsModelStatus::Infeasible => SolveStatus::Infeasible,
        HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => SolveStatus::Unbounded,
        HighsModelStatus::ReachedTimeLimit
        | HighsModelStatus::ReachedIterationLimit
        | HighsModelStatus::ReachedSolutionLimit
        | HighsModelStatus::ObjectiveBound
        | HighsModelStatus::ObjectiveTarget => SolveStatus::Limit,
        other => return Err(SolverError::Backend(format!("unexpected model status {other:?}"))),
    };
    let optimal = status == SolveStatus::Optimal;
    Ok(SolveResult {
        status,
        objective: if primal.is_empty() { f64::NAN } else { objective + model.objective_offset },
        primal,
        duals: if optimal && !mip { duals } else { None },
        gap: if mip { gap } else { None },
        wall_time: start.elapsed().as_secs_f64(),
    })
}

type RawOutcome = (HighsModelStatus, f64, Vec<f64>, Option<Vec<f64>>, Option<f64>);

fn solve_once(model: &LinearModel, mip: bool, options: &MipOptions, presolve: bool) -> Result<RawOutcome, SolverError> {
    let mut pb = RowProblem::default();
    let cols: Vec<_> = model
        .variables
        .iter()
        .map(|v| {
            let b = bounds(v.lower, v.upper);
            if mip && v.integer {
                pb.add_integer_column(v.objective, b)
            } else {
                pb.add_column(v.objective, b)
            }
        })
        .collect();
    for c in &model.constraints {
        let row: Vec<_> = c.terms.iter().map(|(v, a)| (cols[v.0], *a)).collect();
        pb.add_row(row_bounds(c.sense, c.rhs), row);
    }
    let sense = match model.sense {
        Sense::Maximize => HighsSense::Maximise,
        Sense::Minimize => HighsSense::Minimise,
    };
    let mut hm = pb
        .try_optimise(sense)
        .map_err(|s| SolverError::Backend(format!("model load failed: {s:?}")))?;
    hm.make_quiet();
    hm.set_option("primal_feasibility_tolerance", LP_FEASIBILITY_TOL);
    hm.set_option("dual_feasibility_tolerance", LP_FEASIBILITY_TOL);
    if mip {
        hm.set_option("mip_rel_gap", options.gap.max(0.0));
    }
    if let Some(limit) = options.time_limit {
        hm.set_option("time_limit", limit);
    }
    if !presolve {
        hm.set_option("presolve", "off");
    }
    let solved = hm
        .try_solve()
        .map_err(|s| SolverError::Backend(format!("solve failed: {s:?}")))?;
    let status = solved.status();
    let has_primal = matches!(
        solved.primal_solution_status(),
        highs::HighsSolutionStatus::Feasible
    ) || status == HighsModelStatus::Optimal;
    let sol = solved.get_solution();
    let primal = if has_primal { sol.columns().to_vec() } else { Vec::new() };
    let duals = (!mip && status == HighsModelStatus::Optimal).then(|| sol.dual_rows().to_vec());
    let gap = mip.then(|| solved.mip_gap());
    Ok((status, solved.objective_value(), primal, duals, gap))
}

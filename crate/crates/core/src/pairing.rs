//! Crew pairings: legality rules, depth-first enumeration, cost model,
//! single-leg recourse pairings, the set-partitioning crew pairing problem
//! and pool import/export.
//!
//! Legs repeat daily, so a pairing is timed on an absolute clock starting at
//! the first departure on day 0. Each subsequent leg departs at its next
//! daily occurrence after either a connection (same duty) or a rest (new
//! duty). A pairing ends at its first return to the starting crew base.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{FamilyId, Instance, LegId, MonthId, MINUTES_PER_DAY};
use crate::solver::{self, LinearModel, MipOptions, RowSense, Sense, SolveStatus, SolverError};

/// Work rules that make a leg sequence a legal pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PairingRules {
    pub crew_bases: BTreeSet<String>,
    pub max_duty_legs: u32,
    /// Minutes.
    pub min_connect: u32,
    /// Hours from first departure to last arrival of a duty.
    pub max_duty_span: f64,
    pub max_pairing_days: u32,
    /// Hours of block time per duty.
    pub max_duty_flight_hours: f64,
    /// Hours between duties; a ground gap of at least this long ends a duty.
    pub min_rest: f64,
}

impl Default for PairingRules {
    fn default() -> Self {
        Self {
            crew_bases: BTreeSet::new(),
            max_duty_legs: 4,
            min_connect: 45,
            max_duty_span: 12.0,
            max_pairing_days: 4,
            max_duty_flight_hours: 8.0,
            min_rest: 10.0,
        }
    }
}

impl PairingRules {
    pub fn check(&self) -> Result<(), String> {
        if !(1..=5).contains(&self.max_pairing_days) {
            return Err(format!("max_pairing_days {} outside [1, 5]", self.max_pairing_days));
        }
        if self.max_duty_legs == 0 || !(self.max_duty_span > 0.0) || !(self.max_duty_flight_hours > 0.0) {
            return Err("duty limits must be positive".to_string());
        }
        if !(self.min_rest * 60.0 >= f64::from(self.min_connect)) {
            return Err("min_rest must be at least min_connect".to_string());
        }
        Ok(())
    }

    fn rest_minutes(&self) -> u32 {
        (self.min_rest * 60.0).round() as u32
    }

    fn span_minutes(&self) -> u32 {
        (self.max_duty_span * 60.0).round() as u32
    }
}

/// Pairing cost parameters, money minor units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    /// Per hour of monthly flight time.
    pub pay_rate: i64,
    /// Per pairing day, for the whole month.
    pub min_guarantee: i64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            pay_rate: 100,
            min_guarantee: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    pub id: String,
    pub family: FamilyId,
    pub month: MonthId,
    pub legs: Vec<LegId>,
    pub cost: i64,
    /// Monthly flight hours t_b^p.
    pub flight_time: f64,
    pub days: u32,
    /// Single-leg recourse pairing, not a legal rotation.
    pub artificial: bool,
}

impl Pairing {
    pub fn covers(&self, l: LegId) -> bool {
        self.legs.contains(&l)
    }
}

#[derive(Debug, Error)]
pub enum PairingError {
    #[error("pairing enumeration exceeded the cap of {cap} (month {month}, family {family})")]
    TooMany { cap: usize, month: String, family: String },
    #[error("leg `{0}` is not covered by any candidate pairing")]
    Uncoverable(String),
    #[error("crew pairing problem is {0:?}")]
    Status(SolveStatus),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("pairing pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// c = max(pay_rate * t, min_guarantee * days), rounded to minor units.
pub fn pairing_cost(flight_time: f64, days: u32, cost: &CostModel) -> i64 {
    let pay = cost.pay_rate as f64 * flight_time;
    let guarantee = cost.min_guarantee as f64 * f64::from(days);
    pay.max(guarantee).round() as i64
}

/// First absolute minute at or after `earliest` that is `minute_of_day`.
fn next_occurrence(minute_of_day: u32, earliest: u32) -> u32 {
    let m = i64::from(MINUTES_PER_DAY);
    let delta = (i64::from(minute_of_day) - i64::from(earliest)).rem_euclid(m);
    earliest + delta as u32
}

fn days_spanned(last_arrival: u32) -> u32 {
    last_arrival.div_ceil(MINUTES_PER_DAY).max(1)
}

/// Timing state after the last leg of a partial pairing.
#[derive(Debug, Clone, Copy)]
struct Clock {
    arrival: u32,
    duty_start: u32,
    duty_legs: u32,
    duty_hours: f64,
}

struct Ctx<'a> {
    inst: &'a Instance,
    family: FamilyId,
    rules: &'a PairingRules,
}

impl Ctx<'_> {
    fn block(&self, l: LegId) -> (u32, u32, f64) {
        let leg = self.inst.leg(l);
        let hours = leg.duration_by_family[&self.inst.family(self.family).id];
        (leg.departure, leg.block_minutes(), hours)
    }

    fn start(&self, l: LegId) -> Option<Clock> {
        let (dep, block, hours) = self.block(l);
        let clock = Clock {
            arrival: dep + block,
            duty_start: dep,
            duty_legs: 1,
            duty_hours: hours,
        };
        self.admissible(clock).then_some(clock)
    }

    /// Appends `l` in the same duty.
    fn connect(&self, c: Clock, l: LegId) -> Option<Clock> {
        let (dep, block, hours) = self.block(l);
        let t = next_occurrence(dep, c.arrival + self.rules.min_connect);
        if t - c.arrival >= self.rules.rest_minutes() {
            return None;
        }
        let next = Clock {
            arrival: t + block,
            duty_start: c.duty_start,
            duty_legs: c.duty_legs + 1,
            duty_hours: c.duty_hours + hours,
        };
        self.admissible(next).then_some(next)
    }

    /// Appends `l` as the first leg of a new duty after a rest.
    fn rest(&self, c: Clock, l: LegId) -> Option<Clock> {
        let (dep, block, hours) = self.block(l);
        let t = next_occurrence(dep, c.arrival + self.rules.rest_minutes());
        let next = Clock {
            arrival: t + block,
            duty_start: t,
            duty_legs: 1,
            duty_hours: hours,
        };
        self.admissible(next).then_some(next)
    }

    fn admissible(&self, c: Clock) -> bool {
        c.duty_legs <= self.rules.max_duty_legs
            && c.arrival - c.duty_start <= self.rules.span_minutes()
            && c.duty_hours <= self.rules.max_duty_flight_hours + 1e-9
            && days_spanned(c.arrival) <= self.rules.max_pairing_days
    }
}

/// Fewest days over all duty-break choices for which `legs` forms a legal
/// pairing of family `b`, or `None` if no choice is legal.
pub fn legal_days(inst: &Instance, b: FamilyId, rules: &PairingRules, legs: &[LegId]) -> Option<u32> {
    let first = *legs.first()?;
    let base = inst.leg_origin(first);
    if !rules.crew_bases.contains(inst.station_name(base)) {
        return None;
    }
    let last = *legs.last()?;
    if inst.leg_destination(last) != base {
        return None;
    }
    let unique: HashSet<_> = legs.iter().collect();
    if unique.len() != legs.len() {
        return None;
    }
    for w in legs.windows(2) {
        if inst.leg_destination(w[0]) != inst.leg_origin(w[1]) || inst.leg_destination(w[0]) == base {
            return None;
        }
    }
    let ctx = Ctx { inst, family: b, rules };
    // minimal arrival per reachable (duty_legs, duty_start) state is not a
    // total order, so keep every distinct clock; sequences are short.
    let mut clocks: Vec<Clock> = ctx.start(first).into_iter().collect();
    for &l in &legs[1..] {
        clocks = clocks
            .iter()
            .flat_map(|&c| [ctx.connect(c, l), ctx.rest(c, l)])
            .flatten()
            .collect();
        if clocks.is_empty() {
            return None;
        }
    }
    clocks.iter().map(|c| days_spanned(c.arrival)).min()
}

pub fn flight_time(inst: &Instance, b: FamilyId, legs: &[LegId]) -> f64 {
    legs.iter().map(|&l| inst.leg_hours(l, b)).sum()
}

pub const DEFAULT_PAIRING_CAP: usize = 200_000;

/// Enumerates every legal pairing of family `b` in month `m`, restricted to
/// `leg_subset` when given. Output order is deterministic.
pub fn enumerate_pairings(
    inst: &Instance,
    m: MonthId,
    b: FamilyId,
    rules: &PairingRules,
    leg_subset: Option<&HashSet<LegId>>,
    cap: usize,
) -> Result<Vec<Pairing>, PairingError> {
    let mut legs: Vec<LegId> = inst
        .legs_in_month(m)
        .iter()
        .copied()
        .filter(|l| leg_subset.map_or(true, |s| s.contains(l)))
        .collect();
    legs.sort_by_key(|&l| (inst.leg(l).departure, l));
    let mut by_origin: HashMap<_, Vec<LegId>> = HashMap::new();
    for &l in &legs {
        by_origin.entry(inst.leg_origin(l)).or_default().push(l);
    }
    let ctx = Ctx { inst, family: b, rules };
    let too_many = || PairingError::TooMany {
        cap,
        month: inst.month_name(m).to_string(),
        family: inst.family(b).id.clone(),
    };

    // leg sequence -> fewest days, in discovery order
    let mut found: Vec<(Vec<LegId>, u32)> = Vec::new();
    let mut index: HashMap<Vec<LegId>, usize> = HashMap::new();
    let mut nodes = 0usize;
    let node_cap = cap.saturating_mul(64);

    struct Frame {
        seq: Vec<LegId>,
        clock: Clock,
    }
    for &first in &legs {
        if !rules.crew_bases.contains(inst.station_name(inst.leg_origin(first))) {
            continue;
        }
        let base = inst.leg_origin(first);
        let Some(clock) = ctx.start(first) else { continue };
        let mut stack = vec![Frame { seq: vec![first], clock }];
        while let Some(Frame { seq, clock }) = stack.pop() {
            nodes += 1;
            if nodes > node_cap {
                return Err(too_many());
            }
            let here = inst.leg_destination(*seq.last().expect("nonempty"));
            if here == base {
                let days = days_spanned(clock.arrival);
                match index.get(&seq) {
                    Some(&i) => found[i].1 = found[i].1.min(days),
                    None => {
                        if found.len() >= cap {
                            return Err(too_many());
                        }
                        index.insert(seq.clone(), found.len());
                        found.push((seq, days));
                    }
                }
                continue;
            }
            let Some(next) = by_origin.get(&here) else { continue };
            for &l in next.iter().rev() {
                if seq.contains(&l) {
                    continue;
                }
                for c in [ctx.rest(clock, l), ctx.connect(clock, l)].into_iter().flatten() {
                    let mut s = seq.clone();
                    s.push(l);
                    stack.push(Frame { seq: s, clock: c });
                }
            }
        }
    }

    let fam = &inst.family(b).id;
    let month = inst.month_name(m);
    let cost = &inst.crew_policy().cost;
    Ok(found
        .into_iter()
        .enumerate()
        .map(|(i, (seq, days))| {
            let t = flight_time(inst, b, &seq);
            Pairing {
                id: format!("{month}-{fam}-P{i}"),
                family: b,
                month: m,
                cost: pairing_cost(t, days, cost),
                flight_time: t,
                days,
                legs: seq,
                artificial: false,
            }
        })
        .collect())
}

/// Single-leg recourse pairing: priced at `factor` times the dearest
/// legal shape a one-leg pairing could take.
pub fn artificial_pairing(inst: &Instance, m: MonthId, b: FamilyId, l: LegId) -> Pairing {
    let policy = inst.crew_policy();
    let t = inst.leg_hours(l, b);
    let days = policy.rules.max_pairing_days;
    let base = pairing_cost(t, days, &policy.cost) as f64;
    Pairing {
        id: format!("{}-{}-X{}", inst.month_name(m), inst.family(b).id, inst.leg(l).id),
        family: b,
        month: m,
        legs: vec![l],
        cost: (policy.artificial_cost_factor * base).round() as i64,
        flight_time: t,
        days,
        artificial: true,
    }
}

/// Legal pairings plus one recourse pairing per leg, so that every subset
/// of the month's legs can be partitioned.
pub fn pairing_pool(
    inst: &Instance,
    m: MonthId,
    b: FamilyId,
    leg_subset: Option<&HashSet<LegId>>,
    cap: usize,
) -> Result<Vec<Pairing>, PairingError> {
    let rules = &inst.crew_policy().rules;
    let mut pool = enumerate_pairings(inst, m, b, rules, leg_subset, cap)?;
    for &l in inst.legs_in_month(m) {
        if leg_subset.map_or(true, |s| s.contains(&l)) {
            pool.push(artificial_pairing(inst, m, b, l));
        }
    }
    Ok(pool)
}

#[derive(Debug, Clone)]
pub struct CppSolution {
    /// z_p per candidate pairing, in input order.
    pub selection: Vec<f64>,
    /// ω per cover row, in the order of the legs passed in (LP only).
    pub duals: Option<Vec<f64>>,
    pub objective: f64,
}

/// Crew pairing problem with a general right-hand side per leg:
/// min Σ c z subject to Σ_p δ_lp z_p = rhs_l. Pairings touching a leg
/// without a row are excluded.
pub fn solve_cover(pairings: &[Pairing], rows: &[(LegId, f64)], relax: bool) -> Result<CppSolution, PairingError> {
    let row_of: HashMap<LegId, usize> = rows.iter().enumerate().map(|(i, (l, _))| (*l, i)).collect();
    let mut model = LinearModel::new(Sense::Minimize);
    let mut terms: Vec<Vec<(solver::VarId, f64)>> = vec![Vec::new(); rows.len()];
    let mut vars = Vec::with_capacity(pairings.len());
    for (j, p) in pairings.iter().enumerate() {
        if !p.legs.iter().all(|l| row_of.contains_key(l)) {
            vars.push(None);
            continue;
        }
        // z ≤ 1 is implied by the rows; leaving it out of the LP keeps the
        // row duals feasible for the dual of the unbounded-above relaxation
        let upper = if relax { f64::INFINITY } else { 1.0 };
        let v = model.add_var(format!("z{j}"), 0.0, upper, !relax, p.cost as f64);
        for l in &p.legs {
            terms[row_of[l]].push((v, 1.0));
        }
        vars.push(Some(v));
    }
    let mut row_ids = Vec::with_capacity(rows.len());
    for (i, ((l, rhs), t)) in rows.iter().zip(terms).enumerate() {
        if t.is_empty() && *rhs != 0.0 {
            return Err(PairingError::Uncoverable(format!("#{}", l.index())));
        }
        row_ids.push(model.add_row(format!("cover{i}"), t, RowSense::Eq, *rhs));
    }
    let res = if relax {
        solver::solve_lp(&model)?
    } else {
        solver::solve_mip(&model, &MipOptions::default())?
    };
    if !res.is_optimal() {
        return Err(PairingError::Status(res.status));
    }
    let selection = vars.iter().map(|v| v.map_or(0.0, |v| res.value(v))).collect();
    let duals = if relax {
        Some(row_ids.iter().map(|&r| res.dual(r).unwrap_or(0.0)).collect())
    } else {
        None
    };
    Ok(CppSolution {
        selection,
        duals,
        objective: res.objective,
    })
}

/// Set-partitioning crew pairing problem over `legs_to_cover`.
pub fn solve_cpp(pairings: &[Pairing], legs_to_cover: &[LegId], relax: bool) -> Result<CppSolution, PairingError> {
    let rows: Vec<_> = legs_to_cover.iter().map(|&l| (l, 1.0)).collect();
    solve_cover(pairings, &rows, relax)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PoolRecord {
    id: String,
    family_id: String,
    month: String,
    legs: Vec<String>,
    cost: i64,
    flight_time: f64,
    days: u32,
    #[serde(default)]
    artificial: bool,
}

pub fn pool_to_json(inst: &Instance, pool: &[Pairing]) -> String {
    let records: Vec<_> = pool
        .iter()
        .map(|p| PoolRecord {
            id: p.id.clone(),
            family_id: inst.family(p.family).id.clone(),
            month: inst.month_name(p.month).to_string(),
            legs: p.legs.iter().map(|&l| inst.leg(l).id.clone()).collect(),
            cost: p.cost,
            flight_time: crate::instance::hours::round(p.flight_time),
            days: p.days,
            artificial: p.artificial,
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("pool serializes")
}

/// Parses a pool against `inst`, re-checking legality and the flight-time
/// identity of every non-artificial pairing.
pub fn pool_from_json(inst: &Instance, text: &str) -> Result<Vec<Pairing>, PairingError> {
    let records: Vec<PoolRecord> = serde_json::from_str(text)?;
    let rules = &inst.crew_policy().rules;
    records
        .into_iter()
        .map(|r| {
            let family = inst
                .family_id(&r.family_id)
                .ok_or_else(|| PairingError::Pool(format!("unknown family `{}`", r.family_id)))?;
            let month = inst
                .month_id(&r.month)
                .ok_or_else(|| PairingError::Pool(format!("unknown month `{}`", r.month)))?;
            let legs = r
                .legs
                .iter()
                .map(|id| {
                    inst.leg_id(id)
                        .filter(|&l| inst.leg_month(l) == month)
                        .ok_or_else(|| PairingError::Pool(format!("pairing `{}`: leg `{id}` not in month", r.id)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let t = flight_time(inst, family, &legs);
            if (t - r.flight_time).abs() > 1e-3 {
                return Err(PairingError::Pool(format!("pairing `{}`: flight time mismatch", r.id)));
            }
            if !r.artificial && legal_days(inst, family, rules, &legs).is_none() {
                return Err(PairingError::Pool(format!("pairing `{}` is not legal", r.id)));
            }
            Ok(Pairing {
                id: r.id,
                family,
                month,
                legs,
                cost: r.cost,
                flight_time: t,
                days: r.days,
                artificial: r.artificial,
            })
        })
        .collect()
}

pub fn save_pool(inst: &Instance, pool: &[Pairing], path: impl AsRef<Path>) -> Result<(), PairingError> {
    fs::write(path, pool_to_json(inst, pool) + "\n")?;
    Ok(())
}

pub fn load_pool(inst: &Instance, path: impl AsRef<Path>) -> Result<Vec<Pairing>, PairingError> {
    pool_from_json(inst, &fs::read_to_string(path)?)
}

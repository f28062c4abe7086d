//! Model builders: the monthly fleet assignment model, the pairing-based
//! integrated model, its leg-based crew-time form and the Benders master.
//!
//! Every builder shares the same per-month block of assignment variables
//! x_lf^m, ground flows y_gf^m, cover rows, node balance rows and aircraft
//! count rows. The models differ in how crew enters.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::benders::OptimalityCut;
use crate::instance::{FamilyId, FleetId, Instance, LegId, MonthId};
use crate::pairing::{pairing_pool, Pairing, PairingError};
use crate::solver::{LinearModel, RowId, RowSense, Sense, SolveResult, SolveStatus, VarId};
use crate::timespace::{build_network, TimeSpaceNetwork};

/// Candidate pairings per (month, family).
pub type Pools = BTreeMap<(MonthId, FamilyId), Vec<Pairing>>;

/// Legal pairings plus single-leg recourse pairings for every (month, family).
pub fn build_pools(inst: &Instance, cap: usize) -> Result<Pools, PairingError> {
    let keys: Vec<_> = inst
        .months()
        .flat_map(|m| inst.families().map(move |b| (m, b)))
        .collect();
    keys.par_iter()
        .map(|&(m, b)| pairing_pool(inst, m, b, None, cap).map(|p| ((m, b), p)))
        .collect()
}

/// Time-space networks indexed by month and fleet type.
#[derive(Debug, Clone)]
pub struct Networks {
    nets: Vec<Vec<TimeSpaceNetwork>>,
    pub count_time: u32,
}

impl Networks {
    pub fn build(inst: &Instance, count_time: u32) -> Self {
        let nets = inst
            .months()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&m| inst.fleets().map(|f| build_network(inst, m, f, count_time)).collect())
            .collect();
        Self { nets, count_time }
    }

    pub fn get(&self, m: MonthId, f: FleetId) -> &TimeSpaceNetwork {
        &self.nets[m.0][f.0]
    }
}

/// How the monthly cover rows are written.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverMode {
    /// Σ_f x_lf = 1.
    Exact,
    /// Σ_f x_lf ≤ 1, each uncovered leg losing `drop_penalty`.
    AtMostOnce { drop_penalty: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOptions {
    pub integer_x: bool,
    pub integer_z: bool,
    pub cover: CoverMode,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            integer_x: true,
            integer_z: true,
            cover: CoverMode::Exact,
        }
    }
}

impl ModelOptions {
    pub fn lp() -> Self {
        Self {
            integer_x: false,
            integer_z: false,
            ..Self::default()
        }
    }
}

/// Assignment variables and fleet rows of one month.
#[derive(Debug, Clone)]
pub struct MonthBlock {
    pub month: MonthId,
    pub x: Vec<(LegId, FleetId, VarId)>,
    x_index: HashMap<(LegId, FleetId), VarId>,
    /// Ground-arc flows per fleet type, aligned with the network's arcs.
    pub y: Vec<Vec<VarId>>,
    pub cover: Vec<(LegId, RowId)>,
    /// Aircraft count row per fleet type.
    pub count: Vec<RowId>,
}

impl MonthBlock {
    pub fn x(&self, l: LegId, f: FleetId) -> Option<VarId> {
        self.x_index.get(&(l, f)).copied()
    }

    /// Terms Σ_{f∈F_b} coef·x_lf for one leg.
    pub fn family_terms(&self, inst: &Instance, l: LegId, b: FamilyId, coef: f64) -> Vec<(VarId, f64)> {
        inst.fleets_in_family(b)
            .iter()
            .filter_map(|&f| self.x(l, f).map(|v| (v, coef)))
            .collect()
    }
}

/// Adds x, y, cover, balance and count rows for month `m`; the objective
/// receives Σ r x.
pub fn add_month_block(
    model: &mut LinearModel,
    inst: &Instance,
    nets: &Networks,
    m: MonthId,
    integer: bool,
    cover: CoverMode,
) -> MonthBlock {
    let mi = m.index();
    let penalty = match cover {
        CoverMode::Exact => 0.0,
        CoverMode::AtMostOnce { drop_penalty } => drop_penalty,
    };
    let mut x = Vec::new();
    let mut x_index = HashMap::new();
    let mut cover_rows = Vec::new();
    for &l in inst.legs_in_month(m) {
        let mut terms = Vec::new();
        for f in inst.fleets() {
            if let Some(r) = inst.profit(l, f) {
                let v = model.add_var(format!("x_{mi}_{}_{}", l.index(), f.index()), 0.0, 1.0, integer, r + penalty);
                x.push((l, f, v));
                x_index.insert((l, f), v);
                terms.push((v, 1.0));
            }
        }
        let row = match cover {
            CoverMode::Exact => model.add_row(format!("cover_{mi}_{}", l.index()), terms, RowSense::Eq, 1.0),
            CoverMode::AtMostOnce { .. } => {
                model.objective_offset -= penalty;
                model.add_row(format!("cover_{mi}_{}", l.index()), terms, RowSense::Le, 1.0)
            }
        };
        cover_rows.push((l, row));
    }

    let mut y = Vec::with_capacity(inst.num_fleets());
    let mut count = Vec::with_capacity(inst.num_fleets());
    for f in inst.fleets() {
        let net = nets.get(m, f);
        let fi = f.index();
        let yv: Vec<VarId> = (0..net.ground_arcs.len())
            .map(|g| model.add_continuous(format!("y_{mi}_{fi}_{g}"), 0.0, f64::INFINITY, 0.0))
            .collect();
        let leg_var: Vec<VarId> = net.leg_arcs.iter().map(|a| x_index[&(a.leg, f)]).collect();
        for n in net.node_ids() {
            let adj = net.adjacency(n).expect("node of this network");
            let mut terms = Vec::new();
            terms.extend(adj.legs_in.iter().map(|&a| (leg_var[a], 1.0)));
            terms.extend(adj.ground_in.iter().map(|&g| (yv[g], 1.0)));
            terms.extend(adj.legs_out.iter().map(|&a| (leg_var[a], -1.0)));
            terms.extend(adj.ground_out.iter().map(|&g| (yv[g], -1.0)));
            model.add_row(format!("bal_{mi}_{fi}_{}", n.0), merge_terms(terms), RowSense::Eq, 0.0);
        }
        let mut terms: Vec<_> = net.leg_crossers.iter().map(|&a| (leg_var[a], 1.0)).collect();
        terms.extend(net.ground_crossers.iter().map(|&g| (yv[g], 1.0)));
        count.push(model.add_row(
            format!("count_{mi}_{fi}"),
            terms,
            RowSense::Le,
            f64::from(inst.fleet(f).aircraft_count),
        ));
        y.push(yv);
    }

    MonthBlock {
        month: m,
        x,
        x_index,
        y,
        cover: cover_rows,
        count,
    }
}

/// Sums coefficients of repeated variables (self-loop ground arcs appear
/// both in and out of their node).
fn merge_terms(terms: Vec<(VarId, f64)>) -> Vec<(VarId, f64)> {
    let mut acc: BTreeMap<VarId, f64> = BTreeMap::new();
    for (v, c) in terms {
        *acc.entry(v).or_default() += c;
    }
    acc.into_iter().filter(|(_, c)| *c != 0.0).collect()
}

/// A built model together with the handles needed to read solutions.
#[derive(Debug, Clone)]
pub struct YearModel {
    pub model: LinearModel,
    pub blocks: Vec<MonthBlock>,
    /// Pairing variables aligned with the pool of each (month, family).
    pub z: BTreeMap<(MonthId, FamilyId), Vec<VarId>>,
    pub linking: BTreeMap<(MonthId, FamilyId, LegId), RowId>,
    pub monthly_rows: BTreeMap<(MonthId, FamilyId), RowId>,
    pub yearly_rows: BTreeMap<FamilyId, RowId>,
    pub eta: BTreeMap<(MonthId, FamilyId), VarId>,
    pub cut_rows: Vec<RowId>,
}

impl YearModel {
    fn new(inst: &Instance, nets: &Networks, months: &[MonthId], opts: &ModelOptions) -> Self {
        let mut model = LinearModel::new(Sense::Maximize);
        let blocks = months
            .iter()
            .map(|&m| add_month_block(&mut model, inst, nets, m, opts.integer_x, opts.cover))
            .collect();
        Self {
            model,
            blocks,
            z: BTreeMap::new(),
            linking: BTreeMap::new(),
            monthly_rows: BTreeMap::new(),
            yearly_rows: BTreeMap::new(),
            eta: BTreeMap::new(),
            cut_rows: Vec::new(),
        }
    }

    pub fn block(&self, m: MonthId) -> &MonthBlock {
        self.blocks.iter().find(|b| b.month == m).expect("month is modeled")
    }

    /// Σ_l Σ_{f∈F_b} t_b^l x_lf^m.
    fn leg_time_terms(&self, inst: &Instance, m: MonthId, b: FamilyId) -> Vec<(VarId, f64)> {
        let block = self.block(m);
        inst.legs_in_month(m)
            .iter()
            .flat_map(|&l| block.family_terms(inst, l, b, inst.leg_hours(l, b)))
            .collect()
    }

    /// Adds z variables and linking rows Σ_p δ_lp z_p − Σ_{f∈F_b} x_lf = 0.
    fn add_pairings(&mut self, inst: &Instance, pools: &Pools, integer: bool) {
        for (&(m, b), pool) in pools {
            if !self.blocks.iter().any(|blk| blk.month == m) {
                continue;
            }
            let (mi, bi) = (m.index(), b.index());
            let zs: Vec<VarId> = pool
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    // rows imply z ≤ 1; an explicit bound would leak into the duals
                    let upper = if integer { 1.0 } else { f64::INFINITY };
                    self.model.add_var(format!("z_{mi}_{bi}_{j}"), 0.0, upper, integer, -(p.cost as f64))
                })
                .collect();
            let mut by_leg: HashMap<LegId, Vec<(VarId, f64)>> = HashMap::new();
            for (p, &z) in pool.iter().zip(&zs) {
                for &l in &p.legs {
                    by_leg.entry(l).or_default().push((z, 1.0));
                }
            }
            for &l in inst.legs_in_month(m) {
                let mut terms = by_leg.remove(&l).unwrap_or_default();
                terms.extend(self.block(m).family_terms(inst, l, b, -1.0));
                let row = self
                    .model
                    .add_row(format!("link_{mi}_{bi}_{}", l.index()), terms, RowSense::Eq, 0.0);
                self.linking.insert((m, b, l), row);
            }
            self.z.insert((m, b), zs);
        }
    }

    /// Monthly and yearly crew-time rows; `per_month(m, b)` supplies the
    /// left-hand side.
    fn add_crew_rows(&mut self, inst: &Instance, per_month: impl Fn(&Self, MonthId, FamilyId) -> Vec<(VarId, f64)>) {
        for b in inst.families() {
            let mut yearly = Vec::new();
            let months: Vec<MonthId> = self.blocks.iter().map(|blk| blk.month).collect();
            for m in months {
                let terms = per_month(self, m, b);
                yearly.extend(terms.iter().copied());
                let row = self.model.add_row(
                    format!("crew_m_{}_{}", m.index(), b.index()),
                    terms,
                    RowSense::Le,
                    inst.monthly_budget(b, m),
                );
                self.monthly_rows.insert((m, b), row);
            }
            let row = self
                .model
                .add_row(format!("crew_y_{}", b.index()), yearly, RowSense::Le, inst.yearly_budget(b));
            self.yearly_rows.insert(b, row);
        }
    }

    /// Adds η_b^m ≥ 0 with objective −1 for every modeled (month, family).
    fn add_eta(&mut self, inst: &Instance) {
        for blk in &self.blocks {
            for b in inst.families() {
                let v = self.model.add_continuous(
                    format!("eta_{}_{}", blk.month.index(), b.index()),
                    0.0,
                    f64::INFINITY,
                    -1.0,
                );
                self.eta.insert((blk.month, b), v);
            }
        }
    }

    /// Adds η_b^m − Σ_l ω_l Σ_{f∈F_b} x_lf ≥ 0.
    pub fn add_cut(&mut self, inst: &Instance, cut: &OptimalityCut) -> RowId {
        let block = self.block(cut.month);
        let mut terms = vec![(self.eta[&(cut.month, cut.family)], 1.0)];
        for (&l, &w) in &cut.coefficients {
            if w != 0.0 {
                terms.extend(block.family_terms(inst, l, cut.family, -w));
            }
        }
        let row = self.model.add_row(
            format!("cut_{}", self.cut_rows.len()),
            merge_terms(terms),
            RowSense::Ge,
            0.0,
        );
        self.cut_rows.push(row);
        row
    }

    /// Reads the solver result back into domain terms.
    pub fn solution(&self, inst: &Instance, res: &SolveResult, pools: Option<&Pools>) -> Solution {
        let mut sol = Solution {
            status: res.status,
            objective: res.objective,
            ..Solution::default()
        };
        if !res.has_incumbent() {
            return sol;
        }
        for blk in &self.blocks {
            let m = blk.month;
            let mut best: HashMap<LegId, (FleetId, f64)> = HashMap::new();
            for &(l, f, v) in &blk.x {
                let val = res.value(v);
                if val > 1e-9 {
                    sol.x_values.push((m, l, f, val));
                    sol.revenue += inst.profit(l, f).unwrap_or(0.0) * val;
                    *sol.crew_time_used.entry((m, inst.family_of(f))).or_default() +=
                        inst.leg_hours(l, inst.family_of(f)) * val;
                    if val > 1e-6 && (val - val.round()).abs() > 1e-6 {
                        sol.fractional = true;
                    }
                    let e = best.entry(l).or_insert((f, val));
                    if val > e.1 {
                        *e = (f, val);
                    }
                }
            }
            for (l, (f, _)) in best {
                sol.assignment.insert((m, l), f);
            }
            for b in inst.families() {
                sol.crew_time_used.entry((m, b)).or_default();
            }
            for (fi, ys) in blk.y.iter().enumerate() {
                sol.ground_flows
                    .insert((m, FleetId(fi)), ys.iter().map(|&v| res.value(v)).collect());
            }
        }
        for (&key, zs) in &self.z {
            if let Some(pool) = pools.and_then(|p| p.get(&key)) {
                let picked: Vec<_> = pool
                    .iter()
                    .zip(zs)
                    .filter(|(_, &z)| res.value(z) > 1e-6)
                    .map(|(p, &z)| (p.id.clone(), res.value(z)))
                    .collect();
                sol.crew_cost += pool.iter().zip(zs).map(|(p, &z)| p.cost as f64 * res.value(z)).sum::<f64>();
                sol.pairing_selection.insert(key, picked);
            }
        }
        for &e in self.eta.values() {
            sol.crew_cost += res.value(e);
        }
        if res.duals.is_some() {
            let mut d = Duals::default();
            for b in inst.families() {
                if let Some(&r) = self.yearly_rows.get(&b) {
                    d.beta.insert(b, res.dual(r).unwrap_or(0.0));
                }
            }
            for blk in &self.blocks {
                for (fi, &r) in blk.count.iter().enumerate() {
                    d.gamma.insert((blk.month, FleetId(fi)), res.dual(r).unwrap_or(0.0));
                }
            }
            for (&(m, b, l), &r) in &self.linking {
                d.omega.insert((m, b, l), res.dual(r).unwrap_or(0.0));
            }
            sol.duals = Some(d);
        }
        sol
    }
}

/// Monthly fleet assignment model.
pub fn build_fam(inst: &Instance, nets: &Networks, m: MonthId, opts: &ModelOptions) -> YearModel {
    YearModel::new(inst, nets, &[m], opts)
}

/// Pairing-based integrated model: linking rows plus crew-time rows on
/// Σ t_b^p z_p.
pub fn build_tfacpp_pairing(inst: &Instance, nets: &Networks, pools: &Pools, opts: &ModelOptions) -> YearModel {
    let months: Vec<_> = inst.months().collect();
    let mut ym = YearModel::new(inst, nets, &months, opts);
    ym.add_pairings(inst, pools, opts.integer_z);
    ym.add_crew_rows(inst, |ym, m, b| {
        let pool = &pools[&(m, b)];
        ym.z[&(m, b)]
            .iter()
            .zip(pool)
            .map(|(&z, p)| (z, p.flight_time))
            .collect()
    });
    ym
}

/// Leg-based crew-time rows on Σ t_b^l x_lf. With `pools`, pairing
/// variables and linking rows are kept; without, crew enters only through
/// the time rows.
pub fn build_bim_legbased(inst: &Instance, nets: &Networks, pools: Option<&Pools>, opts: &ModelOptions) -> YearModel {
    let months: Vec<_> = inst.months().collect();
    build_bim_months(inst, nets, &months, pools, opts)
}

pub fn build_bim_months(
    inst: &Instance,
    nets: &Networks,
    months: &[MonthId],
    pools: Option<&Pools>,
    opts: &ModelOptions,
) -> YearModel {
    let mut ym = YearModel::new(inst, nets, months, opts);
    if let Some(pools) = pools {
        ym.add_pairings(inst, pools, opts.integer_z);
    }
    ym.add_crew_rows(inst, |ym, m, b| ym.leg_time_terms(inst, m, b));
    ym
}

/// Benders master: leg-based crew rows, η_b^m ≥ 0 and the given cuts.
pub fn build_monolithic_bmp(inst: &Instance, nets: &Networks, cuts: &[OptimalityCut], opts: &ModelOptions) -> YearModel {
    let months: Vec<_> = inst.months().collect();
    build_bmp_months(inst, nets, &months, cuts, opts)
}

/// Benders master restricted to `months`; cuts of other months are skipped.
pub fn build_bmp_months(
    inst: &Instance,
    nets: &Networks,
    months: &[MonthId],
    cuts: &[OptimalityCut],
    opts: &ModelOptions,
) -> YearModel {
    let mut ym = build_bim_months(inst, nets, months, None, opts);
    ym.add_eta(inst);
    for cut in cuts.iter().filter(|c| months.contains(&c.month)) {
        ym.add_cut(inst, cut);
    }
    ym
}

/// Single-month model with per-family crew caps, crew prices `beta` charged
/// per hour on the objective, and η with the month's cuts. This is the
/// column-generation pricing problem and the finishing/baseline monthly MIP.
pub fn build_month_model(
    inst: &Instance,
    nets: &Networks,
    m: MonthId,
    caps: &BTreeMap<FamilyId, f64>,
    beta: &BTreeMap<FamilyId, f64>,
    cuts: &[OptimalityCut],
    opts: &ModelOptions,
) -> YearModel {
    let mut ym = YearModel::new(inst, nets, &[m], opts);
    let xs = ym.blocks[0].x.clone();
    for (l, f, v) in xs {
        let b = inst.family_of(f);
        let price = beta.get(&b).copied().unwrap_or(0.0);
        if price != 0.0 {
            let c = ym.model.var(v).objective - price * inst.leg_hours(l, b);
            ym.model.set_objective(v, c);
        }
    }
    for b in inst.families() {
        let terms = ym.leg_time_terms(inst, m, b);
        let cap = caps.get(&b).copied().unwrap_or_else(|| inst.monthly_budget(b, m));
        let row = ym.model.add_row(
            format!("crew_m_{}_{}", m.index(), b.index()),
            terms,
            RowSense::Le,
            cap.max(0.0),
        );
        ym.monthly_rows.insert((m, b), row);
    }
    ym.add_eta(inst);
    for cut in cuts.iter().filter(|c| c.month == m) {
        ym.add_cut(inst, cut);
    }
    ym
}

/// Dual values of a solved LP.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Duals {
    /// Convexity rows of the column-generation master, per month.
    pub alpha: BTreeMap<MonthId, f64>,
    /// Yearly crew-time rows, per family.
    pub beta: BTreeMap<FamilyId, f64>,
    /// Aircraft count rows, per (month, fleet type).
    pub gamma: BTreeMap<(MonthId, FleetId), f64>,
    /// Linking rows, per (month, family, leg).
    pub omega: BTreeMap<(MonthId, FamilyId, LegId), f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: f64,
    /// Fleet type carrying the largest share of each leg.
    pub assignment: BTreeMap<(MonthId, LegId), FleetId>,
    /// Nonzero x values.
    pub x_values: Vec<(MonthId, LegId, FleetId, f64)>,
    pub fractional: bool,
    pub ground_flows: BTreeMap<(MonthId, FleetId), Vec<f64>>,
    /// Selected pairing ids and their z values.
    pub pairing_selection: BTreeMap<(MonthId, FamilyId), Vec<(String, f64)>>,
    pub crew_time_used: BTreeMap<(MonthId, FamilyId), f64>,
    /// Σ r x.
    pub revenue: f64,
    /// Pairing costs, or estimated crew cost η in master problems.
    pub crew_cost: f64,
    pub duals: Option<Duals>,
}

impl Default for SolveStatus {
    fn default() -> Self {
        SolveStatus::Optimal
    }
}

impl Solution {
    /// Hours used by family `b` over the year.
    pub fn yearly_crew_time(&self, b: FamilyId) -> f64 {
        self.crew_time_used
            .iter()
            .filter(|((_, fb), _)| *fb == b)
            .map(|(_, h)| h)
            .sum()
    }

    /// JSON with instance names instead of dense ids.
    pub fn to_json(&self, inst: &Instance) -> serde_json::Value {
        let month = |m: MonthId| inst.month_name(m).to_string();
        let assignment: Vec<_> = self
            .x_values
            .iter()
            .map(|&(m, l, f, v)| {
                json!({"month": month(m), "leg": inst.leg(l).id, "fleet_type": inst.fleet(f).id, "value": round6(v)})
            })
            .collect();
        let crew: Vec<_> = self
            .crew_time_used
            .iter()
            .map(|(&(m, b), &h)| json!({"month": month(m), "family": inst.family(b).id, "hours": round3(h)}))
            .collect();
        let pairings: Vec<_> = self
            .pairing_selection
            .iter()
            .flat_map(|(&(m, b), ps)| {
                ps.iter().map(move |(id, z)| {
                    json!({"month": inst.month_name(m), "family": inst.family(b).id, "pairing": id, "value": round6(*z)})
                })
            })
            .collect();
        let duals = self.duals.as_ref().map(|d| {
            json!({
                "alpha": d.alpha.iter().map(|(&m, v)| (month(m), *v)).collect::<BTreeMap<_, _>>(),
                "beta": d.beta.iter().map(|(&b, v)| (inst.family(b).id.clone(), *v)).collect::<BTreeMap<_, _>>(),
                "gamma": d.gamma.iter().map(|(&(m, f), v)| json!({"month": month(m), "fleet_type": inst.fleet(f).id, "value": v})).collect::<Vec<_>>(),
            })
        });
        json!({
            "status": self.status,
            "objective": self.objective,
            "revenue": self.revenue,
            "crew_cost": self.crew_cost,
            "fractional": self.fractional,
            "assignment": assignment,
            "crew_time_used": crew,
            "pairing_selection": pairings,
            "duals": duals,
        })
    }
}

fn round3(x: f64) -> f64 {
    (x * 1e3).round() / 1e3
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

//! Instance data model: stations, fleet types and families, monthly flight
//! legs, crew policy, transition options and crew-availability scenarios.
//!
//! [`InstanceData`] is the serialized form. [`Instance`] wraps a validated
//! copy together with index tables so the model builders can address legs,
//! fleet types and families by dense ids.

mod generate;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairing::{CostModel, PairingRules};

pub use generate::{generate_synthetic, Dims};

pub const MINUTES_PER_DAY: u32 = 1440;

macro_rules! dense_id {
    ($name:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub usize);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

dense_id!(MonthId);
dense_id!(LegId);
dense_id!(FleetId);
dense_id!(FamilyId);
dense_id!(StationId);

/// Hours are written with three fractional digits.
pub(crate) mod hours {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn round(h: f64) -> f64 {
        (h * 1000.0).round() / 1000.0
    }

    pub fn serialize<S: Serializer>(h: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(round(*h))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d)
    }

    pub mod map {
        use std::collections::BTreeMap;

        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
            s.collect_map(m.iter().map(|(k, v)| (k, super::round(*v))))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
            BTreeMap::deserialize(d)
        }
    }

    pub mod vec {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|x| super::round(*x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::deserialize(d)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetType {
    pub id: String,
    pub family_id: String,
    pub seats: u32,
    pub aircraft_count: u32,
    /// Minimum turn time in minutes.
    pub min_turn_time: u32,
    /// Monthly operating cost per leg id, in money minor units.
    pub operating_cost: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetFamily {
    pub id: String,
    pub fleet_type_ids: Vec<String>,
    pub crew_count: u32,
    /// Per-crew monthly flight time cap, keyed by month id.
    #[serde(with = "hours::map")]
    pub monthly_cap_per_crew: BTreeMap<String, f64>,
    #[serde(with = "hours")]
    pub yearly_cap_per_crew: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightLeg {
    pub id: String,
    pub month: String,
    pub origin: String,
    pub destination: String,
    /// Minutes of day.
    pub departure: u32,
    /// Minutes of day; an arrival earlier than the departure lands next day.
    pub arrival: u32,
    /// Operations per month.
    pub frequency: u32,
    /// Block duration per family id, hours.
    #[serde(with = "hours::map")]
    pub duration_by_family: BTreeMap<String, f64>,
    /// Passengers per flight.
    pub demand: f64,
    /// Money minor units per passenger.
    pub fare: i64,
}

impl FlightLeg {
    /// Block minutes between departure and arrival on the daily cycle.
    pub fn block_minutes(&self) -> u32 {
        (self.arrival + MINUTES_PER_DAY - self.departure) % MINUTES_PER_DAY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrewPolicy {
    pub rules: PairingRules,
    pub cost: CostModel,
    /// Multiplier applied to historical-pool duals when estimating empirical cuts.
    #[serde(default = "one")]
    pub empirical_markup: f64,
    /// Cost multiplier for the single-leg recourse pairings.
    #[serde(default = "default_artificial_factor")]
    pub artificial_cost_factor: f64,
}

fn one() -> f64 {
    1.0
}

fn default_artificial_factor() -> f64 {
    3.0
}

impl Default for CrewPolicy {
    fn default() -> Self {
        Self {
            rules: PairingRules::default(),
            cost: CostModel::default(),
            empirical_markup: 1.0,
            artificial_cost_factor: default_artificial_factor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionArc {
    pub from: String,
    pub to: String,
    /// Training cost per transferred crew member.
    pub cost: i64,
    pub cap: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TransitionData {
    #[serde(default)]
    pub arcs: Vec<TransitionArc>,
    /// Training duration as a fraction of a year.
    #[serde(default)]
    pub training_years: f64,
}

/// Discrete distribution of a family's yearly available crew flight time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    #[serde(with = "hours::vec")]
    pub rho: Vec<f64>,
    pub phi: Vec<f64>,
    pub epsilon: f64,
}

impl ScenarioSet {
    /// Three-point distribution around a yearly budget, used when the
    /// instance carries no scenarios for a family.
    pub fn around(budget: f64) -> Self {
        Self {
            rho: vec![hours::round(0.95 * budget), hours::round(budget), hours::round(1.05 * budget)],
            phi: vec![0.25, 0.5, 0.25],
            epsilon: 0.1,
        }
    }
}

/// Serialized instance file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceData {
    pub months: Vec<String>,
    pub stations: Vec<String>,
    pub fleet_types: Vec<FleetType>,
    pub fleet_families: Vec<FleetFamily>,
    pub legs: Vec<FlightLeg>,
    #[serde(default)]
    pub crew_policy: CrewPolicy,
    #[serde(default)]
    pub transition: TransitionData,
    #[serde(default)]
    pub uncertainty: BTreeMap<String, ScenarioSet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError(pub Vec<String>);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation(s): {}", self.0.len(), self.0.join("; "))
    }
}

impl std::error::Error for ValidationError {}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("cannot read instance: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse instance: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Validation(#[from] ValidationError),
    #[error("fleet type `{fleet}` has no operating cost for leg `{leg}`")]
    MissingCost { leg: String, fleet: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DemandLevel {
    High,
    Mid,
    Low,
}

impl std::str::FromStr for DemandLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "high" => Ok(Self::High),
            "mid" => Ok(Self::Mid),
            "low" => Ok(Self::Low),
            other => Err(format!("unknown demand level `{other}`")),
        }
    }
}

/// Yearly and monthly crew flight time available to a family.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeBudget {
    pub yearly: f64,
    pub monthly: BTreeMap<String, f64>,
}

/// t_b = k_b * yearly cap and t_b^m = k_b * monthly cap.
pub fn family_time_budget(fam: &FleetFamily) -> TimeBudget {
    let k = f64::from(fam.crew_count);
    TimeBudget {
        yearly: k * fam.yearly_cap_per_crew,
        monthly: fam
            .monthly_cap_per_crew
            .iter()
            .map(|(m, cap)| (m.clone(), k * cap))
            .collect(),
    }
}

/// Monthly profit of flying `leg` with fleet type `fleet`: revenue on the
/// demand that fits in the cabin, times frequency, less operating cost.
pub fn leg_profit(leg: &FlightLeg, fleet: &FleetType) -> Result<f64, InstanceError> {
    let cost = fleet
        .operating_cost
        .get(&leg.id)
        .ok_or_else(|| InstanceError::MissingCost {
            leg: leg.id.clone(),
            fleet: fleet.id.clone(),
        })?;
    let carried = leg.demand.max(0.0).min(f64::from(fleet.seats));
    Ok(leg.fare as f64 * carried * f64::from(leg.frequency) - *cost as f64)
}

/// A validated instance with dense index tables.
#[derive(Debug, Clone)]
pub struct Instance {
    data: InstanceData,
    legs_by_month: Vec<Vec<LegId>>,
    leg_month: Vec<MonthId>,
    leg_origin: Vec<StationId>,
    leg_destination: Vec<StationId>,
    fleet_family: Vec<FamilyId>,
    family_fleets: Vec<Vec<FleetId>>,
    /// leg x family -> monthly flight hours (frequency * duration)
    leg_hours: Vec<Vec<f64>>,
    /// leg x fleet -> profit, None when the fleet type has no cost entry
    profits: Vec<Vec<Option<f64>>>,
    month_index: HashMap<String, MonthId>,
    family_index: HashMap<String, FamilyId>,
    leg_index: HashMap<String, LegId>,
    fleet_index: HashMap<String, FleetId>,
    station_index: HashMap<String, StationId>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

impl Serialize for Instance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.data.serialize(s)
    }
}

impl TryFrom<InstanceData> for Instance {
    type Error = ValidationError;

    fn try_from(data: InstanceData) -> Result<Self, Self::Error> {
        Instance::new(data)
    }
}

fn index_of<T: AsRef<str>>(items: &[T]) -> HashMap<String, usize> {
    items
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_ref().to_string(), i))
        .collect()
}

fn check_unique<'a>(what: &str, ids: impl Iterator<Item = &'a str>, errs: &mut Vec<String>) {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            errs.push(format!("duplicate {what} id `{id}`"));
        }
    }
}

impl Instance {
    pub fn new(data: InstanceData) -> Result<Self, ValidationError> {
        let errs = validate(&data);
        if !errs.is_empty() {
            return Err(ValidationError(errs));
        }
        let month_index: HashMap<_, _> = index_of(&data.months)
            .into_iter()
            .map(|(k, v)| (k, MonthId(v)))
            .collect();
        let station_index: HashMap<_, _> = index_of(&data.stations)
            .into_iter()
            .map(|(k, v)| (k, StationId(v)))
            .collect();
        let family_index: HashMap<_, _> = data
            .fleet_families
            .iter()
            .enumerate()
            .map(|(i, f)| (f.id.clone(), FamilyId(i)))
            .collect();
        let fleet_index: HashMap<_, _> = data
            .fleet_types
            .iter()
            .enumerate()
            .map(|(i, f)| (f.id.clone(), FleetId(i)))
            .collect();
        let leg_index: HashMap<_, _> = data
            .legs
            .iter()
            .enumerate()
            .map(|(i, l)| (l.id.clone(), LegId(i)))
            .collect();

        let mut legs_by_month = vec![Vec::new(); data.months.len()];
        let mut leg_month = Vec::with_capacity(data.legs.len());
        for (i, leg) in data.legs.iter().enumerate() {
            let m = month_index[&leg.month];
            legs_by_month[m.0].push(LegId(i));
            leg_month.push(m);
        }
        let fleet_family: Vec<_> = data
            .fleet_types
            .iter()
            .map(|f| family_index[&f.family_id])
            .collect();
        let mut family_fleets = vec![Vec::new(); data.fleet_families.len()];
        for (i, b) in fleet_family.iter().enumerate() {
            family_fleets[b.0].push(FleetId(i));
        }
        let leg_hours = data
            .legs
            .iter()
            .map(|leg| {
                data.fleet_families
                    .iter()
                    .map(|fam| f64::from(leg.frequency) * leg.duration_by_family[&fam.id])
                    .collect()
            })
            .collect();
        let profits = data
            .legs
            .iter()
            .map(|leg| data.fleet_types.iter().map(|f| leg_profit(leg, f).ok()).collect())
            .collect();
        let leg_origin = data.legs.iter().map(|l| station_index[&l.origin]).collect();
        let leg_destination = data.legs.iter().map(|l| station_index[&l.destination]).collect();

        Ok(Self {
            data,
            legs_by_month,
            leg_month,
            leg_origin,
            leg_destination,
            fleet_family,
            family_fleets,
            leg_hours,
            profits,
            month_index,
            family_index,
            leg_index,
            fleet_index,
            station_index,
        })
    }

    pub fn data(&self) -> &InstanceData {
        &self.data
    }

    pub fn into_data(self) -> InstanceData {
        self.data
    }

    pub fn months(&self) -> impl ExactSizeIterator<Item = MonthId> + Clone {
        (0..self.data.months.len()).map(MonthId)
    }

    pub fn fleets(&self) -> impl ExactSizeIterator<Item = FleetId> + Clone {
        (0..self.data.fleet_types.len()).map(FleetId)
    }

    pub fn families(&self) -> impl ExactSizeIterator<Item = FamilyId> + Clone {
        (0..self.data.fleet_families.len()).map(FamilyId)
    }

    pub fn num_months(&self) -> usize {
        self.data.months.len()
    }

    pub fn num_fleets(&self) -> usize {
        self.data.fleet_types.len()
    }

    pub fn num_families(&self) -> usize {
        self.data.fleet_families.len()
    }

    pub fn num_legs(&self) -> usize {
        self.data.legs.len()
    }

    pub fn num_stations(&self) -> usize {
        self.data.stations.len()
    }

    pub fn month_name(&self, m: MonthId) -> &str {
        &self.data.months[m.0]
    }

    pub fn station_name(&self, s: StationId) -> &str {
        &self.data.stations[s.0]
    }

    pub fn legs_in_month(&self, m: MonthId) -> &[LegId] {
        &self.legs_by_month[m.0]
    }

    pub fn leg(&self, l: LegId) -> &FlightLeg {
        &self.data.legs[l.0]
    }

    pub fn leg_month(&self, l: LegId) -> MonthId {
        self.leg_month[l.0]
    }

    pub fn leg_origin(&self, l: LegId) -> StationId {
        self.leg_origin[l.0]
    }

    pub fn leg_destination(&self, l: LegId) -> StationId {
        self.leg_destination[l.0]
    }

    pub fn fleet(&self, f: FleetId) -> &FleetType {
        &self.data.fleet_types[f.0]
    }

    pub fn family(&self, b: FamilyId) -> &FleetFamily {
        &self.data.fleet_families[b.0]
    }

    pub fn family_of(&self, f: FleetId) -> FamilyId {
        self.fleet_family[f.0]
    }

    pub fn fleets_in_family(&self, b: FamilyId) -> &[FleetId] {
        &self.family_fleets[b.0]
    }

    /// Monthly crew flight hours t_b^l of leg `l` flown by family `b`.
    pub fn leg_hours(&self, l: LegId, b: FamilyId) -> f64 {
        self.leg_hours[l.0][b.0]
    }

    /// r_lf^m, or `None` when fleet type `f` cannot fly leg `l`.
    pub fn profit(&self, l: LegId, f: FleetId) -> Option<f64> {
        self.profits[l.0][f.0]
    }

    pub fn monthly_budget(&self, b: FamilyId, m: MonthId) -> f64 {
        let fam = self.family(b);
        f64::from(fam.crew_count) * fam.monthly_cap_per_crew[self.month_name(m)]
    }

    pub fn yearly_budget(&self, b: FamilyId) -> f64 {
        family_time_budget(self.family(b)).yearly
    }

    pub fn crew_policy(&self) -> &CrewPolicy {
        &self.data.crew_policy
    }

    pub fn transition(&self) -> &TransitionData {
        &self.data.transition
    }

    /// Scenario distribution of family `b`, or the default three-point
    /// distribution around its yearly budget.
    pub fn scenarios(&self, b: FamilyId) -> ScenarioSet {
        self.data
            .uncertainty
            .get(&self.family(b).id)
            .cloned()
            .unwrap_or_else(|| ScenarioSet::around(self.yearly_budget(b)))
    }

    pub fn month_id(&self, name: &str) -> Option<MonthId> {
        self.month_index.get(name).copied()
    }

    pub fn family_id(&self, name: &str) -> Option<FamilyId> {
        self.family_index.get(name).copied()
    }

    pub fn leg_id(&self, name: &str) -> Option<LegId> {
        self.leg_index.get(name).copied()
    }

    pub fn fleet_id(&self, name: &str) -> Option<FleetId> {
        self.fleet_index.get(name).copied()
    }

    pub fn station_id(&self, name: &str) -> Option<StationId> {
        self.station_index.get(name).copied()
    }

    /// Returns a copy with `edit` applied to the raw data, re-validated.
    pub fn with_data(&self, edit: impl FnOnce(&mut InstanceData)) -> Result<Instance, ValidationError> {
        let mut data = self.data.clone();
        edit(&mut data);
        Instance::new(data)
    }

    /// Save as pretty JSON.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), InstanceError> {
        let text = serde_json::to_string_pretty(&self.data)?;
        fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.data).expect("instance data serializes")
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, InstanceError> {
    let text = fs::read_to_string(path)?;
    parse_instance(&text)
}

pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let data: InstanceData = serde_json::from_str(text)?;
    Ok(Instance::new(data)?)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<(), InstanceError> {
    inst.save(path)
}

/// Scales every leg's demand by an i.i.d. uniform factor: [1.1, 1.2] for
/// high, [0.8, 0.9] for low. Mid returns the instance unchanged.
pub fn perturb_demand(inst: &Instance, level: DemandLevel, seed: u64) -> Instance {
    let range = match level {
        DemandLevel::Mid => return inst.clone(),
        DemandLevel::High => 1.1..=1.2,
        DemandLevel::Low => 0.8..=0.9,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = inst.data.clone();
    for leg in &mut data.legs {
        let factor: f64 = rng.gen_range(range.clone());
        leg.demand *= factor;
    }
    Instance::new(data).expect("demand scaling keeps a valid instance valid")
}

/// Collects every invariant violation of `data`.
pub fn validate(data: &InstanceData) -> Vec<String> {
    let mut errs = Vec::new();
    if data.months.is_empty() {
        errs.push("no months".to_string());
    }
    if data.legs.is_empty() {
        errs.push("no legs".to_string());
    }
    if data.fleet_types.is_empty() {
        errs.push("no fleet types".to_string());
    }
    check_unique("month", data.months.iter().map(String::as_str), &mut errs);
    check_unique("station", data.stations.iter().map(String::as_str), &mut errs);
    check_unique("fleet type", data.fleet_types.iter().map(|f| f.id.as_str()), &mut errs);
    check_unique("fleet family", data.fleet_families.iter().map(|f| f.id.as_str()), &mut errs);
    check_unique("leg", data.legs.iter().map(|l| l.id.as_str()), &mut errs);

    let months: HashSet<&str> = data.months.iter().map(String::as_str).collect();
    let stations: HashSet<&str> = data.stations.iter().map(String::as_str).collect();
    let families: HashMap<&str, &FleetFamily> =
        data.fleet_families.iter().map(|f| (f.id.as_str(), f)).collect();
    let legs: HashSet<&str> = data.legs.iter().map(|l| l.id.as_str()).collect();

    for f in &data.fleet_types {
        if f.seats == 0 {
            errs.push(format!("fleet type `{}` has zero seats", f.id));
        }
        match families.get(f.family_id.as_str()) {
            None => errs.push(format!("fleet type `{}` references unknown family `{}`", f.id, f.family_id)),
            Some(fam) if !fam.fleet_type_ids.contains(&f.id) => errs.push(format!(
                "family `{}` does not list its fleet type `{}`",
                fam.id, f.id
            )),
            Some(_) => {}
        }
        for (leg, cost) in &f.operating_cost {
            if !legs.contains(leg.as_str()) {
                errs.push(format!("fleet type `{}` has a cost for unknown leg `{leg}`", f.id));
            }
            if *cost < 0 {
                errs.push(format!("fleet type `{}` has a negative cost for leg `{leg}`", f.id));
            }
        }
        if f.min_turn_time >= MINUTES_PER_DAY {
            errs.push(format!("fleet type `{}` turn time exceeds a day", f.id));
        }
    }
    let mut listed = HashSet::new();
    for fam in &data.fleet_families {
        for ft in &fam.fleet_type_ids {
            if !listed.insert(ft.as_str()) {
                errs.push(format!("fleet type `{ft}` listed in more than one family"));
            }
            match data.fleet_types.iter().find(|f| &f.id == ft) {
                None => errs.push(format!("family `{}` lists unknown fleet type `{ft}`", fam.id)),
                Some(f) if f.family_id != fam.id => {
                    errs.push(format!("family `{}` lists fleet type `{ft}` of family `{}`", fam.id, f.family_id))
                }
                Some(_) => {}
            }
        }
        if !(fam.yearly_cap_per_crew >= 0.0) {
            errs.push(format!("family `{}` has a negative yearly cap", fam.id));
        }
        for m in &data.months {
            match fam.monthly_cap_per_crew.get(m) {
                None => errs.push(format!("family `{}` has no monthly cap for month `{m}`", fam.id)),
                Some(c) if !(*c >= 0.0) => errs.push(format!("family `{}` has a negative cap in `{m}`", fam.id)),
                Some(_) => {}
            }
        }
    }

    let max_turn = data.fleet_types.iter().map(|f| f.min_turn_time).max().unwrap_or(0);
    for leg in &data.legs {
        if !months.contains(leg.month.as_str()) {
            errs.push(format!("leg `{}` references unknown month `{}`", leg.id, leg.month));
        }
        for s in [&leg.origin, &leg.destination] {
            if !stations.contains(s.as_str()) {
                errs.push(format!("leg `{}` references unknown station `{s}`", leg.id));
            }
        }
        if leg.origin == leg.destination {
            errs.push(format!("leg `{}` departs and arrives at the same station", leg.id));
        }
        if leg.departure >= MINUTES_PER_DAY || leg.arrival >= MINUTES_PER_DAY {
            errs.push(format!("leg `{}` time outside [0, 1440)", leg.id));
        } else if leg.block_minutes() == 0 || leg.block_minutes() + max_turn >= MINUTES_PER_DAY {
            errs.push(format!("leg `{}` block plus turn time must be within (0, 1440) minutes", leg.id));
        }
        if leg.frequency == 0 {
            errs.push(format!("leg `{}` has zero frequency", leg.id));
        }
        if !(leg.demand >= 0.0) || !leg.demand.is_finite() {
            errs.push(format!("leg `{}` has invalid demand", leg.id));
        }
        if leg.fare < 0 {
            errs.push(format!("leg `{}` has a negative fare", leg.id));
        }
        for fam in &data.fleet_families {
            match leg.duration_by_family.get(&fam.id) {
                None => errs.push(format!("leg `{}` has no duration for family `{}`", leg.id, fam.id)),
                Some(d) if !(*d > 0.0) => errs.push(format!("leg `{}` has a non-positive duration", leg.id)),
                Some(_) => {}
            }
        }
    }

    let rules = &data.crew_policy.rules;
    if let Err(e) = rules.check() {
        errs.push(e);
    }
    for base in &rules.crew_bases {
        if !stations.contains(base.as_str()) {
            errs.push(format!("crew base `{base}` is not a station"));
        }
    }
    if !(data.crew_policy.empirical_markup >= 1.0) {
        errs.push("empirical markup must be at least 1".to_string());
    }

    for arc in &data.transition.arcs {
        for fam in [&arc.from, &arc.to] {
            if !families.contains_key(fam.as_str()) {
                errs.push(format!("transition references unknown family `{fam}`"));
            }
        }
        if arc.from == arc.to {
            errs.push(format!("transition from `{}` to itself", arc.from));
        }
        if arc.cost < 0 {
            errs.push(format!("transition `{}`->`{}` has a negative cost", arc.from, arc.to));
        }
    }
    if !(data.transition.training_years >= 0.0) {
        errs.push("negative training duration".to_string());
    }

    for (fam, sc) in &data.uncertainty {
        if !families.contains_key(fam.as_str()) {
            errs.push(format!("uncertainty references unknown family `{fam}`"));
        }
        if sc.rho.is_empty() || sc.rho.len() != sc.phi.len() {
            errs.push(format!("uncertainty of `{fam}`: rho and phi must be nonempty and of equal length"));
            continue;
        }
        if sc.rho.windows(2).any(|w| !(w[0] < w[1])) {
            errs.push(format!("uncertainty of `{fam}`: rho must be strictly ascending"));
        }
        if sc.phi.iter().any(|p| !(*p >= 0.0)) || (sc.phi.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            errs.push(format!("uncertainty of `{fam}`: phi must be a probability vector"));
        }
        if !(sc.epsilon > 0.0 && sc.epsilon < 1.0) {
            errs.push(format!("uncertainty of `{fam}`: epsilon must lie in (0, 1)"));
        }
    }
    errs
}

//! Seeded synthetic instances: hub-and-spoke daily rotations repeated every
//! month with seasonal demand.
//!
//! Every rotation leaves the hub and returns to it within the day, so the
//! cyclic aircraft network of every fleet type is balanceable and each
//! rotation needs exactly one aircraft overnight.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hours::round as round_hours;
use super::{
    CrewPolicy, FleetFamily, FleetType, FlightLeg, InstanceData, ScenarioSet, TransitionArc, TransitionData,
};
use crate::pairing::{CostModel, PairingRules};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub stations: usize,
    pub families: usize,
    pub fleet_types: usize,
    pub legs_per_month: usize,
    pub months: usize,
}

impl Default for Dims {
    fn default() -> Self {
        Self {
            stations: 4,
            families: 2,
            fleet_types: 3,
            legs_per_month: 12,
            months: 12,
        }
    }
}

const DAYS_IN_MONTH: [u32; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];
/// Demand multipliers peaking in winter holidays and summer.
const SEASON: [f64; 12] = [1.10, 0.90, 0.95, 1.00, 1.00, 1.05, 1.15, 1.15, 1.00, 0.95, 0.90, 1.05];
const MONTHLY_CAP: f64 = 100.0;
const YEARLY_CAP: f64 = 1000.0;
/// Ground buffer the schedule keeps above every fleet type's turn time.
const SCHEDULE_TURN: u32 = 60;

struct Route {
    from: usize,
    to: usize,
    block: u32,
}

/// Builds a seeded instance. Families are capped at the number of fleet
/// types so every family owns at least one type. Fewer than two stations
/// produce no legs, which fails validation downstream.
pub fn generate_synthetic(seed: u64, dims: Dims) -> InstanceData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_fam = dims.families.max(1).min(dims.fleet_types.max(1));
    let n_types = dims.fleet_types.max(n_fam);
    let n_months = dims.months.max(1);

    let stations: Vec<String> = (0..dims.stations).map(|i| format!("S{i}")).collect();
    let months: Vec<String> = (1..=n_months).map(|m| format!("M{m:02}")).collect();
    let families: Vec<String> = (0..n_fam).map(|b| format!("B{b}")).collect();

    // block minutes per unordered station pair
    let mut blocks = BTreeMap::new();
    for i in 0..dims.stations {
        for j in i + 1..dims.stations {
            blocks.insert((i, j), 5 * rng.gen_range(12..=36u32));
        }
    }
    let block = |a: usize, b: usize| blocks[&(a.min(b), a.max(b))];

    // daily rotations: (legs, departure times)
    let mut rotations: Vec<Vec<(Route, u32)>> = Vec::new();
    if dims.stations >= 2 && dims.legs_per_month > 0 {
        let n = dims.legs_per_month;
        let mut sizes = Vec::new();
        let mut left = n;
        if n % 2 == 1 && dims.stations >= 3 && n >= 3 {
            sizes.push(3);
            left -= 3;
        }
        sizes.extend(std::iter::repeat(2).take(left.div_ceil(2)));
        let spokes = dims.stations - 1;
        for (k, size) in sizes.into_iter().enumerate() {
            let s1 = 1 + k % spokes;
            let path = if size == 3 {
                let s2 = 1 + (k + 1) % spokes;
                vec![0, s1, s2, 0]
            } else {
                vec![0, s1, 0]
            };
            let routes: Vec<Route> = path
                .windows(2)
                .map(|w| Route {
                    from: w[0],
                    to: w[1],
                    block: block(w[0], w[1]),
                })
                .collect();
            let gaps: Vec<u32> = (1..routes.len()).map(|_| SCHEDULE_TURN + 5 * rng.gen_range(0..=12u32)).collect();
            let total: u32 = routes.iter().map(|r| r.block).sum::<u32>() + gaps.iter().sum::<u32>();
            let latest_start = (23 * 60 - total).max(360);
            let start = 360 + 5 * rng.gen_range(0..=(latest_start - 360) / 5);
            let mut t = start;
            let mut legs = Vec::new();
            for (i, r) in routes.into_iter().enumerate() {
                let dep = t;
                t += r.block;
                legs.push((r, dep));
                if let Some(g) = gaps.get(i) {
                    t += g;
                }
            }
            rotations.push(legs);
        }
    }
    let n_rot = rotations.len() as u32;

    // family cost/duration personalities
    let fam_speed: Vec<f64> = (0..n_fam).map(|_| rng.gen_range(0.95..=1.05)).collect();
    let base_demand: Vec<Vec<f64>> = rotations
        .iter()
        .map(|r| r.iter().map(|_| rng.gen_range(80.0..=260.0)).collect())
        .collect();

    let mut legs = Vec::new();
    for (mi, month) in months.iter().enumerate() {
        let season = SEASON[mi % 12];
        let freq = if n_months == 12 { DAYS_IN_MONTH[mi] } else { 30 };
        let mut k = 0;
        for (ri, rot) in rotations.iter().enumerate() {
            for (li, (r, dep)) in rot.iter().enumerate() {
                let noise: f64 = rng.gen_range(0.95..=1.05);
                let demand = (base_demand[ri][li] * season * noise * 10.0).round() / 10.0;
                let fare = (100 + r.block as i64) * 100;
                legs.push(FlightLeg {
                    id: format!("{month}-L{k:03}"),
                    month: month.clone(),
                    origin: stations[r.from].clone(),
                    destination: stations[r.to].clone(),
                    departure: *dep,
                    arrival: (dep + r.block) % 1440,
                    frequency: freq,
                    duration_by_family: families
                        .iter()
                        .zip(&fam_speed)
                        .map(|(b, s)| (b.clone(), round_hours(f64::from(r.block) / 60.0 * s)))
                        .collect(),
                    demand,
                    fare,
                });
                k += 1;
            }
        }
    }

    // fleet types: even families narrow-body, odd families wide-body
    let mut fleet_types = Vec::new();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_fam];
    for i in 0..n_types {
        let b = i % n_fam;
        members[b].push(i);
        let wide = b % 2 == 1;
        let seats = if wide { rng.gen_range(230..=320) } else { rng.gen_range(120..=190) };
        let turn = if wide { rng.gen_range(45..=SCHEDULE_TURN) } else { rng.gen_range(30..=45) };
        let efficiency: f64 = rng.gen_range(0.9..=1.1);
        let operating_cost = legs
            .iter()
            .map(|l| {
                let per_flight = 0.6 * efficiency * f64::from(seats) * l.fare as f64 * 0.8;
                (l.id.clone(), (per_flight * f64::from(l.frequency)).round() as i64)
            })
            .collect();
        fleet_types.push(FleetType {
            id: format!("T{i}"),
            family_id: families[b].clone(),
            seats,
            aircraft_count: 0,
            min_turn_time: turn,
            operating_cost,
        });
    }
    // each family alone can fly most rotations
    let share = if n_fam == 1 { 1.0 } else { 0.75 };
    for ids in &members {
        let need = ((f64::from(n_rot) * share).ceil() as u32).max(1);
        let per = need.div_ceil(ids.len() as u32).max(1);
        for &i in ids {
            fleet_types[i].aircraft_count = per;
        }
    }

    // crew sized so each family covers a share of the hours it would need
    // to fly everything
    let crew_share = if n_fam == 1 { 1.25 } else { 0.6 };
    let fleet_families: Vec<FleetFamily> = families
        .iter()
        .enumerate()
        .map(|(b, id)| {
            let monthly: Vec<f64> = months
                .iter()
                .map(|m| {
                    legs.iter()
                        .filter(|l| &l.month == m)
                        .map(|l| f64::from(l.frequency) * l.duration_by_family[id])
                        .sum()
                })
                .collect();
            let peak = monthly.iter().copied().fold(0.0, f64::max);
            let year: f64 = monthly.iter().sum();
            let crew = (crew_share * peak / MONTHLY_CAP).max(crew_share * year / YEARLY_CAP).ceil() as u32;
            FleetFamily {
                id: id.clone(),
                fleet_type_ids: members[b].iter().map(|&i| format!("T{i}")).collect(),
                crew_count: crew.max(1),
                monthly_cap_per_crew: months.iter().map(|m| (m.clone(), MONTHLY_CAP)).collect(),
                yearly_cap_per_crew: YEARLY_CAP,
            }
        })
        .collect();

    let pay_rate = 15_000;
    let crew_policy = CrewPolicy {
        rules: PairingRules {
            crew_bases: stations.iter().take(1).cloned().collect(),
            ..PairingRules::default()
        },
        cost: CostModel {
            pay_rate,
            // five paid hours per pairing day over a 30-day month
            min_guarantee: pay_rate * 5 * 30,
        },
        empirical_markup: 1.0,
        artificial_cost_factor: 3.0,
    };

    let mut arcs = Vec::new();
    for from in &families {
        for to in &families {
            if from != to {
                arcs.push(TransitionArc {
                    from: from.clone(),
                    to: to.clone(),
                    cost: 100 * rng.gen_range(50_000..=150_000i64),
                    cap: 2,
                });
            }
        }
    }

    let uncertainty = fleet_families
        .iter()
        .map(|fam| {
            let t = f64::from(fam.crew_count) * fam.yearly_cap_per_crew;
            (
                fam.id.clone(),
                ScenarioSet {
                    rho: vec![round_hours(0.9 * t), round_hours(0.95 * t), round_hours(t)],
                    phi: vec![0.2, 0.3, 0.5],
                    epsilon: 0.1,
                },
            )
        })
        .collect();

    InstanceData {
        months,
        stations,
        fleet_types,
        fleet_families,
        legs,
        crew_policy,
        transition: TransitionData {
            arcs,
            training_years: 0.25,
        },
        uncertainty,
    }
}

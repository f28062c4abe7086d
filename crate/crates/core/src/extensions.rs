//! Crew-transition and crew-uncertainty variants of the leg-based model.
//!
//! The transition model lets crew members move between families before the
//! year starts: each transfer costs its training cost plus the profit lost
//! while the crew member is absent for training, and shifts the monthly and
//! yearly crew-time budgets by the transferred count. The uncertainty model
//! replaces each family's yearly budget by the quantile of its scenario
//! distribution that makes the individual chance constraint hold.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::instance::{FamilyId, Instance, ScenarioSet};
use crate::models::{build_bim_legbased, ModelOptions, Networks, YearModel};
use crate::solver::{RowSense, SolveResult, VarId};

/// Cumulative-probability slack when comparing against ε, so that ε set
/// exactly at a breakpoint is not lost to rounding of Σφ.
const PROB_TOL: f64 = 1e-12;

/// Profit lost while a crew member of family `b` trains: the training time
/// in years times the yearly marginal profit β_b·t̄_b of one crew member.
pub fn absence_cost(training_years: f64, beta_b: f64, yearly_cap_per_crew: f64) -> f64 {
    training_years * beta_b * yearly_cap_per_crew
}

/// Transfer arc (b1 → b2) with its model variable.
#[derive(Debug, Clone)]
pub struct TransferVar {
    pub from: FamilyId,
    pub to: FamilyId,
    pub var: VarId,
    pub cap: u32,
    /// Training plus absence cost per transferred crew member.
    pub unit_cost: f64,
}

pub struct CtModel {
    pub year: YearModel,
    pub transfers: Vec<TransferVar>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionPlan {
    /// (from, to) family ids → crew members transferred.
    pub v: BTreeMap<(String, String), f64>,
    pub effective_crew: BTreeMap<String, f64>,
    pub total_cost: f64,
}

/// Leg-based model with integer (or, with `integer_v = false`, continuous)
/// transfer variables v_{b1}^{b2} ∈ [0, cap]. `beta` supplies the yearly
/// crew prices used for absence costs; families missing from it are
/// treated as slack (β = 0).
pub fn build_tfacpp_ct(
    inst: &Instance,
    nets: &Networks,
    beta: &BTreeMap<FamilyId, f64>,
    opts: &ModelOptions,
    integer_v: bool,
) -> CtModel {
    let mut year = build_bim_legbased(inst, nets, None, opts);
    let tr = inst.transition();
    let mut transfers = Vec::new();
    for arc in &tr.arcs {
        let (Some(from), Some(to)) = (inst.family_id(&arc.from), inst.family_id(&arc.to)) else {
            continue;
        };
        if arc.cap == 0 || from == to {
            continue;
        }
        let dest = inst.family(to);
        let unit_cost = arc.cost as f64
            + absence_cost(tr.training_years, beta.get(&to).copied().unwrap_or(0.0), dest.yearly_cap_per_crew);
        let var = year.model.add_var(
            format!("v_{}_{}", from.index(), to.index()),
            0.0,
            f64::from(arc.cap),
            integer_v,
            -unit_cost,
        );
        transfers.push(TransferVar {
            from,
            to,
            var,
            cap: arc.cap,
            unit_cost,
        });
    }

    // Budgets k·t̄ become (k + in − out)·t̄: move the v terms to the left.
    let net_terms = |b: FamilyId, scale: f64| -> Vec<(VarId, f64)> {
        transfers
            .iter()
            .filter_map(|t| {
                if t.to == b {
                    Some((t.var, -scale))
                } else if t.from == b {
                    Some((t.var, scale))
                } else {
                    None
                }
            })
            .collect()
    };
    for b in inst.families() {
        let fam = inst.family(b);
        let rows: Vec<_> = year
            .monthly_rows
            .iter()
            .filter(|((_, fb), _)| *fb == b)
            .map(|(&(m, _), &r)| (m, r))
            .collect();
        for (m, row) in rows {
            let cap = fam.monthly_cap_per_crew[inst.month_name(m)];
            year.model.add_terms(row, net_terms(b, cap));
        }
        if let Some(&row) = year.yearly_rows.get(&b) {
            year.model.add_terms(row, net_terms(b, fam.yearly_cap_per_crew));
        }
        // effective crew k + in − out ≥ 0
        let terms = net_terms(b, 1.0);
        if !terms.is_empty() {
            year.model.add_row(
                format!("crew_nonneg_{}", b.index()),
                terms,
                RowSense::Le,
                f64::from(fam.crew_count),
            );
        }
    }
    CtModel { year, transfers }
}

impl CtModel {
    pub fn plan(&self, inst: &Instance, res: &SolveResult) -> TransitionPlan {
        let mut effective: BTreeMap<String, f64> = inst
            .families()
            .map(|b| (inst.family(b).id.clone(), f64::from(inst.family(b).crew_count)))
            .collect();
        let mut v = BTreeMap::new();
        let mut total_cost = 0.0;
        for t in &self.transfers {
            let n = res.value(t.var);
            let (from, to) = (inst.family(t.from).id.clone(), inst.family(t.to).id.clone());
            *effective.get_mut(&from).expect("family") -= n;
            *effective.get_mut(&to).expect("family") += n;
            total_cost += t.unit_cost * n;
            v.insert((from, to), n);
        }
        TransitionPlan {
            v,
            effective_crew: effective,
            total_cost,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioQuantile {
    pub family: FamilyId,
    /// 1-based scenario index q0.
    pub q0: usize,
    pub value: f64,
}

/// Smallest q0 with Σ_{q≤q0} φ_q ≥ ε, so that Σ_{q<q0} φ < ε ≤ Σ_{q≤q0} φ.
pub fn quantile_index(family: FamilyId, scenarios: &ScenarioSet) -> ScenarioQuantile {
    let mut cum = 0.0;
    let last = scenarios.rho.len() - 1;
    for (q, (&rho, &phi)) in scenarios.rho.iter().zip(&scenarios.phi).enumerate() {
        cum += phi;
        if cum >= scenarios.epsilon - PROB_TOL || q == last {
            return ScenarioQuantile {
                family,
                q0: q + 1,
                value: rho,
            };
        }
    }
    unreachable!("scenario sets are nonempty")
}

/// Deterministic equivalent of the chance-constrained model: the leg-based
/// model with every yearly budget replaced by ρ_b^{q0}.
pub fn build_tfacpp_cu(inst: &Instance, nets: &Networks, opts: &ModelOptions) -> (YearModel, Vec<ScenarioQuantile>) {
    let mut year = build_bim_legbased(inst, nets, None, opts);
    let quantiles: Vec<_> = inst.families().map(|b| quantile_index(b, &inst.scenarios(b))).collect();
    for q in &quantiles {
        year.model.set_rhs(year.yearly_rows[&q.family], q.value);
    }
    (year, quantiles)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageEstimate {
    /// Fraction of draws with usage ≤ drawn available time.
    pub rate: f64,
    /// Standard error of `rate`.
    pub std_error: f64,
    pub draws: usize,
}

/// Monte Carlo estimate of P{usage ≤ t_b(ρ)} under the scenario distribution.
pub fn monte_carlo_coverage(scenarios: &ScenarioSet, usage: f64, draws: usize, seed: u64) -> CoverageEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = WeightedIndex::new(&scenarios.phi).expect("phi is a probability vector");
    let hits = (0..draws)
        .filter(|_| usage <= scenarios.rho[dist.sample(&mut rng)] + 1e-9)
        .count();
    let rate = hits as f64 / draws as f64;
    CoverageEstimate {
        rate,
        std_error: (rate * (1.0 - rate) / draws as f64).sqrt(),
        draws,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::TransitionArc;
    use crate::models::tests::desk;
    use crate::solver::{self, MipOptions};
    use crate::timespace::DEFAULT_COUNT_TIME;
    use proptest::prelude::*;

    fn set(rho: &[f64], phi: &[f64], epsilon: f64) -> ScenarioSet {
        ScenarioSet {
            rho: rho.to_vec(),
            phi: phi.to_vec(),
            epsilon,
        }
    }

    #[test]
    fn absence_cost_examples() {
        assert_eq!(absence_cost(0.5, 0.0, 1000.0), 0.0);
        assert!((absence_cost(0.5, 2000.0, 1000.0) - 1_000_000.0).abs() < 1e-9);
        assert!((absence_cost(1.0, 3.0, 7.0) - 2.0 * absence_cost(0.5, 3.0, 7.0)).abs() < 1e-12);
    }

    #[test]
    fn quantile_examples() {
        let b = FamilyId(0);
        let q = quantile_index(b, &set(&[1000.0], &[1.0], 0.1));
        assert_eq!((q.q0, q.value), (1, 1000.0));
        let q = quantile_index(b, &set(&[900.0, 950.0, 1000.0], &[0.3, 0.4, 0.3], 0.5));
        assert_eq!((q.q0, q.value), (2, 950.0));
        let q = quantile_index(b, &set(&[900.0, 950.0, 1000.0], &[0.3, 0.4, 0.3], 0.3));
        assert_eq!(q.q0, 1);
    }

    proptest! {
        #[test]
        fn quantile_bracket(weights in prop::collection::vec(1u32..100, 1..8), eps in 0.001f64..0.999) {
            let total: u32 = weights.iter().sum();
            let phi: Vec<f64> = weights.iter().map(|&w| f64::from(w) / f64::from(total)).collect();
            let rho: Vec<f64> = (0..phi.len()).map(|q| 100.0 * (q + 1) as f64).collect();
            let q = quantile_index(FamilyId(0), &set(&rho, &phi, eps));
            let below: f64 = phi[..q.q0 - 1].iter().sum();
            let upto: f64 = phi[..q.q0].iter().sum();
            prop_assert!(below < eps);
            prop_assert!(eps <= upto + 1e-9);
            prop_assert_eq!(q.value, rho[q.q0 - 1]);
        }
    }

    fn with_arcs(inst: &Instance, arcs: Vec<TransitionArc>, training: f64) -> Instance {
        inst.with_data(|d| {
            d.transition.arcs = arcs;
            d.transition.training_years = training;
        })
        .unwrap()
    }

    fn arc(from: &str, to: &str, cost: i64, cap: u32) -> TransitionArc {
        TransitionArc {
            from: from.into(),
            to: to.into(),
            cost,
            cap,
        }
    }

    fn mip(ym: &YearModel) -> SolveResult {
        let r = solver::solve_mip(&ym.model, &MipOptions::with_gap(1e-9)).unwrap();
        assert!(r.is_optimal(), "{:?}", r.status);
        r
    }

    /// Desk instance split into two families, one fleet type each; the
    /// first family is starved of yearly crew time.
    fn starved() -> Instance {
        desk([200, 150], [2, 2])
            .with_data(|d| {
                let mut g = d.fleet_families[0].clone();
                g.id = "G".into();
                g.fleet_type_ids = vec!["T2".into()];
                d.fleet_families[0].fleet_type_ids = vec!["T".into()];
                d.fleet_types[1].family_id = "G".into();
                d.fleet_families.push(g);
                for l in &mut d.legs {
                    let h = l.duration_by_family["F"];
                    l.duration_by_family.insert("G".into(), h);
                }
                for fam in &mut d.fleet_families {
                    fam.crew_count = 10;
                }
                d.fleet_families[0].yearly_cap_per_crew = 10.0;
                d.fleet_families[1].yearly_cap_per_crew = 30.0;
            })
            .unwrap()
    }

    #[test]
    fn zero_caps_equal_base_model() {
        let inst = starved();
        let names: Vec<String> = inst.data().fleet_families.iter().map(|f| f.id.clone()).collect();
        let inst = with_arcs(&inst, vec![arc(&names[1], &names[0], 0, 0)], 0.0);
        let nets = Networks::build(&inst, DEFAULT_COUNT_TIME);
        let base = build_bim_legbased(&inst, &nets, None, &ModelOptions::default());
        let ct = build_tfacpp_ct(&inst, &nets, &BTreeMap::new(), &ModelOptions::default(), true);
        assert!(ct.transfers.is_empty());
        assert!((mip(&base).objective - mip(&ct.year).objective).abs() < 1e-9);
    }

    #[test]
    fn transfers_match_brute_force_over_v() {
        let inst = starved();
        let names: Vec<String> = inst.data().fleet_families.iter().map(|f| f.id.clone()).collect();
        let cap = 6;
        for cost in [0, 1_000_000, 1_000_000_000_000] {
            let inst = with_arcs(&inst, vec![arc(&names[1], &names[0], cost, cap)], 0.0);
            let nets = Networks::build(&inst, DEFAULT_COUNT_TIME);
            let ct = build_tfacpp_ct(&inst, &nets, &BTreeMap::new(), &ModelOptions::default(), true);
            let res = mip(&ct.year);
            // brute force: move v crew members by editing the instance
            let mut best = f64::NEG_INFINITY;
            for v in 0..=cap {
                let moved = inst
                    .with_data(|d| {
                        d.fleet_families[1].crew_count -= v;
                        d.fleet_families[0].crew_count += v;
                    })
                    .unwrap();
                let base = build_bim_legbased(&moved, &nets, None, &ModelOptions::default());
                let r = solver::solve_mip(&base.model, &MipOptions::with_gap(1e-9)).unwrap();
                if r.is_optimal() {
                    best = best.max(r.objective - cost as f64 * f64::from(v));
                }
            }
            assert!((res.objective - best).abs() <= 1e-9 * best.abs().max(1.0), "cost {cost}: {} vs {best}", res.objective);
            let plan = ct.plan(&inst, &res);
            assert!(plan.effective_crew.values().all(|&k| k >= -1e-9));
            if cost == 1_000_000_000_000 {
                assert!(plan.v.values().all(|&n| n.abs() < 1e-9));
            }
        }
    }

    #[test]
    fn free_transfers_never_hurt() {
        let inst = starved();
        let names: Vec<String> = inst.data().fleet_families.iter().map(|f| f.id.clone()).collect();
        let inst = with_arcs(&inst, vec![arc(&names[1], &names[0], 0, 3), arc(&names[0], &names[1], 0, 3)], 0.0);
        let nets = Networks::build(&inst, DEFAULT_COUNT_TIME);
        let base = mip(&build_bim_legbased(&inst, &nets, None, &ModelOptions::default())).objective;
        let ct = build_tfacpp_ct(&inst, &nets, &BTreeMap::new(), &ModelOptions::default(), true);
        let res = mip(&ct.year);
        assert!(res.objective >= base - 1e-9);
        assert!(ct.plan(&inst, &res).v[&(names[1].clone(), names[0].clone())] > 0.5);
    }

    #[test]
    fn absence_cost_enters_transfer_price() {
        let inst = starved();
        let names: Vec<String> = inst.data().fleet_families.iter().map(|f| f.id.clone()).collect();
        let inst = with_arcs(&inst, vec![arc(&names[1], &names[0], 10, 1)], 0.25);
        let nets = Networks::build(&inst, DEFAULT_COUNT_TIME);
        let beta = BTreeMap::from([(FamilyId(0), 8.0)]);
        let ct = build_tfacpp_ct(&inst, &nets, &beta, &ModelOptions::default(), true);
        assert!((ct.transfers[0].unit_cost - (10.0 + 0.25 * 8.0 * 10.0)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_distribution_is_base_model() {
        let inst = starved();
        let inst = inst
            .with_data(|d| {
                for fam in d.fleet_families.clone() {
                    let t = f64::from(fam.crew_count) * fam.yearly_cap_per_crew;
                    d.uncertainty.insert(fam.id.clone(), set(&[t], &[1.0], 0.1));
                }
            })
            .unwrap();
        let nets = Networks::build(&inst, DEFAULT_COUNT_TIME);
        let base = mip(&build_bim_legbased(&inst, &nets, None, &ModelOptions::default())).objective;
        let (cu, _) = build_tfacpp_cu(&inst, &nets, &ModelOptions::default());
        assert!((mip(&cu).objective - base).abs() < 1e-9);
    }

    #[test]
    fn tighter_epsilon_never_helps() {
        let inst = starved();
        let nets = Networks::build(&inst, DEFAULT_COUNT_TIME);
        let mut last = f64::INFINITY;
        for eps in [0.9, 0.6, 0.3, 0.05] {
            let inst = inst
                .with_data(|d| {
                    for fam in d.fleet_families.clone() {
                        let t = f64::from(fam.crew_count) * fam.yearly_cap_per_crew;
                        d.uncertainty
                            .insert(fam.id.clone(), set(&[0.5 * t, 0.8 * t, t], &[0.2, 0.3, 0.5], eps));
                    }
                })
                .unwrap();
            let (cu, _) = build_tfacpp_cu(&inst, &nets, &ModelOptions::lp());
            let r = solver::solve_lp(&cu.model).unwrap();
            let obj = if r.is_optimal() { r.objective } else { f64::NEG_INFINITY };
            assert!(obj <= last + 1e-9);
            last = obj;
        }
    }

    #[test]
    fn monte_carlo_reproducible_and_bounded() {
        let s = set(&[900.0, 950.0, 1000.0], &[0.3, 0.4, 0.3], 0.5);
        let a = monte_carlo_coverage(&s, 950.0, 10_000, 1);
        assert_eq!(a, monte_carlo_coverage(&s, 950.0, 10_000, 1));
        assert!((a.rate - 0.7).abs() < 4.0 * a.std_error.max(1e-3));
        assert_eq!(monte_carlo_coverage(&s, 800.0, 1000, 1).rate, 1.0);
    }
}

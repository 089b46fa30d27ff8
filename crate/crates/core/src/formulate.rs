//! Translation of a [`SystemSpec`] into the baseline cost-minimization LP or
//! the opportunity-value LP (thermal retired, IES/SDES investable, LDES
//! imposed), plus the per-term objective decomposition.
//!
//! The opportunity model is solved in its two-step form: minimize total cost
//! with the imposed LDES free of charge; the viability cost and the over-cost
//! slack are recovered afterwards from the baseline cost. This is equivalent
//! to the single maximization with any over-cost penalty above 1/x_power.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{GeneratorKind, StorageKind, SystemSpec, Technology};
use crate::lp::{Direction, LinearProgram, Sense};
use crate::solve::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Baseline,
    Opportunity,
}

#[derive(Debug, Clone)]
pub struct ModelMode {
    pub mode: Mode,
    /// Imposed LDES power (opportunity only); 0 excludes the LDES asset.
    pub x_power_mw: f64,
    pub q_star: f64,
    pub retire_technologies: BTreeSet<Technology>,
}

impl ModelMode {
    pub fn baseline() -> Self {
        Self {
            mode: Mode::Baseline,
            x_power_mw: 0.0,
            q_star: f64::NAN,
            retire_technologies: BTreeSet::new(),
        }
    }

    pub fn opportunity(x_power_mw: f64, q_star: f64) -> Result<Self> {
        if x_power_mw <= 0.0 {
            return Err(Error::Argument(format!(
                "opportunity model requires x_power_mw > 0, got {x_power_mw}"
            )));
        }
        if !q_star.is_finite() {
            return Err(Error::Argument("q_star must be finite".into()));
        }
        Ok(Self {
            mode: Mode::Opportunity,
            x_power_mw,
            q_star,
            retire_technologies: [Technology::Gas, Technology::Coal].into(),
        })
    }

    /// Opportunity variant with the LDES asset left out entirely (used for
    /// the no-LDES replacement column of the national roll-up).
    pub fn opportunity_without_ldes(q_star: f64) -> Result<Self> {
        if !q_star.is_finite() {
            return Err(Error::Argument("q_star must be finite".into()));
        }
        Ok(Self {
            mode: Mode::Opportunity,
            x_power_mw: 0.0,
            q_star,
            retire_technologies: [Technology::Gas, Technology::Coal].into(),
        })
    }
}

/// Objective cost decomposition. All terms in $; `total` is the sum of every
/// cost term plus `ldes_term`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ObjectiveBreakdown {
    pub inv_gen: f64,
    pub inv_st_short: f64,
    pub ope_gen: f64,
    /// Reserve provision cost.
    pub ies_gen: f64,
    pub imbalance: f64,
    /// Reserve shortage penalty.
    pub ies_shortage: f64,
    pub fom_gen: f64,
    pub fom_st_short: f64,
    /// c_vc * x_power; populated by the sweep for opportunity points.
    pub ldes_term: f64,
    /// Over-cost slack; populated by the sweep for opportunity points.
    pub q_over: f64,
    pub total: f64,
}

impl ObjectiveBreakdown {
    pub fn cost_total(&self) -> f64 {
        self.inv_gen
            + self.inv_st_short
            + self.ope_gen
            + self.ies_gen
            + self.imbalance
            + self.ies_shortage
            + self.fom_gen
            + self.fom_st_short
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorVars {
    pub dispatch: Vec<usize>,
    /// Firm units only.
    pub reserve: Option<Vec<usize>>,
    /// Candidates only.
    pub invest: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct StorageVars {
    pub charge: Vec<usize>,
    pub discharge: Vec<usize>,
    pub soc: Vec<usize>,
    pub reserve: Vec<usize>,
    /// SDES candidates only.
    pub invest: Option<usize>,
}

/// An LP together with the variable layout needed to read solutions back.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub lp: LinearProgram,
    pub mode: ModelMode,
    pub horizon: usize,
    /// Included generators, in spec order.
    pub generators: Vec<(String, GeneratorVars)>,
    pub storages: Vec<(String, StorageVars)>,
    pub shed: Vec<usize>,
    pub surplus: Vec<usize>,
    pub reserve_short: Vec<usize>,
}

pub fn build_baseline_lp(spec: &SystemSpec) -> Result<BuiltModel> {
    build(spec, ModelMode::baseline())
}

pub fn build_opportunity_lp(spec: &SystemSpec, mode: ModelMode) -> Result<BuiltModel> {
    if mode.mode != Mode::Opportunity {
        return Err(Error::Argument("mode must be opportunity".into()));
    }
    build(spec, mode)
}

fn build(spec: &SystemSpec, mode: ModelMode) -> Result<BuiltModel> {
    spec.validate()
        .map_err(|e| Error::State(format!("spec failed validation: {e}")))?;
    let horizon = spec.horizon_h;
    if horizon < 2 {
        return Err(Error::Argument(format!("horizon {horizon} < 2")));
    }
    let opportunity = mode.mode == Mode::Opportunity;
    let invest_open = opportunity;
    let prices = &spec.penalty_prices;
    let mut lp = LinearProgram::new(Direction::Minimize);
    let inf = f64::INFINITY;

    let mut generators = Vec::new();
    for g in &spec.generators {
        if opportunity && mode.retire_technologies.contains(&g.technology) {
            continue;
        }
        let candidate = g.kind == GeneratorKind::Candidate;
        let profile = spec.cf_profiles.get(&g.id);
        let mut dispatch = Vec::with_capacity(horizon);
        for t in 0..horizon {
            let upper = if candidate {
                inf // tied to the investment variable below
            } else {
                match profile {
                    Some(cf) => g.capacity_mw * cf[t],
                    None => g.capacity_mw,
                }
            };
            dispatch.push(lp.add_var(format!("p_{}_{t}", g.id), 0.0, upper, g.variable_cost)?);
        }
        let reserve = if g.is_intermittent() {
            None // IES does not provide reserve
        } else {
            let mut r = Vec::with_capacity(horizon);
            for t in 0..horizon {
                r.push(lp.add_var(
                    format!("r_{}_{t}", g.id),
                    0.0,
                    inf,
                    prices.reserve_provision_cost,
                )?);
            }
            Some(r)
        };
        let invest = if candidate {
            let upper = if invest_open { g.max_invest_mw } else { 0.0 };
            Some(lp.add_var(
                format!("x_{}", g.id),
                0.0,
                upper,
                g.invest_cost + g.fom_cost,
            )?)
        } else {
            lp.offset += g.fom_cost * g.capacity_mw;
            None
        };
        generators.push((g.id.clone(), GeneratorVars { dispatch, reserve, invest }));
    }

    let mut storages = Vec::new();
    for s in &spec.storages {
        let is_ldes = s.kind == StorageKind::Ldes;
        if is_ldes && (!opportunity || mode.x_power_mw <= 0.0) {
            continue;
        }
        let candidate = s.kind == StorageKind::SdesCandidate;
        let power_ub = if candidate {
            inf
        } else if is_ldes {
            mode.x_power_mw
        } else {
            s.power_mw
        };
        let energy_ub = if candidate { inf } else { s.duration_h * power_ub };
        let mut charge = Vec::with_capacity(horizon);
        let mut discharge = Vec::with_capacity(horizon);
        let mut soc = Vec::with_capacity(horizon);
        let mut reserve = Vec::with_capacity(horizon);
        for t in 0..horizon {
            charge.push(lp.add_var(format!("c_{}_{t}", s.id), 0.0, power_ub, 0.0)?);
            discharge.push(lp.add_var(format!("d_{}_{t}", s.id), 0.0, power_ub, 0.0)?);
            soc.push(lp.add_var(format!("soc_{}_{t}", s.id), 0.0, energy_ub, 0.0)?);
            reserve.push(lp.add_var(
                format!("rs_{}_{t}", s.id),
                0.0,
                inf,
                prices.reserve_provision_cost,
            )?);
        }
        let invest = if candidate {
            let upper = if invest_open { s.max_invest_mw } else { 0.0 };
            Some(lp.add_var(
                format!("x_{}", s.id),
                0.0,
                upper,
                s.invest_cost + s.fom_cost,
            )?)
        } else {
            if !is_ldes {
                lp.offset += s.fom_cost * s.power_mw;
            }
            None
        };
        storages.push((
            s.id.clone(),
            StorageVars { charge, discharge, soc, reserve, invest },
        ));
    }

    let mut shed = Vec::with_capacity(horizon);
    let mut surplus = Vec::with_capacity(horizon);
    let mut reserve_short = Vec::with_capacity(horizon);
    for t in 0..horizon {
        shed.push(lp.add_var(format!("shed_{t}"), 0.0, inf, prices.imbalance_shed)?);
        surplus.push(lp.add_var(format!("surplus_{t}"), 0.0, inf, prices.imbalance_surplus)?);
        reserve_short.push(lp.add_var(format!("rshort_{t}"), 0.0, inf, prices.reserve_shortage)?);
    }

    // Power balance and reserve requirement, per hour.
    for t in 0..horizon {
        let mut balance = Vec::new();
        let mut reserve_row = vec![(reserve_short[t], 1.0)];
        for (_, gv) in &generators {
            balance.push((gv.dispatch[t], 1.0));
            if let Some(r) = &gv.reserve {
                reserve_row.push((r[t], 1.0));
            }
        }
        for (_, sv) in &storages {
            balance.push((sv.discharge[t], 1.0));
            balance.push((sv.charge[t], -1.0));
            reserve_row.push((sv.reserve[t], 1.0));
        }
        balance.push((shed[t], 1.0));
        balance.push((surplus[t], -1.0));
        lp.add_constraint(format!("balance_{t}"), balance, Sense::Eq, spec.load[t])?;
        lp.add_constraint(
            format!("reserve_{t}"),
            reserve_row,
            Sense::Ge,
            spec.reserve_fraction * spec.load[t],
        )?;
    }

    // Generator headroom, investment coupling, and ramping.
    for (id, gv) in &generators {
        let g = spec.generators.iter().find(|g| &g.id == id).unwrap();
        let profile = spec.cf_profiles.get(id);
        for t in 0..horizon {
            match (&gv.reserve, gv.invest) {
                (Some(r), None) => {
                    // p + r <= cap
                    lp.add_constraint(
                        format!("headroom_{id}_{t}"),
                        vec![(gv.dispatch[t], 1.0), (r[t], 1.0)],
                        Sense::Le,
                        g.capacity_mw,
                    )?;
                }
                (Some(r), Some(x)) => {
                    lp.add_constraint(
                        format!("headroom_{id}_{t}"),
                        vec![(gv.dispatch[t], 1.0), (r[t], 1.0), (x, -1.0)],
                        Sense::Le,
                        0.0,
                    )?;
                }
                (None, Some(x)) => {
                    // Intermittent candidate: p <= cf * x
                    let cf = profile.map(|p| p[t]).unwrap_or(1.0);
                    lp.add_constraint(
                        format!("avail_{id}_{t}"),
                        vec![(gv.dispatch[t], 1.0), (x, -cf)],
                        Sense::Le,
                        0.0,
                    )?;
                }
                (None, None) => {} // intermittent existing: bound on p suffices
            }
        }
        // Hourly ramping for firm units. A full-range ramp rate needs no rows.
        if !g.is_intermittent() && g.ramp_rate < 1.0 {
            for t in 1..horizon {
                let step = gv.invest.map_or(g.ramp_rate * g.capacity_mw, |_| 0.0);
                let mut up = vec![(gv.dispatch[t], 1.0), (gv.dispatch[t - 1], -1.0)];
                let mut down = vec![(gv.dispatch[t], -1.0), (gv.dispatch[t - 1], 1.0)];
                if let Some(x) = gv.invest {
                    up.push((x, -g.ramp_rate));
                    down.push((x, -g.ramp_rate));
                }
                lp.add_constraint(format!("rampup_{id}_{t}"), up, Sense::Le, step)?;
                lp.add_constraint(format!("rampdn_{id}_{t}"), down, Sense::Le, step)?;
            }
        }
    }

    // Storage dynamics: cyclic SoC recursion, power/energy coupling for
    // candidates, reserve headroom bounded by power and by stored energy.
    for (id, sv) in &storages {
        let s = spec.storages.iter().find(|s| &s.id == id).unwrap();
        let eta = s.rte.sqrt(); // charge and discharge efficiency each sqrt(rte)
        for t in 0..horizon {
            let prev = if t == 0 { horizon - 1 } else { t - 1 };
            lp.add_constraint(
                format!("soc_{id}_{t}"),
                vec![
                    (sv.soc[t], 1.0),
                    (sv.soc[prev], -1.0),
                    (sv.charge[t], -eta),
                    (sv.discharge[t], 1.0 / eta),
                ],
                Sense::Eq,
                0.0,
            )?;
            // Reserve is spare discharge capability: limited by power rating
            // and by the energy available at the start of the hour.
            let power_cap: Vec<(usize, f64)> = match sv.invest {
                Some(x) => vec![(sv.reserve[t], 1.0), (sv.discharge[t], 1.0), (x, -1.0)],
                None => vec![(sv.reserve[t], 1.0), (sv.discharge[t], 1.0)],
            };
            let power_rhs = match sv.invest {
                Some(_) => 0.0,
                None => {
                    if s.kind == StorageKind::Ldes {
                        mode.x_power_mw
                    } else {
                        s.power_mw
                    }
                }
            };
            lp.add_constraint(format!("rspow_{id}_{t}"), power_cap, Sense::Le, power_rhs)?;
            lp.add_constraint(
                format!("rsen_{id}_{t}"),
                vec![
                    (sv.reserve[t], 1.0),
                    (sv.discharge[t], 1.0),
                    (sv.soc[prev], -eta),
                ],
                Sense::Le,
                0.0,
            )?;
            if let Some(x) = sv.invest {
                lp.add_constraint(
                    format!("cpow_{id}_{t}"),
                    vec![(sv.charge[t], 1.0), (x, -1.0)],
                    Sense::Le,
                    0.0,
                )?;
                lp.add_constraint(
                    format!("den_{id}_{t}"),
                    vec![(sv.soc[t], 1.0), (x, -s.duration_h)],
                    Sense::Le,
                    0.0,
                )?;
            }
        }
    }

    Ok(BuiltModel {
        lp,
        mode,
        horizon,
        generators,
        storages,
        shed,
        surplus,
        reserve_short,
    })
}

/// Hourly primal decisions of a solved model.
#[derive(Debug, Clone, Serialize)]
pub struct DispatchSolution {
    pub generation: BTreeMap<String, Vec<f64>>,
    pub charge: BTreeMap<String, Vec<f64>>,
    pub discharge: BTreeMap<String, Vec<f64>>,
    pub soc: BTreeMap<String, Vec<f64>>,
    pub shed: Vec<f64>,
    pub surplus: Vec<f64>,
    pub reserve_shortage: Vec<f64>,
    /// Investment level per candidate asset, MW.
    pub investments: BTreeMap<String, f64>,
    /// Diagnostic: hours where a storage both charges and discharges.
    pub simultaneous_charge_discharge_hours: usize,
}

impl BuiltModel {
    pub fn extract_dispatch(&self, primal: &[f64]) -> DispatchSolution {
        let series = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| primal[i]).collect() };
        let mut generation = BTreeMap::new();
        let mut investments = BTreeMap::new();
        for (id, gv) in &self.generators {
            generation.insert(id.clone(), series(&gv.dispatch));
            if let Some(x) = gv.invest {
                investments.insert(id.clone(), primal[x]);
            }
        }
        let mut charge = BTreeMap::new();
        let mut discharge = BTreeMap::new();
        let mut soc = BTreeMap::new();
        let mut simultaneous = 0;
        for (id, sv) in &self.storages {
            let c = series(&sv.charge);
            let d = series(&sv.discharge);
            simultaneous += c
                .iter()
                .zip(&d)
                .filter(|(&ci, &di)| ci > 1e-6 && di > 1e-6)
                .count();
            charge.insert(id.clone(), c);
            discharge.insert(id.clone(), d);
            soc.insert(id.clone(), series(&sv.soc));
            if let Some(x) = sv.invest {
                investments.insert(id.clone(), primal[x]);
            }
        }
        DispatchSolution {
            generation,
            charge,
            discharge,
            soc,
            shed: series(&self.shed),
            surplus: series(&self.surplus),
            reserve_shortage: series(&self.reserve_short),
            investments,
            simultaneous_charge_discharge_hours: simultaneous,
        }
    }
}

/// Per-term cost decomposition of a feasible primal point.
pub fn breakdown(
    model: &BuiltModel,
    spec: &SystemSpec,
    primal: &[f64],
) -> Result<ObjectiveBreakdown> {
    let report = verify(&model.lp, primal)?;
    if report.max() > 1e-5 {
        return Err(Error::Consistency(format!(
            "primal infeasible: max residual {:.3e}",
            report.max()
        )));
    }
    let prices = &spec.penalty_prices;
    let mut b = ObjectiveBreakdown::default();
    for (id, gv) in &model.generators {
        let g = spec.generators.iter().find(|g| &g.id == id).unwrap();
        b.ope_gen += g.variable_cost * gv.dispatch.iter().map(|&i| primal[i]).sum::<f64>();
        if let Some(r) = &gv.reserve {
            b.ies_gen += prices.reserve_provision_cost * r.iter().map(|&i| primal[i]).sum::<f64>();
        }
        match gv.invest {
            Some(x) => {
                b.inv_gen += g.invest_cost * primal[x];
                b.fom_gen += g.fom_cost * primal[x];
            }
            None => b.fom_gen += g.fom_cost * g.capacity_mw,
        }
    }
    for (id, sv) in &model.storages {
        let s = spec.storages.iter().find(|s| &s.id == id).unwrap();
        b.ies_gen +=
            prices.reserve_provision_cost * sv.reserve.iter().map(|&i| primal[i]).sum::<f64>();
        match sv.invest {
            Some(x) => {
                b.inv_st_short += s.invest_cost * primal[x];
                b.fom_st_short += s.fom_cost * primal[x];
            }
            None => {
                if s.kind != StorageKind::Ldes {
                    b.fom_st_short += s.fom_cost * s.power_mw;
                }
            }
        }
    }
    b.imbalance = prices.imbalance_shed * model.shed.iter().map(|&i| primal[i]).sum::<f64>()
        + prices.imbalance_surplus * model.surplus.iter().map(|&i| primal[i]).sum::<f64>();
    b.ies_shortage =
        prices.reserve_shortage * model.reserve_short.iter().map(|&i| primal[i]).sum::<f64>();
    b.total = b.cost_total();

    let objective = model.lp.objective_value(primal);
    let scale = 1.0f64.max(objective.abs());
    if (b.total - objective).abs() / scale > 1e-6 {
        return Err(Error::Consistency(format!(
            "breakdown total {} disagrees with objective {}",
            b.total, objective
        )));
    }
    Ok(b)
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use crate::ingest::{GeneratorAsset, PenaltyPrices, Season, StorageAsset, TimeSeries};
    use std::collections::BTreeMap;

    pub(crate) fn gas(cap: f64, cost: f64, fom_total: f64) -> GeneratorAsset {
        GeneratorAsset {
            id: "gas1".into(),
            balancing_area: "ba1".into(),
            technology: Technology::Gas,
            capacity_mw: cap,
            variable_cost: cost,
            fom_cost: fom_total / cap,
            ramp_rate: 1.0,
            kind: GeneratorKind::Existing,
            max_invest_mw: 0.0,
            invest_cost: 0.0,
        }
    }

    pub(crate) fn toy_spec() -> SystemSpec {
        SystemSpec {
            state: "XX".into(),
            horizon_h: 2,
            load: TimeSeries(vec![1.0, 1.0]),
            generators: vec![gas(1.0, 50.0, 10.0)],
            storages: vec![],
            cf_profiles: BTreeMap::new(),
            reserve_fraction: 0.0,
            penalty_prices: PenaltyPrices::default(),
            season_calendar: vec![Season::Winter; 2],
            candidates_built: false,
        }
    }

    /// Toy with a solar candidate and an LDES, used by the opportunity tests.
    pub(crate) fn toy_spec_full() -> SystemSpec {
        let mut spec = toy_spec();
        spec.generators.push(GeneratorAsset {
            id: "solar-cand".into(),
            balancing_area: "ba1".into(),
            technology: Technology::Solar,
            capacity_mw: 0.0,
            variable_cost: 0.0,
            fom_cost: 0.0,
            ramp_rate: 1.0,
            kind: GeneratorKind::Candidate,
            max_invest_mw: 1000.0,
            invest_cost: 30.0, // $/MW-yr
        });
        spec.cf_profiles
            .insert("solar-cand".into(), TimeSeries(vec![1.0, 0.0]));
        spec.storages.push(StorageAsset {
            id: "ldes".into(),
            state: "XX".into(),
            kind: StorageKind::Ldes,
            duration_h: 100.0,
            power_mw: 0.0,
            max_invest_mw: 0.0,
            rte: 1.0,
            fom_cost: 0.0,
            invest_cost: 0.0,
        });
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::tests_support::{toy_spec, toy_spec_full};
    use super::*;
    use crate::ingest::{Season, StorageAsset, TimeSeries};
    use crate::solve::{backend_by_name, solve_optimal};

    #[test]
    fn baseline_variable_count_by_hand() {
        // One firm generator, one storage, T = 2.
        // Per hour: p, r | c, d, soc, rs | shed, surplus, rshort = 9 vars,
        // and no candidates means no investment variables: 18 total.
        let mut spec = toy_spec();
        spec.storages.push(StorageAsset {
            id: "batt".into(),
            state: "XX".into(),
            kind: StorageKind::SdesExisting,
            duration_h: 4.0,
            power_mw: 1.0,
            max_invest_mw: 0.0,
            rte: 0.85,
            fom_cost: 0.0,
            invest_cost: 0.0,
        });
        let model = build_baseline_lp(&spec).unwrap();
        assert_eq!(model.lp.num_vars(), 18);
    }

    #[test]
    fn baseline_toy_costs_110() {
        let model = build_baseline_lp(&toy_spec()).unwrap();
        let backend = backend_by_name("microlp").unwrap();
        let result = solve_optimal(&model.lp, backend.as_ref()).unwrap();
        assert!((result.objective - 110.0).abs() < 1e-6);
        let b = breakdown(&model, &toy_spec(), &result.primal).unwrap();
        assert!((b.ope_gen - 100.0).abs() < 1e-6);
        assert!((b.fom_gen - 10.0).abs() < 1e-6);
        assert!((b.total - 110.0).abs() < 1e-6);
        assert_eq!(b.inv_gen, 0.0);
        assert_eq!(b.imbalance, 0.0);
    }

    #[test]
    fn baseline_investments_fixed_to_zero() {
        let spec = toy_spec_full();
        let model = build_baseline_lp(&spec).unwrap();
        let x = model.lp.var_index("x_solar-cand").unwrap();
        assert_eq!(model.lp.variables[x].upper, 0.0);
        let backend = backend_by_name("microlp").unwrap();
        let result = solve_optimal(&model.lp, backend.as_ref()).unwrap();
        let dispatch = model.extract_dispatch(&result.primal);
        assert!(!dispatch.investments.is_empty());
        for v in dispatch.investments.values() {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn opportunity_toy_replacement_costs_60() {
        let spec = toy_spec_full();
        let mode = ModelMode::opportunity(1.0, 110.0).unwrap();
        let model = build_opportunity_lp(&spec, mode).unwrap();
        // Gas is retired.
        assert!(model.lp.var_index("p_gas1_0").is_none());
        let backend = backend_by_name("microlp").unwrap();
        let result = solve_optimal(&model.lp, backend.as_ref()).unwrap();
        assert!(
            (result.objective - 60.0).abs() < 1e-6,
            "objective {}",
            result.objective
        );
        let dispatch = model.extract_dispatch(&result.primal);
        assert!((dispatch.investments["solar-cand"] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn zero_load_costs_fleet_fom_only() {
        let mut spec = toy_spec();
        spec.load = TimeSeries(vec![0.0, 0.0]);
        let model = build_baseline_lp(&spec).unwrap();
        let backend = backend_by_name("microlp").unwrap();
        let result = solve_optimal(&model.lp, backend.as_ref()).unwrap();
        assert!((result.objective - 10.0).abs() < 1e-9);
    }

    #[test]
    fn horizon_below_two_rejected() {
        let mut spec = toy_spec();
        spec.horizon_h = 1;
        spec.load = TimeSeries(vec![1.0]);
        spec.season_calendar = vec![Season::Winter];
        assert!(matches!(
            build_baseline_lp(&spec),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn opportunity_requires_positive_capacity() {
        assert!(ModelMode::opportunity(0.0, 1.0).is_err());
        assert!(ModelMode::opportunity(1.0, f64::NAN).is_err());
    }

    #[test]
    fn breakdown_rejects_infeasible_primal() {
        let spec = toy_spec();
        let model = build_baseline_lp(&spec).unwrap();
        let zeros = vec![0.0; model.lp.num_vars()];
        assert!(matches!(
            breakdown(&model, &spec, &zeros),
            Err(Error::Consistency(_))
        ));
    }
}

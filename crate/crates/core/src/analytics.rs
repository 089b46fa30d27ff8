//! Explanatory metrics, seasonal analyses, threshold classification, and the
//! national roll-up, all as plot-ready data (no chart rendering here).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulate::{DispatchSolution, ObjectiveBreakdown};
use crate::ingest::{GeneratorKind, Season, StorageKind, SystemSpec, TimeSeries};
use crate::sweep::{max_viability, BaselineResult, ViabilityCurve, ViabilityPoint};

#[derive(Debug, Clone, Serialize)]
pub struct StateMetrics {
    pub state: String,
    /// Fraction of annual demand served by gas+coal; none when demand is 0.
    pub thermal_participation: Option<f64>,
    /// Thermal energy over thermal capacity x horizon; none without thermal.
    pub thermal_utilization: Option<f64>,
    /// Capacity-weighted hourly mean CF over existing IES; none without IES.
    pub avg_ies_cf: Option<f64>,
    /// Existing thermal FO&M as a fraction of total baseline cost.
    pub thermal_fom_share: Option<f64>,
    /// Shares of baseline IES generation; none when IES generation is 0.
    pub solar_share: Option<f64>,
    pub wind_share: Option<f64>,
    /// Viability-maximizing LDES power over baseline thermal capacity.
    pub alpha: Option<f64>,
    /// Per-season LDES SoC swing at the viability-maximizing capacity,
    /// normalized by the SoC capacity; none when that capacity is 0.
    pub seasonal_soc_diff: Option<BTreeMap<Season, f64>>,
    pub seasonal_ies_availability: BTreeMap<Season, SeasonalIes>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeasonalIes {
    /// Capacity-weighted mean CF over the season's hours.
    pub avg_cf: f64,
    /// Potential IES energy over the season's demand.
    pub rel_availability: f64,
}

pub fn compute_state_metrics(
    spec: &SystemSpec,
    baseline: &BaselineResult,
    sweep: &ViabilityCurve,
) -> StateMetrics {
    let horizon = spec.horizon_h;
    let total_load: f64 = spec.load.0.iter().sum();

    let mut thermal_energy = 0.0;
    let mut solar_gen = 0.0;
    let mut wind_gen = 0.0;
    let mut ies_gen = 0.0;
    let mut thermal_fom = 0.0;
    for g in &spec.generators {
        if g.kind != GeneratorKind::Existing {
            continue;
        }
        let energy: f64 = baseline
            .dispatch
            .generation
            .get(&g.id)
            .map(|series| series.iter().sum())
            .unwrap_or(0.0);
        if g.technology.is_thermal() {
            thermal_energy += energy;
            thermal_fom += g.fom_cost * g.capacity_mw;
        }
        if g.is_intermittent() {
            ies_gen += energy;
            match g.technology.key_name() {
                "solar" => solar_gen += energy,
                _ => wind_gen += energy,
            }
        }
    }

    let thermal_cap = baseline.thermal_capacity_mw;
    let thermal_participation = (total_load > 0.0).then(|| thermal_energy / total_load);
    let thermal_utilization =
        (thermal_cap > 0.0).then(|| thermal_energy / (thermal_cap * horizon as f64));
    let thermal_fom_share = (baseline.q_star != 0.0).then(|| thermal_fom / baseline.q_star);

    let (mut cap_sum, mut weighted_cf) = (0.0, 0.0);
    for g in &spec.generators {
        if g.kind == GeneratorKind::Existing && g.is_intermittent() {
            let mean_cf = spec.cf_profiles[&g.id].mean();
            cap_sum += g.capacity_mw;
            weighted_cf += g.capacity_mw * mean_cf;
        }
    }
    let avg_ies_cf = (cap_sum > 0.0).then(|| weighted_cf / cap_sum);

    let (solar_share, wind_share) = if ies_gen > 0.0 {
        (Some(solar_gen / ies_gen), Some(wind_gen / ies_gen))
    } else {
        (None, None)
    };

    let max = max_viability(sweep);
    let alpha = crate::sweep::alpha_ratio(max.x_at_max_mw, thermal_cap);

    let seasonal_soc_diff = spec.ldes().and_then(|ldes| {
        let chosen = sweep
            .points
            .iter()
            .find(|p| p.x_power_mw == max.x_at_max_mw)?;
        let soc = chosen.dispatch.soc.get(&ldes.id)?;
        seasonal_soc_diff(
            &TimeSeries(soc.clone()),
            ldes.duration_h * max.x_at_max_mw,
            &spec.season_calendar,
        )
    });

    StateMetrics {
        state: spec.state.clone(),
        thermal_participation,
        thermal_utilization,
        avg_ies_cf,
        thermal_fom_share,
        solar_share,
        wind_share,
        alpha,
        seasonal_soc_diff,
        seasonal_ies_availability: seasonal_ies_availability(spec),
    }
}

/// Contiguous hour range of a season within the calendar; winter wraps across
/// the year boundary. Returns (first hour, last hour) inclusive.
fn season_range(calendar: &[Season], season: Season) -> Option<(usize, usize)> {
    let h = calendar.len();
    let hours: Vec<usize> = (0..h).filter(|&t| calendar[t] == season).collect();
    if hours.is_empty() {
        return None;
    }
    if hours.len() == h {
        return Some((0, h - 1));
    }
    // The range may wrap: the first hour is the one whose predecessor lies in
    // a different season.
    let first = hours
        .iter()
        .copied()
        .find(|&t| calendar[(t + h - 1) % h] != season)?;
    let last = hours
        .iter()
        .copied()
        .find(|&t| calendar[(t + 1) % h] != season)?;
    Some((first, last))
}

/// Per-season SoC swing normalized by the SoC capacity. `soc[t]` is the
/// end-of-hour-t state of charge, so a season spanning hours [a, b] swings
/// from soc[a-1] (cyclically) to soc[b].
pub fn seasonal_soc_diff(
    soc: &TimeSeries,
    energy_cap_mwh: f64,
    calendar: &[Season],
) -> Option<BTreeMap<Season, f64>> {
    if energy_cap_mwh <= 0.0 || soc.len() != calendar.len() {
        return None;
    }
    let h = calendar.len();
    let mut out = BTreeMap::new();
    for season in Season::ALL {
        if let Some((first, last)) = season_range(calendar, season) {
            let start = soc.0[(first + h - 1) % h];
            out.insert(season, (soc.0[last] - start) / energy_cap_mwh);
        }
    }
    Some(out)
}

/// Capacity-weighted CF and availability relative to demand, by season, over
/// existing IES assets. Empty map when the state has no existing IES.
pub fn seasonal_ies_availability(spec: &SystemSpec) -> BTreeMap<Season, SeasonalIes> {
    let ies: Vec<_> = spec
        .generators
        .iter()
        .filter(|g| g.kind == GeneratorKind::Existing && g.is_intermittent())
        .collect();
    let cap_total: f64 = ies.iter().map(|g| g.capacity_mw).sum();
    if ies.is_empty() || cap_total <= 0.0 {
        return BTreeMap::new();
    }
    let mut out = BTreeMap::new();
    for season in Season::ALL {
        let hours: Vec<usize> = (0..spec.horizon_h)
            .filter(|&t| spec.season_calendar[t] == season)
            .collect();
        if hours.is_empty() {
            continue;
        }
        let mut energy = 0.0;
        let mut weighted_cf = 0.0;
        for g in &ies {
            let cf = &spec.cf_profiles[&g.id];
            let cf_sum: f64 = hours.iter().map(|&t| cf.0[t]).sum();
            energy += g.capacity_mw * cf_sum;
            weighted_cf += g.capacity_mw * cf_sum / hours.len() as f64;
        }
        let demand: f64 = hours.iter().map(|&t| spec.load.0[t]).sum();
        out.insert(
            season,
            SeasonalIes {
                avg_cf: weighted_cf / cap_total,
                rel_availability: if demand > 0.0 { energy / demand } else { 0.0 },
            },
        );
    }
    out
}

/// States whose maximum viability cost meets the threshold, sorted descending
/// by value (ties by name).
pub fn classify_threshold(results: &BTreeMap<String, f64>, threshold: f64) -> Vec<String> {
    let mut hits: Vec<(&String, f64)> = results
        .iter()
        .filter(|(_, &v)| v >= threshold)
        .map(|(k, &v)| (k, v))
        .collect();
    hits.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    hits.into_iter().map(|(k, _)| k.clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_start: f64,
    pub count: usize,
}

/// Half-open bins [start, start + width). Only positive values are binned;
/// non-positive entries are dropped, matching how viability histograms show
/// viable states only.
pub fn histogram(values: &[f64], bin_width: f64, origin: f64) -> Vec<HistogramBin> {
    assert!(bin_width > 0.0, "bin width must be positive");
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &v in values {
        if v <= 0.0 {
            continue;
        }
        let idx = ((v - origin) / bin_width).floor() as i64;
        *counts.entry(idx).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(idx, count)| HistogramBin {
            bin_start: origin + idx as f64 * bin_width,
            count,
        })
        .collect()
}

/// Per-state inputs to the national roll-up: the baseline solution, the
/// viability-maximizing opportunity point, and (optionally) the matching
/// no-LDES replacement solve.
pub struct StateRollupInput<'a> {
    pub spec: &'a SystemSpec,
    pub baseline: &'a BaselineResult,
    pub chosen: &'a ViabilityPoint,
    pub without_ldes: Option<(&'a ObjectiveBreakdown, &'a DispatchSolution)>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ScenarioTotals {
    pub capacity_mw_by_technology: BTreeMap<String, f64>,
    pub cost_by_term: ObjectiveBreakdown,
}

#[derive(Debug, Clone, Serialize)]
pub struct RollupRecord {
    pub states_included: Vec<String>,
    /// States dropped because their maximum viability cost is negative.
    pub states_excluded: Vec<String>,
    pub baseline: ScenarioTotals,
    pub opportunity_with_ldes: ScenarioTotals,
    /// Present only when every included state supplies a no-LDES solve.
    pub opportunity_without_ldes: Option<ScenarioTotals>,
    pub retired_thermal_mw: f64,
    /// New capacity replacing the retired gas+coal fleet, by technology.
    pub net_new_capacity_mw_by_technology: BTreeMap<String, f64>,
}

fn add_breakdown(acc: &mut ObjectiveBreakdown, b: &ObjectiveBreakdown) {
    acc.inv_gen += b.inv_gen;
    acc.inv_st_short += b.inv_st_short;
    acc.ope_gen += b.ope_gen;
    acc.ies_gen += b.ies_gen;
    acc.imbalance += b.imbalance;
    acc.ies_shortage += b.ies_shortage;
    acc.fom_gen += b.fom_gen;
    acc.fom_st_short += b.fom_st_short;
    acc.ldes_term += b.ldes_term;
    acc.q_over += b.q_over;
    acc.total += b.total;
}

fn add_capacity(map: &mut BTreeMap<String, f64>, key: &str, mw: f64) {
    if mw != 0.0 {
        *map.entry(key.to_string()).or_insert(0.0) += mw;
    }
}

fn storage_key(kind: StorageKind) -> &'static str {
    match kind {
        StorageKind::SdesExisting | StorageKind::SdesCandidate => "sdes",
        StorageKind::Phs => "phs",
        StorageKind::Ldes => "ldes",
    }
}

fn investment_capacities(spec: &SystemSpec, dispatch: &DispatchSolution) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for (id, &mw) in &dispatch.investments {
        if let Some(g) = spec.generators.iter().find(|g| &g.id == id) {
            add_capacity(&mut out, g.technology.key_name(), mw);
        } else if let Some(s) = spec.storages.iter().find(|s| &s.id == id) {
            add_capacity(&mut out, storage_key(s.kind), mw);
        }
    }
    out
}

pub fn national_rollup(inputs: &[StateRollupInput]) -> Result<RollupRecord> {
    if let Some(first) = inputs.first() {
        for input in inputs {
            if input.spec.horizon_h != first.spec.horizon_h {
                return Err(Error::Validation(format!(
                    "inconsistent horizons across states: {} vs {}",
                    first.spec.horizon_h, input.spec.horizon_h
                )));
            }
        }
    }

    let mut record = RollupRecord {
        states_included: Vec::new(),
        states_excluded: Vec::new(),
        baseline: ScenarioTotals::default(),
        opportunity_with_ldes: ScenarioTotals::default(),
        opportunity_without_ldes: Some(ScenarioTotals::default()),
        retired_thermal_mw: 0.0,
        net_new_capacity_mw_by_technology: BTreeMap::new(),
    };
    let mut have_no_ldes = true;

    for input in inputs {
        if input.chosen.c_vc_per_kw < 0.0 {
            record.states_excluded.push(input.spec.state.clone());
            continue;
        }
        record.states_included.push(input.spec.state.clone());
        let spec = input.spec;

        for g in &spec.generators {
            if g.kind != GeneratorKind::Existing {
                continue;
            }
            let key = g.technology.key_name();
            add_capacity(&mut record.baseline.capacity_mw_by_technology, key, g.capacity_mw);
            if !g.technology.is_thermal() {
                add_capacity(
                    &mut record.opportunity_with_ldes.capacity_mw_by_technology,
                    key,
                    g.capacity_mw,
                );
            }
        }
        for s in &spec.storages {
            if matches!(s.kind, StorageKind::SdesExisting | StorageKind::Phs) {
                let key = storage_key(s.kind);
                add_capacity(&mut record.baseline.capacity_mw_by_technology, key, s.power_mw);
                add_capacity(
                    &mut record.opportunity_with_ldes.capacity_mw_by_technology,
                    key,
                    s.power_mw,
                );
            }
        }
        add_breakdown(&mut record.baseline.cost_by_term, &input.baseline.breakdown);

        let invested = investment_capacities(spec, &input.chosen.dispatch);
        for (key, mw) in &invested {
            add_capacity(&mut record.opportunity_with_ldes.capacity_mw_by_technology, key, *mw);
            add_capacity(&mut record.net_new_capacity_mw_by_technology, key, *mw);
        }
        add_capacity(
            &mut record.opportunity_with_ldes.capacity_mw_by_technology,
            "ldes",
            input.chosen.x_power_mw,
        );
        add_capacity(
            &mut record.net_new_capacity_mw_by_technology,
            "ldes",
            input.chosen.x_power_mw,
        );
        add_breakdown(
            &mut record.opportunity_with_ldes.cost_by_term,
            &input.chosen.breakdown,
        );
        record.retired_thermal_mw += input.baseline.thermal_capacity_mw;

        match (&mut record.opportunity_without_ldes, input.without_ldes) {
            (Some(totals), Some((breakdown, dispatch))) => {
                for g in &spec.generators {
                    if g.kind == GeneratorKind::Existing && !g.technology.is_thermal() {
                        add_capacity(
                            &mut totals.capacity_mw_by_technology,
                            g.technology.key_name(),
                            g.capacity_mw,
                        );
                    }
                }
                for s in &spec.storages {
                    if matches!(s.kind, StorageKind::SdesExisting | StorageKind::Phs) {
                        add_capacity(
                            &mut totals.capacity_mw_by_technology,
                            storage_key(s.kind),
                            s.power_mw,
                        );
                    }
                }
                for (key, mw) in investment_capacities(spec, dispatch) {
                    add_capacity(&mut totals.capacity_mw_by_technology, &key, mw);
                }
                add_breakdown(&mut totals.cost_by_term, breakdown);
            }
            _ => have_no_ldes = false,
        }
    }

    if !have_no_ldes {
        record.opportunity_without_ldes = None;
    }
    Ok(record)
}

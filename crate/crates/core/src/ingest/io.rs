//! CSV and config-file ingestion for one state directory, plus the inverse
//! writer used for round-trip checks and fixture generation.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{
    default_season_calendar, CandidateRules, GeneratorAsset, GeneratorKind, PenaltyPrices,
    StorageAsset, StorageKind, SystemSpec, Technology, TimeSeries,
};

/// Season start hours on a reference horizon; winter wraps the year boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeasonBoundaries {
    pub reference_horizon: usize,
    pub spring_start: usize,
    pub summer_start: usize,
    pub fall_start: usize,
    pub winter_start: usize,
}

impl Default for SeasonBoundaries {
    fn default() -> Self {
        // Dec-Feb / Mar-May / Jun-Aug / Sep-Nov on 8760 hours.
        Self {
            reference_horizon: 8760,
            spring_start: 1416,
            summer_start: 3624,
            fall_start: 5832,
            winter_start: 8016,
        }
    }
}

/// Run-level configuration read from `config.toml` in the input directory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// State label; defaults to the value found in the input tables.
    pub state: Option<String>,
    pub reserve_fraction: Option<f64>,
    /// Clusters per balancing area for firm existing units; off when absent.
    pub cluster_k: Option<usize>,
    pub penalties: PenaltyPricesConfig,
    pub candidates: CandidateRules,
    pub seasons: SeasonBoundaries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltyPricesConfig {
    pub shed: f64,
    pub surplus: f64,
    pub reserve_shortage: f64,
    pub reserve_provision: f64,
}

impl Default for PenaltyPricesConfig {
    fn default() -> Self {
        let p = PenaltyPrices::default();
        Self {
            shed: p.imbalance_shed,
            surplus: p.imbalance_surplus,
            reserve_shortage: p.reserve_shortage,
            reserve_provision: p.reserve_provision_cost,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Reads `config.toml` from `dir` when present, defaults otherwise.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let path = dir.join("config.toml");
        if path.exists() {
            Self::from_file(&path)
        } else {
            Ok(Self::default())
        }
    }

    pub fn penalty_prices(&self) -> PenaltyPrices {
        PenaltyPrices {
            imbalance_shed: self.penalties.shed,
            imbalance_surplus: self.penalties.surplus,
            reserve_shortage: self.penalties.reserve_shortage,
            reserve_provision_cost: self.penalties.reserve_provision,
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct LoadRow {
    hour: usize,
    load_mw: f64,
}

#[derive(Debug, Deserialize, Serialize)]
struct GeneratorRow {
    id: String,
    ba: String,
    state: String,
    technology: Technology,
    capacity_mw: f64,
    variable_cost_per_mwh: f64,
    fuel_price: f64,
    heat_rate: f64,
    fom_per_kw_yr: f64,
    ramp_frac_per_h: f64,
    kind: GeneratorKind,
    max_invest_mw: f64,
    invest_cost_per_kw_yr: f64,
}

#[derive(Debug, Deserialize, Serialize)]
struct StorageRow {
    id: String,
    state: String,
    kind: StorageKind,
    duration_h: f64,
    power_mw: f64,
    max_invest_mw: f64,
    rte: f64,
    fom_per_kw_yr: f64,
    invest_cost_per_kw_yr: f64,
}

#[derive(Debug, Deserialize, Serialize)]
struct ProfileRow {
    asset_id: String,
    hour: usize,
    cf: f64,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::Reader::from_reader(file);
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row.map_err(|source| Error::Csv {
            path: path.display().to_string(),
            source,
        })?);
    }
    Ok(rows)
}

const KW_PER_MW: f64 = 1000.0;

/// Loads `load.csv`, `generators.csv`, `storages.csv`, and `profiles.csv`
/// from `input_dir`, normalizes units ($/kW-yr to $/MW-yr, fuel price and
/// heat rate folded into the variable cost), and validates the result.
pub fn load_system(input_dir: &Path, config: &RunConfig) -> Result<SystemSpec> {
    let mut load_rows: Vec<LoadRow> = read_rows(&input_dir.join("load.csv"))?;
    load_rows.sort_by_key(|r| r.hour);
    for (t, row) in load_rows.iter().enumerate() {
        if row.hour != t {
            return Err(Error::Validation(format!(
                "load.csv: expected hour {t}, found {}",
                row.hour
            )));
        }
    }
    let load = TimeSeries(load_rows.iter().map(|r| r.load_mw).collect());
    let horizon = load.len();

    let gen_rows: Vec<GeneratorRow> = read_rows(&input_dir.join("generators.csv"))?;
    let storage_rows: Vec<StorageRow> = read_rows(&input_dir.join("storages.csv"))?;
    let profile_rows: Vec<ProfileRow> = read_rows(&input_dir.join("profiles.csv"))?;

    let state = config
        .state
        .clone()
        .or_else(|| gen_rows.first().map(|r| r.state.clone()))
        .or_else(|| storage_rows.first().map(|r| r.state.clone()))
        .ok_or_else(|| Error::Validation("cannot determine state: no assets and no config key".into()))?;

    let generators = gen_rows
        .into_iter()
        .map(|r| GeneratorAsset {
            id: r.id,
            balancing_area: r.ba,
            technology: r.technology,
            capacity_mw: r.capacity_mw,
            variable_cost: r.variable_cost_per_mwh + r.fuel_price * r.heat_rate,
            fom_cost: r.fom_per_kw_yr * KW_PER_MW,
            ramp_rate: r.ramp_frac_per_h,
            kind: r.kind,
            max_invest_mw: r.max_invest_mw,
            invest_cost: r.invest_cost_per_kw_yr * KW_PER_MW,
        })
        .collect();

    let storages = storage_rows
        .into_iter()
        .map(|r| StorageAsset {
            id: r.id,
            state: r.state,
            kind: r.kind,
            duration_h: r.duration_h,
            power_mw: r.power_mw,
            max_invest_mw: r.max_invest_mw,
            rte: r.rte,
            fom_cost: r.fom_per_kw_yr * KW_PER_MW,
            invest_cost: r.invest_cost_per_kw_yr * KW_PER_MW,
        })
        .collect();

    let mut cf_profiles: BTreeMap<String, TimeSeries> = BTreeMap::new();
    for (row_no, row) in profile_rows.into_iter().enumerate() {
        if !(0.0..=1.0).contains(&row.cf) {
            return Err(Error::Validation(format!(
                "profiles.csv row {}: cf {} outside [0, 1]",
                row_no + 2, // 1-based, after the header
                row.cf
            )));
        }
        let series = cf_profiles
            .entry(row.asset_id.clone())
            .or_insert_with(|| TimeSeries(Vec::new()));
        if row.hour != series.len() {
            return Err(Error::Validation(format!(
                "profiles.csv row {}: asset {} expected hour {}, found {}",
                row_no + 2,
                row.asset_id,
                series.len(),
                row.hour
            )));
        }
        series.0.push(row.cf);
    }

    let spec = SystemSpec {
        state,
        horizon_h: horizon,
        load,
        generators,
        storages,
        cf_profiles,
        reserve_fraction: config.reserve_fraction.unwrap_or(0.04),
        penalty_prices: config.penalty_prices(),
        season_calendar: default_season_calendar(horizon, &config.seasons),
        candidates_built: false,
    };
    spec.validate()?;
    Ok(spec)
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut writer = csv::Writer::from_writer(file);
    for row in rows {
        writer.serialize(row).map_err(|source| Error::Csv {
            path: path.display().to_string(),
            source,
        })?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes a spec back out in the external CSV schema. Fuel price and heat
/// rate are emitted as zero since they are folded into the variable cost at
/// load time.
pub fn save_system(spec: &SystemSpec, dir: &Path) -> Result<()> {
    let load_rows: Vec<LoadRow> = spec
        .load
        .0
        .iter()
        .enumerate()
        .map(|(hour, &load_mw)| LoadRow { hour, load_mw })
        .collect();
    write_rows(&dir.join("load.csv"), &load_rows)?;

    let gen_rows: Vec<GeneratorRow> = spec
        .generators
        .iter()
        .map(|g| GeneratorRow {
            id: g.id.clone(),
            ba: g.balancing_area.clone(),
            state: spec.state.clone(),
            technology: g.technology,
            capacity_mw: g.capacity_mw,
            variable_cost_per_mwh: g.variable_cost,
            fuel_price: 0.0,
            heat_rate: 0.0,
            fom_per_kw_yr: g.fom_cost / KW_PER_MW,
            ramp_frac_per_h: g.ramp_rate,
            kind: g.kind,
            max_invest_mw: g.max_invest_mw,
            invest_cost_per_kw_yr: g.invest_cost / KW_PER_MW,
        })
        .collect();
    write_rows(&dir.join("generators.csv"), &gen_rows)?;

    let storage_rows: Vec<StorageRow> = spec
        .storages
        .iter()
        .map(|s| StorageRow {
            id: s.id.clone(),
            state: s.state.clone(),
            kind: s.kind,
            duration_h: s.duration_h,
            power_mw: s.power_mw,
            max_invest_mw: s.max_invest_mw,
            rte: s.rte,
            fom_per_kw_yr: s.fom_cost / KW_PER_MW,
            invest_cost_per_kw_yr: s.invest_cost / KW_PER_MW,
        })
        .collect();
    write_rows(&dir.join("storages.csv"), &storage_rows)?;

    let mut profile_rows = Vec::new();
    for (asset_id, series) in &spec.cf_profiles {
        for (hour, &cf) in series.0.iter().enumerate() {
            profile_rows.push(ProfileRow {
                asset_id: asset_id.clone(),
                hour,
                cf,
            });
        }
    }
    write_rows(&dir.join("profiles.csv"), &profile_rows)
}

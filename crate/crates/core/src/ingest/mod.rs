//! Input loading and normalization: CSV tables into a validated
//! [`SystemSpec`], generator clustering, and candidate-asset construction.

mod candidates;
mod cluster;
mod io;

pub use candidates::build_candidates;
pub use cluster::cluster_generators;
pub use io::{load_system, save_system, RunConfig, SeasonBoundaries};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technology {
    Gas,
    Coal,
    Nuclear,
    Hydro,
    Solar,
    WindOns,
    WindOfs,
    Other,
}

impl Technology {
    pub fn is_intermittent(self) -> bool {
        matches!(self, Technology::Solar | Technology::WindOns | Technology::WindOfs)
    }

    /// "Thermal" means gas and coal throughout.
    pub fn is_thermal(self) -> bool {
        matches!(self, Technology::Gas | Technology::Coal)
    }

    /// Stable snake_case name, used for config keys and roll-up tables.
    pub fn key_name(self) -> &'static str {
        use Technology::*;
        match self {
            Gas => "gas",
            Coal => "coal",
            Nuclear => "nuclear",
            Hydro => "hydro",
            Solar => "solar",
            WindOns => "wind_ons",
            WindOfs => "wind_ofs",
            Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Existing,
    Candidate,
}

/// One generator (or clustered aggregate). Costs are normalized internally:
/// variable cost in $/MWh, FO&M and investment in $/MW-yr.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorAsset {
    pub id: String,
    pub balancing_area: String,
    pub technology: Technology,
    pub capacity_mw: f64,
    pub variable_cost: f64,
    pub fom_cost: f64,
    pub ramp_rate: f64,
    pub kind: GeneratorKind,
    pub max_invest_mw: f64,
    pub invest_cost: f64,
}

impl GeneratorAsset {
    pub fn is_intermittent(&self) -> bool {
        self.technology.is_intermittent()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StorageKind {
    SdesExisting,
    Phs,
    SdesCandidate,
    Ldes,
}

/// Energy capacity is always `duration_h * power` (MWh), never stored
/// independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageAsset {
    pub id: String,
    pub state: String,
    pub kind: StorageKind,
    pub duration_h: f64,
    pub power_mw: f64,
    pub max_invest_mw: f64,
    pub rte: f64,
    pub fom_cost: f64,
    pub invest_cost: f64,
}

impl StorageAsset {
    pub fn energy_mwh(&self) -> f64 {
        self.duration_h * self.power_mw
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimeSeries(pub Vec<f64>);

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.0.iter().sum::<f64>() / self.0.len() as f64
        }
    }
}

impl std::ops::Index<usize> for TimeSeries {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Season {
    Winter,
    Spring,
    Summer,
    Fall,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Winter, Season::Spring, Season::Summer, Season::Fall];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyPrices {
    /// $/MWh of unserved load.
    pub imbalance_shed: f64,
    /// $/MWh of must-run surplus.
    pub imbalance_surplus: f64,
    /// $/MW of unmet reserve requirement.
    pub reserve_shortage: f64,
    /// $/MW of provided reserve.
    pub reserve_provision_cost: f64,
}

impl Default for PenaltyPrices {
    fn default() -> Self {
        Self {
            imbalance_shed: 10_000.0,
            imbalance_surplus: 500.0,
            reserve_shortage: 5_000.0,
            reserve_provision_cost: 0.0,
        }
    }
}

/// Candidate-construction rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CandidateRules {
    pub ies_multiplier: f64,
    pub ies_multiplier_overrides: BTreeMap<String, f64>,
    pub sdes_multiplier: f64,
    pub ldes_duration_h: f64,
    pub ldes_rte: f64,
    pub sdes_rte: f64,
    pub sdes_duration_h: f64,
    /// Annualized investment cost for derived IES candidates, $/kW-yr by
    /// technology name (solar, wind_ons, wind_ofs).
    pub ies_invest_per_kw_yr: BTreeMap<String, f64>,
    pub ies_fom_per_kw_yr: BTreeMap<String, f64>,
    pub sdes_invest_per_kw_yr: f64,
    pub sdes_fom_per_kw_yr: f64,
}

impl Default for CandidateRules {
    fn default() -> Self {
        let mut overrides = BTreeMap::new();
        for state in ["CT", "DE", "PA"] {
            overrides.insert(state.to_string(), 10.0);
        }
        Self {
            ies_multiplier: 4.0,
            ies_multiplier_overrides: overrides,
            sdes_multiplier: 10.0,
            ldes_duration_h: 100.0,
            ldes_rte: 0.425,
            sdes_rte: 0.85,
            sdes_duration_h: 4.0,
            ies_invest_per_kw_yr: BTreeMap::new(),
            ies_fom_per_kw_yr: BTreeMap::new(),
            sdes_invest_per_kw_yr: 0.0,
            sdes_fom_per_kw_yr: 0.0,
        }
    }
}

impl CandidateRules {
    pub fn ies_multiplier_for(&self, state: &str) -> f64 {
        self.ies_multiplier_overrides
            .get(state)
            .copied()
            .unwrap_or(self.ies_multiplier)
    }
}

/// One state's complete model input. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub state: String,
    pub horizon_h: usize,
    pub load: TimeSeries,
    pub generators: Vec<GeneratorAsset>,
    pub storages: Vec<StorageAsset>,
    pub cf_profiles: BTreeMap<String, TimeSeries>,
    pub reserve_fraction: f64,
    pub penalty_prices: PenaltyPrices,
    pub season_calendar: Vec<Season>,
    /// Set once `build_candidates` has run; a second application is rejected.
    pub candidates_built: bool,
}

impl SystemSpec {
    pub fn validate(&self) -> Result<()> {
        if self.load.len() != self.horizon_h {
            return Err(Error::Validation(format!(
                "load series has {} hours, horizon is {}",
                self.load.len(),
                self.horizon_h
            )));
        }
        if self.season_calendar.len() != self.horizon_h {
            return Err(Error::Validation(format!(
                "season calendar covers {} hours, horizon is {}",
                self.season_calendar.len(),
                self.horizon_h
            )));
        }
        if !(0.0..1.0).contains(&self.reserve_fraction) {
            return Err(Error::Validation(format!(
                "reserve_fraction {} outside [0, 1)",
                self.reserve_fraction
            )));
        }
        let p = &self.penalty_prices;
        if p.imbalance_shed <= 0.0 || p.imbalance_surplus <= 0.0 || p.reserve_shortage <= 0.0 {
            return Err(Error::Validation(
                "penalty prices (shed, surplus, reserve shortage) must be > 0".into(),
            ));
        }
        if p.reserve_provision_cost < 0.0 {
            return Err(Error::Validation("reserve provision cost must be >= 0".into()));
        }
        for (t, &v) in self.load.0.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Validation(format!("load at hour {t} is {v}")));
            }
        }
        let mut ids = std::collections::BTreeSet::new();
        for g in &self.generators {
            if !ids.insert(&g.id) {
                return Err(Error::Validation(format!("duplicate asset id {}", g.id)));
            }
            if g.capacity_mw < 0.0 || g.variable_cost < 0.0 || g.fom_cost < 0.0 {
                return Err(Error::Validation(format!("{}: negative cost or capacity", g.id)));
            }
            if !(0.0 < g.ramp_rate && g.ramp_rate <= 1.0) {
                return Err(Error::Validation(format!(
                    "{}: ramp rate {} outside (0, 1]",
                    g.id, g.ramp_rate
                )));
            }
            match g.kind {
                GeneratorKind::Existing => {
                    if g.max_invest_mw != 0.0 || g.invest_cost != 0.0 {
                        return Err(Error::Validation(format!(
                            "{}: existing asset carries investment fields",
                            g.id
                        )));
                    }
                }
                GeneratorKind::Candidate => {
                    if g.capacity_mw != 0.0 {
                        return Err(Error::Validation(format!(
                            "{}: candidate capacity must be 0 (capacity is the investment decision)",
                            g.id
                        )));
                    }
                    if g.max_invest_mw < 0.0 || g.invest_cost < 0.0 {
                        return Err(Error::Validation(format!(
                            "{}: negative investment fields",
                            g.id
                        )));
                    }
                }
            }
            let has_profile = self.cf_profiles.contains_key(&g.id);
            if g.is_intermittent() && !has_profile {
                return Err(Error::Validation(format!(
                    "intermittent asset without profile: {}",
                    g.id
                )));
            }
            if !g.is_intermittent() && has_profile {
                return Err(Error::Validation(format!(
                    "non-intermittent asset {} must not reference a capacity-factor profile",
                    g.id
                )));
            }
        }
        for s in &self.storages {
            if !ids.insert(&s.id) {
                return Err(Error::Validation(format!("duplicate asset id {}", s.id)));
            }
            if s.duration_h <= 0.0 {
                return Err(Error::Validation(format!("{}: duration must be > 0", s.id)));
            }
            if !(0.0 < s.rte && s.rte <= 1.0) {
                return Err(Error::Validation(format!("{}: rte {} outside (0, 1]", s.id, s.rte)));
            }
            if s.power_mw < 0.0 || s.max_invest_mw < 0.0 || s.fom_cost < 0.0 || s.invest_cost < 0.0 {
                return Err(Error::Validation(format!("{}: negative field", s.id)));
            }
        }
        for (id, profile) in &self.cf_profiles {
            if profile.len() != self.horizon_h {
                return Err(Error::Validation(format!(
                    "profile for {} has {} hours, horizon is {}",
                    id,
                    profile.len(),
                    self.horizon_h
                )));
            }
            for (t, &cf) in profile.0.iter().enumerate() {
                if !(0.0..=1.0).contains(&cf) {
                    return Err(Error::Validation(format!(
                        "capacity factor for {id} at hour {t} is {cf}, outside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Installed gas+coal capacity (existing units).
    pub fn thermal_capacity_mw(&self) -> f64 {
        self.generators
            .iter()
            .filter(|g| g.kind == GeneratorKind::Existing && g.technology.is_thermal())
            .map(|g| g.capacity_mw)
            .sum()
    }

    pub fn ldes(&self) -> Option<&StorageAsset> {
        self.storages.iter().find(|s| s.kind == StorageKind::Ldes)
    }
}

/// Meteorological-season calendar for an arbitrary horizon: boundaries are
/// the 8760-hour ones (Dec-Feb winter, Mar-May spring, Jun-Aug summer,
/// Sep-Nov fall) scaled proportionally; winter wraps the year boundary.
pub fn default_season_calendar(horizon: usize, bounds: &SeasonBoundaries) -> Vec<Season> {
    let scale = |h: usize| -> usize {
        if bounds.reference_horizon == 0 {
            h
        } else {
            (h as f64 * horizon as f64 / bounds.reference_horizon as f64).round() as usize
        }
    };
    let spring = scale(bounds.spring_start);
    let summer = scale(bounds.summer_start);
    let fall = scale(bounds.fall_start);
    let winter = scale(bounds.winter_start);
    (0..horizon)
        .map(|t| {
            if t < spring || t >= winter {
                Season::Winter
            } else if t < summer {
                Season::Spring
            } else if t < fall {
                Season::Summer
            } else {
                Season::Fall
            }
        })
        .collect()
}

//! Shared fixtures for the CLI integration tests.
#![allow(dead_code)] // each test target uses a different subset

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use ldesvc_core::ingest::{
    save_system, GeneratorAsset, GeneratorKind, PenaltyPrices, RunConfig, Season, StorageAsset,
    StorageKind, SystemSpec, Technology, TimeSeries,
};
use ldesvc_core::synth::{generate, synth_candidate_rules, SynthConfig};

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldesvc"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Two-hour closed-form instance: 1 MW gas at $50/MWh with $10/yr FO&M,
/// a free-energy solar candidate at $30/MW-yr available in hour 0 only, and
/// a lossless LDES slot. Baseline cost 110; replacing gas with 2x solar plus
/// the storage costs 60, so the avoided cost is a flat 50.
pub fn toy_spec() -> SystemSpec {
    let mut cf_profiles = BTreeMap::new();
    cf_profiles.insert("solar-cand".to_string(), TimeSeries(vec![1.0, 0.0]));
    SystemSpec {
        state: "XX".into(),
        horizon_h: 2,
        load: TimeSeries(vec![1.0, 1.0]),
        generators: vec![
            GeneratorAsset {
                id: "gas1".into(),
                balancing_area: "ba1".into(),
                technology: Technology::Gas,
                capacity_mw: 1.0,
                variable_cost: 50.0,
                fom_cost: 10.0,
                ramp_rate: 1.0,
                kind: GeneratorKind::Existing,
                max_invest_mw: 0.0,
                invest_cost: 0.0,
            },
            GeneratorAsset {
                id: "solar-cand".into(),
                balancing_area: "ba1".into(),
                technology: Technology::Solar,
                capacity_mw: 0.0,
                variable_cost: 0.0,
                fom_cost: 0.0,
                ramp_rate: 1.0,
                kind: GeneratorKind::Candidate,
                max_invest_mw: 1000.0,
                invest_cost: 30.0,
            },
        ],
        storages: vec![StorageAsset {
            id: "ldes".into(),
            state: "XX".into(),
            kind: StorageKind::Ldes,
            duration_h: 100.0,
            power_mw: 0.0,
            max_invest_mw: 0.0,
            rte: 1.0,
            fom_cost: 0.0,
            invest_cost: 0.0,
        }],
        cf_profiles,
        reserve_fraction: 0.0,
        penalty_prices: PenaltyPrices::default(),
        season_calendar: vec![Season::Winter; 2],
        candidates_built: false,
    }
}

pub fn write_config(dir: &Path, config: &RunConfig) {
    let text = toml::to_string(config).expect("config serializes");
    std::fs::write(dir.join("config.toml"), text).unwrap();
}

pub fn write_toy_dir(dir: &Path) {
    save_system(&toy_spec(), dir).unwrap();
    let config = RunConfig { reserve_fraction: Some(0.0), ..RunConfig::default() };
    write_config(dir, &config);
}

/// Multi-state corpus: one subdirectory per state, candidates derived at load
/// time from the config's candidate rules.
pub fn write_synth_corpus(root: &Path, states: &[&str], horizon: usize) {
    for (i, &state) in states.iter().enumerate() {
        let dir = root.join(state);
        std::fs::create_dir_all(&dir).unwrap();
        let spec = generate(&SynthConfig {
            state: state.to_string(),
            horizon_h: horizon,
            with_candidates: false,
            seed: i as u64,
            ..SynthConfig::default()
        });
        save_system(&spec, &dir).unwrap();
        let config = RunConfig {
            reserve_fraction: Some(0.04),
            candidates: synth_candidate_rules(),
            ..RunConfig::default()
        };
        write_config(&dir, &config);
    }
}

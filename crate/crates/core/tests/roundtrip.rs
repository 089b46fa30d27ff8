//! External CSV schema round-trip: save_system followed by load_system must
//! reproduce the spec up to floating-point unit conversion (kW-yr <-> MW-yr).

use ldesvc_core::ingest::{load_system, save_system, RunConfig, SystemSpec};
use ldesvc_core::synth::{generate, SynthConfig};
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    let scale = 1.0f64.max(a.abs().max(b.abs()));
    (a - b).abs() / scale <= 1e-12
}

fn assert_specs_match(original: &SystemSpec, loaded: &SystemSpec) {
    assert_eq!(original.state, loaded.state);
    assert_eq!(original.horizon_h, loaded.horizon_h);
    assert_eq!(original.season_calendar, loaded.season_calendar);
    assert!(close(original.reserve_fraction, loaded.reserve_fraction));
    for (a, b) in original.load.0.iter().zip(&loaded.load.0) {
        assert!(close(*a, *b));
    }
    assert_eq!(original.generators.len(), loaded.generators.len());
    for (a, b) in original.generators.iter().zip(&loaded.generators) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.technology, b.technology);
        assert_eq!(a.kind, b.kind);
        assert!(close(a.capacity_mw, b.capacity_mw));
        assert!(close(a.variable_cost, b.variable_cost), "{}: {} vs {}", a.id, a.variable_cost, b.variable_cost);
        assert!(close(a.fom_cost, b.fom_cost));
        assert!(close(a.ramp_rate, b.ramp_rate));
        assert!(close(a.max_invest_mw, b.max_invest_mw));
        assert!(close(a.invest_cost, b.invest_cost));
    }
    assert_eq!(original.storages.len(), loaded.storages.len());
    for (a, b) in original.storages.iter().zip(&loaded.storages) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.kind, b.kind);
        assert!(close(a.duration_h, b.duration_h));
        assert!(close(a.power_mw, b.power_mw));
        assert!(close(a.rte, b.rte));
        assert!(close(a.fom_cost, b.fom_cost));
        assert!(close(a.invest_cost, b.invest_cost));
        assert!(close(a.max_invest_mw, b.max_invest_mw));
    }
    assert_eq!(original.cf_profiles.len(), loaded.cf_profiles.len());
    for (id, series) in &original.cf_profiles {
        for (a, b) in series.0.iter().zip(&loaded.cf_profiles[id].0) {
            assert!(close(*a, *b));
        }
    }
}

fn roundtrip(cfg: &SynthConfig) {
    let spec = generate(cfg);
    let dir = tempfile::tempdir().unwrap();
    save_system(&spec, dir.path()).unwrap();
    let config = RunConfig { reserve_fraction: Some(spec.reserve_fraction), ..RunConfig::default() };
    let loaded = load_system(dir.path(), &config).unwrap();
    assert_specs_match(&spec, &loaded);
}

#[test]
fn roundtrip_default_instance() {
    roundtrip(&SynthConfig::default());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn roundtrip_random_instances(
        seed in 0u64..1_000,
        horizon in 4usize..72,
        n_thermal in 1usize..4,
        n_ies in 1usize..4,
        with_sdes in any::<bool>(),
        with_candidates in any::<bool>(),
    ) {
        roundtrip(&SynthConfig {
            state: "ZZ".into(),
            horizon_h: horizon,
            n_thermal,
            n_ies,
            with_sdes,
            with_candidates,
            seed,
        });
    }
}

#[test]
fn loader_rejects_gap_in_hours() {
    let spec = generate(&SynthConfig::default());
    let dir = tempfile::tempdir().unwrap();
    save_system(&spec, dir.path()).unwrap();
    // Drop an interior hour from load.csv.
    let path = dir.path().join("load.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let kept: Vec<&str> = text.lines().enumerate().filter(|(i, _)| *i != 3).map(|(_, l)| l).collect();
    std::fs::write(&path, kept.join("\n")).unwrap();
    assert!(load_system(dir.path(), &RunConfig::default()).is_err());
}

#[test]
fn loader_rejects_cf_out_of_range() {
    let spec = generate(&SynthConfig::default());
    let dir = tempfile::tempdir().unwrap();
    save_system(&spec, dir.path()).unwrap();
    let path = dir.path().join("profiles.csv");
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("solar1,0,1.5\n");
    std::fs::write(&path, text).unwrap();
    assert!(load_system(dir.path(), &RunConfig::default()).is_err());
}

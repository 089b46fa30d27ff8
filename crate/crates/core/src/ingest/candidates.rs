//! Candidate-asset construction: IES candidates mirroring the existing
//! intermittent fleet, one SDES candidate per state, and the LDES asset whose
//! power is imposed later by the capacity sweep.

use crate::error::{Error, Result};

use super::{CandidateRules, GeneratorAsset, GeneratorKind, StorageAsset, StorageKind, SystemSpec};

const KW_PER_MW: f64 = 1000.0;

/// Expands a clustered spec with candidate assets. Rejects a spec that has
/// already been expanded.
pub fn build_candidates(spec: &SystemSpec, rules: &CandidateRules) -> Result<SystemSpec> {
    if spec.candidates_built {
        return Err(Error::State(
            "candidates already built for this spec".into(),
        ));
    }
    spec.validate()?;
    let mut out = spec.clone();
    let multiplier = rules.ies_multiplier_for(&spec.state);

    for g in &spec.generators {
        if g.kind != GeneratorKind::Existing || !g.is_intermittent() {
            continue;
        }
        let key = g.technology.key_name();
        let candidate = GeneratorAsset {
            id: format!("{}-cand", g.id),
            balancing_area: g.balancing_area.clone(),
            technology: g.technology,
            capacity_mw: 0.0,
            variable_cost: g.variable_cost,
            fom_cost: rules.ies_fom_per_kw_yr.get(key).copied().unwrap_or(0.0) * KW_PER_MW,
            ramp_rate: g.ramp_rate,
            kind: GeneratorKind::Candidate,
            max_invest_mw: multiplier * g.capacity_mw,
            invest_cost: rules.ies_invest_per_kw_yr.get(key).copied().unwrap_or(0.0) * KW_PER_MW,
        };
        let profile = spec
            .cf_profiles
            .get(&g.id)
            .expect("validated intermittent asset has a profile")
            .clone();
        out.cf_profiles.insert(candidate.id.clone(), profile);
        out.generators.push(candidate);
    }

    // SDES candidate: capped at a multiple of the existing SDES fleet,
    // pumped hydro excluded.
    let existing_sdes_mw: f64 = spec
        .storages
        .iter()
        .filter(|s| s.kind == StorageKind::SdesExisting)
        .map(|s| s.power_mw)
        .sum();
    out.storages.push(StorageAsset {
        id: format!("{}-sdes-cand", spec.state),
        state: spec.state.clone(),
        kind: StorageKind::SdesCandidate,
        duration_h: rules.sdes_duration_h,
        power_mw: 0.0,
        max_invest_mw: rules.sdes_multiplier * existing_sdes_mw,
        rte: rules.sdes_rte,
        fom_cost: rules.sdes_fom_per_kw_yr * KW_PER_MW,
        invest_cost: rules.sdes_invest_per_kw_yr * KW_PER_MW,
    });

    // LDES: one per state unless the input already declares one.
    if spec.ldes().is_none() {
        out.storages.push(StorageAsset {
            id: format!("{}-ldes", spec.state),
            state: spec.state.clone(),
            kind: StorageKind::Ldes,
            duration_h: rules.ldes_duration_h,
            power_mw: 0.0,
            max_invest_mw: 0.0,
            rte: rules.ldes_rte,
            fom_cost: 0.0,
            invest_cost: 0.0,
        });
    }

    out.candidates_built = true;
    out.validate()?;
    Ok(out)
}

//! Two-model sequence and capacity sweep: baseline solve, opportunity solves
//! over an imposed-LDES power grid, viability-curve assembly, and headline
//! scalars.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulate::{
    breakdown, build_baseline_lp, build_opportunity_lp, DispatchSolution, ModelMode,
    ObjectiveBreakdown,
};
use crate::ingest::SystemSpec;
use crate::solve::{solve_optimal, Backend};

const MW_PER_KW_DIV: f64 = 1000.0;

#[derive(Debug, Clone, Serialize)]
pub struct BaselineResult {
    pub q_star: f64,
    pub dispatch: DispatchSolution,
    pub breakdown: ObjectiveBreakdown,
    pub thermal_capacity_mw: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ViabilityPoint {
    pub x_power_mw: f64,
    /// Reported viability cost, $/kW (internal $/MW divided by 1000).
    pub c_vc_per_kw: f64,
    /// q* minus the optimal opportunity cost.
    pub avoided_cost: f64,
    pub q_over: f64,
    pub breakdown: ObjectiveBreakdown,
    pub dispatch: DispatchSolution,
}

impl ViabilityPoint {
    pub fn c_vc_internal(&self) -> f64 {
        self.c_vc_per_kw * MW_PER_KW_DIV
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ViabilityCurve {
    pub state: String,
    /// Points ordered by strictly increasing x_power.
    pub points: Vec<ViabilityPoint>,
    /// Post-hoc invariant violations (monotonicity), if any.
    pub diagnostics: Vec<String>,
}

pub fn run_baseline(spec: &SystemSpec, backend: &dyn Backend) -> Result<BaselineResult> {
    let model = build_baseline_lp(spec)?;
    let result = solve_optimal(&model.lp, backend)?;
    let b = breakdown(&model, spec, &result.primal)?;
    let dispatch = model.extract_dispatch(&result.primal);
    debug_assert!(dispatch.investments.values().all(|&v| v == 0.0));
    Ok(BaselineResult {
        q_star: b.total,
        dispatch,
        breakdown: b,
        thermal_capacity_mw: spec.thermal_capacity_mw(),
    })
}

/// One opportunity solve at an imposed LDES power. The viability cost is the
/// avoided cost per MW; the over-cost slack absorbs negative avoided cost.
pub fn viability_at(
    spec: &SystemSpec,
    x_power_mw: f64,
    q_star: f64,
    backend: &dyn Backend,
) -> Result<ViabilityPoint> {
    let mode = ModelMode::opportunity(x_power_mw, q_star)?;
    let model = build_opportunity_lp(spec, mode)?;
    let result = solve_optimal(&model.lp, backend)?;
    let mut b = breakdown(&model, spec, &result.primal)?;
    let cost = b.cost_total();
    let avoided = q_star - cost;
    let c_vc_internal = avoided / x_power_mw;
    b.ldes_term = c_vc_internal * x_power_mw;
    b.q_over = (-avoided).max(0.0);
    b.total = b.cost_total() + b.ldes_term;
    Ok(ViabilityPoint {
        x_power_mw,
        c_vc_per_kw: c_vc_internal / MW_PER_KW_DIV,
        avoided_cost: avoided,
        q_over: b.q_over,
        breakdown: b,
        dispatch: model.extract_dispatch(&result.primal),
    })
}

/// Opportunity solve with the LDES left out (x -> 0 limit), used by the
/// national roll-up's no-LDES replacement column.
pub fn replacement_without_ldes(
    spec: &SystemSpec,
    q_star: f64,
    backend: &dyn Backend,
) -> Result<(ObjectiveBreakdown, DispatchSolution)> {
    let mode = ModelMode::opportunity_without_ldes(q_star)?;
    let model = build_opportunity_lp(spec, mode)?;
    let result = solve_optimal(&model.lp, backend)?;
    let b = breakdown(&model, spec, &result.primal)?;
    Ok((b, model.extract_dispatch(&result.primal)))
}

impl ViabilityCurve {
    /// Orders points by capacity, enforces strict monotonicity of the grid,
    /// and records avoided-cost monotonicity violations as diagnostics.
    pub fn assemble(state: &str, mut points: Vec<ViabilityPoint>, q_star: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Argument("empty viability curve".into()));
        }
        points.sort_by(|a, b| a.x_power_mw.total_cmp(&b.x_power_mw));
        let mut diagnostics = Vec::new();
        for pair in points.windows(2) {
            if pair[1].x_power_mw <= pair[0].x_power_mw {
                return Err(Error::Argument(format!(
                    "duplicate grid capacity {} MW",
                    pair[1].x_power_mw
                )));
            }
            let slack = 1e-6 * q_star.abs();
            if pair[1].avoided_cost < pair[0].avoided_cost - slack {
                diagnostics.push(format!(
                    "avoided cost decreased from {} at {} MW to {} at {} MW",
                    pair[0].avoided_cost,
                    pair[0].x_power_mw,
                    pair[1].avoided_cost,
                    pair[1].x_power_mw
                ));
            }
        }
        Ok(Self {
            state: state.to_string(),
            points,
            diagnostics,
        })
    }
}

pub fn sweep_curve(
    spec: &SystemSpec,
    grid: &[f64],
    baseline: &BaselineResult,
    backend: &dyn Backend,
) -> Result<ViabilityCurve> {
    if grid.is_empty() {
        return Err(Error::Argument("sweep grid is empty".into()));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] <= 0.0 {
        return Err(Error::Argument(
            "sweep grid values must be > 0 (viability cost is undefined at x = 0)".into(),
        ));
    }
    let mut points = Vec::with_capacity(sorted.len());
    for &x in &sorted {
        points.push(viability_at(spec, x, baseline.q_star, backend)?);
    }
    ViabilityCurve::assemble(&spec.state, points, baseline.q_star)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MaxViability {
    pub c_vc_max_per_kw: f64,
    pub x_at_max_mw: f64,
    /// False when even the maximum viability cost is negative.
    pub viable: bool,
}

/// Maximum viability cost over the curve; ties break toward the smallest
/// capacity.
pub fn max_viability(curve: &ViabilityCurve) -> MaxViability {
    let best = curve
        .points
        .iter()
        .max_by(|a, b| {
            a.c_vc_per_kw
                .total_cmp(&b.c_vc_per_kw)
                .then_with(|| b.x_power_mw.total_cmp(&a.x_power_mw))
        })
        .expect("curve is non-empty");
    MaxViability {
        c_vc_max_per_kw: best.c_vc_per_kw,
        x_at_max_mw: best.x_power_mw,
        viable: best.c_vc_per_kw >= 0.0,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MinViableCapacity {
    pub x_power_mw: f64,
    /// Grid interval bracketing the zero crossing, when the curve crosses
    /// between grid points.
    pub bracket_mw: Option<(f64, f64)>,
}

/// Smallest grid capacity where thermal replacement does not increase total
/// system cost (avoided cost >= 0); None when no grid point qualifies.
pub fn min_viable_capacity(curve: &ViabilityCurve) -> Option<MinViableCapacity> {
    let idx = curve.points.iter().position(|p| p.avoided_cost >= 0.0)?;
    let bracket = if idx > 0 {
        Some((curve.points[idx - 1].x_power_mw, curve.points[idx].x_power_mw))
    } else {
        None
    };
    Some(MinViableCapacity {
        x_power_mw: curve.points[idx].x_power_mw,
        bracket_mw: bracket,
    })
}

/// Ratio of the viability-maximizing LDES capacity to baseline thermal
/// capacity; None when the state has no thermal fleet.
pub fn alpha_ratio(x_at_max_mw: f64, thermal_capacity_mw: f64) -> Option<f64> {
    if thermal_capacity_mw > 0.0 {
        Some(x_at_max_mw / thermal_capacity_mw)
    } else {
        None
    }
}

/// Default production sweep grid: log-spaced powers over 0.1-150 GW.
pub fn default_grid(points: usize) -> Vec<f64> {
    log_spaced(100.0, 150_000.0, points)
}

pub fn log_spaced(lo_mw: f64, hi_mw: f64, points: usize) -> Vec<f64> {
    assert!(lo_mw > 0.0 && hi_mw > lo_mw && points >= 2);
    let (a, b) = (lo_mw.ln(), hi_mw.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Interior refinement points around the curve's running maximum: log-spaced
/// capacities strictly inside the grid interval bracketing the argmax.
pub fn refinement_grid(curve: &ViabilityCurve, extra: usize) -> Vec<f64> {
    if extra == 0 || curve.points.len() < 2 {
        return Vec::new();
    }
    let argmax = curve
        .points
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            a.c_vc_per_kw
                .total_cmp(&b.c_vc_per_kw)
                .then_with(|| b.x_power_mw.total_cmp(&a.x_power_mw))
        })
        .map(|(i, _)| i)
        .unwrap();
    let lo = if argmax == 0 {
        curve.points[0].x_power_mw / 2.0
    } else {
        curve.points[argmax - 1].x_power_mw
    };
    let hi = if argmax + 1 == curve.points.len() {
        curve.points[argmax].x_power_mw * 2.0
    } else {
        curve.points[argmax + 1].x_power_mw
    };
    let all = log_spaced(lo, hi, extra + 2);
    all[1..=extra].to_vec()
}

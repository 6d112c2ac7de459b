//! Scenario wiring: each sweep point is a handful of library calls.

use std::sync::Arc;

use log::info;
use noon_core::atmosphere::{
    calibrate_wavelength, derive_weibull, sample_transmissions, BeamParams,
    TransmissionMeasure,
};
use noon_core::channels::{
    apply_constant_loss, apply_dephasing, apply_fluctuating_loss, gaussian_dephasing_spec,
    ConstantLossSpec, DiscreteMoments, FluctuatingLossSpec, MomentProvider,
};
use noon_core::entanglement::{min_pt_eigenvalue, ENTANGLEMENT_TOL};
use noon_core::metrology::{
    dephasing_bound_ln_over_m, dephasing_threshold, expectation_a, heisenberg_limit,
    min_phase_error, optimal_m, phase_error, phase_error_profile, sql, supersensitivity_condition,
    BOUNDARY_TOL, PHASE_INSENSITIVE_TOL,
};
use noon_core::{Error, NoisyNoonState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{turbulence_spec, GeometryKind, Scenario, SweepConfig};
use crate::error::{CliError, Result};

/// One CSV cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
}

impl Cell {
    pub fn as_f64(self) -> f64 {
        match self {
            Cell::Float(x) => x,
            Cell::Int(i) => i as f64,
            Cell::Bool(b) => f64::from(u8::from(b)),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// A sweep point for which the requested quantity is undefined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularPoint {
    pub sweep_value: f64,
    pub curve: Option<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub scenario: Scenario,
    pub stem: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub singular: Vec<SingularPoint>,
    pub metadata: Value,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_f64()).collect())
    }
}

enum Point {
    Row(Vec<Cell>),
    Singular(SingularPoint),
}

fn singular(sweep_value: f64, curve: Option<f64>, err: &Error) -> Point {
    Point::Singular(SingularPoint {
        sweep_value,
        curve,
        reason: err.to_string(),
    })
}

/// Errors that mark a single sweep point as undefined rather than failing
/// the run.
fn is_singular(e: &Error) -> bool {
    matches!(e, Error::PhaseInsensitive { .. } | Error::NoPhaseSensitivity(_))
}

fn evaluate<T: Sync>(items: &[T], jobs: usize, f: impl Fn(usize, &T) -> Result<Point> + Sync) -> Result<Vec<Point>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::config("jobs", e.to_string()))?;
    pool.install(|| {
        items
            .par_iter()
            .enumerate()
            .map(|(i, x)| f(i, x))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .collect()
}

fn split(points: Vec<Point>) -> (Vec<Vec<Cell>>, Vec<SingularPoint>) {
    let mut rows = Vec::new();
    let mut sing = Vec::new();
    for p in points {
        match p {
            Point::Row(r) => rows.push(r),
            Point::Singular(s) => sing.push(s),
        }
    }
    (rows, sing)
}

fn tolerances() -> Value {
    json!({
        "validation": noon_core::VALIDATION_TOL,
        "quadrature_rel": noon_core::quadrature::REL_TOL,
        "phase_insensitive": PHASE_INSENSITIVE_TOL,
        "entanglement": ENTANGLEMENT_TOL,
        "supersensitivity_boundary": BOUNDARY_TOL,
    })
}

/// Runs a validated configuration with at most `jobs` worker threads.
/// Rows come back in sweep order whatever the completion order.
pub fn run_scenario(cfg: &SweepConfig, jobs: usize) -> Result<SweepResult> {
    cfg.validate()?;
    info!("running {:?} over {} points", cfg.scenario, cfg.sweep.count);
    let (columns, points, summary) = match cfg.scenario {
        Scenario::MixedPhaseError => mixed_phase_error(cfg, jobs)?,
        Scenario::LossyMinError => lossy_min_error(cfg, jobs)?,
        Scenario::DephasingMinError => dephasing_min_error(cfg, jobs)?,
        Scenario::VacuumMixCombined => vacuum_mix_combined(cfg, jobs)?,
        Scenario::TurbulenceTau => turbulence_tau(cfg, jobs)?,
        Scenario::Custom => custom(cfg, jobs)?,
    };
    let (rows, singular) = split(points);
    let metadata = json!({
        "config": serde_json::to_value(cfg).expect("config serializes"),
        "version": env!("CARGO_PKG_VERSION"),
        "tolerances": tolerances(),
        "columns": columns,
        "rows": rows.len(),
        "singular_points": singular.len(),
        "summary": summary,
    });
    Ok(SweepResult {
        scenario: cfg.scenario,
        stem: cfg.stem(),
        columns,
        rows,
        singular,
        metadata,
    })
}

type Outcome = (Vec<&'static str>, Vec<Point>, Value);

fn mixed_phase_error(cfg: &SweepConfig, jobs: usize) -> Result<Outcome> {
    let m = cfg.order()?;
    let mixtures = cfg.mixtures.clone().unwrap_or_default();
    let phis = cfg.sweep.values();
    let mut items = Vec::new();
    let mut states = Vec::new();
    for &p in &mixtures {
        states.push((p, NoisyNoonState::vacuum_mix(p, m)?));
    }
    for (ci, _) in states.iter().enumerate() {
        for &phi in &phis {
            items.push((ci, phi));
        }
    }
    let points = evaluate(&items, jobs, |_, &(ci, phi)| {
        let (p, s) = &states[ci];
        Ok(match phase_error(s, m, phi) {
            Ok(d) => Point::Row(vec![(*p).into(), phi.into(), d.into(), sql(m).into(), heisenberg_limit(m).into()]),
            Err(e) if is_singular(&e) => singular(phi, Some(*p), &e),
            Err(e) => return Err(e.into()),
        })
    })?;
    let mut curves = Vec::new();
    for (p, s) in &states {
        let min = min_phase_error(s, m).ok();
        curves.push(json!({
            "p": p,
            "dphi_min": min.map(|x| x.0),
            "phi_star": min.map(|x| x.1),
            "supersensitive": supersensitivity_condition(s, m),
        }));
    }
    Ok((
        vec!["p", "phi", "dphi", "sql", "hl"],
        points,
        json!({ "m": m, "curves": curves }),
    ))
}

fn lossy_min_error(cfg: &SweepConfig, jobs: usize) -> Result<Outcome> {
    let (kappa, theta) = (cfg.kappa.unwrap_or(1.0), cfg.theta.unwrap_or(1.0));
    let spec = ConstantLossSpec::new(kappa, theta)?;
    let ms = cfg.integer_orders();
    let points = evaluate(&ms, jobs, |_, &m| {
        let s = apply_constant_loss(&NoisyNoonState::pure_noon(m)?, &spec);
        Ok(match min_phase_error(&s, m) {
            Ok((d, phi)) => Point::Row(vec![
                m.into(),
                d.into(),
                phi.into(),
                sql(m).into(),
                heisenberg_limit(m).into(),
                (d < sql(m)).into(),
            ]),
            Err(e) if is_singular(&e) => singular(m as f64, None, &e),
            Err(e) => return Err(e.into()),
        })
    })?;
    // first order M ≥ 2 above the SQL, from the computed rows
    let first_above = points.iter().find_map(|p| match p {
        Point::Row(r) if r[0].as_f64() >= 2.0 && r[1].as_f64() > r[3].as_f64() => Some(r[0].as_f64() as i64),
        _ => None,
    });
    let optimum = if (kappa - theta).abs() <= 1e-12 && kappa < 1.0 {
        let (m, d) = optimal_m(kappa, theta)?;
        json!({ "m": m, "dphi_min": d })
    } else {
        Value::Null
    };
    Ok((
        vec!["m", "dphi_min", "phi_star", "sql", "hl", "below_sql"],
        points,
        json!({
            "kappa": kappa,
            "theta": theta,
            "optimal": optimum,
            "first_m_above_sql": first_above,
        }),
    ))
}

fn dephasing_min_error(cfg: &SweepConfig, jobs: usize) -> Result<Outcome> {
    let m = cfg.order()?;
    let base = NoisyNoonState::pure_noon(m)?;
    let deltas = cfg.sweep.values();
    let points = evaluate(&deltas, jobs, |_, &delta| {
        let spec = gaussian_dephasing_spec(delta, 0.0)?;
        let s = apply_dephasing(&base, &spec)?;
        Ok(match min_phase_error(&s, m) {
            Ok((d, phi)) => Point::Row(vec![
                delta.into(),
                spec.lambda(m)?.norm_sqr().into(),
                d.into(),
                phi.into(),
                sql(m).into(),
                heisenberg_limit(m).into(),
                supersensitivity_condition(&s, m).into(),
            ]),
            Err(e) if is_singular(&e) => singular(delta, None, &e),
            Err(e) => return Err(e.into()),
        })
    })?;
    let derived = dephasing_threshold(m)?;
    let printed = dephasing_bound_ln_over_m(m);
    Ok((
        vec!["delta", "lambda_abs2", "dphi_min", "phi_star", "sql", "hl", "supersensitive"],
        points,
        json!({
            "m": m,
            "threshold_sqrt_ln_m_over_m": derived,
            "printed_bound_ln_m_over_m": printed,
            "threshold_discrepancy": (derived - printed).abs() > 1e-12,
        }),
    ))
}

fn vacuum_mix_combined(cfg: &SweepConfig, jobs: usize) -> Result<Outcome> {
    let m = cfg.order()?;
    let ps = cfg.sweep.values();
    let points = evaluate(&ps, jobs, |_, &p| {
        let s = NoisyNoonState::vacuum_mix(p, m)?;
        let pt = min_pt_eigenvalue(&s);
        Ok(match min_phase_error(&s, m) {
            Ok((d, _)) => Point::Row(vec![
                p.into(),
                pt.tau.into(),
                pt.entangled.into(),
                d.into(),
                sql(m).into(),
                supersensitivity_condition(&s, m).into(),
            ]),
            Err(e) if is_singular(&e) => singular(p, None, &e),
            Err(e) => return Err(e.into()),
        })
    })?;
    Ok((
        vec!["p", "tau", "entangled", "dphi_min", "sql", "supersensitive"],
        points,
        json!({ "n": m, "m": m, "supersensitive_above_p": 1.0 / m as f64 }),
    ))
}

fn weibull_json(beam: &BeamParams) -> Result<Value> {
    let wp = derive_weibull(beam)?;
    Ok(json!({ "distance": beam.distance, "params": wp }))
}

fn turbulence_tau(cfg: &SweepConfig, jobs: usize) -> Result<Outcome> {
    let n = cfg.order()?;
    let beam = cfg.beam.expect("validated");
    let threshold = cfg.survival_threshold.expect("validated");
    let state = NoisyNoonState::pure_noon(n)?;
    let distances = cfg.sweep.values();
    let mc = cfg.mc_samples;
    let points = evaluate(&distances, jobs, |i, &d| {
        let link = beam.at_distance(d);
        let counter = turbulence_spec(GeometryKind::Counter, &link)?;
        let co = turbulence_spec(GeometryKind::Co, &link)?;
        let tau_counter = min_pt_eigenvalue(&apply_fluctuating_loss(&state, &counter)?).tau;
        let tau_co = min_pt_eigenvalue(&apply_fluctuating_loss(&state, &co)?).tau;
        let nn = n as u32;
        let mut row: Vec<Cell> = vec![
            d.into(),
            tau_counter.into(),
            tau_co.into(),
            counter.coherence_scale(nn)?.into(),
            co.coherence_scale(nn)?.into(),
            (tau_counter.abs() >= threshold).into(),
            (tau_co.abs() >= threshold).into(),
        ];
        if let Some(count) = mc {
            // seeded per sweep index, so rows do not depend on scheduling
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
            let arm = derive_weibull(&link.at_distance(0.5 * d))?;
            let full = derive_weibull(&link)?;
            let a = DiscreteMoments::from_samples(&sample_transmissions(&arm, count, &mut rng))?;
            let b = DiscreteMoments::from_samples(&sample_transmissions(&arm, count, &mut rng))?;
            let c = DiscreteMoments::from_samples(&sample_transmissions(&full, count, &mut rng))?;
            let mc_counter = FluctuatingLossSpec::counter(Arc::new(a), Arc::new(b)).coherence_scale(nn)?;
            let mc_co = c.moment(2 * nn)?;
            row.push(mc_counter.into());
            row.push(mc_co.into());
        }
        Ok(Point::Row(row))
    })?;
    let mut columns = vec![
        "distance",
        "tau_counter",
        "tau_co",
        "coherence_scale_counter",
        "coherence_scale_co",
        "counter_above_threshold",
        "co_above_threshold",
    ];
    if mc.is_some() {
        columns.push("mc_coherence_scale_counter");
        columns.push("mc_coherence_scale_co");
    }
    let survival = |col: usize| {
        points
            .iter()
            .filter_map(|p| match p {
                Point::Row(r) if r[col].as_f64().abs() >= threshold => Some(r[0].as_f64()),
                _ => None,
            })
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))))
    };
    let calibration = match &cfg.calibration {
        Some(c) => {
            let base = beam.at_distance(c.distance);
            let mut reports = Vec::new();
            for measure in [TransmissionMeasure::Amplitude, TransmissionMeasure::Intensity] {
                let r = calibrate_wavelength(&base, c.target, measure, c.range.0, c.range.1)?;
                reports.push(json!({
                    "measure": r.measure,
                    "target": r.target,
                    "achievable_min": r.achievable.0,
                    "achievable_max": r.achievable.1,
                    "wavelength": r.wavelength,
                    "value_at_configured_wavelength": measure.evaluate(&derive_weibull(&base)?)?,
                }));
            }
            json!({ "distance": c.distance, "range": c.range, "reports": reports })
        }
        None => Value::Null,
    };
    let (first, last) = (distances[0], *distances.last().expect("count ≥ 2"));
    let summary = json!({
            "n": n,
            "wavelength": beam.wavelength,
            "counter_arm_length": "distance / 2",
            "survival_threshold": threshold,
            "survival_distance_counter": survival(1),
            "survival_distance_co": survival(2),
            "weibull": {
                "co": [weibull_json(&beam.at_distance(first))?, weibull_json(&beam.at_distance(last))?],
                "counter_arm": [
                    weibull_json(&beam.at_distance(0.5 * first))?,
                    weibull_json(&beam.at_distance(0.5 * last))?,
                ],
            },
            "calibration": calibration,
        });
    Ok((columns, points, summary))
}

fn custom(cfg: &SweepConfig, jobs: usize) -> Result<Outcome> {
    let m = cfg.order()?;
    let mut state = cfg.state.as_ref().expect("validated").build()?;
    for ch in &cfg.channels {
        state = ch.apply(&state)?;
    }
    let phis = cfg.sweep.values();
    let points = evaluate(&phis, jobs, |_, &phi| {
        Ok(match phase_error(&state, m, phi) {
            Ok(d) => Point::Row(vec![
                phi.into(),
                d.into(),
                expectation_a(&state, m, phi)?.into(),
                sql(m).into(),
                heisenberg_limit(m).into(),
            ]),
            Err(e) if is_singular(&e) => singular(phi, None, &e),
            Err(e) => return Err(e.into()),
        })
    })?;
    let profile = phase_error_profile(&state, m, &[])?;
    let pt = min_pt_eigenvalue(&state);
    Ok((
        vec!["phi", "dphi", "expectation", "sql", "hl"],
        points,
        json!({
            "m": m,
            "dphi_min": profile.dphi_min,
            "phi_star": profile.phi_star,
            "interval": profile.interval,
            "condition": profile.condition,
            "pt": pt,
            "state": state,
        }),
    ))
}

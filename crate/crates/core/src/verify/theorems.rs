use crate::curvature::{curvature_profile, Curvature, Dimension};
use crate::graph::{ExceptionSet, WeightedGraph};
use crate::semigroup::{heat_trace, trace, ClassFunction, EvolutionConfig};
use crate::gamma::gamma_sq;

use super::{Check, Instance, Theorem, VerificationReport, VerifyError};

/// Subtracted from the solver's curvature before it enters a theorem.
pub const CURVATURE_MARGIN: f64 = 1e-9;

/// `min_{V \ W} K(·; ∞) − CURVATURE_MARGIN`, or `None` when `W = V`.
pub fn curvature_bound(g: &WeightedGraph, w: &ExceptionSet) -> Result<Option<f64>, VerifyError> {
    let profile = curvature_profile(g, Dimension::Infinite);
    let outside = w.complement();
    if let Some(&x) = outside.iter().find(|&&x| profile.get(x).is_neg_infinity()) {
        return Err(VerifyError::InfiniteNegativeCurvature(x));
    }
    Ok(profile.min_over(&outside).map(|k| match k {
        Curvature::Finite(k) => k - CURVATURE_MARGIN,
        Curvature::NegInfinity => unreachable!("checked above"),
    }))
}

/// Checks `Γ P_t^W f ≤ e^{−2Kt} P_t Γf` on `grid` with `K` from the solver.
pub fn check_gradient_estimate(g: &WeightedGraph, f: &ClassFunction, grid: &[f64], config: &EvolutionConfig) -> Result<VerificationReport, VerifyError> {
    let k = curvature_bound(g, f.exception())?;
    check_gradient_estimate_with(g, f, grid, config, k)
}

/// [`check_gradient_estimate`] with an explicit curvature constant; `None`
/// stands for `K = +∞` (no vertex outside `W`).
pub fn check_gradient_estimate_with(
    g: &WeightedGraph,
    f: &ClassFunction,
    grid: &[f64],
    config: &EvolutionConfig,
    k: Option<f64>,
) -> Result<VerificationReport, VerifyError> {
    let d = g.max_degree();
    let lip = 2.0 * d * (f.field().sup_norm() + config.partition_tolerance);
    let tol = 2.0 * lip * config.partition_tolerance + config.heat_tolerance;

    let evolved = trace(g, f, grid, config)?;
    let heat = heat_trace(g, &gamma_sq(g, f.field())?, grid, config)?;
    let mut checks = Vec::with_capacity(evolved.times.len());
    for (i, &t) in evolved.times.iter().enumerate() {
        let decay = match k {
            Some(k) => (-2.0 * k * t).exp(),
            None if t == 0.0 => 1.0,
            None => 0.0,
        };
        let lhs = &evolved.gamma_fields[i];
        let rhs = &heat.fields[i];
        let (mut worst, mut at) = (f64::INFINITY, 0);
        for x in 0..g.vertex_count() {
            let s = decay * rhs[x] - lhs[x];
            if s < worst {
                worst = s;
                at = x;
            }
        }
        checks.push(Check::at_most(format!("t={t}"), lhs[at], decay * rhs[at], tol));
    }
    let mut report = VerificationReport::new(Theorem::GradientEstimate, Instance::describe(g, f.exception()), checks);
    if let Some(k) = k {
        report.measure("curvature_bound", k);
    }
    report.measure("max_degree", d);
    report.measure("tolerance", tol);
    report.measure("max_steps", evolved.step_counts.iter().copied().max().unwrap_or(0) as f64);
    Ok(report)
}

/// Checks `max_x d(x, W) ≤ 2D/K + 1`.
pub fn check_distance_bound(g: &WeightedGraph, w: &ExceptionSet) -> Result<VerificationReport, VerifyError> {
    let k = curvature_bound(g, w)?;
    let reach = g.distances_to_set(w.members())?.into_iter().max().unwrap_or(0) as f64;
    let d = g.max_degree();
    let bound = match k {
        Some(k) if k <= 0.0 => return Err(VerifyError::NonpositiveCurvature(k)),
        Some(k) => 2.0 * d / k + 1.0,
        None => 1.0,
    };
    let check = Check::at_most("max distance to W", reach, bound, 0.0);
    let mut report = VerificationReport::new(Theorem::DistanceBound, Instance::describe(g, w), vec![check]);
    if let Some(k) = k {
        report.measure("curvature_bound", k);
    }
    report.measure("max_degree", d);
    report.measure("max_distance", reach);
    report.measure("bound", bound);
    report.measure("gap", bound - reach);
    Ok(report)
}

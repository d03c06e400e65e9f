use crate::field::ScalarField;
use crate::gamma::{gamma, gamma2_sq, gamma_sq, laplacian};
use crate::graph::WeightedGraph;
use crate::semigroup::{evolve_to_equilibrium, generator_lw, perpetual_evolve, ClassFunction, EvolutionConfig, SemigroupError};

use super::{Check, Instance, Theorem, VerificationReport, VerifyError};

const LAW_PAIRS: [(f64, f64); 3] = [(0.3, 0.7), (0.5, 0.5), (1.0, 1.0)];
const GENERATOR_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const DERIVATIVE_STEP: f64 = 1e-3;
const DERIVATIVE_TIMES: [f64; 3] = [0.0, 0.5, 1.0];
const FLAT_TOLERANCE: f64 = 1e-6;
const GAMMA2_FLOOR: f64 = 1e-10;

/// Config for evolving over a short step `h`: both tolerances shrink with
/// `h` so difference quotients keep an `O(1)` numerical error.
fn short_step_config(config: &EvolutionConfig, h: f64) -> EvolutionConfig {
    EvolutionConfig {
        heat_tolerance: config.heat_tolerance * h,
        partition_tolerance: config.partition_tolerance * h,
        ..config.clone()
    }
}

/// Runs the clause checks of the `P_t^W` property theorem on `f`.
pub fn check_semigroup_suite(g: &WeightedGraph, f: &ClassFunction, config: &EvolutionConfig) -> Result<VerificationReport, VerifyError> {
    let d = g.max_degree();
    let norm = f.field().sup_norm();
    let ptol = config.partition_tolerance;
    let htol = config.heat_tolerance;
    let mut checks = Vec::new();
    let evolve = |u: &ClassFunction, t: f64| perpetual_evolve(g, u, t, config).map(|e| e.function);

    let mut direct: Vec<(f64, ClassFunction)> = Vec::new();
    for t in [0.3, 0.5, 1.0, 2.0] {
        direct.push((t, evolve(f, t)?));
    }
    let at = |t: f64| &direct.iter().find(|(s, _)| (s - t).abs() < 1e-12).expect("precomputed time").1;

    // (i) semigroup law
    for (s, t) in LAW_PAIRS {
        let composed = evolve(at(s), t)?;
        let gap = composed.field().sup_distance(at(s + t).field());
        checks.push(Check::at_most(format!("semigroup law s={s} t={t}"), gap, 0.0, 4.0 * ptol));
    }

    // (ii) contraction, (iii) time-Lipschitz
    for (t, u) in &direct {
        checks.push(Check::at_most(format!("contraction t={t}"), u.field().sup_norm(), norm, htol));
        let moved = u.field().sup_distance(f.field());
        checks.push(Check::at_most(format!("lipschitz t={t}"), moved, 2.0 * t * d * norm, ptol));
    }

    // (iv) right derivative at 0
    let lw = generator_lw(g, f);
    let plateau = f.plateau();
    for h in GENERATOR_STEPS {
        let moved = perpetual_evolve(g, f, h, &short_step_config(config, h))?.function;
        // vertices just above the plateau may be engulfed within time h
        let band = 4.0 * h * d * norm;
        let mut residual: f64 = 0.0;
        for x in 0..g.vertex_count() {
            let lift = f.field()[x] - plateau;
            if lift > 0.0 && lift <= band {
                continue;
            }
            let quotient = (moved.field()[x] - f.field()[x]) / h;
            residual = residual.max((quotient - lw[x]).abs());
        }
        checks.push(Check::at_most(format!("generator h={h}"), residual, 8.0 * h * d * d * norm, 2.0 * (ptol + htol)));
    }

    // (v) derivative bound and (vi) Γ-derivative inequality along the orbit
    let h = DERIVATIVE_STEP;
    let short = short_step_config(config, h);
    for t in DERIVATIVE_TIMES {
        let u = if t == 0.0 { f.clone() } else { at(t).clone() };
        let un = u.field().sup_norm();
        let next = perpetual_evolve(g, &u, h, &short)?.function;
        let lap = laplacian(g, u.field())?;
        let speed = next.field().sup_distance(u.field()) / h;
        checks.push(Check::at_most(
            format!("derivative bound t={t}"),
            speed,
            lap.sup_norm() + 8.0 * h * d * d * un,
            2.0 * (ptol + htol),
        ));
        let g0 = gamma_sq(g, u.field())?;
        let g1 = gamma_sq(g, next.field())?;
        let cross = gamma(g, u.field(), &lap)?;
        let excess = (0..g.vertex_count())
            .map(|x| (g1[x] - g0[x]) / h - 2.0 * cross[x])
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::at_most(
            format!("gamma derivative t={t}"),
            excess,
            64.0 * h * d * d * d * un * un,
            8.0 * d * un * (ptol + htol),
        ));
    }

    // (vii) Γ = 0 and Γ₂ ≥ 0 on W for every computed class function
    let members = f.exception().members();
    for (t, u) in std::iter::once((0.0, f)).chain(direct.iter().map(|(t, u)| (*t, u))) {
        let gu = gamma_sq(g, u.field())?;
        let g2 = gamma2_sq(g, u.field())?;
        let gmax = members.iter().map(|&x| gu[x]).fold(0.0, f64::max);
        let g2min = members.iter().map(|&x| g2[x]).fold(f64::INFINITY, f64::min);
        checks.push(Check::at_most(format!("gamma zero on W t={t}"), gmax, 0.0, 0.0));
        checks.push(Check::at_most(format!("gamma2 nonnegative on W t={t}"), -g2min, 0.0, GAMMA2_FLOOR));
    }

    // (viii) constant limit
    let mut report_extra = Vec::new();
    match evolve_to_equilibrium(g, f, FLAT_TOLERANCE, None, config) {
        Ok(eq) => {
            checks.push(Check::at_most("equilibrium flat", eq.final_oscillation, 0.0, FLAT_TOLERANCE));
            // P_t^W ≥ P_t, whose limit is the measure average
            let average = f.field().mass(g) / ScalarField::constant(g.vertex_count(), 1.0).mass(g);
            checks.push(Check::at_most("equilibrium above heat limit", average, eq.value, FLAT_TOLERANCE));
            report_extra.push(("equilibrium_value", eq.value));
            report_extra.push(("equilibrium_time", eq.elapsed));
        }
        Err(SemigroupError::EnvelopeViolation { which, amount, time }) => {
            checks.push(Check::at_most(format!("equilibrium {which} envelope t={time}"), amount, 0.0, 2.0 * ptol));
        }
        Err(SemigroupError::NoConvergence { residual, .. }) => {
            checks.push(Check::failed("equilibrium flat", residual));
        }
        Err(e) => return Err(e.into()),
    }

    let mut report = VerificationReport::new(Theorem::SemigroupProperties, Instance::describe(g, f.exception()), checks);
    report.measure("max_degree", d);
    report.measure("sup_norm", norm);
    for (k, v) in report_extra {
        report.measure(k, v);
    }
    Ok(report)
}

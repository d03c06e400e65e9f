//! Heat semigroup `P_t = e^{tΔ}` and the perpetual cutoff semigroup `P_t^W`.
//!
//! `P_t` is evaluated by uniformization: with `c ≥ D` the matrix
//! `S = I + Δ/c` is row-stochastic with nonnegative entries and
//! `P_t = e^{−ct} Σ_k (ct)^k / k! · S^k`. The Poisson tail left after
//! truncation is added to the last retained term, so every evaluation is an
//! exact convex combination of `S^k f`: positivity, constants and the sup-norm
//! contraction are preserved up to rounding.
//!
//! `P_t^W f` is the supremum over partitions `t₁ + … + t_n = t` of
//! `Q_{t₁}^W ⋯ Q_{t_n}^W f` with `Q_s^W = S^W P_s`. It is approximated along
//! uniform dyadic partitions, which increase under refinement. The dyadic
//! sequence converges at first order in the step, so by default one level of
//! Richardson extrapolation `2 r(2n) − r(n)` is applied and projected back
//! into the cutoff class before the doubling stop rule is evaluated.

use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldError, ScalarField};
use crate::gamma::{gamma_sq, laplacian_unchecked};
use crate::graph::{ExceptionSet, WeightedGraph};

/// Largest Poisson mean handled in one uniformization chunk; keeps `e^{−λ}` far from underflow.
const MAX_CHUNK_RATE: f64 = 32.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemigroupError {
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("{stage} did not converge (residual {residual:e} after {steps} steps)")]
    NoConvergence { stage: &'static str, residual: f64, steps: usize },
    #[error("invalid evolution config: {0}")]
    InvalidConfig(String),
    #[error("field is not constant on cl(W) or dips below its plateau at vertex {0}")]
    NotInClass(usize),
    #[error("{which} envelope moved the wrong way by {amount:e} at time {time}")]
    EnvelopeViolation { which: &'static str, amount: f64, time: f64 },
    #[error("time grid must be nonnegative and strictly increasing")]
    InvalidGrid,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Tolerances and limits for [`heat_apply`] and [`perpetual_evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    /// Poisson tail bound times `‖f‖∞` at which uniformization is truncated.
    pub heat_tolerance: f64,
    /// Sup-norm doubling criterion of the partition refinement.
    pub partition_tolerance: f64,
    pub max_doublings: u32,
    /// Uniformization rate `c`; `None` uses the maximal degree `D`.
    pub uniformization_rate: Option<f64>,
    /// Accelerate the dyadic sequence by one Richardson level.
    pub extrapolate: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            heat_tolerance: 1e-12,
            partition_tolerance: 1e-8,
            max_doublings: 24,
            uniformization_rate: None,
            extrapolate: true,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self, g: &WeightedGraph) -> Result<(), SemigroupError> {
        let bad = |m: &str| Err(SemigroupError::InvalidConfig(m.to_string()));
        if !(self.heat_tolerance > 0.0) {
            return bad("heat_tolerance must be positive");
        }
        if !(self.partition_tolerance > 0.0) {
            return bad("partition_tolerance must be positive");
        }
        if self.max_doublings == 0 || self.max_doublings > 40 {
            return bad("max_doublings must be in 1..=40");
        }
        if let Some(c) = self.uniformization_rate {
            if !(c >= g.max_degree()) || !c.is_finite() {
                return bad("uniformization_rate must be finite and at least the maximal degree");
            }
        }
        Ok(())
    }

    pub fn rate(&self, g: &WeightedGraph) -> f64 {
        self.uniformization_rate.unwrap_or_else(|| g.max_degree())
    }

    /// Same config with a different partition tolerance.
    pub fn with_partition_tolerance(&self, tol: f64) -> Self {
        EvolutionConfig { partition_tolerance: tol, ..self.clone() }
    }
}

/// `S = I + Δ/c` in compressed rows.
#[derive(Debug, Clone)]
struct Uniformized {
    diag: Vec<f64>,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    coefs: Vec<f64>,
}

impl Uniformized {
    fn new(g: &WeightedGraph, rate: f64) -> Self {
        let n = g.vertex_count();
        let mut diag = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut coefs = Vec::new();
        offsets.push(0);
        for x in 0..n {
            let scale = rate * g.measure(x);
            let mut sum = 0.0;
            for &(y, w) in g.neighbors(x) {
                cols.push(y);
                coefs.push(w / scale);
                sum += w;
            }
            diag.push((1.0 - sum / scale).max(0.0));
            offsets.push(cols.len());
        }
        Uniformized { diag, offsets, cols, coefs }
    }

    #[inline]
    fn apply(&self, f: &[f64], out: &mut [f64]) {
        for x in 0..self.diag.len() {
            let mut acc = self.diag[x] * f[x];
            for k in self.offsets[x]..self.offsets[x + 1] {
                acc += self.coefs[k] * f[self.cols[k]];
            }
            out[x] = acc;
        }
    }
}

/// Poisson(λ) weights, truncated once the tail bound drops to `tol`; the tail
/// mass is folded into the last weight so the weights sum to one.
fn poisson_weights(lambda: f64, tol: f64) -> Vec<f64> {
    let mut weights = vec![(-lambda).exp()];
    let mut total = weights[0];
    let mut k = 0usize;
    loop {
        let next = weights[k] * lambda / (k + 1) as f64;
        // Σ_{j>k} p_j ≤ p_{k+1} / (1 − λ/(k+2)) once k + 2 > λ
        let ratio = lambda / (k + 2) as f64;
        if ratio < 1.0 && next / (1.0 - ratio) <= tol {
            break;
        }
        weights.push(next);
        total += next;
        k += 1;
    }
    let last = weights.len() - 1;
    weights[last] += (1.0 - total).max(0.0);
    weights
}

/// Reusable evaluator of `P_τ` for a fixed `τ`.
#[derive(Debug, Clone)]
struct HeatPropagator {
    op: Uniformized,
    chunks: usize,
    weights: Vec<f64>,
}

impl HeatPropagator {
    /// `tail_tol` bounds the truncated Poisson mass over all chunks together.
    fn new(g: &WeightedGraph, tau: f64, rate: f64, tail_tol: f64) -> Self {
        let lambda = rate * tau;
        let chunks = ((lambda / MAX_CHUNK_RATE).ceil() as usize).max(1);
        let weights = poisson_weights(lambda / chunks as f64, tail_tol / chunks as f64);
        HeatPropagator { op: Uniformized::new(g, rate), chunks, weights }
    }

    /// Overwrites `f` with `P_τ f`; `a` and `b` are scratch buffers of the same length.
    fn apply(&self, f: &mut [f64], a: &mut [f64], b: &mut [f64]) {
        for _ in 0..self.chunks {
            let (last, init) = self.weights.split_last().expect("at least one weight");
            if init.is_empty() {
                continue;
            }
            a.copy_from_slice(f);
            for v in f.iter_mut() {
                *v *= init[0];
            }
            let mut cur: &mut [f64] = a;
            let mut nxt: &mut [f64] = b;
            for &w in init[1..].iter().chain(std::iter::once(last)) {
                self.op.apply(cur, nxt);
                for (fv, sv) in f.iter_mut().zip(nxt.iter()) {
                    *fv += w * sv;
                }
                std::mem::swap(&mut cur, &mut nxt);
            }
        }
    }
}

/// `P_t f = e^{tΔ} f`.
pub fn heat_apply(g: &WeightedGraph, f: &ScalarField, t: f64, config: &EvolutionConfig) -> Result<ScalarField, SemigroupError> {
    f.check_graph(g)?;
    config.validate(g)?;
    if !(t >= 0.0) {
        return Err(SemigroupError::NegativeTime(t));
    }
    let norm = f.sup_norm();
    if t == 0.0 || norm == 0.0 {
        return Ok(f.clone());
    }
    let prop = HeatPropagator::new(g, t, config.rate(g), config.heat_tolerance / norm);
    let mut out = f.values().to_vec();
    let (mut a, mut b) = (vec![0.0; f.len()], vec![0.0; f.len()]);
    prop.apply(&mut out, &mut a, &mut b);
    Ok(ScalarField::from_vec(out))
}

/// Element of `ℓ∞^W(V)`: constant (the plateau) on `cl(W)` and not smaller anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFunction {
    field: ScalarField,
    plateau: f64,
    exception: Arc<ExceptionSet>,
}

impl ClassFunction {
    /// Validates the class invariants exactly.
    pub fn new(field: ScalarField, exception: Arc<ExceptionSet>) -> Result<Self, SemigroupError> {
        if field.len() != exception.universe() {
            return Err(FieldError::LengthMismatch { expected: exception.universe(), got: field.len() }.into());
        }
        let plateau = field[exception.closure()[0]];
        for &c in exception.closure() {
            if field[c] != plateau {
                return Err(SemigroupError::NotInClass(c));
            }
        }
        if let Some(x) = (0..field.len()).find(|&x| field[x] < plateau) {
            return Err(SemigroupError::NotInClass(x));
        }
        Ok(ClassFunction { field, plateau, exception })
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn into_field(self) -> ScalarField {
        self.field
    }

    /// Common value on `cl(W)`, which is also `min_V f`.
    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    pub fn exception(&self) -> &Arc<ExceptionSet> {
        &self.exception
    }

    pub fn values(&self) -> &[f64] {
        self.field.values()
    }

    pub fn is_constant(&self) -> bool {
        self.field.values().iter().all(|&v| v == self.plateau)
    }
}

/// `S^W f = f ∨ sup_{cl(W)} f`. Entries at or below the plateau receive the
/// plateau value bit for bit.
pub fn cutoff(f: &ScalarField, exception: &Arc<ExceptionSet>) -> ClassFunction {
    assert_eq!(f.len(), exception.universe(), "field and exception set disagree on |V|");
    let plateau = exception.closure().iter().map(|&c| f[c]).fold(f64::NEG_INFINITY, f64::max);
    let field = f.map(|v| if v <= plateau { plateau } else { v });
    ClassFunction { field, plateau, exception: Arc::clone(exception) }
}

/// `Q_t^W f = S^W P_t f`.
pub fn q_step(g: &WeightedGraph, f: &ClassFunction, t: f64, config: &EvolutionConfig) -> Result<ClassFunction, SemigroupError> {
    if !(t >= 0.0) {
        return Err(SemigroupError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(cutoff(&heat_apply(g, f.field(), t, config)?, f.exception()))
}

/// `Q_{t/n}^W ∘ ⋯ ∘ Q_{t/n}^W f` with `n` equal steps.
pub fn dyadic_product(g: &WeightedGraph, f: &ClassFunction, t: f64, steps: usize, config: &EvolutionConfig) -> Result<ClassFunction, SemigroupError> {
    f.field().check_graph(g)?;
    config.validate(g)?;
    if !(t >= 0.0) {
        return Err(SemigroupError::NegativeTime(t));
    }
    assert!(steps >= 1);
    if t == 0.0 || f.is_constant() {
        return Ok(f.clone());
    }
    let norm = f.field().sup_norm();
    let prop = HeatPropagator::new(g, t / steps as f64, config.rate(g), config.heat_tolerance / (norm * steps as f64));
    let closure = f.exception().closure();
    let n = f.field().len();
    let mut u = f.values().to_vec();
    let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
    let mut plateau = f.plateau();
    for _ in 0..steps {
        prop.apply(&mut u, &mut a, &mut b);
        plateau = closure.iter().map(|&c| u[c]).fold(f64::NEG_INFINITY, f64::max);
        for v in u.iter_mut() {
            if *v <= plateau {
                *v = plateau;
            }
        }
    }
    Ok(ClassFunction { field: ScalarField::from_vec(u), plateau, exception: Arc::clone(f.exception()) })
}

/// Result of [`perpetual_evolve`].
#[derive(Debug, Clone)]
pub struct Evolved {
    pub function: ClassFunction,
    /// Partition size of the finest dyadic level used.
    pub steps: usize,
    /// Final doubling residual in the sup norm.
    pub residual: f64,
    /// `4 t² D² ‖f‖∞ / n`, the accumulated single-step generator error bound.
    pub envelope: f64,
}

/// Approximates `P_t^W f` by refining dyadic partitions until two consecutive
/// doubling residuals fall below `partition_tolerance`.
pub fn perpetual_evolve(g: &WeightedGraph, f: &ClassFunction, t: f64, config: &EvolutionConfig) -> Result<Evolved, SemigroupError> {
    f.field().check_graph(g)?;
    config.validate(g)?;
    if !(t >= 0.0) {
        return Err(SemigroupError::NegativeTime(t));
    }
    if t == 0.0 || f.is_constant() {
        return Ok(Evolved { function: f.clone(), steps: 0, residual: 0.0, envelope: 0.0 });
    }
    let d = g.max_degree();
    let norm = f.field().sup_norm();
    let ceiling = f.field().max();
    let tol = config.partition_tolerance;
    let envelope = |n: usize| 4.0 * t * t * d * d * norm / n as f64;

    let mut raw_prev: Option<ClassFunction> = None;
    let mut ext_prev: Option<ClassFunction> = None;
    let (mut raw_below, mut ext_below) = (false, false);
    let mut residual = f64::INFINITY;
    for level in 0..=config.max_doublings {
        let n = 1usize << level;
        let raw = dyadic_product(g, f, t, n, config)?;
        if let Some(prev) = &raw_prev {
            let raw_diff = raw.field().sup_distance(prev.field());
            let ext = if config.extrapolate { Some(extrapolate(&raw, prev, ceiling)) } else { None };
            let ext_diff = match (&ext, &ext_prev) {
                (Some(e), Some(p)) => Some(e.field().sup_distance(p.field())),
                _ => None,
            };
            let raw_ok = raw_diff < tol;
            let ext_ok = ext_diff.is_some_and(|d| d < tol);
            residual = ext_diff.map_or(raw_diff, |e| e.min(raw_diff));
            if (raw_ok && raw_below) || (ext_ok && ext_below) {
                let function = ext.unwrap_or(raw);
                return Ok(Evolved { function, steps: n, residual, envelope: envelope(n) });
            }
            raw_below = raw_ok;
            ext_below = ext_ok;
            ext_prev = ext;
        }
        raw_prev = Some(raw);
    }
    Err(SemigroupError::NoConvergence {
        stage: "partition refinement",
        residual,
        steps: 1usize << config.max_doublings,
    })
}

/// `S^W((2 fine − coarse) ∧ ceiling)`.
fn extrapolate(fine: &ClassFunction, coarse: &ClassFunction, ceiling: f64) -> ClassFunction {
    let e = fine.field().zip_map(coarse.field(), |a, b| (2.0 * a - b).min(ceiling));
    cutoff(&e, fine.exception())
}

/// Right derivative of `P_t^W f` at `t = 0`: `S^W Δf` where `f` sits on its
/// plateau and `Δf` elsewhere.
pub fn generator_lw(g: &WeightedGraph, f: &ClassFunction) -> ScalarField {
    let lap = laplacian_unchecked(g, f.values());
    let lifted = f.exception().closure().iter().map(|&c| lap[c]).fold(f64::NEG_INFINITY, f64::max);
    let mut out = lap.clone();
    for x in 0..out.len() {
        if f.field()[x] == f.plateau() {
            out[x] = lap[x].max(lifted);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Equilibrium {
    /// Midpoint of the final `sup` and `inf`.
    pub value: f64,
    pub elapsed: f64,
    pub final_oscillation: f64,
    /// `(t, inf_V P_t^W f, sup_V P_t^W f)` at every unit time.
    pub envelopes: Vec<(f64, f64, f64)>,
}

/// Advances in unit time blocks until `sup − inf < flat_tolerance`.
///
/// `horizon` defaults to `10⁴ / D`.
pub fn evolve_to_equilibrium(
    g: &WeightedGraph,
    f: &ClassFunction,
    flat_tolerance: f64,
    horizon: Option<f64>,
    config: &EvolutionConfig,
) -> Result<Equilibrium, SemigroupError> {
    let horizon = horizon.unwrap_or(1e4 / g.max_degree());
    let slack = 2.0 * config.partition_tolerance;
    let mut u = f.clone();
    let mut elapsed = 0.0;
    let (mut inf, mut sup) = (u.field().min(), u.field().max());
    let mut envelopes = vec![(0.0, inf, sup)];
    while sup - inf >= flat_tolerance {
        if elapsed >= horizon {
            return Err(SemigroupError::NoConvergence {
                stage: "equilibrium",
                residual: sup - inf,
                steps: elapsed as usize,
            });
        }
        u = perpetual_evolve(g, &u, 1.0, config)?.function;
        elapsed += 1.0;
        let (ni, ns) = (u.field().min(), u.field().max());
        if ni < inf - slack {
            return Err(SemigroupError::EnvelopeViolation { which: "inf", amount: inf - ni, time: elapsed });
        }
        if ns > sup + slack {
            return Err(SemigroupError::EnvelopeViolation { which: "sup", amount: ns - sup, time: elapsed });
        }
        inf = ni;
        sup = ns;
        envelopes.push((elapsed, inf, sup));
    }
    Ok(Equilibrium { value: 0.5 * (inf + sup), elapsed, final_oscillation: sup - inf, envelopes })
}

/// Snapshots of `P_t^W f` and `Γ P_t^W f` on a time grid.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub fields: Vec<ClassFunction>,
    pub gamma_fields: Vec<ScalarField>,
    pub step_counts: Vec<usize>,
}

fn checked_grid(grid: &[f64]) -> Result<Vec<f64>, SemigroupError> {
    let ok = grid.iter().all(|t| t.is_finite() && *t >= 0.0) && grid.windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(SemigroupError::InvalidGrid);
    }
    let mut times = vec![0.0];
    times.extend(grid.iter().copied().filter(|&t| t > 0.0));
    Ok(times)
}

/// Advances incrementally through `grid` using `P_s^W ∘ P_t^W = P_{s+t}^W`.
/// Time 0 is always the first entry.
pub fn trace(g: &WeightedGraph, f: &ClassFunction, grid: &[f64], config: &EvolutionConfig) -> Result<EvolutionTrace, SemigroupError> {
    let times = checked_grid(grid)?;
    let mut fields = vec![f.clone()];
    let mut gamma_fields = vec![gamma_sq(g, f.field())?];
    let mut step_counts = vec![0];
    for w in times.windows(2) {
        let next = perpetual_evolve(g, fields.last().unwrap(), w[1] - w[0], config)?;
        gamma_fields.push(gamma_sq(g, next.function.field())?);
        step_counts.push(next.steps);
        fields.push(next.function);
    }
    Ok(EvolutionTrace { times, fields, gamma_fields, step_counts })
}

/// Snapshots of `P_t f` and `Γ P_t f`.
#[derive(Debug, Clone)]
pub struct HeatTrace {
    pub times: Vec<f64>,
    pub fields: Vec<ScalarField>,
    pub gamma_fields: Vec<ScalarField>,
}

pub fn heat_trace(g: &WeightedGraph, f: &ScalarField, grid: &[f64], config: &EvolutionConfig) -> Result<HeatTrace, SemigroupError> {
    let times = checked_grid(grid)?;
    let mut fields = vec![f.clone()];
    for w in times.windows(2) {
        let next = heat_apply(g, fields.last().unwrap(), w[1] - w[0], config)?;
        fields.push(next);
    }
    let gamma_fields = fields.iter().map(|u| gamma_sq(g, u)).collect::<Result<_, _>>()?;
    Ok(HeatTrace { times, fields, gamma_fields })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Family, MeasureMode};

    fn k2() -> WeightedGraph {
        WeightedGraph::from_edges(&[(0, 1, 1.0)], MeasureMode::Unit).unwrap()
    }

    fn sf(v: &[f64]) -> ScalarField {
        ScalarField::new(v.to_vec()).unwrap()
    }

    #[test]
    fn poisson_weights_sum_to_one() {
        for lambda in [1e-6, 0.3, 5.0, 31.9] {
            let w = poisson_weights(lambda, 1e-14);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(w.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn heat_identity_and_constants() {
        let g = WeightedGraph::generate(&Family::Cycle(5), MeasureMode::Unit).unwrap();
        let cfg = EvolutionConfig::default();
        let f = sf(&[0.0, 1.0, -2.0, 0.5, 3.0]);
        assert_eq!(heat_apply(&g, &f, 0.0, &cfg).unwrap(), f);
        let c = ScalarField::constant(5, 1.25);
        assert!(heat_apply(&g, &c, 3.7, &cfg).unwrap().sup_distance(&c) < 1e-14);
        assert_eq!(heat_apply(&g, &f, -1.0, &cfg).unwrap_err(), SemigroupError::NegativeTime(-1.0));
    }

    #[test]
    fn heat_on_k2_closed_form() {
        let g = k2();
        let cfg = EvolutionConfig::default();
        for t in [0.01, 0.5, 1.0, 7.0, 40.0] {
            let u = heat_apply(&g, &sf(&[0.0, 1.0]), t, &cfg).unwrap();
            let e = (-2.0 * t).exp();
            assert!((u[0] - (1.0 - e) / 2.0).abs() < 1e-10);
            assert!((u[1] - (1.0 + e) / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn cutoff_examples() {
        let g = WeightedGraph::generate(&Family::Path(5), MeasureMode::Unit).unwrap();
        let w = Arc::new(ExceptionSet::new(&g, [0]).unwrap());
        let c = cutoff(&sf(&[0.0, 1.0, 2.0, 3.0, 4.0]), &w);
        assert_eq!(c.values(), &[1.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(c.plateau(), 1.0);
        assert_eq!(cutoff(c.field(), &w), c);
        let k = cutoff(&ScalarField::constant(5, 2.0), &w);
        assert!(k.is_constant() && k.plateau() == 2.0);
    }

    #[test]
    fn class_function_validation() {
        let g = WeightedGraph::generate(&Family::Path(4), MeasureMode::Unit).unwrap();
        let w = Arc::new(ExceptionSet::new(&g, [0]).unwrap());
        assert!(ClassFunction::new(sf(&[1.0, 1.0, 3.0, 2.0]), Arc::clone(&w)).is_ok());
        assert_eq!(ClassFunction::new(sf(&[1.0, 2.0, 3.0, 2.0]), Arc::clone(&w)).unwrap_err(), SemigroupError::NotInClass(1));
        assert_eq!(ClassFunction::new(sf(&[1.0, 1.0, 0.5, 2.0]), w).unwrap_err(), SemigroupError::NotInClass(2));
    }

    #[test]
    fn q_step_dominates_heat() {
        let g = WeightedGraph::generate(&Family::Path(5), MeasureMode::Unit).unwrap();
        let w = Arc::new(ExceptionSet::new(&g, [0]).unwrap());
        let cfg = EvolutionConfig::default();
        let f = cutoff(&sf(&[0.0, 0.0, 1.0, 3.0, 2.0]), &w);
        for t in [0.0, 0.1, 1.0] {
            let q = q_step(&g, &f, t, &cfg).unwrap();
            let p = heat_apply(&g, f.field(), t, &cfg).unwrap();
            assert!(q.field().max_excess(&p) <= 0.0);
            let d = g.max_degree();
            assert!(q.field().sup_distance(f.field()) <= 2.0 * t * d * f.field().sup_norm() + 1e-12);
        }
    }

    #[test]
    fn generator_branches() {
        let g = WeightedGraph::generate(&Family::Path(4), MeasureMode::Unit).unwrap();
        let w = Arc::new(ExceptionSet::new(&g, [0]).unwrap());
        let f = cutoff(&sf(&[0.0, 0.0, 2.0, 1.0]), &w);
        // Δf = (0, 2, −3, 1); plateau vertices 0 and 1 take max(Δf, sup_{cl W} Δf) = 2
        assert_eq!(generator_lw(&g, &f).values(), &[2.0, 2.0, -3.0, 1.0]);
        let c = cutoff(&ScalarField::constant(4, 1.0), &w);
        assert_eq!(generator_lw(&g, &c).sup_norm(), 0.0);
    }

    #[test]
    fn constant_is_stationary() {
        let g = WeightedGraph::generate(&Family::Cycle(6), MeasureMode::Unit).unwrap();
        let w = Arc::new(ExceptionSet::new(&g, [2]).unwrap());
        let c = cutoff(&ScalarField::constant(6, -0.5), &w);
        let cfg = EvolutionConfig::default();
        let e = perpetual_evolve(&g, &c, 3.0, &cfg).unwrap();
        assert_eq!(e.function, c);
        let eq = evolve_to_equilibrium(&g, &c, 1e-6, None, &cfg).unwrap();
        assert_eq!((eq.value, eq.elapsed), (-0.5, 0.0));
    }

    #[test]
    fn trace_starts_with_input() {
        let g = WeightedGraph::generate(&Family::Path(3), MeasureMode::Unit).unwrap();
        let w = Arc::new(ExceptionSet::new(&g, [0]).unwrap());
        let f = cutoff(&sf(&[0.0, 0.0, 1.0]), &w);
        let tr = trace(&g, &f, &[0.0], &EvolutionConfig::default()).unwrap();
        assert_eq!(tr.times, vec![0.0]);
        assert_eq!(tr.fields, vec![f.clone()]);
        assert_eq!(tr.gamma_fields[0], gamma_sq(&g, f.field()).unwrap());
        assert_eq!(trace(&g, &f, &[0.5, 0.2], &EvolutionConfig::default()).unwrap_err(), SemigroupError::InvalidGrid);
    }

    #[test]
    fn config_validation() {
        let g = k2();
        let mut cfg = EvolutionConfig::default();
        assert!(cfg.validate(&g).is_ok());
        cfg.uniformization_rate = Some(0.5);
        assert!(cfg.validate(&g).is_err());
        cfg.uniformization_rate = Some(3.0);
        assert!(cfg.validate(&g).is_ok());
        cfg.partition_tolerance = 0.0;
        assert!(cfg.validate(&g).is_err());
    }
}

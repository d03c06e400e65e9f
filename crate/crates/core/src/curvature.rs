//! Optimal Bakry-Émery curvature `K(x)` per vertex.
//!
//! `K(x; n) = inf { (Γ₂f(x) − (Δf)²(x)/n) / Γf(x) : Γf(x) > 0 }`. With `f(x) = 0`
//! the numerator is a quadratic form `M` on the punctured 2-ball and the
//! denominator a positive diagonal form `Q` on the 1-sphere. Splitting `M`
//! into the 1-sphere block `A`, the 2-sphere block `C` and the coupling `B`,
//! the 2-sphere values are eliminated by the Schur complement
//! `A − B C⁺ Bᵀ` and `K(x)` is the smallest eigenvalue of the pencil
//! `(A − B C⁺ Bᵀ, Q)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::gamma::{gamma2_at, gamma_at, laplacian_at, local_forms};
use crate::graph::{ExceptionSet, GraphError, VertexId, WeightedGraph};
use crate::linalg::{dot, symmetric_eigen, symmetric_pseudo_inverse, Matrix};

/// Eigenvalues of the 2-sphere block below `−TOL_PSD` make the curvature `−∞`.
pub const TOL_PSD: f64 = 1e-10;
/// Null-space leakage of the coupling block above this (relative) level makes the curvature `−∞`.
pub const TOL_RNG: f64 = 1e-8;
/// Relative eigenvalue cutoff of the pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-10;

/// Upper dimension bound `n ∈ (0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Dimension {
    Finite(f64),
    Infinite,
}

impl Dimension {
    /// `1/n`, zero for `n = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Dimension::Finite(n) => 1.0 / n,
            Dimension::Infinite => 0.0,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(n) => write!(f, "{n}"),
            Dimension::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Dimension::Infinite),
            t => match t.parse::<f64>() {
                Ok(n) if n > 0.0 && n.is_finite() => Ok(Dimension::Finite(n)),
                Ok(n) if n == f64::INFINITY => Ok(Dimension::Infinite),
                _ => Err(format!("dimension must be a positive real or `inf`, got `{s}`")),
            },
        }
    }
}

/// A curvature value: a real number or the `−∞` sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curvature {
    Finite(f64),
    NegInfinity,
}

impl Curvature {
    pub fn finite(self) -> Option<f64> {
        match self {
            Curvature::Finite(k) => Some(k),
            Curvature::NegInfinity => None,
        }
    }

    /// Ordering key; the sentinel maps to `f64::NEG_INFINITY`.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn is_neg_infinity(self) -> bool {
        matches!(self, Curvature::NegInfinity)
    }

    pub fn min(self, other: Curvature) -> Curvature {
        if other.as_f64() < self.as_f64() {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Curvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curvature::Finite(k) => write!(f, "{k}"),
            Curvature::NegInfinity => f.write_str("-inf"),
        }
    }
}

/// Field on the punctured 2-ball attaining the optimum, with `f(center) = 0`
/// and `Γf(center) = 1` when the curvature is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub vertices: Vec<VertexId>,
    pub values: Vec<f64>,
}

impl Certificate {
    pub fn to_field(&self, vertex_count: usize) -> ScalarField {
        let mut f = ScalarField::zeros(vertex_count);
        for (v, &val) in self.vertices.iter().zip(&self.values) {
            f[v.index()] = val;
        }
        f
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureResult {
    pub vertex: VertexId,
    pub dimension: Dimension,
    pub value: Curvature,
    pub certificate: Option<Certificate>,
}

/// Exact optimal curvature at `x`.
pub fn curvature_at(g: &WeightedGraph, x: VertexId, dimension: Dimension) -> Result<CurvatureResult, GraphError> {
    g.check_vertex(x.index())?;
    let problem = local_forms(g, x);
    let s1 = problem.sphere1.len();
    let s2 = problem.sphere2.len();
    let vertices: Vec<VertexId> = problem.sphere1.iter().chain(&problem.sphere2).copied().collect();
    let result = |value, certificate| CurvatureResult { vertex: x, dimension, value, certificate };

    let mut form = problem.gamma2_form.clone();
    let inv_n = dimension.reciprocal();
    if inv_n > 0.0 {
        for i in 0..s1 {
            for j in 0..s1 {
                form[(i, j)] -= inv_n * problem.laplacian_row[i] * problem.laplacian_row[j];
            }
        }
    }
    let ys: Vec<usize> = (0..s1).collect();
    let zs: Vec<usize> = (s1..s1 + s2).collect();
    let a = form.select(&ys, &ys);

    let (reduced, eliminate) = if s2 == 0 {
        (a, None)
    } else {
        let b = form.select(&ys, &zs);
        let c = form.select(&zs, &zs);
        let pinv = symmetric_pseudo_inverse(&c, PINV_CUTOFF);
        if pinv.eigen.values[0] < -TOL_PSD {
            // Γf(x) = 0 but Γ₂f(x) < 0
            let mut witness = vec![0.0; s1];
            witness.extend(pinv.eigen.vector(0));
            return Ok(result(Curvature::NegInfinity, Some(Certificate { vertices, values: witness })));
        }
        let bt = b.transpose();
        let leak = pinv.null_projector.mul(&bt);
        if leak.max_abs() > TOL_RNG * bt.max_abs().max(1.0) {
            return Ok(result(Curvature::NegInfinity, None));
        }
        let elim = pinv.inverse.mul(&bt); // C⁺ Bᵀ
        (a.sub(&b.mul(&elim)).symmetrized(), Some(elim))
    };

    let inv_sqrt_q: Vec<f64> = problem.gamma_form.iter().map(|q| 1.0 / q.sqrt()).collect();
    let mut scaled = reduced;
    for i in 0..s1 {
        for j in 0..s1 {
            scaled[(i, j)] *= inv_sqrt_q[i] * inv_sqrt_q[j];
        }
    }
    let eigen = symmetric_eigen(&scaled);
    let lambda = eigen.values[0];
    let y: Vec<f64> = eigen.vector(0).iter().zip(&inv_sqrt_q).map(|(u, s)| u * s).collect();
    let mut values = y.clone();
    if let Some(elim) = eliminate {
        values.extend(elim.mul_vec(&y).into_iter().map(|v| -v));
    }
    Ok(result(Curvature::Finite(lambda), Some(Certificate { vertices, values })))
}

/// Curvature at every vertex, ordered by vertex index.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    pub dimension: Dimension,
    pub results: Vec<CurvatureResult>,
}

impl CurvatureProfile {
    pub fn values(&self) -> Vec<Curvature> {
        self.results.iter().map(|r| r.value).collect()
    }

    pub fn get(&self, x: usize) -> Curvature {
        self.results[x].value
    }

    /// Minimum over `subset`, `None` when it is empty.
    pub fn min_over(&self, subset: &[usize]) -> Option<Curvature> {
        subset.iter().map(|&x| self.get(x)).reduce(Curvature::min)
    }

    pub fn min(&self) -> Curvature {
        self.values().into_iter().reduce(Curvature::min).expect("profile is nonempty")
    }

    /// Lowest-index vertex attaining the minimum.
    pub fn argmin(&self) -> VertexId {
        let mut best = 0;
        for x in 1..self.results.len() {
            if self.get(x).as_f64() < self.get(best).as_f64() {
                best = x;
            }
        }
        VertexId(best)
    }
}

/// Runs [`curvature_at`] for every vertex on the current rayon pool.
pub fn curvature_profile(g: &WeightedGraph, dimension: Dimension) -> CurvatureProfile {
    let results = (0..g.vertex_count())
        .into_par_iter()
        .map(|x| curvature_at(g, VertexId(x), dimension).expect("vertex in range"))
        .collect();
    CurvatureProfile { dimension, results }
}

/// Exception set chosen from a profile, with the curvature bound it certifies.
#[derive(Debug, Clone)]
pub struct ExceptionSelection {
    pub set: ExceptionSet,
    /// `min_{V \ W} K`, `None` when `W = V`.
    pub bound: Option<Curvature>,
}

/// `W = {x : K(x) < threshold}`.
pub fn exception_set(g: &WeightedGraph, profile: &CurvatureProfile, threshold: f64) -> Result<ExceptionSelection, GraphError> {
    let members: Vec<usize> = (0..profile.results.len()).filter(|&x| profile.get(x).as_f64() < threshold).collect();
    let set = ExceptionSet::new(g, members)?;
    let bound = profile.min_over(&set.complement());
    Ok(ExceptionSelection { set, bound })
}

/// Outcome of checking `Γ₂f(x) ≥ (Δf)²(x)/n + K Γf(x)` for one witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdCheck {
    /// `Γ₂f(x) − (Δf)²(x)/n − K Γf(x)`.
    pub slack: f64,
}

impl CdCheck {
    pub fn holds(self) -> bool {
        self.slack >= 0.0
    }
}

/// Direct evaluation of the CD(K, n) inequality at `x` for the field `f`.
pub fn verify_cd_at(g: &WeightedGraph, x: VertexId, k: f64, dimension: Dimension, f: &ScalarField) -> CdCheck {
    let x = x.index();
    let v = f.values();
    let lap = laplacian_at(g, v, x);
    let slack = gamma2_at(g, v, v, x) - dimension.reciprocal() * lap * lap - k * gamma_at(g, v, v, x);
    CdCheck { slack }
}

/// Sampling oracle for `K(x; n)`, independent of [`curvature_at`].
///
/// The quotient's forms are built by polarizing the pointwise operators on
/// indicator fields. Each restart starts from a random field on the punctured
/// 2-ball and descends the Rayleigh quotient along conjugate directions with
/// exact line search, renormalizing to `Γf(x) = 1` after every step. Returns
/// the best quotient found, which can only overestimate the infimum.
pub fn brute_force_curvature(g: &WeightedGraph, x: VertexId, dimension: Dimension, restarts: usize, seed: u64) -> f64 {
    assert!(restarts >= 1, "at least one restart");
    let xi = x.index();
    let n = g.vertex_count();
    let dist = g.distances_to_set(&[xi]).expect("valid vertex");
    let ball: Vec<usize> = (0..n).filter(|&v| dist[v] == 1 || dist[v] == 2).collect();
    let k = ball.len();

    let basis: Vec<Vec<f64>> = ball.iter().map(|&v| ScalarField::delta(n, v).into_values()).collect();
    let lap: Vec<f64> = basis.iter().map(|e| laplacian_at(g, e, xi)).collect();
    let inv_n = dimension.reciprocal();
    let mut num = Matrix::zeros(k, k);
    let mut den = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..=i {
            let m = gamma2_at(g, &basis[i], &basis[j], xi) - inv_n * lap[i] * lap[j];
            let q = gamma_at(g, &basis[i], &basis[j], xi);
            num[(i, j)] = m;
            num[(j, i)] = m;
            den[(i, j)] = q;
            den[(j, i)] = q;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (xi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (0..restarts)
        .map(|_| {
            let start: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            descend_rayleigh(&num, &den, start)
        })
        .fold(f64::INFINITY, f64::min)
}

fn rayleigh(num: &Matrix, den: &Matrix, v: &[f64]) -> f64 {
    num.quadratic_form(v) / den.quadratic_form(v)
}

/// Minimizer of `(a + 2bα + cα²) / (p + 2qα + rα²)` over α with positive denominator.
fn exact_line_search(coef: [f64; 6]) -> Option<f64> {
    let [a, b, c, p, q, r] = coef;
    let lead = c * q - b * r;
    let mid = c * p - a * r;
    let tail = b * p - a * q;
    let mut roots = Vec::with_capacity(2);
    let scale = lead.abs().max(mid.abs()).max(tail.abs());
    if scale == 0.0 {
        return None;
    }
    if lead.abs() <= 1e-14 * scale {
        if mid != 0.0 {
            roots.push(-tail / mid);
        }
    } else {
        let disc = mid * mid - 4.0 * lead * tail;
        if disc >= 0.0 {
            let s = disc.sqrt();
            // numerically stable pair
            let t = -0.5 * (mid + mid.signum() * s);
            if t != 0.0 {
                roots.push(t / lead);
                roots.push(tail / t);
            } else {
                roots.push(0.0);
            }
        }
    }
    let value = |al: f64| {
        let d = p + 2.0 * q * al + r * al * al;
        if d > 0.0 {
            (a + 2.0 * b * al + c * al * al) / d
        } else {
            f64::INFINITY
        }
    };
    roots.into_iter().filter(|al| al.is_finite()).min_by(|x, y| value(*x).total_cmp(&value(*y)))
}

fn descend_rayleigh(num: &Matrix, den: &Matrix, mut v: Vec<f64>) -> f64 {
    let k = v.len();
    let normalize = |v: &mut Vec<f64>| {
        let s = den.quadratic_form(v).sqrt();
        if s > 0.0 {
            v.iter_mut().for_each(|x| *x /= s);
        }
    };
    normalize(&mut v);
    let gradient = |v: &[f64]| -> (f64, Vec<f64>) {
        let mv = num.mul_vec(v);
        let qv = den.mul_vec(v);
        let p = dot(v, &qv);
        let r = dot(v, &mv) / p;
        (r, mv.iter().zip(&qv).map(|(m, q)| 2.0 * (m - r * q) / p).collect())
    };
    let (mut best, mut grad) = gradient(&v);
    let mut dir: Vec<f64> = grad.iter().map(|g| -g).collect();
    let max_iter = 60 * k + 400;
    let mut stalls = 0;
    for it in 0..max_iter {
        let gnorm = dot(&grad, &grad).sqrt();
        if gnorm <= 1e-13 * (1.0 + best.abs()) {
            break;
        }
        if dot(&grad, &dir) >= 0.0 || it % (k + 1) == 0 {
            dir = grad.iter().map(|g| -g).collect();
        }
        let md = num.mul_vec(&dir);
        let qd = den.mul_vec(&dir);
        let coef = [
            num.quadratic_form(&v),
            dot(&v, &md),
            dot(&dir, &md),
            den.quadratic_form(&v),
            dot(&v, &qd),
            dot(&dir, &qd),
        ];
        let Some(alpha) = exact_line_search(coef) else { break };
        let candidate: Vec<f64> = v.iter().zip(&dir).map(|(x, d)| x + alpha * d).collect();
        let value = rayleigh(num, den, &candidate);
        if !(value < best) {
            stalls += 1;
            if stalls > 3 {
                break;
            }
            dir = grad.iter().map(|g| -g).collect();
            continue;
        }
        stalls = 0;
        v = candidate;
        normalize(&mut v);
        let (r, g_new) = gradient(&v);
        // Polak-Ribière with restart
        let beta = (dot(&g_new, &g_new) - dot(&g_new, &grad)) / dot(&grad, &grad);
        let beta = if beta.is_finite() { beta.max(0.0) } else { 0.0 };
        dir = g_new.iter().zip(&dir).map(|(g, d)| -g + beta * d).collect();
        grad = g_new;
        best = r;
        if best < -1e12 {
            return f64::NEG_INFINITY;
        }
    }
    best
}

//! Graph Laplacian and the Bakry-Émery forms Γ and Γ₂.
//!
//! Everything is applied matrix-free over the adjacency lists. Γ uses the
//! expanded difference-product sum; [`gamma_from_laplacians`] keeps the
//! defining `Δ(fg) − fΔg − gΔf` combination as a reference route.

use crate::field::{FieldError, ScalarField};
use crate::graph::{VertexId, WeightedGraph};
use crate::linalg::Matrix;

/// `Δf(x) = (1/m(x)) Σ_y w(x,y) (f(y) − f(x))`.
pub fn laplacian(g: &WeightedGraph, f: &ScalarField) -> Result<ScalarField, FieldError> {
    f.check_graph(g)?;
    Ok(laplacian_unchecked(g, f.values()))
}

pub(crate) fn laplacian_unchecked(g: &WeightedGraph, f: &[f64]) -> ScalarField {
    ScalarField::from_vec((0..g.vertex_count()).map(|x| laplacian_at(g, f, x)).collect())
}

/// `Δf` evaluated at a single vertex.
#[inline]
pub fn laplacian_at(g: &WeightedGraph, f: &[f64], x: usize) -> f64 {
    let fx = f[x];
    g.neighbors(x).iter().map(|&(y, w)| w * (f[y] - fx)).sum::<f64>() / g.measure(x)
}

/// `Γ(f, h)(x) = (1/2m(x)) Σ_y w(x,y) (f(y) − f(x)) (h(y) − h(x))`.
pub fn gamma(g: &WeightedGraph, f: &ScalarField, h: &ScalarField) -> Result<ScalarField, FieldError> {
    f.check_graph(g)?;
    h.check_graph(g)?;
    Ok(ScalarField::from_vec((0..g.vertex_count()).map(|x| gamma_at(g, f.values(), h.values(), x)).collect()))
}

/// `Γf = Γ(f, f)`.
pub fn gamma_sq(g: &WeightedGraph, f: &ScalarField) -> Result<ScalarField, FieldError> {
    gamma(g, f, f)
}

#[inline]
pub fn gamma_at(g: &WeightedGraph, f: &[f64], h: &[f64], x: usize) -> f64 {
    let (fx, hx) = (f[x], h[x]);
    g.neighbors(x).iter().map(|&(y, w)| w * (f[y] - fx) * (h[y] - hx)).sum::<f64>() / (2.0 * g.measure(x))
}

/// Γ through its definition `2Γ(f,h) = Δ(fh) − fΔh − hΔf`.
pub fn gamma_from_laplacians(g: &WeightedGraph, f: &ScalarField, h: &ScalarField) -> Result<ScalarField, FieldError> {
    let fh = f.zip_map(h, |a, b| a * b);
    let lap_fh = laplacian(g, &fh)?;
    let lap_h = laplacian(g, h)?;
    let lap_f = laplacian(g, f)?;
    Ok(ScalarField::from_vec(
        (0..g.vertex_count()).map(|x| 0.5 * (lap_fh[x] - f[x] * lap_h[x] - h[x] * lap_f[x])).collect(),
    ))
}

/// `2Γ₂(f,h) = ΔΓ(f,h) − Γ(f,Δh) − Γ(h,Δf)`.
pub fn gamma2(g: &WeightedGraph, f: &ScalarField, h: &ScalarField) -> Result<ScalarField, FieldError> {
    let gfh = gamma(g, f, h)?;
    let lap_h = laplacian(g, h)?;
    let lap_f = laplacian(g, f)?;
    let lap_gfh = laplacian(g, &gfh)?;
    let g1 = gamma(g, f, &lap_h)?;
    let g2 = gamma(g, h, &lap_f)?;
    Ok(ScalarField::from_vec((0..g.vertex_count()).map(|x| 0.5 * (lap_gfh[x] - g1[x] - g2[x])).collect()))
}

/// `Γ₂f = Γ₂(f, f)`.
pub fn gamma2_sq(g: &WeightedGraph, f: &ScalarField) -> Result<ScalarField, FieldError> {
    gamma2(g, f, f)
}

/// `Γ₂(f, h)` at a single vertex, touching only the 2-ball around it.
pub fn gamma2_at(g: &WeightedGraph, f: &[f64], h: &[f64], x: usize) -> f64 {
    let mx = g.measure(x);
    let gx = gamma_at(g, f, h, x);
    let lap_f_x = laplacian_at(g, f, x);
    let lap_h_x = laplacian_at(g, h, x);
    let (fx, hx) = (f[x], h[x]);
    let mut lap_gamma = 0.0;
    let mut cross = 0.0;
    for &(y, w) in g.neighbors(x) {
        lap_gamma += w * (gamma_at(g, f, h, y) - gx);
        cross += w * ((f[y] - fx) * (laplacian_at(g, h, y) - lap_h_x) + (h[y] - hx) * (laplacian_at(g, f, y) - lap_f_x));
    }
    0.5 * (lap_gamma / mx - cross / (2.0 * mx))
}

/// The quadratic forms `Γf(x)`, `Γ₂f(x)` and the linear form `Δf(x)` written
/// in the values of `f` on the punctured 2-ball of `x`, with `f(x) = 0`.
///
/// Local coordinates list `sphere1` first and then `sphere2`, each in
/// ascending vertex order.
#[derive(Debug, Clone)]
pub struct LocalCurvatureProblem {
    pub center: VertexId,
    pub sphere1: Vec<VertexId>,
    pub sphere2: Vec<VertexId>,
    /// Symmetric, size `(|S₁| + |S₂|)²`.
    pub gamma2_form: Matrix,
    /// Diagonal of the Γ form, `w(x,y) / (2 m(x))` for `y ∈ S₁`.
    pub gamma_form: Vec<f64>,
    /// `Δf(x) = Σ_{y ∈ S₁} laplacian_row[y] f(y)` when `f(x) = 0`.
    pub laplacian_row: Vec<f64>,
}

impl LocalCurvatureProblem {
    pub fn dim(&self) -> usize {
        self.sphere1.len() + self.sphere2.len()
    }

    /// `Γ` form as a full diagonal matrix on the `S₁` block.
    pub fn gamma_matrix(&self) -> Matrix {
        Matrix::from_diagonal(&self.gamma_form)
    }

    /// Local coordinates of `f − f(center)`.
    pub fn restrict(&self, f: &[f64]) -> Vec<f64> {
        let c = f[self.center.index()];
        self.sphere1.iter().chain(&self.sphere2).map(|v| f[v.index()] - c).collect()
    }

    /// Field that is zero off the punctured 2-ball and takes the local coordinates on it.
    pub fn extend(&self, local: &[f64], vertex_count: usize) -> ScalarField {
        assert_eq!(local.len(), self.dim());
        let mut f = ScalarField::zeros(vertex_count);
        for (v, &val) in self.sphere1.iter().chain(&self.sphere2).zip(local) {
            f[v.index()] = val;
        }
        f
    }

    pub fn eval_gamma(&self, local: &[f64]) -> f64 {
        self.gamma_form.iter().zip(local).map(|(q, v)| q * v * v).sum()
    }

    pub fn eval_gamma2(&self, local: &[f64]) -> f64 {
        self.gamma2_form.quadratic_form(local)
    }

    pub fn eval_laplacian(&self, local: &[f64]) -> f64 {
        self.laplacian_row.iter().zip(local).map(|(l, v)| l * v).sum()
    }
}

/// Sparse linear functional on local coordinates.
type Functional = Vec<(usize, f64)>;

fn add_outer(m: &mut Matrix, coef: f64, a: &Functional, b: &Functional) {
    // symmetric part of coef · a bᵀ
    for &(i, ai) in a {
        for &(j, bj) in b {
            let v = 0.5 * coef * ai * bj;
            m[(i, j)] += v;
            m[(j, i)] += v;
        }
    }
}

/// Assembles the [`LocalCurvatureProblem`] at `x`.
pub fn local_forms(g: &WeightedGraph, x: VertexId) -> LocalCurvatureProblem {
    let xi = x.index();
    let n = g.vertex_count();
    let sphere1: Vec<usize> = g.neighbors(xi).iter().map(|&(y, _)| y).collect();
    let mut in_ball = vec![false; n];
    in_ball[xi] = true;
    for &y in &sphere1 {
        in_ball[y] = true;
    }
    let mut sphere2: Vec<usize> = sphere1
        .iter()
        .flat_map(|&y| g.neighbors(y).iter().map(|&(z, _)| z))
        .filter(|&z| !in_ball[z])
        .collect();
    sphere2.sort_unstable();
    sphere2.dedup();

    let mut local = vec![None; n];
    for (i, &v) in sphere1.iter().chain(&sphere2).enumerate() {
        local[v] = Some(i);
    }
    let dim = sphere1.len() + sphere2.len();

    // f(b) − f(a), with the center coordinate pinned to zero
    let diff = |a: usize, b: usize| -> Functional {
        let mut out = Vec::with_capacity(2);
        if let Some(i) = local[b] {
            out.push((i, 1.0));
        }
        if let Some(i) = local[a] {
            out.push((i, -1.0));
        }
        out
    };
    let lap = |v: usize| -> Functional {
        let mv = g.measure(v);
        let mut out: Functional = g
            .neighbors(v)
            .iter()
            .filter_map(|&(u, w)| local[u].map(|i| (i, w / mv)))
            .collect();
        if let Some(i) = local[v] {
            out.push((i, -g.degree(v)));
        }
        out
    };

    let mx = g.measure(xi);
    let deg_x = g.degree(xi);
    let lap_x = lap(xi);
    let mut form = Matrix::zeros(dim, dim);
    for &(y, wxy) in g.neighbors(xi) {
        let cy = wxy / (2.0 * mx);
        let my = g.measure(y);
        // ½ Δ Γf (x): the Γf(y) part
        for &(u, wyu) in g.neighbors(y) {
            let l = diff(y, u);
            add_outer(&mut form, cy * wyu / (2.0 * my), &l, &l);
        }
        // −Γ(f, Δf)(x)
        let mut dlap = lap(y);
        dlap.extend(lap_x.iter().map(|&(i, c)| (i, -c)));
        add_outer(&mut form, -cy, &diff(xi, y), &dlap);
    }
    // ½ Δ Γf (x): the −Γf(x) part, Σ_y c_y = Deg(x) / 2
    let gamma_form: Vec<f64> = g.neighbors(xi).iter().map(|&(_, w)| w / (2.0 * mx)).collect();
    for (i, q) in gamma_form.iter().enumerate() {
        form[(i, i)] -= 0.5 * deg_x * q;
    }
    let laplacian_row = g.neighbors(xi).iter().map(|&(_, w)| w / mx).collect();

    LocalCurvatureProblem {
        center: x,
        sphere1: sphere1.into_iter().map(VertexId).collect(),
        sphere2: sphere2.into_iter().map(VertexId).collect(),
        gamma2_form: form.symmetrized(),
        gamma_form,
        laplacian_row,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Family, MeasureMode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k2() -> WeightedGraph {
        WeightedGraph::from_edges(&[(0, 1, 1.0)], MeasureMode::Unit).unwrap()
    }

    fn field(v: &[f64]) -> ScalarField {
        ScalarField::new(v.to_vec()).unwrap()
    }

    fn weighted_random(seed: u64) -> WeightedGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = WeightedGraph::generate(&Family::ErdosRenyi { n: 9, p: 0.4, seed }, MeasureMode::Unit).unwrap();
        let edges: Vec<_> = base.edges().into_iter().map(|(u, v, _)| (u, v, rng.gen_range(0.2..3.0))).collect();
        let m = (0..9).map(|_| rng.gen_range(0.5..2.0)).collect();
        WeightedGraph::from_edges(&edges, MeasureMode::Explicit(m)).unwrap()
    }

    #[test]
    fn laplacian_examples() {
        let g = k2();
        assert_eq!(laplacian(&g, &field(&[0.0, 1.0])).unwrap().values(), &[1.0, -1.0]);
        assert_eq!(laplacian(&g, &field(&[3.0, 3.0])).unwrap().values(), &[0.0, 0.0]);
        assert_eq!(
            laplacian(&g, &field(&[1.0])).unwrap_err(),
            FieldError::LengthMismatch { expected: 2, got: 1 }
        );
    }

    #[test]
    fn laplacian_has_zero_mass() {
        let g = weighted_random(3);
        let f = field(&[0.3, -1.0, 2.0, 0.5, 0.0, 1.5, -0.7, 0.2, 0.9]);
        assert!(laplacian(&g, &f).unwrap().mass(&g).abs() < 1e-13);
    }

    #[test]
    fn k2_gamma_and_gamma2() {
        let g = k2();
        let f = field(&[0.0, 1.0]);
        assert_eq!(gamma_sq(&g, &f).unwrap().values(), &[0.5, 0.5]);
        assert_eq!(gamma_from_laplacians(&g, &f, &f).unwrap().values(), &[0.5, 0.5]);
        assert_eq!(gamma2_sq(&g, &f).unwrap().values(), &[1.0, 1.0]);
        assert_eq!(gamma2_at(&g, f.values(), f.values(), 0), 1.0);
    }

    #[test]
    fn constants_are_annihilated() {
        let g = weighted_random(5);
        let c = ScalarField::constant(9, 2.5);
        let f = field(&[0.3, -1.0, 2.0, 0.5, 0.0, 1.5, -0.7, 0.2, 0.9]);
        assert!(gamma(&g, &c, &f).unwrap().sup_norm() < 1e-15);
        assert!(gamma2(&g, &c, &f).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn pointwise_gamma2_matches_global() {
        let g = weighted_random(7);
        let f = field(&[0.3, -1.0, 2.0, 0.5, 0.0, 1.5, -0.7, 0.2, 0.9]);
        let h = field(&[1.0, 0.0, -0.5, 0.25, 2.0, -1.0, 0.0, 0.3, 0.1]);
        let global = gamma2(&g, &f, &h).unwrap();
        for x in 0..9 {
            assert!((gamma2_at(&g, f.values(), h.values(), x) - global[x]).abs() < 1e-12);
        }
    }

    #[test]
    fn k2_local_forms() {
        let p = local_forms(&k2(), VertexId(0));
        assert_eq!(p.sphere1, vec![VertexId(1)]);
        assert!(p.sphere2.is_empty());
        assert_eq!(p.gamma_form, vec![0.5]);
        assert_eq!(p.gamma2_form, Matrix::from_rows(&[vec![1.0]]));
        assert_eq!(p.laplacian_row, vec![1.0]);
    }

    #[test]
    fn local_forms_match_operators() {
        for seed in 0..6 {
            let g = weighted_random(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            for x in 0..g.vertex_count() {
                let p = local_forms(&g, VertexId(x));
                assert!(p.gamma2_form.is_symmetric());
                assert!(p.gamma_form.iter().all(|&q| q > 0.0));
                let mut f: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
                f[x] = 0.0;
                let sf = field(&f);
                let local = p.restrict(&f);
                let scale = 1.0 + gamma2_sq(&g, &sf).unwrap()[x].abs();
                assert!((p.eval_gamma2(&local) - gamma2_sq(&g, &sf).unwrap()[x]).abs() < 1e-10 * scale);
                assert!((p.eval_gamma(&local) - gamma_sq(&g, &sf).unwrap()[x]).abs() < 1e-12);
                assert!((p.eval_laplacian(&local) - laplacian(&g, &sf).unwrap()[x]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn local_coordinates_are_sorted() {
        let g = WeightedGraph::generate(&Family::Path(5), MeasureMode::Unit).unwrap();
        let p = local_forms(&g, VertexId(2));
        assert_eq!(p.sphere1, vec![VertexId(1), VertexId(3)]);
        assert_eq!(p.sphere2, vec![VertexId(0), VertexId(4)]);
    }
}

use curvcut_core::{
    brute_force_curvature, curvature_at, curvature_profile, Dimension, Family, MeasureMode, WeightedGraph,
};

fn generate(f: Family) -> WeightedGraph {
    WeightedGraph::generate(&f, MeasureMode::Unit).unwrap()
}

#[test]
fn complete_graphs_match_closed_form() {
    // unit measure: K(K_n) = 1 + n/2
    for n in 2..7 {
        let g = generate(Family::Complete(n));
        for x in g.vertices() {
            let k = curvature_at(&g, x, Dimension::Infinite).unwrap().value.finite().unwrap();
            assert!((k - (1.0 + n as f64 / 2.0)).abs() < 1e-9, "K_{n}: {k}");
        }
    }
}

#[test]
fn oracle_agrees_on_small_graphs() {
    let mut families = vec![Family::Complete(3), Family::Cycle(5), Family::Path(4), Family::Hypercube(3)];
    families.extend((0..8).map(|seed| Family::ErdosRenyi { n: 9, p: 0.4, seed }));
    for fam in families {
        let g = generate(fam);
        for x in g.vertices() {
            for dim in [Dimension::Infinite, Dimension::Finite(2.0)] {
                let exact = curvature_at(&g, x, dim).unwrap().value.finite().unwrap();
                let sampled = brute_force_curvature(&g, x, dim, 6, 11);
                assert!(sampled >= exact - 1e-6, "{fam} x={x}: {sampled} < {exact}");
                assert!((sampled - exact).abs() < 1e-6, "{fam} x={x} {dim}: {sampled} vs {exact}");
            }
        }
    }
}

#[test]
fn vertex_transitive_profiles_are_flat() {
    for fam in [Family::Cycle(7), Family::Hypercube(4), Family::Complete(5)] {
        let p = curvature_profile(&generate(fam), Dimension::Infinite);
        let first = p.get(0).finite().unwrap();
        assert!(p.values().iter().all(|k| (k.finite().unwrap() - first).abs() < 1e-9), "{fam}");
    }
}

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::graph::{ExceptionSet, GraphError, WeightedGraph};
use crate::semigroup::{cutoff, heat_apply, perpetual_evolve, EvolutionConfig};

use super::{Check, Instance, Theorem, VerificationReport, VerifyError};

/// Gaps to the heat flow for one exception set of the sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionRow {
    pub index: usize,
    pub set_size: usize,
    /// `‖P_t^{W_k} f₁ − P_t f₁‖∞` for the common input `f₁ = S^{W₁} f`.
    pub gap: f64,
    /// `‖P_t^{W_k} S^{W_k} f − P_t S^{W_k} f‖∞`, reported only.
    pub clipped_gap: f64,
}

/// Measures `‖P_t^{W_k} f − P_t f‖∞` along a decreasing sequence of
/// exception sets and checks that it does not increase.
///
/// `f₁ = S^{W₁} f` lies in every class of the sequence, so it is the input of
/// the asserted run. Each `W_k` also gets a run on its own cutoff of `f`.
pub fn exhaustion_experiment(
    g: &WeightedGraph,
    f: &ScalarField,
    sets: &[Vec<usize>],
    t: f64,
    config: &EvolutionConfig,
) -> Result<(VerificationReport, Vec<ExhaustionRow>), VerifyError> {
    f.check_graph(g)?;
    let mut built: Vec<Arc<ExceptionSet>> = Vec::with_capacity(sets.len());
    for (k, members) in sets.iter().enumerate() {
        let set = match ExceptionSet::new(g, members.iter().copied()) {
            Err(GraphError::EmptySet) => return Err(VerifyError::EmptySet(k)),
            other => other?,
        };
        if let Some(prev) = built.last() {
            if !set.members().iter().all(|&x| prev.contains(x)) {
                return Err(VerifyError::NotNested(k));
            }
        }
        built.push(Arc::new(set));
    }
    let Some(first) = built.first() else {
        return Err(VerifyError::EmptySet(0));
    };

    let common = cutoff(f, first);
    let heat_common = heat_apply(g, common.field(), t, config)?;
    let mut rows = Vec::with_capacity(built.len());
    for (k, w) in built.iter().enumerate() {
        let input = cutoff(common.field(), w);
        let gap = perpetual_evolve(g, &input, t, config)?.function.field().sup_distance(&heat_common);
        let clipped = cutoff(f, w);
        let clipped_heat = heat_apply(g, clipped.field(), t, config)?;
        let clipped_gap = perpetual_evolve(g, &clipped, t, config)?.function.field().sup_distance(&clipped_heat);
        rows.push(ExhaustionRow { index: k + 1, set_size: w.len(), gap, clipped_gap });
    }

    let tol = 2.0 * config.partition_tolerance;
    let checks = rows
        .windows(2)
        .map(|p| Check::at_most(format!("gap nonincreasing k={}", p[1].index), p[1].gap, p[0].gap, tol))
        .collect();
    let mut report = VerificationReport::new(Theorem::Exhaustion, Instance::describe(g, first), checks);
    report.measure("t", t);
    for r in &rows {
        report.measure(&format!("gap_{:02}", r.index), r.gap);
        report.measure(&format!("clipped_gap_{:02}", r.index), r.clipped_gap);
    }
    Ok((report, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Family, MeasureMode};
    use crate::verify::Verdict;

    #[test]
    fn equal_sets_give_constant_gaps() {
        let g = WeightedGraph::generate(&Family::Path(6), MeasureMode::Unit).unwrap();
        let f = ScalarField::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let sets = vec![vec![0, 1]; 3];
        let (report, rows) = exhaustion_experiment(&g, &f, &sets, 0.5, &EvolutionConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(rows.windows(2).all(|p| p[0].gap == p[1].gap));
    }

    #[test]
    fn full_set_and_constant_give_zero() {
        let g = WeightedGraph::generate(&Family::Cycle(5), MeasureMode::Unit).unwrap();
        let f = ScalarField::constant(5, 1.0);
        let sets = vec![(0..5).collect::<Vec<_>>(); 2];
        let (_, rows) = exhaustion_experiment(&g, &f, &sets, 1.0, &EvolutionConfig::default()).unwrap();
        assert!(rows.iter().all(|r| r.gap < 1e-14 && r.clipped_gap < 1e-14));
    }

    #[test]
    fn rejects_bad_sequences() {
        let g = WeightedGraph::generate(&Family::Path(4), MeasureMode::Unit).unwrap();
        let f = ScalarField::zeros(4);
        let cfg = EvolutionConfig::default();
        assert_eq!(exhaustion_experiment(&g, &f, &[vec![0], vec![]], 1.0, &cfg).unwrap_err(), VerifyError::EmptySet(1));
        assert_eq!(exhaustion_experiment(&g, &f, &[vec![0], vec![1]], 1.0, &cfg).unwrap_err(), VerifyError::NotNested(1));
    }
}

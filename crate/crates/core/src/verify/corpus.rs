use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{curvature_profile, Dimension};
use crate::field::ScalarField;
use crate::graph::{ExceptionSet, Family, GraphError, MeasureMode, WeightedGraph};
use crate::semigroup::{cutoff, ClassFunction};

/// Uniform values in `[0, amplitude]` projected into the class of `w`.
pub fn random_class_function(g: &WeightedGraph, w: &Arc<ExceptionSet>, amplitude: f64, seed: u64) -> ClassFunction {
    assert!(amplitude >= 0.0 && amplitude.is_finite(), "amplitude must be finite and nonnegative");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..g.vertex_count()).map(|_| amplitude * rng.gen::<f64>()).collect();
    cutoff(&ScalarField::from_vec(values), w)
}

/// Zero on `cl(W)` and uniform in `[0, amplitude]` elsewhere.
///
/// Unlike [`random_class_function`] the plateau sits at the bottom of the
/// range, so the sample rarely collapses to a constant on dense graphs.
pub fn random_plateau_function(g: &WeightedGraph, w: &Arc<ExceptionSet>, amplitude: f64, seed: u64) -> ClassFunction {
    assert!(amplitude >= 0.0 && amplitude.is_finite(), "amplitude must be finite and nonnegative");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..g.vertex_count())
        .map(|x| {
            let v = amplitude * rng.gen::<f64>();
            if w.closure_contains(x) { 0.0 } else { v }
        })
        .collect();
    cutoff(&ScalarField::from_vec(values), w)
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub family: Family,
    pub graph: WeightedGraph,
    /// The lowest-curvature vertex at dimension ∞, ties to the lowest index.
    pub exception: Arc<ExceptionSet>,
    pub seed: u64,
}

impl CorpusEntry {
    pub fn new(family: Family, seed: u64) -> Result<Self, GraphError> {
        let graph = WeightedGraph::generate(&family, MeasureMode::Unit)?;
        let worst = curvature_profile(&graph, Dimension::Infinite).argmin();
        let exception = Arc::new(ExceptionSet::new(&graph, [worst.index()])?);
        Ok(CorpusEntry { name: family.to_string(), family, graph, exception, seed })
    }

    pub fn with_exception(mut self, members: &[usize]) -> Result<Self, GraphError> {
        self.exception = Arc::new(ExceptionSet::new(&self.graph, members.iter().copied())?);
        Ok(self)
    }
}

/// Seeded list of connected test graphs.
#[derive(Debug, Clone)]
pub struct TestCorpus {
    pub entries: Vec<CorpusEntry>,
}

impl TestCorpus {
    /// `count` Erdős–Rényi graphs with `min_n..=max_n` vertices and edge
    /// probability in `[p_lo, p_hi)`, all drawn from one seeded stream.
    pub fn random(count: usize, min_n: usize, max_n: usize, p_lo: f64, p_hi: f64, seed: u64) -> Result<Self, GraphError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            let n = rng.gen_range(min_n..=max_n);
            let p = rng.gen_range(p_lo..p_hi);
            let graph_seed = rng.gen::<u64>();
            entries.push(CorpusEntry::new(Family::ErdosRenyi { n, p, seed: graph_seed }, graph_seed)?);
        }
        Ok(TestCorpus { entries })
    }

    /// K₂, K₃, cycles 4..=8, paths 3..=8 and hypercubes 2..=4.
    pub fn named() -> Result<Self, GraphError> {
        let mut families = vec![Family::Complete(2), Family::Complete(3)];
        families.extend((4..=8).map(Family::Cycle));
        families.extend((3..=8).map(Family::Path));
        families.extend((2..=4).map(Family::Hypercube));
        let entries = families.into_iter().map(|f| CorpusEntry::new(f, 0)).collect::<Result<_, _>>()?;
        Ok(TestCorpus { entries })
    }

    /// The named families followed by 50 random graphs with at most 15 vertices.
    pub fn standard(seed: u64) -> Result<Self, GraphError> {
        let mut corpus = Self::named()?;
        corpus.entries.extend(Self::random(50, 4, 15, 0.25, 0.75, seed)?.entries);
        Ok(corpus)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CorpusEntry> {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_function_sampler() {
        let g = WeightedGraph::generate(&Family::Cycle(7), MeasureMode::Unit).unwrap();
        let w = Arc::new(ExceptionSet::new(&g, [3]).unwrap());
        let a = random_class_function(&g, &w, 2.0, 11);
        assert_eq!(a, random_class_function(&g, &w, 2.0, 11));
        assert!(ClassFunction::new(a.field().clone(), Arc::clone(&w)).is_ok());
        assert!(a.values().iter().all(|&v| (0.0..=2.0).contains(&v)));
        assert!(random_class_function(&g, &w, 0.0, 11).is_constant());
        let b = random_plateau_function(&g, &w, 2.0, 11);
        assert_eq!(b.plateau(), 0.0);
        assert_eq!(b.values().iter().filter(|&&v| v > 0.0).count(), 4);
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = TestCorpus::random(5, 4, 9, 0.3, 0.6, 3).unwrap();
        let b = TestCorpus::random(5, 4, 9, 0.3, 0.6, 3).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.graph, y.graph);
            assert_eq!(x.exception, y.exception);
        }
        assert_eq!(TestCorpus::named().unwrap().len(), 16);
    }
}

//! Resolution of command-line flags into core types.

use std::path::Path;
use std::sync::Arc;

use curvcut_core::io::{self, IoError};
use curvcut_core::verify::{random_plateau_function, VerifyError};
use curvcut_core::{
    cutoff, curvature_profile, exception_set, random_class_function, ClassFunction, Dimension, EvolutionConfig,
    ExceptionSet, Family, GraphError, MeasureMode, ScalarField, SemigroupError, WeightedGraph,
};

use crate::{Failure, Opts};

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SemigroupError> for Failure {
    fn from(e: SemigroupError) -> Self {
        match e {
            SemigroupError::NoConvergence { .. } | SemigroupError::EnvelopeViolation { .. } => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Semigroup(s) => s.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

/// The graph and a short descriptor of where it came from.
pub struct GraphInput {
    pub graph: WeightedGraph,
    pub name: String,
}

fn measure_mode(spec: &str, labels: &[String]) -> Result<MeasureMode, Failure> {
    match spec {
        "unit" => Ok(MeasureMode::Unit),
        "degree" => Ok(MeasureMode::Degree),
        path => {
            let text = io::read_text(Path::new(path))?;
            Ok(MeasureMode::Explicit(io::parse_measure(&text, labels)?))
        }
    }
}

pub fn family(spec: &str) -> Result<Family, Failure> {
    spec.parse::<Family>().map_err(|e| Failure::Usage(format!("--gen {spec}: {e}")))
}

pub fn load_graph(opts: &Opts) -> Result<GraphInput, Failure> {
    match (&opts.graph, &opts.generate) {
        (Some(_), Some(_)) => Err(Failure::Usage("--graph and --gen are mutually exclusive".into())),
        (None, None) => Err(Failure::Usage("one of --graph or --gen is required".into())),
        (Some(path), None) => {
            let list = io::parse_edge_list(&io::read_text(path)?)?;
            let mode = measure_mode(&opts.measure, &list.labels)?;
            let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
            Ok(GraphInput { graph: list.into_graph(mode)?, name })
        }
        (None, Some(spec)) => {
            let fam = family(spec)?;
            let labels: Vec<String> = (0..fam.vertex_count()).map(|i| i.to_string()).collect();
            let mode = measure_mode(&opts.measure, &labels)?;
            Ok(GraphInput { graph: WeightedGraph::generate(&fam, mode)?, name: fam.to_string() })
        }
    }
}

/// A vertex set given as a file or as an inline comma separated list.
pub fn vertex_set(g: &WeightedGraph, spec: &str) -> Result<Vec<usize>, Failure> {
    let path = Path::new(spec);
    let text = if path.is_file() { io::read_text(path)? } else { spec.to_string() };
    let set = io::parse_vertex_set(&text, g)?;
    if set.is_empty() {
        return Err(Failure::Usage(format!("--w {spec}: empty exception set")));
    }
    Ok(set)
}

pub fn dimension(opts: &Opts) -> Result<Dimension, Failure> {
    opts.dimension.parse::<Dimension>().map_err(|e| Failure::Usage(format!("--dimension {}: {e}", opts.dimension)))
}

/// `--w`, else `--threshold`, else the lowest-curvature vertex.
pub fn exception(g: &WeightedGraph, opts: &Opts) -> Result<Arc<ExceptionSet>, Failure> {
    match opts.w.as_slice() {
        [spec] => Ok(Arc::new(ExceptionSet::new(g, vertex_set(g, spec)?)?)),
        [] => {
            let profile = curvature_profile(g, Dimension::Infinite);
            match opts.threshold {
                Some(th) => Ok(Arc::new(exception_set(g, &profile, th)?.set)),
                None => Ok(Arc::new(ExceptionSet::new(g, [profile.argmin().index()])?)),
            }
        }
        _ => Err(Failure::Usage("--w may be given only once for this command".into())),
    }
}

fn seed_of(spec: &str, prefix: &str) -> Result<Option<u64>, Failure> {
    match spec.strip_prefix(prefix) {
        None => Ok(None),
        Some(s) => s.parse().map(Some).map_err(|_| Failure::Usage(format!("--field {spec}: bad seed"))),
    }
}

/// Plain field from `--field`; `default` is used when the flag is absent.
pub fn raw_field(g: &WeightedGraph, opts: &Opts, w: &Arc<ExceptionSet>, default: impl FnOnce() -> ScalarField) -> Result<(ScalarField, String), Failure> {
    let Some(spec) = &opts.field else {
        return Ok((default(), "default".into()));
    };
    if let Some(seed) = seed_of(spec, "random:")? {
        return Ok((random_class_function(g, w, 1.0, seed).into_field(), spec.clone()));
    }
    if let Some(seed) = seed_of(spec, "plateau:")? {
        return Ok((random_plateau_function(g, w, 1.0, seed).into_field(), spec.clone()));
    }
    let text = io::read_text(Path::new(spec))?;
    Ok((io::parse_field(&text, g)?, spec.clone()))
}

/// `--field` projected into the class of `w`; defaults to `random:SEED`.
pub fn class_field(g: &WeightedGraph, opts: &Opts, w: &Arc<ExceptionSet>) -> Result<(ClassFunction, String), Failure> {
    let (f, name) = match &opts.field {
        Some(_) => raw_field(g, opts, w, || unreachable!())?,
        None => (random_class_function(g, w, 1.0, opts.seed).into_field(), format!("random:{}", opts.seed)),
    };
    Ok((cutoff(&f, w), name))
}

pub fn grid(opts: &Opts, default: &[f64]) -> Result<Vec<f64>, Failure> {
    let grid = match (&opts.grid, opts.t) {
        (Some(csv), _) => csv
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("--grid: {s:?} is not a number"))))
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some(t)) => vec![t],
        (None, None) => default.to_vec(),
    };
    let ok = grid.iter().all(|t| t.is_finite() && *t >= 0.0) && grid.windows(2).all(|p| p[0] < p[1]);
    if !ok || grid.is_empty() {
        return Err(Failure::Usage("--grid must be nonnegative and strictly increasing".into()));
    }
    Ok(grid)
}

pub fn config(g: &WeightedGraph, opts: &Opts) -> Result<EvolutionConfig, Failure> {
    let config = EvolutionConfig {
        heat_tolerance: opts.tol_heat,
        partition_tolerance: opts.tol_partition,
        ..EvolutionConfig::default()
    };
    config.validate(g).map_err(|e| Failure::Usage(format!("--tol-heat/--tol-partition: {e}")))?;
    Ok(config)
}

//! Numerical checks of the properties of `P_t^W`, the gradient estimate, the
//! distance bound, and the exhaustion experiment, with structured reports.

mod corpus;
mod exhaustion;
mod suite;
mod theorems;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldError;
use crate::graph::{ExceptionSet, GraphError, WeightedGraph};
use crate::semigroup::SemigroupError;

pub use corpus::{random_class_function, random_plateau_function, CorpusEntry, TestCorpus};
pub use exhaustion::{exhaustion_experiment, ExhaustionRow};
pub use suite::check_semigroup_suite;
pub use theorems::{
    check_distance_bound, check_gradient_estimate, check_gradient_estimate_with, curvature_bound,
    CURVATURE_MARGIN,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("vertex {0} outside the exception set has curvature -inf")]
    InfiniteNegativeCurvature(usize),
    #[error("curvature bound {0} outside the exception set is not positive")]
    NonpositiveCurvature(f64),
    #[error("exception set {0} of the sequence is empty")]
    EmptySet(usize),
    #[error("exception set {0} is not contained in its predecessor")]
    NotNested(usize),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not_applicable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    SemigroupProperties,
    GradientEstimate,
    DistanceBound,
    Exhaustion,
}

impl std::fmt::Display for Theorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Theorem::SemigroupProperties => "semigroup-properties",
            Theorem::GradientEstimate => "gradient-estimate",
            Theorem::DistanceBound => "distance-bound",
            Theorem::Exhaustion => "exhaustion",
        })
    }
}

/// One inequality `measured ≤ bound`, accepted when it fails by at most `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    /// `bound − measured`; negative when the raw inequality is violated.
    pub slack: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Self {
        let slack = bound - measured;
        Check { name: name.into(), measured, bound, slack, tolerance, passed: slack + tolerance >= 0.0 }
    }

    /// A check that failed to run, e.g. a stage that did not converge.
    pub fn failed(name: impl Into<String>, measured: f64) -> Self {
        Check { name: name.into(), measured, bound: 0.0, slack: -measured.abs(), tolerance: 0.0, passed: false }
    }
}

/// What a report was computed on.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    /// Family descriptor or input path.
    pub graph: String,
    pub vertices: usize,
    pub edges: usize,
    pub exception: Vec<usize>,
    /// Field descriptor such as `random:7`.
    pub field: String,
    pub parameters: BTreeMap<String, f64>,
}

impl Instance {
    pub fn describe(g: &WeightedGraph, w: &ExceptionSet) -> Self {
        Instance {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            exception: w.members().to_vec(),
            ..Instance::default()
        }
    }

    pub fn named(mut self, name: impl Into<String>, graph: impl Into<String>, field: impl Into<String>) -> Self {
        self.name = name.into();
        self.graph = graph.into();
        self.field = field.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: Theorem,
    pub instance: Instance,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    /// Diagnostics that are reported but not asserted.
    pub measurements: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn new(theorem: Theorem, instance: Instance, checks: Vec<Check>) -> Self {
        let verdict = if checks.iter().all(|c| c.passed) { Verdict::Pass } else { Verdict::Fail };
        VerificationReport { theorem, instance, checks, verdict, measurements: BTreeMap::new() }
    }

    pub fn not_applicable(theorem: Theorem, instance: Instance, reason: &str, value: f64) -> Self {
        let mut report = VerificationReport {
            theorem,
            instance,
            checks: Vec::new(),
            verdict: Verdict::NotApplicable,
            measurements: BTreeMap::new(),
        };
        report.measurements.insert(reason.to_string(), value);
        report
    }

    pub fn with_instance(mut self, instance: Instance) -> Self {
        self.instance = instance;
        self
    }

    pub fn measure(&mut self, key: &str, value: f64) {
        self.measurements.insert(key.to_string(), value);
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// Smallest `slack + tolerance` over all checks; negative iff some check failed.
    pub fn worst_slack(&self) -> Option<f64> {
        self.checks.iter().map(|c| c.slack + c.tolerance).reduce(f64::min)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

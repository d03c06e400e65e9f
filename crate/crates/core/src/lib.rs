//! Bakry-Émery curvature on finite weighted graphs, the perpetual cutoff
//! heat semigroup for an exception set, and numerical checks of the
//! gradient estimate and distance bound it yields.

pub mod curvature;
pub mod field;
pub mod gamma;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod semigroup;
pub mod verify;

pub use curvature::{
    brute_force_curvature, curvature_at, curvature_profile, exception_set, verify_cd_at, Curvature,
    CurvatureProfile, CurvatureResult, Dimension,
};
pub use field::{FieldError, ScalarField};
pub use gamma::{gamma, gamma2, laplacian, local_forms, LocalCurvatureProblem};
pub use graph::{ExceptionSet, Family, GraphError, MeasureMode, VertexId, WeightedGraph};
pub use semigroup::{
    cutoff, dyadic_product, evolve_to_equilibrium, generator_lw, heat_apply, heat_trace, perpetual_evolve, q_step,
    trace, ClassFunction, Equilibrium, EvolutionConfig, EvolutionTrace, Evolved, HeatTrace, SemigroupError,
};
pub use verify::{
    check_distance_bound, check_gradient_estimate, check_semigroup_suite, exhaustion_experiment,
    random_class_function, Check, Instance, TestCorpus, Theorem, Verdict, VerificationReport, VerifyError,
};

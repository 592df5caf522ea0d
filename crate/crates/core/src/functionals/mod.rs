//! Test functions, the functional `L(μ)`, its Cauchy transform pipeline and
//! difference-quotient experiments.

mod derivation;
mod functional;
mod pipeline;
mod rational;

pub use derivation::{
    bound_chain, unit_probes, BoundChainReport, cheese_function, dq_convergence_experiment, function_panel, ray_experiment, surrogate_derivation_measure,
    CheeseFunction, DerivationReport, DeviationSample, GoodSet, GoodSetMembership, RayRecord, RayReport, ShellStats,
};
pub use functional::{measure_cauchy_transform, FunctionalHandle, ProductDecomposition, Role};
pub use pipeline::{t_pipeline, PipelineReport};
pub use rational::{DerivationValue, LipDomain, LipProbe, RationalFunction};

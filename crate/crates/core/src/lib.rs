//! Crisp and triangular-fuzzy AHP over a goal / criteria / sub-criteria /
//! alternatives hierarchy.
//!
//! The crisp path derives priority vectors with the row geometric mean and
//! checks them with the geometric consistency index (GCI). The fuzzy path
//! lifts the same judgments onto a nine-grade triangular scale, takes fuzzy
//! geometric means, and defuzzifies by centroid. Both score alternatives as
//! `S_a = sum_k w_k * w_a^(k)` and rank them.

pub mod ahp;
pub mod analysis;
pub mod elicitation;
pub mod error;
pub mod fuzzy;
pub mod hierarchy;
pub mod pipeline;
pub mod report;

pub use ahp::{
    check_consistency, gci, local_inconsistency, priority_geometric_mean, score_alternatives, ComparisonMatrix,
    ConsistencyVerdict, PriorityVector,
};
pub use analysis::{compare_methods, kendall_tau, perturb_one_judgment, rank, sensitivity_sweep, Method, Ranking};
pub use elicitation::{
    fuzzify_matrix, importance_to_matrix, indicators_to_matrix, ElicitationRule, FuzzyScale, MissingPolicy, RuleKind,
};
pub use error::{Error, Result};
pub use fuzzy::{defuzzify, fuzzy_score_alternatives, fuzzy_weights, normalize, FuzzyComparisonMatrix, Tfn};
pub use hierarchy::{load_hierarchy, load_indicators, Cohort, Direction, Hierarchy, IndicatorTable};
pub use pipeline::{run_evaluation, Evaluation, RunConfig};
pub use report::{emit_report, EvaluationReport, MethodSelection, ReportFormat};

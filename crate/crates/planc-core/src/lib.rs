//! A toolkit for propositional planning formalisms: state-specification
//! semantics, classification into the formalism lattice, solution-preserving
//! compilation schemes between formalisms with plan translation, an
//! exhaustive planner used as the correctness oracle, plan-validity circuits,
//! and the text formats tying it together.

pub mod circuit;
pub mod compile;
pub mod gadgets;
pub mod model;
pub mod planner;
pub mod semantics;
pub mod sexp;
#[cfg(test)]
pub(crate) mod testutil;
pub mod verify;

pub use compile::{
    compile_instance, compose, plan_growth_bound, route, scheme_by_id, scheme_identity,
    scheme_l7, scheme_l8, scheme_t20, scheme_t22, scheme_t23, scheme_t6, translate_plan,
    BasicId, CompilationScheme, CompileError, PreserveClass, Preservation, RouteAnswer,
    T22Variant,
};
pub use model::{
    classify_instance, normalize_single_precondition, normalize_singleton_effects,
    normalize_unique_effect_literals, specializes, Atom, ConditionalEffect, DomainStructure,
    FormalismTag, Formula, FormulaClass, Instance, Literal, LiteralSet, ModelError, Operator,
    Plan, StateSpec,
};
pub use planner::{
    accepts_word, plan_exists, plan_exists_with, validate, PlannerError, SearchLimits,
    SearchResult, SearchStats, SearchVerdict,
};
pub use semantics::{
    active_effects, apply_operator, apply_plan, entails, enumerate_models, enumerate_models_with,
    is_solution, potentially_active_effects, transition, transition_plan, ApplyOutcome,
    IllegalReason, SemanticsError, State,
};

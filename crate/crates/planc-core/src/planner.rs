//! Exhaustive, complete breadth-first search over state specifications: the
//! oracle for plan existence, shortest plans, bounded-step existence, and
//! word acceptance.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::model::{DomainStructure, Instance, Literal, LiteralSet, ModelError, Plan, StateSpec};
use crate::semantics::{apply_operator, is_solution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlannerError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("atom bound exceeded: {atoms} atoms > {bound}")]
    AtomBoundExceeded { atoms: usize, bound: usize },
    #[error("visited-state cap of {0} reached")]
    VisitedCapReached(usize),
    #[error("word length {found} does not match {expected} value atoms")]
    WordLengthMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Search precondition: at most this many atoms (the reachable space is
    /// bounded by 3^|Σ|).
    pub max_atoms: usize,
    /// Hard cap on distinct specifications visited, as a safety net.
    pub max_visited: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_atoms: 10, max_visited: 4_000_000 }
    }
}

impl SearchLimits {
    /// Limits sized for compiled instances, whose atom sets are larger but
    /// whose reachable spaces stay small.
    pub fn generous() -> Self {
        SearchLimits { max_atoms: 4096, max_visited: 4_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub expanded: usize,
    pub frontier_peak: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchVerdict {
    SolutionFound(Plan),
    NoSolution,
    BoundExceeded(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub verdict: SearchVerdict,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn plan(&self) -> Option<&Plan> {
        match &self.verdict {
            SearchVerdict::SolutionFound(p) => Some(p),
            _ => None,
        }
    }

    pub fn found(&self) -> bool {
        matches!(self.verdict, SearchVerdict::SolutionFound(_))
    }
}

fn goal_holds(goal: &LiteralSet, spec: &StateSpec) -> bool {
    match spec {
        StateSpec::Illegal => false,
        StateSpec::Consistent(ls) => goal.is_subset_of(ls),
    }
}

/// Breadth-first search over consistent specifications with a visited set
/// keyed on the canonical literal set. Operators expand in declaration
/// order, so the returned solution is the shortest, lexicographically-first
/// one. `NoSolution` is reported only after the reachable space is exhausted.
pub fn plan_exists(instance: &Instance, max_steps: Option<usize>) -> Result<SearchResult, PlannerError> {
    plan_exists_with(instance, max_steps, &SearchLimits::default())
}

pub fn plan_exists_with(
    instance: &Instance,
    max_steps: Option<usize>,
    limits: &SearchLimits,
) -> Result<SearchResult, PlannerError> {
    let dom = &instance.domain;
    if dom.atoms().len() > limits.max_atoms {
        return Err(PlannerError::AtomBoundExceeded {
            atoms: dom.atoms().len(),
            bound: limits.max_atoms,
        });
    }

    let mut stats = SearchStats::default();
    let init = instance.initial_spec();
    let init_lits = match init {
        StateSpec::Illegal => {
            return Ok(SearchResult { verdict: SearchVerdict::NoSolution, stats })
        }
        StateSpec::Consistent(ref ls) => ls.clone(),
    };
    if goal_holds(&instance.goal, &init) {
        return Ok(SearchResult {
            verdict: SearchVerdict::SolutionFound(Plan::empty()),
            stats,
        });
    }

    let mut visited: HashSet<LiteralSet> = HashSet::new();
    visited.insert(init_lits);
    let mut queue: VecDeque<(StateSpec, Plan)> = VecDeque::new();
    queue.push_back((init, Plan::empty()));
    stats.frontier_peak = 1;
    let mut truncated = false;

    while let Some((spec, plan)) = queue.pop_front() {
        if let Some(bound) = max_steps {
            if plan.len() >= bound {
                truncated = true;
                continue;
            }
        }
        stats.expanded += 1;
        for op in &dom.operators {
            let outcome = apply_operator(dom, &spec, op);
            let next = match outcome.result {
                StateSpec::Illegal => continue,
                StateSpec::Consistent(ls) => ls,
            };
            if !visited.insert(next.clone()) {
                continue;
            }
            if visited.len() > limits.max_visited {
                return Err(PlannerError::VisitedCapReached(limits.max_visited));
            }
            let mut steps = plan.0.clone();
            steps.push(op.name.clone());
            let next_plan = Plan(steps);
            let next_spec = StateSpec::Consistent(next);
            if goal_holds(&instance.goal, &next_spec) {
                return Ok(SearchResult {
                    verdict: SearchVerdict::SolutionFound(next_plan),
                    stats,
                });
            }
            queue.push_back((next_spec, next_plan));
            stats.frontier_peak = stats.frontier_peak.max(queue.len());
        }
    }

    let verdict = if truncated {
        SearchVerdict::BoundExceeded(max_steps.unwrap_or(0))
    } else {
        SearchVerdict::NoSolution
    };
    Ok(SearchResult { verdict, stats })
}

/// Thin alias of `is_solution` for the command-line surface.
pub fn validate(instance: &Instance, plan: &Plan) -> Result<bool, PlannerError> {
    Ok(is_solution(instance, plan)?)
}

/// Word acceptance: the canonically last atom of the domain is the goal
/// marker; the remaining atoms, in canonical order, carry the word bits.
/// Accepted iff the induced instance has a plan of at most `c` steps.
pub fn accepts_word(dom: &DomainStructure, word: &[bool], c: usize) -> Result<bool, PlannerError> {
    let atoms = dom.atoms();
    if atoms.is_empty() || word.len() != atoms.len() - 1 {
        return Err(PlannerError::WordLengthMismatch {
            expected: atoms.len().saturating_sub(1),
            found: word.len(),
        });
    }
    let goal_atom = atoms.last().unwrap().clone();
    let mut init = LiteralSet::new();
    for (bit, atom) in word.iter().zip(atoms.iter()) {
        init.insert(if *bit {
            Literal::Pos(atom.clone())
        } else {
            Literal::Neg(atom.clone())
        });
    }
    init.insert(Literal::Neg(goal_atom.clone()));
    let goal = LiteralSet::from_iter([Literal::Pos(goal_atom)]);
    let instance = Instance::new(dom.clone(), init, goal)?;
    let limits = SearchLimits { max_atoms: atoms.len().max(10), ..SearchLimits::default() };
    let result = plan_exists_with(&instance, Some(c), &limits)?;
    Ok(result.found())
}

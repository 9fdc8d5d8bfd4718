//! Operational semantics: entailment by literal theories, active and
//! potentially active effects, operator application on state specifications,
//! plan application, and the model-level transition function used as the
//! soundness oracle.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{
    Atom, ConditionalEffect, DomainStructure, Formula, Instance, Literal, LiteralSet, ModelError,
    Operator, Plan, StateSpec,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("model enumeration bound exceeded: {atoms} atoms > {bound}")]
    ModelBoundExceeded { atoms: usize, bound: usize },
}

/// A total truth assignment, represented as the set of true atoms.
pub type State = BTreeSet<Atom>;

/// Why an application came out illegal; mirrors the four clauses of the
/// application function, in their textual order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IllegalReason {
    SourceIllegal,
    PreNotEntailed,
    ActiveInconsistent,
    ActiveNotEqualPotential,
}

/// Outcome of applying an operator to a state specification. The reason is
/// present exactly when the result is illegal; it is diagnostic only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplyOutcome {
    pub result: StateSpec,
    pub reason: Option<IllegalReason>,
}

impl ApplyOutcome {
    fn legal(spec: StateSpec) -> Self {
        ApplyOutcome { result: spec, reason: None }
    }

    fn illegal(reason: IllegalReason) -> Self {
        ApplyOutcome { result: StateSpec::Illegal, reason: Some(reason) }
    }

    pub fn is_illegal(&self) -> bool {
        self.result.is_illegal()
    }
}

/// `S ⊨ φ`: every model of `S` satisfies `φ`. The illegal specification
/// entails everything. Atoms of `φ` not fixed by `S` are enumerated, so the
/// cost is exponential only in the unfixed atoms of the queried formula.
pub fn entails(spec: &StateSpec, formula: &Formula) -> bool {
    let fixed = match spec {
        StateSpec::Illegal => return true,
        StateSpec::Consistent(ls) => ls,
    };
    let free: Vec<Atom> =
        formula.atoms().into_iter().filter(|a| fixed.fixed_value(a).is_none()).collect();
    all_assignments(&free, |assign| {
        formula.eval(&|a: &Atom| fixed.fixed_value(a).unwrap_or_else(|| assign(a)))
    })
}

/// True when some model of `S` satisfies every formula in `conjuncts`.
pub fn satisfiable_with(spec: &StateSpec, conjuncts: &[Formula]) -> bool {
    let fixed = match spec {
        StateSpec::Illegal => return false,
        StateSpec::Consistent(ls) => ls,
    };
    let mut atoms = BTreeSet::new();
    for f in conjuncts {
        atoms.extend(f.atoms());
    }
    let free: Vec<Atom> =
        atoms.into_iter().filter(|a| fixed.fixed_value(a).is_none()).collect();
    any_assignment(&free, |assign| {
        conjuncts
            .iter()
            .all(|f| f.eval(&|a: &Atom| fixed.fixed_value(a).unwrap_or_else(|| assign(a))))
    })
}

fn all_assignments(free: &[Atom], check: impl Fn(&dyn Fn(&Atom) -> bool) -> bool) -> bool {
    assert!(free.len() <= 30, "entailment query with too many unfixed atoms");
    for mask in 0u64..(1u64 << free.len()) {
        let assign = |a: &Atom| {
            let idx = free.iter().position(|x| x == a).expect("free atom");
            mask & (1 << idx) != 0
        };
        if !check(&assign) {
            return false;
        }
    }
    true
}

fn any_assignment(free: &[Atom], check: impl Fn(&dyn Fn(&Atom) -> bool) -> bool) -> bool {
    assert!(free.len() <= 30, "satisfiability query with too many unfixed atoms");
    for mask in 0u64..(1u64 << free.len()) {
        let assign = |a: &Atom| {
            let idx = free.iter().position(|x| x == a).expect("free atom");
            mask & (1 << idx) != 0
        };
        if check(&assign) {
            return true;
        }
    }
    false
}

/// Active effects `A(S, post)`: the union of effect sets whose conditions are
/// all entailed by `S`. Requires a consistent `S`.
pub fn active_effects(spec: &StateSpec, post: &[ConditionalEffect]) -> LiteralSet {
    let mut out = LiteralSet::new();
    for eff in post {
        if eff.conditions.iter().all(|c| entails(spec, c)) {
            out = out.union(&eff.effects);
        }
    }
    out
}

/// Potentially active effects `P(S, post)`: the union over effects whose
/// conditions hold in some model of `S`, computed by joint satisfiability.
pub fn potentially_active_effects(spec: &StateSpec, post: &[ConditionalEffect]) -> LiteralSet {
    let mut out = LiteralSet::new();
    for eff in post {
        if satisfiable_with(spec, &eff.conditions) {
            out = out.union(&eff.effects);
        }
    }
    out
}

fn active_set_inconsistent(active: &LiteralSet) -> bool {
    !active.is_consistent()
}

/// Apply an operator to a state specification. Legal iff the source is
/// consistent, every precondition formula is entailed, the active effects are
/// consistent, and the active effects equal the potentially active effects.
pub fn apply_operator(dom: &DomainStructure, spec: &StateSpec, op: &Operator) -> ApplyOutcome {
    let lits = match spec {
        StateSpec::Illegal => return ApplyOutcome::illegal(IllegalReason::SourceIllegal),
        StateSpec::Consistent(ls) => ls,
    };
    if !op.pre.iter().all(|f| entails(spec, f)) {
        return ApplyOutcome::illegal(IllegalReason::PreNotEntailed);
    }
    let active = active_effects(spec, &op.post);
    if active_set_inconsistent(&active) {
        return ApplyOutcome::illegal(IllegalReason::ActiveInconsistent);
    }
    // A complete specification has one model, so A = P holds by definition.
    if !spec.is_complete(dom.atoms()) {
        let potential = potentially_active_effects(spec, &op.post);
        if active != potential {
            return ApplyOutcome::illegal(IllegalReason::ActiveNotEqualPotential);
        }
    }
    let next = lits.minus(&active.negated()).union(&active);
    ApplyOutcome::legal(StateSpec::from_literals(next))
}

/// Left fold of `apply_operator` over the plan; illegal is absorbing.
pub fn apply_plan(
    dom: &DomainStructure,
    spec: &StateSpec,
    plan: &Plan,
) -> Result<StateSpec, ModelError> {
    let mut cur = spec.clone();
    for step in plan.steps() {
        let op = dom.resolve(step)?;
        if cur.is_illegal() {
            return Ok(StateSpec::Illegal);
        }
        cur = apply_operator(dom, &cur, op).result;
    }
    Ok(cur)
}

/// A plan solves the instance iff the final specification is consistent and
/// entails the goal (for literal goals over a consistent result: containment).
pub fn is_solution(instance: &Instance, plan: &Plan) -> Result<bool, ModelError> {
    let end = apply_plan(&instance.domain, &instance.initial_spec(), plan)?;
    Ok(match end {
        StateSpec::Illegal => false,
        StateSpec::Consistent(ls) => instance.goal.is_subset_of(&ls),
    })
}

pub const DEFAULT_MODEL_ATOM_BOUND: usize = 12;

/// All total assignments over the domain's atoms satisfying `S`; empty for
/// the illegal specification.
pub fn enumerate_models(
    dom: &DomainStructure,
    spec: &StateSpec,
) -> Result<BTreeSet<State>, SemanticsError> {
    enumerate_models_with(dom, spec, DEFAULT_MODEL_ATOM_BOUND)
}

pub fn enumerate_models_with(
    dom: &DomainStructure,
    spec: &StateSpec,
    bound: usize,
) -> Result<BTreeSet<State>, SemanticsError> {
    let atoms = dom.atoms();
    if atoms.len() > bound {
        return Err(SemanticsError::ModelBoundExceeded { atoms: atoms.len(), bound });
    }
    let lits = match spec {
        StateSpec::Illegal => return Ok(BTreeSet::new()),
        StateSpec::Consistent(ls) => ls,
    };
    let free: Vec<Atom> =
        atoms.iter().filter(|a| lits.fixed_value(a).is_none()).cloned().collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1u64 << free.len()) {
        let mut state: State = lits.pos().sigma();
        for (idx, a) in free.iter().enumerate() {
            if mask & (1 << idx) != 0 {
                state.insert(a.clone());
            }
        }
        out.insert(state);
    }
    Ok(out)
}

/// The state-transition function induced by an operator: defined iff the
/// state satisfies the precondition and the active effects are consistent.
pub fn transition(dom: &DomainStructure, state: &State, op: &Operator) -> Option<State> {
    let _ = dom;
    let value_of = |a: &Atom| state.contains(a);
    if !op.pre.iter().all(|f| f.eval(&value_of)) {
        return None;
    }
    let mut active = LiteralSet::new();
    for eff in &op.post {
        if eff.conditions.iter().all(|c| c.eval(&value_of)) {
            active = active.union(&eff.effects);
        }
    }
    if !active.is_consistent() {
        return None;
    }
    let mut next = state.clone();
    for l in active.iter() {
        match l {
            Literal::Pos(a) => {
                next.insert(a.clone());
            }
            Literal::Neg(a) => {
                next.remove(a);
            }
            // A consistent active set has no Bottom; Top is a no-op.
            Literal::Top | Literal::Bottom => {}
        }
    }
    Some(next)
}

/// Transition composed over a plan; `None` as soon as any step is undefined.
pub fn transition_plan(
    dom: &DomainStructure,
    state: &State,
    plan: &Plan,
) -> Result<Option<State>, ModelError> {
    let mut cur = Some(state.clone());
    for step in plan.steps() {
        let op = dom.resolve(step)?;
        cur = match cur {
            None => None,
            Some(s) => transition(dom, &s, op),
        };
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StateSpec;
    use crate::testutil::{doc_domain, doc_instance, doc_instance_no_aux};

    fn atom(s: &str) -> Atom {
        Atom::new(s).unwrap()
    }

    fn pos(s: &str) -> Literal {
        Literal::Pos(atom(s))
    }

    fn neg(s: &str) -> Literal {
        Literal::Neg(atom(s))
    }

    fn spec(lits: &[Literal]) -> StateSpec {
        StateSpec::from_literals(LiteralSet::from_iter(lits.iter().cloned()))
    }

    fn lits(items: &[Literal]) -> LiteralSet {
        LiteralSet::from_iter(items.iter().cloned())
    }

    /// Model-enumeration entailment oracle, independent of the substitution
    /// path used by `entails`.
    fn entails_by_models(dom: &DomainStructure, s: &StateSpec, f: &Formula) -> bool {
        enumerate_models(dom, s)
            .unwrap()
            .iter()
            .all(|m| f.eval(&|a: &Atom| m.contains(a)))
    }

    #[test]
    fn entailment_examples() {
        let s = spec(&[pos("tex"), pos("ind")]);
        assert!(entails(&s, &Formula::atom(atom("tex"))));
        // A tautology holds in the empty specification.
        let taut = Formula::or(Formula::atom(atom("p")), Formula::lit(neg("p")));
        assert!(entails(&StateSpec::empty(), &taut));
        // Enumerating both values of the unfixed atom: ¬(¬p ∧ q) under {p}.
        let f = Formula::not(Formula::and(Formula::lit(neg("p")), Formula::atom(atom("q"))));
        assert!(entails(&spec(&[pos("p")]), &f));
        assert!(entails(&StateSpec::Illegal, &Formula::bottom()));
    }

    #[test]
    fn entailment_agrees_with_model_enumeration() {
        use crate::gadgets::SplitMix64;
        let names = ["a", "b", "c", "d"];
        let atoms: Vec<Atom> = names.iter().map(|n| atom(n)).collect();
        let dom = DomainStructure::new("d", atoms.clone(), vec![]).unwrap();
        let mut rng = SplitMix64::new(7);
        fn random_formula(rng: &mut SplitMix64, atoms: &[Atom], depth: usize) -> Formula {
            if depth == 0 || rng.chance(1, 3) {
                let a = atoms[rng.below(atoms.len())].clone();
                return if rng.chance(1, 2) {
                    Formula::atom(a)
                } else {
                    Formula::lit(Literal::Neg(a))
                };
            }
            match rng.below(3) {
                0 => Formula::not(random_formula(rng, atoms, depth - 1)),
                1 => Formula::and(
                    random_formula(rng, atoms, depth - 1),
                    random_formula(rng, atoms, depth - 1),
                ),
                _ => Formula::or(
                    random_formula(rng, atoms, depth - 1),
                    random_formula(rng, atoms, depth - 1),
                ),
            }
        }
        // Exhaustive over the 3^4 literal sets, random formulas of depth 4.
        let mut specs = vec![LiteralSet::new()];
        for a in &atoms {
            let mut next = Vec::new();
            for s in &specs {
                let mut with_pos = s.clone();
                with_pos.insert(Literal::Pos(a.clone()));
                let mut with_neg = s.clone();
                with_neg.insert(Literal::Neg(a.clone()));
                next.push(s.clone());
                next.push(with_pos);
                next.push(with_neg);
            }
            specs = next;
        }
        assert_eq!(specs.len(), 81);
        for ls in specs {
            let s = StateSpec::from_literals(ls);
            for _ in 0..6 {
                let f = random_formula(&mut rng, &atoms, 4);
                assert_eq!(entails(&s, &f), entails_by_models(&dom, &s, &f));
            }
        }
    }

    #[test]
    fn active_effects_of_the_document_run() {
        let dom = doc_domain();
        let latex = dom.resolve("latex").unwrap();
        let s1 = spec(&[pos("tex"), pos("ind")]);
        let a = active_effects(&s1, &latex.post);
        assert_eq!(
            a,
            lits(&[pos("aux"), pos("idx"), pos("dvi"), pos("log"), pos("dvi_ind_ok")])
        );
        assert_eq!(active_effects(&s1, &[]), LiteralSet::new());
    }

    #[test]
    fn active_effects_pick_entailed_conditions() {
        let dom = DomainStructure::new(
            "d",
            vec![atom("p"), atom("q"), atom("r")],
            vec![crate::model::Operator::new(
                "o",
                vec![],
                vec![
                    ConditionalEffect::new(
                        vec![Formula::atom(atom("p"))],
                        lits(&[pos("q")]),
                    )
                    .unwrap(),
                    ConditionalEffect::new(
                        vec![Formula::lit(neg("p"))],
                        lits(&[pos("r")]),
                    )
                    .unwrap(),
                ],
            )],
        )
        .unwrap();
        let a = active_effects(&spec(&[pos("p")]), &dom.operators[0].post);
        assert_eq!(a, lits(&[pos("q")]));
    }

    #[test]
    fn potentially_active_effects_of_the_document_run() {
        let dom = doc_domain();
        let latex = dom.resolve("latex").unwrap();
        let s1 = spec(&[pos("tex"), pos("ind")]);
        let a = active_effects(&s1, &latex.post);
        let p = potentially_active_effects(&s1, &latex.post);
        assert_eq!(p, a.union(&lits(&[pos("dvi_cite_ok"), neg("dvi_cite_ok")])));
    }

    #[test]
    fn potential_equals_active_on_complete_specs() {
        let dom = doc_domain();
        let latex = dom.resolve("latex").unwrap();
        let mut all = LiteralSet::new();
        for a in dom.atoms() {
            all.insert(Literal::Pos(a.clone()));
        }
        let complete = StateSpec::from_literals(all);
        assert_eq!(
            potentially_active_effects(&complete, &latex.post),
            active_effects(&complete, &latex.post)
        );
    }

    #[test]
    fn potential_includes_satisfiable_conditions() {
        let eff = ConditionalEffect::new(vec![Formula::atom(atom("p"))], lits(&[pos("q")]))
            .unwrap();
        let p = potentially_active_effects(&StateSpec::empty(), &[eff]);
        assert_eq!(p, lits(&[pos("q")]));
    }

    #[test]
    fn potential_matches_union_over_models() {
        use crate::gadgets::{random_instance, GenParams};
        for seed in 0..60 {
            let inst = random_instance(&GenParams {
                tag: crate::model::FormalismTag::S_LIC,
                atom_count: 4,
                operator_count: 2,
                max_effects: 2,
                max_condition_depth: 1,
                seed,
            });
            let dom = &inst.domain;
            let s = StateSpec::from_literals(inst.init.clone());
            for op in &dom.operators {
                let direct = potentially_active_effects(&s, &op.post);
                let mut by_models = LiteralSet::new();
                for m in enumerate_models(dom, &s).unwrap() {
                    for eff in &op.post {
                        if eff.conditions.iter().all(|c| c.eval(&|a: &Atom| m.contains(a))) {
                            by_models = by_models.union(&eff.effects);
                        }
                    }
                }
                assert_eq!(direct, by_models);
            }
        }
    }

    #[test]
    fn applying_with_an_undecided_condition_is_illegal() {
        let dom = doc_domain();
        let latex = dom.resolve("latex").unwrap();
        let s1 = spec(&[pos("tex"), pos("ind")]);
        let out = apply_operator(&dom, &s1, latex);
        assert!(out.is_illegal());
        assert_eq!(out.reason, Some(IllegalReason::ActiveNotEqualPotential));
    }

    #[test]
    fn applying_with_an_unknown_precondition_is_illegal() {
        // The bibliography step needs aux and bib entailed; a specification
        // leaving aux unknown cannot run it.
        let dom = doc_domain();
        let bibtex = dom.resolve("bibtex").unwrap();
        let out = apply_operator(&dom, &spec(&[pos("tex"), pos("ind")]), bibtex);
        assert!(out.is_illegal());
        assert_eq!(out.reason, Some(IllegalReason::PreNotEntailed));
    }

    #[test]
    fn successful_application_extends_the_specification() {
        let dom = doc_domain();
        let bibtex = dom.resolve("bibtex").unwrap();
        let s = spec(&[pos("tex"), pos("ind"), pos("aux"), pos("bib")]);
        let out = apply_operator(&dom, &s, bibtex);
        assert_eq!(
            out.result,
            spec(&[pos("tex"), pos("ind"), pos("aux"), pos("bib"), pos("bbl"), pos("blg")])
        );
        assert_eq!(out.reason, None);
    }

    #[test]
    fn illegal_source_is_absorbing() {
        let dom = doc_domain();
        let bibtex = dom.resolve("bibtex").unwrap();
        let out = apply_operator(&dom, &StateSpec::Illegal, bibtex);
        assert!(out.is_illegal());
        assert_eq!(out.reason, Some(IllegalReason::SourceIllegal));
    }

    #[test]
    fn plan_application_examples() {
        let inst = doc_instance();
        let dom = &inst.domain;
        let start = inst.initial_spec();
        // The empty plan changes nothing.
        assert_eq!(apply_plan(dom, &start, &Plan::empty()).unwrap(), start);
        // The two-step production run reaches the goal.
        let end = apply_plan(dom, &start, &Plan::of(["bibtex", "latex"])).unwrap();
        let ls = end.literals().unwrap();
        assert!(ls.contains(&pos("dvi")));
        assert!(ls.contains(&pos("dvi_cite_ok")));
        // Illegal absorbs the rest of the plan.
        let dead = apply_plan(dom, &start, &Plan::of(["latex", "bibtex"])).unwrap();
        assert!(dead.is_illegal());
    }

    #[test]
    fn solution_checking() {
        let inst = doc_instance();
        assert!(is_solution(&inst, &Plan::of(["bibtex", "latex"])).unwrap());
        // With the citation step skipped, the unknown bbl value kills latex.
        assert!(!is_solution(&inst, &Plan::of(["latex"])).unwrap());
        // A goal already satisfied accepts the empty plan.
        let mut easy = inst.clone();
        easy.goal = lits(&[pos("tex")]);
        assert!(is_solution(&easy, &Plan::empty()).unwrap());
        assert!(is_solution(&inst, &Plan::of(["missing"])).is_err());
    }

    #[test]
    fn the_no_aux_variant_rejects_the_production_run() {
        // With aux unknown, the bibliography step is illegal at once, so the
        // two-step run that works in the corrected variant fails here.
        let inst = doc_instance_no_aux();
        assert!(!is_solution(&inst, &Plan::of(["bibtex", "latex"])).unwrap());
        let out = apply_operator(
            &inst.domain,
            &inst.initial_spec(),
            inst.domain.resolve("bibtex").unwrap(),
        );
        assert_eq!(out.reason, Some(IllegalReason::PreNotEntailed));
    }

    #[test]
    fn model_enumeration_examples() {
        let dom = DomainStructure::new("d", vec![atom("p"), atom("q")], vec![]).unwrap();
        let models = enumerate_models(&dom, &spec(&[pos("p")])).unwrap();
        let expected: std::collections::BTreeSet<State> = [
            [atom("p")].into_iter().collect::<State>(),
            [atom("p"), atom("q")].into_iter().collect::<State>(),
        ]
        .into_iter()
        .collect();
        assert_eq!(models, expected);
        // A complete specification has exactly one model: its positive part.
        let complete = spec(&[pos("p"), neg("q")]);
        let one = enumerate_models(&dom, &complete).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.iter().next().unwrap(), &[atom("p")].into_iter().collect::<State>());
        assert!(enumerate_models(&dom, &StateSpec::Illegal).unwrap().is_empty());
        let wide =
            DomainStructure::new("w", (0..13).map(|i| atom(&format!("a{i}"))).collect(), vec![])
                .unwrap();
        assert!(matches!(
            enumerate_models(&wide, &StateSpec::empty()),
            Err(SemanticsError::ModelBoundExceeded { .. })
        ));
    }

    #[test]
    fn transitions_on_states() {
        let dom = doc_domain();
        let latex = dom.resolve("latex").unwrap();
        // Unsatisfied precondition leaves the transition undefined.
        let empty: State = State::new();
        assert_eq!(transition(&dom, &empty, latex), None);
        // tex and bbl present: citations come out right, the index does not.
        let s: State = [atom("tex"), atom("bbl")].into_iter().collect();
        let next = transition(&dom, &s, latex).unwrap();
        let expected: State = [
            atom("tex"),
            atom("bbl"),
            atom("aux"),
            atom("idx"),
            atom("dvi"),
            atom("log"),
            atom("dvi_cite_ok"),
        ]
        .into_iter()
        .collect();
        assert_eq!(next, expected);
    }

    #[test]
    fn complete_specs_agree_with_state_transitions() {
        let dom = doc_domain();
        let latex = dom.resolve("latex").unwrap();
        let mut ls = LiteralSet::new();
        for a in dom.atoms() {
            let l = if a.name() == "tex" || a.name() == "bbl" {
                Literal::Pos(a.clone())
            } else {
                Literal::Neg(a.clone())
            };
            ls.insert(l);
        }
        let s = StateSpec::from_literals(ls);
        let out = apply_operator(&dom, &s, latex);
        let state: State = [atom("tex"), atom("bbl")].into_iter().collect();
        let next = transition(&dom, &state, latex).unwrap();
        assert_eq!(out.result.literals().unwrap().pos().sigma(), next);
    }
}

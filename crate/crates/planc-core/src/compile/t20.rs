//! Conditional effects compiled away over partial specifications. Each
//! source step becomes a cycle of unconditional operators: a start operator
//! locks the source operator in, per-rule operators record either the
//! activation or the blocking of each rule, copy operators transfer the
//! recorded effects onto the state, and a cycle-closing operator releases the
//! lock. A rule whose condition is neither entailed nor refuted strands the
//! cycle, matching the illegality of the source application. Input operators
//! must carry pairwise-distinct singleton effect literals.

use super::naming::{fresh_atom, Seg};
use super::CompileError;
use crate::model::{
    has_unique_effect_literals, normalize_singleton_effects, Atom, ConditionalEffect,
    DomainStructure, Formula, Instance, Literal, LiteralSet, Operator, Plan,
};
use crate::semantics::{apply_operator, entails};

pub(super) fn plus(a: &Atom) -> Atom {
    fresh_atom("t20", "plus", &[Seg::Name(a.name())]).expect("plus family")
}

pub(super) fn minus(a: &Atom) -> Atom {
    fresh_atom("t20", "minus", &[Seg::Name(a.name())]).expect("minus family")
}

pub(super) fn pending(a: &Atom) -> Atom {
    fresh_atom("t20", "hash", &[Seg::Name(a.name())]).expect("hash family")
}

pub(super) fn op_lock(name: &str) -> Atom {
    fresh_atom("t20", "op", &[Seg::Name(name)]).expect("op family")
}

pub(super) fn tried(op: usize, rule: usize) -> Atom {
    fresh_atom("t20", "x", &[Seg::Idx(op), Seg::Idx(rule)]).expect("x family")
}

pub(super) fn copying_atom(dom: &DomainStructure) -> Atom {
    let base = fresh_atom("t20", "c", &[]).expect("c family");
    if !dom.has_atom(&base) {
        return base;
    }
    for i in 0.. {
        let cand = fresh_atom("t20", "c", &[Seg::Idx(i)]).expect("c family");
        if !dom.has_atom(&cand) {
            return cand;
        }
    }
    unreachable!()
}

pub(super) fn start_name(name: &str) -> String {
    format!("@pre.{name}")
}

pub(super) fn finish_name(name: &str) -> String {
    format!("@end.{name}")
}

pub(super) fn activate_name(i: usize, j: usize) -> String {
    format!("@act.{i}.{j}")
}

pub(super) fn block_name(i: usize, j: usize) -> String {
    format!("@blk.{i}.{j}")
}

pub(super) fn block_member_name(i: usize, j: usize, m: usize) -> String {
    format!("@blk.{i}.{j}.{m}")
}

pub(super) fn copy_pos_name(a: &Atom) -> String {
    format!("@cp.{}", a.name())
}

pub(super) fn copy_neg_name(a: &Atom) -> String {
    format!("@cm.{}", a.name())
}

pub(super) fn copy_conflict_name(a: &Atom) -> String {
    format!("@cb.{}", a.name())
}

pub(super) const CYCLE_OP: &str = "@cyc";

pub(super) fn check_collisions(dom: &DomainStructure) -> Result<(), CompileError> {
    for a in dom.atoms() {
        for cand in [plus(a), minus(a), pending(a)] {
            if dom.has_atom(&cand) {
                return Err(CompileError::AtomCollision(cand.name().to_string()));
            }
        }
    }
    for op in &dom.operators {
        if dom.has_atom(&op_lock(&op.name)) {
            return Err(CompileError::AtomCollision(op_lock(&op.name).name().to_string()));
        }
    }
    Ok(())
}

/// Unconditional effect helper.
fn uncond(effects: LiteralSet) -> ConditionalEffect {
    ConditionalEffect::new(Vec::new(), effects).expect("nonempty effects")
}

/// The maximum rule count per operator after singleton normalization; the
/// `m` in the declared plan-size bound `len*(3+2m)`.
pub fn max_rule_count(dom: &DomainStructure) -> usize {
    normalize_singleton_effects(dom)
        .operators
        .iter()
        .map(|op| op.post.len())
        .max()
        .unwrap_or(0)
}

/// Shared frame for the start/finish/copy/cycle machinery, which is common
/// to the partial-specification scheme and its complete-state variants.
pub(super) struct Frame {
    pub src: DomainStructure,
    pub copying: Atom,
}

impl Frame {
    pub fn new(dom: &DomainStructure) -> Result<Self, CompileError> {
        check_collisions(dom)?;
        let src = normalize_singleton_effects(dom);
        for (i, op) in src.operators.iter().enumerate() {
            for j in 0..op.post.len() {
                if src.has_atom(&tried(i + 1, j + 1)) {
                    return Err(CompileError::AtomCollision(
                        tried(i + 1, j + 1).name().to_string(),
                    ));
                }
            }
        }
        Ok(Frame { copying: copying_atom(dom), src })
    }

    pub fn new_atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        for a in self.src.atoms() {
            out.push(plus(a));
            out.push(minus(a));
            out.push(pending(a));
        }
        for op in &self.src.operators {
            out.push(op_lock(&op.name));
        }
        for (i, op) in self.src.operators.iter().enumerate() {
            for j in 0..op.post.len() {
                out.push(tried(i + 1, j + 1));
            }
        }
        out.push(self.copying.clone());
        out
    }

    /// All lock atoms negated, as precondition formulae.
    pub fn no_lock_pre(&self) -> Vec<Formula> {
        self.src
            .operators
            .iter()
            .map(|op| Formula::lit(Literal::Neg(op_lock(&op.name))))
            .collect()
    }

    pub fn start_operator(&self, op: &Operator) -> Operator {
        let mut pre = op.pre.clone();
        pre.extend(self.no_lock_pre());
        pre.push(Formula::lit(Literal::Neg(self.copying.clone())));
        let mut effects = LiteralSet::from_iter([Literal::Pos(op_lock(&op.name))]);
        for a in self.src.atoms() {
            effects.insert(Literal::Neg(plus(a)));
            effects.insert(Literal::Neg(minus(a)));
            effects.insert(Literal::Neg(pending(a)));
        }
        for (m, other) in self.src.operators.iter().enumerate() {
            for j in 0..other.post.len() {
                effects.insert(Literal::Neg(tried(m + 1, j + 1)));
            }
        }
        Operator::new(start_name(&op.name), pre, vec![uncond(effects)])
    }

    /// Effects recorded by an activation operator for rule `(i, j)`.
    pub fn activation_effects(&self, i: usize, j: usize, lit: &Literal) -> LiteralSet {
        let mut effects = LiteralSet::from_iter([Literal::Pos(tried(i, j))]);
        match lit {
            Literal::Pos(q) => {
                effects.insert(Literal::Pos(plus(q)));
                effects.insert(Literal::Pos(pending(q)));
            }
            Literal::Neg(q) => {
                effects.insert(Literal::Pos(minus(q)));
                effects.insert(Literal::Pos(pending(q)));
            }
            Literal::Bottom => {
                effects.insert(Literal::Bottom);
            }
            Literal::Top => {}
        }
        effects
    }

    pub fn finish_operator(&self, i: usize, op: &Operator) -> Operator {
        let mut pre = vec![Formula::atom(op_lock(&op.name))];
        for j in 0..op.post.len() {
            pre.push(Formula::atom(tried(i, j + 1)));
        }
        let effects = LiteralSet::from_iter([
            Literal::Pos(self.copying.clone()),
            Literal::Neg(op_lock(&op.name)),
        ]);
        Operator::new(finish_name(&op.name), pre, vec![uncond(effects)])
    }

    pub fn copy_operators(&self) -> Vec<Operator> {
        let mut out = Vec::new();
        for a in self.src.atoms() {
            out.push(Operator::new(
                copy_pos_name(a),
                vec![
                    Formula::atom(self.copying.clone()),
                    Formula::atom(plus(a)),
                    Formula::lit(Literal::Neg(minus(a))),
                    Formula::atom(pending(a)),
                ],
                vec![uncond(LiteralSet::from_iter([
                    Literal::Pos(a.clone()),
                    Literal::Neg(pending(a)),
                ]))],
            ));
            out.push(Operator::new(
                copy_neg_name(a),
                vec![
                    Formula::atom(self.copying.clone()),
                    Formula::lit(Literal::Neg(plus(a))),
                    Formula::atom(minus(a)),
                    Formula::atom(pending(a)),
                ],
                vec![uncond(LiteralSet::from_iter([
                    Literal::Neg(a.clone()),
                    Literal::Neg(pending(a)),
                ]))],
            ));
            out.push(Operator::new(
                copy_conflict_name(a),
                vec![
                    Formula::atom(self.copying.clone()),
                    Formula::atom(plus(a)),
                    Formula::atom(minus(a)),
                    Formula::atom(pending(a)),
                ],
                vec![uncond(LiteralSet::from_iter([Literal::Bottom]))],
            ));
        }
        out
    }

    pub fn cycle_operator(&self) -> Operator {
        let mut pre = vec![Formula::atom(self.copying.clone())];
        for a in self.src.atoms() {
            pre.push(Formula::lit(Literal::Neg(pending(a))));
        }
        Operator::new(
            CYCLE_OP,
            pre,
            vec![uncond(LiteralSet::from_iter([Literal::Neg(self.copying.clone())]))],
        )
    }

    pub fn bookkeeping_false(&self) -> LiteralSet {
        let mut out = LiteralSet::new();
        for a in self.src.atoms() {
            out.insert(Literal::Neg(plus(a)));
            out.insert(Literal::Neg(minus(a)));
            out.insert(Literal::Neg(pending(a)));
        }
        for op in &self.src.operators {
            out.insert(Literal::Neg(op_lock(&op.name)));
        }
        for (i, op) in self.src.operators.iter().enumerate() {
            for j in 0..op.post.len() {
                out.insert(Literal::Neg(tried(i + 1, j + 1)));
            }
        }
        out.insert(Literal::Neg(self.copying.clone()));
        out
    }

    pub fn goal_false(&self) -> LiteralSet {
        let mut out = LiteralSet::new();
        for op in &self.src.operators {
            out.insert(Literal::Neg(op_lock(&op.name)));
        }
        out.insert(Literal::Neg(self.copying.clone()));
        out
    }
}

pub fn fxi(dom: &DomainStructure) -> Result<DomainStructure, CompileError> {
    let frame = Frame::new(dom)?;
    if !has_unique_effect_literals(&frame.src) {
        let culprit = frame
            .src
            .operators
            .iter()
            .find(|op| {
                let mut seen = Vec::new();
                op.post.iter().any(|eff| {
                    let l = eff.effects.iter().next().unwrap();
                    if seen.contains(&l) {
                        true
                    } else {
                        seen.push(l);
                        false
                    }
                })
            })
            .map(|op| op.name.clone())
            .unwrap_or_default();
        return Err(CompileError::NonUniqueEffectLiterals(culprit));
    }

    let mut atoms: Vec<Atom> = dom.atoms().to_vec();
    atoms.extend(frame.new_atoms());

    let mut operators = Vec::new();
    for (i, op) in frame.src.operators.iter().enumerate() {
        operators.push(frame.start_operator(op));
        for (j, eff) in op.post.iter().enumerate() {
            let lit = eff.effects.iter().next().expect("singleton effect");
            let cond = Formula::and_fold(eff.conditions.iter().cloned());
            let lock = Formula::atom(op_lock(&op.name));
            operators.push(Operator::new(
                activate_name(i + 1, j + 1),
                vec![Formula::and(lock.clone(), cond.clone())],
                vec![uncond(frame.activation_effects(i + 1, j + 1, lit))],
            ));
            operators.push(Operator::new(
                block_name(i + 1, j + 1),
                vec![Formula::and(lock, cond.negated())],
                vec![uncond(LiteralSet::from_iter([Literal::Pos(tried(i + 1, j + 1))]))],
            ));
        }
        operators.push(frame.finish_operator(i + 1, op));
    }
    operators.extend(frame.copy_operators());
    operators.push(frame.cycle_operator());

    Ok(DomainStructure::new(dom.name.clone(), atoms, operators)?)
}

pub fn f_init(dom: &DomainStructure) -> LiteralSet {
    Frame::new(dom).expect("f_init after collision check").bookkeeping_false()
}

pub fn f_goal(dom: &DomainStructure) -> LiteralSet {
    Frame::new(dom).expect("f_goal after collision check").goal_false()
}

/// Replay the source plan and choose, per rule, the activation or blocking
/// operator per entailment at each step.
pub fn translate(instance: &Instance, plan: &Plan) -> Result<Plan, CompileError> {
    let src = normalize_singleton_effects(&instance.domain);
    let mut spec = instance.initial_spec();
    let mut steps: Vec<String> = Vec::new();
    for name in plan.steps() {
        let (i, op) = src
            .operators
            .iter()
            .enumerate()
            .find(|(_, o)| o.name == name)
            .ok_or_else(|| crate::model::ModelError::UnknownOperator(name.to_string()))?;
        steps.push(start_name(&op.name));
        for (j, eff) in op.post.iter().enumerate() {
            let cond = Formula::and_fold(eff.conditions.iter().cloned());
            if entails(&spec, &cond) {
                steps.push(activate_name(i + 1, j + 1));
            } else {
                debug_assert!(
                    entails(&spec, &cond.negated()),
                    "a legal source application decides every rule"
                );
                steps.push(block_name(i + 1, j + 1));
            }
        }
        steps.push(finish_name(&op.name));
        let active = crate::semantics::active_effects(&spec, &op.post);
        for a in src.atoms() {
            if active.contains(&Literal::Pos(a.clone())) {
                steps.push(copy_pos_name(a));
            } else if active.contains(&Literal::Neg(a.clone())) {
                steps.push(copy_neg_name(a));
            }
        }
        steps.push(CYCLE_OP.to_string());
        let outcome = apply_operator(&src, &spec, op);
        if outcome.is_illegal() {
            return Err(CompileError::NotASolution);
        }
        spec = outcome.result;
    }
    Ok(Plan(steps))
}

//! Conditional effects compiled away over complete specifications, in a
//! boolean variant and a literal variant. The machinery is the start/record/
//! copy/cycle frame of the partial-specification scheme; the difference is
//! that every rule is either activated or blocked on a complete state, so
//! blocking is tested one condition member at a time and effect literals need
//! not be unique per operator.

use super::t20::{
    activate_name, block_member_name, copy_neg_name, copy_pos_name, finish_name, op_lock,
    start_name, Frame, CYCLE_OP,
};
use super::CompileError;
use crate::model::{
    normalize_singleton_effects, Atom, ConditionalEffect, DomainStructure, Formula, Instance,
    Literal, LiteralSet, Operator, Plan,
};
use crate::semantics::{active_effects, apply_operator, entails};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Boolean,
    Literal,
}

fn uncond(effects: LiteralSet) -> ConditionalEffect {
    ConditionalEffect::new(Vec::new(), effects).expect("nonempty effects")
}

pub fn fxi(dom: &DomainStructure, variant: Variant) -> Result<DomainStructure, CompileError> {
    let frame = Frame::new(dom)?;
    let mut atoms: Vec<Atom> = dom.atoms().to_vec();
    atoms.extend(frame.new_atoms());

    let mut operators = Vec::new();
    for (i, op) in frame.src.operators.iter().enumerate() {
        operators.push(frame.start_operator(op));
        for (j, eff) in op.post.iter().enumerate() {
            let lit = eff.effects.iter().next().expect("singleton effect");
            // Activation keeps the condition members as a precondition set,
            // so the literal variant stays within literal formulae.
            let mut act_pre = vec![Formula::atom(op_lock(&op.name))];
            act_pre.extend(eff.conditions.iter().cloned());
            operators.push(Operator::new(
                activate_name(i + 1, j + 1),
                act_pre,
                vec![uncond(frame.activation_effects(i + 1, j + 1, lit))],
            ));
            // One blocking operator per condition member, negating just that
            // member.
            for (m, member) in eff.conditions.iter().enumerate() {
                if let (Variant::Literal, false) =
                    (variant, matches!(member, Formula::Leaf(_)))
                {
                    return Err(CompileError::NonLiteralFormula(op.name.clone()));
                }
                operators.push(Operator::new(
                    block_member_name(i + 1, j + 1, m + 1),
                    vec![Formula::atom(op_lock(&op.name)), member.negated()],
                    vec![uncond(LiteralSet::from_iter([Literal::Pos(
                        super::t20::tried(i + 1, j + 1),
                    )]))],
                ));
            }
        }
        operators.push(frame.finish_operator(i + 1, op));
    }
    operators.extend(frame.copy_operators());
    operators.push(frame.cycle_operator());

    Ok(DomainStructure::new(dom.name.clone(), atoms, operators)?)
}

/// Replay the source plan; on a complete state every rule is activated or
/// has a refuted condition member to block on.
pub fn translate(
    instance: &Instance,
    plan: &Plan,
    _variant: Variant,
) -> Result<Plan, CompileError> {
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
            if eff.conditions.iter().all(|c| entails(&spec, c)) {
                steps.push(activate_name(i + 1, j + 1));
            } else {
                let m = eff
                    .conditions
                    .iter()
                    .position(|c| entails(&spec, &c.negated()))
                    .expect("complete states decide every condition member");
                steps.push(block_member_name(i + 1, j + 1, m + 1));
            }
        }
        steps.push(finish_name(&op.name));
        let active = active_effects(&spec, &op.post);
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

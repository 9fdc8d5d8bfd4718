//! Literals with conditional effects compiled to atoms with conditional
//! effects. Negative literals move onto mirror atoms as in the unconditional
//! case; consistency of the mirror pairs is policed by conditional effects
//! `{p, p-mirror} ⇒ false` carried by every operator, and a final checking
//! operator validates the last step. Plans gain exactly one step.

use super::naming::{fresh_atom, Seg};
use super::t6::{mirror_atom, tilde, tilde_effects, tilde_pre};
use super::CompileError;
use crate::model::{
    Atom, ConditionalEffect, DomainStructure, Formula, Instance, Literal, LiteralSet, Operator,
    Plan,
};

const CHECK_OP: &str = "@og";

/// The fresh goal-marker atom; suffixed deterministically when the plain name
/// is already taken (as it is when compiling an output of the two-phase
/// scheme, which mints its own `@g`).
fn goal_atom(dom: &DomainStructure) -> Atom {
    let base = fresh_atom("l8", "g", &[]).expect("g family");
    if !dom.has_atom(&base) {
        return base;
    }
    for i in 0.. {
        let cand = fresh_atom("l8", "g", &[Seg::Idx(i)]).expect("g family");
        if !dom.has_atom(&cand) {
            return cand;
        }
    }
    unreachable!()
}

fn cons_effects(dom: &DomainStructure) -> Vec<ConditionalEffect> {
    dom.atoms()
        .iter()
        .map(|p| {
            ConditionalEffect::new(
                vec![Formula::atom(p.clone()), Formula::atom(mirror_atom(p))],
                LiteralSet::from_iter([Literal::Bottom]),
            )
            .unwrap()
        })
        .collect()
}

pub fn fxi(dom: &DomainStructure) -> Result<DomainStructure, CompileError> {
    super::t6::check_collisions(dom)?;
    let g = goal_atom(dom);
    let cons = cons_effects(dom);
    let not_g = ConditionalEffect::new(
        Vec::new(),
        LiteralSet::from_iter([Literal::Neg(g.clone())]),
    )
    .unwrap();

    let mut operators = Vec::new();
    for op in &dom.operators {
        let pre = tilde_pre(&op.name, &op.pre)?;
        let mut post = Vec::new();
        for eff in &op.post {
            let mut conds = Vec::new();
            for c in &eff.conditions {
                match c {
                    Formula::Leaf(Literal::Bottom) => {
                        return Err(CompileError::UnsupportedConstant("false".to_string()))
                    }
                    Formula::Leaf(l) => conds.push(Formula::Leaf(tilde(l))),
                    _ => return Err(CompileError::NonLiteralFormula(op.name.clone())),
                }
            }
            post.push(ConditionalEffect::new(conds, tilde_effects(&eff.effects))?);
        }
        post.extend(cons.iter().cloned());
        post.push(not_g.clone());
        operators.push(Operator::new(op.name.clone(), pre, post));
    }

    let mut check_post = cons;
    check_post.push(
        ConditionalEffect::new(Vec::new(), LiteralSet::from_iter([Literal::Pos(g.clone())]))
            .unwrap(),
    );
    operators.push(Operator::new(CHECK_OP, Vec::new(), check_post));

    let mut atoms = super::t6::expanded_atoms(dom.atoms());
    atoms.push(g);
    Ok(DomainStructure::new(dom.name.clone(), atoms, operators)?)
}

pub fn f_init(dom: &DomainStructure) -> LiteralSet {
    LiteralSet::from_iter([Literal::Neg(goal_atom(dom))])
}

pub fn f_goal(dom: &DomainStructure) -> LiteralSet {
    LiteralSet::from_iter([Literal::Pos(goal_atom(dom))])
}

/// `~I ∪ ¬~¬I`: each known literal fixes both its atom and its mirror.
pub fn t_init(_sigma: &[Atom], lits: &LiteralSet) -> LiteralSet {
    tilde_effects(lits)
}

pub fn t_goal(_sigma: &[Atom], lits: &LiteralSet) -> LiteralSet {
    LiteralSet::from_iter(lits.iter().map(tilde))
}

pub fn translate(_instance: &Instance, plan: &Plan) -> Result<Plan, CompileError> {
    let mut steps: Vec<String> = plan.0.clone();
    steps.push(CHECK_OP.to_string());
    Ok(Plan(steps))
}

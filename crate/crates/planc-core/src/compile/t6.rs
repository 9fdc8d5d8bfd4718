//! Literals and partial specifications compiled to plain atoms with complete
//! specifications. Each negative literal `¬p` becomes a fresh atom, every
//! effect keeps the mirror atom in step, and the initial specification is
//! closed under the closed-world assumption. Plan size is preserved exactly
//! with no extra steps; plans carry over name for name.

use super::naming::{fresh_atom, Seg};
use super::CompileError;
use crate::model::{
    Atom, ConditionalEffect, DomainStructure, Formula, Instance, Literal, LiteralSet, Operator,
    Plan,
};

pub(super) fn mirror_atom(a: &Atom) -> Atom {
    fresh_atom("t6", "neg", &[Seg::Name(a.name())]).expect("neg family")
}

/// `~l`: negative literals move onto the mirror atom.
pub(super) fn tilde(l: &Literal) -> Literal {
    match l {
        Literal::Pos(a) => Literal::Pos(a.clone()),
        Literal::Neg(a) => Literal::Pos(mirror_atom(a)),
        other => other.clone(),
    }
}

/// `~L ∪ ¬~¬L` computed literal by literal: asserting a literal also retracts
/// its mirror.
pub(super) fn tilde_effects(effects: &LiteralSet) -> LiteralSet {
    let mut out = LiteralSet::new();
    for l in effects.iter() {
        out.insert(tilde(l));
        out.insert(tilde(&l.negated()).negated());
    }
    out
}

/// Translate a set of literal-leaf precondition formulae; `true` leaves are
/// vacuous and dropped, `false` leaves are not expressible here.
pub(super) fn tilde_pre(op_name: &str, pre: &[Formula]) -> Result<Vec<Formula>, CompileError> {
    let mut out = Vec::new();
    for f in pre {
        match f {
            Formula::Leaf(Literal::Top) => {}
            Formula::Leaf(Literal::Bottom) => {
                return Err(CompileError::UnsupportedConstant("false".to_string()))
            }
            Formula::Leaf(l) => out.push(Formula::Leaf(tilde(l))),
            _ => return Err(CompileError::NonLiteralFormula(op_name.to_string())),
        }
    }
    Ok(out)
}

pub(super) fn check_collisions(dom: &DomainStructure) -> Result<(), CompileError> {
    for a in dom.atoms() {
        if dom.has_atom(&mirror_atom(a)) {
            return Err(CompileError::AtomCollision(mirror_atom(a).name().to_string()));
        }
    }
    Ok(())
}

pub fn expanded_atoms(sigma: &[Atom]) -> Vec<Atom> {
    let mut out: Vec<Atom> = sigma.to_vec();
    out.extend(sigma.iter().map(mirror_atom));
    out.sort();
    out.dedup();
    out
}

pub fn fxi(dom: &DomainStructure) -> Result<DomainStructure, CompileError> {
    check_collisions(dom)?;
    let operators = dom
        .operators
        .iter()
        .map(|op| {
            let pre = tilde_pre(&op.name, &op.pre)?;
            let post = op
                .post
                .iter()
                .map(|eff| {
                    if !eff.is_unconditional() {
                        return Err(CompileError::ConditionalEffects(op.name.clone()));
                    }
                    ConditionalEffect::new(Vec::new(), tilde_effects(&eff.effects))
                        .map_err(CompileError::from)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Operator::new(op.name.clone(), pre, post))
        })
        .collect::<Result<Vec<_>, CompileError>>()?;
    Ok(DomainStructure::new(dom.name.clone(), expanded_atoms(dom.atoms()), operators)?)
}

/// Closed-world completion of `~S` over the doubled atom set.
pub fn t_init(sigma: &[Atom], lits: &LiteralSet) -> LiteralSet {
    let mut out = LiteralSet::new();
    for l in lits.iter() {
        out.insert(tilde(l));
    }
    for a in expanded_atoms(sigma) {
        if out.fixed_value(&a).is_none() {
            out.insert(Literal::Neg(a));
        }
    }
    out
}

pub fn t_goal(_sigma: &[Atom], lits: &LiteralSet) -> LiteralSet {
    LiteralSet::from_iter(lits.iter().map(tilde))
}

pub fn translate(_instance: &Instance, plan: &Plan) -> Result<Plan, CompileError> {
    Ok(plan.clone())
}

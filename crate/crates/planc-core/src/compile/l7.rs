//! Partial specifications with conditional effects compiled to complete
//! specifications with conditional effects, preserving plan size exactly.
//!
//! Each source operator becomes a pair of phase operators. A phase operator
//! applies the source effects while recording, per atom, whether the atom is
//! known and, per rule, whether the rule was blocked or its effect literal
//! was produced. The next operator tests the previous phase's records and
//! raises `false` when some rule was neither blocked nor covered, which is
//! exactly the situation where the source application was illegal. A final
//! checking operator closes the last step and asserts the goal marker.

use std::collections::BTreeSet;

use super::naming::{fresh_atom, Seg};
use super::CompileError;
use crate::model::{
    normalize_singleton_effects, Atom, ConditionalEffect, DomainStructure, Formula, Instance,
    Literal, LiteralSet, Operator, Plan,
};

fn prime(a: &Atom) -> Atom {
    fresh_atom("l7", "prime", &[Seg::Name(a.name())]).expect("prime family")
}

fn plus(k: usize, a: &Atom) -> Atom {
    fresh_atom("l7", "plus", &[Seg::Idx(k), Seg::Name(a.name())]).expect("plus family")
}

fn minus(k: usize, a: &Atom) -> Atom {
    fresh_atom("l7", "minus", &[Seg::Idx(k), Seg::Name(a.name())]).expect("minus family")
}

fn xvar(k: usize, op: usize, rule: usize) -> Atom {
    fresh_atom("l7", "x", &[Seg::Idx(k), Seg::Idx(op), Seg::Idx(rule)]).expect("x family")
}

/// Singleton atoms, suffixed when the plain name is taken in the source.
fn single(dom: &DomainStructure, family: &str) -> Atom {
    let base = fresh_atom("l7", family, &[]).expect("l7 singleton family");
    if !dom.has_atom(&base) {
        return base;
    }
    for i in 0.. {
        let cand = fresh_atom("l7", family, &[Seg::Idx(i)]).expect("l7 singleton family");
        if !dom.has_atom(&cand) {
            return cand;
        }
    }
    unreachable!()
}

struct Build {
    src: DomainStructure,
    goal_mark: Atom,
    phase: [Atom; 2],
}

impl Build {
    fn new(dom: &DomainStructure) -> Result<Self, CompileError> {
        for a in dom.atoms() {
            for cand in [prime(a), plus(0, a), plus(1, a), minus(0, a), minus(1, a)] {
                if dom.has_atom(&cand) {
                    return Err(CompileError::AtomCollision(cand.name().to_string()));
                }
            }
        }
        let src = normalize_singleton_effects(dom);
        for (i, op) in src.operators.iter().enumerate() {
            for j in 0..op.post.len() {
                for k in 0..2 {
                    let cand = xvar(k, i + 1, j + 1);
                    if src.has_atom(&cand) {
                        return Err(CompileError::AtomCollision(cand.name().to_string()));
                    }
                }
            }
        }
        Ok(Build {
            goal_mark: single(dom, "g"),
            phase: [single(dom, "c0"), single(dom, "c1")],
            src,
        })
    }

    /// The record atom covering rule `(i, j)` in phase `k`: the plus or minus
    /// atom of the rule's effect literal, or none for a `false` effect.
    fn record(&self, k: usize, op: &Operator, j: usize) -> Option<Atom> {
        let lit = op.post[j].effects.iter().next().expect("singleton effect");
        match lit {
            Literal::Pos(q) => Some(plus(k, q)),
            Literal::Neg(q) => Some(minus(k, q)),
            _ => None,
        }
    }

    /// Rules testing the previous phase: a rule that was neither blocked nor
    /// covered by its effect record forces `false`.
    fn test_effects(&self, k: usize) -> Vec<ConditionalEffect> {
        let prev = 1 - k;
        let mut out = Vec::new();
        for (i, op) in self.src.operators.iter().enumerate() {
            for j in 0..op.post.len() {
                let mut conds =
                    vec![Formula::lit(Literal::Neg(xvar(prev, i + 1, j + 1)))];
                if let Some(v) = self.record(prev, op, j) {
                    conds.push(Formula::lit(Literal::Neg(v)));
                }
                out.push(
                    ConditionalEffect::new(conds, LiteralSet::from_iter([Literal::Bottom]))
                        .unwrap(),
                );
            }
        }
        out
    }

    fn condition_literals(op_name: &str, cond: &[Formula]) -> Result<Vec<Literal>, CompileError> {
        let mut lits = Vec::new();
        for c in cond {
            match c {
                Formula::Leaf(l) => lits.push(l.clone()),
                _ => return Err(CompileError::NonLiteralFormula(op_name.to_string())),
            }
        }
        Ok(lits)
    }

    fn phase_operator(&self, k: usize, i: usize, op: &Operator) -> Result<Operator, CompileError> {
        // Source preconditions plus the knownness markers of their atoms:
        // after the closed-world completion an unknown atom reads as false,
        // which would wrongly satisfy a negative precondition literal.
        let mut pre = op.pre.clone();
        let mut pre_atoms: BTreeSet<Atom> = BTreeSet::new();
        for f in &op.pre {
            match f {
                Formula::Leaf(l) => {
                    if let Some(a) = l.atom() {
                        pre_atoms.insert(a.clone());
                    }
                }
                _ => return Err(CompileError::NonLiteralFormula(op.name.clone())),
            }
        }
        pre.extend(pre_atoms.into_iter().map(|a| Formula::atom(prime(&a))));
        pre.push(Formula::atom(self.phase[k].clone()));

        let mut post = Vec::new();
        // Source effects, guarded by knownness of their condition atoms, with
        // the knownness and record updates folded in.
        for eff in op.post.iter() {
            let lits = Self::condition_literals(&op.name, &eff.conditions)?;
            let mut conds: Vec<Formula> = Vec::new();
            let mut seen: BTreeSet<Atom> = BTreeSet::new();
            for l in &lits {
                conds.push(Formula::lit(l.clone()));
                if let Some(a) = l.atom() {
                    seen.insert(a.clone());
                }
            }
            for a in seen {
                conds.push(Formula::atom(prime(&a)));
            }
            let effect_lit = eff.effects.iter().next().expect("singleton effect").clone();
            let effects = match &effect_lit {
                Literal::Pos(q) => LiteralSet::from_iter([
                    effect_lit.clone(),
                    Literal::Pos(prime(q)),
                    Literal::Pos(plus(k, q)),
                ]),
                Literal::Neg(q) => LiteralSet::from_iter([
                    effect_lit.clone(),
                    Literal::Pos(prime(q)),
                    Literal::Pos(minus(k, q)),
                ]),
                _ => LiteralSet::from_iter([effect_lit.clone()]),
            };
            post.push(ConditionalEffect::new(conds, effects)?);
        }
        // Blocking records: a rule is blocked when some condition literal is
        // known false. A rule whose condition set is inconsistent on its own
        // (a complementary pair or `false`) can never be potentially active,
        // so it counts as blocked outright.
        for (j, eff) in op.post.iter().enumerate() {
            let lits = Self::condition_literals(&op.name, &eff.conditions)?;
            let x = LiteralSet::from_iter([Literal::Pos(xvar(k, i + 1, j + 1))]);
            if !LiteralSet::from_iter(lits.iter().cloned()).is_consistent() {
                post.push(ConditionalEffect::new(Vec::new(), x)?);
                continue;
            }
            for l in &lits {
                let conds = match l {
                    Literal::Pos(q) => vec![
                        Formula::lit(Literal::Neg(q.clone())),
                        Formula::atom(prime(q)),
                    ],
                    Literal::Neg(q) => {
                        vec![Formula::atom(q.clone()), Formula::atom(prime(q))]
                    }
                    Literal::Bottom | Literal::Top => continue,
                };
                post.push(ConditionalEffect::new(conds, x.clone())?);
            }
        }
        // Test the previous phase.
        post.extend(self.test_effects(k));
        // Phase flip and goal-marker reset.
        post.push(ConditionalEffect::new(
            Vec::new(),
            LiteralSet::from_iter([
                Literal::Neg(self.phase[k].clone()),
                Literal::Neg(self.goal_mark.clone()),
                Literal::Pos(self.phase[1 - k].clone()),
            ]),
        )?);
        // Record atoms not tied to an effect of this operator default to true.
        let own: BTreeSet<Atom> =
            (0..op.post.len()).filter_map(|j| self.record(k, op, j)).collect();
        let mut defaults = LiteralSet::new();
        for a in self.src.atoms() {
            for cand in [plus(k, a), minus(k, a)] {
                if !own.contains(&cand) {
                    defaults.insert(Literal::Pos(cand));
                }
            }
        }
        if !defaults.is_empty() {
            post.push(ConditionalEffect::new(Vec::new(), defaults)?);
        }
        // Rules of other operators count as handled.
        let mut others = LiteralSet::new();
        for (m, other) in self.src.operators.iter().enumerate() {
            if m == i {
                continue;
            }
            for j in 0..other.post.len() {
                others.insert(Literal::Pos(xvar(k, m + 1, j + 1)));
            }
        }
        if !others.is_empty() {
            post.push(ConditionalEffect::new(Vec::new(), others)?);
        }
        // Clear the other phase's records for the next step.
        let mut clear = LiteralSet::new();
        for a in self.src.atoms() {
            clear.insert(Literal::Neg(plus(1 - k, a)));
            clear.insert(Literal::Neg(minus(1 - k, a)));
        }
        for (m, other) in self.src.operators.iter().enumerate() {
            for j in 0..other.post.len() {
                clear.insert(Literal::Neg(xvar(1 - k, m + 1, j + 1)));
            }
        }
        if !clear.is_empty() {
            post.push(ConditionalEffect::new(Vec::new(), clear)?);
        }

        Ok(Operator::new(phase_op_name(k, &op.name), pre, post))
    }

    fn goal_operator(&self, k: usize) -> Operator {
        let mut post = self.test_effects(k);
        post.push(
            ConditionalEffect::new(
                Vec::new(),
                LiteralSet::from_iter([
                    Literal::Pos(self.goal_mark.clone()),
                    Literal::Neg(self.phase[k].clone()),
                ]),
            )
            .unwrap(),
        );
        Operator::new(goal_op_name(k), vec![Formula::atom(self.phase[k].clone())], post)
    }
}

pub(super) fn phase_op_name(k: usize, name: &str) -> String {
    format!("@o.{k}.{name}")
}

pub(super) fn goal_op_name(k: usize) -> String {
    format!("@og.{k}")
}

pub fn expanded_atoms(sigma: &[Atom]) -> Vec<Atom> {
    let mut out: Vec<Atom> = sigma.to_vec();
    out.extend(sigma.iter().map(prime));
    out.sort();
    out.dedup();
    out
}

pub fn fxi(dom: &DomainStructure) -> Result<DomainStructure, CompileError> {
    let b = Build::new(dom)?;
    let mut atoms: Vec<Atom> = expanded_atoms(dom.atoms());
    for a in b.src.atoms() {
        for k in 0..2 {
            atoms.push(plus(k, a));
            atoms.push(minus(k, a));
        }
    }
    for (i, op) in b.src.operators.iter().enumerate() {
        for j in 0..op.post.len() {
            atoms.push(xvar(0, i + 1, j + 1));
            atoms.push(xvar(1, i + 1, j + 1));
        }
    }
    atoms.push(b.goal_mark.clone());
    atoms.push(b.phase[0].clone());
    atoms.push(b.phase[1].clone());

    let mut operators = Vec::new();
    for (i, op) in b.src.operators.iter().enumerate() {
        operators.push(b.phase_operator(0, i, op)?);
        operators.push(b.phase_operator(1, i, op)?);
    }
    operators.push(b.goal_operator(0));
    operators.push(b.goal_operator(1));

    Ok(DomainStructure::new(dom.name.clone(), atoms, operators)?)
}

/// Bookkeeping initialization. Phase 0 starts; the records the first operator
/// will test (the other phase's rule records) start as handled, since there
/// is no step before the first one.
pub fn f_init(dom: &DomainStructure) -> LiteralSet {
    let b = Build::new(dom).expect("f_init after collision check");
    let mut out = LiteralSet::new();
    out.insert(Literal::Neg(b.goal_mark.clone()));
    out.insert(Literal::Pos(b.phase[0].clone()));
    out.insert(Literal::Neg(b.phase[1].clone()));
    for a in b.src.atoms() {
        for k in 0..2 {
            out.insert(Literal::Neg(plus(k, a)));
            out.insert(Literal::Neg(minus(k, a)));
        }
    }
    for (i, op) in b.src.operators.iter().enumerate() {
        for j in 0..op.post.len() {
            out.insert(Literal::Neg(xvar(0, i + 1, j + 1)));
            out.insert(Literal::Pos(xvar(1, i + 1, j + 1)));
        }
    }
    out
}

pub fn f_goal(dom: &DomainStructure) -> LiteralSet {
    let b = Build::new(dom).expect("f_goal after collision check");
    LiteralSet::from_iter([Literal::Pos(b.goal_mark)])
}

/// Closed-world completion over the source atoms plus the completion of the
/// knownness markers: an atom's marker is true exactly when the atom is
/// fixed by the source specification.
pub fn t_init(sigma: &[Atom], lits: &LiteralSet) -> LiteralSet {
    let mut out = LiteralSet::new();
    for a in sigma {
        match lits.fixed_value(a) {
            Some(true) => {
                out.insert(Literal::Pos(a.clone()));
                out.insert(Literal::Pos(prime(a)));
            }
            Some(false) => {
                out.insert(Literal::Neg(a.clone()));
                out.insert(Literal::Pos(prime(a)));
            }
            None => {
                out.insert(Literal::Neg(a.clone()));
                out.insert(Literal::Neg(prime(a)));
            }
        }
    }
    out
}

/// Goal literals additionally require their atoms' knownness markers. The
/// initial completion sets unknown atoms false, so a bare negative goal would
/// hold in the compiled instance without the source ever having fixed the
/// atom; the marker closes that gap.
pub fn t_goal(_sigma: &[Atom], lits: &LiteralSet) -> LiteralSet {
    let mut out = lits.clone();
    for l in lits.iter() {
        if let Some(a) = l.atom() {
            out.insert(Literal::Pos(prime(a)));
        }
    }
    out
}

/// Alternate the phase copies of the source steps and close with the checking
/// operator of the pending phase.
pub fn translate(instance: &Instance, plan: &Plan) -> Result<Plan, CompileError> {
    let mut steps = Vec::new();
    for (idx, name) in plan.steps().enumerate() {
        instance.domain.resolve(name)?;
        steps.push(phase_op_name(idx % 2, name));
    }
    steps.push(goal_op_name(plan.len() % 2));
    Ok(Plan(steps))
}

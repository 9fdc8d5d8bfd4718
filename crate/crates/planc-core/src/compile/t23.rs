//! Boolean precondition formulae compiled down to literal preconditions.
//! Every distinct sub-formula gets a value atom and a computed marker;
//! evaluation operators fill them in bottom-up, and each source operator is
//! replaced by one that fires once its formula's value is computed true,
//! resetting all markers. Preconditions are folded to a single formula first.

use std::collections::HashMap;

use super::naming::{fresh_atom, Seg};
use super::CompileError;
use crate::model::{
    normalize_single_precondition, Atom, ConditionalEffect, DomainStructure, Formula, Instance,
    Literal, LiteralSet, Operator, Plan,
};

fn value_atom(k: usize) -> Atom {
    fresh_atom("t23", "f", &[Seg::Idx(k)]).expect("f family")
}

fn done_atom(k: usize) -> Atom {
    fresh_atom("t23", "fdone", &[Seg::Idx(k)]).expect("fdone family")
}

fn eval_name(k: usize, variant: &str) -> String {
    format!("@ev.{k}.{variant}")
}

/// Sub-formula table: structural dedup, indexed canonically by post-order of
/// first occurrence across operators, 1-based. Negative literal leaves count
/// as a negation over the positive leaf.
pub(super) struct SubIndex {
    index: HashMap<Formula, usize>,
    order: Vec<Formula>,
}

impl SubIndex {
    fn new() -> Self {
        SubIndex { index: HashMap::new(), order: Vec::new() }
    }

    fn visit(&mut self, f: &Formula) -> usize {
        match f {
            Formula::Leaf(Literal::Neg(a)) => {
                self.visit(&Formula::atom(a.clone()));
            }
            Formula::Not(g) => {
                self.visit(g);
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                self.visit(a);
                self.visit(b);
            }
            Formula::Leaf(_) => {}
        }
        if let Some(&k) = self.index.get(f) {
            return k;
        }
        let k = self.order.len() + 1;
        self.index.insert(f.clone(), k);
        self.order.push(f.clone());
        k
    }

    fn of(&self, f: &Formula) -> usize {
        self.index[f]
    }

    fn len(&self) -> usize {
        self.order.len()
    }

    /// Distinct sub-formulae of one formula, in post-order with duplicates
    /// removed.
    fn post_order_of(f: &Formula) -> Vec<Formula> {
        let mut acc = Vec::new();
        fn walk(f: &Formula, acc: &mut Vec<Formula>) {
            match f {
                Formula::Leaf(Literal::Neg(a)) => walk(&Formula::atom(a.clone()), acc),
                Formula::Not(g) => walk(g, acc),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    walk(a, acc);
                    walk(b, acc);
                }
                Formula::Leaf(_) => {}
            }
            if !acc.contains(f) {
                acc.push(f.clone());
            }
        }
        walk(f, &mut acc);
        acc
    }
}

fn build_index(src: &DomainStructure) -> SubIndex {
    let mut idx = SubIndex::new();
    for op in &src.operators {
        for f in &op.pre {
            idx.visit(f);
        }
    }
    idx
}

/// The largest number of distinct sub-formulae in one operator's folded
/// precondition; the `m` in the declared plan-size bound `len*(m+1)`.
pub fn max_subformula_count(dom: &DomainStructure) -> usize {
    let src = normalize_single_precondition(dom);
    src.operators
        .iter()
        .map(|op| op.pre.iter().map(|f| SubIndex::post_order_of(f).len()).sum::<usize>())
        .max()
        .unwrap_or(0)
}

fn check_collisions(dom: &DomainStructure, count: usize) -> Result<(), CompileError> {
    for k in 1..=count {
        for cand in [value_atom(k), done_atom(k)] {
            if dom.has_atom(&cand) {
                return Err(CompileError::AtomCollision(cand.name().to_string()));
            }
        }
    }
    Ok(())
}

fn uncond(effects: LiteralSet) -> ConditionalEffect {
    ConditionalEffect::new(Vec::new(), effects).expect("nonempty effects")
}

fn set_value(k: usize, value: bool) -> LiteralSet {
    LiteralSet::from_iter([
        Literal::Pos(done_atom(k)),
        if value { Literal::Pos(value_atom(k)) } else { Literal::Neg(value_atom(k)) },
    ])
}

fn computed(k: usize, value: bool) -> Vec<Formula> {
    vec![
        Formula::atom(done_atom(k)),
        if value {
            Formula::atom(value_atom(k))
        } else {
            Formula::lit(Literal::Neg(value_atom(k)))
        },
    ]
}

/// Evaluation operators for one sub-formula.
fn eval_operators(idx: &SubIndex, f: &Formula) -> Vec<Operator> {
    let k = idx.of(f);
    match f {
        Formula::Leaf(Literal::Pos(p)) => vec![
            Operator::new(
                eval_name(k, "pos"),
                vec![Formula::atom(p.clone())],
                vec![uncond(set_value(k, true))],
            ),
            Operator::new(
                eval_name(k, "neg"),
                vec![Formula::lit(Literal::Neg(p.clone()))],
                vec![uncond(set_value(k, false))],
            ),
        ],
        Formula::Leaf(Literal::Top) => vec![Operator::new(
            eval_name(k, "const"),
            Vec::new(),
            vec![uncond(set_value(k, true))],
        )],
        Formula::Leaf(Literal::Bottom) => vec![Operator::new(
            eval_name(k, "const"),
            Vec::new(),
            vec![uncond(set_value(k, false))],
        )],
        Formula::Leaf(Literal::Neg(a)) => {
            let kc = idx.of(&Formula::atom(a.clone()));
            vec![
                Operator::new(
                    eval_name(k, "pos"),
                    computed(kc, false),
                    vec![uncond(set_value(k, true))],
                ),
                Operator::new(
                    eval_name(k, "neg"),
                    computed(kc, true),
                    vec![uncond(set_value(k, false))],
                ),
            ]
        }
        Formula::Not(g) => {
            let kc = idx.of(g);
            vec![
                Operator::new(
                    eval_name(k, "pos"),
                    computed(kc, false),
                    vec![uncond(set_value(k, true))],
                ),
                Operator::new(
                    eval_name(k, "neg"),
                    computed(kc, true),
                    vec![uncond(set_value(k, false))],
                ),
            ]
        }
        Formula::And(a, b) => {
            let (ka, kb) = (idx.of(a), idx.of(b));
            let mut both = computed(ka, true);
            both.extend(computed(kb, true));
            vec![
                Operator::new(eval_name(k, "pos"), both, vec![uncond(set_value(k, true))]),
                Operator::new(
                    eval_name(k, "neg1"),
                    computed(ka, false),
                    vec![uncond(set_value(k, false))],
                ),
                Operator::new(
                    eval_name(k, "neg2"),
                    computed(kb, false),
                    vec![uncond(set_value(k, false))],
                ),
            ]
        }
        Formula::Or(a, b) => {
            let (ka, kb) = (idx.of(a), idx.of(b));
            let mut neither = computed(ka, false);
            neither.extend(computed(kb, false));
            vec![
                Operator::new(
                    eval_name(k, "pos1"),
                    computed(ka, true),
                    vec![uncond(set_value(k, true))],
                ),
                Operator::new(
                    eval_name(k, "pos2"),
                    computed(kb, true),
                    vec![uncond(set_value(k, true))],
                ),
                Operator::new(eval_name(k, "neg"), neither, vec![uncond(set_value(k, false))]),
            ]
        }
    }
}

pub fn fxi(dom: &DomainStructure) -> Result<DomainStructure, CompileError> {
    for op in &dom.operators {
        if op.post.iter().any(|eff| !eff.is_unconditional()) {
            return Err(CompileError::ConditionalEffects(op.name.clone()));
        }
    }
    let src = normalize_single_precondition(dom);
    let idx = build_index(&src);
    check_collisions(dom, idx.len())?;

    let mut atoms: Vec<Atom> = dom.atoms().to_vec();
    for k in 1..=idx.len() {
        atoms.push(value_atom(k));
        atoms.push(done_atom(k));
    }

    let reset: LiteralSet =
        (1..=idx.len()).map(|k| Literal::Neg(done_atom(k))).collect();

    let mut operators = Vec::new();
    for f in &idx.order {
        operators.extend(eval_operators(&idx, f));
    }
    for op in &src.operators {
        let formula = &op.pre[0];
        let k = idx.of(formula);
        let mut post = op.post.clone();
        if !reset.is_empty() {
            post.push(uncond(reset.clone()));
        }
        operators.push(Operator::new(
            op.name.clone(),
            vec![Formula::atom(value_atom(k)), Formula::atom(done_atom(k))],
            post,
        ));
    }

    Ok(DomainStructure::new(dom.name.clone(), atoms, operators)?)
}

pub fn f_init(dom: &DomainStructure) -> LiteralSet {
    let src = normalize_single_precondition(dom);
    let idx = build_index(&src);
    let mut out = LiteralSet::new();
    for k in 1..=idx.len() {
        out.insert(Literal::Neg(value_atom(k)));
        out.insert(Literal::Neg(done_atom(k)));
    }
    out
}

pub fn f_goal(dom: &DomainStructure) -> LiteralSet {
    let src = normalize_single_precondition(dom);
    let idx = build_index(&src);
    (1..=idx.len()).map(|k| Literal::Neg(done_atom(k))).collect()
}

/// Replay the source plan, emitting the bottom-up evaluation steps of each
/// operator's formula followed by the operator itself.
pub fn translate(instance: &Instance, plan: &Plan) -> Result<Plan, CompileError> {
    let src = normalize_single_precondition(&instance.domain);
    let idx = build_index(&src);
    let mut state = instance.initial_spec();
    let mut steps: Vec<String> = Vec::new();
    for name in plan.steps() {
        let op = src.resolve(name)?;
        let formula = &op.pre[0];
        let truth = |f: &Formula| -> bool {
            crate::semantics::entails(&state, f)
        };
        for sub in SubIndex::post_order_of(formula) {
            let k = idx.of(&sub);
            let variant = match &sub {
                Formula::Leaf(Literal::Pos(_)) => {
                    if truth(&sub) {
                        "pos"
                    } else {
                        "neg"
                    }
                }
                Formula::Leaf(Literal::Top) | Formula::Leaf(Literal::Bottom) => "const",
                Formula::Leaf(Literal::Neg(_)) | Formula::Not(_) => {
                    if truth(&sub) {
                        "pos"
                    } else {
                        "neg"
                    }
                }
                Formula::And(a, _) => {
                    if truth(&sub) {
                        "pos"
                    } else if !truth(a) {
                        "neg1"
                    } else {
                        "neg2"
                    }
                }
                Formula::Or(a, _) => {
                    if truth(&sub) {
                        if truth(a) {
                            "pos1"
                        } else {
                            "pos2"
                        }
                    } else {
                        "neg"
                    }
                }
            };
            steps.push(eval_name(k, variant));
        }
        steps.push(op.name.clone());
        let outcome = crate::semantics::apply_operator(&src, &state, op);
        if outcome.is_illegal() {
            return Err(CompileError::NotASolution);
        }
        state = outcome.result;
    }
    Ok(Plan(steps))
}

//! Constructions used as generators and cross-checks: the copy domain, the
//! 3CNF-unsatisfiability-to-one-step-plan reduction, and seeded random
//! instance generation.

use crate::compile::naming::{fresh_atom, Seg};
use crate::model::{
    Atom, ConditionalEffect, DomainStructure, Formula, FormalismTag, FormulaClass, Instance,
    Literal, LiteralSet, Operator,
};

// ---------------------------------------------------------------------------
// Copy domain
// ---------------------------------------------------------------------------

/// Single-operator domain propagating each atom's truth value to a shadow
/// atom via paired conditional effects: `pᵢ ⇒ pᵢ-copy`, `¬pᵢ ⇒ ¬pᵢ-copy`.
pub fn copy_domain(n: usize) -> DomainStructure {
    assert!(n >= 1, "copy domain needs at least one atom");
    let base: Vec<Atom> = (1..=n).map(|i| Atom::internal(format!("p{i}"))).collect();
    let shadows: Vec<Atom> = base
        .iter()
        .map(|a| fresh_atom("copy", "hashcopy", &[Seg::Name(a.name())]).expect("copy family"))
        .collect();
    let mut effects = Vec::new();
    for (p, s) in base.iter().zip(shadows.iter()) {
        effects.push(
            ConditionalEffect::new(
                vec![Formula::atom(p.clone())],
                LiteralSet::from_iter([Literal::Pos(s.clone())]),
            )
            .unwrap(),
        );
        effects.push(
            ConditionalEffect::new(
                vec![Formula::lit(Literal::Neg(p.clone()))],
                LiteralSet::from_iter([Literal::Neg(s.clone())]),
            )
            .unwrap(),
        );
    }
    let op = Operator::new("copy", Vec::new(), effects);
    let mut atoms = base;
    atoms.extend(shadows);
    DomainStructure::new("copy", atoms, vec![op]).expect("well-formed copy domain")
}

/// The base (non-shadow) atoms of a copy domain, in index order.
pub fn copy_domain_base_atoms(n: usize) -> Vec<Atom> {
    (1..=n).map(|i| Atom::internal(format!("p{i}"))).collect()
}

/// Shadow of a literal set: each literal transferred onto the copy atoms.
pub fn shadow_literals(lits: &LiteralSet) -> LiteralSet {
    LiteralSet::from_iter(lits.iter().map(|l| match l {
        Literal::Pos(a) => Literal::Pos(shadow_atom(a)),
        Literal::Neg(a) => Literal::Neg(shadow_atom(a)),
        other => other.clone(),
    }))
}

fn shadow_atom(a: &Atom) -> Atom {
    fresh_atom("copy", "hashcopy", &[Seg::Name(a.name())]).expect("copy family")
}

// ---------------------------------------------------------------------------
// 3CNF and the unsatisfiability gadget
// ---------------------------------------------------------------------------

/// A clause of exactly three literals over pairwise-distinct atoms, stored in
/// canonical order (atom index, positive before negative).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause3 {
    lits: [(usize, bool); 3],
}

impl Clause3 {
    /// Literals are `(1-based atom index, positive)` pairs.
    pub fn new(
        a: (usize, bool),
        b: (usize, bool),
        c: (usize, bool),
    ) -> Result<Self, String> {
        let mut lits = [a, b, c];
        lits.sort_by_key(|&(i, positive)| (i, !positive));
        if lits[0].0 == lits[1].0 || lits[1].0 == lits[2].0 {
            return Err("clause atoms must be pairwise distinct".to_string());
        }
        if lits.iter().any(|&(i, _)| i == 0) {
            return Err("atom indices are 1-based".to_string());
        }
        Ok(Clause3 { lits })
    }

    pub fn literals(&self) -> &[(usize, bool); 3] {
        &self.lits
    }

    pub fn satisfied_by(&self, assignment: u64) -> bool {
        self.lits
            .iter()
            .any(|&(i, positive)| (assignment >> (i - 1)) & 1 == u64::from(positive))
    }

    fn marker_atom(&self) -> Atom {
        let segs: Vec<String> = self
            .lits
            .iter()
            .map(|&(i, positive)| {
                if positive {
                    format!("p{i}")
                } else {
                    format!("not_p{i}")
                }
            })
            .collect();
        let segs: Vec<Seg> = segs.iter().map(|s| Seg::Name(s)).collect();
        fresh_atom("unsat3cnf", "d", &segs).expect("unsat family")
    }
}

/// A 3CNF formula over atoms `p1..pn`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf3 {
    pub n: usize,
    pub clauses: Vec<Clause3>,
}

impl Cnf3 {
    pub fn new(n: usize, clauses: Vec<Clause3>) -> Result<Self, String> {
        if n < 3 {
            return Err("need at least 3 atoms".to_string());
        }
        for c in &clauses {
            if c.lits.iter().any(|&(i, _)| i > n) {
                return Err(format!("clause uses atom index beyond p{n}"));
            }
        }
        let mut clauses = clauses;
        clauses.sort();
        clauses.dedup();
        Ok(Cnf3 { n, clauses })
    }

    /// Truth-table satisfiability over the `2^n` assignments.
    pub fn satisfiable(&self) -> bool {
        (0u64..(1 << self.n)).any(|m| self.clauses.iter().all(|c| c.satisfied_by(m)))
    }
}

/// All clauses with three literals over `p1..pn`: the 3-element atom subsets
/// in lexicographic order, each with its 8 polarity choices.
pub fn all_clauses(n: usize) -> Vec<Clause3> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            for k in (j + 1)..=n {
                for bits in 0..8u8 {
                    let pol = |m: u8| bits & (1 << m) == 0;
                    out.push(Clause3::new((i, pol(0)), (j, pol(1)), (k, pol(2))).unwrap());
                }
            }
        }
    }
    out.sort();
    out
}

/// The single-operator structure whose precondition is the negation of the
/// guarded conjunction over all candidate clauses; the operator asserts the
/// goal atom unconditionally.
pub fn unsat_gadget_domain(n: usize) -> Result<DomainStructure, String> {
    if n < 3 {
        return Err("the gadget needs n >= 3".to_string());
    }
    let clauses = all_clauses(n);
    let mut atoms: Vec<Atom> = (1..=n).map(|i| Atom::internal(format!("p{i}"))).collect();
    atoms.extend(clauses.iter().map(Clause3::marker_atom));
    atoms.push(Atom::internal("g".to_string()));

    let guarded = Formula::and_fold(clauses.iter().map(|c| {
        let lits = c.lits.iter().map(|&(i, positive)| {
            let a = Atom::internal(format!("p{i}"));
            Formula::lit(if positive { Literal::Pos(a) } else { Literal::Neg(a) })
        });
        Formula::or_fold(lits.chain([Formula::atom(c.marker_atom())]))
    }));
    let op = Operator::new(
        "conclude",
        vec![Formula::not(guarded)],
        vec![ConditionalEffect::unconditional(LiteralSet::from_iter([Literal::Pos(
            Atom::internal("g".to_string()),
        )]))
        .unwrap()],
    );
    DomainStructure::new("unsat3cnf", atoms, vec![op]).map_err(|e| e.to_string())
}

/// The instance for a particular formula: marker atoms of the formula's
/// clauses are false, all other marker atoms true, the goal atom false, and
/// the value atoms left unknown. A one-step plan exists iff the formula is
/// unsatisfiable.
pub fn unsat_gadget_instance(cnf: &Cnf3) -> Result<Instance, String> {
    let dom = unsat_gadget_domain(cnf.n)?;
    let mut init = LiteralSet::new();
    for clause in all_clauses(cnf.n) {
        let marker = clause.marker_atom();
        if cnf.clauses.contains(&clause) {
            init.insert(Literal::Neg(marker));
        } else {
            init.insert(Literal::Pos(marker));
        }
    }
    init.insert(Literal::Neg(Atom::internal("g".to_string())));
    let goal = LiteralSet::from_iter([Literal::Pos(Atom::internal("g".to_string()))]);
    Instance::new(dom, init, goal).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Seeded random instances
// ---------------------------------------------------------------------------

/// Parameters for the seeded generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub tag: FormalismTag,
    pub atom_count: usize,
    pub operator_count: usize,
    pub max_effects: usize,
    pub max_condition_depth: usize,
    pub seed: u64,
}

/// splitmix64: a fixed 64-bit generator, identical on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` (`bound > 0`).
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn chance(&mut self, num: u32, den: u32) -> bool {
        (self.next_u64() % u64::from(den)) < u64::from(num)
    }
}

/// A random instance classifying within the requested tag, deterministic per
/// seed.
pub fn random_instance(params: &GenParams) -> Instance {
    let mut rng = SplitMix64::new(params.seed);
    let n = params.atom_count.max(1);
    let atoms: Vec<Atom> = (1..=n).map(|i| Atom::internal(format!("p{i}"))).collect();

    let random_literal = |rng: &mut SplitMix64| {
        let a = atoms[rng.below(n)].clone();
        if rng.chance(1, 2) {
            Literal::Pos(a)
        } else {
            Literal::Neg(a)
        }
    };
    let random_formula = |rng: &mut SplitMix64| match params.tag.class {
        FormulaClass::Atoms => Formula::atom(atoms[rng.below(n)].clone()),
        FormulaClass::Literals => Formula::lit(random_literal(rng)),
        FormulaClass::Boolean => {
            fn tree(
                rng: &mut SplitMix64,
                depth: usize,
                atoms: &[Atom],
            ) -> Formula {
                if depth == 0 || rng.chance(2, 5) {
                    let a = atoms[rng.below(atoms.len())].clone();
                    return if rng.chance(1, 2) {
                        Formula::atom(a)
                    } else {
                        Formula::lit(Literal::Neg(a))
                    };
                }
                match rng.below(3) {
                    0 => Formula::not(tree(rng, depth - 1, atoms)),
                    1 => Formula::and(tree(rng, depth - 1, atoms), tree(rng, depth - 1, atoms)),
                    _ => Formula::or(tree(rng, depth - 1, atoms), tree(rng, depth - 1, atoms)),
                }
            }
            tree(rng, params.max_condition_depth.max(1), &atoms)
        }
    };

    let mut operators = Vec::new();
    for i in 1..=params.operator_count {
        let pre_count = rng.below(3);
        let pre: Vec<Formula> = (0..pre_count).map(|_| random_formula(&mut rng)).collect();
        let eff_count = 1 + rng.below(params.max_effects.max(1));
        let mut post = Vec::new();
        for _ in 0..eff_count {
            let conds = if params.tag.conditional {
                let c = rng.below(3);
                (0..c).map(|_| random_formula(&mut rng)).collect()
            } else {
                Vec::new()
            };
            let lit_count = 1 + rng.below(2);
            let mut effects = LiteralSet::new();
            for _ in 0..lit_count {
                effects.insert(random_literal(&mut rng));
            }
            if !effects.is_consistent() {
                // Keep single-rule effect sets consistent; conflicts across
                // rules are still possible and exercised.
                effects = LiteralSet::from_iter([random_literal(&mut rng)]);
            }
            post.push(ConditionalEffect::new(conds, effects).unwrap());
        }
        operators.push(Operator::new(format!("op{i}"), pre, post));
    }

    let dom = DomainStructure::new("gen", atoms.clone(), operators)
        .expect("generated domain is well-formed");

    let mut init = LiteralSet::new();
    for a in &atoms {
        if params.tag.incomplete {
            match rng.below(3) {
                0 => init.insert(Literal::Pos(a.clone())),
                1 => init.insert(Literal::Neg(a.clone())),
                _ => {}
            }
        } else if rng.chance(1, 2) {
            init.insert(Literal::Pos(a.clone()));
        } else {
            init.insert(Literal::Neg(a.clone()));
        }
    }

    let mut goal = LiteralSet::new();
    let goal_count = 1 + rng.below(2.min(n));
    for _ in 0..goal_count {
        let a = atoms[rng.below(n)].clone();
        let lit = if params.tag.class >= FormulaClass::Literals && rng.chance(1, 3) {
            Literal::Neg(a)
        } else {
            Literal::Pos(a)
        };
        if !goal.contains(&lit.negated()) {
            goal.insert(lit);
        }
    }

    Instance::new(dom, init, goal).expect("generated instance is well-formed")
}

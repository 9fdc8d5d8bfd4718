//! Domain types: atoms, literals, formulae, state specifications, operators,
//! domain structures, instances, plans, and the formalism lattice.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid atom name `{0}`")]
    InvalidAtomName(String),
    #[error("atom `{0}` is not declared in the domain")]
    UndeclaredAtom(String),
    #[error("duplicate operator name `{0}`")]
    DuplicateOperator(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("conditional effect has an empty effect set")]
    EmptyEffects,
    #[error("goal may not contain the constants true/false")]
    ConstantInGoal,
    #[error("unknown formalism name `{0}`")]
    UnknownFormalism(String),
}

// ---------------------------------------------------------------------------
// Atoms and literals
// ---------------------------------------------------------------------------

/// A propositional atom. Names starting with `@` are reserved for
/// compiler-generated atoms; user input must not use that prefix.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    /// Accepts both user atoms (`[a-z_][a-z0-9_-]*`) and generated `@`-atoms.
    pub fn new(name: &str) -> Result<Self, ModelError> {
        if Self::valid_user(name) || Self::valid_generated(name) {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(ModelError::InvalidAtomName(name.to_string()))
        }
    }

    /// Constructor for names the caller already knows to be well-formed.
    pub(crate) fn internal(name: String) -> Self {
        debug_assert!(
            Self::valid_user(&name) || Self::valid_generated(&name),
            "malformed internal atom {name}"
        );
        Atom(Arc::from(name.as_str()))
    }

    fn valid_user(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_lowercase() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
    }

    fn valid_generated(name: &str) -> bool {
        let mut chars = name.chars();
        if chars.next() != Some('@') {
            return false;
        }
        let rest = &name[1..];
        !rest.is_empty()
            && rest.chars().all(|c| {
                c.is_ascii_lowercase() || c.is_ascii_digit() || matches!(c, '_' | '-' | '.' | '@')
            })
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_generated(&self) -> bool {
        self.0.starts_with('@')
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal: an atom, a negated atom, or one of the constants.
/// Negation is an involution and `¬TOP = BOTTOM`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Top,
    Bottom,
    Pos(Atom),
    Neg(Atom),
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Literal::Pos(atom)
    }

    pub fn negative(atom: Atom) -> Self {
        Literal::Neg(atom)
    }

    pub fn negated(&self) -> Self {
        match self {
            Literal::Top => Literal::Bottom,
            Literal::Bottom => Literal::Top,
            Literal::Pos(a) => Literal::Neg(a.clone()),
            Literal::Neg(a) => Literal::Pos(a.clone()),
        }
    }

    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Literal::Pos(a) | Literal::Neg(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, Literal::Pos(_))
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Literal::Neg(_))
    }

    /// Canonical order: constants first, then by atom name with the positive
    /// literal before the negative one.
    fn rank(&self) -> (u8, Option<(&str, u8)>) {
        match self {
            Literal::Top => (0, None),
            Literal::Bottom => (1, None),
            Literal::Pos(a) => (2, Some((a.name(), 0))),
            Literal::Neg(a) => (2, Some((a.name(), 1))),
        }
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Top => write!(f, "true"),
            Literal::Bottom => write!(f, "false"),
            Literal::Pos(a) => write!(f, "{a}"),
            Literal::Neg(a) => write!(f, "(not {a})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Literal sets
// ---------------------------------------------------------------------------

/// An ordered set of literals in canonical order (atom name, positive before
/// negative). The canonical order makes equal mathematical sets equal values.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LiteralSet {
    lits: Vec<Literal>,
}

impl LiteralSet {
    pub fn new() -> Self {
        LiteralSet { lits: Vec::new() }
    }

    pub fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        let mut lits: Vec<Literal> = iter.into_iter().collect();
        lits.sort();
        lits.dedup();
        LiteralSet { lits }
    }

    pub fn insert(&mut self, lit: Literal) {
        if let Err(pos) = self.lits.binary_search(&lit) {
            self.lits.insert(pos, lit);
        }
    }

    pub fn remove(&mut self, lit: &Literal) {
        if let Ok(pos) = self.lits.binary_search(lit) {
            self.lits.remove(pos);
        }
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.lits.binary_search(lit).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Literal> {
        self.lits.iter()
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn union(&self, other: &LiteralSet) -> LiteralSet {
        let mut out = self.clone();
        for l in other.iter() {
            out.insert(l.clone());
        }
        out
    }

    pub fn minus(&self, other: &LiteralSet) -> LiteralSet {
        LiteralSet {
            lits: self.lits.iter().filter(|l| !other.contains(l)).cloned().collect(),
        }
    }

    pub fn is_subset_of(&self, other: &LiteralSet) -> bool {
        self.lits.iter().all(|l| other.contains(l))
    }

    /// Positive literals.
    pub fn pos(&self) -> LiteralSet {
        LiteralSet {
            lits: self.lits.iter().filter(|l| l.is_positive()).cloned().collect(),
        }
    }

    /// Negative literals.
    pub fn neg(&self) -> LiteralSet {
        LiteralSet {
            lits: self.lits.iter().filter(|l| l.is_negative()).cloned().collect(),
        }
    }

    /// The atoms used in the set.
    pub fn sigma(&self) -> BTreeSet<Atom> {
        self.lits.iter().filter_map(|l| l.atom().cloned()).collect()
    }

    /// Element-wise negation.
    pub fn negated(&self) -> LiteralSet {
        LiteralSet::from_iter(self.lits.iter().map(|l| l.negated()))
    }

    /// The truth value of `atom` when fixed by this set, if any.
    pub fn fixed_value(&self, atom: &Atom) -> Option<bool> {
        if self.contains(&Literal::Pos(atom.clone())) {
            Some(true)
        } else if self.contains(&Literal::Neg(atom.clone())) {
            Some(false)
        } else {
            None
        }
    }

    /// No `BOTTOM` and no complementary pair. `TOP` does not hurt consistency.
    pub fn is_consistent(&self) -> bool {
        if self.contains(&Literal::Bottom) {
            return false;
        }
        // Canonical order places `p` directly before `(not p)`.
        self.lits.windows(2).all(|w| match (&w[0], &w[1]) {
            (Literal::Pos(a), Literal::Neg(b)) => a != b,
            _ => true,
        })
    }
}

impl FromIterator<Literal> for LiteralSet {
    fn from_iter<T: IntoIterator<Item = Literal>>(iter: T) -> Self {
        LiteralSet::from_iter(iter)
    }
}

impl fmt::Debug for LiteralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.lits.iter()).finish()
    }
}

// ---------------------------------------------------------------------------
// State specifications
// ---------------------------------------------------------------------------

/// A set of literals describing a set of states, or the distinguished illegal
/// value. `TOP` is dropped on construction; a set containing `BOTTOM` or a
/// complementary pair collapses to `Illegal`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum StateSpec {
    Consistent(LiteralSet),
    Illegal,
}

impl StateSpec {
    pub fn from_literals(lits: LiteralSet) -> Self {
        let mut lits = lits;
        lits.remove(&Literal::Top);
        if lits.is_consistent() {
            StateSpec::Consistent(lits)
        } else {
            StateSpec::Illegal
        }
    }

    pub fn empty() -> Self {
        StateSpec::Consistent(LiteralSet::new())
    }

    pub fn is_illegal(&self) -> bool {
        matches!(self, StateSpec::Illegal)
    }

    pub fn literals(&self) -> Option<&LiteralSet> {
        match self {
            StateSpec::Consistent(ls) => Some(ls),
            StateSpec::Illegal => None,
        }
    }

    /// True when every atom of `sigma` is fixed.
    pub fn is_complete(&self, sigma: &[Atom]) -> bool {
        match self {
            StateSpec::Illegal => false,
            StateSpec::Consistent(ls) => ls.len() == sigma.len(),
        }
    }
}

// ---------------------------------------------------------------------------
// Formulae
// ---------------------------------------------------------------------------

/// Propositional formula over literal leaves.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Leaf(Literal),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Self {
        Formula::Leaf(Literal::Pos(a))
    }

    pub fn lit(l: Literal) -> Self {
        Formula::Leaf(l)
    }

    pub fn top() -> Self {
        Formula::Leaf(Literal::Top)
    }

    pub fn bottom() -> Self {
        Formula::Leaf(Literal::Bottom)
    }

    /// Negation; a literal leaf collapses to the opposite literal so that the
    /// literal formula class is closed under it.
    pub fn not(f: Formula) -> Self {
        match f {
            Formula::Leaf(l) => Formula::Leaf(l.negated()),
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Left fold of a conjunction; the empty conjunction is `true`.
    pub fn and_fold<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::top(),
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Left fold of a disjunction; the empty disjunction is `false`.
    pub fn or_fold<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::bottom(),
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// Negation that keeps literal leaves in the literal class.
    pub fn negated(&self) -> Formula {
        match self {
            Formula::Leaf(l) => Formula::Leaf(l.negated()),
            other => Formula::not(other.clone()),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Leaf(l) => {
                if let Some(a) = l.atom() {
                    out.insert(a.clone());
                }
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Evaluate under a total assignment.
    pub fn eval(&self, value_of: &impl Fn(&Atom) -> bool) -> bool {
        match self {
            Formula::Leaf(Literal::Top) => true,
            Formula::Leaf(Literal::Bottom) => false,
            Formula::Leaf(Literal::Pos(a)) => value_of(a),
            Formula::Leaf(Literal::Neg(a)) => !value_of(a),
            Formula::Not(f) => !f.eval(value_of),
            Formula::And(a, b) => a.eval(value_of) && b.eval(value_of),
            Formula::Or(a, b) => a.eval(value_of) || b.eval(value_of),
        }
    }

    fn is_atom_leaf(&self) -> bool {
        matches!(self, Formula::Leaf(Literal::Pos(_)))
    }

    fn is_literal_leaf(&self) -> bool {
        matches!(self, Formula::Leaf(_))
    }

    fn leaf_class(&self) -> FormulaClass {
        if self.is_atom_leaf() {
            FormulaClass::Atoms
        } else if self.is_literal_leaf() {
            FormulaClass::Literals
        } else {
            FormulaClass::Boolean
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Leaf(l) => write!(f, "{l:?}"),
            Formula::Not(x) => write!(f, "(not {x:?})"),
            Formula::And(a, b) => write!(f, "(and {a:?} {b:?})"),
            Formula::Or(a, b) => write!(f, "(or {a:?} {b:?})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Operators, domain structures, instances, plans
// ---------------------------------------------------------------------------

/// A conditional effect `Γ ⇒ L`. The condition set is conjunctive and the
/// empty set means unconditional. `true` conditions and `true` effects are
/// dropped on construction; `false` is a permitted effect.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConditionalEffect {
    pub conditions: Vec<Formula>,
    pub effects: LiteralSet,
}

impl ConditionalEffect {
    pub fn new(conditions: Vec<Formula>, effects: LiteralSet) -> Result<Self, ModelError> {
        let conditions: Vec<Formula> = conditions
            .into_iter()
            .filter(|f| !matches!(f, Formula::Leaf(Literal::Top)))
            .collect();
        let mut effects = effects;
        effects.remove(&Literal::Top);
        if effects.is_empty() {
            return Err(ModelError::EmptyEffects);
        }
        Ok(ConditionalEffect { conditions, effects })
    }

    pub fn unconditional(effects: LiteralSet) -> Result<Self, ModelError> {
        Self::new(Vec::new(), effects)
    }

    pub fn is_unconditional(&self) -> bool {
        self.conditions.is_empty()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Operator {
    pub name: String,
    pub pre: Vec<Formula>,
    pub post: Vec<ConditionalEffect>,
}

impl Operator {
    pub fn new(name: impl Into<String>, pre: Vec<Formula>, post: Vec<ConditionalEffect>) -> Self {
        Operator { name: name.into(), pre, post }
    }
}

/// `Ξ = ⟨Σ, O⟩`. Atoms are kept sorted (the canonical order); operators keep
/// declaration order, which is the canonical operator index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DomainStructure {
    pub name: String,
    atoms: Vec<Atom>,
    pub operators: Vec<Operator>,
}

impl DomainStructure {
    pub fn new(
        name: impl Into<String>,
        atoms: Vec<Atom>,
        operators: Vec<Operator>,
    ) -> Result<Self, ModelError> {
        let mut atoms = atoms;
        atoms.sort();
        atoms.dedup();
        let dom = DomainStructure { name: name.into(), atoms, operators };
        dom.validate()?;
        Ok(dom)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn has_atom(&self, atom: &Atom) -> bool {
        self.atoms.binary_search(atom).is_ok()
    }

    pub fn operator(&self, name: &str) -> Option<&Operator> {
        self.operators.iter().find(|o| o.name == name)
    }

    pub fn resolve(&self, name: &str) -> Result<&Operator, ModelError> {
        self.operator(name).ok_or_else(|| ModelError::UnknownOperator(name.to_string()))
    }

    fn validate(&self) -> Result<(), ModelError> {
        let mut names = BTreeSet::new();
        for op in &self.operators {
            if !names.insert(op.name.clone()) {
                return Err(ModelError::DuplicateOperator(op.name.clone()));
            }
            for f in &op.pre {
                self.check_atoms(f)?;
            }
            for eff in &op.post {
                for f in &eff.conditions {
                    self.check_atoms(f)?;
                }
                for l in eff.effects.iter() {
                    if let Some(a) = l.atom() {
                        if !self.has_atom(a) {
                            return Err(ModelError::UndeclaredAtom(a.name().to_string()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_atoms(&self, f: &Formula) -> Result<(), ModelError> {
        for a in f.atoms() {
            if !self.has_atom(&a) {
                return Err(ModelError::UndeclaredAtom(a.name().to_string()));
            }
        }
        Ok(())
    }
}

/// `Π = ⟨Ξ, I, G⟩`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    pub domain: DomainStructure,
    pub init: LiteralSet,
    pub goal: LiteralSet,
}

impl Instance {
    pub fn new(
        domain: DomainStructure,
        init: LiteralSet,
        goal: LiteralSet,
    ) -> Result<Self, ModelError> {
        for l in init.iter().chain(goal.iter()) {
            if let Some(a) = l.atom() {
                if !domain.has_atom(a) {
                    return Err(ModelError::UndeclaredAtom(a.name().to_string()));
                }
            }
        }
        if goal.contains(&Literal::Top) || goal.contains(&Literal::Bottom) {
            return Err(ModelError::ConstantInGoal);
        }
        Ok(Instance { domain, init, goal })
    }

    pub fn initial_spec(&self) -> StateSpec {
        StateSpec::from_literals(self.init.clone())
    }
}

/// A plan: a sequence of operator names.
#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct Plan(pub Vec<String>);

impl Plan {
    pub fn empty() -> Self {
        Plan(Vec::new())
    }

    pub fn of<S: Into<String>, I: IntoIterator<Item = S>>(steps: I) -> Self {
        Plan(steps.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

// ---------------------------------------------------------------------------
// The formalism lattice
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FormulaClass {
    Atoms,
    Literals,
    Boolean,
}

/// A point in the formalism lattice: the formula class together with the
/// incomplete-specification and conditional-effect features.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FormalismTag {
    pub class: FormulaClass,
    pub incomplete: bool,
    pub conditional: bool,
}

impl FormalismTag {
    pub const fn new(class: FormulaClass, incomplete: bool, conditional: bool) -> Self {
        FormalismTag { class, incomplete, conditional }
    }

    pub const S: FormalismTag = FormalismTag::new(FormulaClass::Atoms, false, false);
    pub const S_L: FormalismTag = FormalismTag::new(FormulaClass::Literals, false, false);
    pub const S_B: FormalismTag = FormalismTag::new(FormulaClass::Boolean, false, false);
    pub const S_I: FormalismTag = FormalismTag::new(FormulaClass::Atoms, true, false);
    pub const S_C: FormalismTag = FormalismTag::new(FormulaClass::Atoms, false, true);
    pub const S_LI: FormalismTag = FormalismTag::new(FormulaClass::Literals, true, false);
    pub const S_LC: FormalismTag = FormalismTag::new(FormulaClass::Literals, false, true);
    pub const S_BI: FormalismTag = FormalismTag::new(FormulaClass::Boolean, true, false);
    pub const S_BC: FormalismTag = FormalismTag::new(FormulaClass::Boolean, false, true);
    pub const S_IC: FormalismTag = FormalismTag::new(FormulaClass::Atoms, true, true);
    pub const S_LIC: FormalismTag = FormalismTag::new(FormulaClass::Literals, true, true);
    pub const S_BIC: FormalismTag = FormalismTag::new(FormulaClass::Boolean, true, true);

    pub const ALL: [FormalismTag; 12] = [
        Self::S,
        Self::S_L,
        Self::S_B,
        Self::S_I,
        Self::S_C,
        Self::S_LI,
        Self::S_LC,
        Self::S_BI,
        Self::S_BC,
        Self::S_IC,
        Self::S_LIC,
        Self::S_BIC,
    ];

    pub fn parse(name: &str) -> Result<Self, ModelError> {
        Self::ALL
            .iter()
            .copied()
            .find(|t| t.to_string() == name)
            .ok_or_else(|| ModelError::UnknownFormalism(name.to_string()))
    }
}

impl fmt::Display for FormalismTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::from("S");
        let ext = {
            let mut e = String::new();
            match self.class {
                FormulaClass::Atoms => {}
                FormulaClass::Literals => e.push('L'),
                FormulaClass::Boolean => e.push('B'),
            }
            if self.incomplete {
                e.push('I');
            }
            if self.conditional {
                e.push('C');
            }
            e
        };
        if !ext.is_empty() {
            s.push('_');
            s.push_str(&ext);
        }
        write!(f, "{s}")
    }
}

/// Componentwise specialization order on tags.
pub fn specializes(x: FormalismTag, y: FormalismTag) -> bool {
    x.class <= y.class && x.incomplete <= y.incomplete && x.conditional <= y.conditional
}

/// The least tag admitting the instance. Goals must be positive atoms for the
/// atoms class; otherwise literal goals are admitted.
pub fn classify_instance(instance: &Instance) -> Result<FormalismTag, ModelError> {
    for l in instance.init.iter().chain(instance.goal.iter()) {
        if let Some(a) = l.atom() {
            if !instance.domain.has_atom(a) {
                return Err(ModelError::UndeclaredAtom(a.name().to_string()));
            }
        }
    }
    if instance.goal.contains(&Literal::Top) || instance.goal.contains(&Literal::Bottom) {
        return Err(ModelError::ConstantInGoal);
    }

    let mut class = FormulaClass::Atoms;
    let mut conditional = false;
    for op in &instance.domain.operators {
        for f in &op.pre {
            class = class.max(f.leaf_class());
        }
        for eff in &op.post {
            if !eff.conditions.is_empty() {
                conditional = true;
            }
            for f in &eff.conditions {
                class = class.max(f.leaf_class());
            }
        }
    }
    if instance.goal.iter().any(|l| !l.is_positive()) {
        class = class.max(FormulaClass::Literals);
    }
    // Complete means every atom is fixed; consistency is a separate matter.
    let incomplete = instance.init.sigma().len() < instance.domain.atoms().len();
    Ok(FormalismTag::new(class, incomplete, conditional))
}

// ---------------------------------------------------------------------------
// Normalizations assumed by the compilation schemes
// ---------------------------------------------------------------------------

/// Split every effect `Γ ⇒ {l₁..l_k}` into `k` effects `Γ ⇒ {l_j}`.
/// Application outcomes are unchanged on every state specification.
pub fn normalize_singleton_effects(dom: &DomainStructure) -> DomainStructure {
    let operators = dom
        .operators
        .iter()
        .map(|op| {
            let mut post = Vec::new();
            for eff in &op.post {
                for lit in eff.effects.iter() {
                    post.push(ConditionalEffect {
                        conditions: eff.conditions.clone(),
                        effects: LiteralSet::from_iter([lit.clone()]),
                    });
                }
            }
            Operator::new(op.name.clone(), op.pre.clone(), post)
        })
        .collect();
    DomainStructure { name: dom.name.clone(), atoms: dom.atoms.clone(), operators }
}

/// Merge, within each operator, all rules sharing an effect literal into one
/// rule `(⋀Γ₁ ∨ ⋀Γ₂ ∨ …) ⇒ l`. Effects are singleton-split first. The merge
/// keeps legal outcomes intact but can legalize applications that were
/// illegal because a shared effect literal was only potentially active.
pub fn normalize_unique_effect_literals(dom: &DomainStructure) -> DomainStructure {
    let dom = normalize_singleton_effects(dom);
    let operators = dom
        .operators
        .iter()
        .map(|op| {
            let mut order: Vec<Literal> = Vec::new();
            let mut groups: Vec<(Literal, Vec<Vec<Formula>>)> = Vec::new();
            for eff in &op.post {
                let lit = eff.effects.iter().next().expect("singleton effect").clone();
                match groups.iter_mut().find(|(l, _)| *l == lit) {
                    Some((_, conds)) => conds.push(eff.conditions.clone()),
                    None => {
                        order.push(lit.clone());
                        groups.push((lit, vec![eff.conditions.clone()]));
                    }
                }
            }
            let post = order
                .into_iter()
                .map(|lit| {
                    let conds = &groups.iter().find(|(l, _)| *l == lit).unwrap().1;
                    let conditions = if conds.len() == 1 {
                        conds[0].clone()
                    } else {
                        vec![Formula::or_fold(
                            conds.iter().map(|c| Formula::and_fold(c.iter().cloned())),
                        )]
                    };
                    ConditionalEffect { conditions, effects: LiteralSet::from_iter([lit]) }
                })
                .collect();
            Operator::new(op.name.clone(), op.pre.clone(), post)
        })
        .collect();
    DomainStructure { name: dom.name.clone(), atoms: dom.atoms.clone(), operators }
}

/// True when every operator has pairwise-distinct singleton effect literals.
pub fn has_unique_effect_literals(dom: &DomainStructure) -> bool {
    dom.operators.iter().all(|op| {
        let mut seen = Vec::new();
        op.post.iter().all(|eff| {
            if eff.effects.len() != 1 {
                return false;
            }
            let lit = eff.effects.iter().next().unwrap();
            if seen.contains(&lit) {
                false
            } else {
                seen.push(lit);
                true
            }
        })
    })
}

/// Replace each precondition set by its conjunction; the empty set becomes
/// the formula `true`. Entailment is unchanged.
pub fn normalize_single_precondition(dom: &DomainStructure) -> DomainStructure {
    let operators = dom
        .operators
        .iter()
        .map(|op| {
            let pre = if op.pre.len() == 1 {
                op.pre.clone()
            } else {
                vec![Formula::and_fold(op.pre.iter().cloned())]
            };
            Operator::new(op.name.clone(), pre, op.post.clone())
        })
        .collect();
    DomainStructure { name: dom.name.clone(), atoms: dom.atoms.clone(), operators }
}

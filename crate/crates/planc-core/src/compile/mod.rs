//! Compilation schemes as first-class values: instance compilation, plan
//! translation, scheme composition, and routing between formalisms.

pub mod naming;

mod l7;
mod l8;
mod t20;
mod t22;
mod t23;
mod t6;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{
    classify_instance, specializes, Atom, DomainStructure, FormalismTag, Instance, LiteralSet,
    ModelError, Plan,
};
use crate::semantics::is_solution;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("instance is {found}, which does not specialize the scheme source {required}")]
    SourceMismatch { found: FormalismTag, required: FormalismTag },
    #[error("initial specification must be consistent for compilation")]
    InconsistentInit,
    #[error("goal specification must be consistent for compilation")]
    InconsistentGoal,
    #[error("operator `{0}` has duplicate effect literals; merge rules sharing an effect literal first")]
    NonUniqueEffectLiterals(String),
    #[error("constant `{0}` in a precondition is not supported by this scheme")]
    UnsupportedConstant(String),
    #[error("operator `{0}` has conditional effects, which this scheme does not accept")]
    ConditionalEffects(String),
    #[error("operator `{0}` has a non-literal formula, which this scheme does not accept")]
    NonLiteralFormula(String),
    #[error("user atom `{0}` collides with a generated name")]
    AtomCollision(String),
    #[error("cannot compose: target {left} does not specialize source {right}")]
    IncompatibleComposition { left: FormalismTag, right: FormalismTag },
    #[error("plan is not a solution of the source instance")]
    NotASolution,
    #[error("naming: {0}")]
    Naming(String),
}

/// Identifiers for the basic schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasicId {
    Identity,
    T6,
    L7,
    L8,
    T20,
    T22B,
    T22L,
    T23,
}

impl BasicId {
    pub const ALL: [BasicId; 8] = [
        BasicId::Identity,
        BasicId::T6,
        BasicId::L7,
        BasicId::L8,
        BasicId::T20,
        BasicId::T22B,
        BasicId::T22L,
        BasicId::T23,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasicId::Identity => "identity",
            BasicId::T6 => "t6",
            BasicId::L7 => "l7",
            BasicId::L8 => "l8",
            BasicId::T20 => "t20",
            BasicId::T22B => "t22b",
            BasicId::T22L => "t22l",
            BasicId::T23 => "t23",
        }
    }

    pub fn parse(name: &str) -> Option<BasicId> {
        Self::ALL.iter().copied().find(|b| b.name() == name)
    }

    pub fn source(self) -> FormalismTag {
        match self {
            BasicId::Identity => FormalismTag::S_BIC,
            BasicId::T6 => FormalismTag::S_LI,
            BasicId::L7 => FormalismTag::S_LIC,
            BasicId::L8 => FormalismTag::S_LC,
            BasicId::T20 => FormalismTag::S_BIC,
            BasicId::T22B => FormalismTag::S_BC,
            BasicId::T22L => FormalismTag::S_LC,
            BasicId::T23 => FormalismTag::S_B,
        }
    }

    pub fn target(self) -> FormalismTag {
        match self {
            BasicId::Identity => FormalismTag::S_BIC,
            BasicId::T6 => FormalismTag::S,
            BasicId::L7 => FormalismTag::S_LC,
            BasicId::L8 => FormalismTag::S_C,
            BasicId::T20 => FormalismTag::S_BI,
            BasicId::T22B => FormalismTag::S_B,
            BasicId::T22L => FormalismTag::S_L,
            BasicId::T23 => FormalismTag::S_L,
        }
    }

    fn preservation(self) -> Preservation {
        match self {
            BasicId::Identity | BasicId::T6 => Preservation::Exact(0),
            BasicId::L7 | BasicId::L8 => Preservation::Exact(1),
            BasicId::T20 | BasicId::T22B | BasicId::T22L => {
                Preservation::Polynomial("len*(3+2m)".to_string())
            }
            BasicId::T23 => Preservation::Polynomial("len*(m+1)".to_string()),
        }
    }

    fn fxi(self, dom: &DomainStructure) -> Result<DomainStructure, CompileError> {
        match self {
            BasicId::Identity => Ok(dom.clone()),
            BasicId::T6 => t6::fxi(dom),
            BasicId::L7 => l7::fxi(dom),
            BasicId::L8 => l8::fxi(dom),
            BasicId::T20 => t20::fxi(dom),
            BasicId::T22B => t22::fxi(dom, t22::Variant::Boolean),
            BasicId::T22L => t22::fxi(dom, t22::Variant::Literal),
            BasicId::T23 => t23::fxi(dom),
        }
    }

    fn f_init(self, dom: &DomainStructure) -> LiteralSet {
        match self {
            BasicId::Identity => LiteralSet::new(),
            BasicId::T6 => LiteralSet::new(),
            BasicId::L7 => l7::f_init(dom),
            BasicId::L8 => l8::f_init(dom),
            BasicId::T20 => t20::f_init(dom),
            BasicId::T22B | BasicId::T22L => t20::f_init(dom),
            BasicId::T23 => t23::f_init(dom),
        }
    }

    fn f_goal(self, dom: &DomainStructure) -> LiteralSet {
        match self {
            BasicId::Identity => LiteralSet::new(),
            BasicId::T6 => LiteralSet::new(),
            BasicId::L7 => l7::f_goal(dom),
            BasicId::L8 => l8::f_goal(dom),
            BasicId::T20 => t20::f_goal(dom),
            BasicId::T22B | BasicId::T22L => t20::f_goal(dom),
            BasicId::T23 => t23::f_goal(dom),
        }
    }

    fn t_init(self, sigma: &[Atom], lits: &LiteralSet) -> LiteralSet {
        match self {
            BasicId::Identity => lits.clone(),
            BasicId::T6 => t6::t_init(sigma, lits),
            BasicId::L7 => l7::t_init(sigma, lits),
            BasicId::L8 => l8::t_init(sigma, lits),
            BasicId::T20 | BasicId::T22B | BasicId::T22L | BasicId::T23 => lits.clone(),
        }
    }

    fn t_goal(self, sigma: &[Atom], lits: &LiteralSet) -> LiteralSet {
        match self {
            BasicId::Identity => lits.clone(),
            BasicId::T6 => t6::t_goal(sigma, lits),
            BasicId::L7 => l7::t_goal(sigma, lits),
            BasicId::L8 => l8::t_goal(sigma, lits),
            BasicId::T20 | BasicId::T22B | BasicId::T22L | BasicId::T23 => lits.clone(),
        }
    }

    /// The atoms the state-translation output ranges over, given source atoms.
    fn atom_expansion(self, sigma: &[Atom]) -> Vec<Atom> {
        match self {
            BasicId::Identity | BasicId::T20 | BasicId::T22B | BasicId::T22L | BasicId::T23 => {
                sigma.to_vec()
            }
            BasicId::T6 | BasicId::L8 => t6::expanded_atoms(sigma),
            BasicId::L7 => l7::expanded_atoms(sigma),
        }
    }

    fn translate(self, instance: &Instance, plan: &Plan) -> Result<Plan, CompileError> {
        match self {
            BasicId::Identity => Ok(plan.clone()),
            BasicId::T6 => t6::translate(instance, plan),
            BasicId::L7 => l7::translate(instance, plan),
            BasicId::L8 => l8::translate(instance, plan),
            BasicId::T20 => t20::translate(instance, plan),
            BasicId::T22B => t22::translate(instance, plan, t22::Variant::Boolean),
            BasicId::T22L => t22::translate(instance, plan, t22::Variant::Literal),
            BasicId::T23 => t23::translate(instance, plan),
        }
    }

    /// The declared bound on the translated plan length for a source plan of
    /// length `n` over the given source domain.
    fn growth(self, dom: &DomainStructure, n: usize) -> usize {
        match self {
            BasicId::Identity | BasicId::T6 => n,
            BasicId::L7 | BasicId::L8 => n + 1,
            BasicId::T20 | BasicId::T22B | BasicId::T22L => {
                let m = t20::max_rule_count(dom);
                n * (3 + 2 * m)
            }
            BasicId::T23 => {
                let m = t23::max_subformula_count(dom);
                n * (m + 1)
            }
        }
    }
}

/// Plan-size preservation classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preservation {
    Exact(usize),
    Linear { c: usize, k: usize },
    Polynomial(String),
}

impl Preservation {
    fn compose(&self, then: &Preservation) -> Preservation {
        use Preservation::*;
        match (self, then) {
            (Exact(a), Exact(b)) => Exact(a + b),
            (Exact(k), Linear { c, k: k2 }) => Linear { c: *c, k: c * k + k2 },
            (Linear { c, k }, Exact(k2)) => Linear { c: *c, k: k + k2 },
            (Linear { c: c1, k: k1 }, Linear { c: c2, k: k2 }) => {
                Linear { c: c1 * c2, k: c2 * k1 + k2 }
            }
            (Polynomial(a), Polynomial(b)) => Polynomial(format!("{a} then {b}")),
            (Polynomial(a), _) => Polynomial(format!("{a} then linear")),
            (_, Polynomial(b)) => Polynomial(format!("linear then {b}")),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Preservation::Exact(_))
    }

    pub fn is_linear_or_better(&self) -> bool {
        !matches!(self, Preservation::Polynomial(_))
    }
}

/// A compilation scheme: a chain of one or more basic schemes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompilationScheme {
    parts: Vec<BasicId>,
    pub source: FormalismTag,
    pub target: FormalismTag,
    pub preservation: Preservation,
}

pub fn scheme_identity() -> CompilationScheme {
    CompilationScheme::basic(BasicId::Identity)
}

pub fn scheme_t6() -> CompilationScheme {
    CompilationScheme::basic(BasicId::T6)
}

pub fn scheme_l7() -> CompilationScheme {
    CompilationScheme::basic(BasicId::L7)
}

pub fn scheme_l8() -> CompilationScheme {
    CompilationScheme::basic(BasicId::L8)
}

pub fn scheme_t20() -> CompilationScheme {
    CompilationScheme::basic(BasicId::T20)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum T22Variant {
    Boolean,
    Literal,
}

pub fn scheme_t22(variant: T22Variant) -> CompilationScheme {
    CompilationScheme::basic(match variant {
        T22Variant::Boolean => BasicId::T22B,
        T22Variant::Literal => BasicId::T22L,
    })
}

pub fn scheme_t23() -> CompilationScheme {
    CompilationScheme::basic(BasicId::T23)
}

pub fn scheme_by_id(id: BasicId) -> CompilationScheme {
    CompilationScheme::basic(id)
}

impl CompilationScheme {
    fn basic(id: BasicId) -> Self {
        CompilationScheme {
            parts: vec![id],
            source: id.source(),
            target: id.target(),
            preservation: id.preservation(),
        }
    }

    pub fn parts(&self) -> &[BasicId] {
        &self.parts
    }

    pub fn id(&self) -> &'static str {
        match self.parts.as_slice() {
            [single] => single.name(),
            _ => "composed",
        }
    }

    /// Domain-structure component of the induced instance transformation.
    pub fn fxi(&self, dom: &DomainStructure) -> Result<DomainStructure, CompileError> {
        let mut cur = dom.clone();
        for part in &self.parts {
            cur = part.fxi(&cur)?;
        }
        Ok(cur)
    }

    /// State-translation of initial specifications, composed across parts.
    pub fn t_init(&self, sigma: &[Atom], lits: &LiteralSet) -> LiteralSet {
        let mut atoms = sigma.to_vec();
        let mut cur = lits.clone();
        for part in &self.parts {
            cur = part.t_init(&atoms, &cur);
            atoms = part.atom_expansion(&atoms);
        }
        cur
    }

    /// State-translation of goal specifications, composed across parts.
    pub fn t_goal(&self, sigma: &[Atom], lits: &LiteralSet) -> LiteralSet {
        let mut atoms = sigma.to_vec();
        let mut cur = lits.clone();
        for part in &self.parts {
            cur = part.t_goal(&atoms, &cur);
            atoms = part.atom_expansion(&atoms);
        }
        cur
    }

    pub fn compile(&self, instance: &Instance) -> Result<Instance, CompileError> {
        compile_instance(self, instance)
    }
}

/// `F(Π) = ⟨f_ξ(Ξ), f_i(Ξ) ∪ t_i(Σ, I), f_g(Ξ) ∪ t_g(Σ, G)⟩`, folded over the
/// chain. The instance must classify within the scheme source; the output
/// classifies within the scheme target.
pub fn compile_instance(
    scheme: &CompilationScheme,
    instance: &Instance,
) -> Result<Instance, CompileError> {
    let found = classify_instance(instance)?;
    if !specializes(found, scheme.source) {
        return Err(CompileError::SourceMismatch { found, required: scheme.source });
    }
    if !instance.init.is_consistent() {
        return Err(CompileError::InconsistentInit);
    }
    if !instance.goal.is_consistent() {
        return Err(CompileError::InconsistentGoal);
    }
    let mut cur = instance.clone();
    for part in &scheme.parts {
        let dom = part.fxi(&cur.domain)?;
        let init = part.f_init(&cur.domain).union(&part.t_init(cur.domain.atoms(), &cur.init));
        let goal = part.f_goal(&cur.domain).union(&part.t_goal(cur.domain.atoms(), &cur.goal));
        cur = Instance::new(dom, init, goal)?;
    }
    debug_assert!(
        specializes(classify_instance(&cur)?, scheme.target),
        "compiled instance must classify within the scheme target"
    );
    Ok(cur)
}

/// Translate a solution of the source instance into a solution of the
/// compiled instance, stage by stage.
pub fn translate_plan(
    scheme: &CompilationScheme,
    instance: &Instance,
    plan: &Plan,
) -> Result<Plan, CompileError> {
    if !is_solution(instance, plan)? {
        return Err(CompileError::NotASolution);
    }
    let mut cur_inst = instance.clone();
    let mut cur_plan = plan.clone();
    for part in &scheme.parts {
        cur_plan = part.translate(&cur_inst, &cur_plan)?;
        let single = CompilationScheme::basic(*part);
        cur_inst = compile_instance(&single, &cur_inst)?;
    }
    Ok(cur_plan)
}

/// The declared bound on translated plan length for a source plan of length
/// `n`, folded across the chain.
pub fn plan_growth_bound(
    scheme: &CompilationScheme,
    dom: &DomainStructure,
    n: usize,
) -> Result<usize, CompileError> {
    let mut cur_dom = dom.clone();
    let mut cur_n = n;
    for part in &scheme.parts {
        cur_n = part.growth(&cur_dom, cur_n);
        cur_dom = part.fxi(&cur_dom)?;
    }
    Ok(cur_n)
}

/// Componentwise composition: apply `first`, then `then`. Requires the first
/// target to specialize the second source (lifting via the identity scheme).
pub fn compose(
    first: &CompilationScheme,
    then: &CompilationScheme,
) -> Result<CompilationScheme, CompileError> {
    if !specializes(first.target, then.source) {
        return Err(CompileError::IncompatibleComposition {
            left: first.target,
            right: then.source,
        });
    }
    let mut parts = first.parts.clone();
    parts.extend(then.parts.iter().copied());
    Ok(CompilationScheme {
        parts,
        source: first.source,
        target: then.target,
        preservation: first.preservation.compose(&then.preservation),
    })
}

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreserveClass {
    Exact,
    Linear,
    Poly,
}

impl PreserveClass {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(PreserveClass::Exact),
            "linear" => Some(PreserveClass::Linear),
            "poly" => Some(PreserveClass::Poly),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RouteAnswer {
    Chain(Vec<BasicId>),
    Impossible(String),
    Unknown,
}

impl RouteAnswer {
    pub fn chain(&self) -> Option<&[BasicId]> {
        match self {
            RouteAnswer::Chain(c) => Some(c),
            _ => None,
        }
    }
}

/// Build the scheme value for a routed chain.
pub fn scheme_for_chain(chain: &[BasicId]) -> Result<CompilationScheme, CompileError> {
    let mut parts = chain.iter();
    let first = parts.next().expect("chains are nonempty");
    let mut scheme = CompilationScheme::basic(*first);
    for part in parts {
        scheme = compose(&scheme, &CompilationScheme::basic(*part))?;
    }
    Ok(scheme)
}

/// The separation families: the two exact-compilation equivalence classes and
/// the four boolean singletons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Li,
    Lic,
    B,
    Bc,
    Bi,
    Bic,
}

fn family(tag: FormalismTag) -> Family {
    use crate::model::FormulaClass::*;
    match (tag.class, tag.incomplete, tag.conditional) {
        (Boolean, false, false) => Family::B,
        (Boolean, false, true) => Family::Bc,
        (Boolean, true, false) => Family::Bi,
        (Boolean, true, true) => Family::Bic,
        (_, _, false) => Family::Li,
        (_, _, true) => Family::Lic,
    }
}

const CAVEAT: &str = "unless Σ₃ᵖ = Π₃ᵖ";

fn impossibility_citation(src: Family, dst: Family, class: PreserveClass) -> Option<String> {
    use Family::*;
    let linearish = |cite: &str| Some(cite.to_string());
    let conditional = |cite: &str| Some(format!("{cite}, {CAVEAT}"));
    match class {
        PreserveClass::Exact | PreserveClass::Linear => match (src, dst) {
            (Bic, Lic) | (Bic, Bc) | (Bic, B) | (Bic, Li) => conditional("Cor. 15"),
            (Bic, Bi) => linearish("Cor. 12"),
            (Lic, Bi) => linearish("Thm. 11"),
            (Lic, B) | (Lic, Li) => linearish("Cor. 12"),
            (Bc, Lic) | (Bc, Li) => linearish("Cor. 19"),
            (Bc, Bi) | (Bc, B) => linearish("Cor. 12"),
            (Bi, Bc) => conditional("Thm. 14"),
            (Bi, Lic) | (Bi, B) | (Bi, Li) => conditional("Cor. 15"),
            (B, Lic) => linearish("Thm. 18"),
            (B, Li) => linearish("Cor. 19"),
            _ => None,
        },
        PreserveClass::Poly => match (src, dst) {
            (Bic, Lic) | (Bic, Bc) | (Bic, B) | (Bic, Li) => conditional("Cor. 15"),
            (Bi, Bc) => conditional("Thm. 14"),
            (Bi, Lic) | (Bi, B) | (Bi, Li) => conditional("Cor. 15"),
            _ => None,
        },
    }
}

fn usable_schemes(class: PreserveClass) -> &'static [BasicId] {
    match class {
        PreserveClass::Exact | PreserveClass::Linear => {
            &[BasicId::T6, BasicId::L7, BasicId::L8]
        }
        PreserveClass::Poly => &[
            BasicId::T6,
            BasicId::L7,
            BasicId::L8,
            BasicId::T20,
            BasicId::T22B,
            BasicId::T22L,
            BasicId::T23,
        ],
    }
}

/// Decide whether `source` compiles to `target` within the requested
/// preservation class. Positive answers carry an executable chain found by
/// breadth-first search over the scheme graph (shortest, first in scheme
/// order); negative answers cite the separating result.
pub fn route(source: FormalismTag, target: FormalismTag, class: PreserveClass) -> RouteAnswer {
    if specializes(source, target) {
        return RouteAnswer::Chain(vec![BasicId::Identity]);
    }
    let schemes = usable_schemes(class);
    let mut visited: BTreeSet<String> = BTreeSet::new();
    visited.insert(source.to_string());
    let mut queue: Vec<(FormalismTag, Vec<BasicId>)> = vec![(source, Vec::new())];
    let mut head = 0;
    while head < queue.len() {
        let (tag, chain) = queue[head].clone();
        head += 1;
        for &s in schemes {
            if !specializes(tag, s.source()) {
                continue;
            }
            let next = s.target();
            if !visited.insert(next.to_string()) {
                continue;
            }
            let mut next_chain = chain.clone();
            next_chain.push(s);
            if specializes(next, target) {
                return RouteAnswer::Chain(next_chain);
            }
            queue.push((next, next_chain));
        }
    }
    match impossibility_citation(family(source), family(target), class) {
        Some(cite) => RouteAnswer::Impossible(cite),
        None => RouteAnswer::Unknown,
    }
}

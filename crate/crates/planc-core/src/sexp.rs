//! Parenthesized-expression formats for domains, instances, and plans, plus
//! the clause-list format for 3CNF input. Printing is canonical: atoms
//! sorted, operators in declaration order, literal sets in canonical order.
//! `parse(print(x)) = x` structurally for every well-formed value.

use std::fmt::Write as _;

use thiserror::Error;

use crate::gadgets::{Cnf3, Clause3};
use crate::model::{
    Atom, ConditionalEffect, DomainStructure, Formula, Instance, Literal, LiteralSet, ModelError,
    Operator, Plan,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("instance refers to unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("expected a single {0} form")]
    WrongForm(&'static str),
    #[error("malformed clause: {0}")]
    MalformedClause(String),
}

// ---------------------------------------------------------------------------
// Tokens and raw s-expressions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sexp {
    Sym { text: String, line: usize, col: usize },
    List { items: Vec<Sexp>, line: usize, col: usize },
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Sym { line, col, .. } | Sexp::List { line, col, .. } => (*line, *col),
        }
    }
}

fn err(pos: (usize, usize), msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line: pos.0, col: pos.1, msg: msg.into() }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    LParen(usize, usize),
    RParen(usize, usize),
    Sym(String, usize, usize),
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.src[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn tokens(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c == '(' {
                out.push(Token::LParen(self.line, self.col));
                self.bump();
            } else if c == ')' {
                out.push(Token::RParen(self.line, self.col));
                self.bump();
            } else {
                let (line, col) = (self.line, self.col);
                let mut text = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                out.push(Token::Sym(text, line, col));
            }
        }
        Ok(out)
    }
}

fn parse_sexps(src: &str) -> Result<Vec<Sexp>, ParseError> {
    let tokens = Lexer::new(src).tokens()?;
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = Vec::new();
    let mut top: Vec<Sexp> = Vec::new();
    for tok in tokens {
        match tok {
            Token::LParen(l, c) => stack.push((std::mem::take(&mut top), l, c)),
            Token::RParen(l, c) => {
                let (prev, ll, lc) = stack
                    .pop()
                    .ok_or_else(|| err((l, c), "unbalanced `)`"))?;
                let list = Sexp::List { items: std::mem::replace(&mut top, prev), line: ll, col: lc };
                top.push(list);
            }
            Token::Sym(text, l, c) => top.push(Sexp::Sym { text, line: l, col: c }),
        }
    }
    if let Some((_, l, c)) = stack.pop() {
        return Err(err((l, c), "unclosed `(`"));
    }
    Ok(top)
}

// ---------------------------------------------------------------------------
// Forms
// ---------------------------------------------------------------------------

/// An instance form as written in a file: the domain is referenced by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSrc {
    pub domain_name: String,
    pub init: LiteralSet,
    pub goal: LiteralSet,
}

impl InstanceSrc {
    pub fn resolve(&self, dom: &DomainStructure) -> Result<Instance, ParseError> {
        if dom.name != self.domain_name {
            return Err(ParseError::UnknownDomain(self.domain_name.clone()));
        }
        Ok(Instance::new(dom.clone(), self.init.clone(), self.goal.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Form {
    Domain(DomainStructure),
    Instance(InstanceSrc),
    Plan(Plan),
}

/// Parse every top-level form in a document.
pub fn parse_document(src: &str) -> Result<Vec<Form>, ParseError> {
    let sexps = parse_sexps(src)?;
    let mut out = Vec::new();
    for sexp in sexps {
        let head = head_of(&sexp)?;
        match head {
            "domain" => {
                out.push(Form::Domain(domain_from_sexp(&sexp)?));
            }
            "instance" => {
                out.push(Form::Instance(instance_src_from_sexp(&sexp)?));
            }
            "plan" => out.push(Form::Plan(plan_from_sexp(&sexp)?)),
            other => {
                return Err(err(sexp.pos(), format!("unknown form `{other}`")));
            }
        }
    }
    Ok(out)
}

pub fn parse_domain(src: &str) -> Result<DomainStructure, ParseError> {
    let forms = parse_document(src)?;
    let mut doms = forms.into_iter().filter_map(|f| match f {
        Form::Domain(d) => Some(d),
        _ => None,
    });
    match (doms.next(), doms.next()) {
        (Some(d), None) => Ok(d),
        _ => Err(ParseError::WrongForm("domain")),
    }
}

/// Parse a document containing an instance form and resolve it against the
/// given domain (or against a domain form in the same document).
pub fn parse_instance(src: &str, dom: Option<&DomainStructure>) -> Result<Instance, ParseError> {
    let forms = parse_document(src)?;
    let local_dom = forms.iter().find_map(|f| match f {
        Form::Domain(d) => Some(d.clone()),
        _ => None,
    });
    let inst = forms
        .into_iter()
        .find_map(|f| match f {
            Form::Instance(i) => Some(i),
            _ => None,
        })
        .ok_or(ParseError::WrongForm("instance"))?;
    let candidates = [local_dom.as_ref(), dom];
    for d in candidates.into_iter().flatten() {
        if d.name == inst.domain_name {
            return inst.resolve(d);
        }
    }
    Err(ParseError::UnknownDomain(inst.domain_name))
}

pub fn parse_plan(src: &str) -> Result<Plan, ParseError> {
    let forms = parse_document(src)?;
    let mut plans = forms.into_iter().filter_map(|f| match f {
        Form::Plan(p) => Some(p),
        _ => None,
    });
    match (plans.next(), plans.next()) {
        (Some(p), None) => Ok(p),
        _ => Err(ParseError::WrongForm("plan")),
    }
}

fn head_of(sexp: &Sexp) -> Result<&str, ParseError> {
    match sexp {
        Sexp::List { items, .. } => match items.first() {
            Some(Sexp::Sym { text, .. }) => Ok(text),
            _ => Err(err(sexp.pos(), "expected a form starting with a symbol")),
        },
        Sexp::Sym { .. } => Err(err(sexp.pos(), "expected a parenthesized form")),
    }
}

fn sym<'s>(sexp: &'s Sexp, what: &str) -> Result<(&'s str, (usize, usize)), ParseError> {
    match sexp {
        Sexp::Sym { text, line, col } => Ok((text, (*line, *col))),
        Sexp::List { .. } => Err(err(sexp.pos(), format!("expected {what}"))),
    }
}

fn atom_from(sexp: &Sexp) -> Result<Atom, ParseError> {
    let (text, pos) = sym(sexp, "an atom")?;
    Atom::new(text).map_err(|e| err(pos, e.to_string()))
}

fn formula_from(sexp: &Sexp) -> Result<Formula, ParseError> {
    match sexp {
        Sexp::Sym { text, .. } => match text.as_str() {
            "true" => Ok(Formula::top()),
            "false" => Ok(Formula::bottom()),
            _ => Ok(Formula::atom(atom_from(sexp)?)),
        },
        Sexp::List { items, .. } => {
            let head = head_of(sexp)?;
            let args = &items[1..];
            match head {
                "not" => {
                    if args.len() != 1 {
                        return Err(err(sexp.pos(), "`not` takes one argument"));
                    }
                    Ok(Formula::not(formula_from(&args[0])?))
                }
                "and" | "or" => {
                    if args.is_empty() {
                        return Err(err(sexp.pos(), format!("`{head}` needs arguments")));
                    }
                    let parts: Result<Vec<_>, _> = args.iter().map(formula_from).collect();
                    let parts = parts?;
                    Ok(if head == "and" {
                        Formula::and_fold(parts)
                    } else {
                        Formula::or_fold(parts)
                    })
                }
                other => Err(err(sexp.pos(), format!("unknown connective `{other}`"))),
            }
        }
    }
}

fn literal_from(sexp: &Sexp) -> Result<Literal, ParseError> {
    match sexp {
        Sexp::Sym { text, .. } if text == "false" => Ok(Literal::Bottom),
        Sexp::Sym { .. } => Ok(Literal::Pos(atom_from(sexp)?)),
        Sexp::List { items, .. } => {
            if items.len() == 2 {
                if let Sexp::Sym { text, .. } = &items[0] {
                    if text == "not" {
                        return Ok(Literal::Neg(atom_from(&items[1])?));
                    }
                }
            }
            Err(err(sexp.pos(), "expected a literal: ATOM, (not ATOM) or false"))
        }
    }
}

fn expect_labeled_list<'s>(
    sexp: &'s Sexp,
    label: &str,
) -> Result<&'s [Sexp], ParseError> {
    match sexp {
        Sexp::List { items, .. } => match items.first() {
            Some(Sexp::Sym { text, .. }) if text == label => Ok(&items[1..]),
            _ => Err(err(sexp.pos(), format!("expected `({label} …)`"))),
        },
        _ => Err(err(sexp.pos(), format!("expected `({label} …)`"))),
    }
}

fn domain_from_sexp(sexp: &Sexp) -> Result<DomainStructure, ParseError> {
    let items = match sexp {
        Sexp::List { items, .. } => items,
        _ => unreachable!(),
    };
    if items.len() < 3 {
        return Err(err(sexp.pos(), "domain needs a name and an atoms list"));
    }
    let (name, _) = sym(&items[1], "a domain name")?;
    let atom_sexps = expect_labeled_list(&items[2], "atoms")?;
    let atoms: Result<Vec<_>, _> = atom_sexps.iter().map(atom_from).collect();
    let mut operators = Vec::new();
    for op_sexp in &items[3..] {
        let parts = expect_labeled_list(op_sexp, "operator")?;
        if parts.len() != 3 {
            return Err(err(op_sexp.pos(), "operator needs a name, (pre …) and (post …)"));
        }
        let (op_name, op_pos) = sym(&parts[0], "an operator name")?;
        if Atom::new(op_name).is_err() {
            return Err(err(op_pos, format!("invalid operator name `{op_name}`")));
        }
        let pre_sexps = expect_labeled_list(&parts[1], "pre")?;
        let pre: Result<Vec<_>, _> = pre_sexps.iter().map(formula_from).collect();
        let post_sexps = expect_labeled_list(&parts[2], "post")?;
        let mut post = Vec::new();
        for eff_sexp in post_sexps {
            let eff_parts = expect_labeled_list(eff_sexp, "when")?;
            if eff_parts.len() != 2 {
                return Err(err(eff_sexp.pos(), "`when` takes a condition list and an effect list"));
            }
            let conds = match &eff_parts[0] {
                Sexp::List { items, .. } => {
                    let cs: Result<Vec<_>, _> = items.iter().map(formula_from).collect();
                    cs?
                }
                _ => return Err(err(eff_parts[0].pos(), "expected a condition list")),
            };
            let effs = match &eff_parts[1] {
                Sexp::List { items, .. } => {
                    let ls: Result<Vec<_>, _> = items.iter().map(literal_from).collect();
                    LiteralSet::from_iter(ls?)
                }
                _ => return Err(err(eff_parts[1].pos(), "expected an effect list")),
            };
            post.push(
                ConditionalEffect::new(conds, effs)
                    .map_err(|e| err(eff_sexp.pos(), e.to_string()))?,
            );
        }
        operators.push(Operator::new(op_name, pre?, post));
    }
    Ok(DomainStructure::new(name, atoms?, operators)?)
}

fn instance_src_from_sexp(sexp: &Sexp) -> Result<InstanceSrc, ParseError> {
    let items = match sexp {
        Sexp::List { items, .. } => items,
        _ => unreachable!(),
    };
    if items.len() != 4 {
        return Err(err(sexp.pos(), "instance needs (domain NAME), (init …) and (goal …)"));
    }
    let dom_ref = expect_labeled_list(&items[1], "domain")?;
    if dom_ref.len() != 1 {
        return Err(err(items[1].pos(), "expected `(domain NAME)`"));
    }
    let (dom_name, _) = sym(&dom_ref[0], "a domain name")?;
    let init_sexps = expect_labeled_list(&items[2], "init")?;
    let init: Result<Vec<_>, _> = init_sexps.iter().map(literal_from).collect();
    let goal_sexps = expect_labeled_list(&items[3], "goal")?;
    let goal: Result<Vec<_>, _> = goal_sexps.iter().map(literal_from).collect();
    Ok(InstanceSrc {
        domain_name: dom_name.to_string(),
        init: LiteralSet::from_iter(init?),
        goal: LiteralSet::from_iter(goal?),
    })
}

fn plan_from_sexp(sexp: &Sexp) -> Result<Plan, ParseError> {
    let items = match sexp {
        Sexp::List { items, .. } => items,
        _ => unreachable!(),
    };
    let mut steps = Vec::new();
    for item in &items[1..] {
        let (name, _) = sym(item, "an operator name")?;
        steps.push(name.to_string());
    }
    Ok(Plan(steps))
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

pub fn print_literal(lit: &Literal) -> String {
    match lit {
        Literal::Top => "true".to_string(),
        Literal::Bottom => "false".to_string(),
        Literal::Pos(a) => a.name().to_string(),
        Literal::Neg(a) => format!("(not {})", a.name()),
    }
}

pub fn print_formula(f: &Formula) -> String {
    match f {
        Formula::Leaf(l) => print_literal(l),
        Formula::Not(x) => format!("(not {})", print_formula(x)),
        Formula::And(a, b) => format!("(and {} {})", print_formula(a), print_formula(b)),
        Formula::Or(a, b) => format!("(or {} {})", print_formula(a), print_formula(b)),
    }
}

fn print_literal_list(ls: &LiteralSet) -> String {
    ls.iter().map(print_literal).collect::<Vec<_>>().join(" ")
}

pub fn print_domain(dom: &DomainStructure) -> String {
    let mut out = String::new();
    let _ = write!(out, "(domain {}\n  (atoms", dom.name);
    for a in dom.atoms() {
        let _ = write!(out, " {}", a.name());
    }
    let _ = write!(out, ")");
    for op in &dom.operators {
        let _ = write!(out, "\n  (operator {}\n    (pre", op.name);
        for f in &op.pre {
            let _ = write!(out, " {}", print_formula(f));
        }
        let _ = write!(out, ")\n    (post");
        for eff in &op.post {
            let conds =
                eff.conditions.iter().map(print_formula).collect::<Vec<_>>().join(" ");
            let _ = write!(
                out,
                "\n      (when ({}) ({}))",
                conds,
                print_literal_list(&eff.effects)
            );
        }
        let _ = write!(out, "))");
    }
    let _ = write!(out, ")\n");
    out
}

pub fn print_instance(inst: &Instance) -> String {
    format!(
        "(instance (domain {})\n  (init {})\n  (goal {}))\n",
        inst.domain.name,
        print_literal_list(&inst.init),
        print_literal_list(&inst.goal)
    )
}

pub fn print_plan(plan: &Plan) -> String {
    if plan.is_empty() {
        "(plan)\n".to_string()
    } else {
        format!("(plan {})\n", plan.0.join(" "))
    }
}

// ---------------------------------------------------------------------------
// 3CNF clause lists
// ---------------------------------------------------------------------------

/// One clause per line; literals are atom names with an optional leading `-`.
/// Atom names must be `p<index>` with 1-based indices.
pub fn parse_cnf3(src: &str) -> Result<Cnf3, ParseError> {
    let mut clauses = Vec::new();
    let mut max_index = 0usize;
    for line in src.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let mut lits = Vec::new();
        for tok in line.split_whitespace() {
            let (positive, name) = match tok.strip_prefix('-') {
                Some(rest) => (false, rest),
                None => (true, tok),
            };
            let index = name
                .strip_prefix('p')
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&i| i >= 1)
                .ok_or_else(|| ParseError::MalformedClause(format!("bad literal `{tok}`")))?;
            max_index = max_index.max(index);
            lits.push((index, positive));
        }
        if lits.len() != 3 {
            return Err(ParseError::MalformedClause(format!(
                "expected 3 literals, found {}: `{line}`",
                lits.len()
            )));
        }
        let clause = Clause3::new(lits[0], lits[1], lits[2])
            .map_err(ParseError::MalformedClause)?;
        clauses.push(clause);
    }
    Cnf3::new(max_index.max(3), clauses).map_err(ParseError::MalformedClause)
}

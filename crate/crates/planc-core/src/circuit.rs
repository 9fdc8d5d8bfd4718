//! Unbounded fan-in boolean circuits, and the construction that turns a fixed
//! plan over a literal-conditional domain into a circuit deciding, per
//! complete initial state, whether the plan solves the instance. The built
//! circuits stay within depth `7·steps + 2`.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{
    normalize_singleton_effects, DomainStructure, Formula, Instance, Literal, LiteralSet,
    ModelError, Plan,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("input length {found} does not match {expected} inputs")]
    InputLengthMismatch { expected: usize, found: usize },
    #[error("cycle through gate {0}")]
    CycleDetected(usize),
    #[error("gate {0} references a later gate")]
    ForwardReference(usize),
    #[error("domain is not in the literal-conditional class: {0}")]
    NotLiteralConditional(String),
}

pub type GateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
    Not,
    Const0,
    Const1,
    Input(usize),
}

impl GateKind {
    fn label(&self) -> String {
        match self {
            GateKind::And => "and".to_string(),
            GateKind::Or => "or".to_string(),
            GateKind::Not => "not".to_string(),
            GateKind::Const0 => "const0".to_string(),
            GateKind::Const1 => "const1".to_string(),
            GateKind::Input(i) => format!("input:{i}"),
        }
    }
}

/// A gate with unbounded fan-in for `and`/`or`, exactly one input for `not`,
/// and none for constants and inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<GateId>,
}

/// A DAG of gates with a single output. Gates are stored so that inputs
/// precede their users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub gates: Vec<Gate>,
    pub output: GateId,
    pub input_count: usize,
}

impl Circuit {
    pub fn size(&self) -> usize {
        self.gates.len()
    }
}

/// Topological evaluation under an input word.
pub fn eval_circuit(circuit: &Circuit, word: &[bool]) -> Result<bool, CircuitError> {
    if word.len() != circuit.input_count {
        return Err(CircuitError::InputLengthMismatch {
            expected: circuit.input_count,
            found: word.len(),
        });
    }
    let mut values: Vec<bool> = Vec::with_capacity(circuit.gates.len());
    for (id, gate) in circuit.gates.iter().enumerate() {
        for &inp in &gate.inputs {
            if inp >= id {
                return Err(CircuitError::ForwardReference(id));
            }
        }
        let value = match &gate.kind {
            GateKind::Const0 => false,
            GateKind::Const1 => true,
            GateKind::Input(i) => *word
                .get(*i)
                .ok_or(CircuitError::InputLengthMismatch {
                    expected: circuit.input_count,
                    found: word.len(),
                })?,
            GateKind::Not => !values[gate.inputs[0]],
            GateKind::And => gate.inputs.iter().all(|&i| values[i]),
            GateKind::Or => gate.inputs.iter().any(|&i| values[i]),
        };
        values.push(value);
    }
    Ok(values[circuit.output])
}

/// Exact longest-path depth (in edges, source gate to output) and gate count.
pub fn measure(circuit: &Circuit) -> Result<(usize, usize), CircuitError> {
    let mut depth = vec![0usize; circuit.gates.len()];
    for (id, gate) in circuit.gates.iter().enumerate() {
        for &inp in &gate.inputs {
            if inp >= id {
                return Err(CircuitError::CycleDetected(id));
            }
            depth[id] = depth[id].max(depth[inp] + 1);
        }
    }
    Ok((depth[circuit.output], circuit.gates.len()))
}

/// Plain-text gate list: one line per gate, `ID KIND INPUT_IDS…`.
pub fn export_gates(circuit: &Circuit) -> String {
    let mut out = String::new();
    for (id, gate) in circuit.gates.iter().enumerate() {
        out.push_str(&id.to_string());
        out.push(' ');
        out.push_str(&gate.kind.label());
        for inp in &gate.inputs {
            out.push(' ');
            out.push_str(&inp.to_string());
        }
        if id == circuit.output {
            out.push_str(" ; output");
        }
        out.push('\n');
    }
    out
}

/// DOT digraph export for visualization tools.
pub fn export_dot(circuit: &Circuit) -> String {
    let mut out = String::from("digraph circuit {\n");
    for (id, gate) in circuit.gates.iter().enumerate() {
        let shape = if id == circuit.output { "doublecircle" } else { "circle" };
        out.push_str(&format!("  g{id} [label=\"{}\", shape={shape}];\n", gate.kind.label()));
    }
    for (id, gate) in circuit.gates.iter().enumerate() {
        for inp in &gate.inputs {
            out.push_str(&format!("  g{inp} -> g{id};\n"));
        }
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

/// Bottom-up builder. With sharing enabled, structurally identical gates are
/// reused; outputs are unchanged either way.
pub struct Builder {
    gates: Vec<Gate>,
    share: Option<HashMap<(GateKind, Vec<GateId>), GateId>>,
}

impl Builder {
    pub fn new(share: bool) -> Self {
        Builder { gates: Vec::new(), share: share.then(HashMap::new) }
    }

    fn push(&mut self, kind: GateKind, inputs: Vec<GateId>) -> GateId {
        if let Some(map) = &mut self.share {
            let key = (kind.clone(), inputs.clone());
            if let Some(&id) = map.get(&key) {
                return id;
            }
            let id = self.gates.len();
            self.gates.push(Gate { kind, inputs });
            map.insert(key, id);
            id
        } else {
            let id = self.gates.len();
            self.gates.push(Gate { kind, inputs });
            id
        }
    }

    pub fn input(&mut self, i: usize) -> GateId {
        self.push(GateKind::Input(i), Vec::new())
    }

    pub fn constant(&mut self, value: bool) -> GateId {
        self.push(if value { GateKind::Const1 } else { GateKind::Const0 }, Vec::new())
    }

    pub fn not(&mut self, a: GateId) -> GateId {
        self.push(GateKind::Not, vec![a])
    }

    pub fn and(&mut self, mut inputs: Vec<GateId>) -> GateId {
        inputs.dedup();
        if inputs.is_empty() {
            return self.constant(true);
        }
        self.push(GateKind::And, inputs)
    }

    pub fn or(&mut self, mut inputs: Vec<GateId>) -> GateId {
        inputs.dedup();
        if inputs.is_empty() {
            return self.constant(false);
        }
        self.push(GateKind::Or, inputs)
    }

    pub fn finish(self, output: GateId, input_count: usize) -> Circuit {
        Circuit { gates: self.gates, output, input_count }
    }
}

// ---------------------------------------------------------------------------
// Plan circuits
// ---------------------------------------------------------------------------

fn literal_of(f: &Formula, what: &str) -> Result<Literal, CircuitError> {
    match f {
        Formula::Leaf(l) => Ok(l.clone()),
        _ => Err(CircuitError::NotLiteralConditional(what.to_string())),
    }
}

/// Per-level wires: the value of each atom and its negation.
struct Level {
    value: Vec<GateId>,
    negated: Vec<GateId>,
}

impl Level {
    fn literal(&self, dom: &DomainStructure, lit: &Literal, b: &mut Builder) -> GateId {
        match lit {
            Literal::Top => b.constant(true),
            Literal::Bottom => b.constant(false),
            Literal::Pos(a) => {
                let i = dom.atoms().binary_search(a).expect("scoped atom");
                self.value[i]
            }
            Literal::Neg(a) => {
                let i = dom.atoms().binary_search(a).expect("scoped atom");
                self.negated[i]
            }
        }
    }
}

/// Build the circuit deciding whether the plan solves `⟨Ξ, I, G⟩` for the
/// complete initial specification encoded by the input word (bit `i` is the
/// value of the `i`-th atom in canonical order).
pub fn build_plan_circuit(
    dom: &DomainStructure,
    goal: &LiteralSet,
    plan: &Plan,
) -> Result<Circuit, CircuitError> {
    build_plan_circuit_with(dom, goal, plan, true)
}

pub fn build_plan_circuit_with(
    dom: &DomainStructure,
    goal: &LiteralSet,
    plan: &Plan,
    share: bool,
) -> Result<Circuit, CircuitError> {
    let src = normalize_singleton_effects(dom);
    let n = src.atoms().len();
    let mut b = Builder::new(share);

    // Level 0: inputs plus one negation layer.
    let value: Vec<GateId> = (0..n).map(|i| b.input(i)).collect();
    let negated: Vec<GateId> = value.iter().map(|&v| b.not(v)).collect();
    let mut level = Level { value, negated };

    let mut failure_wires: Vec<GateId> = Vec::new();

    for step in plan.steps() {
        let op = src.resolve(step)?;

        // Precondition test.
        let mut pre_lits = Vec::new();
        for f in &op.pre {
            let lit = literal_of(f, &op.name)?;
            pre_lits.push(level.literal(&src, &lit, &mut b));
        }
        let pre_ok = b.and(pre_lits);
        failure_wires.push(b.not(pre_ok));

        // Activation wire per rule.
        let mut activation: Vec<GateId> = Vec::with_capacity(op.post.len());
        for eff in &op.post {
            let mut conds = Vec::new();
            for c in &eff.conditions {
                let lit = literal_of(c, &op.name)?;
                conds.push(level.literal(&src, &lit, &mut b));
            }
            activation.push(b.and(conds));
        }

        // Combine activations per atom; conflicts and `false` effects raise
        // failure wires.
        let mut next_value = Vec::with_capacity(n);
        let mut next_negated = Vec::with_capacity(n);
        for (i, atom) in src.atoms().iter().enumerate() {
            let mut pos_in = Vec::new();
            let mut neg_in = Vec::new();
            for (r, eff) in op.post.iter().enumerate() {
                match eff.effects.iter().next().expect("singleton effect") {
                    Literal::Pos(a) if a == atom => pos_in.push(activation[r]),
                    Literal::Neg(a) if a == atom => neg_in.push(activation[r]),
                    _ => {}
                }
            }
            let pos = b.or(pos_in);
            let neg = b.or(neg_in);
            let conflict = b.and(vec![pos, neg]);
            failure_wires.push(conflict);
            let no_pos = b.not(pos);
            let no_neg = b.not(neg);
            let carried = b.and(vec![level.value[i], no_pos, no_neg]);
            let v = b.or(vec![pos, carried]);
            next_value.push(v);
            next_negated.push(b.not(v));
        }
        for (r, eff) in op.post.iter().enumerate() {
            if matches!(eff.effects.iter().next(), Some(Literal::Bottom)) {
                failure_wires.push(activation[r]);
            }
        }

        level = Level { value: next_value, negated: next_negated };
    }

    // Goal conjunction, gated on no failure along the way.
    let mut goal_wires = Vec::new();
    for lit in goal.iter() {
        goal_wires.push(level.literal(&src, lit, &mut b));
    }
    let goal_ok = b.and(goal_wires);
    let output = if failure_wires.is_empty() {
        goal_ok
    } else {
        let any_failure = b.or(failure_wires);
        let clean = b.not(any_failure);
        b.and(vec![goal_ok, clean])
    };
    Ok(b.finish(output, n))
}

/// The input word encoding a complete initial specification: bit `i` is 1
/// iff the `i`-th atom (canonical order) is true.
pub fn word_of_init(instance: &Instance) -> Vec<bool> {
    instance
        .domain
        .atoms()
        .iter()
        .map(|a| instance.init.contains(&Literal::Pos(a.clone())))
        .collect()
}

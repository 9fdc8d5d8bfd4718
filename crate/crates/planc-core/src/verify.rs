//! Batch verification sweeps: scheme preservation over seeded corpora,
//! circuit/word equivalence sweeps, and gadget cross-checks. The sweeps are
//! data-parallel over independent instances; with the `parallel` feature
//! (default) they run on rayon, and `run_batch_seq` is always available as
//! the sequential fallback.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::circuit::{build_plan_circuit, eval_circuit, measure};
use crate::compile::{
    compile_instance, plan_growth_bound, translate_plan, CompilationScheme, Preservation,
};
use crate::gadgets::{random_instance, GenParams};
use crate::model::{
    classify_instance, specializes, FormalismTag, Instance, Literal, LiteralSet, Plan,
};
use crate::planner::{plan_exists_with, SearchLimits, SearchVerdict};
use crate::semantics::is_solution;

/// Outcome of one verification case.
pub type CaseResult = Result<(), String>;

/// Run a closure over a batch of seeds, in parallel when enabled.
pub fn run_batch<F>(seeds: &[u64], f: F) -> Vec<CaseResult>
where
    F: Fn(u64) -> CaseResult + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        seeds.par_iter().map(|&s| f(s)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_batch_seq(seeds, f)
    }
}

/// Sequential batch runner.
pub fn run_batch_seq<F>(seeds: &[u64], f: F) -> Vec<CaseResult>
where
    F: Fn(u64) -> CaseResult,
{
    seeds.iter().map(|&s| f(s)).collect()
}

/// Collect failures into one report, keeping the first few messages.
pub fn summarize(results: &[CaseResult]) -> Result<usize, String> {
    let failures: Vec<&String> =
        results.iter().filter_map(|r| r.as_ref().err()).collect();
    if failures.is_empty() {
        Ok(results.len())
    } else {
        let shown: Vec<String> = failures.iter().take(3).map(|s| s.to_string()).collect();
        Err(format!("{} of {} cases failed; first: {}", failures.len(), results.len(), shown.join(" | ")))
    }
}

/// Corpus parameters for one scheme's preservation sweep.
#[derive(Debug, Clone, Copy)]
pub struct CorpusSpec {
    pub tag: FormalismTag,
    pub atoms: usize,
    pub operators: usize,
    pub max_effects: usize,
    pub max_condition_depth: usize,
    /// Deduplicate effect literals per operator after generation (the
    /// partial-specification conditional-effect scheme requires it).
    pub unique_effects: bool,
}

pub fn corpus_instance(spec: &CorpusSpec, seed: u64) -> Instance {
    let params = GenParams {
        tag: spec.tag,
        atom_count: spec.atoms,
        operator_count: spec.operators,
        max_effects: spec.max_effects,
        max_condition_depth: spec.max_condition_depth,
        seed,
    };
    let inst = random_instance(&params);
    if !spec.unique_effects {
        return inst;
    }
    // Keep, per operator, only the first rule per effect literal; the result
    // is a valid instance in unique-effect form.
    let src = crate::model::normalize_singleton_effects(&inst.domain);
    let operators = src
        .operators
        .iter()
        .map(|op| {
            let mut seen: Vec<Literal> = Vec::new();
            let post = op
                .post
                .iter()
                .filter(|eff| {
                    let l = eff.effects.iter().next().unwrap().clone();
                    if seen.contains(&l) {
                        false
                    } else {
                        seen.push(l);
                        true
                    }
                })
                .cloned()
                .collect();
            crate::model::Operator::new(op.name.clone(), op.pre.clone(), post)
        })
        .collect();
    let dom =
        crate::model::DomainStructure::new(src.name.clone(), src.atoms().to_vec(), operators)
            .expect("filtered domain is well-formed");
    Instance::new(dom, inst.init, inst.goal).expect("filtered instance is well-formed")
}

/// One preservation case: compile, decide existence on both sides by
/// exhaustive search, translate the found plan, and check the declared size
/// bound, exact lengths, and target classification.
pub fn check_preservation_case(
    scheme: &CompilationScheme,
    instance: &Instance,
    limits: &SearchLimits,
) -> CaseResult {
    let compiled = compile_instance(scheme, instance).map_err(|e| format!("compile: {e}"))?;
    let tag = classify_instance(&compiled).map_err(|e| format!("classify: {e}"))?;
    if !specializes(tag, scheme.target) {
        return Err(format!("target containment: {tag} does not specialize {}", scheme.target));
    }

    let src_result =
        plan_exists_with(instance, None, limits).map_err(|e| format!("source search: {e}"))?;
    let dst_result =
        plan_exists_with(&compiled, None, limits).map_err(|e| format!("target search: {e}"))?;

    match (&src_result.verdict, &dst_result.verdict) {
        (SearchVerdict::SolutionFound(plan), SearchVerdict::SolutionFound(dst_plan)) => {
            let translated =
                translate_plan(scheme, instance, plan).map_err(|e| format!("translate: {e}"))?;
            if !is_solution(&compiled, &translated).map_err(|e| e.to_string())? {
                return Err("translated plan does not solve the compiled instance".to_string());
            }
            let bound = plan_growth_bound(scheme, &instance.domain, plan.len())
                .map_err(|e| format!("bound: {e}"))?;
            match &scheme.preservation {
                Preservation::Exact(k) => {
                    if translated.len() != plan.len() + k {
                        return Err(format!(
                            "exact scheme translated {} steps to {}, expected {}",
                            plan.len(),
                            translated.len(),
                            plan.len() + k
                        ));
                    }
                    if dst_plan.len() != plan.len() + k {
                        return Err(format!(
                            "shortest target plan is {} steps, expected {}",
                            dst_plan.len(),
                            plan.len() + k
                        ));
                    }
                }
                _ => {
                    if translated.len() > bound {
                        return Err(format!(
                            "translated length {} exceeds bound {bound}",
                            translated.len()
                        ));
                    }
                }
            }
            Ok(())
        }
        (SearchVerdict::NoSolution, SearchVerdict::NoSolution) => Ok(()),
        (s, d) => Err(format!("existence mismatch: source {s:?}, target {d:?}")),
    }
}

/// Preservation sweep over `count` seeds.
pub fn check_scheme_preservation(
    scheme: &CompilationScheme,
    corpus: &CorpusSpec,
    count: usize,
    base_seed: u64,
) -> Result<usize, String> {
    let seeds: Vec<u64> = (0..count as u64).map(|i| base_seed.wrapping_add(i)).collect();
    let limits = SearchLimits::generous();
    let results = run_batch(&seeds, |seed| {
        let instance = corpus_instance(corpus, seed);
        check_preservation_case(scheme, &instance, &limits)
    });
    summarize(&results)
}

/// Sequential twin of `check_scheme_preservation`, for benchmarking the
/// parallel speedup.
pub fn check_scheme_preservation_seq(
    scheme: &CompilationScheme,
    corpus: &CorpusSpec,
    count: usize,
    base_seed: u64,
) -> Result<usize, String> {
    let seeds: Vec<u64> = (0..count as u64).map(|i| base_seed.wrapping_add(i)).collect();
    let limits = SearchLimits::generous();
    let results = run_batch_seq(&seeds, |seed| {
        let instance = corpus_instance(corpus, seed);
        check_preservation_case(scheme, &instance, &limits)
    });
    summarize(&results)
}

/// Exhaustive word sweep: the plan circuit agrees with solution checking on
/// all `2^n` complete initial specifications.
pub fn check_circuit_case(instance: &Instance, plan: &Plan) -> CaseResult {
    let circuit = build_plan_circuit(&instance.domain, &instance.goal, plan)
        .map_err(|e| format!("build: {e}"))?;
    let (depth, _size) = measure(&circuit).map_err(|e| format!("measure: {e}"))?;
    let budget = 7 * plan.len() + 2;
    if depth > budget {
        return Err(format!("depth {depth} exceeds {budget}"));
    }
    let n = instance.domain.atoms().len();
    for mask in 0u64..(1 << n) {
        let word: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
        let mut init = LiteralSet::new();
        for (i, a) in instance.domain.atoms().iter().enumerate() {
            init.insert(if word[i] {
                Literal::Pos(a.clone())
            } else {
                Literal::Neg(a.clone())
            });
        }
        let complete =
            Instance::new(instance.domain.clone(), init, instance.goal.clone())
                .map_err(|e| e.to_string())?;
        let expected = is_solution(&complete, plan).map_err(|e| e.to_string())?;
        let got = eval_circuit(&circuit, &word).map_err(|e| e.to_string())?;
        if expected != got {
            return Err(format!("word {mask:b}: circuit {got}, solution check {expected}"));
        }
    }
    Ok(())
}

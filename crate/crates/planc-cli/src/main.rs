//! `planc`: classify, compile, solve, validate, translate, and export plan
//! circuits for propositional planning instances.
//!
//! Exit codes: 0 ok; 1 usage or syntax error; 2 semantic validation error;
//! 3 impossible compilation route (citation on stderr).

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use planc_core::circuit::{build_plan_circuit, eval_circuit, export_dot, export_gates, measure};
use planc_core::compile::{scheme_for_chain, BasicId, PreserveClass, RouteAnswer};
use planc_core::gadgets::{copy_domain, random_instance, unsat_gadget_instance, GenParams};
use planc_core::planner::{plan_exists_with, validate, SearchLimits, SearchVerdict};
use planc_core::sexp::{
    parse_cnf3, parse_document, parse_plan, print_domain, print_instance, print_plan, Form,
};
use planc_core::{
    classify_instance, compile_instance, route, translate_plan, DomainStructure, FormalismTag,
    Instance, Plan,
};

#[derive(Parser)]
#[command(name = "planc", version, about = "Propositional planning formalism toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse files, report classifications and diagnostics.
    Check {
        /// Domain/instance/plan files.
        files: Vec<PathBuf>,
    },
    /// Compile a domain and instance along a scheme or a routed chain.
    Compile(CompileArgs),
    /// Exhaustive search for a shortest plan.
    Solve {
        /// Maximum plan length to consider.
        #[arg(long)]
        max_steps: Option<usize>,
        /// Instance file (must also contain or accompany its domain).
        instance: PathBuf,
    },
    /// Check that a plan solves an instance.
    Validate { instance: PathBuf, plan: PathBuf },
    /// Translate a solution through a compilation scheme.
    TranslatePlan {
        #[arg(long)]
        scheme: String,
        domain: PathBuf,
        instance: PathBuf,
        plan: PathBuf,
    },
    /// Build the plan-validity circuit for a fixed plan.
    Circuit {
        domain: PathBuf,
        instance: PathBuf,
        plan: PathBuf,
        /// Evaluate on a bit string (one bit per atom, canonical order).
        #[arg(long)]
        eval: Option<String>,
        /// Emit `gates` (one gate per line) or `graph` (DOT).
        #[arg(long)]
        emit: Option<String>,
    },
    /// Generator constructions.
    Gadget {
        #[command(subcommand)]
        which: GadgetCommand,
    },
    /// Seeded random instance generation.
    Gen {
        #[arg(long)]
        formalism: String,
        #[arg(long)]
        atoms: usize,
        #[arg(long)]
        ops: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Args)]
struct CompileArgs {
    /// Route `SRC..DST`, e.g. `S_LIC..S`.
    #[arg(long, conflicts_with = "scheme")]
    route: Option<String>,
    /// Plan-size preservation for routing: exact | linear | poly.
    #[arg(long, requires = "route")]
    preserve: Option<String>,
    /// A fixed scheme: t6 | l7 | l8 | t20 | t22b | t22l | t23 | identity.
    #[arg(long)]
    scheme: Option<String>,
    domain: PathBuf,
    instance: PathBuf,
    /// Output directory for the compiled domain and instance.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// The shadow-copy domain over N value atoms.
    Copy { n: usize },
    /// The unsatisfiability gadget for a 3CNF clause-list file.
    Unsat3cnf { cnffile: PathBuf },
}

enum Failure {
    Usage(String),
    Semantic(String),
    Impossible(String),
}

impl Failure {
    fn exit(&self) -> ExitCode {
        let (code, msg) = match self {
            Failure::Usage(m) => (1, m),
            Failure::Semantic(m) => (2, m),
            Failure::Impossible(m) => (3, m),
        };
        eprintln!("planc: {msg}");
        ExitCode::from(code)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Load all forms from the given files; instances resolve against any domain
/// seen across them.
struct Loader {
    domains: Vec<DomainStructure>,
    instances: Vec<planc_core::sexp::InstanceSrc>,
    plans: Vec<Plan>,
}

impl Loader {
    fn load(paths: &[&Path]) -> Result<Self, Failure> {
        let mut loader = Loader { domains: Vec::new(), instances: Vec::new(), plans: Vec::new() };
        for path in paths {
            let text = read(path)?;
            let forms = parse_document(&text).map_err(|e| {
                let msg = format!("{}: {e}", path.display());
                match e {
                    planc_core::sexp::ParseError::Syntax { .. } => Failure::Usage(msg),
                    _ => Failure::Semantic(msg),
                }
            })?;
            for form in forms {
                match form {
                    Form::Domain(d) => loader.domains.push(d),
                    Form::Instance(i) => loader.instances.push(i),
                    Form::Plan(p) => loader.plans.push(p),
                }
            }
        }
        Ok(loader)
    }

    fn instance(&self) -> Result<Instance, Failure> {
        let src = self
            .instances
            .first()
            .ok_or_else(|| Failure::Usage("no instance form found".to_string()))?;
        let dom = self
            .domains
            .iter()
            .find(|d| d.name == src.domain_name)
            .ok_or_else(|| {
                Failure::Semantic(format!("instance refers to unknown domain `{}`", src.domain_name))
            })?;
        src.resolve(dom).map_err(|e| Failure::Semantic(e.to_string()))
    }
}

fn cli_limits() -> SearchLimits {
    // Compiled instances carry large atom sets; the reachable space is what
    // matters, and the visited cap still guards it.
    SearchLimits { max_atoms: 4096, max_visited: 4_000_000 }
}

fn run() -> Result<(), Failure> {
    let cli = Cli::try_parse().map_err(|e| {
        // Keep clap's rendered help/version on stdout semantics.
        if e.use_stderr() {
            Failure::Usage(e.to_string())
        } else {
            print!("{e}");
            Failure::Usage(String::new())
        }
    })?;
    match cli.command {
        Command::Check { files } => cmd_check(&files),
        Command::Compile(args) => cmd_compile(&args),
        Command::Solve { max_steps, instance } => cmd_solve(max_steps, &instance),
        Command::Validate { instance, plan } => cmd_validate(&instance, &plan),
        Command::TranslatePlan { scheme, domain, instance, plan } => {
            cmd_translate(&scheme, &domain, &instance, &plan)
        }
        Command::Circuit { domain, instance, plan, eval, emit } => {
            cmd_circuit(&domain, &instance, &plan, eval.as_deref(), emit.as_deref())
        }
        Command::Gadget { which } => cmd_gadget(&which),
        Command::Gen { formalism, atoms, ops, seed } => cmd_gen(&formalism, atoms, ops, seed),
    }
}

fn cmd_check(files: &[PathBuf]) -> Result<(), Failure> {
    if files.is_empty() {
        return Err(Failure::Usage("check needs at least one file".to_string()));
    }
    let paths: Vec<&Path> = files.iter().map(PathBuf::as_path).collect();
    let loader = Loader::load(&paths)?;
    for dom in &loader.domains {
        println!(
            "domain {}: {} atoms, {} operators",
            dom.name,
            dom.atoms().len(),
            dom.operators.len()
        );
    }
    for src in &loader.instances {
        let dom = loader
            .domains
            .iter()
            .find(|d| d.name == src.domain_name)
            .ok_or_else(|| {
                Failure::Semantic(format!("instance refers to unknown domain `{}`", src.domain_name))
            })?;
        let inst = src.resolve(dom).map_err(|e| Failure::Semantic(e.to_string()))?;
        let tag = classify_instance(&inst).map_err(|e| Failure::Semantic(e.to_string()))?;
        println!("instance over {}: formalism {tag}", dom.name);
    }
    for plan in &loader.plans {
        println!("plan: {} steps", plan.len());
    }
    Ok(())
}

fn parse_scheme_chain(name: &str) -> Result<Vec<BasicId>, Failure> {
    BasicId::parse(name)
        .map(|b| vec![b])
        .ok_or_else(|| Failure::Usage(format!("unknown scheme `{name}`")))
}

fn cmd_compile(args: &CompileArgs) -> Result<(), Failure> {
    let loader = Loader::load(&[args.domain.as_path(), args.instance.as_path()])?;
    let instance = loader.instance()?;

    let chain: Vec<BasicId> = if let Some(route_spec) = &args.route {
        let (src, dst) = route_spec
            .split_once("..")
            .ok_or_else(|| Failure::Usage("route must look like SRC..DST".to_string()))?;
        let src = FormalismTag::parse(src).map_err(|e| Failure::Usage(e.to_string()))?;
        let dst = FormalismTag::parse(dst).map_err(|e| Failure::Usage(e.to_string()))?;
        let class = args
            .preserve
            .as_deref()
            .and_then(PreserveClass::parse)
            .ok_or_else(|| {
                Failure::Usage("--preserve must be one of exact|linear|poly".to_string())
            })?;
        match route(src, dst, class) {
            RouteAnswer::Chain(chain) => chain,
            RouteAnswer::Impossible(citation) => return Err(Failure::Impossible(citation)),
            RouteAnswer::Unknown => {
                return Err(Failure::Semantic("route is open".to_string()))
            }
        }
    } else if let Some(scheme) = &args.scheme {
        parse_scheme_chain(scheme)?
    } else {
        return Err(Failure::Usage("compile needs --route or --scheme".to_string()));
    };

    let scheme = scheme_for_chain(&chain).map_err(|e| Failure::Semantic(e.to_string()))?;
    let compiled = compile_instance(&scheme, &instance)
        .map_err(|e| Failure::Semantic(e.to_string()))?;

    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", args.out.display())))?;
    write_atomic(&args.out.join("domain.pln"), &print_domain(&compiled.domain))?;
    // The instance file is self-contained so `solve`/`validate` take it alone.
    write_atomic(
        &args.out.join("instance.pln"),
        &format!("{}{}", print_domain(&compiled.domain), print_instance(&compiled)),
    )?;
    let names: Vec<&str> = chain.iter().map(|b| b.name()).collect();
    eprintln!("compiled via {} -> {}", names.join(" "), args.out.display());
    Ok(())
}

fn write_atomic(path: &Path, content: &str) -> Result<(), Failure> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", tmp.display())))?;
    f.write_all(content.as_bytes())
        .and_then(|_| f.sync_all())
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| Failure::Usage(format!("cannot move into place {}: {e}", path.display())))
}

fn cmd_solve(max_steps: Option<usize>, instance: &Path) -> Result<(), Failure> {
    let loader = Loader::load(&[instance])?;
    let inst = loader.instance()?;
    let result = plan_exists_with(&inst, max_steps, &cli_limits())
        .map_err(|e| Failure::Semantic(e.to_string()))?;
    eprintln!(
        "expanded {} specifications, frontier peak {}",
        result.stats.expanded, result.stats.frontier_peak
    );
    match result.verdict {
        SearchVerdict::SolutionFound(plan) => print!("{}", print_plan(&plan)),
        SearchVerdict::NoSolution => println!("(no-plan)"),
        SearchVerdict::BoundExceeded(bound) => {
            eprintln!("no plan within {bound} steps; space not exhausted");
            println!("(no-plan)");
        }
    }
    Ok(())
}

fn cmd_validate(instance: &Path, plan: &Path) -> Result<(), Failure> {
    let loader = Loader::load(&[instance])?;
    let inst = loader.instance()?;
    let plan = parse_plan(&read(plan)?).map_err(|e| Failure::Usage(e.to_string()))?;
    let ok = validate(&inst, &plan).map_err(|e| Failure::Semantic(e.to_string()))?;
    if ok {
        println!("valid");
        Ok(())
    } else {
        Err(Failure::Semantic("plan does not solve the instance".to_string()))
    }
}

fn cmd_translate(scheme: &str, domain: &Path, instance: &Path, plan: &Path) -> Result<(), Failure> {
    let loader = Loader::load(&[domain, instance])?;
    let inst = loader.instance()?;
    let plan = parse_plan(&read(plan)?).map_err(|e| Failure::Usage(e.to_string()))?;
    let chain = parse_scheme_chain(scheme)?;
    let scheme = scheme_for_chain(&chain).map_err(|e| Failure::Semantic(e.to_string()))?;
    let translated =
        translate_plan(&scheme, &inst, &plan).map_err(|e| Failure::Semantic(e.to_string()))?;
    print!("{}", print_plan(&translated));
    Ok(())
}

fn cmd_circuit(
    domain: &Path,
    instance: &Path,
    plan: &Path,
    eval: Option<&str>,
    emit: Option<&str>,
) -> Result<(), Failure> {
    let loader = Loader::load(&[domain, instance])?;
    let inst = loader.instance()?;
    let plan = parse_plan(&read(plan)?).map_err(|e| Failure::Usage(e.to_string()))?;
    let circuit = build_plan_circuit(&inst.domain, &inst.goal, &plan)
        .map_err(|e| Failure::Semantic(e.to_string()))?;
    if let Some(bits) = eval {
        let word: Result<Vec<bool>, Failure> = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Failure::Usage(format!("bad bit `{other}`"))),
            })
            .collect();
        let value = eval_circuit(&circuit, &word?)
            .map_err(|e| Failure::Semantic(e.to_string()))?;
        println!("{}", u8::from(value));
        return Ok(());
    }
    match emit {
        Some("gates") => print!("{}", export_gates(&circuit)),
        Some("graph") => print!("{}", export_dot(&circuit)),
        Some(other) => return Err(Failure::Usage(format!("unknown emit target `{other}`"))),
        None => {
            let (depth, size) = measure(&circuit).map_err(|e| Failure::Semantic(e.to_string()))?;
            println!(
                "(circuit (inputs {}) (gates {size}) (depth {depth}))",
                circuit.input_count
            );
        }
    }
    Ok(())
}

fn cmd_gadget(which: &GadgetCommand) -> Result<(), Failure> {
    match which {
        GadgetCommand::Copy { n } => {
            if *n == 0 {
                return Err(Failure::Usage("copy needs n >= 1".to_string()));
            }
            print!("{}", print_domain(&copy_domain(*n)));
            Ok(())
        }
        GadgetCommand::Unsat3cnf { cnffile } => {
            let cnf = parse_cnf3(&read(cnffile)?).map_err(|e| Failure::Usage(e.to_string()))?;
            let inst =
                unsat_gadget_instance(&cnf).map_err(Failure::Semantic)?;
            print!("{}{}", print_domain(&inst.domain), print_instance(&inst));
            Ok(())
        }
    }
}

fn cmd_gen(formalism: &str, atoms: usize, ops: usize, seed: u64) -> Result<(), Failure> {
    let tag = FormalismTag::parse(formalism).map_err(|e| Failure::Usage(e.to_string()))?;
    let inst = random_instance(&GenParams {
        tag,
        atom_count: atoms,
        operator_count: ops,
        max_effects: 2,
        max_condition_depth: 2,
        seed,
    });
    print!("{}{}", print_domain(&inst.domain), print_instance(&inst));
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.exit(),
    }
}

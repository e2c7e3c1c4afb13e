use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use qp_core::a3::{self, A3Family, FlopResult};
use qp_core::appendix;
use qp_core::io::{parse_potential, potential_to_json};
use qp_core::jacobi::{jdim, DimReport, DimStatus};
use qp_core::monomialize::{is_type_a, monomialize, KappaJson, Kappa};
use qp_core::rational::{fmt_q, parse_q};
use qp_core::realize::{contraction_relations, emit_presentation, ideal_conditions, solve_g_system};
use qp_core::substitution::apply_substitution;
use qp_core::{Potential, QpError, QuiverSpec};

#[derive(Parser, Debug)]
#[command(name = "qp", about = "Exact computations with potentials on double A_n quivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension of the truncated Jacobi algebra.
    Jdim(JdimArgs),
    /// Coordinate change to monomialized Type A form.
    Monomialize(MonoArgs),
    /// Type A recognition.
    TypeaCheck(InputArgs),
    /// g-system, cA_n equation and NCCR data from κ.
    Realize(RealizeArgs),
    /// Classification, flops and derived orbits on Q_{3,{1,2,3}}.
    A3 {
        #[command(subcommand)]
        command: A3Command,
    },
    /// Checks on the appendix reduction system.
    Diamond(DiamondArgs),
    /// Runs a list of argument vectors, optionally in parallel.
    Batch(BatchArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct JdimArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(4..))]
    max_degree: u32,
    /// Also report the quotient by ⟨e_i⟩ (1-based, repeatable).
    #[arg(long = "quotient-vertex")]
    quotient_vertex: Vec<usize>,
}

#[derive(Args, Debug)]
struct MonoArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(4..))]
    max_degree: u32,
    #[arg(long)]
    emit_substitution: bool,
}

#[derive(Args, Debug)]
struct RealizeArgs {
    /// JSON object {"n": N, "kappa": [{"i","j","coeff"}]}.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    anchor: usize,
    /// Include the contraction-algebra relations.
    #[arg(long)]
    relations: bool,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(4..))]
    max_degree: u32,
}

#[derive(Subcommand, Debug)]
enum A3Command {
    Classify(A3Input),
    Flop {
        #[command(flatten)]
        source: A3Input,
        #[arg(long)]
        curve: u8,
    },
    Orbit(A3Input),
    Apq {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        mu: String,
    },
}

#[derive(Args, Debug)]
struct A3Input {
    #[arg(long, required_unless_present = "lambda")]
    input: Option<PathBuf>,
    /// Use x²+xy+λy² directly instead of an input file.
    #[arg(long, conflicts_with = "input")]
    lambda: Option<String>,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(4..))]
    max_degree: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Check {
    Overlaps,
    Basis,
    Recursion,
    Exactness,
    Completion,
}

#[derive(Args, Debug)]
struct DiamondArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    max_degree: u32,
    #[arg(long, value_enum)]
    check: Check,
}

#[derive(Args, Debug)]
struct BatchArgs {
    /// JSON array of argument vectors, e.g. [["jdim","--input","f.json"]].
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KappaInput {
    n: usize,
    kappa: Vec<KappaJson>,
}

struct Outcome {
    code: u8,
    body: Value,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Outcome { code: 0, body }
    }
}

fn exit_code(e: &QpError) -> u8 {
    match e {
        QpError::Ceiling(_) | QpError::TooManyPaths(_) => 2,
        _ => 1,
    }
}

fn read(path: &PathBuf) -> Result<String, QpError> {
    Ok(std::fs::read_to_string(path)?)
}

fn load_potential(path: &PathBuf) -> Result<Potential, QpError> {
    parse_potential(&read(path)?)
}

fn dim_json(r: &DimReport) -> Value {
    json!({
        "status": match r.status { DimStatus::Exact => "exact", DimStatus::LowerBound => "lower_bound" },
        "dim": r.dim,
        "per_degree": r.per_degree,
        "truncation": r.truncation,
    })
}

fn cmd_jdim(a: &JdimArgs) -> Result<Outcome, QpError> {
    let f = load_potential(&a.input)?;
    let total = jdim(&f, a.max_degree, &[])?;
    let mut exact = total.is_exact();
    let mut quotients = Map::new();
    for &i in &a.quotient_vertex {
        let r = jdim(&f, a.max_degree, &[i])?;
        exact &= r.is_exact();
        quotients.insert(i.to_string(), dim_json(&r));
    }
    let mut body = dim_json(&total);
    body["quotients"] = Value::Object(quotients);
    Ok(Outcome { code: if exact { 0 } else { 2 }, body })
}

fn cmd_monomialize(a: &MonoArgs) -> Result<Outcome, QpError> {
    let f = load_potential(&a.input)?;
    let d = a.max_degree;
    let m = monomialize(&f, d)?;
    let soundness = apply_substitution(&f.truncate(d), &m.substitution)? == m.potential;
    let before = jdim(&f, d, &[])?;
    let after = jdim(&m.potential, d, &[])?;
    let dim_invariant = if before.is_exact() && after.is_exact() { json!(before.dim == after.dim) } else { Value::Null };
    let mut body = json!({
        "kappa": m.result.kappa_json(),
        "potential": potential_to_json(&m.potential),
        "passes": m.passes.len(),
        "checks": { "soundness": soundness, "dim_invariant": dim_invariant },
    });
    if a.emit_substitution {
        let sub: BTreeMap<String, String> = m.substitution.display().into_iter().collect();
        body["substitution"] = json!(sub);
    }
    Ok(Outcome { code: if soundness { 0 } else { 2 }, body })
}

fn cmd_typea(a: &InputArgs) -> Result<Outcome, QpError> {
    let f = load_potential(&a.input)?;
    Ok(Outcome::ok(serde_json::to_value(is_type_a(&f))?))
}

fn cmd_realize(a: &RealizeArgs) -> Result<Outcome, QpError> {
    let input: KappaInput = serde_json::from_str(&read(&a.input)?)?;
    let mut kappa = Kappa::new();
    for k in &input.kappa {
        *kappa.entry((k.i, k.j)).or_default() += parse_q(&k.coeff)?;
    }
    let g = solve_g_system(input.n, &kappa, a.anchor)?;
    let ideal = ideal_conditions(&g)?;
    let pres = emit_presentation(&g);
    let mut body = serde_json::to_value(&pres)?;
    body["gs"] = json!(g.gs.iter().map(|p| p.to_json()).collect::<Vec<_>>());
    body["gs_text"] = json!(g.gs.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    body["anchor"] = json!(a.anchor);
    body["ideal"] = serde_json::to_value(&ideal)?;
    if a.relations {
        let spec = QuiverSpec::full(input.n)?;
        let rels = contraction_relations(&kappa, input.n, a.max_degree)?;
        body["relations"] = json!(rels.iter().map(|r| r.display(&spec.quiver)).collect::<Vec<_>>());
    }
    Ok(Outcome::ok(body))
}

fn a3_family(src: &A3Input) -> Result<(A3Family, Map<String, Value>), QpError> {
    let mut extra = Map::new();
    if let Some(l) = &src.lambda {
        let l = parse_q(l)?;
        let fam = A3Family::Lambda(l);
        fam.validate()?;
        return Ok((fam, extra));
    }
    let path = src.input.as_ref().ok_or_else(|| QpError::Invalid("missing --input".into()))?;
    let f = load_potential(path)?;
    let n = a3::normalize(&f, src.max_degree)?;
    let c = a3::classify(&f, src.max_degree)?;
    extra.insert("normalized".into(), json!(n.potential.to_bipoly().to_string()));
    extra.insert("exact_normalizer".into(), json!(c.normalizer.is_some()));
    if let Some(nz) = &c.normalizer {
        extra.insert("scalar".into(), json!(fmt_q(&nz.scalar)));
    }
    Ok((c.family, extra))
}

fn family_summary(fam: &A3Family) -> Result<Map<String, Value>, QpError> {
    let mut m = Map::new();
    m.insert("family".into(), json!(fam.number()));
    m.insert("params".into(), fam.params_json());
    m.insert("normal_form".into(), json!(fam.normal_form().to_bipoly().to_string()));
    if fam.is_finite_dimensional() {
        let orbit = a3::derived_orbit(fam)?;
        m.insert("gv".into(), json!(a3::gv_set(fam)?));
        m.insert("orbit".into(), json!(orbit.members.iter().map(A3Family::to_json).collect::<Vec<_>>()));
        m.insert("offQ".into(), json!(orbit.off_q));
    } else {
        m.insert("gv".into(), Value::Null);
        m.insert("orbit".into(), Value::Null);
        m.insert("offQ".into(), Value::Null);
    }
    Ok(m)
}

fn cmd_a3(c: &A3Command) -> Result<Outcome, QpError> {
    match c {
        A3Command::Classify(src) => {
            let (fam, extra) = a3_family(src)?;
            let mut m = family_summary(&fam)?;
            m.extend(extra);
            Ok(Outcome::ok(Value::Object(m)))
        }
        A3Command::Orbit(src) => {
            let (fam, _) = a3_family(src)?;
            Ok(Outcome::ok(Value::Object(family_summary(&fam)?)))
        }
        A3Command::Flop { source, curve } => {
            let (fam, _) = a3_family(source)?;
            let result = match a3::flop(&fam, *curve)? {
                FlopResult::OnQ(g) => json!({ "onQ": true, "class": g.to_json() }),
                FlopResult::NotOnQ(_) => json!({ "onQ": false, "class": Value::Null }),
            };
            Ok(Outcome::ok(json!({ "curve": curve, "input": fam.to_json(), "result": result })))
        }
        A3Command::Apq { p, q, mu } => {
            let mu = parse_q(mu)?;
            let o = a3::apq_orbit(*p, *q, &mu)?;
            let rep = o.classes.members.iter().next().cloned();
            let gv = match &rep {
                Some(f) => json!(a3::gv_set(f)?),
                None => Value::Null,
            };
            Ok(Outcome::ok(json!({
                "p": p,
                "q": q,
                "mu": fmt_q(&mu),
                "members": o.members,
                "orbit": o.classes.members.iter().map(A3Family::to_json).collect::<Vec<_>>(),
                "offQ": o.classes.off_q,
                "gv": gv,
            })))
        }
    }
}

fn cmd_diamond(a: &DiamondArgs) -> Result<Outcome, QpError> {
    let (n, d) = (a.n, a.max_degree);
    if n == 0 {
        return Err(QpError::Invalid("n must be positive".into()));
    }
    let r = match a.check {
        Check::Overlaps => appendix::check_overlaps(n, d)?,
        Check::Basis => appendix::check_basis(n, d)?,
        Check::Recursion => appendix::check_recursion(n, d)?,
        Check::Exactness => appendix::check_exactness(n, d)?,
        Check::Completion => appendix::check_completion_fixpoint(n, d)?,
    };
    let code = if r.pass { 0 } else { 2 };
    Ok(Outcome { code, body: serde_json::to_value(&r)? })
}

fn cmd_batch(a: &BatchArgs) -> Result<Outcome, QpError> {
    let jobs: Vec<Vec<String>> = serde_json::from_str(&read(&a.input)?)?;
    let results: Mutex<Vec<Option<(u8, Value)>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..a.jobs.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(args) = jobs.get(i) else { break };
                let argv = std::iter::once("qp".to_string()).chain(args.iter().cloned());
                let out = match Cli::try_parse_from(argv) {
                    Ok(Cli { command: Command::Batch(_) }) => {
                        Outcome { code: 1, body: json!({ "error": "nested batch is not allowed" }) }
                    }
                    Ok(cli) => run(&cli.command),
                    Err(e) => Outcome { code: 1, body: json!({ "error": e.to_string() }) },
                };
                results.lock().expect("lock")[i] = Some((out.code, out.body));
            });
        }
    });
    let results = results.into_inner().expect("lock");
    let mut code = 0;
    let mut out = Vec::new();
    for (args, r) in jobs.iter().zip(results) {
        let (c, body) = r.expect("every job ran");
        code = code.max(c);
        out.push(json!({ "args": args, "exit": c, "output": body }));
    }
    Ok(Outcome { code, body: Value::Array(out) })
}

fn run(cmd: &Command) -> Outcome {
    let r = match cmd {
        Command::Jdim(a) => cmd_jdim(a),
        Command::Monomialize(a) => cmd_monomialize(a),
        Command::TypeaCheck(a) => cmd_typea(a),
        Command::Realize(a) => cmd_realize(a),
        Command::A3 { command } => cmd_a3(command),
        Command::Diamond(a) => cmd_diamond(a),
        Command::Batch(a) => cmd_batch(a),
    };
    r.unwrap_or_else(|e| Outcome { code: exit_code(&e), body: json!({ "error": e.to_string() }) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = run(&cli.command);
    if let Some(e) = out.body.get("error").and_then(Value::as_str) {
        eprintln!("qp: {e}");
    }
    let text = serde_json::to_string_pretty(&out.body).expect("serializable");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(out.code)
}

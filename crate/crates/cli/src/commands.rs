use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use kentail::bounds::{
    pac_actual, pac_expected, pac_realizable_expected, pac_voting, tail_one_sample, tail_realizable,
    tail_two_sample, worst_case_k, worst_case_voting, LiteralCount, PacInputs, Theorem,
};
use kentail::fragments::{q_exact_with_budget, DEFAULT_EXACT_BUDGET};
use kentail::harness::{
    eliminate_constants as eliminate, run_expected_error_protocol, run_pac_experiment, summary_json,
    validate_concentration, write_reports, ConcentrationConfig, ExperimentConfig, Scenario, SCHEMA_VERSION,
};
use kentail::reasoner::{
    k_entailed_literals, parse_gamma, vote_threshold, voting_entailed_literals, EntailmentResult, Gamma,
};
use kentail::{
    apply_mask, parse_example, parse_masked_example, parse_theory, q_monte_carlo, Error, Example,
    GroundLiteral, MaskedExample, Masker, Predicate, Result, Theory,
};

use crate::Format;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_example(path: &Path) -> Result<Example> {
    parse_example(&read(path)?)
}

fn load_theory(path: &Path) -> Result<Theory> {
    parse_theory(&read(path)?)
}

fn load_mask(path: &Path) -> Result<MaskedExample> {
    parse_masked_example(&read(path)?)
}

/// Prints the standard JSON document, or `text` in text mode.
fn emit(format: Format, command: &str, config: Value, result: Value, text: impl FnOnce() -> String) -> ExitCode {
    match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "config": config,
                "result": result,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Text => print!("{}", text()),
    }
    ExitCode::SUCCESS
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

#[derive(Args, Debug)]
pub struct QArgs {
    #[arg(long)]
    example: PathBuf,
    #[arg(long)]
    theory: PathBuf,
    #[arg(long)]
    k: usize,
    /// Enumerate all size-k subsets (default).
    #[arg(long, conflicts_with = "mc")]
    exact: bool,
    /// Estimate from uniformly drawn subsets.
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 100_000, requires = "mc")]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest subset count evaluated in exact mode.
    #[arg(long, default_value_t = DEFAULT_EXACT_BUDGET)]
    budget: u128,
}

pub fn q(a: QArgs, format: Format) -> Result<ExitCode> {
    let example = load_example(&a.example)?;
    let theory = load_theory(&a.theory)?;
    let est = if a.mc {
        q_monte_carlo(&example, a.k, &theory, a.trials, a.seed)?
    } else {
        q_exact_with_budget(&example, a.k, &theory, a.budget)?
    };
    let mut result = to_value(&est);
    if est.is_exact() {
        result["fraction"] = json!(est.ratio().to_string());
        result["numerator"] = json!(est.ratio().numer().to_string());
        result["denominator"] = json!(est.ratio().denom().to_string());
    }
    let config = json!({
        "example": a.example, "theory": a.theory, "k": a.k,
        "mode": if a.mc { "monte-carlo" } else { "exact" },
        "trials": a.mc.then_some(a.trials), "seed": a.seed, "budget": a.budget.to_string(),
    });
    Ok(emit(format, "q", config, result, || {
        if est.is_exact() {
            format!("{}\n", est.ratio())
        } else {
            format!("{} ({} of {} draws)\n", est.value, est.satisfying, est.total)
        }
    }))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MaskKindArg {
    Identity,
    PositiveOnly,
    RandomDrop,
    LiteralList,
}

#[derive(Args, Debug)]
pub struct MaskArgs {
    #[arg(long)]
    example: PathBuf,
    #[arg(long, value_enum)]
    kind: MaskKindArg,
    /// Predicates kept by `positive-only` (default: all).
    #[arg(long, value_delimiter = ',')]
    pred: Vec<String>,
    /// Keep probability for `random-drop`.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// File with one literal per line for `literal-list`.
    #[arg(long)]
    literals: Option<PathBuf>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn mask(a: MaskArgs) -> Result<ExitCode> {
    let example = load_example(&a.example)?;
    let masker = match a.kind {
        MaskKindArg::Identity => Masker::Identity,
        MaskKindArg::PositiveOnly => Masker::PositiveOnly(if a.pred.is_empty() {
            example.predicates().iter().map(|p| p.name.clone()).collect()
        } else {
            a.pred.clone()
        }),
        MaskKindArg::RandomDrop => Masker::RandomDrop {
            p: a.p.ok_or_else(|| Error::InvalidParameter("random-drop needs --p".into()))?,
            seed: a.seed,
        },
        MaskKindArg::LiteralList => {
            let path = a
                .literals
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("literal-list needs --literals".into()))?;
            let lits = read(path)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(GroundLiteral::parse)
                .collect::<Result<Vec<_>>>()?;
            Masker::LiteralList(lits)
        }
    };
    let masked = apply_mask(&masker, &example)?;
    match &a.out {
        Some(path) => write(path, &masked.to_string())?,
        None => print!("{masked}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum InferMode {
    K,
    Vote,
}

#[derive(Args, Debug)]
pub struct InferArgs {
    /// Complete example, to report the truth of each derived literal.
    #[arg(long)]
    example: Option<PathBuf>,
    #[arg(long)]
    mask: PathBuf,
    #[arg(long)]
    theory: PathBuf,
    #[arg(long)]
    k: usize,
    /// Voting parameter, a decimal or a fraction.
    #[arg(long)]
    gamma: Option<String>,
    /// Target predicate as `name/arity`.
    #[arg(long)]
    target: String,
    #[arg(long, value_enum, default_value_t = InferMode::K)]
    mode: InferMode,
    /// Only positive literals are targets.
    #[arg(long)]
    positive_only: bool,
}

fn derive(
    masked: &MaskedExample,
    theory: &Theory,
    k: usize,
    gamma: Option<Gamma>,
    target: &Predicate,
    positive_only: bool,
) -> Result<EntailmentResult> {
    match gamma {
        Some(g) => voting_entailed_literals(masked, theory, k, g, target, positive_only),
        None => k_entailed_literals(masked, theory, k, target, positive_only),
    }
}

pub fn infer(a: InferArgs, format: Format) -> Result<ExitCode> {
    let masked = load_mask(&a.mask)?;
    let theory = load_theory(&a.theory)?;
    let target = Predicate::parse(&a.target)?;
    let gamma = a.gamma.as_deref().map(parse_gamma).transpose()?;
    let gamma = match a.mode {
        InferMode::K => None,
        InferMode::Vote => Some(gamma.ok_or_else(|| Error::InvalidParameter("vote mode needs --gamma".into()))?),
    };
    let example = a.example.as_deref().map(load_example).transpose()?;
    if let Some(ex) = &example {
        if ex.domain() != masked.domain() {
            return Err(Error::DomainMismatch);
        }
    }
    let result = derive(&masked, &theory, a.k, gamma, &target, a.positive_only)?;
    let truth = |l: &GroundLiteral| example.as_ref().map(|e| e.holds(&l.atom) == l.positive);
    match format {
        Format::Json => {
            let header = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "infer",
                "config": {
                    "example": a.example, "mask": a.mask, "theory": a.theory, "k": a.k,
                    "gamma": gamma.map(|g| g.to_string()), "target": a.target,
                    "mode": if gamma.is_some() { "vote" } else { "k" }, "positive_only": a.positive_only,
                },
                "derivation": result.mode,
            });
            println!("{header}");
            for d in &result.literals {
                let line = json!({
                    "literal": d.literal.to_string(),
                    "positive": d.literal.positive,
                    "witness": d.witness,
                    "votes": d.votes.map(|v| v.to_string()),
                    "true_in_example": truth(&d.literal),
                });
                println!("{line}");
            }
        }
        Format::Text => {
            for d in &result.literals {
                let mark = match truth(&d.literal) {
                    Some(true) => " true",
                    Some(false) => " FALSE",
                    None => "",
                };
                print!("{} [{}]", d.literal, d.witness.join(" "));
                if let Some(v) = d.votes {
                    print!(" votes={v}");
                }
                println!("{mark}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args, Debug)]
pub struct ErrorsArgs {
    /// Complete test example.
    #[arg(long)]
    example: PathBuf,
    #[arg(long)]
    mask: PathBuf,
    #[arg(long)]
    theory: PathBuf,
    #[arg(long)]
    k: usize,
    /// Also count voting errors with this parameter.
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    target: String,
    #[arg(long)]
    positive_only: bool,
}

pub fn errors(a: ErrorsArgs, format: Format) -> Result<ExitCode> {
    let example = load_example(&a.example)?;
    let masked = load_mask(&a.mask)?;
    if example.domain() != masked.domain() {
        return Err(Error::DomainMismatch);
    }
    let theory = load_theory(&a.theory)?;
    let target = Predicate::parse(&a.target)?;
    let gamma = a.gamma.as_deref().map(parse_gamma).transpose()?;
    let q = q_exact_with_budget(&example, a.k, &theory, DEFAULT_EXACT_BUDGET)?;
    let c = example.domain_size() as u64;
    let (k, arity) = (a.k as u32, target.arity as u32);
    let false_of = |r: &EntailmentResult| -> Vec<String> {
        r.literals
            .iter()
            .filter(|d| example.holds(&d.literal.atom) != d.literal.positive)
            .map(|d| d.literal.to_string())
            .collect()
    };
    let k_false = false_of(&derive(&masked, &theory, a.k, None, &target, a.positive_only)?);
    let prop3 = worst_case_k(q.value, c, k, arity)?;
    let mut result = json!({
        "q": q.ratio().to_string(),
        "k_entailment": { "errors": k_false.len(), "bound": prop3, "false_literals": k_false },
    });
    let mut text = format!("Q = {}\nk-entailment: |F| = {} <= {prop3}\n", q.ratio(), k_false.len());
    if let Some(g) = gamma {
        let v_false = false_of(&derive(&masked, &theory, a.k, Some(g), &target, a.positive_only)?);
        let gf = *g.numer() as f64 / *g.denom() as f64;
        let prop4 = worst_case_voting(q.value, c, k, arity, gf)?;
        let threshold = vote_threshold(g, example.domain_size(), a.k, target.arity);
        result["voting"] = json!({
            "errors": v_false.len(), "bound": prop4, "threshold": threshold.to_string(), "false_literals": v_false,
        });
        text.push_str(&format!("voting: |F| = {} <= {prop4}\n", v_false.len()));
    }
    let config = json!({
        "example": a.example, "mask": a.mask, "theory": a.theory, "k": a.k,
        "gamma": gamma.map(|g| g.to_string()), "target": a.target, "positive_only": a.positive_only,
    });
    Ok(emit(format, "errors", config, result, || text))
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// One of prop3, prop4, thm7, thm8, thm9, thm10, tail1, tail2, tailr.
    #[arg(long)]
    theorem: String,
    /// Accuracy of the theory (test accuracy for prop3/prop4, training accuracy otherwise).
    #[arg(long)]
    q: Option<f64>,
    /// Test domain size for prop3/prop4.
    #[arg(long)]
    c: Option<u64>,
    #[arg(long)]
    k: u64,
    /// Target predicate arity.
    #[arg(long, default_value_t = 1)]
    a: u32,
    /// Training domain size.
    #[arg(long)]
    n: Option<u64>,
    /// Test domain size.
    #[arg(long)]
    u: Option<u64>,
    /// Hypothesis class size.
    #[arg(long, default_value_t = 1)]
    h: u64,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    gamma: Option<String>,
    /// Deviation for the tail bounds.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    two_sided: bool,
    /// Count only positive target literals for the vacuity flag.
    #[arg(long)]
    positive_only: bool,
}

fn need<T>(v: Option<T>, flag: &str, theorem: Theorem) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required for {theorem}")))
}

pub fn bounds(a: BoundsArgs, format: Format) -> Result<ExitCode> {
    let t = Theorem::parse(&a.theorem)?;
    let gamma = a.gamma.as_deref().map(parse_gamma).transpose()?;
    let gamma_f = gamma.map(|g| *g.numer() as f64 / *g.denom() as f64);
    let count = if a.positive_only {
        LiteralCount::PositiveOnly
    } else {
        LiteralCount::Signed
    };
    let result = match t {
        Theorem::Prop3 | Theorem::Prop4 => {
            let q = need(a.q, "q", t)?;
            let c = need(a.c, "c", t)?;
            let value = if t == Theorem::Prop3 {
                worst_case_k(q, c, a.k as u32, a.a)?
            } else {
                worst_case_voting(q, c, a.k as u32, a.a, need(gamma_f, "gamma", t)?)?
            };
            let total = count.total(c, a.a);
            json!({ "theorem": t, "value": value, "literal_total": total, "vacuous": value >= total })
        }
        Theorem::Tail1 | Theorem::Tail2 | Theorem::Tailr => {
            let n = need(a.n, "n", t)?;
            let eps = need(a.eps, "eps", t)?;
            let value = match t {
                Theorem::Tail1 => tail_one_sample(n, a.k, eps, a.two_sided),
                Theorem::Tail2 => tail_two_sample(n, need(a.u, "u", t)?, a.k, eps, a.two_sided),
                _ => tail_realizable(n, a.k, eps),
            };
            json!({ "theorem": t, "value": value })
        }
        _ => {
            let inputs = PacInputs {
                q: if t == Theorem::Thm7 { a.q.unwrap_or(1.0) } else { need(a.q, "q", t)? },
                n: need(a.n, "n", t)?,
                u: need(a.u, "u", t)?,
                k: a.k,
                a: a.a,
                h_size: a.h,
                delta: need(a.delta, "delta", t)?,
                gamma: gamma_f,
            };
            let report = match t {
                Theorem::Thm7 => pac_realizable_expected(inputs, count)?,
                Theorem::Thm8 => pac_expected(inputs, count)?,
                Theorem::Thm9 => pac_actual(inputs, count)?,
                _ => pac_voting(inputs, count)?,
            };
            to_value(&report)
        }
    };
    let config = json!({
        "theorem": t, "q": a.q, "c": a.c, "k": a.k, "a": a.a, "n": a.n, "u": a.u, "h": a.h,
        "delta": a.delta, "gamma": gamma.map(|g| g.to_string()), "eps": a.eps,
        "two_sided": a.two_sided, "positive_only": a.positive_only,
    });
    let text = format!("{}\n", result["value"].as_f64().unwrap_or(f64::NAN));
    Ok(emit(format, "bounds", config, result, || text))
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// rare-clique, rare-chain, smokers or random.
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    n: usize,
    /// Atom density of the random scenarios.
    #[arg(long, default_value_t = 0.1)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

pub fn generate(a: GenerateArgs, format: Format) -> Result<ExitCode> {
    let scenario = Scenario::parse(&a.scenario)?;
    let example = scenario.generate(a.n, a.density, a.seed)?;
    write(&a.out, &example.to_string())?;
    let config = json!({
        "scenario": scenario.name(), "n": a.n, "density": a.density, "seed": a.seed, "out": a.out,
    });
    let result = json!({ "constants": example.domain_size(), "atoms": example.atom_count() });
    Ok(emit(format, "generate", config, result, || {
        format!("wrote {} ({} atoms)\n", a.out.display(), example.atom_count())
    }))
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the config's `output` key.
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn experiment(a: ExperimentArgs, format: Format) -> Result<ExitCode> {
    let mut cfg = ExperimentConfig::parse(&read(&a.config)?)?;
    if a.output.is_some() {
        cfg.output = a.output.clone();
    }
    let (aleph, hypotheses) = cfg.build()?;
    let run = run_pac_experiment(&aleph, &hypotheses, &cfg.pac)?;
    let expected = if cfg.outer > 0 && cfg.inner > 0 {
        Some(run_expected_error_protocol(&aleph, &hypotheses, &cfg.pac, cfg.outer, cfg.inner)?)
    } else {
        None
    };
    let mut files = Vec::new();
    if let Some(dir) = &cfg.output {
        let (csv, summary) = write_reports(&run, dir)?;
        files.push(csv);
        files.push(summary);
        if let Some(e) = &expected {
            let path = dir.join("expected.json");
            let doc = json!({ "schema_version": SCHEMA_VERSION, "expected_error": e });
            write(&path, &(serde_json::to_string_pretty(&doc).unwrap() + "\n"))?;
            files.push(path);
        }
    }
    let result = json!({
        "summary": run.summary,
        "expected_error": expected.as_ref().map(|e| json!({
            "thm7_pass_rate": e.thm7_pass_rate,
            "thm8_pass_rate": e.thm8_pass_rate,
            "required_rate": e.required_rate,
            "passes": e.passes(),
        })),
        "files": files,
    });
    Ok(emit(format, "experiment", to_value(&cfg), result, || summary_json(&run)))
}

#[derive(Args, Debug)]
pub struct ConcentrationArgs {
    #[arg(long)]
    scenario: String,
    /// Size of the global example.
    #[arg(long)]
    aleph: usize,
    #[arg(long, default_value_t = 0.1)]
    density: f64,
    /// Theory file (default: the scenario's main rule).
    #[arg(long)]
    theory: Option<PathBuf>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Test size; adds the two-sample rows.
    #[arg(long)]
    u: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.05,0.1,0.2")]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 5000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Noise allowance in binomial standard errors.
    #[arg(long, default_value_t = 3.0)]
    z: f64,
}

pub fn concentration(a: ConcentrationArgs, format: Format) -> Result<ExitCode> {
    let scenario = Scenario::parse(&a.scenario)?;
    let aleph = scenario.generate(a.aleph, a.density, a.seed)?;
    let theory = match &a.theory {
        Some(p) => load_theory(p)?,
        None => scenario.hypotheses().remove(0),
    };
    let cfg = ConcentrationConfig {
        k: a.k,
        n: a.n,
        u: a.u,
        epsilons: a.eps.clone(),
        trials: a.trials,
        seed: a.seed,
    };
    let table = validate_concentration(&aleph, &theory, &cfg)?;
    let violations = table.violations(a.z);
    let config = json!({
        "scenario": scenario.name(), "aleph": a.aleph, "density": a.density,
        "theory": theory.to_string(), "z": a.z, "run": cfg,
    });
    let text = {
        let mut s = format!("A = {}\n", table.reference);
        for r in table.one_sample.iter().chain(&table.two_sample) {
            s.push_str(&format!(
                "eps={} upper={} lower={} two-sided={} bound={} / {}\n",
                r.epsilon, r.upper, r.lower, r.two_sided, r.bound_one_sided, r.bound_two_sided
            ));
        }
        s.push_str(&format!("violations: {}\n", violations.len()));
        s
    };
    let result = json!({ "table": table, "violations": violations });
    Ok(emit(format, "concentration", config, result, || text))
}

#[derive(Args, Debug)]
pub struct EliminateArgs {
    #[arg(long)]
    theory: PathBuf,
    #[arg(long)]
    example: PathBuf,
    /// Writes `<prefix>.th` and `<prefix>.ex`.
    #[arg(long)]
    out_prefix: PathBuf,
}

pub fn eliminate_constants(a: EliminateArgs, format: Format) -> Result<ExitCode> {
    let theory = parse_theory(&read(&a.theory)?)?;
    let example = load_example(&a.example)?;
    let (t, ex) = eliminate(&theory, &example)?;
    let prefix = a.out_prefix.to_string_lossy();
    let (th_path, ex_path) = (PathBuf::from(format!("{prefix}.th")), PathBuf::from(format!("{prefix}.ex")));
    write(&th_path, &t.to_string())?;
    write(&ex_path, &ex.to_string())?;
    let config = json!({ "theory": a.theory, "example": a.example, "out_prefix": a.out_prefix });
    let result = json!({ "theory": t.to_string(), "files": [th_path, ex_path] });
    Ok(emit(format, "transform eliminate-constants", config, result, || t.to_string()))
}

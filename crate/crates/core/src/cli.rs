//! Command-line front end.
//!
//! Exit codes: 0 when the run completes and the inequality holds, 2 when an
//! inequality fails or a hunt finds a violation, 1 on usage or I/O errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::algebra::AmbientStructure;
use crate::error::SumsetError;
use crate::instance::{decode_structure, encode_element, encode_set, Instance, InstanceError};
use crate::report::InequalityReport;
use crate::search::{self, HuntConfig, HuntError, HuntMode};
use crate::set::FiniteSet;
use crate::sumset::{graph_triple_sumset, restricted_pair_sumset, sumset};
use crate::theorems::{self, instance_digest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FINDING: i32 = 2;

/// Verifier names accepted by `--inequality`.
pub const INEQUALITIES: &[&str] = &[
    "superadd",
    "superadd-tf",
    "submult",
    "projection",
    "restsum",
    "cauchy-davenport",
    "plunnecke",
    "plunnecke-multi",
    "plunnecke-large",
    "plunnecke-smooth",
    "lev",
    "tensor",
    "graph",
    "q1",
    "q2",
];

#[derive(Debug, Parser)]
#[command(
    name = "sumsets",
    version,
    about = "Exact sumset inequality verifiers and counterexample hunts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check one inequality on an instance file.
    Verify(VerifyArgs),
    /// Check an inequality and print the constructed witness.
    Witness(VerifyArgs),
    /// Build the addition-graph family on which the graph inequality fails.
    Family(FamilyArgs),
    /// Search for counterexamples to one of the open questions.
    Hunt(HuntArgs),
    /// Run the fixed example suite.
    Selftest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    inequality: String,
    #[arg(long, value_enum, default_value = "json")]
    out: OutFormat,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    target_size: usize,
    /// Use this comma-separated S instead of the greedy generator.
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<i64>>,
    /// Drop the loop edges (a, a).
    #[arg(long)]
    no_loops: bool,
    #[arg(long, value_enum, default_value = "json")]
    out: OutFormat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QuestionArg {
    Q1,
    Q2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
}

#[derive(Debug, Args)]
struct HuntArgs {
    #[arg(long, value_enum)]
    question: QuestionArg,
    /// Structure as JSON, e.g. '{"Sym":4}'. Q2 always runs over "Z".
    #[arg(long)]
    structure: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    size_cap: Option<usize>,
    /// Q2 sets are drawn from [0, value_range].
    #[arg(long)]
    value_range: Option<i64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Start from the index stored in the checkpoint file.
    #[arg(long, requires = "checkpoint")]
    resume: bool,
    #[arg(long, conflicts_with = "resume")]
    start_index: Option<u64>,
    /// Continue past the first violation.
    #[arg(long)]
    keep_going: bool,
}

/// Exit status plus captured output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Sumset(#[from] SumsetError),
    #[error(transparent)]
    Hunt(#[from] HuntError),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (without the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once("sumsets".into()).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome::ok(EXIT_OK, text)
                }
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let result = match cli.command {
        Command::Verify(a) => verify(&a, false),
        Command::Witness(a) => verify(&a, true),
        Command::Family(a) => family(&a),
        Command::Hunt(a) => hunt(&a),
        Command::Selftest => Ok(selftest()),
    };
    match result {
        Ok(outcome) => outcome,
        Err(CliError::Sumset(e @ SumsetError::TheoremViolation(_))) => Outcome {
            code: EXIT_FINDING,
            stdout: String::new(),
            stderr: format!("{e}\n"),
        },
        Err(e) => Outcome::usage(e),
    }
}

fn load_instance(path: &PathBuf) -> CliResult<Instance> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.clone(),
        source,
    })?;
    Ok(Instance::parse(&text)?)
}

fn verdict(reports: &[InequalityReport]) -> i32 {
    if reports.iter().all(|r| r.holds) {
        EXIT_OK
    } else {
        EXIT_FINDING
    }
}

fn render_reports(reports: &[InequalityReport], out: OutFormat) -> String {
    match out {
        OutFormat::Json if reports.len() == 1 => format!("{}\n", reports[0].to_json()),
        OutFormat::Json => {
            format!(
                "{}\n",
                Value::Array(reports.iter().map(InequalityReport::to_json).collect())
            )
        }
        OutFormat::Csv => {
            let mut s = format!("{}\n", InequalityReport::CSV_HEADER);
            for r in reports {
                s.push_str(&r.to_csv_row());
                s.push('\n');
            }
            s
        }
    }
}

fn sets_json(sets: &[FiniteSet]) -> Value {
    Value::Array(sets.iter().map(encode_set).collect())
}

fn big_json(v: &BigInt) -> Value {
    Value::String(v.to_string())
}

fn need_sets(inst: &Instance, min: usize, layout: &str) -> CliResult<()> {
    if inst.sets.len() < min {
        return Err(CliError::Usage(format!("this inequality expects sets {layout}")));
    }
    Ok(())
}

fn param(inst: &Instance, key: &str, default: usize) -> CliResult<usize> {
    Ok(inst.param_usize(key)?.unwrap_or(default))
}

fn param_rational(inst: &Instance, key: &str) -> CliResult<BigRational> {
    let bad = || CliError::Usage(format!("param \"{key}\" must be an integer or a \"p/q\" string"));
    match inst.params.get(key) {
        None => Err(CliError::Usage(format!("param \"{key}\" is required"))),
        Some(Value::Number(n)) => n.as_i64().map(|v| BigRational::from_integer(v.into())).ok_or_else(bad),
        Some(Value::String(s)) => s.parse::<BigRational>().map_err(|_| bad()),
        Some(_) => Err(bad()),
    }
}

fn plunnecke_witness_json(w: &theorems::PlunneckeWitness) -> Value {
    json!({
        "x_set": encode_set(&w.x_set),
        "bound": w.bound.as_ref().map(crate::report::rational_json),
        "achieved": big_json(&w.achieved),
    })
}

/// Runs one verifier, returning its reports and witness bundle.
fn dispatch(inst: &Instance, name: &str) -> CliResult<(Vec<InequalityReport>, Value)> {
    let sets = &inst.sets;
    let st = &inst.structure;
    let one = |r: InequalityReport| Ok((vec![r], Value::Null));
    match name {
        "superadd" => {
            let (report, w) = theorems::verify_superadditivity(sets)?;
            let bundle = json!({
                "endpoint_sets": sets_json(&w.endpoint_sets),
                "endpoint_report": w.endpoint_report(&report.instance_digest).to_json(),
                "s_prime_parts": sets_json(&w.s_prime_parts),
                "s_prime": encode_set(&w.s_prime),
                "marked": sets_json(&w.marked),
                "marked_count": w.marked_count(),
                "target": big_json(&w.target),
                "a_values": w.a_values.iter().map(big_json).collect::<Vec<_>>(),
            });
            Ok((vec![report], bundle))
        }
        "superadd-tf" => {
            let (report, red, w) = theorems::verify_superadditivity_torsion_free(sets)?;
            let bundle = json!({
                "m": big_json(&red.m),
                "images": sets_json(&red.images),
                "endpoint_preimages": sets_json(&red.endpoint_preimages),
                "certified_points": red.certified_points,
                "marked": sets_json(&w.marked),
                "marked_count": w.marked_count(),
            });
            Ok((vec![report], bundle))
        }
        "submult" => {
            let report = theorems::verify_submultiplicativity(st, sets)?;
            let d = theorems::lex_min_decomposition(st, sets)?;
            theorems::check_lex_invariants(st, &d)?;
            let map: Vec<Value> = d
                .sums
                .iter()
                .zip(&d.tuples)
                .map(|(s, t)| {
                    json!({
                        "sum": encode_element(s),
                        "summands": t.iter().zip(&d.element_orders).map(|(&i, o)| encode_element(&o.elements()[i])).collect::<Vec<_>>(),
                        "indices": t.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok((vec![report], json!({ "lex_map": map })))
        }
        "projection" => {
            need_sets(inst, 1, "[B] over a lattice")?;
            one(theorems::verify_projection_lemma(&sets[0])?)
        }
        "restsum" => {
            need_sets(inst, 4, "[A, B1, B2, S]")?;
            one(theorems::verify_restricted_three_sum(
                st, &sets[0], &sets[1], &sets[2], &sets[3],
            )?)
        }
        "cauchy-davenport" => {
            need_sets(inst, 2, "[A, B] in Zmod p")?;
            let AmbientStructure::Residues(p) = st else {
                return Err(CliError::Usage(
                    "cauchy-davenport needs a {\"Zmod\": p} structure".into(),
                ));
            };
            one(theorems::cauchy_davenport_check(*p, &sets[0], &sets[1])?)
        }
        "plunnecke" => {
            need_sets(inst, 2, "[A, B]")?;
            let w = theorems::find_plunnecke_subset(&sets[0], &sets[1], param(inst, "i", 1)?, param(inst, "k", 2)?)?;
            Ok((vec![w.report.clone()], plunnecke_witness_json(&w)))
        }
        "plunnecke-multi" => {
            need_sets(inst, 2, "[A, B1, ..., Bh]")?;
            let w = theorems::find_plunnecke_subset_multi(&sets[0], &sets[1..])?;
            Ok((vec![w.report.clone()], plunnecke_witness_json(&w)))
        }
        "plunnecke-large" => {
            need_sets(inst, 2, "[A, B1, ..., Bh]")?;
            let w = theorems::construct_large_subset(&sets[0], &sets[1..], param(inst, "k", 2)?)?;
            Ok((vec![w.report.clone()], plunnecke_witness_json(&w)))
        }
        "plunnecke-smooth" => {
            need_sets(inst, 2, "[A, B1, ..., Bh]")?;
            let t = param_rational(inst, "t")?;
            let w = theorems::verify_smooth_large_subset(&sets[0], &sets[1..], &t)?;
            Ok((vec![w.report.clone()], plunnecke_witness_json(&w)))
        }
        "lev" => {
            need_sets(inst, 1, "[A]")?;
            Ok((
                theorems::verify_lev_monotonicity(&sets[0], param(inst, "kmax", 4)?)?,
                Value::Null,
            ))
        }
        "tensor" => {
            need_sets(inst, 2, "[X, Y]")?;
            let k = param(inst, "k", 2)?;
            let (power, direct) = theorems::tensor_power_sizes(st, &sets[0], &sets[1], k)?;
            let digest = instance_digest(st, &sets[..2]);
            let reports = vec![
                InequalityReport::at_most("tensor", power, direct, &digest),
                InequalityReport::at_least("tensor", power, direct, &digest),
            ];
            Ok((reports, Value::Null))
        }
        "graph" => {
            need_sets(inst, 1, "[A] plus a graph")?;
            let graph = inst
                .graph
                .as_ref()
                .ok_or_else(|| CliError::Usage("the graph inequality needs a \"graph\" field".into()))?;
            let a = &sets[0];
            let pairs = restricted_pair_sumset(st, a, a, graph)?;
            let triples = graph_triple_sumset(a, graph)?;
            let report = InequalityReport::at_most(
                "graph-triple",
                BigInt::from(triples.len()).pow(2),
                BigInt::from(pairs.len()).pow(3),
                &instance_digest(st, &sets[..1]),
            );
            let bundle = json!({ "pair_sums": encode_set(&pairs), "triple_sums": encode_set(&triples) });
            Ok((vec![report], bundle))
        }
        "q1" => {
            let r = search::eval_question1(st, sets)?;
            one(InequalityReport::at_most(
                "q1",
                r.lhs,
                r.rhs,
                &instance_digest(st, sets),
            ))
        }
        "q2" => {
            need_sets(inst, 5, "[A, B1, ..., Bk, S] with k >= 3")?;
            let n = sets.len();
            let r = search::eval_question2(&sets[0], &sets[1..n - 1], &sets[n - 1])?;
            one(InequalityReport::at_most(
                "q2",
                r.lhs,
                r.rhs,
                &instance_digest(st, sets),
            ))
        }
        other => Err(CliError::Usage(format!(
            "unknown inequality \"{other}\"; valid names: {}",
            INEQUALITIES.join(", ")
        ))),
    }
}

fn verify(args: &VerifyArgs, with_witness: bool) -> CliResult<Outcome> {
    if !INEQUALITIES.contains(&args.inequality.as_str()) {
        return Err(CliError::Usage(format!(
            "unknown inequality \"{}\"; valid names: {}",
            args.inequality,
            INEQUALITIES.join(", ")
        )));
    }
    let inst = load_instance(&args.instance)?;
    let (reports, bundle) = dispatch(&inst, &args.inequality)?;
    let code = verdict(&reports);
    let stdout = if with_witness {
        match args.out {
            OutFormat::Json => {
                let reports: Vec<Value> = reports.iter().map(InequalityReport::to_json).collect();
                format!("{}\n", json!({ "reports": reports, "witness": bundle }))
            }
            OutFormat::Csv => return Err(CliError::Usage("witness output is JSON only".into())),
        }
    } else {
        render_reports(&reports, args.out)
    };
    Ok(Outcome::ok(code, stdout))
}

fn family(args: &FamilyArgs) -> CliResult<Outcome> {
    let s = match &args.s {
        Some(values) => FiniteSet::integers(values),
        None => theorems::greedy_family_set(args.n, args.target_size)?,
    };
    let fam = theorems::build_graph_counterexample_with(args.n, &s, !args.no_loops)?;
    let code = verdict(std::slice::from_ref(&fam.report));
    let stdout = match args.out {
        OutFormat::Json => format!(
            "{}\n",
            json!({
                "n": fam.n,
                "s": encode_set(&fam.s),
                "loops": !args.no_loops,
                "edges": fam.graph.edges().len(),
                "pair_sums": fam.pair_sums.len(),
                "triple_sums": fam.triple_sums.len(),
                "report": fam.report.to_json(),
            })
        ),
        OutFormat::Csv => render_reports(std::slice::from_ref(&fam.report), OutFormat::Csv),
    };
    Ok(Outcome::ok(code, stdout))
}

fn hunt(args: &HuntArgs) -> CliResult<Outcome> {
    let mut config = match args.question {
        QuestionArg::Q1 => HuntConfig::q1_default(),
        QuestionArg::Q2 => HuntConfig::q2_default(),
    };
    if let Some(text) = &args.structure {
        let v: Value = serde_json::from_str(text)
            .or_else(|_| serde_json::from_value(Value::String(text.clone())))
            .map_err(InstanceError::from)?;
        config.structure = decode_structure(&v)?;
    }
    if let Some(k) = args.k {
        config.k = k;
    }
    if let Some(cap) = args.size_cap {
        config.size_cap = cap;
    }
    if let Some(r) = args.value_range {
        config.value_range = r;
    }
    if let Some(mode) = args.mode {
        config.mode = match mode {
            ModeArg::Exhaustive => HuntMode::Exhaustive,
            ModeArg::Random => HuntMode::Random,
        };
    }
    config.seed = args.seed;
    config.instance_budget = args.budget;
    config.log_path = args.log.clone();
    config.checkpoint_path = args.checkpoint.clone();
    config.stop_on_violation = !args.keep_going;
    config.start_index = match (&args.checkpoint, args.resume) {
        (Some(p), true) => search::read_checkpoint(p)?,
        _ => args.start_index.unwrap_or(0),
    };
    let summary = search::run_hunt(&config)?;
    let code = if summary.found_violation() {
        EXIT_FINDING
    } else {
        EXIT_OK
    };
    Ok(Outcome::ok(code, format!("{}\n", summary.to_json())))
}

/// Fixed examples with known exact answers.
type Case = (&'static str, fn() -> CliResult<bool>);

const Z: AmbientStructure = AmbientStructure::Integers;

fn ints(values: &[i64]) -> FiniteSet {
    FiniteSet::integers(values)
}

fn selftest_cases() -> Vec<Case> {
    let mut cases: Vec<Case> = Vec::new();

    cases.push(("iterated sums of {0,1,3}", || {
        let a = ints(&[0, 1, 3]);
        let two = sumset(&Z, &[a.clone(), a.clone()])?.len();
        let three = sumset(&Z, &[a.clone(), a.clone(), a.clone()])?.len();
        let (report, _) = theorems::verify_superadditivity(&[a.clone(), a.clone(), a])?;
        Ok(two == 6 && three == 9 && report.holds)
    }));
    cases.push(("superadditivity and submultiplicativity on {0,2},{0,1},{0,3}", || {
        let sets = [ints(&[0, 2]), ints(&[0, 1]), ints(&[0, 3])];
        let (sup, w) = theorems::verify_superadditivity(&sets)?;
        let sub = theorems::verify_submultiplicativity(&Z, &sets)?;
        Ok(sup.holds
            && w.marked_count() == 11
            && sub.lhs == crate::report::int(49)
            && sub.rhs == crate::report::int(64))
    }));
    cases.push(("projection equality on {0,1}^3", || {
        let pts: Vec<Vec<i64>> = (0..8).map(|m| (0..3).map(|b| (m >> b) & 1).collect()).collect();
        let refs: Vec<&[i64]> = pts.iter().map(Vec::as_slice).collect();
        let r = theorems::verify_projection_lemma(&FiniteSet::lattice(3, &refs)?)?;
        Ok(r.holds && r.is_equality())
    }));
    cases.push(("Cauchy-Davenport in Z/7", || {
        let a = FiniteSet::residues(7, &[0, 1, 2])?;
        let b = FiniteSet::residues(7, &[0, 3])?;
        Ok(theorems::cauchy_davenport_check(7, &a, &b)?.holds)
    }));
    cases.push(("restricted three-sum", || {
        let b = ints(&[0, 1]);
        Ok(theorems::verify_restricted_three_sum(&Z, &ints(&[0, 1]), &b, &b, &ints(&[0, 2]))?.holds)
    }));
    cases.push(("graph family for n = 120 fails the graph inequality", || {
        let s = theorems::greedy_family_set(120, 6)?;
        let fam = theorems::build_graph_counterexample(120, &s)?;
        Ok(fam.pair_sums.len() == 6 && fam.triple_sums.len() >= 20 && !fam.report.holds)
    }));
    cases.push(("tensor identity", || {
        Ok(theorems::tensor_power_identity_check(
            &Z,
            &ints(&[0, 1, 3]),
            &ints(&[0, 2]),
            2,
        )?)
    }));
    cases.push(("Plunnecke witness", || {
        let w = theorems::find_plunnecke_subset(&ints(&[0, 1, 2, 5]), &ints(&[0, 1]), 1, 2)?;
        Ok(w.report.holds && !w.x_set.is_empty())
    }));
    cases.push(("question 2 example", || {
        let b = ints(&[0, 1]);
        let r = search::eval_question2(&ints(&[0, 1]), &[b.clone(), b.clone(), b], &ints(&[0, 3]))?;
        Ok(r.lhs == BigInt::from(64) && r.rhs == BigInt::from(128))
    }));
    cases.push(("question 1 on S3 is refused in Z", || {
        let a = ints(&[0]);
        Ok(search::eval_question1(&Z, &[a.clone(), a.clone(), a]).is_err())
    }));
    cases
}

fn selftest() -> Outcome {
    let mut out = String::new();
    let mut failed = 0;
    for (name, case) in selftest_cases() {
        match case() {
            Ok(true) => out.push_str(&format!("PASS {name}\n")),
            Ok(false) => {
                failed += 1;
                out.push_str(&format!("FAIL {name}\n"));
            }
            Err(e) => {
                failed += 1;
                out.push_str(&format!("FAIL {name}: {e}\n"));
            }
        }
    }
    out.push_str(&format!("{failed} failed\n"));
    Outcome::ok(if failed == 0 { EXIT_OK } else { EXIT_USAGE }, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_inequality_lists_names() {
        let out = run(["verify", "--instance", "/nonexistent.json", "--inequality", "nope"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stderr.contains("superadd-tf"));
    }

    #[test]
    fn every_name_dispatches() {
        let inst = Instance::parse(r#"{"structure": "Z", "sets": []}"#).unwrap();
        for name in INEQUALITIES {
            assert!(!matches!(dispatch(&inst, name), Err(CliError::Usage(m)) if m.starts_with("unknown")));
        }
    }

    #[test]
    fn selftest_passes() {
        let out = run(["selftest"]);
        assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    }

    #[test]
    fn bad_flags_are_usage_errors() {
        assert_eq!(run(["verify"]).code, EXIT_USAGE);
        assert_eq!(run(["frobnicate"]).code, EXIT_USAGE);
        assert_eq!(run(["--help"]).code, EXIT_OK);
    }
}

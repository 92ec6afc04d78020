//! Command-line front end: generate source problems, build gadget instances,
//! run the exact solvers, and run the verification suites.
//!
//! Exit codes: 0 success, 2 bad input or precondition, 3 infeasible,
//! 4 budget exceeded, 5 verification failure.

mod formats;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bicrit_core::exact::{
    brute_force_permutations, decision_constraint, solve_constraint, solve_lex_tmax_then_u,
    solve_lex_u_then_tmax, solve_weighted_sum, Budget, ObjectiveSpec, OptResult,
};
use bicrit_core::lemma_lab::{
    check_strong_identities, compare_strong, compare_weak, random_applicable_weak_candidate,
    random_monotone_strong_candidate, random_strong_candidate, strong_canonical, sweep_strong,
    sweep_weak, weak_canonical, DiscrepancyReport, SweepError,
};
use bicrit_core::reductions::sources::{partition_answer, planted_partition, planted_three_partition, random_source, three_partition_answer};
use bicrit_core::reductions::{
    gen_apriori_scaled, gen_lex_gadget, gen_strong, gen_weak, strong_candidate_from_partition,
    strong_extract_partition, weak_candidate_from_subset, weak_extract_subset, ReductionMeta,
};
use bicrit_core::sched_core::{evaluate, Time, Variant};

use formats::{
    read_instance, read_json, write_json, BudgetManifest, RoundTripReport, RunManifest, SolutionFile,
    SourceFile, SweepReport, VerifyReport,
};

const RNG_ID: &str = "chacha8";

#[derive(Parser)]
#[command(name = "bicrit", version, about = "Single-machine bicriteria scheduling toolkit")]
struct Cli {
    /// Write a reproducibility manifest to this path.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a Partition or 3-Partition source problem.
    GenSource(GenSourceArgs),
    /// Build a scheduling instance from a source problem or another instance.
    Reduce(ReduceArgs),
    /// Run an exact solver on an instance.
    Solve(SolveArgs),
    /// Run a verification suite against an instance's reduction metadata.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceKind {
    Partition,
    Threepartition,
}

#[derive(Args)]
struct GenSourceArgs {
    #[arg(long, value_enum)]
    kind: SourceKind,
    /// Element count; planted 3-Partition derives it from the group sizes.
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Group count for 3-Partition.
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Elements are drawn from 1..=value-max.
    #[arg(long, default_value_t = 9)]
    value_max: i64,
    /// Plant a solution and write it to a sidecar file.
    #[arg(long)]
    planted: bool,
    /// Force exactly three elements per planted group.
    #[arg(long)]
    strict_3partition: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReduceKind {
    Strong,
    Weak,
    Lexgadget,
    Apriori,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, value_enum)]
    kind: ReduceKind,
    /// Source-problem file (strong, weak) or instance file (lexgadget, apriori).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Tardiness bound for the lexgadget reduction.
    #[arg(long)]
    ell: Option<i64>,
    /// Tardy-count weight for the apriori reduction.
    #[arg(long)]
    weight: Option<i64>,
    /// Reject 3-Partition inputs whose element count is not three per group.
    #[arg(long)]
    strict_3partition: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveVariant {
    Constraint,
    Decision,
    LexTu,
    LexUt,
    Weighted,
    Brute,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Defaults to the variant recorded in the instance.
    #[arg(long, value_enum)]
    variant: Option<SolveVariant>,
    #[arg(long)]
    ell: Option<i64>,
    #[arg(long)]
    k: Option<i64>,
    #[arg(long)]
    w1: Option<i64>,
    #[arg(long)]
    w2: Option<i64>,
    #[arg(long)]
    budget_subsets: Option<u64>,
    #[arg(long)]
    budget_perms: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Lemmas,
    Sweep,
    Roundtrip,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    /// Planted-solution sidecar for the roundtrip suite.
    #[arg(long)]
    solution: Option<PathBuf>,
    #[arg(long)]
    budget_candidates: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// What one command hands back for the manifest and the exit code.
struct Outcome {
    code: i32,
    summary: String,
    seed: Option<u64>,
    budget: Budget,
    inputs: Vec<String>,
    outputs: Vec<String>,
}

impl Outcome {
    fn new(code: i32, summary: impl Into<String>) -> Outcome {
        Outcome {
            code,
            summary: summary.into(),
            seed: None,
            budget: Budget::default(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let manifest_path = cli.manifest.clone();
    match run(cli) {
        Ok(outcome) => {
            if let Some(path) = manifest_path {
                let manifest = RunManifest {
                    command: argv,
                    rng: RNG_ID,
                    seed: outcome.seed,
                    budgets: BudgetManifest {
                        subsets: outcome.budget.max_subsets,
                        perms: outcome.budget.max_perms,
                        candidates: outcome.budget.max_candidates,
                    },
                    inputs: outcome.inputs.clone(),
                    outputs: outcome.outputs.clone(),
                    wall_ms: started.elapsed().as_millis(),
                    summary: outcome.summary.clone(),
                };
                if let Err(e) = write_json(&path, &manifest) {
                    eprintln!("warning: cannot write manifest: {e:#}");
                }
            }
            println!("{}", outcome.summary);
            std::process::exit(outcome.code);
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::GenSource(args) => gen_source(args),
        Command::Reduce(args) => reduce(args),
        Command::Solve(args) => solve(args),
        Command::Verify(args) => verify(args),
    }
}

fn gen_source(args: GenSourceArgs) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let value_max = args.value_max as Time;
    let (source, solution) = match (args.kind, args.planted) {
        (SourceKind::Partition, true) => {
            let (a, subset) = planted_partition(args.n, value_max, &mut rng)?;
            let complement: Vec<u32> = (1..=a.len() as u32).filter(|i| !subset.contains(i)).collect();
            (
                SourceFile { kind: "partition".into(), a, m: None },
                Some(SolutionFile { groups: vec![subset.into_iter().collect(), complement] }),
            )
        }
        (SourceKind::Partition, false) => {
            let a = random_source(args.n, 2, value_max, &mut rng)?;
            (SourceFile { kind: "partition".into(), a, m: None }, None)
        }
        (SourceKind::Threepartition, true) => {
            let (a, groups) = planted_three_partition(args.m, value_max, args.strict_3partition, &mut rng)?;
            (
                SourceFile { kind: "threepartition".into(), a, m: Some(args.m) },
                Some(SolutionFile { groups }),
            )
        }
        (SourceKind::Threepartition, false) => {
            let a = random_source(args.n, args.m, value_max, &mut rng)?;
            (SourceFile { kind: "threepartition".into(), a, m: Some(args.m) }, None)
        }
    };
    write_json(&args.out, &source)?;
    let mut outputs = vec![args.out.display().to_string()];
    if let Some(sol) = &solution {
        let sidecar = args.out.with_extension("solution.json");
        write_json(&sidecar, sol)?;
        outputs.push(sidecar.display().to_string());
    }
    let mut outcome =
        Outcome::new(0, format!("generated {} with {} elements", source.kind, source.a.len()));
    outcome.seed = Some(args.seed);
    outcome.outputs = outputs;
    Ok(outcome)
}

fn reduce(args: ReduceArgs) -> Result<Outcome> {
    let input_label = args.input.display().to_string();
    let (instance, summary) = match args.kind {
        ReduceKind::Strong => {
            let source: SourceFile = read_json(&args.input)?;
            let m = source.m.ok_or_else(|| anyhow!("source file carries no group count"))?;
            if args.strict_3partition && source.a.len() != 3 * m as usize {
                bail!("strict mode requires exactly {} elements, got {}", 3 * m, source.a.len());
            }
            let (inst, meta) = gen_strong(&source.a, m)?;
            let s = format!("strong gadget: {} jobs, ell={}, k={}", inst.len(), meta.bound, meta.tardy_target);
            (inst, s)
        }
        ReduceKind::Weak => {
            let source: SourceFile = read_json(&args.input)?;
            let (inst, meta) = gen_weak(&source.a)?;
            let s = format!("weak gadget: {} jobs, ell={}, k={}", inst.len(), meta.bound, meta.tardy_target);
            (inst, s)
        }
        ReduceKind::Lexgadget => {
            let base = read_instance(&args.input)?;
            let ell = args.ell.ok_or_else(|| anyhow!("--ell is required for the lexgadget reduction"))? as Time;
            let inst = gen_lex_gadget(&base, ell)?;
            let s = format!("lex gadget: {} jobs, pinned minimum tardiness {}", inst.len(), ell);
            (inst, s)
        }
        ReduceKind::Apriori => {
            let base = read_instance(&args.input)?;
            let weight =
                args.weight.ok_or_else(|| anyhow!("--weight is required for the apriori reduction"))? as Time;
            let inst = gen_apriori_scaled(&base, weight)?;
            let s = format!("scaled instance: {} jobs, weights (1, {})", inst.len(), weight);
            (inst, s)
        }
    };
    write_json(&args.output, &instance)?;
    let mut outcome = Outcome::new(0, summary);
    outcome.inputs = vec![input_label];
    outcome.outputs = vec![args.output.display().to_string()];
    Ok(outcome)
}

fn budget_from(subsets: Option<u64>, perms: Option<u64>, candidates: Option<u64>) -> Budget {
    let mut b = Budget::default();
    if let Some(s) = subsets {
        b.max_subsets = s;
    }
    if let Some(p) = perms {
        b.max_perms = p;
    }
    if let Some(c) = candidates {
        b.max_candidates = c;
    }
    b
}

fn solve(args: SolveArgs) -> Result<Outcome> {
    let instance = read_instance(&args.input)?;
    let budget = budget_from(args.budget_subsets, args.budget_perms, None);
    let variant = args.variant.or(match instance.variant {
        Variant::ConstraintDecision { .. } => Some(SolveVariant::Decision),
        Variant::ConstraintOpt { .. } => Some(SolveVariant::Constraint),
        Variant::LexTmaxThenU => Some(SolveVariant::LexTu),
        Variant::LexUThenTmax => Some(SolveVariant::LexUt),
        Variant::WeightedSum { .. } => Some(SolveVariant::Weighted),
        Variant::None => None,
    });
    let variant = variant.ok_or_else(|| anyhow!("instance has no variant; pass --variant"))?;

    let ell_param = || -> Result<Time> {
        if let Some(e) = args.ell {
            return Ok(e as Time);
        }
        match instance.variant {
            Variant::ConstraintDecision { ell, .. } | Variant::ConstraintOpt { ell } => Ok(ell),
            _ => bail!("no tardiness bound available; pass --ell"),
        }
    };

    // The decision variant answers with a boolean instead of a schedule.
    if variant == SolveVariant::Decision {
        let ell = ell_param()?;
        let k = match (args.k, instance.variant) {
            (Some(k), _) => k as Time,
            (None, Variant::ConstraintDecision { k, .. }) => k,
            _ => bail!("no tardy target available; pass --k"),
        };
        return match decision_constraint(&instance, ell, k, &budget) {
            Ok(answer) => {
                if let Some(out) = &args.out {
                    write_json(out, &serde_json::json!({ "answer": answer }))?;
                }
                let mut outcome = Outcome::new(0, format!("decision: {answer}"));
                outcome.budget = budget;
                outcome.inputs = vec![args.input.display().to_string()];
                outcome.outputs = args.out.iter().map(|p| p.display().to_string()).collect();
                Ok(outcome)
            }
            Err(result) => finish_solve(&args, budget, result),
        };
    }

    let result = match variant {
        SolveVariant::Constraint => solve_constraint(&instance, ell_param()?, &budget),
        SolveVariant::LexTu => solve_lex_tmax_then_u(&instance, &budget),
        SolveVariant::LexUt => solve_lex_u_then_tmax(&instance, &budget),
        SolveVariant::Weighted => {
            let (w1, w2) = match (args.w1, args.w2, instance.variant) {
                (Some(w1), Some(w2), _) => (w1 as Time, w2 as Time),
                (None, None, Variant::WeightedSum { w1, w2 }) => (w1, w2),
                _ => bail!("pass both --w1 and --w2 (or use an instance with weights)"),
            };
            solve_weighted_sum(&instance, w1, w2, &budget)
        }
        SolveVariant::Brute => {
            let spec = match instance.variant {
                Variant::ConstraintDecision { ell, .. } | Variant::ConstraintOpt { ell } => {
                    ObjectiveSpec::Constraint { ell }
                }
                Variant::LexTmaxThenU => ObjectiveSpec::LexTmaxThenU,
                Variant::LexUThenTmax => ObjectiveSpec::LexUThenTmax,
                Variant::WeightedSum { w1, w2 } => ObjectiveSpec::WeightedSum { w1, w2 },
                Variant::None => match (args.ell, args.w1, args.w2) {
                    (Some(ell), _, _) => ObjectiveSpec::Constraint { ell: ell as Time },
                    (None, Some(w1), Some(w2)) => ObjectiveSpec::WeightedSum { w1: w1 as Time, w2: w2 as Time },
                    _ => ObjectiveSpec::LexTmaxThenU,
                },
            };
            brute_force_permutations(&instance, &spec, &budget)
        }
        SolveVariant::Decision => unreachable!("handled above"),
    };
    let mut outcome = finish_solve(&args, budget, result)?;
    outcome.inputs = vec![args.input.display().to_string()];
    Ok(outcome)
}

fn finish_solve(args: &SolveArgs, budget: Budget, result: OptResult) -> Result<Outcome> {
    if let Some(out) = &args.out {
        write_json(out, &result)?;
    }
    let (code, summary) = match &result {
        OptResult::Optimal(r) => (
            0,
            format!(
                "optimal: tmax={}, num_tardy={}, objective={}, explored={}",
                r.tmax, r.num_tardy, r.objective, r.explored
            ),
        ),
        OptResult::Infeasible { explored } => (3, format!("infeasible (explored {explored})")),
        OptResult::BudgetExceeded { explored } => (4, format!("budget exceeded after {explored}")),
    };
    let mut outcome = Outcome::new(code, summary);
    outcome.budget = budget;
    outcome.outputs = args.out.iter().map(|p| p.display().to_string()).collect();
    Ok(outcome)
}

fn verify(args: VerifyArgs) -> Result<Outcome> {
    let instance = read_instance(&args.input)?;
    let meta = instance
        .meta
        .clone()
        .ok_or_else(|| anyhow!("instance carries no reduction metadata; nothing to verify"))?;
    let budget = budget_from(None, None, args.budget_candidates);
    let mut report = VerifyReport {
        suite: format!("{:?}", args.suite).to_lowercase(),
        input: args.input.display().to_string(),
        seed: None,
        samples: 0,
        skipped: 0,
        jobs_compared: 0,
        flags_compared: 0,
        identities_checked: 0,
        identity_failures: Vec::new(),
        mismatches: Vec::new(),
        feasibility_mismatches: Vec::new(),
        sweep: None,
        roundtrip: None,
        ok: true,
    };

    match (args.suite, &meta) {
        (Suite::Identities, ReductionMeta::Strong3p(meta)) => {
            let r = check_strong_identities(&instance, meta);
            absorb_into(&mut report, r);
        }
        (Suite::Lemmas, ReductionMeta::Strong3p(meta)) => {
            report.seed = Some(args.seed);
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            for k in 0..args.samples {
                let cand = if k % 2 == 0 {
                    random_strong_candidate(meta.n, meta.m, &mut rng)
                } else {
                    random_monotone_strong_candidate(meta.n, meta.m, &mut rng)
                };
                absorb_into(&mut report, compare_strong(&instance, meta, &cand));
                report.samples += 1;
            }
        }
        (Suite::Lemmas, ReductionMeta::WeakPart(meta)) => {
            report.seed = Some(args.seed);
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            for _ in 0..args.samples {
                let cand = random_applicable_weak_candidate(meta, &mut rng);
                absorb_into(&mut report, compare_weak(&instance, meta, &cand));
                report.samples += 1;
            }
        }
        (Suite::Sweep, ReductionMeta::Strong3p(meta)) => match sweep_strong(&instance, meta, &budget) {
            Ok(sweep) => {
                let mut sr = SweepReport::from(&sweep);
                if let Some(witness) = &sweep.witness {
                    match strong_extract_partition(meta, witness) {
                        Ok(groups) => {
                            sr.witness_groups =
                                Some(groups.into_iter().map(|g| g.into_iter().collect()).collect())
                        }
                        Err(e) => {
                            report.ok = false;
                            eprintln!("witness fails to extract: {e:?}");
                        }
                    }
                }
                report.sweep = Some(sr);
            }
            Err(SweepError::BudgetExceeded { required, budget }) => {
                exit_with(4, format!("sweep needs {required} candidates, budget is {budget}"));
            }
        },
        (Suite::Sweep, ReductionMeta::WeakPart(meta)) => match sweep_weak(&instance, meta, &budget) {
            Ok(sweep) => {
                if let Some(err) = &sweep.extraction_error {
                    report.ok = false;
                    eprintln!("witness fails to extract: {err:?}");
                }
                report.sweep = Some(SweepReport::from(&sweep));
            }
            Err(SweepError::BudgetExceeded { required, budget }) => {
                exit_with(4, format!("sweep needs {required} candidates, budget is {budget}"));
            }
        },
        (Suite::Roundtrip, ReductionMeta::Strong3p(meta)) => {
            let (groups, source): (Vec<Vec<u32>>, String) = match &args.solution {
                Some(path) => (read_json::<SolutionFile>(path)?.groups, "sidecar".into()),
                None => {
                    if meta.a.len() > 12 {
                        bail!("no sidecar solution and the instance is too large to search");
                    }
                    match three_partition_answer(&meta.a, meta.m) {
                        Some(g) => (g, "search".into()),
                        None => bail!("the source is a no-instance; nothing to round-trip"),
                    }
                }
            };
            let cand = strong_candidate_from_partition(meta, &groups)?;
            let sched = strong_canonical(&instance, meta, &cand);
            let ev = evaluate(&instance, &sched).context("candidate schedule")?;
            let extraction = strong_extract_partition(meta, &cand);
            let rt = RoundTripReport {
                solution_source: source,
                tardy_ok: ev.num_tardy as Time == meta.tardy_target,
                bound_ok: ev.tmax <= meta.bound,
                extraction_ok: extraction.is_ok(),
            };
            report.ok &= rt.tardy_ok && rt.bound_ok && rt.extraction_ok;
            report.roundtrip = Some(rt);
        }
        (Suite::Roundtrip, ReductionMeta::WeakPart(meta)) => {
            let (subset, source): (BTreeSet<u32>, String) = match &args.solution {
                Some(path) => {
                    let sol: SolutionFile = read_json(path)?;
                    let first = sol.groups.first().ok_or_else(|| anyhow!("empty solution file"))?;
                    (first.iter().copied().collect(), "sidecar".into())
                }
                None => {
                    if meta.a.len() > 20 {
                        bail!("no sidecar solution and the instance is too large to search");
                    }
                    match partition_answer(&meta.a) {
                        Some(s) => (s, "search".into()),
                        None => bail!("the source is a no-instance; nothing to round-trip"),
                    }
                }
            };
            let cand = weak_candidate_from_subset(meta, &subset)?;
            let sched = weak_canonical(&instance, meta, &cand);
            let ev = evaluate(&instance, &sched).context("candidate schedule")?;
            let extraction = weak_extract_subset(meta, &cand);
            let rt = RoundTripReport {
                solution_source: source,
                tardy_ok: ev.num_tardy as Time == meta.tardy_target,
                bound_ok: ev.tmax <= meta.bound,
                extraction_ok: extraction.as_ref().map(|s| *s == subset).unwrap_or(false),
            };
            report.ok &= rt.tardy_ok && rt.bound_ok && rt.extraction_ok;
            report.roundtrip = Some(rt);
        }
        (suite, meta) => {
            bail!(
                "suite {suite:?} does not apply to {} metadata",
                match meta {
                    ReductionMeta::Strong3p(_) => "strong-gadget",
                    ReductionMeta::WeakPart(_) => "weak-gadget",
                    ReductionMeta::LexGadget(_) => "lex-gadget",
                    ReductionMeta::Apriori(_) => "scaling",
                }
            );
        }
    }

    report.ok &= report.identity_failures.is_empty()
        && report.mismatches.is_empty()
        && report.feasibility_mismatches.is_empty();
    let code = if report.ok { 0 } else { 5 };
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    let mut outcome = Outcome::new(
        code,
        format!(
            "verify {}: {} ({} samples, {} jobs compared, {} identities, {} findings)",
            report.suite,
            if report.ok { "ok" } else { "FAILED" },
            report.samples,
            report.jobs_compared,
            report.identities_checked,
            report.identity_failures.len() + report.mismatches.len() + report.feasibility_mismatches.len(),
        ),
    );
    outcome.seed = report.seed;
    outcome.budget = budget;
    outcome.inputs = vec![args.input.display().to_string()];
    outcome.outputs = args.out.iter().map(|p| p.display().to_string()).collect();
    Ok(outcome)
}

fn absorb_into(report: &mut VerifyReport, r: DiscrepancyReport) {
    report.skipped += r.skipped;
    report.jobs_compared += r.jobs_compared;
    report.flags_compared += r.flags_compared;
    report.identities_checked += r.identities_checked;
    report.identity_failures.extend(r.identity_failures);
    report.mismatches.extend(r.mismatches);
    report.feasibility_mismatches.extend(r.feasibility_mismatches);
}

/// Immediate exit for conditions with a dedicated code (not input errors).
fn exit_with(code: i32, message: String) -> ! {
    eprintln!("{message}");
    std::process::exit(code);
}

//! framelab: command-line front door for the finite-frame certifiers.
//! Parses vector/subspace files, dispatches to the deciders and
//! constructors, and emits deterministic JSON reports. Exit codes: 0 when
//! the property holds or the construction succeeded, 1 when it fails (a
//! witness is emitted), 2 on usage or parse errors, 3 when a budgeted
//! search was inconclusive.

mod input;

use clap::{Parser, Subcommand};
use framecore::augment;
use framecore::cert::Decision;
use framecore::error::Error;
use framecore::fixtures;
use framecore::frame::VectorFamily;
use framecore::naimark::{self, Completion};
use framecore::phase::{self, SearchConfig};
use framecore::projections;
use framecore::random::rng_from_seed;
use framecore::spark::{self, ScanPolicy};
use framecore::tol::{Field, Mode, ToleranceConfig};
use input::{canonical_echo, digest_of, parse_input, read_source, ParsedInput};
use rand::Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "framelab", version, about = "Finite-frame certifiers: spark, complement property, Naimark complements, phase and norm retrieval, constructive augmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Force exact rational decisions (the default).
    #[arg(long, global = true)]
    exact: bool,

    /// Use tolerance-guarded floating ranks for the subset decisions.
    #[arg(long, global = true, conflicts_with = "exact")]
    float: bool,

    /// Rank tolerance; the orthogonality and witness tolerances scale as
    /// 0.1x and 10x of this value.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for every randomized search or construction.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Draw/attempt budget for randomized constructions.
    #[arg(long, global = true, default_value_t = 1000)]
    budget: usize,

    /// Lift the subset-scan size guard (scans grow exponentially).
    #[arg(long, global = true)]
    force: bool,

    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,

    /// Compact JSON output (the default).
    #[arg(long, global = true)]
    json: bool,

    /// Include wall-clock timing in the report. Off by default so that
    /// reports are byte-identical across runs with the same seed.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Frame bounds, Parseval check, and Riesz bounds when M = N.
    Analyze { input: String },
    /// Spark of the family (smallest dependent subset size).
    Spark { input: String },
    /// Complement property scan.
    Cp { input: String },
    /// Complement deficiency: minimal additions needed for the property.
    Deficiency { input: String },
    /// Phase retrieval for a vector family.
    PrVectors {
        input: String,
        /// Apply an invertible operator (JSON {"operator": [[...]]}) first.
        #[arg(long)]
        transform: Option<String>,
    },
    /// Phase retrieval for a subspace family.
    PrSubspaces {
        input: String,
        #[arg(long)]
        transform: Option<String>,
        /// Multistart budget of the residual search.
        #[arg(long, default_value_t = 200)]
        starts: usize,
    },
    /// Norm retrieval (vector or subspace input).
    NormRetrieval {
        input: String,
        #[arg(long, default_value_t = 200)]
        starts: usize,
    },
    /// Naimark complement of a Parseval frame, with pair verification.
    Naimark {
        input: String,
        /// Complete the isometry from seeded random draws instead of the
        /// deterministic residual pivoting.
        #[arg(long)]
        randomized_completion: bool,
    },
    /// Add the minimal number of vectors to reach the complement property.
    Augment { input: String },
    /// Direct-sum completion of two phase-retrieving families.
    DirectSum { first: String, second: String },
    /// Construct a projection making a Riesz basis full spark on its range.
    FspProject {
        input: String,
        #[arg(long)]
        rank: usize,
        /// Also require the complementary dual-basis range to retrieve.
        #[arg(long)]
        dual_pair: bool,
    },
    /// Scan the non-spanning partitions and their hyperplane structure.
    Hyperplanes { input: String },
    /// Reconstruct a vector of R^3 from its six demo projection norms.
    ReconstructDemo {
        /// Comma-separated coordinates of x (default: seeded random).
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Comma-separated six norms, bypassing the forward map.
        #[arg(long)]
        norms: Option<String>,
    },
    /// Run every bundled reference fixture and check the expected verdicts.
    FixtureSuite,
}

fn main() -> std::process::ExitCode {
    if let Ok(threads) = std::env::var("FRAMELAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon_pool(n);
        }
    }
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    match run(&cli) {
        Ok((mut report, code)) => {
            if cli.timings {
                report["timing_s"] = json!(started.elapsed().as_secs_f64());
            }
            let rendered = if cli.pretty {
                serde_json::to_string_pretty(&report).expect("report serializes")
            } else {
                serde_json::to_string(&report).expect("report serializes")
            };
            println!("{rendered}");
            std::process::ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::from(error_code(&e))
        }
    }
}

fn rayon_pool(n: usize) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::DimensionMismatch(_)
        | Error::ZeroVector(_)
        | Error::ScanTooLarge { .. }
        | Error::PreconditionRange { .. }
        | Error::TooFewVectors { .. }
        | Error::ComplexNotSupported
        | Error::NotABasis
        | Error::NotRieszBasis => 2,
        Error::CandidateBudgetExhausted(_) | Error::ConstructionBudgetExhausted(_) => 3,
        _ => 1,
    }
}

fn decision_code(d: Decision) -> u8 {
    match d {
        Decision::PassExact | Decision::PassBudgeted => 0,
        Decision::Fail => 1,
        Decision::Inconclusive => 3,
    }
}

struct Ctx {
    tol: ToleranceConfig,
    policy: ScanPolicy,
    seed: u64,
    budget: usize,
    arithmetic_mode: &'static str,
}

fn context(cli: &Cli) -> Result<Ctx, Error> {
    let tol = match cli.tol {
        Some(t) if t > 0.0 => ToleranceConfig::from_rank_tol(t),
        Some(_) => {
            return Err(Error::Parse("--tol must be strictly positive".into()));
        }
        None => ToleranceConfig::default(),
    };
    tol.validate()?;
    let policy = ScanPolicy {
        force: cli.force,
        float_ranks: cli.float.then_some(tol),
    };
    Ok(Ctx {
        tol,
        policy,
        seed: cli.seed,
        budget: cli.budget,
        arithmetic_mode: if cli.float { "float" } else { "exact" },
    })
}

fn load(path: &str) -> Result<ParsedInput, Error> {
    parse_input(&read_source(path)?)
}

fn vectors(input: ParsedInput) -> Result<VectorFamily, Error> {
    match input {
        ParsedInput::Vectors(f) => Ok(f),
        other => Err(Error::Parse(format!(
            "expected a vector family, got {}",
            other.kind()
        ))),
    }
}

fn report_for(command: &str, ctx: &Ctx, echo: Value, result: Value) -> Value {
    json!({
        "command": command,
        "input_digest": digest_of(&echo),
        "input": echo,
        "arithmetic_mode": ctx.arithmetic_mode,
        "seed": ctx.seed,
        "result": result,
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("outcome serializes")
}

fn run(cli: &Cli) -> Result<(Value, u8), Error> {
    let ctx = context(cli)?;
    match &cli.command {
        Command::Analyze { input } => {
            let parsed = load(input)?;
            let f = vectors(parsed)?;
            let echo = canonical_echo(&ParsedInput::Vectors(f.clone()));
            let bounds = f.frame_bounds(&ctx.tol);
            let mut result = json!({
                "m": f.len(),
                "dim": f.ambient(),
                "field": match f.field() { Field::Real => "real", Field::Complex => "complex" },
                "mode": match f.mode() { Mode::Exact => "exact", Mode::Float => "float" },
                "is_frame": bounds.is_frame,
                "lower_bound": bounds.lower.value,
                "upper_bound": bounds.upper.value,
                "parseval": f.is_parseval(&ctx.tol),
            });
            if let Some(e) = &bounds.lower.enclosure {
                result["lower_enclosure"] = json!([
                    framecore::scalar::q_display(&e.lo),
                    framecore::scalar::q_display(&e.hi)
                ]);
            }
            if let Some(e) = &bounds.upper.enclosure {
                result["upper_enclosure"] = json!([
                    framecore::scalar::q_display(&e.lo),
                    framecore::scalar::q_display(&e.hi)
                ]);
            }
            if f.len() == f.ambient() && f.field() == Field::Real {
                if let Ok((lo, hi)) = f.riesz_bounds(&ctx.tol) {
                    result["riesz_bounds"] = json!([lo.value, hi.value]);
                }
            }
            Ok((report_for("analyze", &ctx, echo, result), 0))
        }
        Command::Spark { input } => {
            let f = vectors(load(input)?)?;
            let echo = canonical_echo(&ParsedInput::Vectors(f.clone()));
            let out = spark::spark(&f, &ctx.policy)?;
            let code = if out.full_spark { 0 } else { 1 };
            Ok((report_for("spark", &ctx, echo, to_value(&out)), code))
        }
        Command::Cp { input } => {
            let f = vectors(load(input)?)?;
            let echo = canonical_echo(&ParsedInput::Vectors(f.clone()));
            let out = spark::check_complement_property(&f, &ctx.policy)?;
            let code = if out.holds { 0 } else { 1 };
            Ok((report_for("cp", &ctx, echo, to_value(&out)), code))
        }
        Command::Deficiency { input } => {
            let f = vectors(load(input)?)?;
            let echo = canonical_echo(&ParsedInput::Vectors(f.clone()));
            let out = spark::complement_deficiency(&f, &ctx.policy)?;
            let code = if out.k == 0 { 0 } else { 1 };
            let mut result = to_value(&out);
            if out.k == 0 {
                // Witnesses accompany failing verdicts only.
                result.as_object_mut().map(|o| o.remove("witness"));
            }
            Ok((report_for("deficiency", &ctx, echo, result), code))
        }
        Command::PrVectors { input, transform } => {
            let mut f = vectors(load(input)?)?;
            if let Some(path) = transform {
                let op = operator(load(path)?)?;
                f = phase::apply_invertible_vectors(&f, &op)?;
            }
            let echo = canonical_echo(&ParsedInput::Vectors(f.clone()));
            let out = match f.field() {
                Field::Real => phase::pr_vectors_real(&f, &ctx.policy)?,
                Field::Complex => phase::pr_vectors_complex_necessary(&f, &ctx.policy)?,
            };
            let code = decision_code(out.decision);
            Ok((report_for("pr-vectors", &ctx, echo, to_value(&out)), code))
        }
        Command::PrSubspaces {
            input,
            transform,
            starts,
        } => {
            let mut sf = match load(input)? {
                ParsedInput::Subspaces(sf) => sf,
                other => {
                    return Err(Error::Parse(format!(
                        "expected a subspace family, got {}",
                        other.kind()
                    )))
                }
            };
            if let Some(path) = transform {
                let op = operator(load(path)?)?;
                sf = sf.apply(&op)?;
            }
            let echo = canonical_echo(&ParsedInput::Subspaces(sf.clone()));
            let cfg = SearchConfig {
                starts: *starts,
                seed: ctx.seed,
                ..SearchConfig::default()
            };
            let out = phase::pr_subspaces_real(&sf, &cfg, &ctx.tol, &ctx.policy)?;
            let code = decision_code(out.decision);
            Ok((report_for("pr-subspaces", &ctx, echo, to_value(&out)), code))
        }
        Command::NormRetrieval { input, starts } => {
            let parsed = load(input)?;
            let echo = canonical_echo(&parsed);
            let out = match parsed {
                ParsedInput::Vectors(f) => phase::norm_retrieval_vectors_real(&f, &ctx.policy)?,
                ParsedInput::Subspaces(sf) => {
                    let cfg = SearchConfig {
                        starts: *starts,
                        seed: ctx.seed,
                        ..SearchConfig::default()
                    };
                    phase::norm_retrieval_subspaces_real(&sf, &cfg, &ctx.tol, &ctx.policy)?
                }
                ParsedInput::Operator(_) => {
                    return Err(Error::Parse(
                        "norm retrieval expects vectors or subspaces".into(),
                    ))
                }
            };
            let code = decision_code(out.decision);
            Ok((
                report_for("norm-retrieval", &ctx, echo, to_value(&out)),
                code,
            ))
        }
        Command::Naimark {
            input,
            randomized_completion,
        } => {
            let f = vectors(load(input)?)?;
            let echo = canonical_echo(&ParsedInput::Vectors(f.clone()));
            let completion = if *randomized_completion {
                Completion::Randomized(ctx.seed)
            } else {
                Completion::Deterministic
            };
            let out = naimark::naimark_complement(&f, &ctx.tol, completion)?;
            let pair = naimark::verify_naimark_pair(&f, &out.complement, &ctx.tol)?;
            let complement_echo =
                canonical_echo(&ParsedInput::Vectors(out.complement.clone()));
            let result = json!({
                "complement": complement_echo,
                "zero_complement": out.zero_complement,
                "converted_from_exact": out.converted_from_exact,
                "pair_certificate": to_value(&pair),
            });
            let code = if pair.pass { 0 } else { 1 };
            Ok((report_for("naimark", &ctx, echo, result), code))
        }
        Command::Augment { input } => {
            let f = vectors(load(input)?)?;
            let echo = canonical_echo(&ParsedInput::Vectors(f.clone()));
            let out = augment::augment_to_cp(&f, ctx.seed, ctx.budget, &ctx.policy)?;
            let added: Vec<Vec<String>> = out
                .added
                .iter()
                .map(|r| r.iter().map(framecore::scalar::q_display).collect())
                .collect();
            let mut result = to_value(&out);
            result["added"] = json!(added);
            Ok((report_for("augment", &ctx, echo, result), 0))
        }
        Command::DirectSum { first, second } => {
            let f1 = vectors(load(first)?)?;
            let f2 = vectors(load(second)?)?;
            let echo = json!({
                "first": canonical_echo(&ParsedInput::Vectors(f1.clone())),
                "second": canonical_echo(&ParsedInput::Vectors(f2.clone())),
            });
            let out = augment::direct_sum_augment(&f1, &f2, ctx.seed, ctx.budget, &ctx.policy)?;
            let added: Vec<Vec<String>> = out
                .added
                .iter()
                .map(|r| r.iter().map(framecore::scalar::q_display).collect())
                .collect();
            let result = json!({
                "added": added,
                "added_count": out.added.len(),
                "rounds": out.rounds,
                "cp_after": out.cp_after,
                "combined": canonical_echo(&ParsedInput::Vectors(out.combined.clone())),
            });
            Ok((report_for("direct-sum", &ctx, echo, result), 0))
        }
        Command::FspProject {
            input,
            rank,
            dual_pair,
        } => {
            let f = vectors(load(input)?)?;
            let echo = canonical_echo(&ParsedInput::Vectors(f.clone()));
            if *dual_pair {
                let out = projections::dual_pair_projection(
                    &f, *rank, ctx.seed, ctx.budget, &ctx.policy,
                )?;
                let result = json!({
                    "rank": out.range.dim(),
                    "attempts": out.attempts,
                    "range_basis": subspace_basis_echo(&out.range),
                    "primal": to_value(&out.primal),
                    "dual": to_value(&out.dual),
                });
                let ok = out.primal.decision.is_pass() && out.dual.decision.is_pass();
                Ok((
                    report_for("fsp-project", &ctx, echo, result),
                    if ok { 0 } else { 1 },
                ))
            } else {
                let out = projections::construct_full_spark_projection(
                    &f, *rank, ctx.seed, ctx.budget, &ctx.policy,
                )?;
                let result = json!({
                    "rank": out.range.dim(),
                    "attempts": out.attempts,
                    "range_basis": subspace_basis_echo(&out.range),
                    "projected_full_spark": out.projected_full_spark,
                    "retrieval_on_range": out.retrieval_on_range.as_ref().map(to_value),
                });
                Ok((
                    report_for("fsp-project", &ctx, echo, result),
                    if out.projected_full_spark { 0 } else { 1 },
                ))
            }
        }
        Command::Hyperplanes { input } => {
            let parsed = load(input)?;
            let echo = canonical_echo(&parsed);
            let (scan, blocked) = match parsed {
                ParsedInput::Vectors(f) => (
                    spark::hyperplane_partition_scan(&f, &ctx.policy)?,
                    spark::cp_blocked_forever_vectors(&f, &ctx.policy)?,
                ),
                ParsedInput::Subspaces(sf) => (
                    phase::hyperplane_scan_subspaces(&sf, &ctx.policy)?,
                    phase::cp_blocked_forever_subspaces(&sf, &ctx.policy)?,
                ),
                ParsedInput::Operator(_) => {
                    return Err(Error::Parse(
                        "hyperplane scan expects vectors or subspaces".into(),
                    ))
                }
            };
            let mut result = to_value(&scan);
            result["blocked"] = json!(blocked);
            let code = if scan.all_hyperplanes { 0 } else { 1 };
            Ok((report_for("hyperplanes", &ctx, echo, result), code))
        }
        Command::ReconstructDemo { x, norms } => {
            let (x_used, norm_values) = match (x, norms) {
                (_, Some(list)) => (None, parse_floats(list, 6)?),
                (Some(coords), None) => {
                    let x = parse_floats(coords, 3)?;
                    let n = phase::demo_projection_norms(&x);
                    (Some(x), n)
                }
                (None, None) => {
                    let mut rng = rng_from_seed(ctx.seed);
                    let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let n = phase::demo_projection_norms(&x);
                    (Some(x), n)
                }
            };
            let echo = json!({ "norms": norm_values });
            let (x_hat, branch) = phase::reconstruct_from_demo_norms(&norm_values, &ctx.tol)?;
            let mut result = json!({
                "norms": norm_values,
                "reconstructed": x_hat,
                "branch": to_value(&branch),
            });
            if let Some(x_true) = x_used {
                let plus: f64 = x_true
                    .iter()
                    .zip(&x_hat)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let minus: f64 = x_true
                    .iter()
                    .zip(&x_hat)
                    .map(|(a, b)| (a + b) * (a + b))
                    .sum::<f64>()
                    .sqrt();
                result["x"] = json!(x_true);
                result["round_trip_error"] = json!(plus.min(minus));
            }
            Ok((report_for("reconstruct-demo", &ctx, echo, result), 0))
        }
        Command::FixtureSuite => fixture_suite(&ctx),
    }
}

fn operator(parsed: ParsedInput) -> Result<framecore::qmat::QMat, Error> {
    match parsed {
        ParsedInput::Operator(t) => Ok(t),
        other => Err(Error::Parse(format!(
            "expected an operator file, got {}",
            other.kind()
        ))),
    }
}

fn subspace_basis_echo(w: &framecore::frame::Subspace) -> Value {
    Value::Array(
        w.ortho_rows()
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|q| json!(framecore::scalar::q_display(q)))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn parse_floats(list: &str, expect: usize) -> Result<Vec<f64>, Error> {
    let vals: Vec<f64> = list
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("cannot parse number {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    if vals.len() != expect {
        return Err(Error::Parse(format!(
            "expected {expect} values, got {}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn fixture_suite(ctx: &Ctx) -> Result<(Value, u8), Error> {
    let cfg = SearchConfig {
        starts: 200,
        seed: ctx.seed,
        ..SearchConfig::default()
    };
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut record = |name: &str, pass: bool| {
        println!("{} {}", if pass { "PASS" } else { "FAIL" }, name);
        checks.push((name.to_string(), pass));
    };

    let six = fixtures::six_subspace_family();
    let out = phase::pr_subspaces_real(&six, &cfg, &ctx.tol, &ctx.policy)?;
    record(
        "six demo subspaces retrieve phase (budgeted)",
        out.decision == Decision::PassBudgeted
            && out.min_residual.unwrap_or(0.0) > 10.0 * ctx.tol.witness_tol,
    );

    let five = fixtures::riesz_union_five();
    let cp = spark::check_complement_property(&five, &ctx.policy)?;
    let witness_ok = cp
        .witness
        .as_ref()
        .map(|w| w.subset == vec![1, 5] && w.dim_subset == 2 && w.dim_complement == 2)
        .unwrap_or(false);
    record(
        "five-vector set fails the complement property on the known partition",
        !cp.holds && witness_ok,
    );

    let sheared = six.apply(&fixtures::shear_operator())?;
    let out = phase::pr_subspaces_real(&sheared, &cfg, &ctx.tol, &ctx.policy)?;
    record(
        "sheared subspaces fail with an exact witness",
        out.decision == Decision::Fail
            && out
                .witness
                .map(|w| w.measurement_residual == 0.0)
                .unwrap_or(false),
    );

    let out = phase::pr_vectors_real(&fixtures::six_vector_family(), &ctx.policy)?;
    record(
        "six-vector family retrieves phase exactly",
        out.decision == Decision::PassExact,
    );

    let comp = fixtures::complement_subspace_family();
    let nr = phase::norm_retrieval_subspaces_real(&comp, &cfg, &ctx.tol, &ctx.policy)?;
    let pr = phase::pr_subspaces_real(&comp, &cfg, &ctx.tol, &ctx.policy)?;
    record(
        "complement subspaces retrieve norms and phase",
        nr.decision.is_pass() && pr.decision.is_pass(),
    );

    let out = phase::pr_vectors_real(&fixtures::full_spark_three_in_two(), &ctx.policy)?;
    record(
        "minimal full-spark plane family retrieves phase",
        out.decision == Decision::PassExact,
    );

    let out = phase::pr_vectors_real(&fixtures::two_in_r2(), &ctx.policy)?;
    record(
        "two basis vectors fail phase retrieval",
        out.decision == Decision::Fail,
    );

    let mut rng = rng_from_seed(ctx.seed);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norms = phase::demo_projection_norms(&x);
        let (xh, _) = phase::reconstruct_from_demo_norms(&norms, &ctx.tol)?;
        let plus: f64 = x
            .iter()
            .zip(&xh)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let minus: f64 = x
            .iter()
            .zip(&xh)
            .map(|(a, b)| (a + b) * (a + b))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(plus.min(minus));
    }
    record(
        "demo reconstruction round trip stays within 1e-8",
        worst <= 1e-8,
    );

    let all = checks.iter().all(|(_, p)| *p);
    let result = json!({
        "checks": checks
            .iter()
            .map(|(name, pass)| json!({ "name": name, "pass": pass }))
            .collect::<Vec<Value>>(),
        "all_pass": all,
    });
    let report = json!({
        "command": "fixture-suite",
        "arithmetic_mode": ctx.arithmetic_mode,
        "seed": ctx.seed,
        "result": result,
    });
    Ok((report, if all { 0 } else { 1 }))
}

//! `gmom`: command-line front end for graph-moments.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 bad input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graph_moments::connection::{b_matrix, c_matrix, connection_submatrix, e_matrix};
use graph_moments::error::Error;
use graph_moments::graph::{canonical_form, enumerate_k_labeled, eulerian_orientations, family, subdivide, CodeMode, Family, Multigraph};
use graph_moments::hom::{density, evaluate_quantum, hom, inj, t_inj, HomParameter, HomTarget};
use graph_moments::io::{self, JsonScalar, Target};
use graph_moments::linalg::{numerical_rank, psd_check, rank_exact, symmetric_eigenvalues, Matrix, PsdCertificate};
use graph_moments::moments::{hankel_psd_rank, hausdorff_check, recover_finite_support, Domain, Hausdorff, MomentSequence, Recovered};
use graph_moments::rank_growth::{classify_growth_with_budget, GrowthType, DIM_BUDGET};
use graph_moments::sampler::{convergence_experiment, SampleTarget};
use graph_moments::scalar::{format_rational, parse_rational, Rational};
use graph_moments::spectral::{eigenvalues_step, spectrum, ZERO_EIGENVALUE};
use graph_moments::targets::StepGraphon;
use graph_moments::verify::{run_suite, suite_names, DEFAULT_SEED};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gmom", version, about = "Multigraph homomorphism densities and moment certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate hom(F, H), t(F, H) or their injective versions.
    Hom(HomArgs),
    /// Connection matrix of hom(., H) or one of the E, C, B matrices.
    Connmat(ConnmatArgs),
    /// Eigenvalues of a step graphon and the cycle-density check.
    Spectrum(SpectrumArgs),
    /// Moment-sequence certificates and atom recovery.
    #[command(subcommand)]
    Moments(MomentsCommand),
    /// Growth of dim(P_n / hom(., H)).
    Rankgrowth(RankgrowthArgs),
    /// Sample Z_n and tabulate t_inj(F, Z_n).
    Sample(SampleArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Graph utilities.
    #[command(subcommand)]
    Graph(GraphCommand),
}

#[derive(Args)]
struct Arith {
    /// Exact rational arithmetic (default).
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Double-precision arithmetic.
    #[arg(long)]
    float: bool,
}

#[derive(Args)]
struct HomArgs {
    /// Multigraph or quantum graph JSON.
    #[arg(long)]
    graph: PathBuf,
    /// Weighted graph, randomly weighted graph or step graphon JSON.
    #[arg(long)]
    target: PathBuf,
    /// Normalize by the total node weight.
    #[arg(long)]
    density: bool,
    /// Count injective maps only.
    #[arg(long)]
    injective: bool,
    #[command(flatten)]
    arith: Arith,
}

#[derive(Clone, Copy, ValueEnum)]
enum Special {
    E,
    C,
    B,
}

#[derive(Args)]
struct ConnmatArgs {
    #[arg(long)]
    target: PathBuf,
    /// Number of labeled nodes.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Maximum node count of the generators.
    #[arg(long, default_value_t = 3)]
    nodes: usize,
    /// Maximum edge multiplicity of the generators.
    #[arg(long, default_value_t = 2)]
    mult: u32,
    /// Use t(., H) instead of hom(., H).
    #[arg(long)]
    density: bool,
    /// Build E, C or B of the density parameter instead.
    #[arg(long, value_enum)]
    special: Option<Special>,
    #[arg(long, default_value_t = 8)]
    size: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    arith: Arith,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Step graphon or weighted graph JSON.
    #[arg(long)]
    graphon: PathBuf,
    /// Cycle lengths, e.g. `3..8` or `3,5`.
    #[arg(long, default_value = "3..8")]
    cycles: String,
    /// Eigenvalues at most this in absolute value are dropped.
    #[arg(long, default_value_t = ZERO_EIGENVALUE)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    /// `[0, 1]`.
    #[value(name = "01")]
    Unit,
    /// `[-d, d]`.
    #[value(name = "dd")]
    Symmetric,
}

#[derive(Subcommand)]
enum MomentsCommand {
    /// Hankel positivity plus the Hausdorff or bound condition of the domain.
    Check {
        #[arg(long)]
        seq: PathBuf,
        /// Overrides the domain stored in the file.
        #[arg(long, value_enum)]
        domain: Option<DomainArg>,
        /// Half-width `d` for `--domain dd`.
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Atoms and weights of the finite-support measure with these moments.
    Recover {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 3)]
        atoms: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RankgrowthArgs {
    /// Randomly weighted (or weighted) graph JSON.
    #[arg(long)]
    target: PathBuf,
    /// Values of n, e.g. `2..5`.
    #[arg(long, default_value = "1..4")]
    n: String,
    /// Maximum number of edge-value tuples enumerated per n.
    #[arg(long, default_value_t = DIM_BUDGET)]
    budget: u128,
    /// Write the full report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Step graphon, weighted graph or randomly weighted graph JSON.
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    /// Sample sizes, e.g. `25,100,400`.
    #[arg(long, default_value = "25,100,400")]
    n: String,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only this suite; `--list` shows the names.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    list: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Standard family member: `cycle 4`, `path 3`, `complete 4`,
    /// `multiedge 2`, `bipartite 2 3`, `edgeless 2`, `k1`.
    Family {
        kind: String,
        params: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All k-labeled multigraphs up to isomorphism within a budget.
    Enumerate {
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        nodes: usize,
        #[arg(long, default_value_t = 1)]
        mult: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical representative of the isomorphism class.
    Canon {
        #[arg(long)]
        graph: PathBuf,
        /// Let isomorphisms move labeled nodes.
        #[arg(long)]
        labels_free: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace every edge copy by a path of length two.
    Subdivide {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Number of eulerian orientations.
    Eulerian {
        #[arg(long)]
        graph: PathBuf,
    },
}

/// Failure of a command, mapped to the process exit code.
#[derive(Debug)]
enum Failure {
    /// A checked property does not hold; exit 1.
    Check(String),
    /// Unusable input; exit 2.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Hom(a) => hom_cmd(a),
        Command::Connmat(a) => connmat_cmd(a),
        Command::Spectrum(a) => spectrum_cmd(a),
        Command::Moments(c) => moments_cmd(c),
        Command::Rankgrowth(a) => rankgrowth_cmd(a),
        Command::Sample(a) => sample_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Graph(c) => graph_cmd(c),
    }
}

// ------------------------------------------------------------------ input

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    io::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_target(path: &Path) -> Result<Target, Failure> {
    Ok(Target::from_json(&read_json(path)?)?)
}

fn read_graph(path: &Path) -> Result<Multigraph, Failure> {
    Ok(io::graph_from_json(&read_json(path)?)?)
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, v: &Value) -> Outcome {
    let text = serde_json::to_string_pretty(v).expect("values serialize");
    emit(out, &text)
}

/// `a..b` (inclusive), a comma list, or a single number.
fn parse_list(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Input(format!("expected `a..b` or a comma list, found {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn step_graphon(t: Target) -> Result<StepGraphon<Rational>, Failure> {
    match t {
        Target::Graphon(w) => Ok(w),
        Target::Weighted(h) => Ok(h.normalize()?.to_step_graphon()?),
        Target::Random(_) => Err(Failure::Input("a randomly weighted graph has no step-graphon form".into())),
    }
}

// ------------------------------------------------------------------- hom

enum GraphInput {
    Plain(Multigraph),
    Quantum(graph_moments::hom::QuantumGraph),
}

fn evaluate<T: JsonScalar, H: HomTarget<T> + Send + Clone>(g: &GraphInput, h: &H, a: &HomArgs) -> Result<T, Failure> {
    match g {
        GraphInput::Plain(f) => Ok(match (a.density, a.injective) {
            (false, false) => hom(f, h),
            (true, false) => density(f, h)?,
            (false, true) => inj(f, h),
            (true, true) => t_inj(f, h)?,
        }),
        GraphInput::Quantum(p) => {
            if a.injective {
                return Err(Failure::Input("--injective is not defined for quantum graphs".into()));
            }
            let f = if a.density {
                HomParameter::density(h.clone())
            } else {
                HomParameter::hom(h.clone())
            };
            Ok(evaluate_quantum(&f, p))
        }
    }
}

fn hom_cmd(a: HomArgs) -> Outcome {
    let v = read_json(&a.graph)?;
    let g = if v.get("terms").is_some() {
        GraphInput::Quantum(io::quantum_from_json(&v)?)
    } else {
        GraphInput::Plain(io::graph_from_json(&v)?)
    };
    let target = read_target(&a.target)?;
    let text = if a.arith.float {
        let x = match &target {
            Target::Weighted(h) => evaluate(&g, &h.to_f64(), &a)?,
            Target::Graphon(w) => evaluate(&g, &w.to_f64(), &a)?,
            Target::Random(h) => exact_to_f64(&evaluate(&g, h, &a)?),
        };
        x.to_string()
    } else {
        let x = match &target {
            Target::Weighted(h) => evaluate(&g, h, &a)?,
            Target::Graphon(w) => evaluate(&g, w, &a)?,
            Target::Random(h) => evaluate(&g, h, &a)?,
        };
        format_rational(&x)
    };
    emit(None, &text)
}

// --------------------------------------------------------------- connmat

fn connmat_cmd(a: ConnmatArgs) -> Outcome {
    let target = read_target(&a.target)?;
    if let Some(kind) = a.special {
        let w = step_graphon(target)?;
        let (matrix, rank) = if a.arith.float {
            let f = HomParameter::density(w.to_f64());
            let m = special(kind, &f, a.size);
            let rank = numerical_rank(&m.to_nalgebra(), 1e-9);
            (io::matrix_to_json(&m), rank)
        } else {
            let f = HomParameter::density(w);
            let m = special(kind, &f, a.size);
            (io::matrix_to_json(&m), rank_exact(&m))
        };
        return emit_json(a.out.as_deref(), &json!({"matrix": matrix, "rank": rank}));
    }
    let gens = enumerate_k_labeled(a.k, a.nodes, a.mult)?;
    let generators: Vec<Value> = gens.iter().map(io::graph_to_json).collect();
    if a.arith.float {
        let m = match &target {
            Target::Weighted(h) => float_section(h.to_f64(), a.density, a.k, &gens)?,
            Target::Graphon(w) => float_section(w.to_f64(), a.density, a.k, &gens)?,
            Target::Random(_) => return Err(Failure::Input("--float needs a weighted graph or graphon target".into())),
        };
        let eig = symmetric_eigenvalues(&m.to_nalgebra());
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let rank = numerical_rank(&m.to_nalgebra(), 1e-9);
        let v = json!({"generators": generators, "matrix": io::matrix_to_json(&m), "rank": rank, "min_eigenvalue": min});
        return emit_json(a.out.as_deref(), &v);
    }
    let h = target.as_random()?;
    let f = if a.density {
        HomParameter::density(h)
    } else {
        HomParameter::hom(h)
    };
    let m = connection_submatrix(&f, a.k, &gens)?;
    let cert = psd_check(&m)?;
    let mut v = json!({"generators": generators, "matrix": io::matrix_to_json(&m), "psd": cert.is_psd()});
    match &cert {
        PsdCertificate::Psd { rank } => v["rank"] = json!(rank),
        PsdCertificate::Witness { vector, value } => {
            v["witness"] = json!({"vector": vector.iter().map(format_rational).collect::<Vec<_>>(), "value": format_rational(value)});
        }
    }
    emit_json(a.out.as_deref(), &v)?;
    match cert {
        PsdCertificate::Psd { .. } => Ok(()),
        PsdCertificate::Witness { value, .. } => Err(Failure::Check(format!("connection matrix is not PSD: v^T M v = {value}"))),
    }
}

fn special<T: graph_moments::scalar::Scalar>(kind: Special, f: &HomParameter<StepGraphon<T>>, size: usize) -> Matrix<T> {
    match kind {
        Special::E => e_matrix(f, size),
        Special::C => c_matrix(f, size),
        Special::B => b_matrix(f, size),
    }
}

fn float_section<H: HomTarget<f64> + Send>(h: H, dens: bool, k: usize, gens: &[Multigraph]) -> Result<Matrix<f64>, Failure> {
    let f = if dens { HomParameter::density(h) } else { HomParameter::hom(h) };
    Ok(connection_submatrix(&f, k, gens)?)
}

// -------------------------------------------------------------- spectrum

fn spectrum_cmd(a: SpectrumArgs) -> Outcome {
    let w = step_graphon(read_target(&a.graphon)?)?;
    let cycles = parse_list(&a.cycles)?;
    let spec = spectrum(&w, a.threshold);
    let all = eigenvalues_step(&w);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &n in &cycles {
        let c = family(Family::Cycle(n))?;
        let exact = density(&c, &w)?;
        let sum: f64 = all.iter().map(|l| l.powi(n as i32)).sum();
        let err = (exact_to_f64(&exact) - sum).abs();
        worst = worst.max(err);
        rows.push(json!({"n": n, "t": format_rational(&exact), "eigen_sum": sum, "error": err}));
    }
    let v = json!({"eigenvalues": spec.values, "cycles": rows, "max_error": worst});
    emit_json(a.out.as_deref(), &v)?;
    if worst > 1e-9 {
        return Err(Failure::Check(format!("cycle densities differ from eigenvalue sums by {worst:e}")));
    }
    Ok(())
}

fn exact_to_f64(x: &Rational) -> f64 {
    graph_moments::scalar::Scalar::to_f64(x)
}

// --------------------------------------------------------------- moments

fn moments_cmd(c: MomentsCommand) -> Outcome {
    match c {
        MomentsCommand::Check { seq, domain, d, out } => {
            let mut s = io::moments_from_json(&read_json(&seq)?)?;
            if let Some(domain) = domain {
                let dom = match domain {
                    DomainArg::Unit => Domain::Unit,
                    DomainArg::Symmetric => {
                        let d = match (d, s.domain()) {
                            (Some(d), _) => parse_rational(&d)?,
                            (None, Domain::Symmetric(d)) => d.clone(),
                            (None, Domain::Unit) => Rational::from_integer(1.into()),
                        };
                        Domain::Symmetric(d)
                    }
                };
                s = MomentSequence::new(s.values().to_vec(), dom)?;
            }
            moments_check(&s, out.as_deref())
        }
        MomentsCommand::Recover { seq, atoms, out } => {
            let v = read_json(&seq)?;
            let values: Vec<Rational> = match v.get("values") {
                Some(_) => io::moments_from_json(&v)?.values().to_vec(),
                None => v
                    .as_array()
                    .ok_or_else(|| Failure::Input("expected a moment sequence".into()))?
                    .iter()
                    .map(Rational::from_json)
                    .collect::<Result<_, _>>()?,
            };
            let recovered = match recover_finite_support(&values, atoms) {
                Ok(r) => r,
                Err(e @ (Error::Inconsistent(_) | Error::RankExceeds { .. } | Error::NonrealRoots)) => {
                    return Err(Failure::Check(e.to_string()));
                }
                Err(e) => return Err(e.into()),
            };
            let v = match recovered {
                Recovered::Exact(d) => json!({"exact": true, "atoms": io::distribution_to_json(&d)}),
                Recovered::Approx(m) => json!({"exact": false, "atoms": m.atoms}),
            };
            emit_json(out.as_deref(), &v)
        }
    }
}

fn moments_check(s: &MomentSequence, out: Option<&Path>) -> Outcome {
    let report = hankel_psd_rank(s);
    let mut v = json!({"hankel_psd": report.certificate.is_psd(), "hankel_rank": report.rank});
    let mut failure = None;
    if let PsdCertificate::Witness { vector, value } = &report.certificate {
        v["witness"] = json!({"vector": vector.iter().map(format_rational).collect::<Vec<_>>(), "value": format_rational(value)});
        failure = Some(format!("Hankel matrix is not PSD: v^T H v = {value}"));
    }
    match s.domain() {
        Domain::Unit => match hausdorff_check(s, s.values().len() - 1)? {
            Hausdorff::Pass => v["hausdorff"] = json!(true),
            Hausdorff::Violated { n, k, value } => {
                v["hausdorff"] = json!({"n": n, "k": k, "value": format_rational(&value)});
                failure.get_or_insert(format!("difference of order {k} at index {n} is {value}"));
            }
        },
        Domain::Symmetric(d) => match s.bound_violation() {
            None => v["bound"] = json!(true),
            Some(i) => {
                v["bound"] = json!({"index": i});
                failure.get_or_insert(format!("moment {i} exceeds the bound for [-{d}, {d}]"));
            }
        },
    }
    emit_json(out, &v)?;
    failure.map_or(Ok(()), |f| Err(Failure::Check(f)))
}

// ------------------------------------------------------------ rankgrowth

fn rankgrowth_cmd(a: RankgrowthArgs) -> Outcome {
    let h = read_target(&a.target)?.as_random()?;
    let ns = parse_list(&a.n)?;
    let report = classify_growth_with_budget(&h, &ns, a.budget)?;
    let kind = match report.kind {
        GrowthType::Ordinary => "ordinary",
        GrowthType::Proper => "proper",
    };
    let mut text = format!(
        "{}; A = {:.6}; {kind}; predicted root limit {:.6}\n",
        report.description, report.a.value, report.predicted
    );
    writeln!(text, "n,dim,root,lower,upper").unwrap();
    let mut bad = Vec::new();
    for r in &report.rows {
        writeln!(text, "{},{},{:.6},{:.6},{:.6}", r.n, r.dim, r.root, r.lower, r.upper).unwrap();
        let d = r.dim as f64;
        if d < r.lower * (1.0 - 1e-9) || d > r.upper * (1.0 + 1e-9) {
            bad.push(r.n);
        }
    }
    emit(None, &text)?;
    if let Some(path) = &a.report {
        let rows: Vec<Value> = report
            .rows
            .iter()
            .map(|r| json!({"n": r.n, "dim": r.dim, "root": r.root, "lower": r.lower, "upper": r.upper}))
            .collect();
        let mut a_json = json!({"value": report.a.value, "argmax": report.a.argmax});
        if let Some(x) = &report.a.exact {
            a_json["exact"] = json!(format_rational(x));
        }
        let v = json!({
            "description": report.description,
            "nodes": report.nodes,
            "p": report.p,
            "a": a_json,
            "kind": kind,
            "predicted": report.predicted,
            "rows": rows,
        });
        emit_json(Some(path), &v)?;
    }
    if !bad.is_empty() {
        return Err(Failure::Check(format!("rank bounds fail for n in {bad:?}")));
    }
    Ok(())
}

// ---------------------------------------------------------------- sample

fn sample_cmd(a: SampleArgs) -> Outcome {
    let target = match read_target(&a.target)? {
        Target::Random(h) => SampleTarget::Random(h),
        other => SampleTarget::Graphon(step_graphon(other)?),
    };
    let f = read_graph(&a.graph)?;
    let ns = parse_list(&a.n)?;
    let rows = convergence_experiment(&f, &target, &ns, a.reps, a.seed)?;
    let mut csv = String::from("n,mean,variance,bound\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{}", r.n, r.mean, r.variance, r.bound).unwrap();
    }
    emit(a.out.as_deref(), &csv)
}

// ---------------------------------------------------------------- verify

fn verify_cmd(a: VerifyArgs) -> Outcome {
    if a.list {
        let names: Vec<&str> = suite_names().collect();
        return emit(None, &names.join("\n"));
    }
    let names: Vec<&str> = match &a.suite {
        Some(s) => vec![s.as_str()],
        None => suite_names().collect(),
    };
    let mut failed = Vec::new();
    for name in names {
        let report = run_suite(name, a.seed).ok_or_else(|| {
            let known: Vec<&str> = suite_names().collect();
            Failure::Input(format!("unknown suite `{name}`; known: {}", known.join(", ")))
        })??;
        let status = if report.passed { "PASS" } else { "FAIL" };
        println!("{status} {} ({} cases, {:.1}s)", report.name, report.cases, report.seconds);
        for note in &report.notes {
            println!("  note: {note}");
        }
        for f in &report.failures {
            println!("  fail: {f}");
        }
        if !report.passed {
            failed.push(report.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("suites failed: {}", failed.join(", "))))
    }
}

// ----------------------------------------------------------------- graph

fn graph_cmd(c: GraphCommand) -> Outcome {
    match c {
        GraphCommand::Family { kind, params, out } => {
            let arg = |i: usize| {
                params
                    .get(i)
                    .copied()
                    .ok_or_else(|| Failure::Input(format!("`{kind}` needs {} parameter(s)", i + 1)))
            };
            let kind = match kind.as_str() {
                "cycle" => Family::Cycle(arg(0)?),
                "path" => Family::Path(arg(0)?),
                "complete" => Family::Complete(arg(0)?),
                "multiedge" => Family::MultiEdge(arg(0)? as u32),
                "bipartite" => Family::CompleteBipartite(arg(0)?, arg(1)?),
                "edgeless" => Family::Edgeless(arg(0)?),
                "k1" => Family::K1,
                other => return Err(Failure::Input(format!("unknown family `{other}`"))),
            };
            emit_json(out.as_deref(), &io::graph_to_json(&family(kind)?))
        }
        GraphCommand::Enumerate { k, nodes, mult, out } => {
            let gens = enumerate_k_labeled(k, nodes, mult)?;
            emit_json(out.as_deref(), &Value::Array(gens.iter().map(io::graph_to_json).collect()))
        }
        GraphCommand::Canon { graph, labels_free, out } => {
            let mode = if labels_free { CodeMode::LabelsFree } else { CodeMode::LabelsFixed };
            let (_, g) = canonical_form(&read_graph(&graph)?, mode)?;
            emit_json(out.as_deref(), &io::graph_to_json(&g))
        }
        GraphCommand::Subdivide { graph, out } => emit_json(out.as_deref(), &io::graph_to_json(&subdivide(&read_graph(&graph)?))),
        GraphCommand::Eulerian { graph } => emit(None, &eulerian_orientations(&read_graph(&graph)?)?.to_string()),
    }
}

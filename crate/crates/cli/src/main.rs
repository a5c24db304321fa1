use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ffcert::certification::{self, CertificationPlan, Certifier, PhaseEstimationConfig};
use ffcert::constructions::{self, examples, ClockEncoding, IqpPolynomial, PenaltyWeights};
use ffcert::circuit::CircuitProgram;
use ffcert::montecarlo::{self, MonteCarloConfig};
use ffcert::operators::{AnalyzeOptions, EigenMethod, DEFAULT_BUDGET};
use ffcert::sampling::{self, SamplerConfig};
use ffcert::states::{NoiseSpec, PreparedState, PureState, StateSpec};
use ffcert::supremacy;
use ffcert::{Error, LocalHamiltonian, Result, SpectralSummary};

#[derive(Parser, Debug)]
#[command(name = "ffcert", version, about = "Certify ground-state preparations of frustration-free Hamiltonians")]
struct Cli {
    /// Cap on the full Hilbert-space dimension.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET, value_parser = positive_usize)]
    budget: usize,

    /// Worker threads (0 lets the pool decide).
    #[arg(long, global = true, env = "FFCERT_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, analyze and check Hamiltonians.
    #[command(subcommand)]
    Ham(HamCmd),
    /// Compile circuits into clock Hamiltonians.
    #[command(subcommand)]
    Circuit(CircuitCmd),
    /// Plan and run certification.
    #[command(subcommand)]
    Certify(CertifyCmd),
    /// IQP polynomials, circuits and the certify-or-sample procedure.
    #[command(subcommand)]
    Iqp(IqpCmd),
    /// Measure every local term on a state.
    Sample(SampleArgs),
}

#[derive(Subcommand, Debug)]
enum HamCmd {
    Build(HamBuildArgs),
    Analyze(HamAnalyzeArgs),
    VerifyFf(VerifyFfArgs),
}

#[derive(Subcommand, Debug)]
enum CircuitCmd {
    Compile(CompileArgs),
}

#[derive(Subcommand, Debug)]
enum CertifyCmd {
    Plan(PlanArgs),
    Run(RunArgs),
    Montecarlo(MonteCarloArgs),
    /// Ground-state fidelity from simulated phase estimation.
    PhaseEstimation(PhaseArgs),
}

#[derive(Subcommand, Debug)]
enum IqpCmd {
    Gen(GenArgs),
    Gap(GapArgs),
    Encode(EncodeArgs),
    Supremacy(SupremacyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FixtureKind {
    Projectors,
    Ghz,
    FkDemo,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    Auto,
    Dense,
    Lanczos,
}

impl From<MethodArg> for EigenMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => EigenMethod::Auto,
            MethodArg::Dense => EigenMethod::Dense,
            MethodArg::Lanczos => EigenMethod::Lanczos,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum EncodingArg {
    Compact,
    Unary,
}

impl From<EncodingArg> for ClockEncoding {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Compact => ClockEncoding::Compact,
            EncodingArg::Unary => ClockEncoding::Unary,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct HamBuildArgs {
    #[arg(long, value_enum)]
    kind: FixtureKind,
    /// Number of qubits (ignored by fk-demo).
    #[arg(long, default_value_t = 3, value_parser = positive_usize)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct HamAnalyzeArgs {
    #[arg(long)]
    ham: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(long, value_parser = positive_f64)]
    degeneracy_tol: Option<f64>,
    /// Also write the ground state as a state file.
    #[arg(long)]
    ground_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyFfArgs {
    #[arg(long)]
    ham: PathBuf,
    #[arg(long, default_value_t = 1e-8, value_parser = positive_f64)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CompileArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, value_enum, default_value_t = EncodingArg::Compact)]
    encoding: EncodingArg,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    w_in: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    w_up: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    w_clk: f64,
    /// Replace CCZ gates by one- and two-qubit gates before compiling.
    #[arg(long)]
    decompose: bool,
    /// Hamiltonian output file.
    #[arg(long)]
    out: PathBuf,
    /// Also write the history state as a state file.
    #[arg(long)]
    history_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct PlanArgs {
    #[arg(long, value_parser = open_unit)]
    ft: f64,
    #[arg(long, value_parser = open_unit)]
    alpha: f64,
    #[arg(long, value_parser = positive_f64)]
    eps: f64,
    #[arg(long)]
    ham: PathBuf,
    /// Use this gap instead of the computed one.
    #[arg(long, value_parser = positive_f64)]
    gap: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct RunArgs {
    #[arg(long)]
    ham: PathBuf,
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct MonteCarloArgs {
    #[arg(long)]
    ham: PathBuf,
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 100, value_parser = positive_u64)]
    reps: u64,
    /// Directory for montecarlo.json and montecarlo.csv.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct PhaseArgs {
    #[arg(long)]
    ham: PathBuf,
    #[arg(long)]
    state: PathBuf,
    #[arg(long, value_parser = positive_u32)]
    t_qubits: u32,
    #[arg(long, default_value_t = 0.01, value_parser = open_unit)]
    beta: f64,
    #[arg(long, default_value_t = 0.05, value_parser = open_unit)]
    alpha: f64,
    #[arg(long, default_value_t = 0.02, value_parser = positive_f64)]
    eps: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GenArgs {
    #[arg(long, value_parser = positive_usize)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GapArgs {
    #[arg(long)]
    poly: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct EncodeArgs {
    #[arg(long)]
    poly: PathBuf,
    #[arg(long)]
    decompose: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SupremacyArgs {
    #[arg(long)]
    poly: PathBuf,
    #[arg(long, value_parser = open_unit)]
    ft: f64,
    #[arg(long, value_parser = open_unit)]
    alpha: f64,
    #[arg(long, value_parser = positive_f64)]
    eps: f64,
    #[arg(long)]
    seed: u64,
    /// Identity gates appended after the computation (default: L_comp).
    #[arg(long)]
    padding: Option<usize>,
    #[arg(long, default_value_t = 1000, value_parser = positive_u64)]
    shots: u64,
    /// Depolarizing strength applied to the history state.
    #[arg(long, default_value_t = 0.0, value_parser = closed_unit)]
    noise: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long)]
    ham: PathBuf,
    #[arg(long)]
    state: PathBuf,
    #[arg(long, value_parser = positive_u64)]
    shots: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn open_unit(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} must lie in (0, 1)"))
    }
}

fn closed_unit(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} must lie in [0, 1]"))
    }
}

fn positive_usize(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        Ok(_) => Err("must be at least 1".into()),
        Err(e) => Err(format!("{e}")),
    }
}

fn positive_u64(s: &str) -> std::result::Result<u64, String> {
    match s.parse::<u64>() {
        Ok(v) if v > 0 => Ok(v),
        Ok(_) => Err("must be at least 1".into()),
        Err(e) => Err(format!("{e}")),
    }
}

fn positive_u32(s: &str) -> std::result::Result<u32, String> {
    match s.parse::<u32>() {
        Ok(v) if v > 0 => Ok(v),
        Ok(_) => Err("must be at least 1".into()),
        Err(e) => Err(format!("{e}")),
    }
}

fn config<A: Serialize>(command: &str, budget: usize, args: &A) -> Value {
    json!({ "command": command, "budget": budget, "args": args })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes to `out` when given, otherwise prints.
fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = to_json(value)?;
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_state(path: &Path, h: &LocalHamiltonian) -> Result<PreparedState> {
    let spec: StateSpec = read_json(path)?;
    PreparedState::from_spec(&spec, h.system().dims())
}

/// Plan files hold either a bare plan or a `plan` field next to a config echo.
#[derive(Deserialize)]
#[serde(untagged)]
enum PlanFile {
    Wrapped { plan: CertificationPlan },
    Bare(CertificationPlan),
}

fn load_plan(path: &Path) -> Result<CertificationPlan> {
    Ok(match read_json::<PlanFile>(path)? {
        PlanFile::Wrapped { plan } | PlanFile::Bare(plan) => plan,
    })
}

fn analyze(h: &LocalHamiltonian, budget: usize) -> Result<SpectralSummary> {
    h.analyze_with(&AnalyzeOptions { budget, ..Default::default() })
}

/// Rejects plans computed for a different Hamiltonian.
fn check_plan(plan: &CertificationPlan, h: &LocalHamiltonian, s: &SpectralSummary) -> Result<()> {
    let inputs = &plan.inputs_summary;
    let scale = s.norm.max(1.0);
    let mismatch = inputs.n != h.num_terms()
        || (inputs.j - h.interaction_strength()).abs() > 1e-9 * scale
        || (inputs.norm - s.norm).abs() > 1e-9 * scale
        || (plan.gap_source == certification::GapSource::Computed && (inputs.gap - s.gap).abs() > 1e-9 * scale);
    if mismatch {
        return Err(Error::InvalidParameter("plan does not match the Hamiltonian".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a Value,
    #[serde(flatten)]
    body: T,
}

fn run(cli: Cli) -> Result<()> {
    let budget = cli.budget;
    match cli.command {
        Command::Ham(HamCmd::Build(a)) => {
            let h = match a.kind {
                FixtureKind::Projectors => examples::projectors(a.n)?,
                FixtureKind::Ghz => examples::ghz_stabilizer(a.n)?,
                FixtureKind::FkDemo => examples::fk_demo()?,
            };
            h.dim(budget)?;
            emit(&h, a.out.as_deref())
        }
        Command::Ham(HamCmd::Analyze(a)) => {
            let cfg = config("ham analyze", budget, &a);
            let h: LocalHamiltonian = read_json(&a.ham)?;
            let opts = AnalyzeOptions { budget, method: a.method.into(), degeneracy_tol: a.degeneracy_tol, ..Default::default() };
            let s = h.analyze_with(&opts)?;
            if let Some(p) = &a.ground_out {
                let g = s.ground_state().ok_or(Error::DegenerateGround)?;
                let st = PreparedState::pure(h.system().dims(), PureState::normalized(g.clone())?)?.with_label("ground state");
                fs::write(p, to_json(&st.to_spec())?)?;
            }
            let body = json!({
                "spectrum": s.digest(),
                "num_terms": h.num_terms(),
                "J": h.interaction_strength(),
                "locality": h.locality(),
            });
            emit(&Report { config: &cfg, body }, a.out.as_deref())
        }
        Command::Ham(HamCmd::VerifyFf(a)) => {
            let cfg = config("ham verify-ff", budget, &a);
            let h: LocalHamiltonian = read_json(&a.ham)?;
            let s = analyze(&h, budget)?;
            let v = h.verify_frustration_free_with(&s, a.tol, budget)?;
            emit(&Report { config: &cfg, body: json!({ "verdict": v, "spectrum": s.digest() }) }, a.out.as_deref())
        }
        Command::Circuit(CircuitCmd::Compile(a)) => {
            let cfg = config("circuit compile", budget, &a);
            let mut c: CircuitProgram = read_json(&a.circuit)?;
            if a.decompose {
                c = constructions::decompose_ccz(&c);
            }
            let weights = PenaltyWeights { input: a.w_in, update: a.w_up, clock: a.w_clk };
            let enc: ClockEncoding = a.encoding.into();
            let compiled = constructions::compile_feynman_kitaev(&c, enc, weights, budget)?;
            fs::write(&a.out, to_json(&compiled.hamiltonian)?)?;
            if let Some(p) = &a.history_out {
                let psi = constructions::history_state_with_budget(&c, enc, budget)?;
                let st = PreparedState::pure(compiled.hamiltonian.system().dims(), psi)?.with_label("history state");
                fs::write(p, to_json(&st.to_spec())?)?;
            }
            emit(&Report { config: &cfg, body: json!({ "metadata": compiled.metadata }) }, None)
        }
        Command::Certify(CertifyCmd::Plan(a)) => {
            let cfg = config("certify plan", budget, &a);
            let h: LocalHamiltonian = read_json(&a.ham)?;
            let s = analyze(&h, budget)?;
            let plan = certification::plan_with_gap(a.ft, a.alpha, a.eps, &s, h.num_terms(), h.interaction_strength(), a.gap)?;
            emit(&Report { config: &cfg, body: json!({ "plan": plan }) }, a.out.as_deref())
        }
        Command::Certify(CertifyCmd::Run(a)) => {
            let cfg = config("certify run", budget, &a);
            let h: LocalHamiltonian = read_json(&a.ham)?;
            let s = analyze(&h, budget)?;
            let plan = load_plan(&a.plan)?;
            check_plan(&plan, &h, &s)?;
            let rho = load_state(&a.state, &h)?;
            let report = certification::certify(&h, &s, &rho, &plan, a.seed)?;
            emit(&Report { config: &cfg, body: report }, a.out.as_deref())
        }
        Command::Certify(CertifyCmd::Montecarlo(a)) => {
            let cfg = config("certify montecarlo", budget, &a);
            let h: LocalHamiltonian = read_json(&a.ham)?;
            let s = analyze(&h, budget)?;
            let plan = load_plan(&a.plan)?;
            check_plan(&plan, &h, &s)?;
            let rho = load_state(&a.state, &h)?;
            let certifier = Certifier::new(&h, &s, &rho, &plan)?;
            let rep = montecarlo::run_montecarlo(&certifier, &MonteCarloConfig { repetitions: a.reps, master_seed: a.seed })?;
            let report = Report { config: &cfg, body: json!({ "montecarlo": &rep }) };
            match &a.out_dir {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    fs::write(dir.join("montecarlo.json"), to_json(&report)?)?;
                    let mut csv = Vec::new();
                    montecarlo::write_rows_csv(&rep.rows, &mut csv)?;
                    fs::write(dir.join("montecarlo.csv"), csv)?;
                    Ok(())
                }
                None => emit(&report, None),
            }
        }
        Command::Certify(CertifyCmd::PhaseEstimation(a)) => {
            let cfg = config("certify phase-estimation", budget, &a);
            let h: LocalHamiltonian = read_json(&a.ham)?;
            let s = analyze(&h, budget)?;
            let rho = load_state(&a.state, &h)?;
            let pe = PhaseEstimationConfig {
                t_qubits: a.t_qubits,
                beta: a.beta,
                shots: certification::phase_estimation_shots(a.alpha, a.eps),
                seed: a.seed,
            };
            let r = certification::phase_estimation_fidelity(&rho, &h, &s, &pe)?;
            emit(&Report { config: &cfg, body: r }, a.out.as_deref())
        }
        Command::Iqp(IqpCmd::Gen(a)) => {
            let p = IqpPolynomial::random(a.n, a.seed)?;
            let text = format!("# random degree-3 polynomial, seed {}\n{}", a.seed, p.to_text());
            match &a.out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Iqp(IqpCmd::Gap(a)) => {
            let p = IqpPolynomial::parse(&read(&a.poly)?)?;
            println!("{}", serde_json::to_string(&p.ngap()?)?);
            Ok(())
        }
        Command::Iqp(IqpCmd::Encode(a)) => {
            let p = IqpPolynomial::parse(&read(&a.poly)?)?;
            let mut c = constructions::encode_iqp(&p);
            if a.decompose {
                c = constructions::decompose_ccz(&c);
            }
            emit(&c, a.out.as_deref())
        }
        Command::Iqp(IqpCmd::Supremacy(a)) => {
            let cfg = config("iqp supremacy", budget, &a);
            let p = IqpPolynomial::parse(&read(&a.poly)?)?;
            let l_comp = constructions::decompose_ccz(&constructions::encode_iqp(&p)).len();
            let inst = supremacy::build_instance(&p, a.padding.unwrap_or(l_comp), budget)?;
            let s = analyze(&inst.hamiltonian, budget)?;
            let plan = certification::plan(a.ft, a.alpha, a.eps, &s, inst.hamiltonian.num_terms(), inst.hamiltonian.interaction_strength())?;
            let mut rho = inst.ground_state()?;
            if a.noise > 0.0 {
                rho = rho.apply_noise(NoiseSpec::Depolarizing { p: a.noise })?;
            }
            let outcome = supremacy::run_procedure(&inst, &s, &rho, &plan, a.seed, a.shots)?;
            let body = json!({
                "instance": {
                    "n_vars": p.n_vars,
                    "l_comp": inst.l_comp,
                    "l_total": inst.l_total,
                    "padding": inst.padding,
                    "c": inst.c,
                    "dim": inst.ground.dim(),
                    "ngap": p.ngap()?,
                },
                "plan": plan,
                "outcome": outcome,
            });
            emit(&Report { config: &cfg, body }, a.out.as_deref())
        }
        Command::Sample(a) => {
            let cfg = config("sample", budget, &a);
            let h: LocalHamiltonian = read_json(&a.ham)?;
            let rho = load_state(&a.state, &h)?;
            let sc = SamplerConfig::new(a.seed, a.shots)?;
            let records = sampling::sample_all(&rho, &h, &sc)?;
            let est = sampling::estimate_energy(&records, h.num_terms(), h.energy_offset())?;
            if let Some(p) = &a.csv {
                let mut buf = Vec::new();
                sampling::write_csv(&records, &mut buf)?;
                fs::write(p, buf)?;
            }
            let body = json!({
                "estimate": est,
                "exact_energy": sampling::exact_energy(&rho, &h)?,
                "rng": ffcert::rng::RNG_ID,
            });
            emit(&Report { config: &cfg, body }, a.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // the global pool can only be set once; later calls are harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(1)
        }
    }
}

//! Acceptance checks, one line per criterion. Runs without the libtest harness
//! so the lines always reach stdout.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ffcert::certification::{
    self, evaluate_protocol_regions, fidelity_bounds, CertificationReport, Certifier, PhaseEstimationConfig, Region,
    Verdict,
};
use ffcert::circuit::{CircuitProgram, Gate, GateKind, InputState};
use ffcert::constructions::{self, examples, ClockEncoding, IqpPolynomial, PenaltyWeights};
use ffcert::montecarlo::{run_montecarlo, MonteCarloConfig, MonteCarloReport};
use ffcert::operators::DEFAULT_BUDGET;
use ffcert::sampling::{self, SamplerConfig};
use ffcert::states::{NoiseSpec, PreparedState, PureState};
use ffcert::stats::{clopper_pearson, rate_at_most};
use ffcert::supremacy::{self, ledger};
use ffcert::{LocalHamiltonian, LocalTerm, SiteSystem, SpectralSummary};

type M = DMatrix<Complex64>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn dense(h: &LocalHamiltonian) -> M {
    h.assemble(DEFAULT_BUDGET).unwrap().to_dense()
}

fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> M {
    let a = M::from_fn(d, d, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

fn random_pure(d: usize, rng: &mut ChaCha8Rng) -> nalgebra::DVector<Complex64> {
    let v = nalgebra::DVector::from_fn(d, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

fn expect(m: &M, rho: &M) -> f64 {
    (m * rho).trace().re
}

// 1
fn fidelity_sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    while cases < 1000 {
        let d = rng.random_range(2..=64);
        let hm = random_hermitian(d, &mut rng);
        let sys = SiteSystem::new([("s", d)]).unwrap();
        let h = LocalHamiltonian::new(sys, vec![LocalTerm::new(["s"], hm.clone()).unwrap()], 0.0).unwrap();
        let s = h.analyze().unwrap();
        // oracle spectrum straight from nalgebra
        let eig = hm.clone().symmetric_eigen();
        let mut vals: Vec<(f64, usize)> = eig.eigenvalues.iter().copied().enumerate().map(|(i, v)| (v, i)).collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (e0, e1, emax) = (vals[0].0, vals[1].0, vals[d - 1].0);
        if e1 - e0 < 1e-6 {
            continue;
        }
        if !s.unique_ground || (s.gap - (e1 - e0)).abs() > 1e-9 || (s.norm - (emax - e0)).abs() > 1e-9 {
            return outcome(false, format!("spectral summary disagrees with oracle at d = {d}"));
        }
        let g = eig.eigenvectors.column(vals[0].1).into_owned();
        // mix the ground state with random pure states until the energy sits below E1
        let w0 = rng.random::<f64>();
        let mut rho = &g * g.adjoint() * Complex64::new(w0, 0.0);
        let k = rng.random_range(1..=3);
        let mut rest = 1.0 - w0;
        for i in 0..k {
            let w = if i + 1 == k { rest } else { rest * rng.random::<f64>() };
            rest -= w;
            let v = random_pure(d, &mut rng);
            rho += &v * v.adjoint() * Complex64::new(w, 0.0);
        }
        let e = expect(&hm, &rho) - e0;
        if e + e0 >= e1 {
            continue;
        }
        let f = (g.adjoint() * &rho * &g)[(0, 0)].re;
        let (fmin, fmax) = fidelity_bounds(e, s.gap, s.norm);
        worst = worst.max(fmin - f).max(f - fmax);
        cases += 1;
    }
    outcome(worst <= 1e-9, format!("{cases} cases, worst violation {worst:.2e}"))
}

struct Fixture {
    h: LocalHamiltonian,
    s: SpectralSummary,
    values: Vec<f64>,
    vectors: M,
}

fn fixture() -> Fixture {
    let h = examples::fk_demo().unwrap();
    let s = h.analyze().unwrap();
    let eig = dense(&h).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = M::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Fixture { h, s, values, vectors }
}

impl Fixture {
    /// `F|g⟩⟨g| + (1-F)|v_k⟩⟨v_k|` for the eigenvector of index `k`.
    fn mixture(&self, f: f64, k: usize) -> PreparedState {
        let g = PureState::normalized(self.vectors.column(0).into_owned()).unwrap();
        let v = PureState::normalized(self.vectors.column(k).into_owned()).unwrap();
        PreparedState::from_ensemble(self.h.system().dims(), &[(f, g), (1.0 - f, v)]).unwrap()
    }
}

// 2
fn sample_complexity() -> Outcome {
    let fx = fixture();
    let (n, j) = (fx.h.num_terms(), fx.h.interaction_strength());
    if n != 4 || fx.h.system().len() != 3 || (j - 1.0).abs() > 1e-12 {
        return outcome(false, "fixture is not 3 qubits / 4 terms / J = 1".into());
    }
    let p = certification::plan(0.7, 0.1, 0.1, &fx.s, n, j).unwrap();
    let gap = fx.values[1] - fx.values[0];
    let m_oracle = ((n * n) as f64 / (2.0 * gap * gap * 0.01) * (-(n as f64 + 1.0) / 0.9f64.ln()).ln()).ceil() as u64;
    if p.m != m_oracle {
        return outcome(false, format!("m = {} but closed form gives {m_oracle}", p.m));
    }
    let mut worst = 0.0f64;
    let mut total = 0;
    for (i, noise) in [0.0, 0.3, 0.7].into_iter().enumerate() {
        let ground = fx.mixture(1.0, 1);
        let rho = ground.apply_noise(NoiseSpec::Depolarizing { p: noise }).unwrap();
        let cert = Certifier::new(&fx.h, &fx.s, &rho, &p).unwrap();
        let rep = run_montecarlo(&cert, &MonteCarloConfig { repetitions: 500, master_seed: 100 + i as u64 }).unwrap();
        if !rate_at_most(rep.estimation_failures, 500, 0.1, 0.99) {
            return outcome(false, format!("noise {noise}: {} / 500 estimates off by more than gap*eps", rep.estimation_failures));
        }
        worst = worst.max(rep.estimation_failures as f64 / 500.0);
        total += rep.estimation_failures;
    }
    outcome(true, format!("m = {}, failures {total} / 1500, worst rate {worst:.3}", p.m))
}

// 3
fn completeness_soundness() -> Outcome {
    let fx = fixture();
    let (f_t, alpha, eps) = (0.7, 0.1, 0.1);
    let p = certification::plan(f_t, alpha, eps, &fx.s, fx.h.num_terms(), fx.h.interaction_strength()).unwrap();
    let top = fx.values.len() - 1;
    let cases = [
        (1.0, 1, Region::MustAccept),
        (f_t + p.delta, top, Region::MustAccept),
        (f_t + p.delta, 1, Region::MustAccept),
        (f_t, 1, Region::MustReject),
        (f_t, top, Region::MustReject),
        (f_t / 2.0, 1, Region::MustReject),
    ];
    let mut lines = Vec::new();
    let mut accepted = 0u64;
    let mut accepted_good = 0u64;
    for (i, &(f, k, region)) in cases.iter().enumerate() {
        let rho = fx.mixture(f, k);
        let cert = Certifier::new(&fx.h, &fx.s, &rho, &p).unwrap();
        let rep = run_montecarlo(&cert, &MonteCarloConfig { repetitions: 500, master_seed: 7 + i as u64 }).unwrap();
        if rep.region != Some(region) || evaluate_protocol_regions(f, &p) != region {
            return outcome(false, format!("F = {f} classified as {:?}", rep.region));
        }
        let hits = if region == Region::MustAccept { rep.accepts } else { rep.rejects };
        let ci = clopper_pearson(hits, 500, 0.99);
        if ci.upper < 1.0 - alpha {
            return outcome(false, format!("F = {f}: only {hits} / 500 correct"));
        }
        accepted += rep.accepts;
        if rep.true_fidelity.unwrap() > f_t {
            accepted_good += rep.accepts;
        }
        lines.push(format!("{hits}"));
    }
    let one_sided = accepted == 0 || accepted_good as f64 / accepted as f64 >= 1.0 - alpha;
    outcome(
        one_sided,
        format!("delta = {:.4}, correct per case [{}] / 500, accepted with F > F_T {accepted_good}/{accepted}", p.delta, lines.join(", ")),
    )
}

fn history_oracle(c: &CircuitProgram) -> nalgebra::DVector<Complex64> {
    let l = c.len();
    let dw = 1usize << c.num_qubits();
    let mut out = nalgebra::DVector::zeros(dw * (l + 1));
    for t in 0..=l {
        let w = match t {
            0 => c.input_vector(),
            _ => c.with_gates(c.gates()[..t].to_vec()).unwrap().unitary().unwrap() * c.input_vector(),
        };
        for a in 0..dw {
            out[a * (l + 1) + t] = w[a];
        }
    }
    out / Complex64::new(((l + 1) as f64).sqrt(), 0.0)
}

fn random_circuit(rng: &mut ChaCha8Rng) -> CircuitProgram {
    let k = rng.random_range(1..=3);
    let l = rng.random_range(1..=8);
    let gates = (0..l)
        .map(|_| {
            let choice = rng.random_range(0..8);
            let kind = match (choice, k) {
                (0, _) => GateKind::H,
                (1, _) => GateKind::T,
                (2, _) => GateKind::Ry(rng.random::<f64>() * 3.0),
                (3, _) => GateKind::I,
                (4 | 5, 2..) => GateKind::Cnot,
                (6, 2..) => GateKind::Cs,
                (7, 3) => GateKind::Ccz,
                _ => GateKind::X,
            };
            let mut targets: Vec<usize> = (0..k).collect();
            for i in (1..k).rev() {
                targets.swap(i, rng.random_range(0..=i));
            }
            targets.truncate(kind.arity());
            Gate::new(kind, targets)
        })
        .collect();
    let input = InputState::Basis((0..k).map(|_| rng.random_range(0..2)).collect());
    let c = constructions::decompose_ccz(&CircuitProgram::new(k, gates, input).unwrap());
    c.with_gates(c.gates()[..c.len().min(8)].to_vec()).unwrap()
}

// 4
fn feynman_kitaev() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_energy: f64 = 0.0;
    let mut worst_fid: f64 = 1.0;
    for _ in 0..60 {
        let c = random_circuit(&mut rng);
        let h = constructions::build_feynman_kitaev(&c, ClockEncoding::Compact, PenaltyWeights::default()).unwrap();
        let psi = history_oracle(&c);
        let lib = constructions::history_state(&c, ClockEncoding::Compact).unwrap();
        if (lib.amplitudes() - &psi).norm() > 1e-10 {
            return outcome(false, format!("history state differs for K = {}, L = {}", c.num_qubits(), c.len()));
        }
        let hd = dense(&h);
        let energy = (psi.adjoint() * &hd * &psi)[(0, 0)].re;
        worst_energy = worst_energy.max(energy);
        let s = h.analyze().unwrap();
        let ff = h.verify_frustration_free(&s, 1e-8).unwrap();
        if !ff.frustration_free || !s.unique_ground {
            return outcome(false, format!("K = {}, L = {}: ff {} unique {}", c.num_qubits(), c.len(), ff.frustration_free, s.unique_ground));
        }
        let g = s.ground_state().unwrap();
        worst_fid = worst_fid.min((g.adjoint() * &psi)[(0, 0)].norm_sqr());
    }
    // gap scaling of identity circuits
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for l in 2..=8 {
        let c = CircuitProgram::new(1, (0..l).map(|_| Gate::new(GateKind::I, vec![0])).collect(), InputState::zeros(1)).unwrap();
        let h = constructions::build_feynman_kitaev(&c, ClockEncoding::Compact, PenaltyWeights::default()).unwrap();
        xs.push((l as f64).ln());
        ys.push(h.analyze().unwrap().gap.ln());
    }
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let pass = worst_energy <= 1e-10 && worst_fid >= 1.0 - 1e-9 && (-2.5..=-1.5).contains(&slope);
    outcome(pass, format!("60 circuits, max history energy {worst_energy:.1e}, min fidelity 1-{:.1e}, gap slope {slope:.3}", 1.0 - worst_fid))
}

/// Gap by direct enumeration of the polynomial.
fn ngap_oracle(p: &IqpPolynomial) -> f64 {
    let n = p.n_vars;
    let bit = |x: u64, i: usize| (x >> (n - i)) & 1 == 1;
    let mut total: i64 = 0;
    for x in 0..1u64 << n {
        let mut f = false;
        for m in &p.cubic {
            f ^= bit(x, m[0]) && bit(x, m[1]) && bit(x, m[2]);
        }
        for m in &p.quadratic {
            f ^= bit(x, m[0]) && bit(x, m[1]);
        }
        for &i in &p.linear {
            f ^= bit(x, i);
        }
        total += if f { -1 } else { 1 };
    }
    total as f64 / (1u64 << n) as f64
}

// 5
fn iqp_identity() -> Outcome {
    let mut worst_amp: f64 = 0.0;
    let mut worst_prob: f64 = 0.0;
    for i in 0..200u64 {
        let n = 1 + (i % 10) as usize;
        let p = IqpPolynomial::random(n, i).unwrap();
        let ngap = ngap_oracle(&p);
        if (p.ngap().unwrap() - ngap).abs() > 1e-12 {
            return outcome(false, format!("ngap mismatch for n = {n}"));
        }
        for c in [constructions::encode_iqp(&p), constructions::decompose_ccz(&constructions::encode_iqp(&p))] {
            let amp = c.final_state()[0];
            worst_amp = worst_amp.max((amp - Complex64::new(ngap, 0.0)).norm());
            worst_prob = worst_prob.max((amp.norm_sqr() - ngap * ngap).abs());
        }
    }
    outcome(worst_amp <= 1e-9 && worst_prob <= 1e-10, format!("200 polynomials, amplitude error {worst_amp:.1e}, probability error {worst_prob:.1e}"))
}

/// `2ε/c < 1/192` decided on the exact binary expansions of the floats.
fn ledger_oracle(eps: f64, c: f64) -> bool {
    let exact = |x: f64| {
        let (m, e, s) = num_traits::Float::integer_decode(x);
        assert_eq!(s, 1);
        (BigInt::from(m), e)
    };
    let (me, ee) = exact(eps);
    let (mc, ec) = exact(c);
    // 384·me·2^ee < mc·2^ec
    let shift = ee as i32 - ec as i32;
    let lhs = BigInt::from(384) * me;
    if shift >= 0 {
        (lhs << shift as usize) < mc
    } else {
        lhs < (mc << (-shift) as usize)
    }
}

// 6
fn projection_contraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let polys: Vec<IqpPolynomial> = (0..4).map(|i| IqpPolynomial::random(1 + i % 3, 60 + i as u64).unwrap()).collect();
    let mut worst: f64 = f64::NEG_INFINITY;
    for k in 0..200 {
        let p = &polys[k % polys.len()];
        let l_comp = constructions::decompose_ccz(&constructions::encode_iqp(p)).len();
        let inst = supremacy::build_instance(p, l_comp, DEFAULT_BUDGET).unwrap();
        let c_oracle = (l_comp + 1) as f64 / (2 * l_comp + 1) as f64;
        if (inst.c - c_oracle).abs() > 1e-12 {
            return outcome(false, format!("c = {} expected {c_oracle}", inst.c));
        }
        let rho0 = inst.ground_state().unwrap();
        let q = rng.random::<f64>() * 0.5;
        let noise = match k % 3 {
            0 => NoiseSpec::Depolarizing { p: q },
            1 => NoiseSpec::Dephasing { p: q, basis: ffcert::states::Basis::Z },
            _ => {
                let d = rho0.dim();
                let v = random_pure(d, &mut rng);
                let other = PreparedState::pure(rho0.dims(), PureState::normalized(v).unwrap()).unwrap();
                NoiseSpec::GroundMix { p: q, other: Box::new(other) }
            }
        };
        let rho_p = rho0.apply_noise(noise).unwrap();
        let (pi0, _) = inst.project(&rho0).unwrap();
        let (pip, _) = inst.project(&rho_p).unwrap();
        let lhs = supremacy::trace_norm_distance(&pi0, &pip);
        let rhs = supremacy::trace_norm_distance(&rho0.to_dense().unwrap(), &rho_p.to_dense().unwrap());
        worst = worst.max(lhs - 2.0 / inst.c * rhs);
    }
    let mut lrng = ChaCha8Rng::seed_from_u64(66);
    let mut checks: Vec<(f64, f64)> = (0..2000)
        .map(|_| (lrng.random::<f64>() * 0.01, 0.05 + 0.95 * lrng.random::<f64>()))
        .collect();
    for c in [0.75, 0.5, 17.0 / 33.0, 1.0] {
        let edge = c / 384.0;
        checks.push((edge, c));
        checks.push((f64::from_bits(edge.to_bits() - 1), c));
        checks.push((f64::from_bits(edge.to_bits() + 1), c));
    }
    let disagreements = checks.iter().filter(|&&(e, c)| ledger(e, c).unwrap().pass != ledger_oracle(e, c)).count();
    outcome(
        worst <= 1e-9 && disagreements == 0,
        format!("200 preparations, max excess {worst:.2e}; ledger {disagreements} / {} disagreements", checks.len()),
    )
}

// 7
fn phase_estimation() -> Outcome {
    let h = examples::ghz_stabilizer(3).unwrap();
    let s = h.analyze().unwrap();
    let g = PureState::normalized(s.ground_state().unwrap().clone()).unwrap();
    let ground = PreparedState::pure(h.system().dims(), g).unwrap();
    let (alpha, eps) = (0.05, 0.02);
    let shots = certification::phase_estimation_shots(alpha, eps);
    let mut lines = Vec::new();
    let mut pass = shots == ((2.0f64 / alpha).ln() / (2.0 * eps * eps)).ceil() as u64;
    for (j, p) in [0.0, 0.2, 0.5, 0.9].into_iter().enumerate() {
        let rho = ground.apply_noise(NoiseSpec::Depolarizing { p }).unwrap();
        let exact = 1.0 - p + p / 8.0;
        let mut failures = 0;
        for run in 0..200u64 {
            let cfg = PhaseEstimationConfig { t_qubits: 10, beta: 0.01, shots, seed: 1000 * j as u64 + run };
            let r = certification::phase_estimation_fidelity(&rho, &h, &s, &cfg).unwrap();
            if (r.f_hat - exact).abs() > eps {
                failures += 1;
            }
        }
        pass &= failures as f64 / 200.0 <= alpha;
        lines.push(format!("p={p}: {failures}"));
    }
    outcome(pass, format!("{shots} shots, failures out of 200 [{}]", lines.join(", ")))
}

fn assert_same(label: &str, a: &str, b: &str) -> Option<String> {
    (a != b).then(|| format!("{label} differs on regeneration"))
}

// 8
fn reproducibility() -> Outcome {
    let fx = fixture();
    let p = certification::plan(0.7, 0.1, 0.1, &fx.s, fx.h.num_terms(), fx.h.interaction_strength()).unwrap();
    let rho = fx.mixture(0.85, 2);
    let mut problems = Vec::new();

    let report = certification::certify(&fx.h, &fx.s, &rho, &p, 42).unwrap();
    let text = serde_json::to_string_pretty(&report).unwrap();
    let echo: CertificationReport = serde_json::from_str(&text).unwrap();
    let again = certification::certify(&fx.h, &fx.s, &rho, &echo.plan, echo.seed).unwrap();
    problems.extend(assert_same("certify report", &text, &serde_json::to_string_pretty(&again).unwrap()));

    let cert = Certifier::new(&fx.h, &fx.s, &rho, &p).unwrap();
    let mc = run_montecarlo(&cert, &MonteCarloConfig { repetitions: 40, master_seed: 9 }).unwrap();
    let text = serde_json::to_string_pretty(&mc).unwrap();
    let echo: MonteCarloReport = serde_json::from_str(&text).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let again = pool.install(|| run_montecarlo(&cert, &echo.config).unwrap());
    problems.extend(assert_same("monte carlo report", &text, &serde_json::to_string_pretty(&again).unwrap()));

    let cfg = SamplerConfig::new(5, 64).unwrap();
    let csv = |cfg: &SamplerConfig| {
        let mut buf = Vec::new();
        sampling::write_csv(&sampling::sample_all(&rho, &fx.h, cfg).unwrap(), &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    };
    problems.extend(assert_same("measurement csv", &csv(&cfg), &csv(&cfg)));

    let poly = IqpPolynomial::random(2, 3).unwrap();
    let l_comp = constructions::decompose_ccz(&constructions::encode_iqp(&poly)).len();
    let inst = supremacy::build_instance(&poly, l_comp, DEFAULT_BUDGET).unwrap();
    let s = inst.hamiltonian.analyze().unwrap();
    let sp = certification::plan(0.9, 0.05, 0.05, &s, inst.hamiltonian.num_terms(), inst.hamiltonian.interaction_strength()).unwrap();
    let rho_p = inst.ground_state().unwrap().apply_noise(NoiseSpec::Depolarizing { p: 0.1 }).unwrap();
    for seed in 0..4 {
        let run = || serde_json::to_string(&supremacy::run_procedure(&inst, &s, &rho_p, &sp, seed, 50).unwrap()).unwrap();
        problems.extend(assert_same("procedure outcome", &run(), &run()));
    }
    let verdicts_stable = mc.rows.iter().all(|r| {
        certification::certify(&fx.h, &fx.s, &rho, &p, r.seed).unwrap().verdict == r.verdict
    });
    if !verdicts_stable {
        problems.push("monte carlo rows disagree with single runs".into());
    }
    let accepted = mc.rows.iter().filter(|r| r.verdict == Verdict::Accept).count();
    outcome(problems.is_empty(), if problems.is_empty() { format!("4 report kinds regenerated identically ({accepted}/40 accepts)") } else { problems.join("; ") })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 8] = [
        ("fidelity sandwich", fidelity_sandwich, 60),
        ("sample complexity", sample_complexity, 300),
        ("completeness and soundness", completeness_soundness, 600),
        ("feynman-kitaev correctness", feynman_kitaev, 120),
        ("iqp amplitude identity", iqp_identity, 120),
        ("projection contraction", projection_contraction, 120),
        ("phase estimation estimator", phase_estimation, 120),
        ("reproducibility", reproducibility, 60),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= Duration::from_secs(limit);
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({}; {:.2}s of {limit}s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Certification of ground-state preparations from local energy estimates.
//!
//! A verifier fixes a threshold fidelity `F_T`, failure probability `α` and
//! estimation error `ε`, measures each of the `n` local terms `m` times,
//! forms the energy estimate `E*` and accepts iff the lower fidelity bound
//! `F*_min = 1 - E*/Δ` reaches `F_T + ε`.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CVector};
use crate::operators::{LocalHamiltonian, SpectralSummary};
use crate::rng::{self, stream_rng};
use crate::sampling::{self, outcome_table, TermDistribution};
use crate::states::{fidelity, PreparedState, PureState};

/// Slack for the `ε ≤ (1-F_T)/2` check, so that `0.05 ≤ (1-0.9)/2` holds.
pub const PRECONDITION_TOL: f64 = 1e-12;

/// Slack for region boundaries computed in floating point.
pub const REGION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapSource {
    Computed,
    Supplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputsSummary {
    /// Number of local terms.
    pub n: usize,
    /// `max_λ ‖h_λ‖`.
    #[serde(rename = "J")]
    pub j: f64,
    /// Spectral gap `Δ`.
    pub gap: f64,
    /// `‖H‖`.
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationPlan {
    #[serde(rename = "F_T")]
    pub f_t: f64,
    pub alpha: f64,
    pub epsilon: f64,
    /// Shots per term.
    pub m: u64,
    /// Unrounded shot count.
    pub m_real: f64,
    pub delta: f64,
    pub inputs_summary: InputsSummary,
    pub gap_source: GapSource,
}

/// `(J²n²/(2Δ²ε²))·ln[-(n+1)/ln(1-α)]`.
pub fn shots_formula(n: usize, j: f64, gap: f64, epsilon: f64, alpha: f64) -> f64 {
    let nf = n as f64;
    (j * j * nf * nf / (2.0 * gap * gap * epsilon * epsilon)) * (-(nf + 1.0) / (1.0 - alpha).ln()).ln()
}

/// Same count written in terms of an energy tolerance: `(J²n²/(2ε_E²))·ln[(n+1)/ln(1/ᾱ)]`, with `ε_E` an energy error.
pub fn shots_energy_form(n: usize, j: f64, energy_error: f64, alpha_bar: f64) -> f64 {
    let nf = n as f64;
    (j * j * nf * nf / (2.0 * energy_error * energy_error)) * ((nf + 1.0) / (1.0 / alpha_bar).ln()).ln()
}

/// `(1-F_T)(1-Δ/‖H‖) + 2εΔ/‖H‖`.
pub fn fidelity_gap(f_t: f64, epsilon: f64, gap: f64, norm: f64) -> f64 {
    let r = gap / norm;
    (1.0 - f_t) * (1.0 - r) + 2.0 * epsilon * r
}

/// Plan with `Δ` and `‖H‖` taken from `summary`.
pub fn plan(f_t: f64, alpha: f64, epsilon: f64, summary: &SpectralSummary, n: usize, j: f64) -> Result<CertificationPlan> {
    plan_with_gap(f_t, alpha, epsilon, summary, n, j, None)
}

/// Plan, optionally with a user-supplied gap.
pub fn plan_with_gap(
    f_t: f64,
    alpha: f64,
    epsilon: f64,
    summary: &SpectralSummary,
    n: usize,
    j: f64,
    supplied_gap: Option<f64>,
) -> Result<CertificationPlan> {
    if !summary.unique_ground {
        return Err(Error::DegenerateGround);
    }
    let bad = |msg: String| Err(Error::InvalidParameter(msg));
    if !(f_t > 0.0 && f_t < 1.0) {
        return bad(format!("F_T = {f_t} outside (0, 1)"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return bad(format!("alpha = {alpha} outside (0, 1)"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return bad(format!("epsilon = {epsilon} must be positive"));
    }
    if epsilon > (1.0 - f_t) / 2.0 + PRECONDITION_TOL {
        return bad(format!("epsilon = {epsilon} exceeds (1 - F_T)/2 = {}", (1.0 - f_t) / 2.0));
    }
    if n == 0 {
        return bad("no local terms".into());
    }
    if !(j > 0.0 && j.is_finite()) {
        return bad(format!("J = {j} must be positive"));
    }
    let (gap, gap_source) = match supplied_gap {
        Some(g) => (g, GapSource::Supplied),
        None => (summary.gap, GapSource::Computed),
    };
    if !(gap > 0.0 && gap.is_finite()) {
        return bad(format!("gap = {gap} must be positive"));
    }
    let norm = summary.norm;
    if !(norm >= gap) {
        return bad(format!("norm {norm} below gap {gap}"));
    }
    let m_real = shots_formula(n, j, gap, epsilon, alpha);
    if !m_real.is_finite() || m_real >= u64::MAX as f64 {
        return bad(format!("shot count {m_real} not representable"));
    }
    let m = (m_real.ceil() as u64).max(1);
    Ok(CertificationPlan {
        f_t,
        alpha,
        epsilon,
        m,
        m_real,
        delta: fidelity_gap(f_t, epsilon, gap, norm),
        inputs_summary: InputsSummary { n, j, gap, norm },
        gap_source,
    })
}

/// `(F_min, F_max) = (1 - E/Δ, 1 - E/‖H‖)` with `E` clipped at 0.
pub fn fidelity_bounds(energy: f64, gap: f64, norm: f64) -> (f64, f64) {
    let e = energy.max(0.0);
    (1.0 - e / gap, 1.0 - e / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Accept unless `F*_min < F_T + ε`.
pub fn verdict(f_min_star: f64, plan: &CertificationPlan) -> Verdict {
    if f_min_star < plan.f_t + plan.epsilon {
        Verdict::Reject
    } else {
        Verdict::Accept
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub plan: CertificationPlan,
    #[serde(rename = "E_star")]
    pub e_star: f64,
    #[serde(rename = "E_star_raw")]
    pub e_star_raw: f64,
    #[serde(rename = "F_min_star")]
    pub f_min_star: f64,
    #[serde(rename = "F_max_star")]
    pub f_max_star: f64,
    pub verdict: Verdict,
    pub seed: u64,
    pub rng: String,
    pub gap_source: GapSource,
    pub true_fidelity: Option<f64>,
    pub per_term_means: Vec<f64>,
    /// Whether `E*` lies below the first excited energy.
    pub below_first_excited: bool,
}

/// Sampling data prepared once for repeated certification runs on one state.
#[derive(Debug, Clone)]
pub struct Certifier {
    plan: CertificationPlan,
    table: Vec<TermDistribution>,
    offset: f64,
    first_excited: f64,
    true_fidelity: Option<f64>,
}

impl Certifier {
    pub fn new(
        h: &LocalHamiltonian,
        summary: &SpectralSummary,
        rho: &PreparedState,
        plan: &CertificationPlan,
    ) -> Result<Self> {
        if plan.inputs_summary.n != h.num_terms() {
            return Err(Error::InvalidParameter(format!(
                "plan is for {} terms, Hamiltonian has {}",
                plan.inputs_summary.n,
                h.num_terms()
            )));
        }
        if summary.dim != rho.dim() {
            return Err(Error::DimensionMismatch { expected: summary.dim, found: rho.dim() });
        }
        let table = outcome_table(rho, h)?;
        let true_fidelity = match summary.ground_state() {
            Some(g) => Some(fidelity(rho, &PureState::normalized(g.clone())?)?),
            None => None,
        };
        Ok(Self {
            plan: plan.clone(),
            table,
            offset: h.energy_offset(),
            first_excited: summary.first_excited,
            true_fidelity,
        })
    }

    pub fn plan(&self) -> &CertificationPlan {
        &self.plan
    }

    pub fn true_fidelity(&self) -> Option<f64> {
        self.true_fidelity
    }

    /// Exact `Tr[Hρ]`.
    pub fn exact_energy(&self) -> f64 {
        self.table.iter().map(TermDistribution::mean).sum::<f64>() - self.offset
    }

    pub fn run(&self, seed: u64) -> Result<CertificationReport> {
        let counts = sampling::sample_counts_all(&self.table, self.plan.m, seed);
        let est = sampling::estimate_from_counts(&counts, self.table.len(), self.offset)?;
        let inputs = &self.plan.inputs_summary;
        let e_star = est.e_star.max(0.0);
        let (f_min_star, f_max_star) = fidelity_bounds(e_star, inputs.gap, inputs.norm);
        Ok(CertificationReport {
            plan: self.plan.clone(),
            e_star,
            e_star_raw: est.e_star,
            f_min_star,
            f_max_star,
            verdict: verdict(f_min_star, &self.plan),
            seed,
            rng: rng::RNG_ID.to_string(),
            gap_source: self.plan.gap_source,
            true_fidelity: self.true_fidelity,
            per_term_means: est.per_term,
            below_first_excited: est.e_star < self.first_excited,
        })
    }
}

pub fn certify(
    h: &LocalHamiltonian,
    summary: &SpectralSummary,
    rho: &PreparedState,
    plan: &CertificationPlan,
    seed: u64,
) -> Result<CertificationReport> {
    Certifier::new(h, summary, rho, plan)?.run(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    MustAccept,
    MustReject,
    Indeterminate,
}

/// Accept region `F ≥ F_T + δ`, reject region `F ≤ F_T`.
pub fn evaluate_protocol_regions(f: f64, plan: &CertificationPlan) -> Region {
    if f >= plan.f_t + plan.delta - REGION_TOL {
        Region::MustAccept
    } else if f <= plan.f_t {
        Region::MustReject
    } else {
        Region::Indeterminate
    }
}

/// `⌈ln(2/α)/(2ε²)⌉`.
pub fn phase_estimation_shots(alpha: f64, epsilon: f64) -> u64 {
    ((2.0 / alpha).ln() / (2.0 * epsilon * epsilon)).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimationConfig {
    pub t_qubits: u32,
    /// Per-eigenvalue failure probability built into the ancilla count.
    pub beta: f64,
    pub shots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimationResult {
    pub f_hat: f64,
    pub stderr: f64,
    pub accept_probability: f64,
    pub exact_fidelity: f64,
    /// Largest acceptance probability of an excited eigenphase.
    pub leakage: f64,
    pub n_bits: u32,
    pub window_halfwidth: f64,
    pub scaled_gap: f64,
    /// Phase convention used for the simulated unitary.
    pub scaling: String,
    pub config: PhaseEstimationConfig,
}

/// Extra ancillas `⌈log₂(2 + 1/(2β))⌉`.
pub fn phase_estimation_overhead(beta: f64) -> u32 {
    (2.0 + 1.0 / (2.0 * beta)).log2().ceil() as u32
}

/// Probability that a `t`-qubit textbook phase estimation of phase `theta`
/// reads an estimate within `halfwidth` of 0, distances taken mod 1.
pub fn window_probability(theta: f64, t: u32, halfwidth: f64) -> f64 {
    let big = (1u64 << t) as f64;
    let reach = (halfwidth * big).floor() as i64;
    let mut p = 0.0;
    for k in -reach..=reach {
        let d = theta - k as f64 / big;
        let d = d - d.round();
        let s = (std::f64::consts::PI * d).sin();
        p += if s.abs() < 1e-15 {
            1.0
        } else {
            let num = (std::f64::consts::PI * big * d).sin();
            (num * num) / (big * big * s * s)
        };
    }
    p.min(1.0)
}

/// Ground-state fidelity estimated from simulated phase-estimation readouts.
///
/// `exp(-2πi·(H - E₀)/(2‖H‖))` has eigenphases in `[0, 1/2]`; an outcome is
/// counted as ground when the `n_bits`-bit estimate lies within `2^-n_bits`
/// of phase 0.
pub fn phase_estimation_fidelity(
    rho: &PreparedState,
    h: &LocalHamiltonian,
    summary: &SpectralSummary,
    cfg: &PhaseEstimationConfig,
) -> Result<PhaseEstimationResult> {
    if !(cfg.beta > 0.0 && cfg.beta < 1.0) {
        return Err(Error::InvalidParameter(format!("beta = {} outside (0, 1)", cfg.beta)));
    }
    if cfg.shots == 0 || cfg.t_qubits == 0 || cfg.t_qubits > 40 {
        return Err(Error::InvalidParameter("need shots ≥ 1 and 1 ≤ t ≤ 40".into()));
    }
    let overhead = phase_estimation_overhead(cfg.beta);
    if cfg.t_qubits <= overhead {
        return Err(Error::InvalidParameter(format!(
            "t = {} leaves no precision bits after {overhead} ancillas for beta",
            cfg.t_qubits
        )));
    }
    let n_bits = cfg.t_qubits - overhead;
    let halfwidth = 0.5f64.powi(n_bits as i32);
    let scale = 2.0 * summary.norm;
    let scaled_gap = summary.gap / scale;
    if !(halfwidth <= scaled_gap / 2.0) {
        return Err(Error::ResolutionTooCoarse { window: halfwidth, scaled_gap });
    }
    let dense = h.assemble(crate::linalg::DENSE_LIMIT)?.to_dense();
    let (values, vectors) = linalg::eigh(&dense);
    let e0 = summary.ground_energy;
    let mut accept = 0.0;
    let mut exact = 0.0;
    let mut leakage: f64 = 0.0;
    for (k, &e) in values.iter().enumerate() {
        let v: CVector = vectors.column(k).into_owned();
        let weight = rho.expectation_pure(&PureState::normalized(v)?)?;
        let ground = k < summary.ground_degeneracy();
        let theta = if ground { 0.0 } else { ((e - e0) / scale).clamp(0.0, 0.5) };
        let pw = window_probability(theta, cfg.t_qubits, halfwidth);
        if ground {
            exact += weight;
        } else {
            leakage = leakage.max(pw);
        }
        accept += weight * pw;
    }
    let p = accept.clamp(0.0, 1.0);
    let mut rng = stream_rng(cfg.seed, rng::stream::PHASE_ESTIMATION);
    let hits = Binomial::new(cfg.shots, p).expect("p in [0, 1]").sample(&mut rng);
    let f_hat = hits as f64 / cfg.shots as f64;
    Ok(PhaseEstimationResult {
        f_hat,
        stderr: (f_hat * (1.0 - f_hat) / cfg.shots as f64).sqrt(),
        accept_probability: p,
        exact_fidelity: exact,
        leakage,
        n_bits,
        window_halfwidth: halfwidth,
        scaled_gap,
        scaling: format!("U = exp(-2*pi*i*(H - E0)/(2*norm)), E0 = {e0}, norm = {}", summary.norm),
        config: *cfg,
    })
}

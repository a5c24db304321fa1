//! Certify-or-sample procedure for IQP circuits encoded in clock ground states.
//!
//! An IQP circuit `C_f` is CCZ-decomposed, padded with identities and
//! compiled with a compact clock. Its history state `ρ₀` carries weight
//! `c = (padding+1)/(L_total+1)` on clock values `t ≥ L_comp`, where the work
//! register already holds `C_f|0ⁿ⟩`. A fair coin either certifies the prepared
//! state or measures the clock and then the work register.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::certification::{certify, CertificationPlan, CertificationReport};
use crate::circuit::CircuitProgram;
use crate::constructions::{
    compile_feynman_kitaev, decompose_ccz, encode_iqp, history_state_with_budget, pad_identities, ClockEncoding,
    IqpPolynomial, PenaltyWeights,
};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, DENSE_LIMIT};
use crate::operators::{LocalHamiltonian, SpectralSummary};
use crate::rng::{self, stream_rng};
use crate::states::{PreparedState, PureState};

pub const RETRY_CAP: usize = 64;

/// Largest `n` for [`exact_output_distribution`].
pub const OUTPUT_MAX_VARS: usize = 14;

#[derive(Debug, Clone)]
pub struct SupremacyInstance {
    pub polynomial: IqpPolynomial,
    /// Encoded, CCZ-decomposed and padded program.
    pub circuit: CircuitProgram,
    pub hamiltonian: LocalHamiltonian,
    /// History state `ρ₀`.
    pub ground: PureState,
    pub l_comp: usize,
    pub l_total: usize,
    pub padding: usize,
    /// `Tr(Π ρ₀)`.
    pub c: f64,
}

impl SupremacyInstance {
    pub fn work_qubits(&self) -> usize {
        self.polynomial.n_vars
    }

    pub fn clock_dim(&self) -> usize {
        self.l_total + 1
    }

    pub fn dims(&self) -> &[usize] {
        self.hamiltonian.system().dims()
    }

    /// Whether basis index `i` has clock value `t ≥ L_comp`.
    pub fn completed(&self, i: usize) -> bool {
        i % self.clock_dim() >= self.l_comp
    }

    /// Diagonal projector `Π` as a dense matrix.
    pub fn pi_dense(&self) -> Result<CMatrix> {
        let d = self.ground.dim();
        if d > DENSE_LIMIT {
            return Err(Error::BudgetExceeded { dim: d as u128, budget: DENSE_LIMIT });
        }
        let diag = CVector::from_iterator(d, (0..d).map(|i| C64::new(if self.completed(i) { 1.0 } else { 0.0 }, 0.0)));
        Ok(CMatrix::from_diagonal(&diag))
    }

    pub fn ground_state(&self) -> Result<PreparedState> {
        PreparedState::pure(self.dims(), self.ground.clone())
    }

    /// `ΠρΠ / Tr(Πρ)` and `Tr(Πρ)`.
    pub fn project(&self, rho: &PreparedState) -> Result<(CMatrix, f64)> {
        let dense = rho.to_dense()?;
        let d = dense.nrows();
        let mut out = CMatrix::zeros(d, d);
        let mut weight = 0.0;
        for i in (0..d).filter(|&i| self.completed(i)) {
            weight += dense[(i, i)].re;
            for j in (0..d).filter(|&j| self.completed(j)) {
                out[(i, j)] = dense[(i, j)];
            }
        }
        if weight <= 0.0 {
            return Err(Error::InvalidState("state has no weight on completed clock values".into()));
        }
        Ok((out / C64::new(weight, 0.0), weight))
    }

    /// Work-register reduced state of a full-space density matrix.
    pub fn work_reduced(&self, rho: &CMatrix) -> CMatrix {
        let dc = self.clock_dim();
        let dw = 1usize << self.work_qubits();
        CMatrix::from_fn(dw, dw, |a, b| (0..dc).map(|t| rho[(a * dc + t, b * dc + t)]).sum())
    }

    /// `C_f|0ⁿ⟩`.
    pub fn output_state(&self) -> CVector {
        encode_iqp(&self.polynomial).final_state()
    }
}

pub fn build_instance(p: &IqpPolynomial, padding: usize, budget: usize) -> Result<SupremacyInstance> {
    let encoded = decompose_ccz(&encode_iqp(p));
    let l_comp = encoded.len();
    let circuit = pad_identities(&encoded, padding);
    let l_total = circuit.len();
    let compiled = compile_feynman_kitaev(&circuit, ClockEncoding::Compact, PenaltyWeights::default(), budget)?;
    let ground = history_state_with_budget(&circuit, ClockEncoding::Compact, budget)?;
    let dc = l_total + 1;
    let c: f64 = ground
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i % dc >= l_comp)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    Ok(SupremacyInstance {
        polynomial: p.clone(),
        circuit,
        hamiltonian: compiled.hamiltonian,
        ground,
        l_comp,
        l_total,
        padding,
        c,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetLedger {
    pub epsilon_prep: f64,
    pub c: f64,
    /// `(2/c)·epsilon_prep`.
    pub post_bound: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Exact value of `post_bound` as a reduced fraction.
    pub post_bound_exact: String,
    /// How `epsilon_prep` was obtained.
    pub conversion: String,
}

/// Error budget `(2/c)·ε` against `1/192`, compared in exact rational arithmetic.
pub fn ledger(epsilon_prep: f64, c: f64) -> Result<BudgetLedger> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidParameter(format!("c = {c} outside (0, 1]")));
    }
    if !(epsilon_prep >= 0.0 && epsilon_prep.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon_prep = {epsilon_prep} must be finite and ≥ 0")));
    }
    let eps = BigRational::from_float(epsilon_prep).expect("finite");
    let cr = BigRational::from_float(c).expect("finite");
    let post = BigRational::from_integer(BigInt::from(2)) * eps / cr;
    let threshold = BigRational::new(BigInt::from(1), BigInt::from(192));
    let pass = post < threshold;
    Ok(BudgetLedger {
        epsilon_prep,
        c,
        post_bound: post.to_f64().unwrap_or(f64::INFINITY),
        threshold: 1.0 / 192.0,
        pass,
        post_bound_exact: if post.is_zero() { "0".into() } else { post.to_string() },
        conversion: "given".into(),
    })
}

/// Ledger for a plan: accepted states have `F > F_T`, and `‖ρ₀-ρ‖₁ ≤ 2(1-F)^{1/2}`.
pub fn plan_ledger(plan: &CertificationPlan, c: f64) -> Result<BudgetLedger> {
    let eps = 2.0 * (1.0 - plan.f_t).max(0.0).sqrt();
    let mut l = ledger(eps.min(2.0), c)?;
    l.conversion = format!("epsilon_prep = 2*sqrt(1 - F_T) with F_T = {}", plan.f_t);
    Ok(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Certify,
    Sample,
}

/// Coin outcome for a seed.
pub fn flip_coin(coin_seed: u64) -> Branch {
    if stream_rng(coin_seed, rng::stream::COIN).random::<bool>() {
        Branch::Sample
    } else {
        Branch::Certify
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSamples {
    /// Work-register outcomes, qubit 0 most significant.
    pub samples: Vec<u64>,
    /// Clock measurements including rejected ones.
    pub attempts: u64,
}

impl BranchSamples {
    pub fn histogram(&self, n: usize) -> Vec<u64> {
        let mut h = vec![0u64; 1 << n];
        for &z in &self.samples {
            h[z as usize] += 1;
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcedureOutcome {
    pub branch: Branch,
    pub coin_seed: u64,
    pub certification: Option<CertificationReport>,
    pub samples: Option<BranchSamples>,
    pub budget: BudgetLedger,
}

/// Clock-then-work measurements on `rho`, rejecting clock values `t < L_comp`.
pub fn sample_completed(inst: &SupremacyInstance, rho: &PreparedState, shots: u64, seed: u64) -> Result<BranchSamples> {
    let pops = rho.diag_in_basis(crate::states::Basis::Z)?;
    let mut cdf = Vec::with_capacity(pops.len());
    let mut acc = 0.0;
    for p in &pops {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let total = acc;
    let dc = inst.clock_dim();
    let mut rng = stream_rng(seed, rng::stream::BRANCH_B);
    let mut samples = Vec::with_capacity(shots as usize);
    let mut attempts = 0u64;
    for _ in 0..shots {
        let mut tries = 0;
        loop {
            if tries == RETRY_CAP {
                return Err(Error::RetryCapExceeded(RETRY_CAP));
            }
            tries += 1;
            attempts += 1;
            let u = rng.random::<f64>() * total;
            let idx = cdf.partition_point(|&x| x <= u).min(cdf.len() - 1);
            if idx % dc >= inst.l_comp {
                samples.push((idx / dc) as u64);
                break;
            }
        }
    }
    Ok(BranchSamples { samples, attempts })
}

pub fn run_procedure(
    inst: &SupremacyInstance,
    summary: &SpectralSummary,
    rho_p: &PreparedState,
    plan: &CertificationPlan,
    coin_seed: u64,
    shots: u64,
) -> Result<ProcedureOutcome> {
    let branch = flip_coin(coin_seed);
    let budget = plan_ledger(plan, inst.c)?;
    let (certification, samples) = match branch {
        Branch::Certify => (Some(certify(&inst.hamiltonian, summary, rho_p, plan, coin_seed)?), None),
        Branch::Sample => (None, Some(sample_completed(inst, rho_p, shots, coin_seed)?)),
    };
    Ok(ProcedureOutcome { branch, coin_seed, certification, samples, budget })
}

/// `p(z) = |⟨z|C_f|0ⁿ⟩|²`.
pub fn exact_output_distribution(p: &IqpPolynomial) -> Result<Vec<f64>> {
    if p.n_vars > OUTPUT_MAX_VARS {
        return Err(Error::BudgetExceeded { dim: 1u128 << p.n_vars, budget: 1 << OUTPUT_MAX_VARS });
    }
    Ok(encode_iqp(p).final_state().iter().map(|a| a.norm_sqr()).collect())
}

/// Total variation distance between two distributions on the same support.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// `‖a - b‖₁` for Hermitian matrices.
pub fn trace_norm_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    linalg::trace_norm_hermitian(&(a - b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::DEFAULT_BUDGET;

    #[test]
    fn ledger_examples() {
        let l = ledger(0.0, 1.0).unwrap();
        assert!(l.pass && l.post_bound == 0.0);
        let l = ledger(1.0 / 1000.0, 0.5).unwrap();
        assert!(l.pass && (l.post_bound - 1.0 / 250.0).abs() < 1e-15);
        let l = ledger(1.0 / 192.0, 0.5).unwrap();
        assert!(!l.pass && (l.post_bound - 1.0 / 48.0).abs() < 1e-15);
        assert!(ledger(0.1, 0.0).is_err());
        assert!(ledger(-0.1, 0.5).is_err());
    }

    #[test]
    fn completed_weight_from_padding() {
        let zero = IqpPolynomial::zero(1).unwrap();
        // two Hadamards, padded by L
        let inst = build_instance(&zero, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(inst.l_comp, 2);
        assert!((inst.c - 3.0 / 5.0).abs() < 1e-12);
        assert!(inst.c >= 0.5);
    }

    #[test]
    fn output_distributions() {
        let zero = exact_output_distribution(&IqpPolynomial::zero(3).unwrap()).unwrap();
        assert!((zero[0] - 1.0).abs() < 1e-12);
        let x1 = exact_output_distribution(&IqpPolynomial::new(1, [], [], [1]).unwrap()).unwrap();
        assert!((x1[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coin_is_reproducible() {
        assert_eq!(flip_coin(42), flip_coin(42));
        let sample = (0..64).filter(|&s| flip_coin(s) == Branch::Sample).count();
        assert!(sample > 10 && sample < 54);
    }

    #[test]
    fn projection_recovers_output() {
        let p = IqpPolynomial::new(2, [], [[1, 2]], [1]).unwrap();
        let inst = build_instance(&p, 4, DEFAULT_BUDGET).unwrap();
        let (rho_i, w) = inst.project(&inst.ground_state().unwrap()).unwrap();
        assert!((w - inst.c).abs() < 1e-12);
        let work = inst.work_reduced(&rho_i);
        let out = inst.output_state();
        let f = out.dotc(&(&work * &out)).re;
        assert!(f > 1.0 - 1e-9);
    }
}

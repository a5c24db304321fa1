//! Simulated measurements of local terms on copies of a prepared state.
//!
//! Outcome probabilities of term `λ` are `Tr(ρ P_{λ,μ})`, evaluated on the
//! reduced density matrix of the support. Each term draws from its own
//! ChaCha20 stream `(seed, λ)`, so terms can be sampled in any order or in
//! parallel with identical results.

use std::io::Write;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::operators::{term_eigendecomposition, LocalHamiltonian};
use crate::rng::stream_rng;
use crate::states::PreparedState;

pub const PROBABILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub term_index: usize,
    pub shot_index: u64,
    pub outcome: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub shots_per_term: u64,
}

impl SamplerConfig {
    pub fn new(seed: u64, shots_per_term: u64) -> Result<Self> {
        if shots_per_term == 0 {
            return Err(Error::InvalidParameter("shots per term must be at least 1".into()));
        }
        Ok(Self { seed, shots_per_term })
    }
}

/// Outcome values of one term and their probabilities on a given state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDistribution {
    pub term_index: usize,
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl TermDistribution {
    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probabilities).map(|(v, p)| v * p).sum()
    }

    fn draw_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, p) in self.probabilities.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding slack above the last cumulative sum
        self.probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }
}

/// Outcome distributions of every term of `h` on `rho`.
pub fn outcome_table(rho: &PreparedState, h: &LocalHamiltonian) -> Result<Vec<TermDistribution>> {
    if rho.dims() != h.system().dims() {
        return Err(Error::DimensionMismatch { expected: h.system().total_dim() as usize, found: rho.dim() });
    }
    (0..h.num_terms())
        .into_par_iter()
        .map(|t| term_distribution(rho, h, t))
        .collect()
}

pub fn term_distribution(rho: &PreparedState, h: &LocalHamiltonian, term: usize) -> Result<TermDistribution> {
    let reduced = rho.reduced(h.support_indices(term))?;
    let spaces = term_eigendecomposition(&h.terms()[term]);
    let raw: Vec<f64> = spaces
        .iter()
        .map(|s| linalg::trace(&(&s.projector * &reduced)).re)
        .collect();
    let total: f64 = raw.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::ProbabilityLeak { term, total });
    }
    let clipped: Vec<f64> = raw.iter().map(|&p| p.max(0.0)).collect();
    let s: f64 = clipped.iter().sum();
    Ok(TermDistribution {
        term_index: term,
        values: spaces.iter().map(|s| s.value).collect(),
        probabilities: clipped.iter().map(|p| p / s).collect(),
    })
}

/// One record per simulated copy.
pub fn sample_distribution(dist: &TermDistribution, shots: u64, seed: u64) -> Vec<MeasurementRecord> {
    let mut rng = stream_rng(seed, dist.term_index as u64);
    (0..shots)
        .map(|i| MeasurementRecord {
            term_index: dist.term_index,
            shot_index: i,
            outcome: dist.values[dist.draw_index(rng.random::<f64>())],
        })
        .collect()
}

pub fn sample_term(
    rho: &PreparedState,
    h: &LocalHamiltonian,
    term: usize,
    shots: u64,
    seed: u64,
) -> Result<Vec<MeasurementRecord>> {
    if term >= h.num_terms() {
        return Err(Error::MissingTerm(term));
    }
    Ok(sample_distribution(&term_distribution(rho, h, term)?, shots, seed))
}

/// Records for every term, concatenated in term order.
pub fn sample_all(rho: &PreparedState, h: &LocalHamiltonian, cfg: &SamplerConfig) -> Result<Vec<MeasurementRecord>> {
    let table = outcome_table(rho, h)?;
    let per_term: Vec<Vec<MeasurementRecord>> = table
        .par_iter()
        .map(|d| sample_distribution(d, cfg.shots_per_term, cfg.seed))
        .collect();
    Ok(per_term.into_iter().flatten().collect())
}

/// Outcome histogram of one term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermCounts {
    pub term_index: usize,
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
}

impl TermCounts {
    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        let s: f64 = self.values.iter().zip(&self.counts).map(|(v, &k)| v * k as f64).sum();
        s / self.shots() as f64
    }
}

/// Multinomial histogram of `shots` draws, via successive conditional binomials.
pub fn sample_counts(dist: &TermDistribution, shots: u64, seed: u64) -> TermCounts {
    let mut rng = stream_rng(seed, dist.term_index as u64);
    let k = dist.values.len();
    let mut counts = vec![0u64; k];
    let mut remaining = shots;
    let mut mass = 1.0;
    for i in 0..k.saturating_sub(1) {
        if remaining == 0 {
            break;
        }
        let q = if mass > 0.0 { (dist.probabilities[i] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let x = Binomial::new(remaining, q).expect("q in [0, 1]").sample(&mut rng);
        counts[i] = x;
        remaining -= x;
        mass -= dist.probabilities[i];
    }
    if let Some(last) = counts.last_mut() {
        *last += remaining;
    }
    TermCounts { term_index: dist.term_index, values: dist.values.clone(), counts }
}

pub fn sample_counts_all(table: &[TermDistribution], shots: u64, seed: u64) -> Vec<TermCounts> {
    table.par_iter().map(|d| sample_counts(d, shots, seed)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub e_star: f64,
    pub per_term: Vec<f64>,
}

/// Per-term sample means and their sum minus `offset`.
pub fn estimate_energy(records: &[MeasurementRecord], num_terms: usize, offset: f64) -> Result<EnergyEstimate> {
    let mut sums = vec![0.0; num_terms];
    let mut counts = vec![0u64; num_terms];
    for r in records {
        if r.term_index >= num_terms {
            return Err(Error::MissingTerm(r.term_index));
        }
        sums[r.term_index] += r.outcome;
        counts[r.term_index] += 1;
    }
    if let Some(t) = counts.iter().position(|&k| k == 0) {
        return Err(Error::MissingTerm(t));
    }
    let per_term: Vec<f64> = sums.iter().zip(&counts).map(|(s, &k)| s / k as f64).collect();
    Ok(EnergyEstimate { e_star: per_term.iter().sum::<f64>() - offset, per_term })
}

pub fn estimate_from_counts(counts: &[TermCounts], num_terms: usize, offset: f64) -> Result<EnergyEstimate> {
    let mut per_term = vec![None; num_terms];
    for c in counts {
        if c.term_index >= num_terms {
            return Err(Error::MissingTerm(c.term_index));
        }
        if c.shots() > 0 {
            per_term[c.term_index] = Some(c.mean());
        }
    }
    let per_term = per_term
        .into_iter()
        .enumerate()
        .map(|(t, m)| m.ok_or(Error::MissingTerm(t)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(EnergyEstimate { e_star: per_term.iter().sum::<f64>() - offset, per_term })
}

/// `Tr[H ρ]` including the offset.
pub fn exact_energy(rho: &PreparedState, h: &LocalHamiltonian) -> Result<f64> {
    Ok(outcome_table(rho, h)?.iter().map(TermDistribution::mean).sum::<f64>() - h.energy_offset())
}

pub fn write_csv<W: Write>(records: &[MeasurementRecord], mut out: W) -> Result<()> {
    writeln!(out, "term_index,shot_index,outcome")?;
    for r in records {
        writeln!(out, "{},{},{}", r.term_index, r.shot_index, r.outcome)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CMatrix, CVector};
    use crate::operators::{LocalTerm, SiteSystem};
    use crate::states::PureState;

    fn z_on_one_qubit() -> LocalHamiltonian {
        let z = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        LocalHamiltonian::new(SiteSystem::qubits(1).unwrap(), vec![LocalTerm::new(["q0"], z).unwrap()], 0.0).unwrap()
    }

    #[test]
    fn zero_state_always_plus_one() {
        let h = z_on_one_qubit();
        let rho = PreparedState::pure(&[2], PureState::basis(2, 0)).unwrap();
        let recs = sample_term(&rho, &h, 0, 1000, 3).unwrap();
        assert!(recs.iter().all(|r| r.outcome == 1.0));
    }

    #[test]
    fn maximally_mixed_mean_near_zero() {
        let h = z_on_one_qubit();
        let rho = PreparedState::maximally_mixed(&[2]);
        let m = 100_000;
        let recs = sample_term(&rho, &h, 0, m, 11).unwrap();
        let est = estimate_energy(&recs, 1, 0.0).unwrap();
        // standard deviation of a single shot is 1
        assert!(est.e_star.abs() < 5.0 / (m as f64).sqrt());
        let counts = sample_counts(&outcome_table(&rho, &h).unwrap()[0], m, 11);
        assert_eq!(counts.shots(), m);
        assert!(counts.mean().abs() < 5.0 / (m as f64).sqrt());
    }

    #[test]
    fn estimate_arithmetic_and_missing_terms() {
        let recs = vec![
            MeasurementRecord { term_index: 0, shot_index: 0, outcome: 0.3 },
            MeasurementRecord { term_index: 1, shot_index: 0, outcome: 0.2 },
        ];
        let est = estimate_energy(&recs, 2, 0.0).unwrap();
        assert!((est.e_star - 0.5).abs() < 1e-15);
        assert!(matches!(estimate_energy(&recs, 3, 0.0), Err(Error::MissingTerm(2))));
        let zeros = vec![MeasurementRecord { term_index: 0, shot_index: 0, outcome: 0.0 }];
        assert_eq!(estimate_energy(&zeros, 1, 0.0).unwrap().e_star, 0.0);
    }

    #[test]
    fn reproducible_per_term_streams() {
        let h = crate::constructions::examples::ghz_stabilizer(3).unwrap();
        let rho = PreparedState::maximally_mixed(&[2, 2, 2]);
        let cfg = SamplerConfig::new(99, 500).unwrap();
        let a = sample_all(&rho, &h, &cfg).unwrap();
        let b = sample_all(&rho, &h, &cfg).unwrap();
        assert_eq!(a, b);
        // term 2 alone reproduces its slice of the joint run
        let only = sample_term(&rho, &h, 2, 500, 99).unwrap();
        assert_eq!(&a[1000..], &only[..]);
        let mut csv = Vec::new();
        write_csv(&a[..2], &mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("term_index,shot_index,outcome\n"));
    }

    #[test]
    fn exact_energy_matches_trace() {
        let h = crate::constructions::examples::ghz_stabilizer(3).unwrap();
        let rho = PreparedState::maximally_mixed(&[2, 2, 2]);
        let dense = h.assemble(1 << 10).unwrap().to_dense();
        let tr = linalg::trace(&(dense * rho.to_dense().unwrap())).re;
        assert!((exact_energy(&rho, &h).unwrap() - tr).abs() < 1e-12);
    }
}

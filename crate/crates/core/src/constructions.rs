//! Circuit-to-Hamiltonian compilers and IQP encodings.
//!
//! [`compile_feynman_kitaev`] turns a [`CircuitProgram`] into a clock
//! Hamiltonian whose ground state is the history state of the computation.
//! Work qubits are sites `w0..`, followed by the clock: a single site `clock`
//! of dimension `L+1` (compact) or qubits `c1..cL` holding `1^t 0^(L-t)`
//! (unary). Every term is a projector scaled by its penalty weight.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitProgram, Gate, GateKind, InputState};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, ONE};
use crate::operators::{LocalHamiltonian, LocalTerm, SiteSystem, DEFAULT_BUDGET};
use crate::rng::stream_rng;
use crate::states::PureState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClockEncoding {
    #[default]
    Compact,
    Unary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub input: f64,
    pub update: f64,
    pub clock: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self { input: 1.0, update: 1.0, clock: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkMetadata {
    pub encoding: ClockEncoding,
    pub weights: PenaltyWeights,
    pub work_qubits: usize,
    pub steps: usize,
    pub locality: usize,
    /// Input penalty is a single projector on the whole work register.
    pub nonlocal_input: bool,
    pub num_terms: usize,
}

#[derive(Debug, Clone)]
pub struct FkCompilation {
    pub hamiltonian: LocalHamiltonian,
    pub metadata: FkMetadata,
}

fn work_id(i: usize) -> String {
    format!("w{i}")
}

fn unary_id(t: usize) -> String {
    format!("c{t}")
}

fn system_for(c: &CircuitProgram, enc: ClockEncoding) -> Result<SiteSystem> {
    let l = c.len();
    let mut sites: Vec<(String, usize)> = (0..c.num_qubits()).map(|i| (work_id(i), 2)).collect();
    match enc {
        ClockEncoding::Compact => sites.push(("clock".into(), l + 1)),
        ClockEncoding::Unary => sites.extend((1..=l).map(|t| (unary_id(t), 2))),
    }
    SiteSystem::new(sites)
}

fn ket_bra(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

/// Clock factors of step `t`: support, `|t-1⟩` index, `|t⟩` index and dimension.
fn clock_step(enc: ClockEncoding, l: usize, t: usize) -> (Vec<String>, usize, usize, usize) {
    match enc {
        ClockEncoding::Compact => (vec!["clock".into()], t - 1, t, l + 1),
        ClockEncoding::Unary if l == 1 => (vec![unary_id(1)], 0, 1, 2),
        // (c1, c2): 00 -> 10
        ClockEncoding::Unary if t == 1 => (vec![unary_id(1), unary_id(2)], 0b00, 0b10, 4),
        // (c_{L-1}, c_L): 10 -> 11
        ClockEncoding::Unary if t == l => (vec![unary_id(l - 1), unary_id(l)], 0b10, 0b11, 4),
        // (c_{t-1}, c_t, c_{t+1}): 100 -> 110
        ClockEncoding::Unary => (vec![unary_id(t - 1), unary_id(t), unary_id(t + 1)], 0b100, 0b110, 8),
    }
}

/// Clock factor selecting `t = 0`: support and projector.
fn clock_start(enc: ClockEncoding, l: usize) -> (Vec<String>, CMatrix) {
    match enc {
        ClockEncoding::Compact => (vec!["clock".into()], ket_bra(l + 1, 0, 0)),
        ClockEncoding::Unary => (vec![unary_id(1)], ket_bra(2, 0, 0)),
    }
}

fn update_term(gate: &Gate, enc: ClockEncoding, l: usize, t: usize, weight: f64) -> Result<LocalTerm> {
    let (clock, a, b, dc) = clock_step(enc, l, t);
    let half = C64::new(0.5 * weight, 0.0);
    let diag = ket_bra(dc, a, a) + ket_bra(dc, b, b);
    let forward = ket_bra(dc, b, a);
    let (support, matrix) = if gate.is_identity() {
        (clock, (&diag - &forward - forward.adjoint()) * half)
    } else {
        let u = gate.matrix();
        let id = CMatrix::identity(u.nrows(), u.nrows());
        let hop = linalg::kron(&u, &forward);
        let m = (linalg::kron(&id, &diag) - &hop - hop.adjoint()) * half;
        let support = gate.targets.iter().map(|&q| work_id(q)).chain(clock).collect::<Vec<_>>();
        (support, m)
    };
    LocalTerm::new(support, linalg::hermitize(&matrix))
}

/// Compiles `c` into `H_input + H_update (+ H_clock for unary)`.
pub fn compile_feynman_kitaev(
    c: &CircuitProgram,
    enc: ClockEncoding,
    weights: PenaltyWeights,
    budget: usize,
) -> Result<FkCompilation> {
    for (name, w) in [("input", weights.input), ("update", weights.update), ("clock", weights.clock)] {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} weight must be positive")));
        }
    }
    if let Some((index, g)) = c.gates().iter().enumerate().find(|(_, g)| g.targets.len() > 2) {
        return Err(Error::InvalidParameter(format!(
            "gate {index} acts on {} qubits; decompose to one- and two-qubit gates first",
            g.targets.len()
        )));
    }
    let system = system_for(c, enc)?;
    system.checked_dim(budget)?;
    let l = c.len();
    let k = c.num_qubits();
    let mut terms = Vec::new();

    let (start_support, start) = clock_start(enc, l);
    let nonlocal_input = match c.input() {
        InputState::Basis(bits) => {
            for (i, &bit) in bits.iter().enumerate() {
                let wrong = ket_bra(2, 1 - bit as usize, 1 - bit as usize);
                let m = linalg::kron(&wrong, &start) * C64::new(weights.input, 0.0);
                let support = std::iter::once(work_id(i)).chain(start_support.iter().cloned());
                terms.push(LocalTerm::new(support, m)?);
            }
            false
        }
        InputState::Amplitudes(psi) => {
            let d = psi.dim();
            let not_phi = CMatrix::identity(d, d) - psi.density_matrix();
            let m = linalg::hermitize(&(linalg::kron(&not_phi, &start) * C64::new(weights.input, 0.0)));
            let support = (0..k).map(work_id).chain(start_support.iter().cloned());
            terms.push(LocalTerm::new(support, m)?);
            true
        }
    };

    for (i, gate) in c.gates().iter().enumerate() {
        terms.push(update_term(gate, enc, l, i + 1, weights.update)?);
    }

    if enc == ClockEncoding::Unary {
        // forbid the pattern 01 on neighbouring clock bits
        for t in 1..l {
            let m = ket_bra(4, 0b01, 0b01) * C64::new(weights.clock, 0.0);
            terms.push(LocalTerm::new([unary_id(t), unary_id(t + 1)], m)?);
        }
    }

    let hamiltonian = LocalHamiltonian::new(system, terms, 0.0)?;
    let metadata = FkMetadata {
        encoding: enc,
        weights,
        work_qubits: k,
        steps: l,
        locality: hamiltonian.locality(),
        nonlocal_input,
        num_terms: hamiltonian.num_terms(),
    };
    Ok(FkCompilation { hamiltonian, metadata })
}

pub fn build_feynman_kitaev(c: &CircuitProgram, enc: ClockEncoding, weights: PenaltyWeights) -> Result<LocalHamiltonian> {
    Ok(compile_feynman_kitaev(c, enc, weights, DEFAULT_BUDGET)?.hamiltonian)
}

/// Basis index of clock value `t`.
pub fn clock_index(enc: ClockEncoding, l: usize, t: usize) -> usize {
    match enc {
        ClockEncoding::Compact => t,
        // 1^t 0^(L-t) with c1 most significant
        ClockEncoding::Unary => (0..t).map(|j| 1usize << (l - 1 - j)).sum(),
    }
}

pub fn clock_dim(enc: ClockEncoding, l: usize) -> usize {
    match enc {
        ClockEncoding::Compact => l + 1,
        ClockEncoding::Unary => 1 << l,
    }
}

/// `(L+1)^{-1/2} Σ_t (U_t ⋯ U_1 |φ₀⟩) ⊗ |t⟩`.
pub fn history_state(c: &CircuitProgram, enc: ClockEncoding) -> Result<PureState> {
    history_state_with_budget(c, enc, DEFAULT_BUDGET)
}

pub fn history_state_with_budget(c: &CircuitProgram, enc: ClockEncoding, budget: usize) -> Result<PureState> {
    let l = c.len();
    let dim = system_for(c, enc)?.checked_dim(budget)?;
    let dc = clock_dim(enc, l);
    let norm = C64::new(1.0 / ((l + 1) as f64).sqrt(), 0.0);
    let mut v = CVector::zeros(dim);
    for (t, snap) in c.snapshots().iter().enumerate() {
        let ti = clock_index(enc, l, t);
        for (w, amp) in snap.iter().enumerate() {
            v[w * dc + ti] += amp * norm;
        }
    }
    PureState::normalized(v)
}

/// Appends `count` identity gates.
pub fn pad_identities(c: &CircuitProgram, count: usize) -> CircuitProgram {
    let mut gates = c.gates().to_vec();
    gates.extend((0..count).map(|_| Gate::new(GateKind::I, vec![0])));
    c.with_gates(gates).expect("padding keeps a valid program")
}

/// Weight of clock values `t ≥ L_comp` in a history state of `L_total` steps.
pub fn completed_weight(l_comp: usize, l_total: usize) -> f64 {
    (l_total - l_comp + 1) as f64 / (l_total + 1) as f64
}

/// Replaces every CCZ by `CS(b,c)·CNOT(a,b)·CS†(b,c)·CNOT(a,b)·CS(a,c)`.
pub fn decompose_ccz(c: &CircuitProgram) -> CircuitProgram {
    let mut gates = Vec::with_capacity(c.len());
    for g in c.gates() {
        if g.kind == GateKind::Ccz {
            let (a, b, t) = (g.targets[0], g.targets[1], g.targets[2]);
            gates.push(Gate::new(GateKind::Cs, vec![b, t]));
            gates.push(Gate::new(GateKind::Cnot, vec![a, b]));
            gates.push(Gate::new(GateKind::Csdg, vec![b, t]));
            gates.push(Gate::new(GateKind::Cnot, vec![a, b]));
            gates.push(Gate::new(GateKind::Cs, vec![a, t]));
        } else {
            gates.push(g.clone());
        }
    }
    c.with_gates(gates).expect("decomposition keeps a valid program")
}

/// Enumeration limit for [`IqpPolynomial::ngap`].
pub const NGAP_MAX_VARS: usize = 26;

/// Degree-3 polynomial over F₂ with 1-indexed variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IqpPolynomial {
    pub n_vars: usize,
    pub cubic: BTreeSet<[usize; 3]>,
    pub quadratic: BTreeSet<[usize; 2]>,
    pub linear: BTreeSet<usize>,
}

fn sorted_distinct<const N: usize>(mut m: [usize; N], n: usize) -> Result<[usize; N]> {
    m.sort_unstable();
    if m.iter().any(|&i| i == 0 || i > n) {
        return Err(Error::InvalidParameter(format!("monomial {m:?} outside 1..={n}")));
    }
    if m.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter(format!("monomial {m:?} repeats a variable")));
    }
    Ok(m)
}

impl IqpPolynomial {
    pub fn new(
        n_vars: usize,
        cubic: impl IntoIterator<Item = [usize; 3]>,
        quadratic: impl IntoIterator<Item = [usize; 2]>,
        linear: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidParameter("polynomial needs at least one variable".into()));
        }
        Ok(Self {
            n_vars,
            cubic: cubic.into_iter().map(|m| sorted_distinct(m, n_vars)).collect::<Result<_>>()?,
            quadratic: quadratic.into_iter().map(|m| sorted_distinct(m, n_vars)).collect::<Result<_>>()?,
            linear: linear
                .into_iter()
                .map(|i| sorted_distinct([i], n_vars).map(|m| m[0]))
                .collect::<Result<_>>()?,
        })
    }

    pub fn zero(n_vars: usize) -> Result<Self> {
        Self::new(n_vars, [], [], [])
    }

    /// Each monomial present independently with probability 1/2.
    pub fn random(n_vars: usize, seed: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, 0);
        let n = n_vars;
        let mut cubic = Vec::new();
        let mut quadratic = Vec::new();
        let mut linear = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    if rng.random::<bool>() {
                        cubic.push([i, j, k]);
                    }
                }
            }
        }
        for i in 1..=n {
            for j in i + 1..=n {
                if rng.random::<bool>() {
                    quadratic.push([i, j]);
                }
            }
        }
        for i in 1..=n {
            if rng.random::<bool>() {
                linear.push(i);
            }
        }
        Self::new(n_vars, cubic, quadratic, linear)
    }

    /// `f(x)` where variable `i` is bit `n - i` of `x`.
    pub fn evaluate(&self, x: u64) -> bool {
        let n = self.n_vars;
        let bit = |i: usize| (x >> (n - i)) & 1 == 1;
        let mut acc = false;
        for m in &self.cubic {
            acc ^= bit(m[0]) && bit(m[1]) && bit(m[2]);
        }
        for m in &self.quadratic {
            acc ^= bit(m[0]) && bit(m[1]);
        }
        for &i in &self.linear {
            acc ^= bit(i);
        }
        acc
    }

    /// `|f⁻¹(0)| - |f⁻¹(1)|`.
    pub fn gap(&self) -> Result<i64> {
        if self.n_vars > NGAP_MAX_VARS {
            return Err(Error::BudgetExceeded { dim: 1u128 << self.n_vars, budget: 1 << NGAP_MAX_VARS });
        }
        let total = 1u64 << self.n_vars;
        let ones: u64 = (0..total).into_par_iter().filter(|&x| self.evaluate(x)).count() as u64;
        Ok(total as i64 - 2 * ones as i64)
    }

    /// `gap(f) / 2ⁿ`.
    pub fn ngap(&self) -> Result<f64> {
        Ok(self.gap()? as f64 / (1u64 << self.n_vars) as f64)
    }

    pub fn num_monomials(&self) -> usize {
        self.cubic.len() + self.quadratic.len() + self.linear.len()
    }

    /// Text form: `n N` header, then `a i j k`, `b i j`, `c i` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n_vars);
        for m in &self.cubic {
            let _ = writeln!(s, "a {} {} {}", m[0], m[1], m[2]);
        }
        for m in &self.quadratic {
            let _ = writeln!(s, "b {} {}", m[0], m[1]);
        }
        for i in &self.linear {
            let _ = writeln!(s, "c {i}");
        }
        s
    }

    /// Parses the text form; `n` defaults to the largest index (at least 1).
    pub fn parse(text: &str) -> Result<Self> {
        let mut header = None;
        let mut cubic = Vec::new();
        let mut quadratic = Vec::new();
        let mut linear = Vec::new();
        let mut max_index = 1;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap();
            let nums = parts
                .map(|p| p.parse::<usize>().map_err(|_| Error::Parse(format!("line {}: bad index {p:?}", lineno + 1))))
                .collect::<Result<Vec<_>>>()?;
            let arity = match tag {
                "n" => 1,
                "a" => 3,
                "b" => 2,
                "c" => 1,
                _ => return Err(Error::Parse(format!("line {}: unknown tag {tag:?}", lineno + 1))),
            };
            if nums.len() != arity {
                return Err(Error::Parse(format!("line {}: expected {arity} numbers", lineno + 1)));
            }
            if tag == "n" {
                header = Some(nums[0]);
                continue;
            }
            max_index = max_index.max(*nums.iter().max().unwrap());
            match tag {
                "a" => cubic.push([nums[0], nums[1], nums[2]]),
                "b" => quadratic.push([nums[0], nums[1]]),
                _ => linear.push(nums[0]),
            }
        }
        let n = header.unwrap_or(0).max(max_index);
        Self::new(n, cubic, quadratic, linear)
    }
}

/// `H^{⊗n} · (Z, CZ, CCZ per monomial) · H^{⊗n}` on `n` qubits from `|0ⁿ⟩`.
pub fn encode_iqp(p: &IqpPolynomial) -> CircuitProgram {
    let n = p.n_vars;
    let mut gates: Vec<Gate> = (0..n).map(|q| Gate::new(GateKind::H, vec![q])).collect();
    gates.extend(p.linear.iter().map(|&i| Gate::new(GateKind::Z, vec![i - 1])));
    gates.extend(p.quadratic.iter().map(|m| Gate::new(GateKind::Cz, vec![m[0] - 1, m[1] - 1])));
    gates.extend(p.cubic.iter().map(|m| Gate::new(GateKind::Ccz, vec![m[0] - 1, m[1] - 1, m[2] - 1])));
    gates.extend((0..n).map(|q| Gate::new(GateKind::H, vec![q])));
    CircuitProgram::new(n, gates, InputState::zeros(n)).expect("IQP circuit is valid")
}

/// Small frustration-free fixtures.
pub mod examples {
    use super::*;

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0))))
    }

    /// `Σ_i |1⟩⟨1|_i`; ground state `|0…0⟩`, gap 1.
    pub fn projectors(n: usize) -> Result<LocalHamiltonian> {
        let sys = SiteSystem::qubits(n)?;
        let terms = (0..n)
            .map(|i| LocalTerm::new([format!("q{i}")], diag(&[0.0, 1.0])))
            .collect::<Result<Vec<_>>>()?;
        LocalHamiltonian::new(sys, terms, 0.0)
    }

    /// `(1 - Z_i Z_{i+1})/2` on a chain plus `(1 - X^{⊗n})/2`; ground state GHZ.
    pub fn ghz_stabilizer(n: usize) -> Result<LocalHamiltonian> {
        if n < 2 {
            return Err(Error::InvalidParameter("GHZ fixture needs at least 2 qubits".into()));
        }
        let sys = SiteSystem::qubits(n)?;
        let mut terms = Vec::new();
        for i in 0..n - 1 {
            terms.push(LocalTerm::new([format!("q{i}"), format!("q{}", i + 1)], diag(&[0.0, 1.0, 1.0, 0.0]))?);
        }
        let x = GateKind::X.matrix();
        let xn = (1..n).fold(x.clone(), |acc, _| linalg::kron(&acc, &x));
        let d = 1 << n;
        let m = (CMatrix::identity(d, d) - xn) * C64::new(0.5, 0.0);
        terms.push(LocalTerm::new((0..n).map(|i| format!("q{i}")), m)?);
        LocalHamiltonian::new(sys, terms, 0.0)
    }

    /// Circuit behind [`fk_demo`]: `H` then `RY(0.7)` on one qubit.
    pub fn fk_demo_circuit() -> CircuitProgram {
        CircuitProgram::new(
            1,
            vec![Gate::new(GateKind::H, vec![0]), Gate::new(GateKind::Ry(0.7), vec![0])],
            InputState::zeros(1),
        )
        .expect("demo circuit is valid")
    }

    /// Unary-clock Feynman–Kitaev Hamiltonian on 3 qubits with 4 projector terms.
    pub fn fk_demo() -> Result<LocalHamiltonian> {
        build_feynman_kitaev(&fk_demo_circuit(), ClockEncoding::Unary, PenaltyWeights::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn identity_circuit(l: usize) -> CircuitProgram {
        CircuitProgram::new(1, (0..l).map(|_| Gate::new(GateKind::I, vec![0])).collect(), InputState::zeros(1))
            .unwrap()
    }

    #[test]
    fn l1_identity_history_state() {
        let c1 = identity_circuit(1);
        let psi = history_state(&c1, ClockEncoding::Compact).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = CVector::from_vec(vec![c(s, 0.0), c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((psi.amplitudes() - expected).norm() < 1e-15);
        let h = build_feynman_kitaev(&c1, ClockEncoding::Compact, PenaltyWeights::default()).unwrap();
        let sum = h.analyze().unwrap();
        assert!(sum.ground_energy.abs() < 1e-10);
        assert!(sum.unique_ground);
        let f = sum.ground_vectors[0].dotc(psi.amplitudes()).norm_sqr();
        assert!(f > 1.0 - 1e-9);
    }

    #[test]
    fn l1_x_history_state() {
        let cx = CircuitProgram::new(1, vec![Gate::new(GateKind::X, vec![0])], InputState::zeros(1)).unwrap();
        let psi = history_state(&cx, ClockEncoding::Compact).unwrap();
        // (|0>|0> + |1>|1>)/sqrt 2, clock dimension 2
        let a = psi.amplitudes();
        assert!((a[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a[3].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn unary_ground_state_is_legal() {
        let circ = CircuitProgram::new(
            1,
            vec![
                Gate::new(GateKind::H, vec![0]),
                Gate::new(GateKind::T, vec![0]),
                Gate::new(GateKind::H, vec![0]),
            ],
            InputState::zeros(1),
        )
        .unwrap();
        let h = build_feynman_kitaev(&circ, ClockEncoding::Unary, PenaltyWeights::default()).unwrap();
        let s = h.analyze().unwrap();
        assert!(s.unique_ground && s.ground_energy.abs() < 1e-10);
        let legal: Vec<usize> = (0..=3).map(|t| clock_index(ClockEncoding::Unary, 3, t)).collect();
        let g = &s.ground_vectors[0];
        let illegal: f64 = (0..g.len()).filter(|i| !legal.contains(&(i % 8))).map(|i| g[i].norm_sqr()).sum();
        assert!(illegal < 1e-10);
        let hist = history_state(&circ, ClockEncoding::Unary).unwrap();
        assert!(g.dotc(hist.amplitudes()).norm_sqr() > 1.0 - 1e-9);
        assert!(h.locality() <= 5);
    }

    #[test]
    fn padding_weight() {
        let base = identity_circuit(5);
        assert_eq!(pad_identities(&base, 0), base);
        let padded = pad_identities(&base, 5);
        assert_eq!(padded.len(), 10);
        assert!((completed_weight(5, 10) - 6.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn ngap_truth_tables() {
        assert_eq!(IqpPolynomial::zero(3).unwrap().ngap().unwrap(), 1.0);
        assert_eq!(IqpPolynomial::new(2, [], [[1, 2]], []).unwrap().ngap().unwrap(), 0.5);
        assert_eq!(IqpPolynomial::new(3, [[1, 2, 3]], [], []).unwrap().ngap().unwrap(), 0.75);
        assert!(matches!(IqpPolynomial::zero(27).unwrap().ngap(), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn iqp_amplitudes() {
        let zero = encode_iqp(&IqpPolynomial::zero(2).unwrap());
        assert!((zero.final_state()[0].re - 1.0).abs() < 1e-12);
        let x1 = encode_iqp(&IqpPolynomial::new(1, [], [], [1]).unwrap());
        assert!(x1.final_state()[0].norm() < 1e-12);
    }

    #[test]
    fn ccz_decomposition_matches() {
        let p = CircuitProgram::new(3, vec![Gate::new(GateKind::Ccz, vec![0, 1, 2])], InputState::zeros(3)).unwrap();
        let d = decompose_ccz(&p);
        assert!(d.max_arity() <= 2);
        let u = d.unitary().unwrap();
        assert!(linalg::max_abs(&(u - GateKind::Ccz.matrix())) < 1e-10);
        let plain = CircuitProgram::new(1, vec![Gate::new(GateKind::H, vec![0])], InputState::zeros(1)).unwrap();
        assert_eq!(decompose_ccz(&plain), plain);
    }

    #[test]
    fn polynomial_text_round_trip() {
        let p = IqpPolynomial::parse("# demo\na 3 1 2\nb 1 2\nb 2 1\nc 4\n").unwrap();
        assert_eq!(p.n_vars, 4);
        assert_eq!(p.quadratic.len(), 1);
        assert!(p.cubic.contains(&[1, 2, 3]));
        assert_eq!(IqpPolynomial::parse(&p.to_text()).unwrap(), p);
        assert!(IqpPolynomial::parse("a 1 1 2").is_err());
        assert!(IqpPolynomial::parse("q 1").is_err());
        assert_eq!(IqpPolynomial::parse("").unwrap().n_vars, 1);
    }

    #[test]
    fn arity_three_rejected_by_compiler() {
        let p = encode_iqp(&IqpPolynomial::new(3, [[1, 2, 3]], [], []).unwrap());
        assert!(matches!(
            build_feynman_kitaev(&p, ClockEncoding::Compact, PenaltyWeights::default()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn fixtures_are_frustration_free() {
        for h in [examples::projectors(3).unwrap(), examples::ghz_stabilizer(3).unwrap(), examples::fk_demo().unwrap()] {
            let s = h.analyze().unwrap();
            assert!(s.unique_ground && s.gap > 0.1);
            assert!(h.verify_frustration_free(&s, 1e-8).unwrap().frustration_free);
        }
        let fk = examples::fk_demo().unwrap();
        assert_eq!((fk.system().len(), fk.num_terms()), (3, 4));
        assert!((fk.interaction_strength() - 1.0).abs() < 1e-12);
    }
}

//! Gate-list quantum programs and a small statevector simulator.
//!
//! Qubit 0 is the most significant tensor factor, matching the site order of
//! [`crate::operators::SiteSystem`].

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64, I, ONE, ZERO};
use crate::states::PureState;

pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    I,
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Cnot,
    Cz,
    /// Controlled-S, `diag(1, 1, 1, i)`.
    Cs,
    Csdg,
    Swap,
    Ccz,
    Matrix(CMatrix),
}

impl GateKind {
    pub fn from_name(name: &str, theta: Option<f64>) -> Result<Self> {
        let need = |t: Option<f64>| t.ok_or_else(|| Error::Parse(format!("gate {name} needs theta")));
        Ok(match name.to_ascii_uppercase().as_str() {
            "I" | "ID" => GateKind::I,
            "H" => GateKind::H,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "S" => GateKind::S,
            "SDG" => GateKind::Sdg,
            "T" => GateKind::T,
            "TDG" => GateKind::Tdg,
            "RX" => GateKind::Rx(need(theta)?),
            "RY" => GateKind::Ry(need(theta)?),
            "RZ" => GateKind::Rz(need(theta)?),
            "CNOT" | "CX" => GateKind::Cnot,
            "CZ" => GateKind::Cz,
            "CS" => GateKind::Cs,
            "CSDG" => GateKind::Csdg,
            "SWAP" => GateKind::Swap,
            "CCZ" => GateKind::Ccz,
            _ => return Err(Error::Parse(format!("unknown gate {name}"))),
        })
    }

    pub fn name(&self) -> Option<&'static str> {
        Some(match self {
            GateKind::I => "I",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Sdg => "Sdg",
            GateKind::T => "T",
            GateKind::Tdg => "Tdg",
            GateKind::Rx(_) => "RX",
            GateKind::Ry(_) => "RY",
            GateKind::Rz(_) => "RZ",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Cs => "CS",
            GateKind::Csdg => "CSdg",
            GateKind::Swap => "SWAP",
            GateKind::Ccz => "CCZ",
            GateKind::Matrix(_) => return None,
        })
    }

    pub fn theta(&self) -> Option<f64> {
        match self {
            GateKind::Rx(t) | GateKind::Ry(t) | GateKind::Rz(t) => Some(*t),
            _ => None,
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let s = FRAC_1_SQRT_2;
        let m2 = |a: [C64; 4]| CMatrix::from_row_slice(2, 2, &a);
        let diag = |d: &[C64]| CMatrix::from_diagonal(&CVector::from_column_slice(d));
        match self {
            GateKind::I => CMatrix::identity(2, 2),
            GateKind::H => m2([c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]),
            GateKind::X => m2([ZERO, ONE, ONE, ZERO]),
            GateKind::Y => m2([ZERO, -I, I, ZERO]),
            GateKind::Z => diag(&[ONE, -ONE]),
            GateKind::S => diag(&[ONE, I]),
            GateKind::Sdg => diag(&[ONE, -I]),
            GateKind::T => diag(&[ONE, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]),
            GateKind::Tdg => diag(&[ONE, C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)]),
            GateKind::Rx(t) => {
                let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
                m2([c(co, 0.0), c(0.0, -si), c(0.0, -si), c(co, 0.0)])
            }
            GateKind::Ry(t) => {
                let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
                m2([c(co, 0.0), c(-si, 0.0), c(si, 0.0), c(co, 0.0)])
            }
            GateKind::Rz(t) => diag(&[C64::from_polar(1.0, -t / 2.0), C64::from_polar(1.0, t / 2.0)]),
            GateKind::Cnot => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = ONE;
                m[(1, 1)] = ONE;
                m[(2, 3)] = ONE;
                m[(3, 2)] = ONE;
                m
            }
            GateKind::Cz => diag(&[ONE, ONE, ONE, -ONE]),
            GateKind::Cs => diag(&[ONE, ONE, ONE, I]),
            GateKind::Csdg => diag(&[ONE, ONE, ONE, -I]),
            GateKind::Swap => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = ONE;
                m[(1, 2)] = ONE;
                m[(2, 1)] = ONE;
                m[(3, 3)] = ONE;
                m
            }
            GateKind::Ccz => {
                let mut d = vec![ONE; 8];
                d[7] = -ONE;
                diag(&d)
            }
            GateKind::Matrix(m) => m.clone(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Cs | GateKind::Csdg | GateKind::Swap => 2,
            GateKind::Ccz => 3,
            GateKind::Matrix(m) => m.nrows().trailing_zeros() as usize,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Self { kind, targets }
    }

    pub fn matrix(&self) -> CMatrix {
        self.kind.matrix()
    }

    /// Identity gates are compiled without touching the work register.
    pub fn is_identity(&self) -> bool {
        match &self.kind {
            GateKind::I => true,
            GateKind::Matrix(m) => {
                linalg::max_abs(&(m - CMatrix::identity(m.nrows(), m.ncols()))) == 0.0
            }
            _ => false,
        }
    }
}

/// Work-register input `|φ₀⟩`.
#[derive(Debug, Clone, PartialEq)]
pub enum InputState {
    /// Computational basis string, qubit 0 first.
    Basis(Vec<u8>),
    Amplitudes(PureState),
}

impl InputState {
    pub fn zeros(k: usize) -> Self {
        InputState::Basis(vec![0; k])
    }

    pub fn vector(&self, k: usize) -> CVector {
        match self {
            InputState::Basis(bits) => {
                let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
                PureState::basis(1 << k, idx).into_amplitudes()
            }
            InputState::Amplitudes(psi) => psi.amplitudes().clone(),
        }
    }
}

/// `U_L ⋯ U_1 |φ₀⟩` on `K` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitProgram {
    num_qubits: usize,
    gates: Vec<Gate>,
    input: InputState,
}

impl CircuitProgram {
    pub fn new(num_qubits: usize, gates: Vec<Gate>, input: InputState) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidParameter("circuit has no qubits".into()));
        }
        if num_qubits > 30 {
            return Err(Error::BudgetExceeded { dim: 1u128 << num_qubits, budget: 1 << 30 });
        }
        if gates.is_empty() {
            return Err(Error::InvalidParameter("circuit has no gates".into()));
        }
        for (index, g) in gates.iter().enumerate() {
            let m = g.matrix();
            if m.nrows() != m.ncols() || m.nrows() != 1 << g.targets.len() {
                return Err(Error::DimensionMismatch { expected: 1 << g.targets.len(), found: m.nrows() });
            }
            for (i, &t) in g.targets.iter().enumerate() {
                if t >= num_qubits || g.targets[..i].contains(&t) {
                    return Err(Error::InvalidParameter(format!("gate {index} has invalid targets {:?}", g.targets)));
                }
            }
            let deviation = linalg::unitarity_deviation(&m);
            if deviation > UNITARY_TOL {
                return Err(Error::NonUnitaryGate { index, deviation });
            }
        }
        match &input {
            InputState::Basis(bits) => {
                if bits.len() != num_qubits || bits.iter().any(|&b| b > 1) {
                    return Err(Error::InvalidParameter("input string does not match qubit count".into()));
                }
            }
            InputState::Amplitudes(psi) => {
                if psi.dim() != 1 << num_qubits {
                    return Err(Error::DimensionMismatch { expected: 1 << num_qubits, found: psi.dim() });
                }
            }
        }
        Ok(Self { num_qubits, gates, input })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of gates `L`.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn input(&self) -> &InputState {
        &self.input
    }

    pub fn max_arity(&self) -> usize {
        self.gates.iter().map(|g| g.targets.len()).max().unwrap_or(0)
    }

    pub fn input_vector(&self) -> CVector {
        self.input.vector(self.num_qubits)
    }

    /// States `U_t ⋯ U_1 |φ₀⟩` for `t = 0..=L`.
    pub fn snapshots(&self) -> Vec<CVector> {
        let mut out = Vec::with_capacity(self.gates.len() + 1);
        let mut v = self.input_vector();
        out.push(v.clone());
        for g in &self.gates {
            apply_gate(v.as_mut_slice(), self.num_qubits, &g.targets, &g.matrix());
            out.push(v.clone());
        }
        out
    }

    pub fn final_state(&self) -> CVector {
        self.run_on(self.input_vector())
    }

    pub fn run_on(&self, mut v: CVector) -> CVector {
        for g in &self.gates {
            apply_gate(v.as_mut_slice(), self.num_qubits, &g.targets, &g.matrix());
        }
        v
    }

    /// Full unitary, column by column.
    pub fn unitary(&self) -> Result<CMatrix> {
        let d = 1usize << self.num_qubits;
        if d > linalg::DENSE_LIMIT {
            return Err(Error::BudgetExceeded { dim: d as u128, budget: linalg::DENSE_LIMIT });
        }
        let mut u = CMatrix::zeros(d, d);
        for j in 0..d {
            let col = self.run_on(PureState::basis(d, j).into_amplitudes());
            u.set_column(j, &col);
        }
        Ok(u)
    }

    pub fn with_gates(&self, gates: Vec<Gate>) -> Result<Self> {
        Self::new(self.num_qubits, gates, self.input.clone())
    }
}

/// Applies a `2^k × 2^k` matrix to qubits `targets` of an `n`-qubit state.
pub fn apply_gate(v: &mut [C64], n: usize, targets: &[usize], m: &CMatrix) {
    let k = targets.len();
    let local: Vec<usize> = (0..1usize << k)
        .map(|a| {
            (0..k)
                .filter(|&j| (a >> (k - 1 - j)) & 1 == 1)
                .map(|j| 1usize << (n - 1 - targets[j]))
                .sum()
        })
        .collect();
    let mask: usize = targets.iter().map(|&t| 1usize << (n - 1 - t)).sum();
    let mut buf = vec![ZERO; local.len()];
    for base in 0..v.len() {
        if base & mask != 0 {
            continue;
        }
        for (b, &o) in buf.iter_mut().zip(&local) {
            *b = v[base + o];
        }
        for (r, &o) in local.iter().enumerate() {
            v[base + o] = (0..local.len()).map(|s| m[(r, s)] * buf[s]).sum();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum InputSpec {
    Bits(String),
    Amplitudes(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
    targets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CircuitFile {
    qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input: Option<InputSpec>,
    gates: Vec<GateSpec>,
}

impl Serialize for CircuitProgram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let input = match &self.input {
            InputState::Basis(bits) => InputSpec::Bits(bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()),
            InputState::Amplitudes(psi) => {
                InputSpec::Amplitudes(linalg::serde_complex::to_pairs(psi.amplitudes().as_slice()))
            }
        };
        let gates = self
            .gates
            .iter()
            .map(|g| GateSpec {
                name: g.kind.name().map(str::to_string),
                theta: g.kind.theta(),
                matrix: match &g.kind {
                    GateKind::Matrix(m) => Some(linalg::serde_complex::matrix_to_rows(m)),
                    _ => None,
                },
                targets: g.targets.clone(),
            })
            .collect();
        CircuitFile { qubits: self.num_qubits, input: Some(input), gates }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CircuitProgram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = CircuitFile::deserialize(d)?;
        CircuitProgram::try_from(f).map_err(D::Error::custom)
    }
}

impl TryFrom<CircuitFile> for CircuitProgram {
    type Error = Error;

    fn try_from(f: CircuitFile) -> Result<Self> {
        let input = match f.input {
            None => InputState::zeros(f.qubits),
            Some(InputSpec::Bits(s)) => InputState::Basis(
                s.chars()
                    .map(|ch| match ch {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(Error::Parse(format!("bad input character {ch:?}"))),
                    })
                    .collect::<Result<_>>()?,
            ),
            Some(InputSpec::Amplitudes(a)) => InputState::Amplitudes(PureState::new(CVector::from_iterator(
                a.len(),
                a.iter().map(|p| C64::new(p[0], p[1])),
            ))?),
        };
        let gates = f
            .gates
            .into_iter()
            .map(|g| {
                let kind = match (g.name, g.matrix) {
                    (_, Some(rows)) => {
                        GateKind::Matrix(linalg::serde_complex::rows_to_matrix(&rows).map_err(Error::Parse)?)
                    }
                    (Some(name), None) => GateKind::from_name(&name, g.theta)?,
                    (None, None) => return Err(Error::Parse("gate needs a name or a matrix".into())),
                };
                Ok(Gate::new(kind, g.targets))
            })
            .collect::<Result<Vec<_>>>()?;
        CircuitProgram::new(f.qubits, gates, input)
    }
}

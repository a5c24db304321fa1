//! Prepared states, fidelities and noise channels.
//!
//! A [`PreparedState`] is either a pure vector, a dense density matrix, or a
//! noise channel applied lazily to another prepared state. Reduced density
//! matrices, fidelities with pure targets and computational-basis
//! populations are evaluated without materialising the full density matrix
//! whenever the representation allows it, which keeps noisy pure states usable
//! beyond the dense limit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, serde_complex, CMatrix, CVector, C64, DENSE_LIMIT, ZERO};
use crate::operators::{Embedding, SiteSystem};

pub const NORM_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-NEG_EIG_TOL, 0)` are clipped; below that the state is rejected.
pub const NEG_EIG_TOL: f64 = 1e-10;

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state vector has norm {n}")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(Self { amplitudes: amplitudes / C64::new(n, 0.0) })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn density_matrix(&self) -> CMatrix {
        linalg::projector(&self.amplitudes)
    }
}

/// Product measurement basis used by the dephasing channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Computational basis.
    Z,
    /// Per-site Fourier basis (Hadamard basis on qubits).
    X,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    /// `(1-p)ρ + p·1/d`.
    Depolarizing { p: f64 },
    /// `(1-p)ρ + p·σ`.
    GroundMix { p: f64, other: Box<PreparedState> },
    /// `(1-p)ρ + p·Σ_b |b⟩⟨b|ρ|b⟩⟨b|` in a product basis.
    Dephasing { p: f64, basis: Basis },
}

impl NoiseSpec {
    pub fn p(&self) -> f64 {
        match self {
            NoiseSpec::Depolarizing { p } | NoiseSpec::GroundMix { p, .. } | NoiseSpec::Dephasing { p, .. } => *p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Pure(PureState),
    Dense(CMatrix),
    Noisy { base: Box<PreparedState>, channel: NoiseSpec },
}

/// Density matrix handed to the certifier, on a fixed tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedState {
    dims: Vec<usize>,
    repr: Repr,
    pub label: String,
}

fn total(dims: &[usize]) -> usize {
    dims.iter().product()
}

impl PreparedState {
    pub fn pure(dims: &[usize], psi: PureState) -> Result<Self> {
        let d = total(dims);
        if psi.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: psi.dim() });
        }
        Ok(Self { dims: dims.to_vec(), repr: Repr::Pure(psi), label: String::new() })
    }

    /// Dense density matrix; validates trace, Hermiticity and positivity.
    pub fn dense(dims: &[usize], rho: CMatrix) -> Result<Self> {
        let d = total(dims);
        if d > DENSE_LIMIT {
            return Err(Error::BudgetExceeded { dim: d as u128, budget: DENSE_LIMIT });
        }
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rho.nrows() });
        }
        let dev = linalg::hermitian_deviation(&rho);
        if dev > NORM_TOL {
            return Err(Error::InvalidState(format!("density matrix not Hermitian ({dev:e})")));
        }
        let tr = linalg::trace(&rho).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("density matrix has trace {tr}")));
        }
        let (values, vectors) = linalg::eigh(&rho);
        let min = values[0];
        if min < -NEG_EIG_TOL {
            return Err(Error::InvalidState(format!("density matrix has eigenvalue {min:e}")));
        }
        let rho = if min < 0.0 {
            let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
            let s: f64 = clipped.iter().sum();
            let diag = CVector::from_iterator(d, clipped.iter().map(|&v| C64::new(v / s, 0.0)));
            linalg::hermitize(&(&vectors * CMatrix::from_diagonal(&diag) * vectors.adjoint()))
        } else {
            rho
        };
        Ok(Self { dims: dims.to_vec(), repr: Repr::Dense(rho), label: String::new() })
    }

    /// `Σ_j q_j |ψ_j⟩⟨ψ_j|` as a dense matrix.
    pub fn from_ensemble(dims: &[usize], ensemble: &[(f64, PureState)]) -> Result<Self> {
        let d = total(dims);
        let mut rho = CMatrix::zeros(d, d);
        for (q, psi) in ensemble {
            if psi.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: psi.dim() });
            }
            rho += psi.density_matrix() * C64::new(*q, 0.0);
        }
        Self::dense(dims, linalg::hermitize(&rho))
    }

    /// `1/d`, represented lazily.
    pub fn maximally_mixed(dims: &[usize]) -> Self {
        let base = Self {
            dims: dims.to_vec(),
            repr: Repr::Pure(PureState::basis(total(dims), 0)),
            label: String::new(),
        };
        Self {
            dims: dims.to_vec(),
            repr: Repr::Noisy { base: Box::new(base), channel: NoiseSpec::Depolarizing { p: 1.0 } },
            label: "maximally mixed".into(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        total(&self.dims)
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match &self.repr {
            Repr::Pure(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_lazy(&self) -> bool {
        !matches!(self.repr, Repr::Dense(_))
    }

    /// Applies a noise channel lazily.
    pub fn apply_noise(&self, channel: NoiseSpec) -> Result<Self> {
        let p = channel.p();
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidParameter(format!("noise strength {p} outside [0, 1]")));
        }
        if let NoiseSpec::GroundMix { other, .. } = &channel {
            if other.dims != self.dims {
                return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
            }
        }
        Ok(Self {
            dims: self.dims.clone(),
            repr: Repr::Noisy { base: Box::new(self.clone()), channel },
            label: String::new(),
        })
    }

    /// Dense density matrix; only available up to the dense limit.
    pub fn to_dense(&self) -> Result<CMatrix> {
        let d = self.dim();
        if d > DENSE_LIMIT {
            return Err(Error::BudgetExceeded { dim: d as u128, budget: DENSE_LIMIT });
        }
        Ok(match &self.repr {
            Repr::Pure(psi) => psi.density_matrix(),
            Repr::Dense(rho) => rho.clone(),
            Repr::Noisy { base, channel } => {
                let rho = base.to_dense()?;
                match channel {
                    NoiseSpec::Depolarizing { p } => {
                        rho * C64::new(1.0 - p, 0.0) + CMatrix::identity(d, d) * C64::new(p / d as f64, 0.0)
                    }
                    NoiseSpec::GroundMix { p, other } => {
                        rho * C64::new(1.0 - p, 0.0) + other.to_dense()? * C64::new(*p, 0.0)
                    }
                    NoiseSpec::Dephasing { p, basis } => {
                        let deph = dephase_dense(&rho, &self.dims, *basis);
                        rho * C64::new(1.0 - p, 0.0) + deph * C64::new(*p, 0.0)
                    }
                }
            }
        })
    }

    /// Reduced density matrix on `sites` (site indices, in the given order).
    pub fn reduced(&self, sites: &[usize]) -> Result<CMatrix> {
        let system = SiteSystem::new(self.dims.iter().enumerate().map(|(i, &d)| (format!("{i}"), d)))?;
        if sites.iter().any(|&s| s >= self.dims.len()) {
            return Err(Error::SupportMismatch("site index out of range".into()));
        }
        let emb = Embedding::new(&system, sites);
        self.reduced_with(&emb, sites)
    }

    fn reduced_with(&self, emb: &Embedding, sites: &[usize]) -> Result<CMatrix> {
        let k = emb.local_dim();
        Ok(match &self.repr {
            Repr::Pure(psi) => {
                let a = psi.amplitudes();
                CMatrix::from_fn(k, k, |i, j| {
                    let (li, lj) = (emb.local[i], emb.local[j]);
                    emb.rest.iter().map(|&o| a[li + o] * a[lj + o].conj()).sum()
                })
            }
            Repr::Dense(rho) => CMatrix::from_fn(k, k, |i, j| {
                let (li, lj) = (emb.local[i], emb.local[j]);
                emb.rest.iter().map(|&o| rho[(li + o, lj + o)]).sum()
            }),
            Repr::Noisy { base, channel } => {
                let r = base.reduced_with(emb, sites)?;
                match channel {
                    NoiseSpec::Depolarizing { p } => {
                        r * C64::new(1.0 - p, 0.0) + CMatrix::identity(k, k) * C64::new(p / k as f64, 0.0)
                    }
                    NoiseSpec::GroundMix { p, other } => {
                        r * C64::new(1.0 - p, 0.0) + other.reduced_with(emb, sites)? * C64::new(*p, 0.0)
                    }
                    NoiseSpec::Dephasing { p, basis } => {
                        // product-basis dephasing commutes with the partial trace
                        let local_dims: Vec<usize> = sites.iter().map(|&s| self.dims[s]).collect();
                        let deph = dephase_dense(&r, &local_dims, *basis);
                        r * C64::new(1.0 - p, 0.0) + deph * C64::new(*p, 0.0)
                    }
                }
            }
        })
    }

    /// Populations `⟨b|ρ|b⟩` in a product basis.
    pub fn diag_in_basis(&self, basis: Basis) -> Result<Vec<f64>> {
        let d = self.dim();
        Ok(match &self.repr {
            Repr::Pure(psi) => {
                let mut v = psi.amplitudes().as_slice().to_vec();
                to_basis_coordinates(&mut v, &self.dims, basis);
                v.iter().map(|z| z.norm_sqr()).collect()
            }
            Repr::Dense(rho) => {
                let rotated = rotate_into(rho, &self.dims, basis);
                (0..d).map(|i| rotated[(i, i)].re).collect()
            }
            Repr::Noisy { base, channel } => match channel {
                NoiseSpec::Depolarizing { p } => base
                    .diag_in_basis(basis)?
                    .into_iter()
                    .map(|x| (1.0 - p) * x + p / d as f64)
                    .collect(),
                NoiseSpec::GroundMix { p, other } => base
                    .diag_in_basis(basis)?
                    .into_iter()
                    .zip(other.diag_in_basis(basis)?)
                    .map(|(x, y)| (1.0 - p) * x + p * y)
                    .collect(),
                NoiseSpec::Dephasing { basis: b, .. } if *b == basis => base.diag_in_basis(basis)?,
                NoiseSpec::Dephasing { .. } => {
                    let rotated = rotate_into(&self.to_dense()?, &self.dims, basis);
                    (0..d).map(|i| rotated[(i, i)].re).collect()
                }
            },
        })
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_pure(&self, psi: &PureState) -> Result<f64> {
        let d = self.dim();
        if psi.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: psi.dim() });
        }
        Ok(match &self.repr {
            Repr::Pure(phi) => phi.overlap(psi).norm_sqr(),
            Repr::Dense(rho) => psi.amplitudes().dotc(&(rho * psi.amplitudes())).re,
            Repr::Noisy { base, channel } => {
                let f = base.expectation_pure(psi)?;
                match channel {
                    NoiseSpec::Depolarizing { p } => (1.0 - p) * f + p / d as f64,
                    NoiseSpec::GroundMix { p, other } => (1.0 - p) * f + p * other.expectation_pure(psi)?,
                    NoiseSpec::Dephasing { p, basis } => {
                        let mut coords = psi.amplitudes().as_slice().to_vec();
                        to_basis_coordinates(&mut coords, &self.dims, *basis);
                        let pops = base.diag_in_basis(*basis)?;
                        let dephased: f64 = coords.iter().zip(&pops).map(|(z, q)| z.norm_sqr() * q).sum();
                        (1.0 - p) * f + p * dephased
                    }
                }
            }
        })
    }

    pub fn to_spec(&self) -> StateSpec {
        match &self.repr {
            Repr::Pure(psi) => StateSpec::Pure {
                amplitudes: serde_complex::to_pairs(psi.amplitudes().as_slice()),
                label: self.label.clone(),
            },
            Repr::Dense(rho) => StateSpec::Dense { rho: serde_complex::matrix_to_rows(rho), label: self.label.clone() },
            Repr::Noisy { base, channel } => StateSpec::NoisyPure {
                base: Box::new(base.to_spec()),
                channel: match channel {
                    NoiseSpec::Depolarizing { p } => ChannelSpec::Depolarizing { p: *p },
                    NoiseSpec::GroundMix { p, other } => {
                        ChannelSpec::GroundMix { p: *p, other: Box::new(other.to_spec()) }
                    }
                    NoiseSpec::Dephasing { p, basis } => ChannelSpec::Dephasing { p: *p, basis: *basis },
                },
                label: self.label.clone(),
            },
        }
    }

    pub fn from_spec(spec: &StateSpec, dims: &[usize]) -> Result<Self> {
        match spec {
            StateSpec::Pure { amplitudes, label } => {
                let v = CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|p| C64::new(p[0], p[1])));
                Ok(Self::pure(dims, PureState::new(v)?)?.with_label(label.clone()))
            }
            StateSpec::Dense { rho, label } => {
                let m = serde_complex::rows_to_matrix(rho).map_err(Error::Parse)?;
                Ok(Self::dense(dims, m)?.with_label(label.clone()))
            }
            StateSpec::NoisyPure { base, channel, label } => {
                let base = Self::from_spec(base, dims)?;
                let channel = match channel {
                    ChannelSpec::Depolarizing { p } => NoiseSpec::Depolarizing { p: *p },
                    ChannelSpec::GroundMix { p, other } => {
                        NoiseSpec::GroundMix { p: *p, other: Box::new(Self::from_spec(other, dims)?) }
                    }
                    ChannelSpec::Dephasing { p, basis } => NoiseSpec::Dephasing { p: *p, basis: *basis },
                };
                Ok(base.apply_noise(channel)?.with_label(label.clone()))
            }
        }
    }
}

/// On-disk state description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Pure {
        amplitudes: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        label: String,
    },
    NoisyPure {
        base: Box<StateSpec>,
        channel: ChannelSpec,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        label: String,
    },
    Dense {
        rho: Vec<Vec<[f64; 2]>>,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        label: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChannelSpec {
    Depolarizing { p: f64 },
    GroundMix { p: f64, other: Box<StateSpec> },
    Dephasing { p: f64, basis: Basis },
}

/// `F(σ, |ψ⟩⟨ψ|) = ⟨ψ|σ|ψ⟩`.
pub fn fidelity(sigma: &PreparedState, target: &PureState) -> Result<f64> {
    Ok(sigma.expectation_pure(target)?.clamp(0.0, 1.0))
}

/// `Tr|a - b| / 2`.
pub fn trace_distance(a: &PreparedState, b: &PreparedState) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let diff = a.to_dense()? - b.to_dense()?;
    Ok(0.5 * linalg::trace_norm_hermitian(&diff))
}

pub fn apply_noise(rho: &PreparedState, channel: NoiseSpec) -> Result<PreparedState> {
    rho.apply_noise(channel)
}

fn fourier(d: usize) -> CMatrix {
    let s = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| C64::from_polar(s, 2.0 * PI * (j * k) as f64 / d as f64))
}

/// Applies `m` to tensor factor `site` of `v`.
fn apply_on_site(v: &mut [C64], dims: &[usize], site: usize, m: &CMatrix) {
    let d = dims[site];
    let stride: usize = dims[site + 1..].iter().product();
    let block = d * stride;
    let mut buf = vec![ZERO; d];
    for hi in (0..v.len()).step_by(block) {
        for lo in 0..stride {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = v[hi + lo + k * stride];
            }
            for r in 0..d {
                v[hi + lo + r * stride] = (0..d).map(|k| m[(r, k)] * buf[k]).sum();
            }
        }
    }
}

/// Replaces `v` by its coordinates `⟨b|v⟩` in the product basis.
fn to_basis_coordinates(v: &mut [C64], dims: &[usize], basis: Basis) {
    if basis == Basis::Z {
        return;
    }
    for (site, &d) in dims.iter().enumerate() {
        apply_on_site(v, dims, site, &fourier(d).adjoint());
    }
}

fn from_basis_coordinates(v: &mut [C64], dims: &[usize], basis: Basis) {
    if basis == Basis::Z {
        return;
    }
    for (site, &d) in dims.iter().enumerate() {
        apply_on_site(v, dims, site, &fourier(d));
    }
}

fn transform_columns(m: &CMatrix, f: impl Fn(&mut [C64])) -> CMatrix {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        f(col.as_mut_slice());
    }
    out
}

/// `U ρ U†` with `U` mapping the product basis onto the computational basis.
fn rotate_into(rho: &CMatrix, dims: &[usize], basis: Basis) -> CMatrix {
    if basis == Basis::Z {
        return rho.clone();
    }
    let to = |v: &mut [C64]| to_basis_coordinates(v, dims, basis);
    let a = transform_columns(rho, to);
    transform_columns(&a.adjoint(), to)
}

fn rotate_back(rho: &CMatrix, dims: &[usize], basis: Basis) -> CMatrix {
    if basis == Basis::Z {
        return rho.clone();
    }
    let from = |v: &mut [C64]| from_basis_coordinates(v, dims, basis);
    let a = transform_columns(rho, from);
    transform_columns(&a.adjoint(), from)
}

fn dephase_dense(rho: &CMatrix, dims: &[usize], basis: Basis) -> CMatrix {
    let rotated = rotate_into(rho, dims, basis);
    let diag = CMatrix::from_diagonal(&rotated.diagonal());
    linalg::hermitize(&rotate_back(&diag, dims, basis))
}

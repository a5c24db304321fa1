//! Local Hamiltonians over finite site systems.
//!
//! A [`LocalHamiltonian`] is a list of Hermitian terms, each acting on an
//! ordered subset of sites. Terms are embedded into the full tensor-product
//! space by [`LocalHamiltonian::assemble`]; site 0 is the most significant
//! tensor factor. Spectral data needed for certification is produced by
//! [`LocalHamiltonian::analyze`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::eigen::{lanczos_extremal, Extremal, LanczosOptions};
use crate::error::{Error, Result};
use crate::linalg::{self, serde_complex, CMatrix, CVector, C64, DENSE_LIMIT};
use crate::sparse::{CooBuilder, CsrMatrix};

/// Default cap on the full Hilbert-space dimension.
pub const DEFAULT_BUDGET: usize = 1 << 20;

/// Hermiticity tolerance for local terms.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Relative tolerance for merging eigenvalues of a single term.
const TERM_MERGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteSpec {
    pub id: String,
    pub dim: usize,
}

/// Ordered set of sites with their local dimensions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<SiteSpec>", into = "Vec<SiteSpec>")]
pub struct SiteSystem {
    ids: Vec<String>,
    dims: Vec<usize>,
    index: HashMap<String, usize>,
}

impl PartialEq for SiteSystem {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.dims == other.dims
    }
}

impl SiteSystem {
    pub fn new<S: Into<String>>(sites: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut ids = Vec::new();
        let mut dims = Vec::new();
        let mut index = HashMap::new();
        for (id, dim) in sites {
            let id = id.into();
            if dim < 2 {
                return Err(Error::InvalidParameter(format!("site {id} has dimension {dim} < 2")));
            }
            if index.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate site id {id}")));
            }
            ids.push(id);
            dims.push(dim);
        }
        if ids.is_empty() {
            return Err(Error::InvalidParameter("site system is empty".into()));
        }
        Ok(Self { ids, dims, index })
    }

    /// `n` qubits named `q0..q{n-1}`.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| (format!("q{i}"), 2)))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn total_dim(&self) -> u128 {
        self.dims.iter().map(|&d| d as u128).product()
    }

    pub fn checked_dim(&self, budget: usize) -> Result<usize> {
        let dim = self.total_dim();
        if dim > budget as u128 {
            return Err(Error::BudgetExceeded { dim, budget });
        }
        Ok(dim as usize)
    }

    /// Stride of each site in the flattened basis index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.dims.len()];
        for v in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[v] = strides[v + 1] * self.dims[v + 1];
        }
        strides
    }

    pub fn resolve(&self, support: &[String]) -> Result<Vec<usize>> {
        support
            .iter()
            .map(|id| {
                self.index_of(id)
                    .ok_or_else(|| Error::SupportMismatch(format!("unknown site {id}")))
            })
            .collect()
    }
}

impl TryFrom<Vec<SiteSpec>> for SiteSystem {
    type Error = Error;

    fn try_from(sites: Vec<SiteSpec>) -> Result<Self> {
        SiteSystem::new(sites.into_iter().map(|s| (s.id, s.dim)))
    }
}

impl From<SiteSystem> for Vec<SiteSpec> {
    fn from(s: SiteSystem) -> Self {
        s.ids
            .into_iter()
            .zip(s.dims)
            .map(|(id, dim)| SiteSpec { id, dim })
            .collect()
    }
}

/// Index maps that embed an operator on `support` into the full space.
///
/// Every full basis index splits uniquely as `local[a] + rest[c]`.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub local: Vec<usize>,
    pub rest: Vec<usize>,
}

impl Embedding {
    pub fn new(system: &SiteSystem, support: &[usize]) -> Self {
        let strides = system.strides();
        let dims = system.dims();
        let local = mixed_radix_offsets(support.iter().map(|&s| (dims[s], strides[s])));
        let rest_sites: Vec<usize> = (0..dims.len()).filter(|v| !support.contains(v)).collect();
        let rest = mixed_radix_offsets(rest_sites.iter().map(|&s| (dims[s], strides[s])));
        Self { local, rest }
    }

    pub fn local_dim(&self) -> usize {
        self.local.len()
    }
}

/// Offsets of all digit strings, first digit most significant.
fn mixed_radix_offsets(digits: impl DoubleEndedIterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for (dim, stride) in digits {
        let mut next = Vec::with_capacity(offsets.len() * dim);
        for &o in &offsets {
            for d in 0..dim {
                next.push(o + d * stride);
            }
        }
        offsets = next;
    }
    offsets
}

/// Hermitian operator acting on an ordered subset of sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTerm {
    pub support: Vec<String>,
    #[serde(with = "serde_complex::matrix")]
    pub matrix: CMatrix,
}

impl LocalTerm {
    pub fn new<S: Into<String>>(support: impl IntoIterator<Item = S>, matrix: CMatrix) -> Result<Self> {
        let support: Vec<String> = support.into_iter().map(Into::into).collect();
        if support.is_empty() {
            return Err(Error::SupportMismatch("term has empty support".into()));
        }
        for (i, s) in support.iter().enumerate() {
            if support[..i].contains(s) {
                return Err(Error::SupportMismatch(format!("site {s} repeated in support")));
            }
        }
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let deviation = linalg::hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { support, matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        linalg::eigvalsh(&self.matrix)
            .iter()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }
}

/// One eigenspace of a local term: eigenvalue and orthogonal projector.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub value: f64,
    pub projector: CMatrix,
}

/// Eigenspaces of `term`, ascending, with near-equal eigenvalues merged.
pub fn term_eigendecomposition(term: &LocalTerm) -> Vec<Eigenspace> {
    let (values, vectors) = linalg::eigh(&term.matrix);
    let scale = values.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let tol = TERM_MERGE_TOL * scale;
    let d = term.dim();
    let mut spaces: Vec<(Vec<f64>, CMatrix)> = Vec::new();
    for (k, &value) in values.iter().enumerate() {
        let col = vectors.column(k).into_owned();
        let p = &col * col.adjoint();
        match spaces.last_mut() {
            Some((vals, proj)) if (value - vals[0]).abs() <= tol => {
                vals.push(value);
                *proj += p;
            }
            _ => spaces.push((vec![value], p)),
        }
    }
    debug_assert!(spaces.iter().map(|(v, _)| v.len()).sum::<usize>() == d);
    spaces
        .into_iter()
        .map(|(vals, projector)| Eigenspace {
            value: vals.iter().sum::<f64>() / vals.len() as f64,
            projector,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct HamiltonianFile {
    sites: SiteSystem,
    terms: Vec<LocalTerm>,
    #[serde(default)]
    energy_offset: f64,
}

/// `H = Σ_λ h_λ - offset·1` on a site system.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "HamiltonianFile", into = "HamiltonianFile")]
pub struct LocalHamiltonian {
    system: SiteSystem,
    terms: Vec<LocalTerm>,
    supports: Vec<Vec<usize>>,
    term_norms: Vec<f64>,
    energy_offset: f64,
}

impl PartialEq for LocalHamiltonian {
    fn eq(&self, other: &Self) -> bool {
        self.system == other.system
            && self.terms == other.terms
            && self.energy_offset.to_bits() == other.energy_offset.to_bits()
    }
}

impl TryFrom<HamiltonianFile> for LocalHamiltonian {
    type Error = Error;

    fn try_from(f: HamiltonianFile) -> Result<Self> {
        // re-validate terms read from files
        let terms = f
            .terms
            .into_iter()
            .map(|t| LocalTerm::new(t.support, t.matrix))
            .collect::<Result<Vec<_>>>()?;
        LocalHamiltonian::new(f.sites, terms, f.energy_offset)
    }
}

impl From<LocalHamiltonian> for HamiltonianFile {
    fn from(h: LocalHamiltonian) -> Self {
        HamiltonianFile { sites: h.system, terms: h.terms, energy_offset: h.energy_offset }
    }
}

impl LocalHamiltonian {
    pub fn new(system: SiteSystem, terms: Vec<LocalTerm>, energy_offset: f64) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("Hamiltonian has no terms".into()));
        }
        if !energy_offset.is_finite() {
            return Err(Error::InvalidParameter("energy offset is not finite".into()));
        }
        let mut supports = Vec::with_capacity(terms.len());
        let mut term_norms = Vec::with_capacity(terms.len());
        for t in &terms {
            let idx = system.resolve(&t.support)?;
            let expected: usize = idx.iter().map(|&s| system.dims()[s]).product();
            if expected != t.dim() {
                return Err(Error::DimensionMismatch { expected, found: t.dim() });
            }
            let norm = t.norm();
            if !norm.is_finite() {
                return Err(Error::InvalidParameter("term has non-finite norm".into()));
            }
            supports.push(idx);
            term_norms.push(norm);
        }
        Ok(Self { system, terms, supports, term_norms, energy_offset })
    }

    pub fn system(&self) -> &SiteSystem {
        &self.system
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Site indices of each term's support, in support order.
    pub fn support_indices(&self, term: usize) -> &[usize] {
        &self.supports[term]
    }

    pub fn energy_offset(&self) -> f64 {
        self.energy_offset
    }

    pub fn with_energy_offset(mut self, offset: f64) -> Self {
        self.energy_offset = offset;
        self
    }

    pub fn term_norms(&self) -> &[f64] {
        &self.term_norms
    }

    /// `J = max_λ ‖h_λ‖`.
    pub fn interaction_strength(&self) -> f64 {
        self.term_norms.iter().copied().fold(0.0, f64::max)
    }

    /// Largest support size.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.support.len()).max().unwrap_or(0)
    }

    pub fn dim(&self, budget: usize) -> Result<usize> {
        self.system.checked_dim(budget)
    }

    fn push_term(&self, builder: &mut CooBuilder, term: usize) {
        let emb = Embedding::new(&self.system, &self.supports[term]);
        let m = &self.terms[term].matrix;
        for a in 0..m.nrows() {
            for b in 0..m.ncols() {
                let v = m[(a, b)];
                if v.norm() == 0.0 {
                    continue;
                }
                let (ra, cb) = (emb.local[a], emb.local[b]);
                for &o in &emb.rest {
                    builder.push(ra + o, cb + o, v);
                }
            }
        }
    }

    /// Sparse matrix of the full Hamiltonian including the energy offset.
    pub fn assemble(&self, budget: usize) -> Result<CsrMatrix> {
        let dim = self.dim(budget)?;
        let nnz_bound: usize = self
            .terms
            .iter()
            .map(|t| t.matrix.iter().filter(|z| z.norm() != 0.0).count() * (dim / t.dim()))
            .sum();
        let mut builder = CooBuilder::with_capacity(dim, nnz_bound + dim);
        for t in 0..self.terms.len() {
            self.push_term(&mut builder, t);
        }
        if self.energy_offset != 0.0 {
            for i in 0..dim {
                builder.push(i, i, C64::new(-self.energy_offset, 0.0));
            }
        }
        Ok(builder.build())
    }

    /// Sparse matrix of a single embedded term, without offset.
    pub fn assemble_term(&self, term: usize, budget: usize) -> Result<CsrMatrix> {
        let dim = self.dim(budget)?;
        let mut builder = CooBuilder::new(dim);
        self.push_term(&mut builder, term);
        Ok(builder.build())
    }

    /// Spectral summary with default options.
    pub fn analyze(&self) -> Result<SpectralSummary> {
        self.analyze_with(&AnalyzeOptions::default())
    }

    pub fn analyze_with(&self, opts: &AnalyzeOptions) -> Result<SpectralSummary> {
        let matrix = self.assemble(opts.budget)?;
        analyze_matrix(&matrix, opts)
    }

    /// Checks `H P₀ = 0` and `h_λ P₀ = 0` for every term.
    pub fn verify_frustration_free(&self, summary: &SpectralSummary, tol: f64) -> Result<FfVerdict> {
        self.verify_frustration_free_with(summary, tol, DEFAULT_BUDGET)
    }

    pub fn verify_frustration_free_with(
        &self,
        summary: &SpectralSummary,
        tol: f64,
        budget: usize,
    ) -> Result<FfVerdict> {
        let dim = self.dim(budget)?;
        if summary.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: summary.dim });
        }
        let full = self.assemble(budget)?;
        let global_residual = block_residual(&full, &summary.ground_vectors);
        let term_residuals = (0..self.terms.len())
            .map(|t| Ok(block_residual(&self.assemble_term(t, budget)?, &summary.ground_vectors)))
            .collect::<Result<Vec<f64>>>()?;
        let worst = term_residuals.iter().copied().fold(0.0, f64::max);
        Ok(FfVerdict {
            frustration_free: global_residual <= tol && worst <= tol,
            global_residual,
            term_residuals,
            tol,
        })
    }
}

/// `‖A V‖` for a matrix `V` with orthonormal columns.
fn block_residual(a: &CsrMatrix, vectors: &[CVector]) -> f64 {
    let images: Vec<CVector> = vectors.iter().map(|v| a.matvec_vector(v)).collect();
    match images.len() {
        0 => 0.0,
        1 => images[0].norm(),
        r => {
            let gram = CMatrix::from_fn(r, r, |i, j| images[i].dotc(&images[j]));
            linalg::eigvalsh(&gram).last().copied().unwrap_or(0.0).max(0.0).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FfVerdict {
    pub frustration_free: bool,
    pub global_residual: f64,
    pub term_residuals: Vec<f64>,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenMethod {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Absolute degeneracy tolerance; defaults to `1e-8·‖H‖`.
    pub degeneracy_tol: Option<f64>,
    pub method: EigenMethod,
    pub budget: usize,
    /// Upper limit on the number of ground vectors resolved by Lanczos.
    pub max_ground_dim: usize,
    pub lanczos: LanczosOptions,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            degeneracy_tol: None,
            method: EigenMethod::Auto,
            budget: DEFAULT_BUDGET,
            max_ground_dim: 32,
            lanczos: LanczosOptions::default(),
        }
    }
}

/// Ground energy, gap, norm and ground space of a Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub dim: usize,
    pub ground_energy: f64,
    pub first_excited: f64,
    pub gap: f64,
    pub max_energy: f64,
    /// `E_max - E₀`.
    pub norm: f64,
    pub unique_ground: bool,
    pub degeneracy_tol: f64,
    pub method: EigenMethod,
    /// Orthonormal basis of the ground space.
    #[serde(with = "serde_complex::vectors")]
    pub ground_vectors: Vec<CVector>,
}

impl SpectralSummary {
    pub fn ground_degeneracy(&self) -> usize {
        self.ground_vectors.len()
    }

    pub fn ground_state(&self) -> Option<&CVector> {
        if self.unique_ground {
            self.ground_vectors.first()
        } else {
            None
        }
    }

    /// Dense ground-space projector.
    pub fn ground_projector(&self) -> Result<CMatrix> {
        if self.dim > DENSE_LIMIT {
            return Err(Error::BudgetExceeded { dim: self.dim as u128, budget: DENSE_LIMIT });
        }
        let mut p = CMatrix::zeros(self.dim, self.dim);
        for v in &self.ground_vectors {
            p += v * v.adjoint();
        }
        Ok(p)
    }

    /// Summary without the ground vectors, for reports.
    pub fn digest(&self) -> SpectralDigest {
        SpectralDigest {
            dim: self.dim,
            ground_energy: self.ground_energy,
            first_excited: self.first_excited,
            gap: self.gap,
            max_energy: self.max_energy,
            norm: self.norm,
            unique_ground: self.unique_ground,
            ground_degeneracy: self.ground_vectors.len(),
            degeneracy_tol: self.degeneracy_tol,
            method: self.method,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDigest {
    pub dim: usize,
    pub ground_energy: f64,
    pub first_excited: f64,
    pub gap: f64,
    pub max_energy: f64,
    pub norm: f64,
    pub unique_ground: bool,
    pub ground_degeneracy: usize,
    pub degeneracy_tol: f64,
    pub method: EigenMethod,
}

fn default_tol(e0: f64, emax: f64) -> f64 {
    let scale = (emax - e0).max(e0.abs()).max(emax.abs());
    if scale > 0.0 {
        1e-8 * scale
    } else {
        1e-12
    }
}

/// Spectral summary of an assembled Hermitian matrix.
pub fn analyze_matrix(matrix: &CsrMatrix, opts: &AnalyzeOptions) -> Result<SpectralSummary> {
    let dim = matrix.dim();
    let method = match opts.method {
        EigenMethod::Auto if dim <= DENSE_LIMIT => EigenMethod::Dense,
        EigenMethod::Auto => EigenMethod::Lanczos,
        m => m,
    };
    match method {
        EigenMethod::Dense => analyze_dense(matrix, opts),
        _ => analyze_lanczos(matrix, opts),
    }
}

fn analyze_dense(matrix: &CsrMatrix, opts: &AnalyzeOptions) -> Result<SpectralSummary> {
    let dim = matrix.dim();
    if dim > DENSE_LIMIT {
        return Err(Error::BudgetExceeded { dim: dim as u128, budget: DENSE_LIMIT });
    }
    let (values, vectors) = linalg::eigh(&matrix.to_dense());
    let e0 = values[0];
    let emax = values[dim - 1];
    let tol = opts.degeneracy_tol.unwrap_or_else(|| default_tol(e0, emax));
    let ground_vectors: Vec<CVector> = values
        .iter()
        .enumerate()
        .take_while(|(_, &v)| v - e0 <= tol)
        .map(|(k, _)| vectors.column(k).into_owned())
        .collect();
    let first_excited = values.get(ground_vectors.len()).copied().unwrap_or(e0);
    Ok(SpectralSummary {
        dim,
        ground_energy: e0,
        first_excited,
        gap: first_excited - e0,
        max_energy: emax,
        norm: emax - e0,
        unique_ground: ground_vectors.len() == 1,
        degeneracy_tol: tol,
        method: EigenMethod::Dense,
        ground_vectors,
    })
}

fn analyze_lanczos(matrix: &CsrMatrix, opts: &AnalyzeOptions) -> Result<SpectralSummary> {
    let dim = matrix.dim();
    let lopts = LanczosOptions { scale: matrix.max_row_sum().max(1e-300), ..opts.lanczos.clone() };
    let top = lanczos_extremal(matrix, Extremal::Highest, &[], &lopts)?;
    let ground = lanczos_extremal(matrix, Extremal::Lowest, &[], &lopts)?;
    let e0 = ground.value;
    let emax = top.value.max(e0);
    let tol = opts.degeneracy_tol.unwrap_or_else(|| default_tol(e0, emax));
    let mut found: Vec<Vec<C64>> = vec![ground.vector];
    let mut first_excited = e0;
    while found.len() < dim {
        let next = lanczos_extremal(matrix, Extremal::Lowest, &found, &lopts)?;
        if next.value - e0 <= tol {
            if found.len() >= opts.max_ground_dim {
                return Err(Error::ConvergenceFailure(format!(
                    "ground space exceeds {} vectors",
                    opts.max_ground_dim
                )));
            }
            found.push(next.vector);
        } else {
            first_excited = next.value;
            break;
        }
    }
    let ground_vectors: Vec<CVector> = found.into_iter().map(CVector::from_vec).collect();
    Ok(SpectralSummary {
        dim,
        ground_energy: e0,
        first_excited,
        gap: first_excited - e0,
        max_energy: emax,
        norm: emax - e0,
        unique_ground: ground_vectors.len() == 1,
        degeneracy_tol: tol,
        method: EigenMethod::Lanczos,
        ground_vectors,
    })
}

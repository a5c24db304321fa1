//! Lanczos iteration for extremal eigenpairs of Hermitian operators.
//!
//! Single-vector Lanczos with full reorthogonalisation and explicit restarts
//! from the current Ritz vector. Interior eigenpairs are reached by deflation:
//! every Krylov vector is kept orthogonal to a set of already converged
//! eigenvectors, which also resolves degenerate eigenvalues one copy at a time.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};
use crate::sparse::CsrMatrix;

pub trait HermitianOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64]) -> Vec<C64>;
}

impl HermitianOperator for CsrMatrix {
    fn dim(&self) -> usize {
        CsrMatrix::dim(self)
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.matvec(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremal {
    Lowest,
    Highest,
}

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    pub max_krylov: usize,
    pub max_restarts: usize,
    /// Target residual `‖Av - θv‖`, relative to `scale`.
    pub tol: f64,
    /// Residual still accepted after the restart budget is spent.
    pub accept_tol: f64,
    /// Magnitude used to make tolerances relative, typically a norm bound.
    pub scale: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_krylov: 400,
            max_restarts: 100,
            tol: 1e-11,
            accept_tol: 1e-9,
            scale: 1.0,
            seed: 0x5eed_1a2c_205f_0000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<C64>,
    pub residual: f64,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize(w: &mut [C64], against: &[Vec<C64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in against {
            let proj = dot(q, w);
            axpy(w, -proj, q);
        }
    }
}

struct Ritz {
    coeffs: Vec<f64>,
}

fn tridiagonal_ritz(alpha: &[f64], beta: &[f64], which: Extremal) -> Ritz {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let pick = (0..k)
        .reduce(|a, b| {
            let better = match which {
                Extremal::Lowest => eig.eigenvalues[b] < eig.eigenvalues[a],
                Extremal::Highest => eig.eigenvalues[b] > eig.eigenvalues[a],
            };
            if better {
                b
            } else {
                a
            }
        })
        .unwrap();
    Ritz {
        coeffs: eig.eigenvectors.column(pick).iter().copied().collect(),
    }
}

fn should_check(steps: usize) -> bool {
    steps == 4 || steps == 10 || (steps >= 20 && steps.is_multiple_of(20))
}

/// Extremal eigenpair of `op` restricted to the orthogonal complement of `deflate`.
///
/// `deflate` must hold orthonormal vectors.
pub fn lanczos_extremal<Op: HermitianOperator + ?Sized>(
    op: &Op,
    which: Extremal,
    deflate: &[Vec<C64>],
    opts: &LanczosOptions,
) -> Result<EigenPair> {
    let n = op.dim();
    if deflate.len() >= n {
        return Err(Error::ConvergenceFailure(
            "deflation space covers the whole space".into(),
        ));
    }
    let available = n - deflate.len();
    let kmax = opts.max_krylov.min(available).max(1);
    let scale = opts.scale.max(f64::MIN_POSITIVE);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (deflate.len() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    orthogonalize(&mut v, deflate);
    let nv = norm(&v);
    if nv == 0.0 {
        return Err(Error::ConvergenceFailure("start vector vanished".into()));
    }
    v.iter_mut().for_each(|z| *z /= nv);

    let mut best: Option<EigenPair> = None;

    for _restart in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<C64>> = vec![v.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let ritz: Ritz;

        loop {
            let j = basis.len() - 1;
            let mut w = op.apply(&basis[j]);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            axpy(&mut w, C64::new(-a, 0.0), &basis[j]);
            if j > 0 {
                axpy(&mut w, C64::new(-beta[j - 1], 0.0), &basis[j - 1]);
            }
            orthogonalize(&mut w, deflate);
            orthogonalize(&mut w, &basis);
            let b = norm(&w);
            let steps = alpha.len();
            let exhausted = steps >= kmax || b <= 1e-14 * scale;
            if exhausted || should_check(steps) {
                let r = tridiagonal_ritz(&alpha, &beta, which);
                let estimate = b * r.coeffs.last().copied().unwrap_or(0.0).abs();
                let done = exhausted || estimate <= opts.tol * scale;
                if done {
                    ritz = r;
                    break;
                }
            }
            beta.push(b);
            w.iter_mut().for_each(|z| *z /= b);
            basis.push(w);
        }

        let mut y = vec![ZERO; n];
        for (coef, q) in ritz.coeffs.iter().zip(&basis) {
            axpy(&mut y, C64::new(*coef, 0.0), q);
        }
        orthogonalize(&mut y, deflate);
        let ny = norm(&y);
        y.iter_mut().for_each(|z| *z /= ny);
        let hy = op.apply(&y);
        let theta = dot(&y, &hy).re;
        let mut r = hy;
        axpy(&mut r, C64::new(-theta, 0.0), &y);
        // the complement-restricted operator is P A P
        orthogonalize(&mut r, deflate);
        let residual = norm(&r);
        let pair = EigenPair { value: theta, vector: y, residual };
        if residual <= opts.tol * scale {
            return Ok(pair);
        }
        let improved = best.as_ref().is_none_or(|b| residual < b.residual);
        if improved {
            best = Some(pair.clone());
        }
        v = pair.vector;
        // a Krylov space that spans the whole complement is exact
        if basis.len() >= available && residual <= opts.accept_tol * scale {
            return Ok(best.unwrap());
        }
    }

    match best {
        Some(pair) if pair.residual <= opts.accept_tol * scale => Ok(pair),
        Some(pair) => Err(Error::ConvergenceFailure(format!(
            "residual {:e} above tolerance {:e} after {} restarts",
            pair.residual,
            opts.accept_tol * scale,
            opts.max_restarts
        ))),
        None => Err(Error::ConvergenceFailure("no Ritz pair produced".into())),
    }
}

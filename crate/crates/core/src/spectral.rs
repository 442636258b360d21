//! Full spectral decomposition, integrated density of states, and Gibbs
//! matrices built by spectral calculus.

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::hamiltonian::BlockHamiltonian;
use crate::scalar::Real;
use crate::small::Mat4;

/// Largest admissible `|β| · max|λ|` before the Boltzmann weights are refused.
pub const GIBBS_EXPONENT_LIMIT: f64 = 1400.0;

#[derive(Debug, Clone)]
pub struct SpectralData<T> {
    eigenvalues: Vec<T>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    eigenvectors: DenseMatrix<T>,
}

pub fn diagonalize<T: Real>(h: &BlockHamiltonian<T>) -> Result<SpectralData<T>> {
    let dense = h.to_dense();
    let (eigenvalues, eigenvectors) = T::symmetric_eigen(&dense)?;
    Ok(SpectralData { eigenvalues, eigenvectors })
}

/// Diagonalizes an explicit dense matrix after checking it is symmetric.
pub fn diagonalize_dense<T: Real>(m: &DenseMatrix<T>) -> Result<SpectralData<T>> {
    let asym = m.asymmetry();
    if asym > T::epsilon() * m.max_abs() * T::lit(16.0) {
        return Err(Error::NotSymmetric(asym.as_f64()));
    }
    let (eigenvalues, eigenvectors) = T::symmetric_eigen(m)?;
    Ok(SpectralData { eigenvalues, eigenvectors })
}

/// Ascending eigenvalues without eigenvectors.
pub fn eigenvalues<T: Real>(h: &BlockHamiltonian<T>) -> Result<Vec<T>> {
    Ok(T::symmetric_eigenvalues(&h.to_dense())?)
}

impl<T: Real> SpectralData<T> {
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DenseMatrix<T> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spectral_radius(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Largest `‖H v_k - λ_k v_k‖` over all eigenpairs.
    pub fn max_residual(&self, h: &BlockHamiltonian<T>) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        let mut v = vec![T::zero(); n];
        for k in 0..n {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi = self.eigenvectors[(i, k)];
            }
            let hv = h.matvec(&v);
            let r = hv.iter().zip(&v).map(|(&a, &b)| (a - self.eigenvalues[k] * b).powi(2)).sum::<T>().sqrt();
            worst = worst.max(r);
        }
        worst
    }

    /// `max |VᵀV - I|`.
    pub fn orthogonality_error(&self) -> T {
        let v = &self.eigenvectors;
        v.transpose().matmul(v).sub(&DenseMatrix::identity(self.dim())).max_abs()
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let n = self.dim();
        let scaled = DenseMatrix::from_fn(n, n, |i, k| self.eigenvectors[(i, k)] * self.eigenvalues[k]);
        scaled.matmul(&self.eigenvectors.transpose())
    }

    pub fn kernel_count(&self, tol: T) -> usize {
        kernel_count(&self.eigenvalues, tol)
    }
}

/// Number of eigenvalues with `|λ| < tol`.
pub fn kernel_count<T: Real>(eigenvalues: &[T], tol: T) -> usize {
    eigenvalues.iter().filter(|x| x.abs() < tol).count()
}

/// `ρ(λ) = #{λ_k < λ}` for ascending `eigenvalues`.
pub fn idos<T: Real>(eigenvalues: &[T], lambda: T) -> usize {
    eigenvalues.partition_point(|&x| x < lambda)
}

pub fn idos_curve<T: Real>(eigenvalues: &[T], grid: &[T]) -> Vec<(T, usize)> {
    grid.iter().map(|&l| (l, idos(eigenvalues, l))).collect()
}

/// `n + 1` equally spaced points covering `[lo, hi]`.
pub fn uniform_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let n = n.max(1);
    let step = (hi - lo) / T::lit(n as f64);
    (0..=n).map(|i| lo + step * T::lit(i as f64)).collect()
}

/// Eigenvalues in the closed interval `[lo, hi]`.
pub fn count_in<T: Real>(eigenvalues: &[T], lo: T, hi: T) -> usize {
    eigenvalues.iter().filter(|&&x| x >= lo && x <= hi).count()
}

/// Largest deviation from the pairing `λ ↔ -λ` of an ascending spectrum.
pub fn symmetry_defect<T: Real>(eigenvalues: &[T]) -> T {
    let n = eigenvalues.len();
    (0..n).map(|k| (eigenvalues[k] + eigenvalues[n - 1 - k]).abs()).fold(T::zero(), T::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum GibbsSign {
    /// Weights `exp(βλ)`.
    #[default]
    PlusBetaH,
    /// Weights `exp(-βλ)`.
    MinusBetaH,
}

impl GibbsSign {
    fn factor<T: Real>(self) -> T {
        match self {
            GibbsSign::PlusBetaH => T::one(),
            GibbsSign::MinusBetaH => -T::one(),
        }
    }
}

/// Unit-trace `exp(±βH) / Z`, kept in factored form `V diag(w) Vᵀ`.
#[derive(Debug, Clone)]
pub struct GibbsMatrix<'a, T> {
    beta: T,
    sign: GibbsSign,
    weights: Vec<T>,
    /// All weights equal, so the matrix is exactly `I / dim`.
    uniform: bool,
    spectral: &'a SpectralData<T>,
}

pub fn gibbs<T: Real>(spectral: &SpectralData<T>, beta: T, sign: GibbsSign) -> Result<GibbsMatrix<'_, T>> {
    let exponent = beta.abs() * spectral.spectral_radius();
    if !beta.is_finite() || !(exponent.as_f64() <= GIBBS_EXPONENT_LIMIT) {
        return Err(Error::GibbsOverflow { exponent: exponent.as_f64(), limit: GIBBS_EXPONENT_LIMIT });
    }
    let s = sign.factor::<T>() * beta;
    let exps: Vec<T> = spectral.eigenvalues.iter().map(|&l| s * l).collect();
    let top = exps.iter().copied().fold(T::neg_infinity(), T::max);
    let raw: Vec<T> = exps.iter().map(|&e| (e - top).exp()).collect();
    let z: T = raw.iter().copied().sum();
    let weights: Vec<T> = raw.into_iter().map(|w| w / z).collect();
    let uniform = weights.iter().all(|&w| w == weights[0]);
    Ok(GibbsMatrix { beta, sign, weights, uniform, spectral })
}

impl<'a, T: Real> GibbsMatrix<'a, T> {
    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn sign(&self) -> GibbsSign {
        self.sign
    }

    /// Boltzmann weight of each eigenvector; sums to one.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn spectral(&self) -> &'a SpectralData<T> {
        self.spectral
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// `Σ_k w_k ‖v_k‖²`.
    pub fn trace(&self) -> T {
        let v = &self.spectral.eigenvectors;
        let n = self.dim();
        let mut norms = vec![T::zero(); n];
        for i in 0..n {
            for (k, &x) in v.row(i).iter().enumerate() {
                norms[k] = norms[k] + x * x;
            }
        }
        norms.iter().zip(&self.weights).map(|(&a, &w)| a * w).sum()
    }

    /// 4x4 block between sites `i` and `j`.
    pub fn block(&self, i: usize, j: usize) -> Mat4<T> {
        let mut out = Mat4::zero();
        if self.uniform {
            if i == j {
                let w = T::one() / T::lit(self.dim() as f64);
                (0..4).for_each(|r| out.m[r][r] = w);
            }
            return out;
        }
        let v = &self.spectral.eigenvectors;
        for r in 0..4 {
            let vr = v.row(4 * i + r);
            for c in 0..4 {
                let vc = v.row(4 * j + c);
                out.m[r][c] = vr.iter().zip(vc).zip(&self.weights).map(|((&a, &b), &w)| w * a * b).sum();
            }
        }
        out
    }

    pub fn site_block(&self, i: usize) -> Mat4<T> {
        self.block(i, i)
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let n = self.dim();
        if self.uniform {
            let w = T::one() / T::lit(n as f64);
            return DenseMatrix::from_fn(n, n, |i, j| if i == j { w } else { T::zero() });
        }
        let v = &self.spectral.eigenvectors;
        let scaled = DenseMatrix::from_fn(n, n, |i, k| v[(i, k)] * self.weights[k]);
        scaled.matmul(&v.transpose())
    }
}

//! Scalar abstraction shared by every numerical module.
//!
//! The geometry is integer-valued; everything downstream of it (boundary
//! angles, Hamiltonian entries, spectra, Gibbs weights, vorticity fields and
//! degree sums) is generic over [`Real`], implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

use crate::dense::DenseMatrix;

/// Failure of the dense symmetric eigensolver.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EigenError {
    #[error("symmetric eigensolver did not converge for a {dim}x{dim} matrix")]
    NoConvergence { dim: usize },
    #[error("eigensolver input is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Floating point type usable throughout the crate.
///
/// Besides the usual `num-traits` arithmetic, each implementation provides
/// the two dense kernels whose cost dominates a run: the symmetric
/// eigendecomposition and the matrix product. Both are delegated to `faer`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal; every `f64` is representable (possibly rounded).
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Eigenvalues in ascending order and the matching orthonormal
    /// eigenvectors stored as columns. Only the lower triangle is read.
    fn symmetric_eigen(a: &DenseMatrix<Self>) -> Result<(Vec<Self>, DenseMatrix<Self>), EigenError>;

    /// Ascending eigenvalues only.
    fn symmetric_eigenvalues(a: &DenseMatrix<Self>) -> Result<Vec<Self>, EigenError>;

    fn matmul(a: &DenseMatrix<Self>, b: &DenseMatrix<Self>) -> DenseMatrix<Self>;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            fn symmetric_eigen(a: &DenseMatrix<Self>) -> Result<(Vec<Self>, DenseMatrix<Self>), EigenError> {
                let n = check_square(a)?;
                let m = to_faer(a);
                let evd = m.self_adjoint_eigen(faer::Side::Lower).map_err(|_| EigenError::NoConvergence { dim: n })?;
                let s = evd.S().column_vector();
                let values: Vec<$t> = (0..n).map(|k| s[k]).collect();
                let u = evd.U();
                let vectors = DenseMatrix::from_fn(n, n, |i, j| u[(i, j)]);
                Ok((values, vectors))
            }

            fn symmetric_eigenvalues(a: &DenseMatrix<Self>) -> Result<Vec<Self>, EigenError> {
                let n = check_square(a)?;
                to_faer(a).self_adjoint_eigenvalues(faer::Side::Lower).map_err(|_| EigenError::NoConvergence { dim: n })
            }

            fn matmul(a: &DenseMatrix<Self>, b: &DenseMatrix<Self>) -> DenseMatrix<Self> {
                assert_eq!(a.cols(), b.rows(), "matmul shape mismatch");
                let p = to_faer(a) * to_faer(b);
                DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| p[(i, j)])
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

fn check_square<T: Real>(a: &DenseMatrix<T>) -> Result<usize, EigenError> {
    if a.rows() != a.cols() {
        return Err(EigenError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    Ok(a.rows())
}

fn to_faer<T: Copy>(a: &DenseMatrix<T>) -> faer::Mat<T> {
    faer::Mat::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

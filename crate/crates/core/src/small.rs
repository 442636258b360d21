//! Fixed-size 2x2 and 4x4 real matrices.
//!
//! A site carries the space R^2 ⊗ R^2; its basis vector `e_a ⊗ e_b` has
//! index `2a + b`. The first tensor slot is `a`, the second is `b`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub const fn new(a11: T, a12: T, a21: T, a22: T) -> Self {
        Self { m: [[a11, a12], [a21, a22]] }
    }

    pub fn zero() -> Self {
        let z = T::zero();
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let (z, o) = (T::zero(), T::one());
        Self::new(o, z, z, o)
    }

    pub fn sigma_x() -> Self {
        let (z, o) = (T::zero(), T::one());
        Self::new(z, o, o, z)
    }

    pub fn sigma_z() -> Self {
        let (z, o) = (T::zero(), T::one());
        Self::new(o, z, z, -o)
    }

    /// Real antisymmetric factor of `σ^y = i·J`, `J = [[0,-1],[1,0]]`.
    pub fn sigma_y_real_part() -> Self {
        let (z, o) = (T::zero(), T::one());
        Self::new(z, -o, o, z)
    }

    /// `[[a, b], [b, c]]`.
    pub fn symmetric(a: T, b: T, c: T) -> Self {
        Self::new(a, b, b, c)
    }

    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.m[0][0] * s, self.m[0][1] * s, self.m[1][0] * s, self.m[1][1] * s)
    }

    /// Inverse, or `None` when the determinant is exactly zero.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == T::zero() {
            return None;
        }
        Some(Self::new(self.m[1][1] / d, -self.m[0][1] / d, -self.m[1][0] / d, self.m[0][0] / d))
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries().map(|x| x * x).into_iter().sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).entries().into_iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn entries(&self) -> [T; 4] {
        [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (self.m[0][1] - self.m[1][0]).abs() <= tol
    }

    pub fn is_traceless(&self, tol: T) -> bool {
        self.trace().abs() <= tol
    }

    /// Symmetric, idempotent and of unit trace.
    pub fn is_projector(&self, tol: T) -> bool {
        self.is_symmetric(tol) && (self.trace() - T::one()).abs() <= tol && (*self * *self).max_abs_diff(self) <= tol
    }

    /// Eigenvalues of a symmetric matrix, ascending.
    pub fn symmetric_eigenvalues(&self) -> [T; 2] {
        let half = T::lit(0.5);
        let mean = self.trace() * half;
        let a = (self.m[0][0] - self.m[1][1]) * half;
        let r = a.hypot(self.m[0][1]);
        [mean - r, mean + r]
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Mat4<T> {
        let mut out = Mat4::zero();
        for a in 0..2 {
            for a2 in 0..2 {
                for b in 0..2 {
                    for b2 in 0..2 {
                        out.m[2 * a + b][2 * a2 + b2] = self.m[a][a2] * other.m[b][b2];
                    }
                }
            }
        }
        out
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// One 4x4 block of the site-structured Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4<T> {
    pub m: [[T; 4]; 4],
}

impl<T: Real> Mat4<T> {
    pub fn zero() -> Self {
        Self { m: [[T::zero(); 4]; 4] }
    }

    pub fn identity() -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            out.m[i][i] = T::one();
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        out.m.iter_mut().flatten().for_each(|x| *x = *x * s);
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.m[j][i] = self.m[i][j];
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        (0..4).map(|i| self.m[i][i]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(|&x| x == T::zero())
    }

    pub fn max_abs(&self) -> T {
        self.m.iter().flatten().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Traces out the second tensor slot: `Ω[a][a'] = Σ_b M[2a+b][2a'+b]`.
    pub fn partial_trace_second(&self) -> Mat2<T> {
        let mut out = Mat2::zero();
        for a in 0..2 {
            for a2 in 0..2 {
                out.m[a][a2] = self.m[2 * a][2 * a2] + self.m[2 * a + 1][2 * a2 + 1];
            }
        }
        out
    }

    /// Traces out the first tensor slot: `Ω[b][b'] = Σ_a M[2a+b][2a+b']`.
    pub fn partial_trace_first(&self) -> Mat2<T> {
        let mut out = Mat2::zero();
        for b in 0..2 {
            for b2 in 0..2 {
                out.m[b][b2] = self.m[b][b2] + self.m[2 + b][2 + b2];
            }
        }
        out
    }
}

impl<T: Real> Add for Mat4<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.m[i][j] = out.m[i][j] + o.m[i][j];
            }
        }
        out
    }
}

impl<T: Real> Sub for Mat4<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale(-T::one())
    }
}

impl<T: Real> Mul for Mat4<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.m[i][j] = (0..4).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        out
    }
}

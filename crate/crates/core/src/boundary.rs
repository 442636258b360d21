//! Boundary environment: Pauli matrices compressed along prescribed directions.
//!
//! A boundary site `j` carries a direction `θ_j = d·ω_j + φ`. Its spin
//! operators are `Π_θ σ Π_θ` with `Π_θ` the projector onto `(cos θ, sin θ)`,
//! which leaves `σ^x(θ) = sin(2θ) Π_θ` and `σ^y(θ) = 0`.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::scalar::Real;
use crate::small::Mat2;

pub type TwoByTwo<T> = Mat2<T>;

/// Rank-one projector onto the line at angle `theta`.
pub fn projector<T: Real>(theta: T) -> Mat2<T> {
    let (s, c) = theta.sin_cos();
    Mat2::symmetric(c * c, c * s, s * s)
}

/// `Π_θ σ^x Π_θ = sin(2θ) Π_θ`.
pub fn sigma_x_compressed<T: Real>(theta: T) -> Mat2<T> {
    projector(theta).scale((theta + theta).sin())
}

/// `Π_θ σ^y Π_θ`, identically zero.
pub fn sigma_y_compressed<T: Real>(_theta: T) -> Mat2<T> {
    Mat2::zero()
}

/// Winding boundary condition on `∂Λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCondition<T> {
    pub degree: i32,
    pub phase: T,
    /// Indexed by site; `Some` exactly on boundary sites. Angles are not
    /// reduced modulo 2π.
    angles: Vec<Option<T>>,
}

impl<T: Real> BoundaryCondition<T> {
    pub fn angle(&self, site: usize) -> Option<T> {
        self.angles.get(site).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// `(site, θ)` for every boundary site, by ascending index.
    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.angles.iter().enumerate().filter_map(|(i, a)| a.map(|a| (i, a)))
    }
}

/// `θ_j = d·ω_j + φ` on every boundary site.
pub fn boundary_angles<T: Real>(lattice: &Lattice, degree: i32, phase: T) -> Result<BoundaryCondition<T>> {
    if lattice.is_free() {
        return Err(Error::NoBoundary);
    }
    let d = T::lit(degree as f64);
    let angles = lattice.sites().iter().map(|s| s.region.is_boundary().then(|| d * T::lit(s.omega) + phase)).collect();
    Ok(BoundaryCondition { degree, phase, angles })
}

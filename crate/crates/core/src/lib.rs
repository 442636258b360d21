//! Finite-lattice simulator for the anisotropic quantum XY model with a
//! winding boundary environment.
//!
//! The pipeline runs
//! [`lattice`] → [`boundary`] → [`hamiltonian`] → [`spectral`] →
//! [`vorticity`] → [`degree`], with [`render`] producing SVG figures and
//! [`runner`] wiring everything to presets and the command line.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the double-precision flavour used by the CLI.

pub mod boundary;
pub mod degree;
pub mod dense;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod render;
pub mod runner;
pub mod scalar;
pub mod small;
pub mod spectral;
pub mod vorticity;

pub use error::{Error, Result};
pub use lattice::{Bond, BondKind, Contour, Lattice, LatticeSpec, Region, Site};
pub use scalar::Real;

pub type Mat2 = small::Mat2<f64>;
pub type Mat4 = small::Mat4<f64>;
pub type Matrix = dense::DenseMatrix<f64>;
pub type BoundaryCondition = boundary::BoundaryCondition<f64>;
pub type ModelParams = hamiltonian::ModelParams<f64>;
pub type BlockHamiltonian = hamiltonian::BlockHamiltonian<f64>;
pub type SpectralData = spectral::SpectralData<f64>;
pub type GibbsMatrix<'a> = spectral::GibbsMatrix<'a, f64>;
pub type VorticityField = vorticity::VorticityField<f64>;
pub type MatrixFieldOnContour = degree::MatrixFieldOnContour<f64>;
pub type DegreeEstimate = degree::DegreeEstimate<f64>;

//! Anisotropic XY Hamiltonian `H_(n,k)(σ|∂Λ)` on the site-blocked space R^{4N}.
//!
//! Each site owns a four-dimensional slot R^2 ⊗ R^2. A nearest-neighbour
//! term `A ⊗ B` of the interaction occupies the 4x4 block `(i, j)`, with its
//! transpose at `(j, i)`; site-diagonal blocks are zero. With prefactor
//! `c = 1/(2(n+k))` the three bond kinds contribute
//!
//! * bulk–bulk: `-c (n σ^x⊗σ^x + k σ^y⊗σ^y)`,
//! * bulk–boundary (`i ∈ Λ`, `j ∈ ∂Λ`): `-c n σ^x⊗σ^x(θ_j)`,
//! * boundary–boundary: `-c n σ^x(θ_i)⊗σ^x(θ_j)`.
//!
//! A boundary–boundary bond puts the endpoint with the smaller `|sin 2θ|` in
//! the second factor (ties keep index order).
//!
//! `σ^y⊗σ^y` is real: writing `σ^y = iJ`, it equals `-J⊗J`.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::boundary::{sigma_x_compressed, BoundaryCondition};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::lattice::{BondKind, Lattice};
use crate::scalar::Real;
use crate::small::{Mat2, Mat4};

/// Default ceiling on `N = |Λ ∪ ∂Λ|`; the dense eigenproblem has size `4N`.
pub const DEFAULT_MAX_SITES: usize = 1600;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    /// Weight of the `σ^x σ^x` coupling.
    pub n: T,
    /// Weight of the `σ^y σ^y` coupling.
    pub k: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(n: T, k: T) -> Result<Self> {
        let p = Self { n, k };
        p.validate()?;
        Ok(p)
    }

    pub fn isotropic() -> Self {
        Self { n: T::one(), k: T::one() }
    }

    /// `H_(1,k)`.
    pub fn anisotropic(k: T) -> Result<Self> {
        Self::new(T::one(), k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n > T::zero() && self.n.is_finite() && self.k > T::zero() && self.k.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "n and k must be positive and finite, got n={}, k={}",
                self.n, self.k
            )));
        }
        Ok(())
    }

    /// `1 / (2(n + k))`.
    pub fn prefactor(&self) -> T {
        T::one() / (T::lit(2.0) * (self.n + self.k))
    }
}

/// `σ^y ⊗ σ^y` as a real matrix.
pub fn sigma_yy<T: Real>() -> Mat4<T> {
    let j = Mat2::<T>::sigma_y_real_part();
    j.kron(&j).scale(-T::one())
}

/// 4x4 coupling block for one bond.
///
/// For `BulkBoundary` the first site is the bulk one and only `theta_j` is
/// read; for `BoundaryBoundary` both angles are required.
pub fn bond_block<T: Real>(
    kind: BondKind,
    theta_i: Option<T>,
    theta_j: Option<T>,
    params: &ModelParams<T>,
) -> Result<Mat4<T>> {
    let c = params.prefactor();
    let sx = Mat2::<T>::sigma_x();
    let need = |t: Option<T>, which: usize| t.ok_or(Error::MissingAngle { site: which });
    Ok(match kind {
        BondKind::BulkBulk => (sx.kron(&sx).scale(params.n) + sigma_yy::<T>().scale(params.k)).scale(-c),
        BondKind::BulkBoundary => {
            let tj = need(theta_j, 1)?;
            sx.kron(&sigma_x_compressed(tj)).scale(-c * params.n)
        }
        BondKind::BoundaryBoundary => {
            let ti = need(theta_i, 0)?;
            let tj = need(theta_j, 1)?;
            sigma_x_compressed(ti).kron(&sigma_x_compressed(tj)).scale(-c * params.n)
        }
    })
}

/// Real symmetric `4N x 4N` matrix stored as its nonzero 4x4 blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHamiltonian<T> {
    n_sites: usize,
    blocks: BTreeMap<(usize, usize), Mat4<T>>,
}

impl<T: Real> BlockHamiltonian<T> {
    /// Builds a Hamiltonian from explicit `(i, j)` blocks; the transpose of
    /// each block is placed at `(j, i)`.
    pub fn from_bond_blocks(n_sites: usize, bonds: impl IntoIterator<Item = ((usize, usize), Mat4<T>)>) -> Self {
        let mut blocks = BTreeMap::new();
        for ((i, j), b) in bonds {
            assert!(i < n_sites && j < n_sites && i != j, "block ({i}, {j}) out of range");
            blocks.insert((j, i), b.transpose());
            blocks.insert((i, j), b);
        }
        Self { n_sites, blocks }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        4 * self.n_sites
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&Mat4<T>> {
        self.blocks.get(&(i, j))
    }

    /// Stored blocks in `(row site, column site)` order.
    pub fn blocks(&self) -> impl Iterator<Item = ((usize, usize), &Mat4<T>)> + '_ {
        self.blocks.iter().map(|(&k, v)| (k, v))
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.blocks.get(&(row / 4, col / 4)).map_or(T::zero(), |b| b.m[row % 4][col % 4])
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut out = DenseMatrix::zeros(self.dim(), self.dim());
        for (&(i, j), b) in &self.blocks {
            for r in 0..4 {
                for c in 0..4 {
                    out[(4 * i + r, 4 * j + c)] = b.m[r][c];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.blocks.values().flat_map(|b| b.m.iter().flatten()).map(|&x| x * x).sum::<T>().sqrt()
    }

    /// `max |H - Hᵀ|` over all entries.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for (&(i, j), b) in &self.blocks {
            let other = self.blocks.get(&(j, i)).map_or_else(Mat4::zero, |m| m.transpose());
            worst = worst.max((*b - other).max_abs());
        }
        worst
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim());
        let mut y = vec![T::zero(); self.dim()];
        for (&(i, j), b) in &self.blocks {
            for r in 0..4 {
                let mut acc = y[4 * i + r];
                for c in 0..4 {
                    acc = acc + b.m[r][c] * x[4 * j + c];
                }
                y[4 * i + r] = acc;
            }
        }
        y
    }

    /// `Uᵀ H U` with `U = diag(ε_i I₄)`: `ε_i = (-1)^(col+row)` on `Λ` and
    /// `ε_j = 1` on the environment `∂Λ`, whose spins are not flipped.
    pub fn chessboard_flip(&self, lattice: &Lattice) -> BlockHamiltonian<T> {
        let eps = |i: usize| if lattice.site(i).region.is_boundary() { 1 } else { lattice.parity_sign(i) };
        let blocks = self
            .blocks
            .iter()
            .map(|(&(i, j), b)| {
                let sign = eps(i) * eps(j);
                ((i, j), if sign < 0 { b.scale(-T::one()) } else { *b })
            })
            .collect();
        BlockHamiltonian { n_sites: self.n_sites, blocks }
    }

    /// Entrywise `max |self + other|`; zero when `other = -self`.
    pub fn max_abs_sum(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for key in self.blocks.keys().chain(other.blocks.keys()) {
            let a = self.blocks.get(key).copied().unwrap_or_else(Mat4::zero);
            let b = other.blocks.get(key).copied().unwrap_or_else(Mat4::zero);
            worst = worst.max((a + b).max_abs());
        }
        worst
    }

    /// Writes the nonzero entries in Matrix Market coordinate format
    /// (1-based `row col value`, general storage, full precision).
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> io::Result<()> {
        let entries: Vec<(usize, usize, T)> = self
            .blocks
            .iter()
            .flat_map(|(&(i, j), b)| {
                (0..16).filter_map(move |e| {
                    let (r, c) = (e / 4, e % 4);
                    let v = b.m[r][c];
                    (v != T::zero()).then_some((4 * i + r, 4 * j + c, v))
                })
            })
            .collect();
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "% xyvortex block Hamiltonian, {} sites, 4x4 blocks per site pair", self.n_sites)?;
        writeln!(w, "{} {} {}", self.dim(), self.dim(), entries.len())?;
        for (r, c, v) in entries {
            writeln!(w, "{} {} {:e}", r + 1, c + 1, v.as_f64())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AssemblyOptions {
    pub max_sites: usize,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self { max_sites: DEFAULT_MAX_SITES }
    }
}

pub fn assemble<T: Real>(
    lattice: &Lattice,
    params: &ModelParams<T>,
    bc: Option<&BoundaryCondition<T>>,
) -> Result<BlockHamiltonian<T>> {
    assemble_with(lattice, params, bc, AssemblyOptions::default())
}

fn compression_weight<T: Real>(theta: Option<T>) -> T {
    theta.map_or(T::zero(), |t| (t + t).sin().abs())
}

pub fn assemble_with<T: Real>(
    lattice: &Lattice,
    params: &ModelParams<T>,
    bc: Option<&BoundaryCondition<T>>,
    options: AssemblyOptions,
) -> Result<BlockHamiltonian<T>> {
    params.validate()?;
    if lattice.len() > options.max_sites {
        return Err(Error::TooLarge { sites: lattice.len(), max: options.max_sites });
    }
    match (lattice.is_free(), bc) {
        (true, Some(_)) => return Err(Error::BoundaryMismatch("free lattice given a boundary condition".into())),
        (false, None) => {
            return Err(Error::BoundaryMismatch("lattice with boundary layers needs a boundary condition".into()))
        }
        (false, Some(bc)) if bc.len() != lattice.len() => {
            return Err(Error::BoundaryMismatch(format!(
                "boundary condition covers {} sites, lattice has {}",
                bc.len(),
                lattice.len()
            )))
        }
        _ => {}
    }
    let angle = |site: usize| bc.and_then(|bc| bc.angle(site));

    let mut blocks = BTreeMap::new();
    for bond in lattice.bonds() {
        let (i, j) = match bond.kind {
            BondKind::BulkBoundary if lattice.site(bond.a).region.is_boundary() => (bond.b, bond.a),
            // The second tensor factor carries the weaker compressed operator; this keeps
            // each boundary site's own direction dominant in its retained slot.
            BondKind::BoundaryBoundary if compression_weight(angle(bond.b)) > compression_weight(angle(bond.a)) => {
                (bond.b, bond.a)
            }
            _ => (bond.a, bond.b),
        };
        let block = bond_block(bond.kind, angle(i), angle(j), params).map_err(|e| match e {
            Error::MissingAngle { site } => Error::MissingAngle { site: if site == 0 { i } else { j } },
            other => other,
        })?;
        blocks.insert((j, i), block.transpose());
        blocks.insert((i, j), block);
    }
    Ok(BlockHamiltonian { n_sites: lattice.len(), blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::boundary_angles;
    use crate::lattice::LatticeSpec;
    use std::f64::consts::FRAC_PI_4;

    fn free(w: usize, h: usize) -> Lattice {
        Lattice::new(LatticeSpec::free(w, h)).unwrap()
    }

    /// Jacobi eigenvalues of a small dense symmetric matrix; independent of faer.
    fn jacobi_eigenvalues(m: &DenseMatrix<f64>) -> Vec<f64> {
        let n = m.rows();
        let mut a = m.clone();
        for _ in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|(i, j)| i != j)
                .map(|(i, j)| a[(i, j)].powi(2))
                .sum();
            if off < 1e-28 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[(k, p)], a[(k, q)]);
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn sigma_yy_is_real_kronecker_square() {
        let yy = sigma_yy::<f64>();
        // σ^y⊗σ^y has +1 on the anti-diagonal corners (1,2),(2,1) and -1 on (0,3),(3,0)
        assert_eq!(yy.m[0][3], -1.0);
        assert_eq!(yy.m[3][0], -1.0);
        assert_eq!(yy.m[1][2], 1.0);
        assert_eq!(yy.m[2][1], 1.0);
        assert_eq!(yy * yy, Mat4::identity());
    }

    #[test]
    fn isotropic_bulk_block_has_rank_two() {
        let p = ModelParams::<f64>::isotropic();
        let b = bond_block(BondKind::BulkBulk, None, None, &p).unwrap();
        let d = DenseMatrix::from_fn(4, 4, |i, j| b.m[i][j]);
        let ev = jacobi_eigenvalues(&d);
        let expected = [-0.5, 0.0, 0.0, 0.5];
        for (a, e) in ev.iter().zip(expected) {
            assert!((a - e).abs() < 1e-14, "{ev:?}");
        }
    }

    #[test]
    fn bulk_boundary_block_vanishes_at_zero_angle() {
        let p = ModelParams::<f64>::anisotropic(10.0).unwrap();
        let b = bond_block(BondKind::BulkBoundary, None, Some(0.0), &p).unwrap();
        assert!(b.is_zero());
        assert_eq!(bond_block(BondKind::BulkBoundary, None, None, &p), Err(Error::MissingAngle { site: 1 }));
        assert!(bond_block(BondKind::BoundaryBoundary, None, Some(0.1), &p).is_err());
    }

    #[test]
    fn boundary_boundary_block_is_rank_one_product() {
        let p = ModelParams::<f64>::anisotropic(2.0).unwrap();
        let b = bond_block(BondKind::BoundaryBoundary, Some(FRAC_PI_4), Some(FRAC_PI_4), &p).unwrap();
        let half = Mat2::new(0.5, 0.5, 0.5, 0.5);
        let expected = half.kron(&half).scale(-p.prefactor());
        assert!((b - expected).max_abs() < 1e-15);
        let d = DenseMatrix::from_fn(4, 4, |i, j| b.m[i][j]);
        let ev = jacobi_eigenvalues(&d);
        assert_eq!(ev.iter().filter(|x| x.abs() > 1e-12).count(), 1);
    }

    #[test]
    fn two_site_chain() {
        let l = free(2, 1);
        let h = assemble(&l, &ModelParams::<f64>::isotropic(), None).unwrap();
        assert_eq!(h.dim(), 8);
        assert!(h.block(0, 0).is_none() && h.block(1, 1).is_none());
        let ev = jacobi_eigenvalues(&h.to_dense());
        let expected = [-0.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5];
        for (a, e) in ev.iter().zip(expected) {
            assert!((a - e).abs() < 1e-13, "{ev:?}");
        }
        let flipped = h.chessboard_flip(&l);
        assert_eq!(h.max_abs_sum(&flipped), 0.0);
    }

    #[test]
    fn small_free_lattice_half_kernel_by_rank_bound() {
        let l = free(2, 2);
        let h = assemble(&l, &ModelParams::<f64>::isotropic(), None).unwrap();
        let ev = jacobi_eigenvalues(&h.to_dense());
        assert_eq!(ev.len(), 16);
        assert!(ev.iter().filter(|x| x.abs() < 1e-10).count() >= 8, "{ev:?}");
    }

    #[test]
    fn symmetric_for_every_configuration() {
        for (spec, k, d) in [
            (LatticeSpec::new(3, 3, 1), 1.0, 1),
            (LatticeSpec::new(4, 2, 2), 10.0, 3),
            (LatticeSpec::free(3, 4), 2.0, 0),
        ] {
            let l = Lattice::new(spec).unwrap();
            let p = ModelParams::anisotropic(k).unwrap();
            let bc = (!l.is_free()).then(|| boundary_angles(&l, d, 0.3).unwrap());
            let h = assemble(&l, &p, bc.as_ref()).unwrap();
            assert_eq!(h.asymmetry(), 0.0);
            assert_eq!(h.to_dense().asymmetry(), 0.0);
            for ((i, j), _) in h.blocks() {
                assert_ne!(i, j);
                assert!(l.neighbors(i).any(|n| n == j));
            }
        }
    }

    #[test]
    fn boundary_pairs_put_weaker_operator_second() {
        let l = Lattice::new(LatticeSpec::from_total(7, 9, 2).unwrap()).unwrap();
        let bc = boundary_angles(&l, 2, 0.3).unwrap();
        let p = ModelParams::anisotropic(10.0).unwrap();
        let h = assemble(&l, &p, Some(&bc)).unwrap();
        let w = |s: usize| (2.0f64 * bc.angle(s).unwrap()).sin().abs();
        let mut seen = 0;
        for b in l.bonds().into_iter().filter(|b| b.kind == BondKind::BoundaryBoundary) {
            let (strong, weak) = if w(b.b) > w(b.a) { (b.b, b.a) } else { (b.a, b.b) };
            let expected = sigma_x_compressed(bc.angle(strong).unwrap())
                .kron(&sigma_x_compressed(bc.angle(weak).unwrap()))
                .scale(-p.prefactor());
            assert!((*h.block(b.a, b.b).unwrap() - expected).max_abs() < 1e-15);
            assert!((*h.block(b.b, b.a).unwrap() - expected).max_abs() < 1e-15);
            seen += 1;
        }
        assert!(seen > 20);
    }

    #[test]
    fn chessboard_flip_with_boundary_is_not_negation() {
        let l = Lattice::new(LatticeSpec::new(3, 3, 1)).unwrap();
        let bc = boundary_angles(&l, 1, 0.0).unwrap();
        let h = assemble(&l, &ModelParams::isotropic(), Some(&bc)).unwrap();
        let f = h.chessboard_flip(&l);
        assert!(h.max_abs_sum(&f) > 0.0);

        let free = free(4, 4);
        let h = assemble(&free, &ModelParams::anisotropic(10.0).unwrap(), None).unwrap();
        assert_eq!(h.max_abs_sum(&h.chessboard_flip(&free)), 0.0);
    }

    #[test]
    fn boundary_condition_presence_must_match() {
        let l = Lattice::new(LatticeSpec::new(2, 2, 1)).unwrap();
        let p = ModelParams::<f64>::isotropic();
        assert!(matches!(assemble(&l, &p, None), Err(Error::BoundaryMismatch(_))));
        let f = free(2, 2);
        let bc = boundary_angles(&l, 1, 0.0).unwrap();
        assert!(matches!(assemble(&f, &p, Some(&bc)), Err(Error::BoundaryMismatch(_))));
    }

    #[test]
    fn size_guard() {
        let l = free(10, 10);
        let err = assemble_with(&l, &ModelParams::<f64>::isotropic(), None, AssemblyOptions { max_sites: 99 });
        assert_eq!(err, Err(Error::TooLarge { sites: 100, max: 99 }));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(0.0f64, 1.0).is_err());
        assert!(ModelParams::new(1.0f64, -2.0).is_err());
        assert!(ModelParams::new(1.0f64, f64::NAN).is_err());
        assert_eq!(ModelParams::new(1.0f64, 10.0).unwrap().prefactor(), 1.0 / 22.0);
    }

    #[test]
    fn matrix_market_dump() {
        let l = free(2, 1);
        let h = assemble(&l, &ModelParams::<f64>::isotropic(), None).unwrap();
        let mut buf = Vec::new();
        h.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines().filter(|l| !l.starts_with('%'));
        // the isotropic block has two nonzeros: σ^xσ^x and σ^yσ^y cancel on the corners
        assert_eq!(lines.next(), Some("8 8 4"));
        let mut rebuilt = DenseMatrix::<f64>::zeros(8, 8);
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            rebuilt[(f[0].parse::<usize>().unwrap() - 1, f[1].parse::<usize>().unwrap() - 1)] = f[2].parse().unwrap();
        }
        assert_eq!(rebuilt, h.to_dense());
    }

    #[test]
    fn matvec_matches_dense() {
        let l = Lattice::new(LatticeSpec::new(2, 3, 1)).unwrap();
        let bc = boundary_angles(&l, 2, 0.1).unwrap();
        let h = assemble(&l, &ModelParams::anisotropic(2.0).unwrap(), Some(&bc)).unwrap();
        let x: Vec<f64> = (0..h.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
        let y = h.matvec(&x);
        let d = h.to_dense();
        for r in 0..h.dim() {
            let expect: f64 = (0..h.dim()).map(|c| d[(r, c)] * x[c]).sum();
            assert!((expect - y[r]).abs() < 1e-14);
        }
    }
}

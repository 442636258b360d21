//! Site-local 2x2 vorticity matrices extracted from a Gibbs matrix.
//!
//! `Ω^i` is the partial trace of the site-diagonal 4x4 block `G_ii` over one
//! tensor slot. Its traceless part `Ω̃^i = r [[cos 2α, sin 2α], [sin 2α, -cos 2α]]`
//! is drawn as a cross along `α` and `α + π/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Region};
use crate::scalar::Real;
use crate::small::Mat2;
use crate::spectral::GibbsMatrix;

/// Crosses below this magnitude carry no direction.
pub const DEGENERATE_MAGNITUDE: f64 = 1e-14;

/// Which factor of R^2 ⊗ R^2 is traced out.
///
/// Compressed boundary operators enter the second factor of their bonds, so
/// `First` keeps the boundary directions. `Average` treats both factors alike;
/// in the isotropic model it is exactly scalar away from the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum TraceSlot {
    First,
    Second,
    /// Mean of the two partial traces.
    #[default]
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cross<T> {
    /// Principal direction in `(-π/2, π/2]`.
    pub angle: T,
    /// Eigenvalues of the reduced matrix are `±magnitude`.
    pub magnitude: T,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteVorticity<T> {
    pub omega: Mat2<T>,
    pub reduced: Mat2<T>,
    pub cross: Cross<T>,
}

#[derive(Debug, Clone)]
pub struct VorticityField<T> {
    pub beta: T,
    pub trace_slot: TraceSlot,
    pub sites: Vec<SiteVorticity<T>>,
}

/// Traceless part `Ω - (tr Ω / 2) I` of a symmetric 2x2 matrix.
pub fn reduce<T: Real>(omega: &Mat2<T>) -> Result<Mat2<T>> {
    let asym = (omega.m[0][1] - omega.m[1][0]).abs();
    let scale = omega.frobenius_norm().max(T::min_positive_value());
    if asym > T::lit(1e-10) * scale {
        return Err(Error::NotSymmetric(asym.as_f64()));
    }
    let half = T::lit(0.5);
    let a = (omega.m[0][0] - omega.m[1][1]) * half;
    let b = (omega.m[0][1] + omega.m[1][0]) * half;
    Ok(Mat2::symmetric(a, b, -a))
}

/// Principal direction and magnitude of a symmetric traceless matrix.
pub fn principal_cross<T: Real>(reduced: &Mat2<T>) -> Cross<T> {
    let a = reduced.m[0][0];
    let b = (reduced.m[0][1] + reduced.m[1][0]) * T::lit(0.5);
    let magnitude = a.hypot(b);
    if magnitude == T::zero() {
        return Cross { angle: T::zero(), magnitude, degenerate: true };
    }
    let mut angle = b.atan2(a) * T::lit(0.5);
    if angle <= -T::FRAC_PI_2() {
        angle = angle + T::PI();
    }
    Cross { angle, magnitude, degenerate: magnitude.as_f64() < DEGENERATE_MAGNITUDE }
}

pub fn vorticity_field<T: Real>(
    gibbs: &GibbsMatrix<'_, T>,
    lattice: &Lattice,
    trace_slot: TraceSlot,
) -> Result<VorticityField<T>> {
    if gibbs.dim() != 4 * lattice.len() {
        return Err(Error::InvalidLattice(format!(
            "Gibbs matrix of dimension {} does not belong to a lattice of {} sites",
            gibbs.dim(),
            lattice.len()
        )));
    }
    let sites = (0..lattice.len())
        .map(|i| {
            let block = gibbs.site_block(i);
            let omega = match trace_slot {
                TraceSlot::First => block.partial_trace_first(),
                TraceSlot::Second => block.partial_trace_second(),
                TraceSlot::Average => (block.partial_trace_first() + block.partial_trace_second()).scale(T::lit(0.5)),
            };
            let reduced = reduce(&omega)?;
            Ok(SiteVorticity { omega, reduced, cross: principal_cross(&reduced) })
        })
        .collect::<Result<_>>()?;
    Ok(VorticityField { beta: gibbs.beta(), trace_slot, sites })
}

impl<T: Real> VorticityField<T> {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// `Σ_i tr Ω^i`.
    pub fn total_trace(&self) -> T {
        self.sites.iter().map(|s| s.omega.trace()).sum()
    }

    /// Smallest eigenvalue over all `Ω^i`.
    pub fn min_eigenvalue(&self) -> T {
        self.sites.iter().map(|s| s.omega.symmetric_eigenvalues()[0]).fold(T::infinity(), T::min)
    }

    pub fn max_magnitude(&self) -> T {
        self.sites.iter().map(|s| s.cross.magnitude).fold(T::zero(), T::max)
    }

    /// Per-site `‖Ω_self - Ω_other‖_F / ‖Ω_self‖_F` (absolute where `Ω_self = 0`).
    pub fn relative_deviation(&self, other: &Self) -> Vec<T> {
        self.sites
            .iter()
            .zip(&other.sites)
            .map(|(a, b)| {
                let diff = (a.omega - b.omega).frobenius_norm();
                let norm = a.omega.frobenius_norm();
                if norm > T::zero() {
                    diff / norm
                } else {
                    diff
                }
            })
            .collect()
    }

    pub fn records(&self, lattice: &Lattice) -> Vec<FieldRecord> {
        self.sites
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let site = lattice.site(i);
                FieldRecord {
                    index: i,
                    coords: [site.col, site.row],
                    region: site.region,
                    omega11: s.omega.m[0][0].as_f64(),
                    omega12: s.omega.m[0][1].as_f64(),
                    omega22: s.omega.m[1][1].as_f64(),
                    angle: s.cross.angle.as_f64(),
                    magnitude: s.cross.magnitude.as_f64(),
                }
            })
            .collect()
    }
}

/// One entry of the field export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub index: usize,
    pub coords: [usize; 2],
    pub region: Region,
    pub omega11: f64,
    pub omega12: f64,
    pub omega22: f64,
    pub angle: f64,
    pub magnitude: f64,
}

/// Largest cross magnitude on each interior ring, `(ring, max r)` from the
/// ring next to the boundary inwards.
pub fn decay_profile<T: Real>(field: &VorticityField<T>, lattice: &Lattice) -> Vec<(usize, T)> {
    let rings = lattice.max_interior_ring();
    let mut out: Vec<(usize, T)> = (1..=rings).map(|m| (m, T::zero())).collect();
    for (i, s) in field.sites.iter().enumerate() {
        if let Some(m) = lattice.interior_ring(i) {
            out[m - 1].1 = out[m - 1].1.max(s.cross.magnitude);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::boundary_angles;
    use crate::hamiltonian::{assemble, ModelParams};
    use crate::lattice::LatticeSpec;
    use crate::spectral::{diagonalize, gibbs, GibbsSign};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn reduce_examples() {
        let c = Mat2::<f64>::symmetric(0.4, 0.0, 0.4);
        assert_eq!(reduce(&c).unwrap(), Mat2::zero());
        let r = reduce(&Mat2::symmetric(0.3, 0.1, 0.1)).unwrap();
        assert!(r.max_abs_diff(&Mat2::symmetric(0.1, 0.1, -0.1)) < 1e-15);
        let [lo, hi] = r.symmetric_eigenvalues();
        assert!((hi - 0.02f64.sqrt()).abs() < 1e-15 && (lo + 0.02f64.sqrt()).abs() < 1e-15);
        assert_eq!(reduce(&r).unwrap(), r);
        assert!(reduce(&Mat2::new(1.0, 0.5, 0.0, 1.0)).is_err());
    }

    #[test]
    fn cross_examples() {
        let c = principal_cross(&Mat2::<f64>::symmetric(1.0, 0.0, -1.0));
        assert_eq!((c.angle, c.magnitude, c.degenerate), (0.0, 1.0, false));
        let c = principal_cross(&Mat2::<f64>::symmetric(0.0, 1.0, 0.0));
        assert!((c.angle - FRAC_PI_4).abs() < 1e-15 && c.magnitude == 1.0);
        let c = principal_cross(&Mat2::<f64>::symmetric(0.0, -1.0, 0.0));
        assert!((c.angle + FRAC_PI_4).abs() < 1e-15);
        let c = principal_cross(&Mat2::<f64>::symmetric(-1.0, 0.0, 1.0));
        assert!((c.angle - FRAC_PI_2).abs() < 1e-15);
        let c = principal_cross(&Mat2::<f64>::zero());
        assert!(c.degenerate && c.angle == 0.0);
    }

    proptest! {
        #[test]
        fn cross_inverts_parametrization(alpha in -1.5707f64..1.5707, r in 1e-6f64..10.0) {
            let (s, c) = (2.0 * alpha).sin_cos();
            let m = Mat2::symmetric(r * c, r * s, -r * c);
            let cross = principal_cross(&m);
            prop_assert!((cross.angle - alpha).abs() < 1e-9);
            prop_assert!((cross.magnitude - r).abs() < 1e-12 * r.max(1.0));
            let [lo, hi] = m.symmetric_eigenvalues();
            prop_assert!((hi - r).abs() < 1e-12 * r.max(1.0) && (lo + r).abs() < 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn infinite_temperature_field_is_scalar() {
        let l = Lattice::new(LatticeSpec::new(3, 2, 1)).unwrap();
        let bc = boundary_angles(&l, 1, 0.0).unwrap();
        let h = assemble(&l, &ModelParams::anisotropic(10.0).unwrap(), Some(&bc)).unwrap();
        let s = diagonalize(&h).unwrap();
        let g = gibbs(&s, 0.0, GibbsSign::PlusBetaH).unwrap();
        let f = vorticity_field(&g, &l, TraceSlot::Second).unwrap();
        let n = l.len() as f64;
        for site in &f.sites {
            assert!(site.omega.max_abs_diff(&Mat2::identity().scale(1.0 / (2.0 * n))) < 1e-15);
            assert_eq!(site.reduced, Mat2::zero());
        }
        assert!(decay_profile(&f, &l).iter().all(|&(_, r)| r == 0.0));
    }

    #[test]
    fn field_invariants_small_lattice() {
        let l = Lattice::new(LatticeSpec::new(3, 3, 2)).unwrap();
        let bc = boundary_angles(&l, 1, 0.3f64).unwrap();
        let h = assemble(&l, &ModelParams::anisotropic(2.0).unwrap(), Some(&bc)).unwrap();
        let s = diagonalize(&h).unwrap();
        for slot in [TraceSlot::First, TraceSlot::Second, TraceSlot::Average] {
            let g = gibbs(&s, 1.5, GibbsSign::PlusBetaH).unwrap();
            let f = vorticity_field(&g, &l, slot).unwrap();
            assert!((f.total_trace() - 1.0).abs() < 1e-12);
            assert!(f.min_eigenvalue() >= -1e-12);
            for site in &f.sites {
                assert!(site.reduced.trace().abs() < 1e-16);
            }
        }
        let profile = decay_profile(
            &vorticity_field(&gibbs(&s, 1.0, GibbsSign::PlusBetaH).unwrap(), &l, TraceSlot::Second).unwrap(),
            &l,
        );
        assert_eq!(profile.iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn default_slot_follows_boundary_directions() {
        let l = Lattice::new(LatticeSpec::new(5, 7, 2)).unwrap();
        let bc = boundary_angles(&l, 1, 0.2f64).unwrap();
        let h = assemble(&l, &ModelParams::anisotropic(10.0).unwrap(), Some(&bc)).unwrap();
        let s = diagonalize(&h).unwrap();
        let g = gibbs(&s, 1.0, GibbsSign::PlusBetaH).unwrap();
        let worst = |slot| {
            let f = vorticity_field(&g, &l, slot).unwrap();
            bc.iter()
                .filter(|(_, t)| (2.0 * t).sin().abs() > 0.1)
                .map(|(j, t)| {
                    let d = (f.sites[j].cross.angle - t).rem_euclid(std::f64::consts::PI);
                    d.min(std::f64::consts::PI - d)
                })
                .fold(0.0, f64::max)
        };
        assert!(worst(TraceSlot::default()) < 0.15, "{}", worst(TraceSlot::default()));
    }

    #[test]
    fn averaged_isotropic_bulk_is_scalar() {
        let l = Lattice::new(LatticeSpec::new(5, 7, 2)).unwrap();
        let bc = boundary_angles(&l, 1, 0.0f64).unwrap();
        let h = assemble(&l, &ModelParams::isotropic(), Some(&bc)).unwrap();
        let s = diagonalize(&h).unwrap();
        let g = gibbs(&s, 1.0, GibbsSign::PlusBetaH).unwrap();
        let profile = decay_profile(&vorticity_field(&g, &l, TraceSlot::Average).unwrap(), &l);
        assert!(profile[0].1 > 1e-8);
        assert!(profile[1..].iter().all(|&(_, r)| r < 1e-15), "{profile:?}");
    }

    #[test]
    fn mismatched_lattice_is_rejected() {
        let l = Lattice::new(LatticeSpec::free(2, 2)).unwrap();
        let h = assemble(&l, &ModelParams::<f64>::isotropic(), None).unwrap();
        let s = diagonalize(&h).unwrap();
        let g = gibbs(&s, 1.0, GibbsSign::PlusBetaH).unwrap();
        let other = Lattice::new(LatticeSpec::free(3, 2)).unwrap();
        assert!(vorticity_field(&g, &other, TraceSlot::Second).is_err());
    }
}

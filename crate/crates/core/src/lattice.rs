//! Rectangular lattice `Λ` surrounded by `b` boundary rings `∂Λ`.
//!
//! Sites are numbered row-major from the lower-left corner; `row` grows
//! northwards. Polar angles are measured from the geometric centre of the
//! full rectangle, which is a half-integer point whenever a side length is
//! even.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub inner_width: usize,
    pub inner_height: usize,
    /// Number of boundary rings; zero gives the free lattice with `∂Λ = ∅`.
    pub boundary_layers: usize,
}

impl LatticeSpec {
    pub fn new(inner_width: usize, inner_height: usize, boundary_layers: usize) -> Self {
        Self { inner_width, inner_height, boundary_layers }
    }

    /// Free lattice without boundary environment.
    pub fn free(width: usize, height: usize) -> Self {
        Self::new(width, height, 0)
    }

    /// Layout from the full `Λ ∪ ∂Λ` dimensions.
    pub fn from_total(total_width: usize, total_height: usize, boundary_layers: usize) -> Result<Self> {
        let inner = |t: usize| t.checked_sub(2 * boundary_layers).filter(|&w| w >= 1);
        match (inner(total_width), inner(total_height)) {
            (Some(w), Some(h)) => Ok(Self::new(w, h, boundary_layers)),
            _ => Err(Error::InvalidLattice(format!(
                "{total_width}x{total_height} cannot hold {boundary_layers} boundary layers around a nonempty interior"
            ))),
        }
    }

    pub fn total_width(&self) -> usize {
        self.inner_width + 2 * self.boundary_layers
    }

    pub fn total_height(&self) -> usize {
        self.inner_height + 2 * self.boundary_layers
    }

    pub fn total_sites(&self) -> usize {
        self.total_width() * self.total_height()
    }

    pub fn validate(&self) -> Result<()> {
        if self.inner_width == 0 || self.inner_height == 0 {
            return Err(Error::InvalidLattice(format!(
                "inner dimensions must be positive, got {}x{}",
                self.inner_width, self.inner_height
            )));
        }
        self.total_width()
            .checked_mul(self.total_height())
            .ok_or_else(|| Error::InvalidLattice("site count overflows".into()))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Interior,
    /// Boundary ring `ℓ`, counted from the outside (`ℓ = 1` is the outermost).
    BoundaryLayer(usize),
}

impl Region {
    pub fn is_boundary(self) -> bool {
        matches!(self, Region::BoundaryLayer(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub index: usize,
    pub col: usize,
    pub row: usize,
    pub region: Region,
    /// Polar angle about the lattice centre, in `(-π, π]`.
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BondKind {
    BulkBulk,
    BulkBoundary,
    BoundaryBoundary,
}

/// Unordered nearest-neighbour pair with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub kind: BondKind,
}

/// Closed counterclockwise ring of sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    pub sites: Vec<usize>,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Same ring traversed clockwise, starting from the same site.
    pub fn reversed(&self) -> Contour {
        let mut sites = self.sites.clone();
        sites[1..].reverse();
        Contour { sites }
    }
}

#[derive(Debug, Clone)]
pub struct Lattice {
    spec: LatticeSpec,
    sites: Vec<Site>,
}

impl Lattice {
    pub fn new(spec: LatticeSpec) -> Result<Self> {
        spec.validate()?;
        let sites = build_sites(&spec);
        Ok(Self { spec, sites })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site(&self, index: usize) -> &Site {
        &self.sites[index]
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn width(&self) -> usize {
        self.spec.total_width()
    }

    pub fn height(&self) -> usize {
        self.spec.total_height()
    }

    pub fn is_free(&self) -> bool {
        self.spec.boundary_layers == 0
    }

    pub fn index_of(&self, col: usize, row: usize) -> usize {
        row * self.width() + col
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.width() as f64 - 1.0) / 2.0, (self.height() as f64 - 1.0) / 2.0)
    }

    pub fn boundary_sites(&self) -> impl Iterator<Item = &Site> + '_ {
        self.sites.iter().filter(|s| s.region.is_boundary())
    }

    pub fn interior_sites(&self) -> impl Iterator<Item = &Site> + '_ {
        self.sites.iter().filter(|s| !s.region.is_boundary())
    }

    /// `(-1)^(col + row)`, the chessboard sign of a site.
    pub fn parity_sign(&self, index: usize) -> i8 {
        let s = &self.sites[index];
        if (s.col + s.row) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Interior ring number: 1 for interior sites adjacent to `∂Λ` (or to
    /// the outer edge of a free lattice), growing inwards. `None` on `∂Λ`.
    pub fn interior_ring(&self, index: usize) -> Option<usize> {
        let s = &self.sites[index];
        if s.region.is_boundary() {
            return None;
        }
        Some(edge_distance(s.col, s.row, self.width(), self.height()) - self.spec.boundary_layers + 1)
    }

    pub fn max_interior_ring(&self) -> usize {
        (self.spec.inner_width.min(self.spec.inner_height) + 1) / 2
    }

    pub fn neighbors(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        let s = self.sites[index];
        let (w, h) = (self.width(), self.height());
        let mut out = [None; 4];
        if s.col + 1 < w {
            out[0] = Some(index + 1);
        }
        if s.row + 1 < h {
            out[1] = Some(index + w);
        }
        if s.col > 0 {
            out[2] = Some(index - 1);
        }
        if s.row > 0 {
            out[3] = Some(index - w);
        }
        out.into_iter().flatten()
    }

    /// Every nearest-neighbour pair once, classified by the regions of its ends.
    pub fn bonds(&self) -> Vec<Bond> {
        let (w, h) = (self.width(), self.height());
        let mut out = Vec::with_capacity(2 * w * h);
        for s in &self.sites {
            let mut push = |other: usize| {
                let kind = match (s.region.is_boundary(), self.sites[other].region.is_boundary()) {
                    (false, false) => BondKind::BulkBulk,
                    (true, true) => BondKind::BoundaryBoundary,
                    _ => BondKind::BulkBoundary,
                };
                out.push(Bond { a: s.index, b: other, kind });
            };
            if s.col + 1 < w {
                push(s.index + 1);
            }
            if s.row + 1 < h {
                push(s.index + w);
            }
        }
        out
    }

    /// Rectangular ring of interior sites at distance `m` from the boundary,
    /// counterclockwise from its lower-left corner.
    pub fn contour_at(&self, m: usize) -> Result<Contour> {
        let bad = |reason: String| Error::BadContour { m, reason };
        if m == 0 {
            return Err(bad("distance must be at least 1".into()));
        }
        let inner_w = self.spec.inner_width as isize - 2 * (m as isize - 1);
        let inner_h = self.spec.inner_height as isize - 2 * (m as isize - 1);
        if inner_w < 2 || inner_h < 2 {
            return Err(bad(format!("ring would be {inner_w}x{inner_h}; both sides must be at least 2")));
        }
        let c0 = self.spec.boundary_layers + m - 1;
        let r0 = c0;
        let c1 = c0 + inner_w as usize - 1;
        let r1 = r0 + inner_h as usize - 1;

        let mut sites = Vec::with_capacity(2 * (inner_w + inner_h) as usize - 4);
        for c in c0..c1 {
            sites.push(self.index_of(c, r0));
        }
        for r in r0..r1 {
            sites.push(self.index_of(c1, r));
        }
        for c in (c0 + 1..=c1).rev() {
            sites.push(self.index_of(c, r1));
        }
        for r in (r0 + 1..=r1).rev() {
            sites.push(self.index_of(c0, r));
        }
        Ok(Contour { sites })
    }
}

fn edge_distance(col: usize, row: usize, w: usize, h: usize) -> usize {
    col.min(row).min(w - 1 - col).min(h - 1 - row)
}

fn build_sites(spec: &LatticeSpec) -> Vec<Site> {
    let (w, h) = (spec.total_width(), spec.total_height());
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let mut sites = Vec::with_capacity(w * h);
    for row in 0..h {
        for col in 0..w {
            let dist = edge_distance(col, row, w, h);
            let region = if dist < spec.boundary_layers { Region::BoundaryLayer(dist + 1) } else { Region::Interior };
            let mut omega = (row as f64 - cy).atan2(col as f64 - cx);
            if omega <= -PI {
                omega += 2.0 * PI;
            }
            sites.push(Site { index: row * w + col, col, row, region, omega });
        }
    }
    sites
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn count_kinds(bonds: &[Bond]) -> (usize, usize, usize) {
        let c = |k| bonds.iter().filter(|b| b.kind == k).count();
        (c(BondKind::BulkBulk), c(BondKind::BulkBoundary), c(BondKind::BoundaryBoundary))
    }

    #[test]
    fn smallest_lattice() {
        let l = Lattice::new(LatticeSpec::new(1, 1, 1)).unwrap();
        assert_eq!(l.len(), 9);
        assert_eq!(l.interior_sites().count(), 1);
        assert!(l.boundary_sites().all(|s| s.region == Region::BoundaryLayer(1)));
        let bonds = l.bonds();
        assert_eq!(bonds.len(), 12);
        assert_eq!(count_kinds(&bonds), (0, 4, 8));
    }

    #[test]
    fn figure_lattice_size() {
        let l = Lattice::new(LatticeSpec::new(19, 29, 2)).unwrap();
        assert_eq!((l.width(), l.height(), l.len()), (23, 33, 759));
        assert_eq!(l.boundary_sites().count(), 759 - 19 * 29);
        assert_eq!(LatticeSpec::from_total(23, 33, 2).unwrap(), LatticeSpec::new(19, 29, 2));
        assert!(LatticeSpec::from_total(4, 9, 2).is_err());
    }

    #[test]
    fn polar_angle_convention() {
        let l = Lattice::new(LatticeSpec::new(3, 3, 1)).unwrap();
        let east = l.site(l.index_of(4, 2));
        let north = l.site(l.index_of(2, 4));
        let west = l.site(l.index_of(0, 2));
        assert_eq!(east.omega, 0.0);
        assert!((north.omega - FRAC_PI_2).abs() < 1e-15);
        assert!((west.omega - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn bond_kinds_against_brute_force() {
        // exhaustive pair enumeration
        for spec in [LatticeSpec::new(2, 2, 1), LatticeSpec::new(3, 2, 2), LatticeSpec::free(4, 3)] {
            let l = Lattice::new(spec).unwrap();
            let mut expected = Vec::new();
            for a in l.sites() {
                for b in l.sites() {
                    let manhattan = a.col.abs_diff(b.col) + a.row.abs_diff(b.row);
                    if a.index < b.index && manhattan == 1 {
                        let kind = match (a.region.is_boundary(), b.region.is_boundary()) {
                            (false, false) => BondKind::BulkBulk,
                            (true, true) => BondKind::BoundaryBoundary,
                            _ => BondKind::BulkBoundary,
                        };
                        expected.push((a.index, b.index, kind));
                    }
                }
            }
            let mut got: Vec<_> = l.bonds().iter().map(|b| (b.a, b.b, b.kind)).collect();
            got.sort_by_key(|t| (t.0, t.1));
            assert_eq!(got, expected);
        }
        let l = Lattice::new(LatticeSpec::new(2, 2, 1)).unwrap();
        assert_eq!(count_kinds(&l.bonds()), (4, 8, 12));
    }

    #[test]
    fn free_pair_has_one_bond() {
        let l = Lattice::new(LatticeSpec::free(2, 1)).unwrap();
        let bonds = l.bonds();
        assert_eq!(bonds, vec![Bond { a: 0, b: 1, kind: BondKind::BulkBulk }]);
    }

    #[test]
    fn contour_lengths_and_closure() {
        let l = Lattice::new(LatticeSpec::new(19, 29, 2)).unwrap();
        for (m, len) in [(1, 92), (2, 84)] {
            let c = l.contour_at(m).unwrap();
            assert_eq!(c.len(), len);
            let mut seen = c.sites.clone();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), len);
            for k in 0..len {
                let (a, b) = (l.site(c.sites[k]), l.site(c.sites[(k + 1) % len]));
                assert_eq!(a.col.abs_diff(b.col) + a.row.abs_diff(b.row), 1);
                assert_eq!(l.interior_ring(a.index), Some(m));
            }
        }
    }

    #[test]
    fn contour_is_counterclockwise_from_lower_left() {
        let l = Lattice::new(LatticeSpec::new(3, 3, 1)).unwrap();
        let c = l.contour_at(1).unwrap();
        let coords: Vec<_> = c.sites.iter().map(|&i| (l.site(i).col, l.site(i).row)).collect();
        assert_eq!(coords, vec![(1, 1), (2, 1), (3, 1), (3, 2), (3, 3), (2, 3), (1, 3), (1, 2)]);
        // signed area positive
        let area: i64 = (0..coords.len())
            .map(|k| {
                let (x0, y0) = coords[k];
                let (x1, y1) = coords[(k + 1) % coords.len()];
                x0 as i64 * y1 as i64 - x1 as i64 * y0 as i64
            })
            .sum();
        assert!(area > 0);
    }

    #[test]
    fn degenerate_contours_are_rejected() {
        let l = Lattice::new(LatticeSpec::new(3, 5, 1)).unwrap();
        assert!(l.contour_at(0).is_err());
        assert!(l.contour_at(2).is_err());
        assert!(l.contour_at(1).is_ok());
    }

    #[test]
    fn boundary_adjacent_interior_sites_lie_on_first_ring() {
        let l = Lattice::new(LatticeSpec::new(5, 7, 2)).unwrap();
        let ring: Vec<_> = l.contour_at(1).unwrap().sites;
        for s in l.interior_sites() {
            if l.neighbors(s.index).any(|n| l.site(n).region.is_boundary()) {
                assert!(ring.contains(&s.index));
            }
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(Lattice::new(LatticeSpec::new(0, 3, 1)).is_err());
        assert!(Lattice::new(LatticeSpec::new(3, 0, 0)).is_err());
    }

    proptest::proptest! {
        #[test]
        fn region_counts_and_reflection(w in 1usize..9, h in 1usize..9, b in 0usize..4) {
            let l = Lattice::new(LatticeSpec::new(w, h, b)).unwrap();
            proptest::prop_assert_eq!(l.interior_sites().count(), w * h);
            proptest::prop_assert_eq!(l.boundary_sites().count(), l.len() - w * h);
            for s in l.sites() {
                proptest::prop_assert!(s.omega > -std::f64::consts::PI && s.omega <= std::f64::consts::PI);
                if let Region::BoundaryLayer(layer) = s.region {
                    proptest::prop_assert!(layer >= 1 && layer <= b);
                }
                let mirror = l.site(l.index_of(l.width() - 1 - s.col, l.height() - 1 - s.row));
                if mirror.index != s.index {
                    let d = (s.omega - mirror.omega).rem_euclid(2.0 * std::f64::consts::PI);
                    proptest::prop_assert!((d - std::f64::consts::PI).abs() < 1e-12);
                }
            }
        }
    }
}

//! Topological degree of a field of 2x2 matrices along a closed contour.
//!
//! Each sample is normalized by `√|det M|` and the contour integral
//! `∮ M⁻¹ dM` is replaced by the finite-difference sum
//! `S_L = Σ N_i⁻¹ (N_{i+1} - N_i)`; the right-handed variant uses
//! `S_R = Σ (N_{i+1} - N_i) N_i⁻¹`, entering with a minus sign.
//!
//! For `N(φ) = [[cos φ, sin φ], [sin φ, -cos φ]]` one step contributes
//! `sin Δφ` to `(A₁₂ - A₂₁)/2`. The director angle is `φ/2`, so a field of
//! degree `d` advances `φ` by `4πd` around the contour and the degree is
//! `(A₁₂ - A₂₁) / 8π`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Contour;
use crate::scalar::Real;
use crate::small::Mat2;
use crate::vorticity::VorticityField;

/// Guard on `|det M|` of the raw samples.
pub const DEFAULT_DET_EPSILON: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum DegreeForm {
    /// `∮ M⁻¹ dM`.
    Left,
    /// `-∮ dM M⁻¹`.
    Right,
    /// Mean of the two.
    #[default]
    Symmetrized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeOptions {
    pub form: DegreeForm,
    pub det_epsilon: f64,
    /// Drop samples failing the determinant guard instead of failing.
    pub skip_degenerate: bool,
}

impl Default for DegreeOptions {
    fn default() -> Self {
        Self { form: DegreeForm::default(), det_epsilon: DEFAULT_DET_EPSILON, skip_degenerate: false }
    }
}

/// Matrices sampled in order along a closed contour; the last sample is
/// followed by the first.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFieldOnContour<T> {
    pub matrices: Vec<Mat2<T>>,
    /// Lattice site of each sample, when the field comes from a lattice.
    pub sites: Option<Vec<usize>>,
}

impl<T: Real> MatrixFieldOnContour<T> {
    pub fn new(matrices: Vec<Mat2<T>>) -> Self {
        Self { matrices, sites: None }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// Same samples traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut matrices = self.matrices.clone();
        matrices[1..].reverse();
        let sites = self.sites.clone().map(|mut s| {
            s[1..].reverse();
            s
        });
        Self { matrices, sites }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeEstimate<T> {
    pub value: T,
    /// Antisymmetrized accumulator `A` for the chosen form.
    pub raw_accumulator: Mat2<T>,
    /// Per-step `(A₁₂ - A₂₁)/2`; sums to `4π · value`.
    pub increments: Vec<T>,
    pub contour_len: usize,
    pub degenerate_steps: usize,
}

/// `M / √|det M|`.
pub fn normalize<T: Real>(m: &Mat2<T>, det_epsilon: f64) -> Result<Mat2<T>> {
    let det = m.det();
    if !(det.abs().as_f64() > det_epsilon) {
        return Err(Error::DegeneratePoint { position: 0, site: None, det: det.as_f64() });
    }
    Ok(m.scale(T::one() / det.abs().sqrt()))
}

pub fn degree_estimate<T: Real>(field: &MatrixFieldOnContour<T>, form: DegreeForm) -> Result<DegreeEstimate<T>> {
    degree_estimate_with(field, DegreeOptions { form, ..DegreeOptions::default() })
}

pub fn degree_estimate_with<T: Real>(
    field: &MatrixFieldOnContour<T>,
    options: DegreeOptions,
) -> Result<DegreeEstimate<T>> {
    let mut normalized = Vec::with_capacity(field.len());
    let mut degenerate_steps = 0;
    for (position, m) in field.matrices.iter().enumerate() {
        match normalize(m, options.det_epsilon) {
            Ok(n) => normalized.push(n),
            Err(Error::DegeneratePoint { det, .. }) if !options.skip_degenerate => {
                let site = field.sites.as_ref().map(|s| s[position]);
                return Err(Error::DegeneratePoint { position, site, det });
            }
            Err(_) => degenerate_steps += 1,
        }
    }
    if normalized.len() < 3 {
        return Err(Error::ContourTooShort { got: normalized.len(), min: 3 });
    }

    let half = T::lit(0.5);
    let len = normalized.len();
    let mut acc = Mat2::zero();
    let mut increments = Vec::with_capacity(len);
    for i in 0..len {
        let cur = normalized[i];
        let next = normalized[(i + 1) % len];
        let inv = cur.inverse().expect("normalized matrices have |det| = 1");
        let diff = next - cur;
        let step = match options.form {
            DegreeForm::Left => inv * diff,
            DegreeForm::Right => -(diff * inv),
            DegreeForm::Symmetrized => (inv * diff - diff * inv).scale(half),
        };
        increments.push((step.m[0][1] - step.m[1][0]) * half);
        acc = acc + step;
    }
    let value = (acc.m[0][1] - acc.m[1][0]) / T::lit(8.0 * PI);
    Ok(DegreeEstimate { value, raw_accumulator: acc, increments, contour_len: len, degenerate_steps })
}

/// Reduced vorticity matrices along a lattice contour.
pub fn contour_field<T: Real>(field: &VorticityField<T>, contour: &Contour) -> MatrixFieldOnContour<T> {
    MatrixFieldOnContour {
        matrices: contour.sites.iter().map(|&i| field.sites[i].reduced).collect(),
        sites: Some(contour.sites.clone()),
    }
}

/// Exact director field of degree `d`: `M(x) = [[cos 2Θ, sin 2Θ], [sin 2Θ, -cos 2Θ]]`
/// with `Θ = d·ω(x) + φ`.
pub fn analytic_field<T: Real>(points: &[(T, T)], degree: i32, phase: T) -> Result<MatrixFieldOnContour<T>> {
    let d = T::lit(degree as f64);
    let matrices = points
        .iter()
        .enumerate()
        .map(|(position, &(x, y))| {
            if x == T::zero() && y == T::zero() {
                return Err(Error::PointAtOrigin { position });
            }
            let theta = d * y.atan2(x) + phase;
            let (s, c) = (theta + theta).sin_cos();
            Ok(Mat2::symmetric(c, s, -c))
        })
        .collect::<Result<_>>()?;
    Ok(MatrixFieldOnContour::new(matrices))
}

/// `count` equally spaced points on a circle, counterclockwise from angle 0.
pub fn circle_points<T: Real>(count: usize, radius: T) -> Vec<(T, T)> {
    (0..count)
        .map(|i| {
            let t = T::lit(2.0 * PI * i as f64 / count as f64);
            (radius * t.cos(), radius * t.sin())
        })
        .collect()
}

/// `(count, |estimate - d|)` for the analytic field on circles of increasing resolution.
pub fn convergence_study<T: Real>(degree: i32, counts: &[usize], form: DegreeForm) -> Result<Vec<(usize, T)>> {
    counts
        .iter()
        .map(|&n| {
            let field = analytic_field(&circle_points(n, T::one()), degree, T::zero())?;
            let est = degree_estimate(&field, form)?;
            Ok((n, (est.value - T::lit(degree as f64)).abs()))
        })
        .collect()
}

//! SVG figures: cross fields and integrated-density-of-states step plots.
//!
//! Output is plain SVG 1.1 with fixed-precision coordinates, so identical
//! inputs give byte-identical documents.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Region};
use crate::scalar::Real;
use crate::vorticity::{FieldRecord, VorticityField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum LengthMode {
    /// Half-length grows with `log10(r / log_floor)`.
    #[default]
    LogScale,
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    pub length_mode: LengthMode,
    /// Magnitudes below this are drawn as dots.
    pub log_floor: f64,
    /// Decades above `log_floor` at which crosses reach full size.
    pub max_decades: f64,
    pub width: f64,
    pub height: f64,
    pub stroke_width: f64,
    pub dot_radius: f64,
    pub interior_color: String,
    pub boundary_color: String,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            length_mode: LengthMode::LogScale,
            log_floor: 1e-14,
            max_decades: 14.0,
            width: 600.0,
            height: 800.0,
            stroke_width: 1.2,
            dot_radius: 1.0,
            interior_color: "#1f3a93".into(),
            boundary_color: "#b03a2e".into(),
        }
    }
}

impl RenderOptions {
    pub fn with_mode(mode: LengthMode) -> Self {
        Self { length_mode: mode, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !(positive(self.log_floor) && positive(self.max_decades) && positive(self.width) && positive(self.height)) {
            return Err(Error::InvalidParams("render options need positive log_floor, max_decades and canvas".into()));
        }
        if !(self.stroke_width >= 0.0 && self.dot_radius >= 0.0) {
            return Err(Error::InvalidParams("stroke width and dot radius must be non-negative".into()));
        }
        Ok(())
    }
}

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#);
}

/// Cross plot of a field; crosses are centred on the lattice sites.
pub fn render_crosses<T: Real>(
    field: &VorticityField<T>,
    lattice: &Lattice,
    options: &RenderOptions,
) -> Result<String> {
    if field.len() != lattice.len() {
        return Err(Error::InvalidLattice(format!("field has {} sites, lattice {}", field.len(), lattice.len())));
    }
    render_records(&field.records(lattice), lattice.width(), lattice.height(), options)
}

/// Cross plot from exported records on a `width x height` grid.
pub fn render_records(records: &[FieldRecord], width: usize, height: usize, options: &RenderOptions) -> Result<String> {
    options.validate()?;
    let cell = if width == 0 || height == 0 {
        0.0
    } else {
        (options.width / width as f64).min(options.height / height as f64)
    };
    let x0 = 0.5 * (options.width - cell * width as f64);
    let y0 = 0.5 * (options.height - cell * height as f64);
    let max_half = 0.45 * cell;

    let mut out = String::new();
    header(&mut out, options.width, options.height);
    let _ = writeln!(out, r#"<g stroke-width="{:.3}" stroke-linecap="round" fill="none">"#, options.stroke_width);
    for rec in records {
        let [col, row] = rec.coords;
        if col >= width || row >= height {
            return Err(Error::InvalidLattice(format!(
                "record {} at ({col}, {row}) lies outside {width}x{height}",
                rec.index
            )));
        }
        let cx = x0 + (col as f64 + 0.5) * cell;
        // SVG y grows downwards; row 0 is the bottom of the lattice.
        let cy = y0 + (height - 1 - row) as f64 * cell + 0.5 * cell;
        let color = match rec.region {
            Region::Interior => &options.interior_color,
            Region::BoundaryLayer(_) => &options.boundary_color,
        };
        let r = rec.magnitude;
        if !(r >= options.log_floor) {
            let rad = options.dot_radius.min(max_half);
            let _ = writeln!(out, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{rad:.3}" fill="{color}" stroke="none"/>"#);
            continue;
        }
        let half = match options.length_mode {
            LengthMode::Equal => max_half,
            LengthMode::LogScale => {
                let decades = (r.log10() - options.log_floor.log10()).clamp(0.0, options.max_decades);
                max_half * decades / options.max_decades
            }
        };
        let (s, c) = rec.angle.sin_cos();
        let (dx, dy) = (half * c, -half * s);
        let _ = writeln!(
            out,
            r#"<path d="M{:.3} {:.3}L{:.3} {:.3}M{:.3} {:.3}L{:.3} {:.3}" stroke="{color}"/>"#,
            cx - dx,
            cy - dy,
            cx + dx,
            cy + dy,
            cx + dy,
            cy - dx,
            cx - dy,
            cy + dx,
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// Step plot of `(λ, count)` pairs with labelled axes.
pub fn render_idos(curve: &[(f64, usize)]) -> Result<String> {
    let (first, last) = match (curve.first(), curve.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(Error::EmptyCurve),
    };
    for (i, w) in curve.windows(2).enumerate() {
        if !(w[1].0 > w[0].0) || w[1].1 < w[0].1 {
            return Err(Error::NonMonotone(i + 1));
        }
    }
    if !curve.iter().all(|p| p.0.is_finite()) {
        return Err(Error::InvalidParams("non-finite abscissa in curve".into()));
    }

    let (width, height) = (640.0, 420.0);
    let (left, right, top, bottom) = (60.0, 20.0, 20.0, 40.0);
    let (plot_w, plot_h) = (width - left - right, height - top - bottom);
    let span = if last.0 > first.0 { last.0 - first.0 } else { 1.0 };
    let max_count = last.1.max(1) as f64;
    let x = |l: f64| left + (l - first.0) / span * plot_w;
    let y = |c: usize| top + plot_h - c as f64 / max_count * plot_h;

    let mut out = String::new();
    header(&mut out, width, height);
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="1"><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/></g>"#,
        left,
        top + plot_h,
        left + plot_w,
        top + plot_h,
        left,
        top,
        left,
        top + plot_h
    );
    let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="12" fill="black">"#);
    let _ =
        writeln!(out, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{:.3}</text>"#, left, height - 20.0, first.0);
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{:.3}</text>"#,
        left + plot_w,
        height - 20.0,
        last.0
    );
    let _ =
        writeln!(out, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">λ</text>"#, left + 0.5 * plot_w, height - 6.0);
    let _ = writeln!(out, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">0</text>"#, left - 6.0, top + plot_h);
    let _ = writeln!(out, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#, left - 6.0, top + 12.0, last.1);
    out.push_str("</g>\n");

    let mut d = format!("M{:.3} {:.3}", x(first.0), y(first.1));
    for w in curve.windows(2) {
        let _ = write!(d, "H{:.3}V{:.3}", x(w[1].0), y(w[1].1));
    }
    let _ = writeln!(out, r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.5"/>"#, "#1f3a93");
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{idos_curve, uniform_grid};

    fn record(col: usize, row: usize, angle: f64, magnitude: f64) -> FieldRecord {
        FieldRecord {
            index: 0,
            coords: [col, row],
            region: Region::Interior,
            omega11: 0.0,
            omega12: 0.0,
            omega22: 0.0,
            angle,
            magnitude,
        }
    }

    fn numbers(svg: &str) -> Vec<f64> {
        svg.split(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-'))
            .filter_map(|t| t.parse::<f64>().ok())
            .collect()
    }

    #[test]
    fn empty_field_has_no_glyphs() {
        let svg = render_records(&[], 3, 3, &RenderOptions::default()).unwrap();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<path") && !svg.contains("<circle"));
    }

    #[test]
    fn equal_mode_single_cross_is_axis_aligned() {
        let opts = RenderOptions { width: 100.0, height: 100.0, ..RenderOptions::with_mode(LengthMode::Equal) };
        let svg = render_records(&[record(0, 0, 0.0, 1.0)], 1, 1, &opts).unwrap();
        assert!(svg.contains(r#"d="M5.000 50.000L95.000 50.000M50.000 5.000L50.000 95.000""#), "{svg}");
    }

    #[test]
    fn glyph_count_matches_sites_and_stays_on_canvas() {
        let recs: Vec<_> = (0..12)
            .map(|i| record(i % 3, i / 3, 0.3 * i as f64, if i % 4 == 0 { 1e-20 } else { 10f64.powi(-(i as i32)) }))
            .collect();
        for mode in [LengthMode::LogScale, LengthMode::Equal] {
            let opts = RenderOptions::with_mode(mode);
            let svg = render_records(&recs, 3, 4, &opts).unwrap();
            let glyphs = svg.matches("<path").count() + svg.matches("<circle").count();
            assert_eq!(glyphs, 12);
            assert_eq!(svg.matches("<circle").count(), 3);
            let body = &svg[svg.find("<g").unwrap()..];
            assert!(numbers(body).iter().all(|&v| (0.0..=opts.height.max(opts.width)).contains(&v)));
        }
    }

    #[test]
    fn log_lengths_follow_decades() {
        let opts = RenderOptions { width: 100.0, height: 100.0, ..RenderOptions::default() };
        let svg = render_records(&[record(0, 0, 0.0, 1e-7)], 1, 1, &opts).unwrap();
        // 7 of 14 decades: half of the 45-unit maximum.
        assert!(svg.contains("M27.500 50.000L72.500 50.000"), "{svg}");
    }

    #[test]
    fn rows_are_flipped() {
        let opts = RenderOptions { width: 10.0, height: 20.0, ..RenderOptions::with_mode(LengthMode::Equal) };
        let svg = render_records(&[record(0, 0, 0.0, 1.0)], 1, 2, &opts).unwrap();
        assert!(svg.contains("M0.500 15.000"), "{svg}");
    }

    #[test]
    fn output_is_deterministic() {
        let recs = vec![record(1, 2, 0.4, 1e-3), record(0, 0, -1.2, 1e-9)];
        let a = render_records(&recs, 2, 3, &RenderOptions::default()).unwrap();
        let b = render_records(&recs, 2, 3, &RenderOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn idos_rejects_bad_curves() {
        assert!(matches!(render_idos(&[]), Err(Error::EmptyCurve)));
        assert!(matches!(render_idos(&[(0.0, 2), (1.0, 1)]), Err(Error::NonMonotone(1))));
        assert!(matches!(render_idos(&[(0.0, 0), (0.0, 1)]), Err(Error::NonMonotone(1))));
    }

    #[test]
    fn idos_two_points_one_step() {
        let svg = render_idos(&[(-1.0, 0), (1.0, 4)]).unwrap();
        let path = svg.lines().find(|l| l.starts_with("<path")).unwrap();
        assert_eq!(path.matches('H').count(), 1);
        assert_eq!(path.matches('V').count(), 1);
    }

    #[test]
    fn idos_single_bond_plateau() {
        let eig = [-0.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5];
        let curve = idos_curve(&eig, &uniform_grid(-1.0, 1.0, 40));
        assert!(curve.iter().filter(|p| p.0 > -0.45 && p.0 < -0.05).all(|p| p.1 == 2));
        assert!(curve.iter().filter(|p| p.0 > 0.05 && p.0 < 0.45).all(|p| p.1 == 6));
        assert!(render_idos(&curve).is_ok());
    }
}

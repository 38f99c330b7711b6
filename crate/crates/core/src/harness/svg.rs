//! Objective-space scatter plots as standalone SVG.
//!
//! Coordinates are printed with six decimals, so identical inputs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{MooError, Result};

/// Ray from the origin along `direction` (drawn to the plot edge).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotRay {
    pub direction: [f64; 2],
}

impl PlotRay {
    /// The ray of points where `w_1 f_1 = w_2 f_2`, i.e. the direction of the
    /// elementwise inverse of `w`. A zero weight maps to that objective's axis.
    pub fn inverse_preference(w: [f64; 2]) -> Self {
        let direction = match (w[0] > 0.0, w[1] > 0.0) {
            (true, true) => [1.0 / w[0], 1.0 / w[1]],
            (false, true) => [1.0, 0.0],
            (true, false) => [0.0, 1.0],
            (false, false) => [1.0, 1.0],
        };
        PlotRay { direction }
    }
}

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

pub fn render_svg(points: &[[f64; 2]], pf_curve: &[[f64; 2]], rays: &[PlotRay]) -> Result<String> {
    let all = points.iter().chain(pf_curve);
    if all.clone().flatten().any(|v| !v.is_finite()) || rays.iter().flat_map(|r| r.direction).any(|v| !v.is_finite()) {
        return Err(MooError::NonFinite("svg coordinates".into()));
    }
    let extent = all.flatten().fold(1.0f64, |acc, v| acc.max(*v)) * 1.05;
    let span = SIZE - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + span * x / extent;
    let py = |y: f64| SIZE - MARGIN - span * y / extent;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE:.0}\" height=\"{SIZE:.0}\" viewBox=\"0 0 {SIZE:.0} {SIZE:.0}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"black\"/>",
        px(0.0), py(0.0), px(extent), py(0.0)
    );
    let _ = writeln!(
        s,
        "<line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"black\"/>",
        px(0.0), py(0.0), px(0.0), py(extent)
    );
    let _ = writeln!(s, "<text x=\"{:.6}\" y=\"{:.6}\" font-size=\"12\">f_1</text>", SIZE - MARGIN, SIZE - MARGIN / 3.0);
    let _ = writeln!(s, "<text x=\"{:.6}\" y=\"{:.6}\" font-size=\"12\">f_2</text>", MARGIN / 4.0, MARGIN);

    if !pf_curve.is_empty() {
        let pts: Vec<String> = pf_curve.iter().map(|p| format!("{:.6},{:.6}", px(p[0]), py(p[1]))).collect();
        let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"gray\" stroke-width=\"2\" points=\"{}\"/>", pts.join(" "));
    }
    for ray in rays {
        let [dx, dy] = ray.direction;
        // scale so the longer coordinate reaches the plot edge
        let scale = extent / dx.max(dy).max(f64::MIN_POSITIVE);
        let _ = writeln!(
            s,
            "<path d=\"M {:.6} {:.6} L {:.6} {:.6}\" stroke=\"steelblue\" stroke-dasharray=\"4 3\"/>",
            px(0.0), py(0.0), px(dx * scale), py(dy * scale)
        );
    }
    for p in points {
        let _ = writeln!(s, "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"4\" fill=\"crimson\"/>", px(p[0]), py(p[1]));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(points: &[[f64; 2]], pf_curve: &[[f64; 2]], rays: &[PlotRay], path: &Path) -> Result<()> {
    let svg = render_svg(points, pf_curve, rays)?;
    std::fs::write(path, svg).map_err(|e| MooError::invalid(format!("writing {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_plot_has_axes_only() {
        let s = render_svg(&[], &[], &[]).unwrap();
        assert!(s.starts_with("<svg"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<line").count(), 2);
        assert_eq!(s.matches("<circle").count(), 0);
    }

    #[test]
    fn element_counts() {
        let pts: Vec<[f64; 2]> = (0..10).map(|k| [k as f64 / 10.0, 1.0 - k as f64 / 10.0]).collect();
        let rays: Vec<PlotRay> = (0..10).map(|k| PlotRay::inverse_preference([k as f64 / 9.0, 1.0 - k as f64 / 9.0])).collect();
        let s = render_svg(&pts, &pts, &rays).unwrap();
        assert_eq!(s.matches("<circle").count(), 10);
        assert_eq!(s.matches("<path").count(), 10);
        assert_eq!(s.matches("<polyline").count(), 1);
    }

    #[test]
    fn deterministic_and_rejects_nan() {
        let pts = [[0.1, 0.2]];
        let rays = [PlotRay::inverse_preference([0.5, 0.5])];
        assert_eq!(render_svg(&pts, &[], &rays).unwrap(), render_svg(&pts, &[], &rays).unwrap());
        assert!(render_svg(&[[f64::NAN, 0.0]], &[], &[]).is_err());
    }

    #[test]
    fn inverse_rays() {
        assert_eq!(PlotRay::inverse_preference([0.25, 0.5]).direction, [4.0, 2.0]);
        assert_eq!(PlotRay::inverse_preference([1.0, 0.0]).direction, [0.0, 1.0]);
    }
}

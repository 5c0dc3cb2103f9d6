//! Deterministic SVG output for regions, tilings, orbits and the spiral.

use std::collections::HashSet;
use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{GeometryError, Point, Region};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("scene has no layers")]
    Empty,
    #[error("unbounded region `{0}` needs a clip rectangle")]
    Unclipped(String),
    #[error("duplicate layer label `{0}`")]
    DuplicateLabel(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
pub enum Shape {
    Region { region: Region },
    Point { point: Point },
    Polyline { points: Vec<Point> },
}

#[derive(Debug, Clone, Serialize)]
pub struct Layer {
    pub label: String,
    pub shape: Shape,
    pub class: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Scene {
    pub layers: Vec<Layer>,
    /// Exact viewport `(lower-left, upper-right)`; also clips unbounded
    /// regions.
    pub clip: Option<(Point, Point)>,
}

impl Scene {
    pub fn new() -> Scene {
        Scene::default()
    }

    pub fn with_clip(lo: Point, hi: Point) -> Scene {
        Scene { layers: Vec::new(), clip: Some((lo, hi)) }
    }

    pub fn region(&mut self, label: impl Into<String>, region: Region, class: &str) -> &mut Scene {
        self.layers.push(Layer { label: label.into(), shape: Shape::Region { region }, class: class.into() });
        self
    }

    pub fn point(&mut self, label: impl Into<String>, point: Point, class: &str) -> &mut Scene {
        self.layers.push(Layer { label: label.into(), shape: Shape::Point { point }, class: class.into() });
        self
    }

    pub fn polyline(&mut self, label: impl Into<String>, points: Vec<Point>, class: &str) -> &mut Scene {
        self.layers.push(Layer { label: label.into(), shape: Shape::Polyline { points }, class: class.into() });
        self
    }
}

const STYLE: &str = "path{stroke:#222;stroke-width:0.004;fill-opacity:0.6}\
.table{fill:#bbb}.wedge{fill:none;stroke:#555}.red{fill:#d33}.green{fill:#3a3}\
.piece{fill:#69c}.outline{fill:none}.orbit{fill:none;stroke:#039}.spiral{fill:#e90}\
circle{fill:#000}";

fn rect(lo: &Point, hi: &Point) -> Region {
    Region::polygon(vec![lo.clone(), Point::new(hi.x.clone(), lo.y.clone()), hi.clone(), Point::new(lo.x.clone(), hi.y.clone())])
        .expect("nondegenerate clip rectangle")
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.9}");
    if s == "-0.000000000" {
        "0.000000000".into()
    } else {
        s
    }
}

fn coords(p: &Point) -> String {
    let (x, y) = p.to_f64();
    format!("{} {}", fmt(x), fmt(-y))
}

fn ring_path(vs: &[Point], closed: bool) -> String {
    let mut d = String::new();
    for (i, p) in vs.iter().enumerate() {
        let _ = write!(d, "{}{}", if i == 0 { "M" } else { " L" }, coords(p));
    }
    if closed {
        d.push_str(" Z");
    }
    d
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the scene as a standalone SVG document; identical scenes give
/// identical bytes.
pub fn render_svg(scene: &Scene) -> Result<String, RenderError> {
    if scene.layers.is_empty() {
        return Err(RenderError::Empty);
    }
    let mut labels = HashSet::new();
    for l in &scene.layers {
        if !labels.insert(l.label.as_str()) {
            return Err(RenderError::DuplicateLabel(l.label.clone()));
        }
    }
    let clip = scene.clip.as_ref().map(|(lo, hi)| rect(lo, hi));
    let mut items: Vec<(String, String, String)> = Vec::new();
    let mut all_points: Vec<Point> = Vec::new();
    for l in &scene.layers {
        let (label, class) = (escape(&l.label), escape(&l.class));
        match &l.shape {
            Shape::Region { region } => {
                let parts = match (&clip, region.is_bounded()) {
                    (_, true) => vec![region.clone()],
                    (Some(c), false) => region.intersect_convex(c),
                    (None, false) => return Err(RenderError::Unclipped(l.label.clone())),
                };
                for part in parts {
                    all_points.extend(part.vertices().iter().cloned());
                    items.push((label.clone(), class.clone(), format!("<path d=\"{}\"/>", ring_path(part.vertices(), true))));
                }
            }
            Shape::Point { point } => {
                all_points.push(point.clone());
                let (x, y) = point.to_f64();
                items.push((label, class, format!("<circle cx=\"{}\" cy=\"{}\" r=\"0.02\"/>", fmt(x), fmt(-y))));
            }
            Shape::Polyline { points } => {
                all_points.extend(points.iter().cloned());
                items.push((label, class, format!("<path d=\"{}\"/>", ring_path(points, false))));
            }
        }
    }
    let (lo, hi) = match &scene.clip {
        Some((lo, hi)) => (lo.to_f64(), hi.to_f64()),
        None => {
            let xs = all_points.iter().map(|p| p.to_f64());
            xs.fold(((f64::MAX, f64::MAX), (f64::MIN, f64::MIN)), |(lo, hi), (x, y)| {
                ((lo.0.min(x), lo.1.min(y)), (hi.0.max(x), hi.1.max(y)))
            })
        }
    };
    let pad = 0.05 * (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">",
        fmt(lo.0 - pad),
        fmt(-hi.1 - pad),
        fmt(hi.0 - lo.0 + 2.0 * pad),
        fmt(hi.1 - lo.1 + 2.0 * pad)
    );
    let _ = writeln!(out, "<style>{STYLE}</style>");
    let mut current: Option<&str> = None;
    for (label, class, body) in &items {
        if current != Some(label.as_str()) {
            if current.is_some() {
                out.push_str("</g>\n");
            }
            let _ = writeln!(out, "<g id=\"{label}\" class=\"{class}\">");
            current = Some(label);
        }
        let _ = writeln!(out, "{body}");
    }
    if current.is_some() {
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::billiard::Table;

    #[test]
    fn table_renders_one_path() {
        let t = Table::new();
        let mut s = Scene::new();
        s.region("table", t.polygon.clone(), "table");
        let svg = render_svg(&s).unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches(" L").count(), 11);
        assert_eq!(svg, render_svg(&s).unwrap());
    }

    #[test]
    fn empty_and_unclipped_are_errors() {
        assert_eq!(render_svg(&Scene::new()), Err(RenderError::Empty));
        let t = Table::new();
        let mut s = Scene::new();
        s.region("v0", t.sector(0).clone(), "wedge");
        assert!(matches!(render_svg(&s), Err(RenderError::Unclipped(_))));
        let mut s = Scene::with_clip(Point::from_ints(-8, -8), Point::from_ints(8, 8));
        s.region("v0", t.sector(0).clone(), "wedge");
        assert!(render_svg(&s).is_ok());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut s = Scene::new();
        s.point("a", Point::origin(), "p").point("a", Point::from_ints(1, 1), "p");
        assert!(matches!(render_svg(&s), Err(RenderError::DuplicateLabel(_))));
    }
}

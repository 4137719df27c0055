//! Embedded typefaces, glyph shaping and text metrics.
//!
//! A word is shaped once into outline curves in local pixel space (baseline at
//! `y = 0`, y down). Layout measures the ink rectangle of those curves; the
//! renderer transforms and rasterizes the same curves.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use ab_glyph::{Font, FontArc, OutlineCurve, PxScale, ScaleFont};
use thiserror::Error;

use crate::geometry::Rect;

pub const DEFAULT_TYPEFACE: &str = "sans";

const EMBEDDED: [(&str, &[u8]); 4] = [
    ("sans", include_bytes!("../fonts/DejaVuSans.ttf")),
    ("sans-bold", include_bytes!("../fonts/DejaVuSans-Bold.ttf")),
    ("serif", include_bytes!("../fonts/DejaVuSerif.ttf")),
    ("mono", include_bytes!("../fonts/DejaVuSansMono.ttf")),
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FontError {
    #[error("unknown typeface {0:?}")]
    UnknownTypeface(String),
    #[error("failed to load font {name:?}: {reason}")]
    FontLoadError { name: String, reason: String },
    #[error("typeface has no glyph for {ch:?} in word {word:?}")]
    MissingGlyph { word: String, ch: char },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Line([f32; 2], [f32; 2]),
    Quad([f32; 2], [f32; 2], [f32; 2]),
    Cubic([f32; 2], [f32; 2], [f32; 2], [f32; 2]),
}

impl Curve {
    pub fn map(&self, f: impl Fn([f32; 2]) -> [f32; 2]) -> Curve {
        match *self {
            Curve::Line(a, b) => Curve::Line(f(a), f(b)),
            Curve::Quad(a, b, c) => Curve::Quad(f(a), f(b), f(c)),
            Curve::Cubic(a, b, c, d) => Curve::Cubic(f(a), f(b), f(c), f(d)),
        }
    }

    /// Exact extent for lines and quadratics; cubics use their control hull.
    pub fn bounds(&self) -> Rect {
        let mut r = Rect::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut add = |p: [f32; 2]| {
            r.x0 = r.x0.min(p[0] as f64);
            r.y0 = r.y0.min(p[1] as f64);
            r.x1 = r.x1.max(p[0] as f64);
            r.y1 = r.y1.max(p[1] as f64);
        };
        match *self {
            Curve::Line(a, b) => {
                add(a);
                add(b);
            }
            Curve::Quad(a, c, b) => {
                add(a);
                add(b);
                for axis in 0..2 {
                    let denom = a[axis] - 2.0 * c[axis] + b[axis];
                    if denom.abs() > f32::EPSILON {
                        let t = (a[axis] - c[axis]) / denom;
                        if t > 0.0 && t < 1.0 {
                            let u = 1.0 - t;
                            add([
                                u * u * a[0] + 2.0 * u * t * c[0] + t * t * b[0],
                                u * u * a[1] + 2.0 * u * t * c[1] + t * t * b[1],
                            ]);
                        }
                    }
                }
            }
            Curve::Cubic(a, b, c, d) => {
                for p in [a, b, c, d] {
                    add(p);
                }
            }
        }
        r
    }
}

/// A word shaped at a given pixel size.
#[derive(Debug, Clone)]
pub struct ShapedText {
    pub curves: Vec<Curve>,
    /// Ink extent in local coordinates (baseline at y = 0).
    pub ink: Rect,
}

#[derive(Clone)]
pub struct Typeface {
    id: String,
    font: FontArc,
}

impl std::fmt::Debug for Typeface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Typeface").field("id", &self.id).finish()
    }
}

impl Typeface {
    pub fn from_bytes(id: &str, bytes: Vec<u8>) -> Result<Self, FontError> {
        let font = FontArc::try_from_vec(bytes)
            .map_err(|e| FontError::FontLoadError { name: id.to_string(), reason: e.to_string() })?;
        Ok(Self { id: id.to_string(), font })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn shape(&self, text: &str, px: f64) -> Result<ShapedText, FontError> {
        let scaled = self.font.as_scaled(PxScale::from(px as f32));
        let sf = scaled.h_scale_factor();
        let mut curves = Vec::new();
        let mut caret = 0.0f32;
        let mut prev = None;
        let mut ink: Option<Rect> = None;
        for ch in text.chars() {
            let id = self.font.glyph_id(ch);
            if id.0 == 0 && !ch.is_whitespace() {
                return Err(FontError::MissingGlyph { word: text.to_string(), ch });
            }
            if let Some(p) = prev {
                caret += scaled.kern(p, id);
            }
            if let Some(outline) = self.font.outline(id) {
                let origin = caret;
                let tf = |p: ab_glyph::Point| [origin + p.x * sf, -p.y * sf];
                for c in &outline.curves {
                    let curve = match c {
                        OutlineCurve::Line(a, b) => Curve::Line(tf(*a), tf(*b)),
                        OutlineCurve::Quad(a, b, c) => Curve::Quad(tf(*a), tf(*b), tf(*c)),
                        OutlineCurve::Cubic(a, b, c, d) => Curve::Cubic(tf(*a), tf(*b), tf(*c), tf(*d)),
                    };
                    let r = curve.bounds();
                    ink = Some(ink.map_or(r, |i| i.union(&r)));
                    curves.push(curve);
                }
            }
            caret += scaled.h_advance(id);
            prev = Some(id);
        }
        // Text without any outline (only spaces) falls back to the advance box.
        let ink = ink.unwrap_or_else(|| {
            Rect::new(0.0, -(scaled.ascent() as f64), caret.max(1.0) as f64, -(scaled.descent() as f64))
        });
        Ok(ShapedText { curves, ink })
    }
}

/// Typefaces by id: the embedded set plus anything loaded from a directory.
#[derive(Debug, Clone)]
pub struct FontRegistry {
    faces: BTreeMap<String, Arc<Typeface>>,
}

impl Default for FontRegistry {
    fn default() -> Self {
        Self::embedded()
    }
}

impl FontRegistry {
    pub fn embedded() -> Self {
        let faces = EMBEDDED
            .iter()
            .map(|(id, bytes)| {
                let face = Typeface {
                    id: id.to_string(),
                    font: FontArc::try_from_slice(bytes).expect("embedded font is valid"),
                };
                (id.to_string(), Arc::new(face))
            })
            .collect();
        Self { faces }
    }

    /// Adds every `.ttf`/`.otf` in `dir`, keyed by file stem.
    pub fn load_dir(&mut self, dir: &Path) -> Result<usize, FontError> {
        let load_err = |reason: String| FontError::FontLoadError { name: dir.display().to_string(), reason };
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| load_err(e.to_string()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("ttf") || e.eq_ignore_ascii_case("otf"))
            })
            .collect();
        paths.sort();
        for path in &paths {
            let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            let bytes = std::fs::read(path)
                .map_err(|e| FontError::FontLoadError { name: id.clone(), reason: e.to_string() })?;
            self.faces.insert(id.clone(), Arc::new(Typeface::from_bytes(&id, bytes)?));
        }
        Ok(paths.len())
    }

    pub fn get(&self, id: &str) -> Result<Arc<Typeface>, FontError> {
        self.faces.get(id).cloned().ok_or_else(|| FontError::UnknownTypeface(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.faces.keys().map(String::as_str)
    }
}

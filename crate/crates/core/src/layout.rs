//! Static wordle layout on a rectangular canvas.
//!
//! Words are placed greedily, largest font first. Each placement rank owns
//! its own candidate stream (`LAYOUT_RANK_BASE + rank`), so two lists of the
//! same length that rank the same way get the same candidate anchors at every
//! rank. Rank 0 goes to the canvas center. Other ranks draw up to
//! [`RANDOM_CANDIDATES`] uniform anchors and then fall back to an outward
//! rectangular spiral from the center.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fonts::{FontError, FontRegistry, DEFAULT_TYPEFACE};
use crate::geometry::{quantize, Point, Rect};
use crate::ingest::{normalize_weights, WordEntry, WordList};
use crate::rng::{streams, SplitMix64};

pub const RANDOM_CANDIDATES: usize = 200;
pub const DEFAULT_PADDING: f64 = 1.3;
pub const MIN_CANVAS: u32 = 100;
pub const MAX_CANVAS: u32 = 4096;
const REFERENCE_DIAGONAL: f64 = 1000.0;
const SPIRAL_STEP: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("canvas {width}x{height} outside [{MIN_CANVAS}, {MAX_CANVAS}]")]
    InvalidCanvas { width: u32, height: u32 },
    #[error("invalid layout parameter: {0}")]
    InvalidParameter(String),
    #[error("no non-overlapping position for {word:?}; the canvas is too small for this word set")]
    PlacementFailure { word: String },
    #[error(transparent)]
    Font(#[from] FontError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    pub width: u32,
    pub height: u32,
}

impl Dimensions {
    pub fn new(width: u32, height: u32) -> Result<Self, LayoutError> {
        let ok = |v| (MIN_CANVAS..=MAX_CANVAS).contains(&v);
        if !ok(width) || !ok(height) {
            return Err(LayoutError::InvalidCanvas { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn diagonal(&self) -> f64 {
        (self.width as f64).hypot(self.height as f64)
    }

    pub fn rect(&self) -> Rect {
        Rect::new(0.0, 0.0, self.width as f64, self.height as f64)
    }

    pub fn center(&self) -> Point {
        Point::new(self.width as f64 / 2.0, self.height as f64 / 2.0)
    }
}

impl Default for Dimensions {
    fn default() -> Self {
        Self { width: 800, height: 600 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedWord {
    #[serde(flatten)]
    pub entry: WordEntry,
    /// Center of the word's ink box.
    pub anchor: Point,
    pub font_size: u32,
    pub base_rotation: f64,
    /// Rest extent scaled by the padding factor about its center.
    pub bbox: Rect,
    /// Rest extent of the rendered ink, no padding.
    pub text_box: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordleLayout {
    pub canvas: Dimensions,
    pub seed: u64,
    pub padding_factor: f64,
    pub typeface: String,
    pub min_font: u32,
    pub max_font: u32,
    pub words: Vec<PlacedWord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutParams {
    pub canvas: Dimensions,
    pub seed: u64,
    pub padding_factor: f64,
    pub min_font: u32,
    pub max_font: u32,
    pub typeface: String,
}

impl LayoutParams {
    /// Defaults: padding 1.3 and fonts 14..64 px, scaled with the canvas diagonal
    /// relative to 800x600.
    pub fn new(canvas: Dimensions, seed: u64) -> Self {
        let (min_font, max_font) = default_font_range(canvas);
        Self {
            canvas,
            seed,
            padding_factor: DEFAULT_PADDING,
            min_font,
            max_font,
            typeface: DEFAULT_TYPEFACE.to_string(),
        }
    }

    pub fn with_typeface(mut self, typeface: &str) -> Self {
        self.typeface = typeface.to_string();
        self
    }
}

pub fn default_font_range(canvas: Dimensions) -> (u32, u32) {
    let k = canvas.diagonal() / REFERENCE_DIAGONAL;
    let min = (14.0 * k).round().max(4.0) as u32;
    let max = ((64.0 * k).round() as u32).max(min + 1);
    (min, max)
}

/// Linear weight-to-size map, rounded to the nearest pixel.
pub fn font_size_for_weight(weight: f64, min_font: u32, max_font: u32) -> u32 {
    let w = weight.clamp(0.0, 1.0);
    (min_font as f64 + w * (max_font as f64 - min_font as f64)).round() as u32
}

pub fn compute_layout(
    list: &WordList,
    params: &LayoutParams,
    fonts: &FontRegistry,
) -> Result<WordleLayout, LayoutError> {
    if !(params.padding_factor >= 1.0 && params.padding_factor.is_finite()) {
        return Err(LayoutError::InvalidParameter(format!(
            "padding_factor must be >= 1, got {}",
            params.padding_factor
        )));
    }
    if params.min_font == 0 || params.min_font >= params.max_font {
        return Err(LayoutError::InvalidParameter(format!(
            "font range {}..{} is empty",
            params.min_font, params.max_font
        )));
    }
    let canvas = Dimensions::new(params.canvas.width, params.canvas.height)?;
    let face = fonts.get(&params.typeface)?;
    let list = normalize_weights(list);

    struct Measured {
        font_size: u32,
        width: f64,
        height: f64,
        chars: usize,
    }
    let measured: Vec<Measured> = list
        .entries
        .iter()
        .map(|e| {
            let font_size = font_size_for_weight(e.weight, params.min_font, params.max_font);
            let shaped = face.shape(&e.text, font_size as f64)?;
            Ok(Measured {
                font_size,
                width: shaped.ink.width(),
                height: shaped.ink.height(),
                chars: e.text.chars().count(),
            })
        })
        .collect::<Result<_, FontError>>()?;

    let mut order: Vec<usize> = (0..measured.len()).collect();
    order.sort_by(|&a, &b| {
        let (ma, mb) = (&measured[a], &measured[b]);
        mb.font_size.cmp(&ma.font_size).then(mb.chars.cmp(&ma.chars)).then(a.cmp(&b))
    });

    let bounds = canvas.rect();
    let p = params.padding_factor;
    let root = SplitMix64::new(params.seed);
    let mut placed: Vec<Option<PlacedWord>> = vec![None; measured.len()];
    let mut occupied: Vec<Rect> = Vec::with_capacity(measured.len());

    for (rank, &idx) in order.iter().enumerate() {
        let m = &measured[idx];
        let entry = &list.entries[idx];
        let (pw, ph) = (m.width * p, m.height * p);
        let fail = || LayoutError::PlacementFailure { word: entry.text.clone() };
        if pw > bounds.width() || ph > bounds.height() {
            return Err(fail());
        }
        let q = |r: Rect| Rect::new(quantize(r.x0), quantize(r.y0), quantize(r.x1), quantize(r.y1));
        let boxes_at = |c: Point| {
            let text_box = Rect::centered(c.x, c.y, m.width, m.height);
            (q(text_box), q(text_box.scale_about_center(p)))
        };
        let fits = |c: Point| {
            let (_, padded) = boxes_at(c);
            bounds.contains(&padded) && occupied.iter().all(|o| !o.intersects(&padded))
        };
        let snap = |x: f64, y: f64| Point::new(quantize(x), quantize(y));

        let mut found = None;
        let center = canvas.center();
        if rank == 0 {
            let c = snap(center.x, center.y);
            if fits(c) {
                found = Some(c);
            }
        } else {
            let mut rng = root.split(streams::LAYOUT_RANK_BASE + rank as u64);
            for _ in 0..RANDOM_CANDIDATES {
                let x = rng.range_f64(pw / 2.0, bounds.width() - pw / 2.0);
                let y = rng.range_f64(ph / 2.0, bounds.height() - ph / 2.0);
                let c = snap(x, y);
                if fits(c) {
                    found = Some(c);
                    break;
                }
            }
        }
        if found.is_none() {
            found = spiral(center, bounds).map(|(x, y)| snap(x, y)).find(|&c| fits(c));
        }
        let anchor = found.ok_or_else(fail)?;
        let (text_box, bbox) = boxes_at(anchor);
        occupied.push(bbox);
        placed[idx] = Some(PlacedWord {
            entry: WordEntry { text: entry.text.clone(), weight: quantize(entry.weight) },
            anchor,
            font_size: m.font_size,
            base_rotation: 0.0,
            bbox,
            text_box,
        });
    }

    Ok(WordleLayout {
        canvas,
        seed: params.seed,
        padding_factor: params.padding_factor,
        typeface: params.typeface.clone(),
        min_font: params.min_font,
        max_font: params.max_font,
        words: placed.into_iter().map(|w| w.expect("every word placed")).collect(),
    })
}

/// Square rings of growing Chebyshev radius around `center`, clockwise from the top-left corner.
fn spiral(center: Point, bounds: Rect) -> impl Iterator<Item = (f64, f64)> {
    let max_ring = (bounds.width().max(bounds.height()) / SPIRAL_STEP).ceil() as i64;
    (0..=max_ring).flat_map(move |k| {
        let ring: Vec<(i64, i64)> = if k == 0 {
            vec![(0, 0)]
        } else {
            let mut pts = Vec::with_capacity(8 * k as usize);
            for i in -k..k {
                pts.push((i, -k));
            }
            for j in -k..k {
                pts.push((k, j));
            }
            for i in (-k + 1..=k).rev() {
                pts.push((i, k));
            }
            for j in (-k + 1..=k).rev() {
                pts.push((-k, j));
            }
            pts
        };
        ring.into_iter()
            .map(move |(i, j)| (center.x + i as f64 * SPIRAL_STEP, center.y + j as f64 * SPIRAL_STEP))
    })
}

/// The layout document served to clients, pretty JSON with a trailing newline.
pub fn export_layout(layout: &WordleLayout) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(layout).expect("layout serializes");
    out.push(b'\n');
    out
}

/// Every pair of words whose padded boxes intersect.
pub fn check_overlap(layout: &WordleLayout) -> Vec<(usize, usize)> {
    let boxes: Vec<Rect> = layout.words.iter().map(|w| w.bbox).collect();
    overlapping_pairs(&boxes)
}

pub fn overlapping_pairs(boxes: &[Rect]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if boxes[i].intersects(&boxes[j]) {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout_document_round_trips() {
        let params = LayoutParams::new(Dimensions::new(400, 300).unwrap(), 3);
        let layout = compute_layout(&synthetic(6), &params, &FontRegistry::embedded()).unwrap();
        let doc = export_layout(&layout);
        let back: WordleLayout = serde_json::from_slice(&doc).unwrap();
        assert_eq!(back, layout);
        let value: serde_json::Value = serde_json::from_slice(&doc).unwrap();
        let first = &value["words"][0];
        for key in ["text", "weight", "anchor", "font_size", "bbox"] {
            assert!(first.get(key).is_some(), "{key}");
        }
    }

    fn list(words: &[(&str, f64)]) -> WordList {
        WordList {
            entries: words.iter().map(|&(t, w)| WordEntry { text: t.into(), weight: w }).collect(),
            source_name: "test".into(),
        }
    }

    fn synthetic(n: usize) -> WordList {
        let words = [
            "lorem",
            "ipsum",
            "dolor",
            "sit",
            "amet",
            "consectetur",
            "adipiscing",
            "elit",
            "sed",
            "do",
            "eiusmod",
            "tempor",
            "incididunt",
            "ut",
            "labore",
            "et",
            "dolore",
            "magna",
            "aliqua",
            "enim",
        ];
        WordList {
            entries: (0..n)
                .map(|i| WordEntry {
                    text: words[i % words.len()].to_string() + &"x".repeat(i / words.len()),
                    weight: (n - i) as f64,
                })
                .collect(),
            source_name: "synthetic".into(),
        }
    }

    /// Brute-force pairwise check, written independently of `overlapping_pairs`.
    fn oracle_pairs(layout: &WordleLayout) -> usize {
        let mut n = 0;
        for (i, a) in layout.words.iter().enumerate() {
            for b in &layout.words[i + 1..] {
                let (a, b) = (a.bbox, b.bbox);
                let sep = a.x1 <= b.x0 || b.x1 <= a.x0 || a.y1 <= b.y0 || b.y1 <= a.y0;
                if !sep {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn font_size_examples() {
        assert_eq!(font_size_for_weight(1.0, 14, 64), 64);
        assert_eq!(font_size_for_weight(0.5, 14, 64), 39);
        assert_eq!(font_size_for_weight(1e-9, 14, 64), 14);
    }

    #[test]
    fn default_font_range_scales() {
        assert_eq!(default_font_range(Dimensions::default()), (14, 64));
        assert_eq!(default_font_range(Dimensions::new(1600, 1200).unwrap()), (28, 128));
    }

    #[test]
    fn canvas_validation() {
        assert!(Dimensions::new(99, 600).is_err());
        assert!(Dimensions::new(800, 5000).is_err());
    }

    #[test]
    fn singleton_is_centered() {
        let fonts = FontRegistry::embedded();
        let layout =
            compute_layout(&list(&[("joy", 3.0)]), &LayoutParams::new(Dimensions::default(), 1), &fonts)
                .unwrap();
        assert_eq!(layout.words[0].anchor, Point::new(400.0, 300.0));
        assert_eq!(layout.words[0].entry.weight, 1.0);
    }

    #[test]
    fn deterministic() {
        let fonts = FontRegistry::embedded();
        let params = LayoutParams::new(Dimensions::default(), 99);
        let a = compute_layout(&synthetic(18), &params, &fonts).unwrap();
        let b = compute_layout(&synthetic(18), &params, &fonts).unwrap();
        assert_eq!(a, b);
        let c =
            compute_layout(&synthetic(18), &LayoutParams::new(Dimensions::default(), 100), &fonts).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn eighteen_words_do_not_overlap() {
        let fonts = FontRegistry::embedded();
        let layout =
            compute_layout(&synthetic(18), &LayoutParams::new(Dimensions::default(), 7), &fonts).unwrap();
        assert_eq!(layout.words.len(), 18);
        assert_eq!(oracle_pairs(&layout), 0);
        assert!(check_overlap(&layout).is_empty());
        let canvas = layout.canvas.rect();
        assert!(layout.words.iter().all(|w| canvas.contains(&w.bbox)));
    }

    #[test]
    fn forced_collision_detected() {
        let fonts = FontRegistry::embedded();
        let mut layout = compute_layout(
            &list(&[("a", 1.0), ("b", 1.0)]),
            &LayoutParams::new(Dimensions::default(), 3),
            &fonts,
        )
        .unwrap();
        let first = layout.words[0].clone();
        layout.words[1].anchor = first.anchor;
        layout.words[1].bbox = first.bbox;
        assert_eq!(check_overlap(&layout), vec![(0, 1)]);
    }

    #[test]
    fn hand_built_far_apart() {
        let word = |x: f64, y: f64| PlacedWord {
            entry: WordEntry { text: "w".into(), weight: 1.0 },
            anchor: Point::new(x, y),
            font_size: 20,
            base_rotation: 0.0,
            bbox: Rect::centered(x, y, 20.0, 20.0),
            text_box: Rect::centered(x, y, 15.0, 15.0),
        };
        let mut layout = WordleLayout {
            canvas: Dimensions::default(),
            seed: 0,
            padding_factor: 1.3,
            typeface: "sans".into(),
            min_font: 14,
            max_font: 64,
            words: vec![word(50.0, 50.0), word(400.0, 300.0), word(700.0, 500.0)],
        };
        assert_eq!(oracle_pairs(&layout), 0);
        assert!(check_overlap(&layout).is_empty());
        layout.words[2] = word(405.0, 305.0);
        assert_eq!(check_overlap(&layout), vec![(1, 2)]);
    }

    #[test]
    fn canvas_too_small() {
        let fonts = FontRegistry::embedded();
        let mut params = LayoutParams::new(Dimensions::new(100, 100).unwrap(), 1);
        params.min_font = 60;
        params.max_font = 90;
        let err = compute_layout(&synthetic(30), &params, &fonts).unwrap_err();
        assert!(matches!(err, LayoutError::PlacementFailure { .. }));
    }

    #[test]
    fn rank_consistency_across_lists() {
        // Equal weights and equal length profiles: every rank sees the same stream.
        let registry = FontRegistry::embedded();
        let params = LayoutParams::new(Dimensions::default(), 5).with_typeface("mono");
        let a =
            compute_layout(&list(&[("aaaa", 1.0), ("bb", 1.0), ("ccc", 1.0)]), &params, &registry).unwrap();
        let b =
            compute_layout(&list(&[("dd", 1.0), ("eeee", 1.0), ("fff", 1.0)]), &params, &registry).unwrap();
        let by_len =
            |l: &WordleLayout, n: usize| l.words.iter().find(|w| w.entry.text.len() == n).unwrap().anchor;
        // ink widths differ per glyph, so the mapped anchors agree only up to a few pixels
        for n in [2, 3, 4] {
            let (pa, pb) = (by_len(&a, n), by_len(&b, n));
            assert!(pa.distance_sq(&pb).sqrt() < 5.0, "rank of length {n}: {pa:?} vs {pb:?}");
        }
    }

    #[test]
    fn rejects_bad_params() {
        let fonts = FontRegistry::embedded();
        let mut params = LayoutParams::new(Dimensions::default(), 1);
        params.padding_factor = 0.9;
        assert!(matches!(
            compute_layout(&synthetic(3), &params, &fonts),
            Err(LayoutError::InvalidParameter(_))
        ));
        let params = LayoutParams::new(Dimensions::default(), 1).with_typeface("nope");
        assert!(matches!(compute_layout(&synthetic(3), &params, &fonts), Err(LayoutError::Font(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn layout_properties(weights in prop::collection::vec(0.05f64..10.0, 1..30), seed in any::<u64>()) {
            let fonts = FontRegistry::embedded();
            let entries = weights.iter().enumerate().map(|(i, &w)| WordEntry { text: format!("word{i}"), weight: w }).collect();
            let list = WordList { entries, source_name: "p".into() };
            let layout = compute_layout(&list, &LayoutParams::new(Dimensions::default(), seed), &fonts).unwrap();
            prop_assert_eq!(oracle_pairs(&layout), 0);
            let canvas = layout.canvas.rect();
            prop_assert!(layout.words.iter().all(|w| canvas.contains(&w.bbox)));
            for (i, a) in layout.words.iter().enumerate() {
                for b in &layout.words {
                    if weights[i] > 0.0 && a.entry.weight > b.entry.weight {
                        prop_assert!(a.font_size >= b.font_size);
                    }
                }
            }
        }
    }
}

//! Frame rasterization: each word's outline is placed by its sampled pose,
//! filled with a coverage rasterizer, optionally blurred, and composited over
//! the palette background.

mod colors;

use ab_glyph_rasterizer::{point, Rasterizer};
use rayon::prelude::*;
use thiserror::Error;

use crate::animation::{ChannelKind, PropertyState};
use crate::descriptor::AnimationDescriptor;
use crate::fonts::{Curve, FontError, FontRegistry};
use crate::layout::WordleLayout;

pub use colors::{palette, ColorShift, Palette, Rgb, PALETTES};

pub const DEFAULT_FPS: u32 = 20;
pub const MIN_FPS: u32 = 5;
pub const MAX_FPS: u32 = 30;
/// Blur radii above this are drawn at this radius.
pub const MAX_BLUR_RADIUS: f64 = 8.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("fps {0} outside [{MIN_FPS}, {MAX_FPS}]")]
    InvalidFps(u32),
    #[error("unknown palette {0:?}")]
    UnknownPalette(String),
    #[error("style typeface {style:?} differs from the layout's {layout:?}")]
    TypefaceMismatch { layout: String, style: String },
    #[error("descriptor has {descriptor} words but the layout has {layout}")]
    WordCountMismatch { descriptor: usize, layout: usize },
    #[error(transparent)]
    Font(#[from] FontError),
}

/// Row-major RGBA, always opaque.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl RasterImage {
    pub fn filled(width: u32, height: u32, color: Rgb) -> Self {
        let pixels =
            (0..width as usize * height as usize).flat_map(|_| [color[0], color[1], color[2], 255]).collect();
        Self { width, height, pixels }
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        let i = 4 * (y as usize * self.width as usize + x as usize);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2], self.pixels[i + 3]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderStyle {
    pub palette: String,
    pub typeface: String,
    pub fps: u32,
}

impl RenderStyle {
    pub fn new(palette: &str, typeface: &str, fps: u32) -> Self {
        Self { palette: palette.to_string(), typeface: typeface.to_string(), fps }
    }

    pub fn validate(&self) -> Result<&'static Palette, RenderError> {
        if !(MIN_FPS..=MAX_FPS).contains(&self.fps) {
            return Err(RenderError::InvalidFps(self.fps));
        }
        palette(&self.palette).ok_or_else(|| RenderError::UnknownPalette(self.palette.clone()))
    }
}

/// `round(duration * fps)`, at least one frame.
pub fn frame_count(duration: f64, fps: u32) -> usize {
    ((duration * fps as f64).round() as usize).max(1)
}

struct PreparedWord {
    /// Outline relative to the ink-box center.
    curves: Vec<Curve>,
    anchor: (f64, f64),
    base_rotation: f64,
    color: ColorShift,
}

/// A layout shaped once and ready to draw at any pose.
pub struct Scene {
    width: u32,
    height: u32,
    background: Rgb,
    words: Vec<PreparedWord>,
}

impl Scene {
    pub fn new(
        layout: &WordleLayout,
        style: &RenderStyle,
        fonts: &FontRegistry,
    ) -> Result<Self, RenderError> {
        let palette = style.validate()?;
        if style.typeface != layout.typeface {
            return Err(RenderError::TypefaceMismatch {
                layout: layout.typeface.clone(),
                style: style.typeface.clone(),
            });
        }
        let face = fonts.get(&layout.typeface)?;
        let words = layout
            .words
            .iter()
            .map(|w| {
                let shaped = face.shape(&w.entry.text, w.font_size as f64)?;
                let (cx, cy) = shaped.ink.center();
                let (cx, cy) = (cx as f32, cy as f32);
                Ok(PreparedWord {
                    curves: shaped.curves.iter().map(|c| c.map(|p| [p[0] - cx, p[1] - cy])).collect(),
                    anchor: (w.anchor.x, w.anchor.y),
                    base_rotation: w.base_rotation,
                    color: ColorShift::new(palette.word_color(w.entry.weight)),
                })
            })
            .collect::<Result<_, FontError>>()?;
        Ok(Self {
            width: layout.canvas.width,
            height: layout.canvas.height,
            background: palette.background,
            words,
        })
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    /// Draws every word at its pose; `poses[i]` belongs to layout word `i`.
    pub fn draw(&self, poses: &[PropertyState]) -> RasterImage {
        let (w, h) = (self.width as usize, self.height as usize);
        let mut buf: Vec<[f32; 3]> = vec![self.background.map(f32::from); w * h];
        for (word, pose) in self.words.iter().zip(poses) {
            self.draw_word(&mut buf, word, pose);
        }
        let mut pixels = vec![255u8; w * h * 4];
        for (px, c) in pixels.chunks_exact_mut(4).zip(&buf) {
            for k in 0..3 {
                // round half up; the cast saturates
                px[k] = (c[k] + 0.5) as u8;
            }
        }
        RasterImage { width: self.width, height: self.height, pixels }
    }

    /// The layout with every word at rest.
    pub fn draw_static(&self) -> RasterImage {
        self.draw(&vec![PropertyState::rest(); self.words.len()])
    }

    fn draw_word(&self, buf: &mut [[f32; 3]], word: &PreparedWord, pose: &PropertyState) {
        let opacity = pose.get(ChannelKind::Opacity).clamp(0.0, 1.0);
        let scale = pose.get(ChannelKind::Scale);
        if opacity <= 0.0 || scale <= 0.0 || word.curves.is_empty() {
            return;
        }
        let (tx, ty) = pose.translate();
        let (sin, cos) = (word.base_rotation + pose.get(ChannelKind::Rotation)).to_radians().sin_cos();
        let (ox, oy) = (word.anchor.0 + tx, word.anchor.1 + ty);
        let place = |p: [f32; 2]| {
            let (x, y) = (p[0] as f64 * scale, p[1] as f64 * scale);
            [(x * cos - y * sin + ox) as f32, (x * sin + y * cos + oy) as f32]
        };
        let curves: Vec<Curve> = word.curves.iter().map(|c| c.map(place)).collect();
        let mut bounds = curves[0].bounds();
        for c in &curves[1..] {
            bounds = bounds.union(&c.bounds());
        }

        let radius = pose.get(ChannelKind::Blur).clamp(0.0, MAX_BLUR_RADIUS);
        let pad = radius.ceil() as i64 + 2;
        let x0 = bounds.x0.floor() as i64 - pad;
        let y0 = bounds.y0.floor() as i64 - pad;
        let x1 = bounds.x1.ceil() as i64 + pad;
        let y1 = bounds.y1.ceil() as i64 + pad;
        // nothing reaches the canvas
        if x1 <= 0 || y1 <= 0 || x0 >= self.width as i64 || y0 >= self.height as i64 {
            return;
        }
        let (rw, rh) = ((x1 - x0) as usize, (y1 - y0) as usize);
        let mut raster = Rasterizer::new(rw, rh);
        let local = |p: [f32; 2]| point(p[0] - x0 as f32, p[1] - y0 as f32);
        for c in &curves {
            match *c {
                Curve::Line(a, b) => raster.draw_line(local(a), local(b)),
                Curve::Quad(a, b, c) => raster.draw_quad(local(a), local(b), local(c)),
                Curve::Cubic(a, b, c, d) => raster.draw_cubic(local(a), local(b), local(c), local(d)),
            }
        }
        let mut coverage = vec![0f32; rw * rh];
        raster.for_each_pixel(|i, a| coverage[i] = a.min(1.0));
        if radius > 0.0 {
            gaussian_blur(&mut coverage, rw, rh, radius);
        }

        let color = word.color.at(pose.get(ChannelKind::ColorShift));
        let alpha = opacity as f32;
        let (cw, ch) = (self.width as i64, self.height as i64);
        for ry in 0..rh {
            let y = y0 + ry as i64;
            if y < 0 || y >= ch {
                continue;
            }
            for rx in 0..rw {
                let x = x0 + rx as i64;
                let a = coverage[ry * rw + rx] * alpha;
                if x < 0 || x >= cw || a <= 0.0 {
                    continue;
                }
                let px = &mut buf[y as usize * cw as usize + x as usize];
                for k in 0..3 {
                    px[k] += (color[k] - px[k]) * a;
                }
            }
        }
    }
}

/// Separable Gaussian with `sigma = radius / 2`, taps out to `ceil(radius)`.
fn gaussian_blur(data: &mut [f32], w: usize, h: usize, radius: f64) {
    let sigma = radius / 2.0;
    let reach = radius.ceil() as i64;
    let mut kernel: Vec<f32> =
        (-reach..=reach).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp() as f32).collect();
    let sum: f32 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= sum);

    let mut tmp = vec![0f32; data.len()];
    let pass = |src: &[f32], dst: &mut [f32], step: usize, len: usize, lines: usize, stride: usize| {
        for line in 0..lines {
            for i in 0..len {
                let mut acc = 0.0;
                for (j, k) in kernel.iter().enumerate() {
                    let pos = i as i64 + j as i64 - reach;
                    if pos >= 0 && (pos as usize) < len {
                        acc += k * src[line * stride + pos as usize * step];
                    }
                }
                dst[line * stride + i * step] = acc;
            }
        }
    };
    pass(data, &mut tmp, 1, w, h, w);
    pass(&tmp, data, w, h, w, 1);
}

/// Renders one frame at normalized loop time `t`.
pub fn render_frame(
    desc: &AnimationDescriptor,
    layout: &WordleLayout,
    t: f64,
    style: &RenderStyle,
    fonts: &FontRegistry,
) -> Result<RasterImage, RenderError> {
    check_counts(desc, layout)?;
    let scene = Scene::new(layout, style, fonts)?;
    Ok(scene.draw(&poses_at(desc, t)))
}

/// Pose of every word at `t`, as handed to the rasterizer.
pub fn poses_at(desc: &AnimationDescriptor, t: f64) -> Vec<PropertyState> {
    (0..desc.words.len()).map(|i| desc.sample(i, t)).collect()
}

fn check_counts(desc: &AnimationDescriptor, layout: &WordleLayout) -> Result<(), RenderError> {
    if desc.words.len() != layout.words.len() {
        return Err(RenderError::WordCountMismatch {
            descriptor: desc.words.len(),
            layout: layout.words.len(),
        });
    }
    Ok(())
}

/// Every frame of one loop; frame `i` of `n` shows `t = i / n`. Frames render in parallel.
pub fn render_animation(
    desc: &AnimationDescriptor,
    layout: &WordleLayout,
    style: &RenderStyle,
    fonts: &FontRegistry,
) -> Result<Vec<RasterImage>, RenderError> {
    check_counts(desc, layout)?;
    let scene = Scene::new(layout, style, fonts)?;
    let n = frame_count(desc.duration, style.fps);
    Ok((0..n).into_par_iter().map(|i| scene.draw(&poses_at(desc, i as f64 / n as f64))).collect())
}

/// The static wordle: the layout drawn at rest.
pub fn render_static(
    layout: &WordleLayout,
    style: &RenderStyle,
    fonts: &FontRegistry,
) -> Result<RasterImage, RenderError> {
    Ok(Scene::new(layout, style, fonts)?.draw_static())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::animation::EasingKind;
    use crate::animation::{Channel, Keyframe, Timeline};
    use crate::descriptor::{GroupParams, WordAnimation};
    use crate::grouping::GroupAssignment;
    use crate::ingest::parse_wordle_csv;
    use crate::layout::{compute_layout, Dimensions, LayoutParams};
    use crate::schemes::EmordleSpec;

    fn one_word() -> (WordleLayout, FontRegistry) {
        let fonts = FontRegistry::embedded();
        let list = parse_wordle_csv(b"Hello,1").unwrap();
        let layout =
            compute_layout(&list, &LayoutParams::new(Dimensions::new(400, 240).unwrap(), 1), &fonts).unwrap();
        (layout, fonts)
    }

    fn descriptor(channel: Channel) -> AnimationDescriptor {
        AnimationDescriptor {
            scheme_id: "custom".into(),
            emotion_label: "test".into(),
            spec: EmordleSpec::new("custom", 0.5, 0.5, 1),
            duration: 1.0,
            cycles: 1,
            amplitudes: Default::default(),
            groups: GroupAssignment { group_count: 1, group_of: vec![0] },
            group_params: vec![GroupParams { delay: 0.0, direction: None, amplitudes: Default::default() }],
            words: vec![WordAnimation {
                text: "Hello".into(),
                group: 0,
                clamp: 1.0,
                timeline: Timeline::from_channels([channel]).unwrap(),
            }],
        }
    }

    fn style() -> RenderStyle {
        RenderStyle::new("classic", "sans", 20)
    }

    #[test]
    fn static_render_draws_ink_inside_text_box() {
        let (layout, fonts) = one_word();
        let img = render_static(&layout, &style(), &fonts).unwrap();
        let tb = layout.words[0].text_box;
        let mut dark = 0;
        for y in 0..img.height {
            for x in 0..img.width {
                if img.pixel(x, y)[0] < 128 {
                    dark += 1;
                    assert!(tb.expand(1.0).contains(&crate::geometry::Rect::new(
                        x as f64,
                        y as f64,
                        x as f64 + 1.0,
                        y as f64 + 1.0
                    )));
                }
            }
        }
        assert!(dark > 100);
    }

    #[test]
    fn zero_opacity_frame_is_background() {
        let (layout, fonts) = one_word();
        let ch = Channel::new(
            ChannelKind::Opacity,
            vec![Keyframe::new(0.0, 1.0, EasingKind::Linear), Keyframe::new(0.5, 0.0, EasingKind::Linear)],
        )
        .unwrap();
        let img = render_frame(&descriptor(ch), &layout, 0.5, &style(), &fonts).unwrap();
        assert_eq!(img, RasterImage::filled(400, 240, [255, 255, 255]));
    }

    #[test]
    fn blur_spreads_but_keeps_mass() {
        let mut data = vec![0f32; 21 * 21];
        data[10 * 21 + 10] = 1.0;
        gaussian_blur(&mut data, 21, 21, 4.0);
        let sum: f32 = data.iter().sum();
        assert!((sum - 1.0).abs() < 1e-4);
        assert!(data[10 * 21 + 10] < 0.2 && data[10 * 21 + 13] > 0.0);
    }

    #[test]
    fn style_checks() {
        let (layout, fonts) = one_word();
        assert_eq!(
            Scene::new(&layout, &RenderStyle::new("classic", "sans", 4), &fonts).err(),
            Some(RenderError::InvalidFps(4))
        );
        assert!(matches!(
            Scene::new(&layout, &RenderStyle::new("plaid", "sans", 20), &fonts),
            Err(RenderError::UnknownPalette(_))
        ));
        assert!(matches!(
            Scene::new(&layout, &RenderStyle::new("classic", "serif", 20), &fonts),
            Err(RenderError::TypefaceMismatch { .. })
        ));
        assert_eq!(frame_count(2.5, 20), 50);
        assert_eq!(frame_count(1.0, 5), 5);
    }

    #[test]
    fn frames_are_order_independent() {
        let (layout, fonts) = one_word();
        let ch = Channel::new(
            ChannelKind::Rotation,
            vec![
                Keyframe::new(0.0, 0.0, EasingKind::SlowInOut),
                Keyframe::new(1.0, 30.0, EasingKind::Linear),
            ],
        )
        .unwrap();
        let desc = descriptor(ch);
        let frames = render_animation(&desc, &layout, &style(), &fonts).unwrap();
        assert_eq!(frames.len(), 20);
        let scene = Scene::new(&layout, &style(), &fonts).unwrap();
        for i in [13, 2, 19, 0, 7] {
            assert_eq!(scene.draw(&poses_at(&desc, i as f64 / 20.0)), frames[i]);
        }
        assert_eq!(frames[0], render_static(&layout, &style(), &fonts).unwrap());
        assert_ne!(frames[10], frames[0]);
    }
}

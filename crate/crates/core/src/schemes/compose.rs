//! Turning a template into per-word timelines under (entropy, speed).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::animation::{Channel, ChannelKind, EasingKind, Keyframe, Timeline};
use crate::descriptor::{AnimationDescriptor, GroupParams, WordAnimation};
use crate::fonts::DEFAULT_TYPEFACE;
use crate::geometry::{quantize, Point, Rect};
use crate::grouping::{
    group_count_for_entropy, group_positional, group_random, GroupAssignment, GroupingStrategy,
};
use crate::layout::WordleLayout;
use crate::rng::{streams, SplitMix64};

use super::template::{ChannelTemplate, DirectionRule, SchemeTemplate, DIR_X, DIR_Y};
use super::SchemeError;

pub const DEFAULT_PALETTE: &str = "classic";

/// Slack kept between a word's animated extent and its free-space margin.
const CLAMP_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StyleSpec {
    pub palette: String,
    pub typeface: String,
}

impl Default for StyleSpec {
    fn default() -> Self {
        Self { palette: DEFAULT_PALETTE.to_string(), typeface: DEFAULT_TYPEFACE.to_string() }
    }
}

/// The author's controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmordleSpec {
    pub scheme_id: String,
    pub entropy: f64,
    pub speed: f64,
    pub seed: u64,
    pub style: StyleSpec,
}

/// A spec value that was moved into range.
#[derive(Debug, Clone, PartialEq)]
pub struct ClampWarning {
    pub field: &'static str,
    pub given: f64,
    pub used: f64,
}

impl std::fmt::Display for ClampWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} is outside [0, 1]; using {}", self.field, self.given, self.used)
    }
}

fn clamp_unit(field: &'static str, v: f64, warnings: &mut Vec<ClampWarning>) -> f64 {
    let used = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    if used != v {
        warnings.push(ClampWarning { field, given: v, used });
    }
    used
}

impl EmordleSpec {
    pub fn new(scheme_id: &str, entropy: f64, speed: f64, seed: u64) -> Self {
        Self { scheme_id: scheme_id.to_string(), entropy, speed, seed, style: StyleSpec::default() }
    }

    /// Entropy and speed moved into `[0, 1]`, with a warning for each change. NaN becomes 0.
    pub fn clamped(&self) -> (EmordleSpec, Vec<ClampWarning>) {
        let mut warnings = Vec::new();
        let mut out = self.clone();
        out.entropy = clamp_unit("entropy", self.entropy, &mut warnings);
        out.speed = clamp_unit("speed", self.speed, &mut warnings);
        (out, warnings)
    }
}

/// Loop length in seconds: 4 s at speed 0 down to 1 s at speed 1.
pub fn duration_for_speed(speed: f64) -> f64 {
    4.0 - 3.0 * speed.clamp(0.0, 1.0)
}

pub fn cycles_for_speed(template: &SchemeTemplate, speed: f64) -> u32 {
    1 + (speed.clamp(0.0, 1.0) * template.max_extra_cycles as f64 + 0.5).floor() as u32
}

/// Medium entropy reproduces `base`; the range spans half to one and a half times it.
pub fn amplitude_for_entropy(base: f64, entropy: f64) -> f64 {
    base * (0.5 + entropy.clamp(0.0, 1.0))
}

fn unit(v: (f64, f64)) -> Option<(f64, f64)> {
    let len = v.0.hypot(v.1);
    (len > 1e-9).then(|| (v.0 / len, v.1 / len))
}

fn rotate(v: (f64, f64), deg: f64) -> (f64, f64) {
    let (s, c) = deg.to_radians().sin_cos();
    (v.0 * c - v.1 * s, v.0 * s + v.1 * c)
}

fn draw_group_params(
    template: &SchemeTemplate,
    layout: &WordleLayout,
    groups: &GroupAssignment,
    group: usize,
    envelope: &BTreeMap<String, f64>,
    spec: &EmordleSpec,
) -> GroupParams {
    let v = &template.variation;
    let mut rng = SplitMix64::new(spec.seed).split(streams::VARIATION).split(group as u64);
    let jitter_u = rng.next_f64();

    let delay = quantize(v.delay * group as f64 / groups.group_count as f64);

    let direction = (v.direction != DirectionRule::None).then(|| {
        let members: Vec<Point> = groups.members(group).map(|i| layout.words[i].anchor).collect();
        let k = members.len().max(1) as f64;
        let centroid =
            (members.iter().map(|p| p.x).sum::<f64>() / k, members.iter().map(|p| p.y).sum::<f64>() / k);
        let center = layout.canvas.center();
        let rel = (centroid.0 - center.x, centroid.1 - center.y);
        let base = match v.direction {
            DirectionRule::Outward => unit(rel),
            _ => {
                let sx = if rel.0 < 0.0 { -1.0 } else { 1.0 };
                let sy = if rel.1 < 0.0 { -1.0 } else { 1.0 };
                unit((sx * center.x, sy * center.y))
            }
        }
        // a group centred on the canvas moves up
        .unwrap_or((0.0, -1.0));
        let jitter = (2.0 * jitter_u - 1.0) * v.jitter_deg * spec.entropy;
        let d = rotate(base, jitter);
        [quantize(d.0), quantize(d.1)]
    });

    let mut amplitudes = BTreeMap::new();
    for a in &template.amplitudes {
        let mut value = envelope[&a.name];
        if let Some(f) = template.factor(&a.name) {
            let mut factor = f.lo + (f.hi - f.lo) * rng.next_f64();
            if f.signed && rng.next_f64() < 0.5 {
                factor = -factor;
            }
            value *= factor;
        }
        amplitudes.insert(a.name.clone(), quantize(value));
    }
    GroupParams { delay, direction, amplitudes }
}

/// Keyframes of one channel laid out over the loop: rest until `delay`, then
/// the template once, or `cycles` times for repeating channels.
fn resolve_channel(
    ct: &ChannelTemplate,
    params: &GroupParams,
    cycles: u32,
) -> Result<Vec<Keyframe>, SchemeError> {
    let rest = ct.kind.rest_value();
    let dir = params.direction.unwrap_or([0.0, 0.0]);
    let env = |name: &str| match name {
        DIR_X => Some(dir[0]),
        DIR_Y => Some(dir[1]),
        _ => params.amplitudes.get(name).copied(),
    };
    let reps = if ct.repeat { cycles.max(1) } else { 1 };
    let span = (1.0 - params.delay) / reps as f64;
    let mut out: Vec<Keyframe> = Vec::new();
    if params.delay > 0.0 {
        out.push(Keyframe::new(0.0, rest, EasingKind::Linear));
    }
    for r in 0..reps {
        for k in &ct.keyframes {
            let t = quantize(params.delay + (r as f64 + k.at) * span).min(1.0);
            let value =
                k.value.eval(&env).map_err(|message| SchemeError::Validation { message, line: None })?;
            let kf = Keyframe::new(t, value, k.easing);
            match out.last_mut() {
                // cycle seam: both sides are at rest; the new cycle's easing wins
                Some(last) if last.t >= t => *last = kf,
                _ => out.push(kf),
            }
        }
    }
    Ok(out)
}

/// Largest growth each word may use without reaching a neighbour or the canvas edge:
/// half the gap to the nearest other word's ink box, or the distance to the border.
pub fn free_margins(layout: &WordleLayout) -> Vec<f64> {
    let canvas = layout.canvas.rect();
    let boxes: Vec<Rect> = layout.words.iter().map(|w| w.text_box).collect();
    boxes
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut m = (b.x0 - canvas.x0).min(b.y0 - canvas.y0).min(canvas.x1 - b.x1).min(canvas.y1 - b.y1);
            for (j, o) in boxes.iter().enumerate() {
                if i != j {
                    m = m.min(b.gap(o) / 2.0);
                }
            }
            (m - CLAMP_SLACK).max(0.0)
        })
        .collect()
}

/// Extremes of the geometric channels over the loop.
#[derive(Debug, Clone, Copy, Default)]
struct MotionBounds {
    tx: f64,
    ty: f64,
    rot_deg: f64,
    scale_hi: f64,
}

impl MotionBounds {
    fn of(channels: &[Channel]) -> Self {
        let mut b = MotionBounds { scale_hi: 1.0, ..Default::default() };
        for ch in channels {
            let (lo, hi) = ch.value_range();
            let abs = lo.abs().max(hi.abs());
            match ch.kind() {
                ChannelKind::TranslateX => b.tx = abs,
                ChannelKind::TranslateY => b.ty = abs,
                ChannelKind::Rotation => b.rot_deg = abs,
                ChannelKind::Scale => b.scale_hi = hi.max(1.0),
                _ => {}
            }
        }
        b
    }

    /// Whether motion scaled by `k` keeps the animated box within `margin` of
    /// the rest ink box and the displacement within `cap`.
    fn fits(&self, k: f64, w: f64, h: f64, margin: f64, cap: f64) -> bool {
        let theta = (self.rot_deg * k).min(90.0).to_radians();
        let (sin, cos) = theta.sin_cos();
        let s = 1.0 + (self.scale_hi - 1.0) * k;
        let hx = s * (w / 2.0 * cos + h / 2.0 * sin);
        let hy = s * (w / 2.0 * sin + h / 2.0 * cos);
        self.tx * k + hx <= w / 2.0 + margin
            && self.ty * k + hy <= h / 2.0 + margin
            && k * self.tx.hypot(self.ty) <= cap
    }
}

/// Largest `k` in `[0, 1]` (on the 6-decimal grid) for which the motion fits.
fn readability_factor(bounds: &MotionBounds, text_box: &Rect, margin: f64, cap: f64) -> f64 {
    let (w, h) = (text_box.width(), text_box.height());
    if bounds.fits(1.0, w, h, margin, cap) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        if bounds.fits(mid, w, h, margin, cap) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * 1e6).floor() / 1e6
}

fn scale_motion(kind: ChannelKind, value: f64, k: f64) -> f64 {
    match kind {
        ChannelKind::TranslateX | ChannelKind::TranslateY | ChannelKind::Rotation => value * k,
        ChannelKind::Scale => 1.0 + (value - 1.0) * k,
        _ => value,
    }
}

fn build_channel(kind: ChannelKind, keyframes: Vec<Keyframe>) -> Result<Channel, SchemeError> {
    let q = keyframes.into_iter().map(|k| Keyframe::new(k.t, quantize(k.value), k.easing_out)).collect();
    Ok(Channel::new(kind, q)?)
}

pub fn instantiate_scheme(
    template: &SchemeTemplate,
    layout: &WordleLayout,
    spec: &EmordleSpec,
) -> Result<AnimationDescriptor, SchemeError> {
    if spec.scheme_id != template.id {
        return Err(SchemeError::SchemeMismatch {
            spec: spec.scheme_id.clone(),
            template: template.id.clone(),
        });
    }
    let (spec, _) = spec.clamped();
    let n = layout.words.len();
    let g = group_count_for_entropy(template.strategy, n, spec.entropy);
    let groups = match template.strategy {
        GroupingStrategy::Random => group_random(n, g, spec.seed)?,
        GroupingStrategy::Positional => group_positional(layout, g)?,
    };
    let duration = duration_for_speed(spec.speed);
    let cycles = cycles_for_speed(template, spec.speed);
    let envelope: BTreeMap<String, f64> = template
        .amplitudes
        .iter()
        .map(|a| {
            (
                a.name.clone(),
                quantize(amplitude_for_entropy(a.unit.resolve(a.base, layout.canvas), spec.entropy)),
            )
        })
        .collect();
    let group_params: Vec<GroupParams> =
        (0..g).map(|k| draw_group_params(template, layout, &groups, k, &envelope, &spec)).collect();

    // geometry is shared by every word of a group; only the clamp differs
    let resolved: Vec<Vec<(ChannelKind, Vec<Keyframe>)>> = group_params
        .iter()
        .map(|p| template.channels.iter().map(|ct| Ok((ct.kind, resolve_channel(ct, p, cycles)?))).collect())
        .collect::<Result<_, SchemeError>>()?;
    let bounds: Vec<MotionBounds> = resolved
        .iter()
        .map(|chs| {
            let channels: Vec<Channel> =
                chs.iter().map(|(kind, kfs)| build_channel(*kind, kfs.clone())).collect::<Result<_, _>>()?;
            Ok(MotionBounds::of(&channels))
        })
        .collect::<Result<_, SchemeError>>()?;

    let margins = free_margins(layout);
    let mut words = Vec::with_capacity(n);
    for (i, w) in layout.words.iter().enumerate() {
        let group = groups.group_of[i];
        let cap = (layout.padding_factor - 1.0) * w.bbox.diagonal();
        let k = readability_factor(&bounds[group], &w.text_box, margins[i], cap);
        let mut timeline = Timeline::new();
        for (kind, kfs) in &resolved[group] {
            let scaled = kfs
                .iter()
                .map(|kf| Keyframe::new(kf.t, scale_motion(*kind, kf.value, k), kf.easing_out))
                .collect();
            timeline.insert(build_channel(*kind, scaled)?)?;
        }
        words.push(WordAnimation { text: w.entry.text.clone(), group, clamp: k, timeline });
    }

    Ok(AnimationDescriptor {
        scheme_id: template.id.clone(),
        emotion_label: template.emotion_label.clone(),
        spec,
        duration,
        cycles,
        amplitudes: envelope,
        groups,
        group_params,
        words,
    })
}

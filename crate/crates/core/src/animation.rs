//! Keyframe channels, easing functions and time sampling.
//!
//! Channel values are offsets or factors relative to a word's rest pose, so a
//! single timeline shape applies to any word regardless of size or anchor.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnimationError {
    #[error("easing parameter {0} is outside [0, 1]")]
    DomainError(f64),
    #[error("loop duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("channel {kind}: {reason}")]
    InvalidChannel { kind: ChannelKind, reason: String },
    #[error("duplicate channel {0}")]
    DuplicateChannel(ChannelKind),
}

/// Overshoot constant of the back-out curve.
pub const BUMP_C1: f64 = 1.70158;
pub const BUMP_C3: f64 = BUMP_C1 + 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EasingKind {
    Linear,
    Bump,
    SlowIn,
    SlowOut,
    SlowInOut,
    FastInOut,
}

impl EasingKind {
    pub const ALL: [EasingKind; 6] = [
        EasingKind::Linear,
        EasingKind::Bump,
        EasingKind::SlowIn,
        EasingKind::SlowOut,
        EasingKind::SlowInOut,
        EasingKind::FastInOut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EasingKind::Linear => "linear",
            EasingKind::Bump => "bump",
            EasingKind::SlowIn => "slow_in",
            EasingKind::SlowOut => "slow_out",
            EasingKind::SlowInOut => "slow_in_out",
            EasingKind::FastInOut => "fast_in_out",
        }
    }

    /// Largest value the curve reaches on `[0, 1]`.
    pub fn peak(self) -> f64 {
        match self {
            EasingKind::Bump => {
                // stationary point of 1 + c3 x^3 + c1 x^2 at x = t - 1 = -2 c1 / (3 c3)
                let x = -2.0 * BUMP_C1 / (3.0 * BUMP_C3);
                1.0 + BUMP_C3 * x * x * x + BUMP_C1 * x * x
            }
            _ => 1.0,
        }
    }

    /// Applies the curve without range checks. `t` is assumed in `[0, 1]`.
    #[inline]
    pub(crate) fn apply(self, t: f64) -> f64 {
        // exact endpoints, so a keyframe boundary reproduces its value bit for bit
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        match self {
            EasingKind::Linear => t,
            EasingKind::SlowIn => t * t,
            EasingKind::SlowOut => {
                let u = 1.0 - t;
                1.0 - u * u
            }
            EasingKind::SlowInOut => t * t * (3.0 - 2.0 * t),
            // inverse of smoothstep: steep at both ends, flat through the middle
            EasingKind::FastInOut => 0.5 - ((1.0 - 2.0 * t).clamp(-1.0, 1.0).asin() / 3.0).sin(),
            EasingKind::Bump => {
                let x = t - 1.0;
                1.0 + BUMP_C3 * x * x * x + BUMP_C1 * x * x
            }
        }
    }
}

impl fmt::Display for EasingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EasingKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EasingKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown easing {s:?}"))
    }
}

pub fn ease(kind: EasingKind, t: f64) -> Result<f64, AnimationError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(AnimationError::DomainError(t));
    }
    Ok(kind.apply(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    TranslateX,
    TranslateY,
    Rotation,
    Scale,
    Opacity,
    ColorShift,
    Blur,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 7] = [
        ChannelKind::TranslateX,
        ChannelKind::TranslateY,
        ChannelKind::Rotation,
        ChannelKind::Scale,
        ChannelKind::Opacity,
        ChannelKind::ColorShift,
        ChannelKind::Blur,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::TranslateX => "translate_x",
            ChannelKind::TranslateY => "translate_y",
            ChannelKind::Rotation => "rotation",
            ChannelKind::Scale => "scale",
            ChannelKind::Opacity => "opacity",
            ChannelKind::ColorShift => "color_shift",
            ChannelKind::Blur => "blur",
        }
    }

    /// Value of the channel when the word is at rest.
    pub fn rest_value(self) -> f64 {
        match self {
            ChannelKind::Scale | ChannelKind::Opacity => 1.0,
            _ => 0.0,
        }
    }

    /// Channels that move or grow the word's footprint.
    pub fn is_geometric(self) -> bool {
        matches!(
            self,
            ChannelKind::TranslateX | ChannelKind::TranslateY | ChannelKind::Rotation | ChannelKind::Scale
        )
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown channel kind {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub t: f64,
    pub value: f64,
    /// Pacing toward the next keyframe; ignored on the last one.
    #[serde(rename = "easing")]
    pub easing_out: EasingKind,
}

impl Keyframe {
    pub fn new(t: f64, value: f64, easing_out: EasingKind) -> Self {
        Self { t, value, easing_out }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    kind: ChannelKind,
    keyframes: Vec<Keyframe>,
}

impl Channel {
    /// Validates ordering: first keyframe at `t = 0`, strictly increasing, all in `[0, 1]`.
    pub fn new(kind: ChannelKind, keyframes: Vec<Keyframe>) -> Result<Self, AnimationError> {
        let bad = |reason: &str| AnimationError::InvalidChannel { kind, reason: reason.to_string() };
        let first = keyframes.first().ok_or_else(|| bad("no keyframes"))?;
        if first.t != 0.0 {
            return Err(bad("first keyframe must be at t = 0"));
        }
        if keyframes.iter().any(|k| !(0.0..=1.0).contains(&k.t) || !k.value.is_finite()) {
            return Err(bad("keyframe time outside [0, 1] or non-finite value"));
        }
        if keyframes.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(bad("keyframes not strictly increasing"));
        }
        Ok(Self { kind, keyframes })
    }

    pub fn constant(kind: ChannelKind, value: f64) -> Self {
        Self { kind, keyframes: vec![Keyframe::new(0.0, value, EasingKind::Linear)] }
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn keyframes(&self) -> &[Keyframe] {
        &self.keyframes
    }

    /// Tight bounds of the sampled value over the whole loop, accounting for bump overshoot.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in &self.keyframes {
            lo = lo.min(k.value);
            hi = hi.max(k.value);
        }
        for w in self.keyframes.windows(2) {
            let over = w[0].value + w[0].easing_out.peak() * (w[1].value - w[0].value);
            lo = lo.min(over);
            hi = hi.max(over);
        }
        (lo, hi)
    }
}

pub fn sample_channel(ch: &Channel, t: f64) -> f64 {
    let kfs = &ch.keyframes;
    // index of the last keyframe with kf.t <= t
    let idx = kfs.partition_point(|k| k.t <= t);
    if idx == 0 {
        return kfs[0].value;
    }
    let a = &kfs[idx - 1];
    let Some(b) = kfs.get(idx) else {
        return a.value;
    };
    let u = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
    a.value + a.easing_out.apply(u) * (b.value - a.value)
}

/// Per-word animation unit: at most one channel per kind.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Timeline {
    channels: BTreeMap<ChannelKind, Channel>,
}

impl Timeline {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_channels(channels: impl IntoIterator<Item = Channel>) -> Result<Self, AnimationError> {
        let mut tl = Timeline::new();
        for ch in channels {
            tl.insert(ch)?;
        }
        Ok(tl)
    }

    pub fn insert(&mut self, ch: Channel) -> Result<(), AnimationError> {
        if self.channels.contains_key(&ch.kind) {
            return Err(AnimationError::DuplicateChannel(ch.kind));
        }
        self.channels.insert(ch.kind, ch);
        Ok(())
    }

    pub fn get(&self, kind: ChannelKind) -> Option<&Channel> {
        self.channels.get(&kind)
    }

    pub fn channels(&self) -> impl Iterator<Item = &Channel> {
        self.channels.values()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }
}

/// One value per [`ChannelKind`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyState {
    values: [f64; 7],
}

impl PropertyState {
    pub fn rest() -> Self {
        let mut values = [0.0; 7];
        for k in ChannelKind::ALL {
            values[k.index()] = k.rest_value();
        }
        Self { values }
    }

    pub fn get(&self, kind: ChannelKind) -> f64 {
        self.values[kind.index()]
    }

    pub fn set(&mut self, kind: ChannelKind, value: f64) {
        self.values[kind.index()] = value;
    }

    pub fn is_rest(&self) -> bool {
        *self == Self::rest()
    }

    pub fn translate(&self) -> (f64, f64) {
        (self.get(ChannelKind::TranslateX), self.get(ChannelKind::TranslateY))
    }
}

pub fn sample_timeline(tl: &Timeline, t: f64) -> PropertyState {
    let mut state = PropertyState::rest();
    for ch in tl.channels.values() {
        state.set(ch.kind, sample_channel(ch, t));
    }
    state
}

/// Normalized position within the current loop, in `[0, 1)`.
pub fn loop_phase(elapsed: f64, duration: f64) -> Result<f64, AnimationError> {
    if duration.is_nan() || duration <= 0.0 {
        return Err(AnimationError::NonPositiveDuration(duration));
    }
    let phase = elapsed.rem_euclid(duration) / duration;
    Ok(if phase >= 1.0 { 0.0 } else { phase })
}

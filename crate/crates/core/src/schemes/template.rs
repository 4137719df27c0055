use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::animation::{ChannelKind, EasingKind};
use crate::grouping::GroupingStrategy;
use crate::layout::Dimensions;

use super::expr::Expr;
use super::SchemeError;

pub const DIR_X: &str = "dir_x";
pub const DIR_Y: &str = "dir_y";

/// What a symbolic amplitude's base value is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeUnit {
    Px,
    Deg,
    Factor,
    /// Fraction of the canvas diagonal.
    Diagonal,
    /// Fraction of the canvas width.
    Width,
    /// Fraction of the canvas height.
    Height,
}

impl AmplitudeUnit {
    pub const ALL: [AmplitudeUnit; 6] = [
        AmplitudeUnit::Px,
        AmplitudeUnit::Deg,
        AmplitudeUnit::Factor,
        AmplitudeUnit::Diagonal,
        AmplitudeUnit::Width,
        AmplitudeUnit::Height,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AmplitudeUnit::Px => "px",
            AmplitudeUnit::Deg => "deg",
            AmplitudeUnit::Factor => "factor",
            AmplitudeUnit::Diagonal => "diagonal",
            AmplitudeUnit::Width => "width",
            AmplitudeUnit::Height => "height",
        }
    }

    pub fn resolve(self, base: f64, canvas: Dimensions) -> f64 {
        match self {
            AmplitudeUnit::Px | AmplitudeUnit::Deg | AmplitudeUnit::Factor => base,
            AmplitudeUnit::Diagonal => base * canvas.diagonal(),
            AmplitudeUnit::Width => base * canvas.width as f64,
            AmplitudeUnit::Height => base * canvas.height as f64,
        }
    }
}

impl fmt::Display for AmplitudeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AmplitudeUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AmplitudeUnit::ALL.into_iter().find(|u| u.name() == s).ok_or_else(|| format!("unknown unit {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Amplitude {
    pub name: String,
    pub base: f64,
    pub unit: AmplitudeUnit,
}

/// How a group's motion direction is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionRule {
    None,
    /// From the canvas center through the group centroid.
    Outward,
    /// Toward the canvas corner of the quadrant holding the group centroid.
    Corner,
}

impl DirectionRule {
    pub fn name(self) -> &'static str {
        match self {
            DirectionRule::None => "none",
            DirectionRule::Outward => "outward",
            DirectionRule::Corner => "corner",
        }
    }
}

impl FromStr for DirectionRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(DirectionRule::None),
            "outward" => Ok(DirectionRule::Outward),
            "corner" => Ok(DirectionRule::Corner),
            _ => Err(format!("unknown direction rule {s:?}")),
        }
    }
}

/// Per-group multiplier on one amplitude, drawn uniformly from `lo..hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorRule {
    pub amplitude: String,
    pub lo: f64,
    pub hi: f64,
    /// Also draw a random sign.
    pub signed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationRules {
    /// Largest start delay as a fraction of the loop; group `k` of `G` waits `delay * k / G`.
    pub delay: f64,
    pub direction: DirectionRule,
    /// Direction jitter in degrees at entropy 1.
    pub jitter_deg: f64,
    pub factors: Vec<FactorRule>,
}

impl Default for VariationRules {
    fn default() -> Self {
        Self { delay: 0.0, direction: DirectionRule::None, jitter_deg: 0.0, factors: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyframeTemplate {
    /// Position within one cycle, in `[0, 1]`.
    pub at: f64,
    pub value: Expr,
    pub easing: EasingKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTemplate {
    pub kind: ChannelKind,
    /// Repeated once per cycle; otherwise played once across the active window.
    pub repeat: bool,
    pub keyframes: Vec<KeyframeTemplate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeTemplate {
    pub id: String,
    pub emotion_label: String,
    pub strategy: GroupingStrategy,
    pub max_extra_cycles: u32,
    pub amplitudes: Vec<Amplitude>,
    pub variation: VariationRules,
    pub channels: Vec<ChannelTemplate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeSummary {
    pub id: String,
    pub emotion_label: String,
    pub strategy: GroupingStrategy,
}

impl SchemeTemplate {
    pub fn summary(&self) -> SchemeSummary {
        SchemeSummary {
            id: self.id.clone(),
            emotion_label: self.emotion_label.clone(),
            strategy: self.strategy,
        }
    }

    pub fn amplitude(&self, name: &str) -> Option<&Amplitude> {
        self.amplitudes.iter().find(|a| a.name == name)
    }

    pub fn factor(&self, name: &str) -> Option<&FactorRule> {
        self.variation.factors.iter().find(|f| f.amplitude == name)
    }

    /// Names of the parameters that differ between groups: `delay`,
    /// `direction` and every amplitude with a factor rule.
    pub fn varied_parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.variation.delay > 0.0 {
            out.push("delay".to_string());
        }
        if self.variation.direction != DirectionRule::None {
            out.push("direction".to_string());
        }
        out.extend(self.variation.factors.iter().map(|f| f.amplitude.clone()));
        out
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        let invalid = |message: String| Err(SchemeError::Validation { message, line: None });
        if self.id.is_empty() || !self.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return invalid(format!("scheme id {:?} must be non-empty [A-Za-z0-9_-]", self.id));
        }
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.name == DIR_X || a.name == DIR_Y {
                return invalid(format!("amplitude name {:?} is reserved", a.name));
            }
            if self.amplitudes[..i].iter().any(|b| b.name == a.name) {
                return invalid(format!("duplicate amplitude {:?}", a.name));
            }
            if !a.base.is_finite() || a.base < 0.0 {
                return invalid(format!("amplitude {:?} base must be a non-negative number", a.name));
            }
        }
        let v = &self.variation;
        if !(0.0..=1.0).contains(&v.delay) {
            return invalid(format!("delay {} outside [0, 1]", v.delay));
        }
        if !v.jitter_deg.is_finite() || v.jitter_deg < 0.0 {
            return invalid("jitter must be a non-negative number".into());
        }
        for (i, f) in v.factors.iter().enumerate() {
            if self.amplitude(&f.amplitude).is_none() {
                return invalid(format!("variation references undeclared amplitude {:?}", f.amplitude));
            }
            if v.factors[..i].iter().any(|g| g.amplitude == f.amplitude) {
                return invalid(format!("duplicate factor for {:?}", f.amplitude));
            }
            if !(f.lo.is_finite() && f.hi.is_finite() && 0.0 <= f.lo && f.lo <= f.hi) {
                return invalid(format!("factor range for {:?} must satisfy 0 <= lo <= hi", f.amplitude));
            }
        }
        if self.channels.is_empty() {
            return invalid("scheme declares no channels".into());
        }
        for (i, ch) in self.channels.iter().enumerate() {
            if self.channels[..i].iter().any(|c| c.kind == ch.kind) {
                return invalid(format!("duplicate channel {}", ch.kind));
            }
            self.validate_channel(ch)?;
        }
        Ok(())
    }

    fn validate_channel(&self, ch: &ChannelTemplate) -> Result<(), SchemeError> {
        let invalid = |message: String| {
            Err(SchemeError::Validation { message: format!("channel {}: {message}", ch.kind), line: None })
        };
        let Some(first) = ch.keyframes.first() else {
            return invalid("no keyframes".into());
        };
        if ch.keyframes.iter().any(|k| !(0.0..=1.0).contains(&k.at)) {
            return invalid("keyframe time outside [0, 1]".into());
        }
        if ch.keyframes.windows(2).any(|w| w[1].at <= w[0].at) {
            return invalid("keyframes not strictly increasing".into());
        }
        if first.at != 0.0 {
            return invalid("first keyframe must be at 0".into());
        }
        for k in &ch.keyframes {
            let mut vars = Vec::new();
            k.value.vars(&mut vars);
            for name in vars {
                let is_dir = name == DIR_X || name == DIR_Y;
                if is_dir && self.variation.direction == DirectionRule::None {
                    return invalid(format!("{name} needs a direction rule"));
                }
                if !is_dir && self.amplitude(&name).is_none() {
                    return invalid(format!("undeclared amplitude {name:?}"));
                }
            }
        }
        let rest = ch.kind.rest_value();
        let at_rest = |k: &KeyframeTemplate| {
            probe_envs()
                .iter()
                .all(|env| k.value.eval(&|n| env.lookup(self, n)).is_ok_and(|v| (v - rest).abs() < 1e-9))
        };
        if !at_rest(first) {
            return invalid("pose at 0 is not the rest pose".into());
        }
        if ch.repeat {
            let last = ch.keyframes.last().expect("non-empty");
            if last.at != 1.0 || !at_rest(last) {
                return invalid("repeating channel must end at rest at 1".into());
            }
        }
        Ok(())
    }
}

/// Two unrelated variable assignments: an expression that is at rest under both
/// does not depend on the amplitudes it mentions.
struct ProbeEnv {
    amp: f64,
    dir: (f64, f64),
}

fn probe_envs() -> [ProbeEnv; 2] {
    [ProbeEnv { amp: 1.0, dir: (0.6, 0.8) }, ProbeEnv { amp: 2.75, dir: (-0.8, 0.6) }]
}

impl ProbeEnv {
    fn lookup(&self, scheme: &SchemeTemplate, name: &str) -> Option<f64> {
        match name {
            DIR_X => Some(self.dir.0),
            DIR_Y => Some(self.dir.1),
            _ => scheme.amplitude(name).map(|a| self.amp * (1.0 + a.name.len() as f64)),
        }
    }
}

//! The four built-in emotion schemes. Every tunable constant sits in the
//! per-scheme tables at the top of each constructor.

use crate::animation::{ChannelKind, EasingKind};
use crate::grouping::GroupingStrategy;

use super::expr::Expr;
use super::template::{
    Amplitude, AmplitudeUnit, ChannelTemplate, DirectionRule, FactorRule, KeyframeTemplate, SchemeTemplate,
    VariationRules,
};

use AmplitudeUnit::*;
use ChannelKind::*;
use EasingKind::*;

fn amp(name: &str, base: f64, unit: AmplitudeUnit) -> Amplitude {
    Amplitude { name: name.to_string(), base, unit }
}

fn factor(name: &str, lo: f64, hi: f64, signed: bool) -> FactorRule {
    FactorRule { amplitude: name.to_string(), lo, hi, signed }
}

fn channel(kind: ChannelKind, repeat: bool, keys: &[(f64, &str, EasingKind)]) -> ChannelTemplate {
    let keyframes = keys
        .iter()
        .map(|&(at, src, easing)| KeyframeTemplate {
            at,
            value: Expr::parse(src).expect("built-in expression parses"),
            easing,
        })
        .collect();
    ChannelTemplate { kind, repeat, keyframes }
}

/// Words spread outward and back while rocking.
pub fn dance() -> SchemeTemplate {
    SchemeTemplate {
        id: "dance".into(),
        emotion_label: "happiness".into(),
        strategy: GroupingStrategy::Positional,
        max_extra_cycles: 2,
        amplitudes: vec![amp("distance", 0.06, Diagonal), amp("rotation", 8.0, Deg)],
        variation: VariationRules {
            delay: 0.0,
            direction: DirectionRule::Outward,
            jitter_deg: 15.0,
            factors: vec![factor("distance", 0.6, 1.0, false), factor("rotation", 0.6, 1.0, true)],
        },
        channels: vec![
            channel(
                TranslateX,
                true,
                &[(0.0, "0", SlowInOut), (0.5, "distance * dir_x", SlowInOut), (1.0, "0", SlowInOut)],
            ),
            channel(
                TranslateY,
                true,
                &[(0.0, "0", SlowInOut), (0.5, "distance * dir_y", SlowInOut), (1.0, "0", SlowInOut)],
            ),
            channel(
                Rotation,
                true,
                &[
                    (0.0, "0", SlowInOut),
                    (0.25, "rotation", SlowInOut),
                    (0.75, "-rotation", SlowInOut),
                    (1.0, "0", SlowInOut),
                ],
            ),
        ],
    }
}

/// Words darken, sink, blur and fade, then hold invisible until the loop restarts.
pub fn fade() -> SchemeTemplate {
    SchemeTemplate {
        id: "fade".into(),
        emotion_label: "sadness".into(),
        strategy: GroupingStrategy::Random,
        max_extra_cycles: 0,
        amplitudes: vec![amp("drop", 0.05, Height), amp("blur", 4.0, Px)],
        variation: VariationRules { delay: 0.4, ..VariationRules::default() },
        channels: vec![
            channel(ColorShift, false, &[(0.0, "0", SlowOut), (0.4, "1", Linear), (1.0, "1", Linear)]),
            channel(TranslateY, false, &[(0.0, "0", SlowOut), (0.9, "drop", Linear), (1.0, "drop", Linear)]),
            channel(Blur, false, &[(0.0, "0", SlowOut), (0.9, "blur", Linear), (1.0, "blur", Linear)]),
            channel(
                Opacity,
                false,
                &[(0.0, "1", Linear), (0.3, "1", SlowOut), (0.9, "0", Linear), (1.0, "0", Linear)],
            ),
        ],
    }
}

/// Words pop toward the corners with an overshooting burst, then settle back.
pub fn explosion() -> SchemeTemplate {
    SchemeTemplate {
        id: "explosion".into(),
        emotion_label: "anger".into(),
        strategy: GroupingStrategy::Positional,
        max_extra_cycles: 1,
        amplitudes: vec![amp("distance", 0.12, Diagonal), amp("growth", 0.4, Factor)],
        variation: VariationRules {
            delay: 0.4,
            direction: DirectionRule::Corner,
            jitter_deg: 15.0,
            factors: vec![factor("distance", 0.6, 1.0, false)],
        },
        channels: vec![
            channel(Scale, true, &[(0.0, "1", Bump), (0.35, "1 + growth", SlowInOut), (1.0, "1", Linear)]),
            channel(
                TranslateX,
                true,
                &[(0.0, "0", Bump), (0.35, "distance * dir_x", SlowInOut), (1.0, "0", Linear)],
            ),
            channel(
                TranslateY,
                true,
                &[(0.0, "0", Bump), (0.35, "distance * dir_y", SlowInOut), (1.0, "0", Linear)],
            ),
        ],
    }
}

/// Words tremble left and right while sinking a little and recovering.
pub fn shiver() -> SchemeTemplate {
    SchemeTemplate {
        id: "shiver".into(),
        emotion_label: "fear".into(),
        strategy: GroupingStrategy::Random,
        max_extra_cycles: 4,
        amplitudes: vec![amp("rotation", 4.0, Deg), amp("drop", 0.03, Height)],
        variation: VariationRules {
            delay: 0.4,
            direction: DirectionRule::None,
            jitter_deg: 0.0,
            factors: vec![factor("rotation", 0.6, 1.0, true), factor("drop", 0.6, 1.0, false)],
        },
        channels: vec![
            channel(
                Rotation,
                true,
                &[
                    (0.0, "0", Linear),
                    (0.125, "rotation", Linear),
                    (0.375, "-rotation", Linear),
                    (0.625, "rotation", Linear),
                    (0.875, "-rotation", Linear),
                    (1.0, "0", Linear),
                ],
            ),
            channel(
                TranslateY,
                false,
                &[(0.0, "0", SlowInOut), (0.7, "drop", SlowInOut), (1.0, "0", Linear)],
            ),
        ],
    }
}

pub fn builtins() -> Vec<SchemeTemplate> {
    vec![dance(), fade(), explosion(), shiver()]
}

//! The animation descriptor: fully resolved per-word timelines plus the layout
//! they animate, and its canonical JSON document form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::animation::{sample_timeline, Channel, ChannelKind, Keyframe, PropertyState, Timeline};
use crate::grouping::GroupAssignment;
use crate::layout::{Dimensions, WordleLayout};
use crate::schemes::EmordleSpec;

pub const FORMAT_VERSION: u32 = 1;

/// Variation drawn for one group, before the per-word readability clamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupParams {
    /// Start delay as a fraction of the loop.
    pub delay: f64,
    /// Unit motion direction, when the scheme has a direction rule.
    pub direction: Option<[f64; 2]>,
    /// Resolved amplitude values for this group, in channel units.
    pub amplitudes: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordAnimation {
    pub text: String,
    pub group: usize,
    /// Factor in `[0, 1]` applied to geometric motion to keep the word clear of its neighbours.
    pub clamp: f64,
    pub timeline: Timeline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnimationDescriptor {
    pub scheme_id: String,
    pub emotion_label: String,
    /// The spec after clamping.
    pub spec: EmordleSpec,
    /// Loop duration in seconds.
    pub duration: f64,
    pub cycles: u32,
    /// Entropy-scaled amplitude envelope shared by all groups.
    pub amplitudes: BTreeMap<String, f64>,
    pub groups: GroupAssignment,
    pub group_params: Vec<GroupParams>,
    pub words: Vec<WordAnimation>,
}

impl AnimationDescriptor {
    pub fn sample(&self, word: usize, t: f64) -> PropertyState {
        sample_timeline(&self.words[word].timeline, t)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DescriptorError {
    #[error("schema error at {path}: {message}")]
    SchemaError { path: String, message: String },
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> DescriptorError {
    DescriptorError::SchemaError { path: path.into(), message: message.into() }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupsDoc {
    count: usize,
    group_of: Vec<usize>,
    params: Vec<GroupParams>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WordDoc {
    text: String,
    group: usize,
    clamp: f64,
    channels: BTreeMap<String, Vec<Keyframe>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format_version: u32,
    scheme_id: String,
    emotion_label: String,
    spec: EmordleSpec,
    duration: f64,
    cycles: u32,
    amplitudes: BTreeMap<String, f64>,
    groups: GroupsDoc,
    layout: WordleLayout,
    words: Vec<WordDoc>,
}

/// Canonical pretty-printed JSON: fixed field order, channels sorted by name.
pub fn export_descriptor(desc: &AnimationDescriptor, layout: &WordleLayout) -> Vec<u8> {
    let doc = Document {
        format_version: FORMAT_VERSION,
        scheme_id: desc.scheme_id.clone(),
        emotion_label: desc.emotion_label.clone(),
        spec: desc.spec.clone(),
        duration: desc.duration,
        cycles: desc.cycles,
        amplitudes: desc.amplitudes.clone(),
        groups: GroupsDoc {
            count: desc.groups.group_count,
            group_of: desc.groups.group_of.clone(),
            params: desc.group_params.clone(),
        },
        layout: layout.clone(),
        words: desc
            .words
            .iter()
            .map(|w| WordDoc {
                text: w.text.clone(),
                group: w.group,
                clamp: w.clamp,
                channels: w
                    .timeline
                    .channels()
                    .map(|c| (c.kind().to_string(), c.keyframes().to_vec()))
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("descriptor serializes");
    out.push(b'\n');
    out
}

/// Turns a serde failure into a path; a missing field is reported at the field itself.
fn path_error(err: serde_path_to_error::Error<serde_json::Error>) -> DescriptorError {
    let mut path = err.path().to_string();
    let message = err.inner().to_string();
    if let Some(field) = message.strip_prefix("missing field `").and_then(|r| r.split('`').next()) {
        path = if path == "." { field.to_string() } else { format!("{path}.{field}") };
    }
    schema(path, message)
}

pub fn import_descriptor(bytes: &[u8]) -> Result<(AnimationDescriptor, WordleLayout), DescriptorError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let doc: Document = serde_path_to_error::deserialize(de).map_err(path_error)?;

    if doc.format_version != FORMAT_VERSION {
        return Err(schema("format_version", format!("unsupported version {}", doc.format_version)));
    }
    if !(doc.duration.is_finite() && doc.duration > 0.0) {
        return Err(schema("duration", "must be a positive number of seconds"));
    }
    if doc.cycles == 0 {
        return Err(schema("cycles", "must be at least 1"));
    }
    Dimensions::new(doc.layout.canvas.width, doc.layout.canvas.height)
        .map_err(|e| schema("layout.canvas", e.to_string()))?;
    let n = doc.layout.words.len();
    if doc.words.len() != n {
        return Err(schema("words", format!("{} words for a layout of {n}", doc.words.len())));
    }
    let g = &doc.groups;
    if g.count == 0 || g.count > n.max(1) {
        return Err(schema("groups.count", format!("{} outside [1, {n}]", g.count)));
    }
    if g.group_of.len() != n {
        return Err(schema("groups.group_of", format!("expected {n} entries, got {}", g.group_of.len())));
    }
    if let Some(i) = g.group_of.iter().position(|&k| k >= g.count) {
        return Err(schema(format!("groups.group_of[{i}]"), "group index out of range"));
    }
    if g.params.len() != g.count {
        return Err(schema("groups.params", format!("expected {} entries, got {}", g.count, g.params.len())));
    }

    let mut words = Vec::with_capacity(n);
    for (i, w) in doc.words.into_iter().enumerate() {
        if w.group != g.group_of[i] {
            return Err(schema(format!("words[{i}].group"), "disagrees with groups.group_of"));
        }
        if !(0.0..=1.0).contains(&w.clamp) {
            return Err(schema(format!("words[{i}].clamp"), "must lie in [0, 1]"));
        }
        let mut timeline = Timeline::new();
        for (name, keyframes) in w.channels {
            let kind: ChannelKind =
                name.parse().map_err(|e: String| schema(format!("words[{i}].channels.{name}"), e))?;
            let ch = Channel::new(kind, keyframes)
                .map_err(|e| schema(format!("words[{i}].channels.{kind}"), e.to_string()))?;
            timeline.insert(ch).map_err(|e| schema(format!("words[{i}].channels"), e.to_string()))?;
        }
        words.push(WordAnimation { text: w.text, group: w.group, clamp: w.clamp, timeline });
    }

    let desc = AnimationDescriptor {
        scheme_id: doc.scheme_id,
        emotion_label: doc.emotion_label,
        spec: doc.spec,
        duration: doc.duration,
        cycles: doc.cycles,
        amplitudes: doc.amplitudes,
        groups: GroupAssignment { group_count: g.count, group_of: g.group_of.clone() },
        group_params: doc.groups.params,
        words,
    };
    Ok((desc, doc.layout))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
      "format_version": 1,
      "scheme_id": "custom",
      "emotion_label": "calm",
      "spec": {"scheme_id": "custom", "entropy": 0.5, "speed": 0.5, "seed": 1,
               "style": {"palette": "classic", "typeface": "sans"}},
      "duration": 2.0,
      "cycles": 1,
      "amplitudes": {},
      "groups": {"count": 1, "group_of": [0], "params": [{"delay": 0.0, "direction": null, "amplitudes": {}}]},
      "layout": {
        "canvas": {"width": 200, "height": 100}, "seed": 1, "padding_factor": 1.3, "typeface": "sans",
        "min_font": 14, "max_font": 64,
        "words": [{"text": "hi", "weight": 1.0, "anchor": {"x": 100.0, "y": 50.0}, "font_size": 40,
                   "base_rotation": 0.0,
                   "bbox": {"x0": 80.0, "y0": 35.0, "x1": 120.0, "y1": 65.0},
                   "text_box": {"x0": 85.0, "y0": 39.0, "x1": 115.0, "y1": 61.0}}]
      },
      "words": [{"text": "hi", "group": 0, "clamp": 1.0,
                 "channels": {"opacity": [{"t": 0.0, "value": 1.0, "easing": "linear"},
                                          {"t": 1.0, "value": 0.0, "easing": "linear"}]}}]
    }"#;

    #[test]
    fn minimal_imports_and_round_trips() {
        let (desc, layout) = import_descriptor(MINIMAL.as_bytes()).unwrap();
        assert_eq!(desc.words.len(), 1);
        assert!((desc.sample(0, 0.25).get(ChannelKind::Opacity) - 0.75).abs() < 1e-12);
        let bytes = export_descriptor(&desc, &layout);
        let (again, layout2) = import_descriptor(&bytes).unwrap();
        assert_eq!(again, desc);
        assert_eq!(layout2, layout);
        assert_eq!(export_descriptor(&again, &layout2), bytes);
    }

    fn error_path(text: &str) -> String {
        match import_descriptor(text.as_bytes()) {
            Err(DescriptorError::SchemaError { path, .. }) => path,
            Ok(_) => panic!("accepted"),
        }
    }

    #[test]
    fn missing_duration_names_the_field() {
        let text = MINIMAL.replace("\"duration\": 2.0,", "");
        assert_eq!(error_path(&text), "duration");
    }

    #[test]
    fn nested_errors_name_their_path() {
        let text = MINIMAL.replacen("\"easing\": \"linear\"", "\"easing\": \"wobbly\"", 1);
        assert_eq!(error_path(&text), "words[0].channels.opacity[0].easing");
        let text = MINIMAL.replace("\"font_size\": 40,", "");
        assert_eq!(error_path(&text), "layout.words[0].font_size");
        let text = MINIMAL.replace("\"t\": 1.0", "\"t\": 0.0");
        assert_eq!(error_path(&text), "words[0].channels.opacity");
        let text = MINIMAL.replace("\"group_of\": [0]", "\"group_of\": [3]");
        assert_eq!(error_path(&text), "groups.group_of[0]");
        let text = MINIMAL.replace("\"format_version\": 1", "\"format_version\": 9");
        assert_eq!(error_path(&text), "format_version");
        assert_eq!(error_path("[]"), ".");
    }
}

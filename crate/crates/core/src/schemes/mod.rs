//! Emotion schemes: templates of symbolic keyframes, the built-in set, the
//! `.scheme` file format and the composer that resolves a template into an
//! [`AnimationDescriptor`](crate::descriptor::AnimationDescriptor).

mod builtin;
mod compose;
mod expr;
mod parse;
mod template;

use std::path::Path;

use thiserror::Error;

use crate::animation::AnimationError;
use crate::grouping::GroupingError;

pub use builtin::{builtins, dance, explosion, fade, shiver};
pub use compose::{
    amplitude_for_entropy, cycles_for_speed, duration_for_speed, free_margins, instantiate_scheme,
    ClampWarning, EmordleSpec, StyleSpec, DEFAULT_PALETTE,
};
pub use expr::{Expr, ExprError};
pub use parse::{parse_scheme_file, write_scheme_file};
pub use template::{
    Amplitude, AmplitudeUnit, ChannelTemplate, DirectionRule, FactorRule, KeyframeTemplate, SchemeSummary,
    SchemeTemplate, VariationRules,
};

fn line_suffix(line: &Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
    #[error("scheme {0:?} is already registered")]
    DuplicateScheme(String),
    #[error("spec names scheme {spec:?} but the template is {template:?}")]
    SchemeMismatch { spec: String, template: String },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid scheme: {message}{}", line_suffix(.line))]
    Validation { message: String, line: Option<usize> },
    #[error("cannot read scheme file {path}: {reason}")]
    Io { path: String, reason: String },
    #[error(transparent)]
    Grouping(#[from] GroupingError),
    #[error(transparent)]
    Animation(#[from] AnimationError),
}

/// Built-in schemes followed by user schemes in load order.
#[derive(Debug, Clone)]
pub struct SchemeRegistry {
    schemes: Vec<SchemeTemplate>,
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        Self { schemes: builtins() }
    }
}

impl SchemeRegistry {
    pub fn register(&mut self, template: SchemeTemplate) -> Result<(), SchemeError> {
        template.validate()?;
        if self.schemes.iter().any(|s| s.id == template.id) {
            return Err(SchemeError::DuplicateScheme(template.id));
        }
        self.schemes.push(template);
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<&SchemeTemplate, SchemeError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SchemeError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        self.register(parse_scheme_file(&text)?)?;
        Ok(self.schemes.last().expect("just registered"))
    }

    pub fn get(&self, id: &str) -> Result<&SchemeTemplate, SchemeError> {
        self.schemes.iter().find(|s| s.id == id).ok_or_else(|| SchemeError::UnknownScheme(id.to_string()))
    }

    pub fn list(&self) -> Vec<SchemeSummary> {
        self.schemes.iter().map(SchemeTemplate::summary).collect()
    }

    pub fn templates(&self) -> &[SchemeTemplate] {
        &self.schemes
    }
}

/// Summaries of the built-in schemes.
pub fn list_schemes() -> Vec<SchemeSummary> {
    SchemeRegistry::default().list()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_builtins_then_user_schemes() {
        let ids: Vec<(String, String)> =
            list_schemes().into_iter().map(|s| (s.id, s.emotion_label)).collect();
        let want = [("dance", "happiness"), ("fade", "sadness"), ("explosion", "anger"), ("shiver", "fear")];
        assert_eq!(ids, want.map(|(a, b)| (a.to_string(), b.to_string())));

        let mut reg = SchemeRegistry::default();
        let mut custom = dance();
        custom.id = "sway".into();
        custom.emotion_label = "contentment".into();
        reg.register(custom).unwrap();
        assert_eq!(reg.list().len(), 5);
        assert_eq!(reg.list()[4].id, "sway");
        assert!(matches!(reg.register(fade()), Err(SchemeError::DuplicateScheme(_))));
        assert!(matches!(reg.get("wiggle"), Err(SchemeError::UnknownScheme(_))));
    }
}

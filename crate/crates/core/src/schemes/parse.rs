//! Reader and writer for the `.scheme` text format.
//!
//! The format is a line-oriented key-value tree:
//!
//! ```text
//! file   := item*
//! item   := entry | block
//! entry  := KEY '=' VALUE NEWLINE
//! block  := NAME [LABEL] '{' NEWLINE item* '}' NEWLINE
//! ```
//!
//! `#` starts a comment that runs to the end of the line. The grammar is
//! documented in full, with the meaning of every section, in
//! `docs/scheme-format.md`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::animation::{ChannelKind, EasingKind};
use crate::grouping::GroupingStrategy;

use super::expr::Expr;
use super::template::{
    Amplitude, ChannelTemplate, DirectionRule, FactorRule, KeyframeTemplate, SchemeTemplate, VariationRules,
};
use super::SchemeError;

#[derive(Debug)]
enum Node {
    Entry { key: String, value: String, line: usize, value_col: usize },
    Block { name: String, label: Option<String>, items: Vec<Node>, line: usize },
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> SchemeError {
    SchemeError::Syntax { line, column, message: message.into() }
}

fn invalid(line: usize, message: impl Into<String>) -> SchemeError {
    SchemeError::Validation { message: message.into(), line: Some(line) }
}

fn is_word(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// 1-based column of byte offset `at` in `line`.
fn column(line: &str, at: usize) -> usize {
    line[..at].chars().count() + 1
}

/// Name, label, line and column of an open block.
type OpenBlock = (String, Option<String>, usize, usize);

fn parse_tree(text: &str) -> Result<Vec<Node>, SchemeError> {
    // stack of open blocks; the bottom frame is the file itself
    let mut stack: Vec<(Option<OpenBlock>, Vec<Node>)> = vec![(None, Vec::new())];
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or_default();
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let start = line.len() - line.trim_start().len();
        if trimmed == "}" {
            if stack.len() == 1 {
                return Err(syntax(line_no, column(line, start), "unmatched '}'"));
            }
            let (head, items) = stack.pop().expect("non-empty stack");
            let (name, label, line, _) = head.expect("inner frame has a head");
            stack.last_mut().expect("parent").1.push(Node::Block { name, label, items, line });
        } else if let Some(head) = trimmed.strip_suffix('{') {
            let words: Vec<&str> = head.split_whitespace().collect();
            if words.is_empty() || words.len() > 2 {
                return Err(syntax(line_no, column(line, start), "expected `name [label] {`"));
            }
            if let Some(bad) = words.iter().find(|w| !is_word(w)) {
                let at = line.find(bad).unwrap_or(start);
                return Err(syntax(line_no, column(line, at), format!("invalid name {bad:?}")));
            }
            let label = words.get(1).map(|s| s.to_string());
            stack.push((Some((words[0].to_string(), label, line_no, column(line, start))), Vec::new()));
        } else if let Some(eq) = line.find('=') {
            let key = line[..eq].trim();
            if !is_word(key) {
                return Err(syntax(line_no, column(line, start), format!("invalid key {key:?}")));
            }
            let value_raw = &line[eq + 1..];
            let value = value_raw.trim();
            if value.is_empty() {
                return Err(syntax(line_no, column(line, eq + 1), format!("missing value for {key:?}")));
            }
            let value_at = eq + 1 + (value_raw.len() - value_raw.trim_start().len());
            stack.last_mut().expect("frame").1.push(Node::Entry {
                key: key.to_string(),
                value: value.to_string(),
                line: line_no,
                value_col: column(line, value_at),
            });
        } else {
            return Err(syntax(line_no, column(line, start), "expected `key = value`, `name {` or `}`"));
        }
    }
    if stack.len() > 1 {
        let (head, _) = stack.pop().expect("frame");
        let (name, _, line, col) = head.expect("head");
        return Err(syntax(
            last_line.max(line),
            col,
            format!("block {name:?} opened on line {line} is not closed"),
        ));
    }
    Ok(stack.pop().expect("root").1)
}

/// Entries of one block, consumed by key; leftovers are reported as unknown.
struct Section<'a> {
    name: &'a str,
    line: usize,
    entries: Vec<(&'a str, &'a str, usize, usize)>,
    blocks: Vec<&'a Node>,
}

impl<'a> Section<'a> {
    fn new(name: &'a str, line: usize, items: &'a [Node]) -> Self {
        let mut entries = Vec::new();
        let mut blocks = Vec::new();
        for item in items {
            match item {
                Node::Entry { key, value, line, value_col } => {
                    entries.push((key.as_str(), value.as_str(), *line, *value_col))
                }
                Node::Block { .. } => blocks.push(item),
            }
        }
        Self { name, line, entries, blocks }
    }

    fn take(&mut self, key: &str) -> Result<Option<(&'a str, usize, usize)>, SchemeError> {
        let mut found = None;
        let mut i = 0;
        while i < self.entries.len() {
            if self.entries[i].0 == key {
                let (_, v, line, col) = self.entries.remove(i);
                if found.is_some() {
                    return Err(invalid(line, format!("duplicate key {key:?} in {}", self.name)));
                }
                found = Some((v, line, col));
            } else {
                i += 1;
            }
        }
        Ok(found)
    }

    fn require(&mut self, key: &str) -> Result<(&'a str, usize, usize), SchemeError> {
        self.take(key)?.ok_or_else(|| invalid(self.line, format!("{} is missing key {key:?}", self.name)))
    }

    fn finish(self) -> Result<(), SchemeError> {
        if let Some((key, _, line, _)) = self.entries.first() {
            return Err(invalid(*line, format!("unknown key {key:?} in {}", self.name)));
        }
        if let Some(Node::Block { name, line, .. }) = self.blocks.first() {
            return Err(invalid(*line, format!("unexpected block {name:?} in {}", self.name)));
        }
        Ok(())
    }
}

fn parse_value<T: FromStr>(value: &str, line: usize, col: usize, what: &str) -> Result<T, SchemeError> {
    value.parse().map_err(|_| syntax(line, col, format!("invalid {what} {value:?}")))
}

fn parse_number(value: &str, line: usize, col: usize) -> Result<f64, SchemeError> {
    let v: f64 = parse_value(value, line, col, "number")?;
    if !v.is_finite() {
        return Err(syntax(line, col, format!("invalid number {value:?}")));
    }
    Ok(v)
}

fn parse_bool(value: &str, line: usize, col: usize) -> Result<bool, SchemeError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(syntax(line, col, format!("expected true or false, got {value:?}"))),
    }
}

fn parse_expr(value: &str, line: usize, col: usize) -> Result<Expr, SchemeError> {
    Expr::parse(value).map_err(|e| syntax(line, col + e.offset, e.message))
}

/// Parses and validates a scheme file.
pub fn parse_scheme_file(text: &str) -> Result<SchemeTemplate, SchemeError> {
    let tree = parse_tree(text)?;
    let mut root = Section::new("file", 1, &tree);
    if let Some((key, _, line, _)) = root.entries.first() {
        return Err(invalid(*line, format!("unexpected top-level entry {key:?}")));
    }

    let mut meta: Option<(String, String, GroupingStrategy, u32)> = None;
    let mut amplitudes: Option<Vec<Amplitude>> = None;
    let mut variation: Option<VariationRules> = None;
    let mut channels = Vec::new();
    let mut template_lines = Vec::new();

    for node in std::mem::take(&mut root.blocks) {
        let Node::Block { name, label, items, line, .. } = node else { unreachable!() };
        let line = *line;
        let no_label = || match label {
            Some(l) => Err(invalid(line, format!("block {name:?} takes no label, got {l:?}"))),
            None => Ok(()),
        };
        let once =
            |seen: bool| if seen { Err(invalid(line, format!("duplicate {name:?} block"))) } else { Ok(()) };
        match name.as_str() {
            "scheme" => {
                no_label()?;
                once(meta.is_some())?;
                let mut s = Section::new("scheme", line, items);
                let id = s.require("id")?.0.to_string();
                let emotion = s.require("emotion")?.0.to_string();
                let (g, gl, gc) = s.require("grouping")?;
                let strategy = parse_value(g, gl, gc, "grouping strategy")?;
                let extra = match s.take("max_extra_cycles")? {
                    Some((v, l, c)) => parse_value(v, l, c, "cycle count")?,
                    None => 0,
                };
                s.finish()?;
                meta = Some((id, emotion, strategy, extra));
            }
            "amplitudes" => {
                no_label()?;
                once(amplitudes.is_some())?;
                let s = Section::new("amplitudes", line, items);
                let mut out = Vec::new();
                for &(key, value, l, c) in &s.entries {
                    let mut parts = value.split_whitespace();
                    let (Some(base), Some(unit), None) = (parts.next(), parts.next(), parts.next()) else {
                        return Err(syntax(l, c, "expected `<base> <unit>`"));
                    };
                    let unit_col = c + value.find(unit).unwrap_or(0);
                    out.push(Amplitude {
                        name: key.to_string(),
                        base: parse_number(base, l, c)?,
                        unit: parse_value(unit, l, unit_col, "unit")?,
                    });
                }
                if let Some(Node::Block { name, line, .. }) = s.blocks.first() {
                    return Err(invalid(*line, format!("unexpected block {name:?} in amplitudes")));
                }
                amplitudes = Some(out);
            }
            "variation" => {
                no_label()?;
                once(variation.is_some())?;
                let mut s = Section::new("variation", line, items);
                let mut rules = VariationRules::default();
                if let Some((v, l, c)) = s.take("delay")? {
                    rules.delay = parse_number(v, l, c)?;
                }
                if let Some((v, l, c)) = s.take("direction")? {
                    rules.direction = parse_value::<DirectionRule>(v, l, c, "direction rule")?;
                }
                if let Some((v, l, c)) = s.take("jitter")? {
                    rules.jitter_deg = parse_number(v, l, c)?;
                }
                let blocks = std::mem::take(&mut s.blocks);
                s.finish()?;
                for b in blocks {
                    let Node::Block { name, items, line, .. } = b else { unreachable!() };
                    if name != "factors" {
                        return Err(invalid(*line, format!("unexpected block {name:?} in variation")));
                    }
                    for item in items {
                        let Node::Entry { key, value, line, value_col } = item else {
                            return Err(invalid(*line, "factors holds only entries"));
                        };
                        rules.factors.push(parse_factor(key, value, *line, *value_col)?);
                    }
                }
                variation = Some(rules);
            }
            "channel" => {
                let Some(kind_name) = label else {
                    return Err(invalid(line, "channel block needs a kind, e.g. `channel rotation {`"));
                };
                let kind = ChannelKind::from_str(kind_name)
                    .map_err(|_| invalid(line, format!("unknown channel kind {kind_name:?}")))?;
                let mut s = Section::new("channel", line, items);
                let repeat = match s.take("repeat")? {
                    Some((v, l, c)) => parse_bool(v, l, c)?,
                    None => false,
                };
                let blocks = std::mem::take(&mut s.blocks);
                s.finish()?;
                let mut keyframes = None;
                for b in blocks {
                    let Node::Block { name, items, line, .. } = b else { unreachable!() };
                    if name != "keyframes" || keyframes.is_some() {
                        return Err(invalid(*line, format!("unexpected block {name:?} in channel")));
                    }
                    let mut keys = Vec::new();
                    for item in items {
                        let Node::Entry { key, value, line, value_col } = item else {
                            return Err(invalid(*line, "keyframes holds only entries"));
                        };
                        keys.push(parse_keyframe(key, value, *line, *value_col)?);
                    }
                    keyframes = Some(keys);
                }
                let keyframes =
                    keyframes.ok_or_else(|| invalid(line, format!("channel {kind} has no keyframes")))?;
                template_lines.push(line);
                channels.push(ChannelTemplate { kind, repeat, keyframes });
            }
            other => return Err(invalid(line, format!("unknown section {other:?}"))),
        }
    }

    let (id, emotion_label, strategy, max_extra_cycles) =
        meta.ok_or_else(|| invalid(1, "missing `scheme` block"))?;
    let template = SchemeTemplate {
        id,
        emotion_label,
        strategy,
        max_extra_cycles,
        amplitudes: amplitudes.unwrap_or_default(),
        variation: variation.unwrap_or_default(),
        channels,
    };
    template.validate().map_err(|e| match e {
        SchemeError::Validation { message, line: None } => {
            // point channel problems at their block
            let line = template
                .channels
                .iter()
                .zip(&template_lines)
                .find(|(c, _)| message.starts_with(&format!("channel {}:", c.kind)))
                .map(|(_, &l)| l);
            SchemeError::Validation { message, line }
        }
        other => other,
    })?;
    Ok(template)
}

fn parse_factor(key: &str, value: &str, line: usize, col: usize) -> Result<FactorRule, SchemeError> {
    let (range, signed) = match value.strip_suffix("signed") {
        Some(rest) => (rest.trim_end(), true),
        None => (value, false),
    };
    let Some((lo, hi)) = range.split_once("..") else {
        return Err(syntax(line, col, "expected `<lo> .. <hi> [signed]`"));
    };
    Ok(FactorRule {
        amplitude: key.to_string(),
        lo: parse_number(lo.trim(), line, col)?,
        hi: parse_number(hi.trim(), line, col)?,
        signed,
    })
}

fn parse_keyframe(key: &str, value: &str, line: usize, col: usize) -> Result<KeyframeTemplate, SchemeError> {
    let at = parse_number(key, line, 1)?;
    let (expr_src, easing) = match value.rsplit_once(',') {
        Some((e, name)) => {
            let name = name.trim();
            let easing_col = col + value.rfind(name).unwrap_or(0);
            (e, parse_value::<EasingKind>(name, line, easing_col, "easing")?)
        }
        None => (value, EasingKind::Linear),
    };
    let lead = expr_src.len() - expr_src.trim_start().len();
    Ok(KeyframeTemplate { at, value: parse_expr(expr_src.trim(), line, col + lead)?, easing })
}

/// Writes a template in the `.scheme` format; `parse_scheme_file` reads it back unchanged.
pub fn write_scheme_file(t: &SchemeTemplate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scheme {{");
    let _ = writeln!(out, "  id = {}", t.id);
    let _ = writeln!(out, "  emotion = {}", t.emotion_label);
    let _ = writeln!(out, "  grouping = {}", t.strategy);
    let _ = writeln!(out, "  max_extra_cycles = {}", t.max_extra_cycles);
    let _ = writeln!(out, "}}\n\namplitudes {{");
    for a in &t.amplitudes {
        let _ = writeln!(out, "  {} = {} {}", a.name, a.base, a.unit);
    }
    let v = &t.variation;
    let _ = writeln!(out, "}}\n\nvariation {{");
    let _ = writeln!(out, "  delay = {}", v.delay);
    let _ = writeln!(out, "  direction = {}", v.direction.name());
    let _ = writeln!(out, "  jitter = {}", v.jitter_deg);
    if !v.factors.is_empty() {
        let _ = writeln!(out, "  factors {{");
        for f in &v.factors {
            let signed = if f.signed { " signed" } else { "" };
            let _ = writeln!(out, "    {} = {} .. {}{signed}", f.amplitude, f.lo, f.hi);
        }
        let _ = writeln!(out, "  }}");
    }
    let _ = writeln!(out, "}}");
    for c in &t.channels {
        let _ = writeln!(out, "\nchannel {} {{", c.kind);
        let _ = writeln!(out, "  repeat = {}", c.repeat);
        let _ = writeln!(out, "  keyframes {{");
        for k in &c.keyframes {
            let _ = writeln!(out, "    {} = {}, {}", k.at, k.value, k.easing.name());
        }
        let _ = writeln!(out, "  }}\n}}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::builtin;

    const SHIPPED: [(&str, &str); 4] = [
        ("dance", include_str!("../../schemes/dance.scheme")),
        ("fade", include_str!("../../schemes/fade.scheme")),
        ("explosion", include_str!("../../schemes/explosion.scheme")),
        ("shiver", include_str!("../../schemes/shiver.scheme")),
    ];

    #[test]
    fn shipped_files_equal_builtins() {
        for ((id, text), builtin) in SHIPPED.iter().zip(builtin::builtins()) {
            let parsed = parse_scheme_file(text).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(parsed, builtin, "{id}");
        }
    }

    #[test]
    fn writer_round_trips() {
        for b in builtin::builtins() {
            assert_eq!(parse_scheme_file(&write_scheme_file(&b)).unwrap(), b);
        }
    }

    fn minimal(channel: &str) -> String {
        format!("scheme {{\n  id = x\n  emotion = joy\n  grouping = random\n}}\namplitudes {{\n  lift = 5 px\n}}\n{channel}")
    }

    fn validation_message(text: &str) -> String {
        match parse_scheme_file(text) {
            Err(SchemeError::Validation { message, .. }) => message,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_file_parses() {
        let t = parse_scheme_file(&minimal(
            "channel translate_y {\n  keyframes {\n    0 = 0, slow_out\n    1 = -lift\n  }\n}\n",
        ))
        .unwrap();
        assert_eq!(t.channels[0].keyframes[1].easing, EasingKind::Linear);
        assert_eq!(t.max_extra_cycles, 0);
    }

    #[test]
    fn rejects_out_of_order_keyframes() {
        let msg = validation_message(&minimal(
            "channel rotation {\n  keyframes {\n    0 = 0, linear\n    0.6 = lift, linear\n    0.3 = 0, linear\n  }\n}\n",
        ));
        assert!(msg.contains("keyframes not strictly increasing"), "{msg}");
    }

    #[test]
    fn rejects_unknown_channel() {
        let msg = validation_message(&minimal("channel wiggle {\n  keyframes {\n    0 = 0\n  }\n}\n"));
        assert!(msg.contains("unknown channel kind"), "{msg}");
    }

    #[test]
    fn rejects_non_rest_start() {
        let msg = validation_message(&minimal("channel scale {\n  keyframes {\n    0 = 1 + lift\n  }\n}\n"));
        assert!(msg.contains("rest"), "{msg}");
        // an expression that cancels out is still at rest
        parse_scheme_file(&minimal("channel scale {\n  keyframes {\n    0 = 1 + lift - lift\n  }\n}\n"))
            .unwrap();
    }

    #[test]
    fn rejects_undeclared_amplitude() {
        let msg =
            validation_message(&minimal("channel blur {\n  keyframes {\n    0 = 0\n    1 = haze\n  }\n}\n"));
        assert!(msg.contains("undeclared amplitude"), "{msg}");
        let msg = validation_message(&format!(
            "{}variation {{\n  factors {{\n    haze = 0 .. 1\n  }}\n}}\n",
            minimal("channel blur {\n  keyframes {\n    0 = 0\n  }\n}\n")
        ));
        assert!(msg.contains("undeclared amplitude"), "{msg}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_scheme_file("scheme {\n  id = x\n  what is this\n}\n").unwrap_err();
        assert!(matches!(err, SchemeError::Syntax { line: 3, column: 3, .. }), "{err:?}");
        let err = parse_scheme_file("scheme {\n  id = x\n").unwrap_err();
        assert!(matches!(err, SchemeError::Syntax { .. }), "{err:?}");
        let err = parse_scheme_file("}\n").unwrap_err();
        assert!(matches!(err, SchemeError::Syntax { line: 1, column: 1, .. }), "{err:?}");
        let err = parse_scheme_file(&minimal("channel blur {\n  keyframes {\n    0 = 0 +, linear\n  }\n}\n"))
            .unwrap_err();
        assert!(matches!(err, SchemeError::Syntax { line: 11, column: 12, .. }), "{err:?}");
        let err = parse_scheme_file(&minimal("channel blur {\n  keyframes {\n    0 = 0, wobbly\n  }\n}\n"))
            .unwrap_err();
        let SchemeError::Syntax { line: 11, column, .. } = err else { panic!("{err:?}") };
        assert_eq!(column, 12);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = format!(
            "# header\n\n{}",
            minimal("channel blur { # trailing\n  keyframes {\n    0 = 0 # rest\n  }\n}\n")
        );
        parse_scheme_file(&text).unwrap();
    }
}

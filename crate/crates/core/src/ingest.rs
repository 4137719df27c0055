//! CSV word-list ingest.
//!
//! Input is plain `text,weight` records, one per line, with an optional
//! header. Quoting is not supported; a comma inside the text shows up as an
//! extra column and the row is rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_WORDS: usize = 200;
pub const MAX_TEXT_CHARS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("input contains no word records")]
    EmptyInput,
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: weight must be positive, got {weight}")]
    NonPositiveWeight { line: usize, weight: f64 },
    #[error("line {line}: text is longer than {MAX_TEXT_CHARS} characters")]
    TextTooLong { line: usize },
    #[error("{count} distinct words exceeds the limit of {MAX_WORDS}")]
    TooManyWords { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordEntry {
    pub text: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordList {
    pub entries: Vec<WordEntry>,
    pub source_name: String,
}

impl WordList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Serializes back to the CSV form accepted by [`parse_wordle_csv`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from("text,weight\n");
        for e in &self.entries {
            out.push_str(&e.text);
            out.push(',');
            out.push_str(&e.weight.to_string());
            out.push('\n');
        }
        out
    }
}

pub fn parse_wordle_csv(raw: &[u8]) -> Result<WordList, IngestError> {
    parse_named(raw, "inline")
}

/// Like [`parse_wordle_csv`] but records `source_name` on the list.
pub fn parse_named(raw: &[u8], source_name: &str) -> Result<WordList, IngestError> {
    let text = std::str::from_utf8(raw).map_err(|_| IngestError::InvalidUtf8)?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);

    let mut entries: Vec<WordEntry> = Vec::new();
    let mut seen_record = false;
    for (idx, raw_line) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(IngestError::MalformedRow {
                line: line_no,
                reason: format!("expected 2 columns, found {}", fields.len()),
            });
        }
        let word = fields[0].trim();
        let weight_field = fields[1].trim();
        if !seen_record {
            seen_record = true;
            if word.eq_ignore_ascii_case("text") && weight_field.eq_ignore_ascii_case("weight") {
                continue;
            }
        }
        if word.is_empty() {
            return Err(IngestError::MalformedRow { line: line_no, reason: "empty text".into() });
        }
        if word.chars().count() > MAX_TEXT_CHARS {
            return Err(IngestError::TextTooLong { line: line_no });
        }
        let weight: f64 = weight_field.parse().map_err(|_| IngestError::MalformedRow {
            line: line_no,
            reason: format!("weight {weight_field:?} is not a number"),
        })?;
        if !weight.is_finite() {
            return Err(IngestError::MalformedRow {
                line: line_no,
                reason: format!("weight {weight_field:?} is not finite"),
            });
        }
        if weight <= 0.0 {
            return Err(IngestError::NonPositiveWeight { line: line_no, weight });
        }
        match entries.iter_mut().find(|e| e.text == word) {
            Some(existing) => existing.weight += weight,
            None => entries.push(WordEntry { text: word.to_string(), weight }),
        }
    }

    if entries.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    if entries.len() > MAX_WORDS {
        return Err(IngestError::TooManyWords { count: entries.len() });
    }
    Ok(WordList { entries, source_name: source_name.to_string() })
}

/// Divides every weight by the maximum so the largest becomes exactly 1.
pub fn normalize_weights(list: &WordList) -> WordList {
    let max = list.entries.iter().map(|e| e.weight).fold(0.0_f64, f64::max);
    let entries = list
        .entries
        .iter()
        .map(|e| WordEntry {
            text: e.text.clone(),
            weight: if e.weight == max { 1.0 } else { e.weight / max },
        })
        .collect();
    WordList { entries, source_name: list.source_name.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn weights(list: &WordList) -> Vec<f64> {
        list.entries.iter().map(|e| e.weight).collect()
    }

    #[test]
    fn parses_two_rows() {
        let list = parse_wordle_csv(b"hello,3\nworld,1").unwrap();
        assert_eq!(list.len(), 2);
        assert_eq!(list.entries[0], WordEntry { text: "hello".into(), weight: 3.0 });
        assert_eq!(list.entries[1], WordEntry { text: "world".into(), weight: 1.0 });
    }

    #[test]
    fn merges_duplicates_by_sum() {
        let list = parse_wordle_csv(b"a,2\na,3").unwrap();
        assert_eq!(list.entries, vec![WordEntry { text: "a".into(), weight: 5.0 }]);
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse_wordle_csv(b""), Err(IngestError::EmptyInput));
        assert_eq!(parse_wordle_csv(b"text,weight\n\n"), Err(IngestError::EmptyInput));
    }

    #[test]
    fn header_crlf_and_whitespace() {
        let list = parse_wordle_csv(b"text,weight\r\n  joy , 2 \r\nsun,1\r\n").unwrap();
        assert_eq!(list.entries[0].text, "joy");
        assert_eq!(weights(&list), vec![2.0, 1.0]);
    }

    #[test]
    fn case_sensitive_identity() {
        let list = parse_wordle_csv(b"Joy,1\njoy,1").unwrap();
        assert_eq!(list.len(), 2);
    }

    #[test]
    fn malformed_rows_report_line() {
        assert!(matches!(parse_wordle_csv(b"a,1\nb,c,2"), Err(IngestError::MalformedRow { line: 2, .. })));
        assert!(matches!(parse_wordle_csv(b"a,1\n\nb,x"), Err(IngestError::MalformedRow { line: 3, .. })));
        assert!(matches!(parse_wordle_csv(b"a"), Err(IngestError::MalformedRow { line: 1, .. })));
        assert!(matches!(parse_wordle_csv(b"a,NaN"), Err(IngestError::MalformedRow { .. })));
    }

    #[test]
    fn non_positive_weight() {
        assert!(matches!(parse_wordle_csv(b"a,0"), Err(IngestError::NonPositiveWeight { line: 1, .. })));
        assert!(matches!(parse_wordle_csv(b"a,-2"), Err(IngestError::NonPositiveWeight { .. })));
    }

    #[test]
    fn limits() {
        let long = format!("{},1", "x".repeat(65));
        assert!(matches!(parse_wordle_csv(long.as_bytes()), Err(IngestError::TextTooLong { line: 1 })));
        let many: String = (0..201).map(|i| format!("w{i},1\n")).collect();
        assert_eq!(parse_wordle_csv(many.as_bytes()), Err(IngestError::TooManyWords { count: 201 }));
        assert!(parse_wordle_csv(b"\xff,1").is_err());
    }

    #[test]
    fn normalization_examples() {
        let mk = |ws: &[f64]| WordList {
            entries: ws
                .iter()
                .enumerate()
                .map(|(i, &w)| WordEntry { text: format!("w{i}"), weight: w })
                .collect(),
            source_name: "t".into(),
        };
        assert_eq!(weights(&normalize_weights(&mk(&[10.0, 5.0]))), vec![1.0, 0.5]);
        assert_eq!(weights(&normalize_weights(&mk(&[7.0, 7.0, 7.0]))), vec![1.0; 3]);
        assert_eq!(weights(&normalize_weights(&mk(&[42.0]))), vec![1.0]);
    }

    fn arb_list() -> impl Strategy<Value = WordList> {
        prop::collection::btree_map("[a-zA-Z]{1,12}", 0.001f64..1000.0, 1..40).prop_map(|m| WordList {
            entries: m.into_iter().map(|(text, weight)| WordEntry { text, weight }).collect(),
            source_name: "inline".into(),
        })
    }

    proptest! {
        #[test]
        fn csv_round_trip(list in arb_list()) {
            let parsed = parse_wordle_csv(list.to_csv().as_bytes()).unwrap();
            prop_assert_eq!(parsed, list);
        }

        #[test]
        fn normalize_idempotent(list in arb_list()) {
            let once = normalize_weights(&list);
            let twice = normalize_weights(&once);
            prop_assert_eq!(&once, &twice);
            let max = once.entries.iter().map(|e| e.weight).fold(0.0, f64::max);
            prop_assert_eq!(max, 1.0);
            prop_assert!(once.entries.iter().all(|e| e.weight > 0.0 && e.weight <= 1.0));
        }

        #[test]
        fn merge_is_order_insensitive(parts in prop::collection::vec(1u32..100, 1..8), seed in any::<u64>()) {
            let mut rows: Vec<String> = parts.iter().map(|p| format!("dup,{p}")).collect();
            rows.push("other,1".into());
            let forward = parse_wordle_csv(rows.join("\n").as_bytes()).unwrap();
            crate::rng::SplitMix64::new(seed).shuffle(&mut rows);
            let shuffled = parse_wordle_csv(rows.join("\n").as_bytes()).unwrap();
            let pick = |l: &WordList| l.entries.iter().find(|e| e.text == "dup").unwrap().weight;
            prop_assert_eq!(pick(&forward), pick(&shuffled));
            prop_assert_eq!(pick(&forward), parts.iter().map(|&p| p as f64).sum::<f64>());
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::model::{Label, PiiSpan};
use crate::text::CharIndex;

/// A token with its BIOES tag, e.g. `B-PERSON` or `O`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub tag: String,
}

impl TaggedToken {
    pub fn new(text: impl Into<String>, start: usize, end: usize, tag: impl Into<String>) -> Self {
        Self { text: text.into(), start, end, tag: tag.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BioesTag {
    Outside,
    Begin(Label),
    Inside(Label),
    End(Label),
    Single(Label),
}

/// Parses a tag. Unknown prefixes or labels read as `O`.
pub fn parse_tag(tag: &str) -> BioesTag {
    let Some((prefix, label)) = tag.split_once('-') else {
        return BioesTag::Outside;
    };
    let Ok(label) = label.parse::<Label>() else {
        return BioesTag::Outside;
    };
    match prefix {
        "B" => BioesTag::Begin(label),
        "I" => BioesTag::Inside(label),
        "E" => BioesTag::End(label),
        "S" => BioesTag::Single(label),
        _ => BioesTag::Outside,
    }
}

struct Open {
    label: Label,
    start: usize,
    end: usize,
}

/// Decodes BIOES token tags into char spans over `text`.
///
/// Malformed sequences are repaired instead of dropped: an orphan `I`
/// opens a span, an orphan `E` closes a one-token span, and a `B` or `I`
/// left open at a boundary still emits what it covered.
pub fn decode_bioes(text: &str, tokens: &[TaggedToken]) -> Vec<PiiSpan> {
    let index = CharIndex::new(text);
    let mut raw: Vec<(usize, usize, Label)> = Vec::new();
    let mut open: Option<Open> = None;

    let close = |open: &mut Option<Open>, raw: &mut Vec<(usize, usize, Label)>| {
        if let Some(o) = open.take() {
            raw.push((o.start, o.end, o.label));
        }
    };

    for tok in tokens {
        match parse_tag(&tok.tag) {
            BioesTag::Outside => close(&mut open, &mut raw),
            BioesTag::Begin(label) => {
                close(&mut open, &mut raw);
                open = Some(Open { label, start: tok.start, end: tok.end });
            }
            BioesTag::Inside(label) => match open.as_mut() {
                Some(o) if o.label == label => o.end = tok.end,
                _ => {
                    close(&mut open, &mut raw);
                    open = Some(Open { label, start: tok.start, end: tok.end });
                }
            },
            BioesTag::End(label) => match open.as_mut() {
                Some(o) if o.label == label => {
                    o.end = tok.end;
                    close(&mut open, &mut raw);
                }
                _ => {
                    close(&mut open, &mut raw);
                    raw.push((tok.start, tok.end, label));
                }
            },
            BioesTag::Single(label) => {
                close(&mut open, &mut raw);
                raw.push((tok.start, tok.end, label));
            }
        }
    }
    close(&mut open, &mut raw);

    raw.into_iter()
        .filter(|&(s, e, _)| s < e && e <= index.len())
        .map(|(start, end, label)| PiiSpan { start, end, label, surface: index.slice(text, start, end).to_string() })
        .collect()
}

/// Tags `tokens` (given as `(start, end)` char bounds) from a span set.
/// A token belongs to a span when it lies entirely inside it.
pub fn encode_bioes(tokens: &[(usize, usize)], spans: &[PiiSpan]) -> Vec<String> {
    let mut tags = vec!["O".to_string(); tokens.len()];
    for span in spans {
        let inside: Vec<usize> =
            tokens.iter().enumerate().filter(|(_, &(s, e))| s >= span.start && e <= span.end).map(|(i, _)| i).collect();
        match inside.as_slice() {
            [] => {}
            [only] => tags[*only] = format!("S-{}", span.label),
            [first, .., last] => {
                for &i in &inside {
                    tags[i] = format!("I-{}", span.label);
                }
                tags[*first] = format!("B-{}", span.label);
                tags[*last] = format!("E-{}", span.label);
            }
        }
    }
    tags
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spans(text: &str, tokens: &[TaggedToken]) -> Vec<(usize, usize, Label)> {
        decode_bioes(text, tokens).into_iter().map(|s| (s.start, s.end, s.label)).collect()
    }

    #[test]
    fn begin_end_makes_one_span() {
        let text = "John Smith";
        let toks = [TaggedToken::new("John", 0, 4, "B-PERSON"), TaggedToken::new("Smith", 5, 10, "E-PERSON")];
        assert_eq!(spans(text, &toks), vec![(0, 10, Label::Person)]);
    }

    #[test]
    fn single_token_span() {
        let text = "to a@b.co";
        let toks = [TaggedToken::new("a@b.co", 3, 9, "S-EMAIL")];
        let out = decode_bioes(text, &toks);
        assert_eq!((out[0].start, out[0].end, out[0].label), (3, 9, Label::Email));
        assert_eq!(out[0].surface, "a@b.co");
    }

    #[test]
    fn orphan_inside_is_repaired() {
        let text = "John Smith";
        let toks = [TaggedToken::new("Smith", 5, 10, "I-PERSON")];
        assert_eq!(spans(text, &toks), vec![(5, 10, Label::Person)]);
    }

    #[test]
    fn label_switch_and_orphan_end() {
        let text = "aa bb cc dd";
        let toks = [
            TaggedToken::new("aa", 0, 2, "B-PERSON"),
            TaggedToken::new("bb", 3, 5, "E-ADDRESS"),
            TaggedToken::new("cc", 6, 8, "O"),
            TaggedToken::new("dd", 9, 11, "B-DATE"),
        ];
        assert_eq!(spans(text, &toks), vec![(0, 2, Label::Person), (3, 5, Label::Address), (9, 11, Label::Date)]);
    }

    #[test]
    fn unknown_tags_are_outside() {
        assert_eq!(parse_tag("B-NAME"), BioesTag::Outside);
        assert_eq!(parse_tag("X-PERSON"), BioesTag::Outside);
        assert_eq!(parse_tag("B-ACCT"), BioesTag::Begin(Label::Account));
    }

    fn token_layout() -> impl Strategy<Value = (Vec<usize>, Vec<(usize, usize, usize)>)> {
        // token lengths, then span picks as (first token, token count, label index)
        (
            proptest::collection::vec(1usize..5, 1..20),
            proptest::collection::vec((0usize..20, 1usize..4, 0usize..8), 0..6),
        )
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip((lens, picks) in token_layout()) {
            let mut text = String::new();
            let mut bounds = Vec::new();
            for (i, len) in lens.iter().enumerate() {
                if i > 0 { text.push(' '); }
                let start = text.chars().count();
                text.push_str(&"x".repeat(*len));
                bounds.push((start, start + len));
            }
            let index = CharIndex::new(&text);
            let mut used = vec![false; bounds.len()];
            let mut span_set = Vec::new();
            for (first, count, label) in picks {
                if first >= bounds.len() { continue; }
                let last = (first + count - 1).min(bounds.len() - 1);
                if used[first..=last].iter().any(|u| *u) { continue; }
                used[first..=last].iter_mut().for_each(|u| *u = true);
                span_set.push(PiiSpan::from_text(&text, &index, bounds[first].0, bounds[last].1, Label::ALL[label]).unwrap());
            }
            span_set.sort_by_key(|s| s.start);
            let tags = encode_bioes(&bounds, &span_set);
            let tokens: Vec<TaggedToken> = bounds.iter().zip(tags)
                .map(|(&(s, e), t)| TaggedToken::new(index.slice(&text, s, e), s, e, t))
                .collect();
            prop_assert_eq!(decode_bioes(&text, &tokens), span_set);
        }
    }
}

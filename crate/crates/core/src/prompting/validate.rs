use crate::model::{canonicalize, RejectionReason};

const QUOTE_PAIRS: &[(char, char)] = &[('"', '"'), ('\'', '\''), ('“', '”'), ('‘', '’'), ('「', '」'), ('«', '»')];

fn strip_quotes(mut s: &str) -> &str {
    loop {
        let mut chars = s.chars();
        let (Some(first), Some(last)) = (chars.next(), chars.next_back()) else {
            return s;
        };
        if !QUOTE_PAIRS.contains(&(first, last)) {
            return s;
        }
        s = s[first.len_utf8()..s.len() - last.len_utf8()].trim();
    }
}

/// Cleans a raw completion and accepts or rejects it.
///
/// Cleaning keeps the first non-empty line, drops a leading `Fake:`, and
/// strips whitespace and matched quote pairs.
pub fn validate_response(raw: &str, input: &str) -> Result<String, RejectionReason> {
    let line = raw.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    let line = line.strip_prefix("Fake:").unwrap_or(line).trim();
    let cleaned = strip_quotes(line);
    if cleaned.is_empty() {
        return Err(RejectionReason::Empty);
    }
    if let (Ok(a), Ok(b)) = (canonicalize(cleaned), canonicalize(input)) {
        if a == b {
            return Err(RejectionReason::Identity);
        }
    }
    if !cleaned.chars().any(char::is_alphanumeric) {
        return Err(RejectionReason::PunctuationOnly);
    }
    Ok(cleaned.to_string())
}

use crate::error::{Error, Result};
use crate::model::PiiSpan;
use crate::text::CharIndex;

/// Replaces each span's characters with its surrogate, right to left.
/// Whitespace at either edge of the original span is kept around the
/// (trimmed) surrogate. Returns the output and the char range each
/// surrogate occupies in it, in span order.
pub fn splice_with_offsets(text: &str, pairs: &[(PiiSpan, String)]) -> Result<(String, Vec<(usize, usize)>)> {
    let index = CharIndex::new(text);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&i| (pairs[i].0.start, pairs[i].0.end));
    for w in order.windows(2) {
        let (a, b) = (&pairs[w[0]].0, &pairs[w[1]].0);
        if a.end > b.start {
            return Err(Error::SpliceOverlap(a.start, a.end, b.start, b.end));
        }
    }
    for (span, _) in pairs {
        if span.start > span.end || span.end > index.len() {
            return Err(Error::SpanOutOfBounds { start: span.start, end: span.end, len: index.len() });
        }
    }

    let mut out = text.to_string();
    // per span: char counts of (leading ws, trimmed surrogate, trailing ws)
    let mut pieces = vec![(0usize, 0usize, 0usize); pairs.len()];
    for &i in order.iter().rev() {
        let (span, surrogate) = &pairs[i];
        let original = index.slice(text, span.start, span.end);
        let core = original.trim();
        let (lead, trail) = if core.is_empty() {
            (original, "")
        } else {
            let l = original.len() - original.trim_start().len();
            let t = original.len() - original.trim_end().len();
            (&original[..l], &original[original.len() - t..])
        };
        let surrogate = surrogate.trim();
        out.replace_range(index.byte(span.start)..index.byte(span.end), &format!("{lead}{surrogate}{trail}"));
        pieces[i] = (lead.chars().count(), surrogate.chars().count(), trail.chars().count());
    }

    let mut offsets = vec![(0, 0); pairs.len()];
    let mut shift: isize = 0;
    for &i in &order {
        let span = &pairs[i].0;
        let (lead, len, trail) = pieces[i];
        let start = (span.start as isize + shift) as usize + lead;
        offsets[i] = (start, start + len);
        shift += (lead + len + trail) as isize - (span.end - span.start) as isize;
    }
    Ok((out, offsets))
}

pub fn splice(text: &str, pairs: &[(PiiSpan, String)]) -> Result<String> {
    splice_with_offsets(text, pairs).map(|(s, _)| s)
}

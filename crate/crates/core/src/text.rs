//! Unicode scalar-value offset helpers.
//!
//! Every span in this crate is expressed in `char` offsets, never byte
//! offsets, so CJK and accented text slice safely.

/// Byte offsets of every char boundary in `text`, plus the final length.
#[derive(Debug, Clone)]
pub struct CharIndex {
    bounds: Vec<usize>,
}

impl CharIndex {
    pub fn new(text: &str) -> Self {
        let mut bounds: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        bounds.push(text.len());
        Self { bounds }
    }

    /// Number of chars in the indexed text.
    pub fn len(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn byte(&self, char_offset: usize) -> usize {
        self.bounds[char_offset]
    }

    /// Char offset of a byte offset that lies on a char boundary.
    pub fn char_at_byte(&self, byte: usize) -> usize {
        self.bounds.binary_search(&byte).expect("byte offset is not on a char boundary")
    }

    pub fn slice<'a>(&self, text: &'a str, start: usize, end: usize) -> &'a str {
        &text[self.bounds[start]..self.bounds[end]]
    }
}

pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

fn eq_ci(a: char, b: char) -> bool {
    a == b || a.to_lowercase().eq(b.to_lowercase())
}

/// Char offsets of every case-insensitive occurrence of `needle` in
/// `haystack`, overlapping occurrences included.
pub fn find_ci(haystack: &[char], needle: &[char]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return Vec::new();
    }
    (0..=haystack.len() - needle.len())
        .filter(|&i| haystack[i..i + needle.len()].iter().zip(needle).all(|(&a, &b)| eq_ci(a, b)))
        .collect()
}

/// Case-insensitive containment.
pub fn contains_ci(haystack: &str, needle: &str) -> bool {
    let h: Vec<char> = haystack.chars().collect();
    let n: Vec<char> = needle.chars().collect();
    !find_ci(&h, &n).is_empty()
}

/// Char offsets of every exact occurrence of `needle`, overlapping included.
pub fn find_exact(haystack: &[char], needle: &[char]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return Vec::new();
    }
    (0..=haystack.len() - needle.len()).filter(|&i| haystack[i..i + needle.len()] == *needle).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_index_handles_multibyte() {
        let text = "杨娟 paid";
        let idx = CharIndex::new(text);
        assert_eq!(idx.len(), 7);
        assert_eq!(idx.slice(text, 0, 2), "杨娟");
        assert_eq!(idx.char_at_byte(6), 2);
    }

    #[test]
    fn find_ci_is_char_based() {
        let h: Vec<char> = "Pay JOHN smith and john".chars().collect();
        let n: Vec<char> = "john".chars().collect();
        assert_eq!(find_ci(&h, &n), vec![4, 19]);
        assert!(!contains_ci("Hauptstraße", "STRASSE"));
        assert!(contains_ci("MÜLLER", "müller"));
    }
}

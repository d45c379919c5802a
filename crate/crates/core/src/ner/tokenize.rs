/// A token with char offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

/// Alphanumeric runs are tokens; every other non-space char stands alone.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current: Option<(usize, String)> = None;
    for (i, c) in text.chars().enumerate() {
        if c.is_alphanumeric() {
            current.get_or_insert_with(|| (i, String::new())).1.push(c);
            continue;
        }
        if let Some((start, s)) = current.take() {
            tokens.push(Token { start, end: i, text: s });
        }
        if !c.is_whitespace() {
            tokens.push(Token { start: i, end: i + 1, text: c.to_string() });
        }
    }
    if let Some((start, s)) = current {
        let end = start + s.chars().count();
        tokens.push(Token { start, end, text: s });
    }
    tokens
}

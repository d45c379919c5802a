use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// How predicted and gold spans are paired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MatchRule {
    /// Any shared character.
    #[default]
    Overlap,
    Exact,
}

/// One-to-one greedy matching, largest overlap first. Returns the number
/// of matched pairs.
pub fn match_spans(pred: &[(usize, usize)], gold: &[(usize, usize)], rule: MatchRule) -> usize {
    let mut pairs = Vec::new();
    for (i, p) in pred.iter().enumerate() {
        for (j, g) in gold.iter().enumerate() {
            let overlap = p.1.min(g.1).saturating_sub(p.0.max(g.0));
            let ok = match rule {
                MatchRule::Overlap => overlap > 0,
                MatchRule::Exact => p == g,
            };
            if ok {
                pairs.push((overlap, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_p = vec![false; pred.len()];
    let mut used_g = vec![false; gold.len()];
    let mut matched = 0;
    for (_, i, j) in pairs {
        if !used_p[i] && !used_g[j] {
            used_p[i] = true;
            used_g[j] = true;
            matched += 1;
        }
    }
    matched
}

/// Micro-averaged P/R/F1 from totals; zero denominators give zero.
pub fn prf(matched: usize, predicted: usize, gold: usize) -> Prf {
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(matched, predicted);
    let recall = ratio(matched, gold);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Prf { precision, recall, f1 }
}

/// Scores `predict` over documents of (text, gold spans).
pub fn eval_span_f1<'a>(
    predict: impl Fn(&str) -> Vec<(usize, usize)>,
    docs: impl IntoIterator<Item = (&'a str, &'a [(usize, usize)])>,
    rule: MatchRule,
) -> Prf {
    let (mut m, mut p, mut g) = (0, 0, 0);
    for (text, gold) in docs {
        let pred = predict(text);
        m += match_spans(&pred, gold, rule);
        p += pred.len();
        g += gold.len();
    }
    prf(m, p, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_prediction() {
        let gold = [(0, 4), (10, 12)];
        assert_eq!(match_spans(&gold, &gold, MatchRule::Overlap), 2);
        let r = prf(2, 2, 2);
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn zero_predictions() {
        assert_eq!(prf(0, 0, 5), Prf { precision: 0.0, recall: 0.0, f1: 0.0 });
    }

    #[test]
    fn one_to_one() {
        // one long prediction covering two gold spans matches only one
        assert_eq!(match_spans(&[(0, 20)], &[(0, 5), (8, 18)], MatchRule::Overlap), 1);
        assert_eq!(match_spans(&[(0, 5)], &[(1, 5)], MatchRule::Exact), 0);
        assert_eq!(match_spans(&[(0, 5)], &[(5, 9)], MatchRule::Overlap), 0);
    }

    #[test]
    fn folds_over_docs() {
        let gold: Vec<(usize, usize)> = vec![(0, 3)];
        let docs = vec![("abc def", gold.as_slice()), ("xyz", &[][..])];
        let r =
            eval_span_f1(|t| if t.starts_with("abc") { vec![(0, 3)] } else { vec![(0, 1)] }, docs, MatchRule::Overlap);
        assert_eq!((r.precision, r.recall), (0.5, 1.0));
    }
}

//! ROUGE-L scoring and extraneous-content rate for generated summaries.

use serde::{Deserialize, Serialize};

/// Recall weight in the ROUGE-L F-measure.
pub const DEFAULT_BETA: f64 = 1.2;

/// Lowercases and splits on whitespace, then peels leading and trailing ASCII
/// punctuation off each token into tokens of their own, so "great!" scores as
/// ["great", "!"].
pub fn tokenize_eval(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for raw in text.split_whitespace() {
        let lower = raw.to_lowercase();
        let chars: Vec<char> = lower.chars().collect();
        let mut start = 0;
        let mut end = chars.len();
        let mut leading = Vec::new();
        let mut trailing = Vec::new();
        while start < end && chars[start].is_ascii_punctuation() {
            leading.push(chars[start].to_string());
            start += 1;
        }
        while end > start && chars[end - 1].is_ascii_punctuation() {
            trailing.push(chars[end - 1].to_string());
            end -= 1;
        }
        tokens.extend(leading);
        if start < end {
            tokens.push(chars[start..end].iter().collect());
        }
        tokens.extend(trailing.into_iter().rev());
    }
    tokens
}

/// Length of the longest common subsequence of two token slices.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    // One DP row of |b|+1 entries.
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for ai in a {
        for (j, bj) in b.iter().enumerate() {
            cur[j + 1] = if ai == bj {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// ROUGE-L of a candidate against a reference: recall `L/|ref|`, precision
/// `L/|cand|` (zero when the denominator is zero), and the beta-weighted
/// F-measure `(1+b^2) P R / (R + b^2 P)`.
pub fn rouge_l(candidate: &str, reference: &str, beta: f64) -> RougeScore {
    let cand = tokenize_eval(candidate);
    let reft = tokenize_eval(reference);
    let l = lcs_len(&cand, &reft) as f64;
    let precision = if cand.is_empty() { 0.0 } else { l / cand.len() as f64 };
    let recall = if reft.is_empty() { 0.0 } else { l / reft.len() as f64 };
    let b2 = beta * beta;
    let denom = recall + b2 * precision;
    let f_measure = if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denom
    };
    RougeScore {
        precision,
        recall,
        f_measure,
    }
}

/// Fraction of summaries containing at least one extraneous sentence, where
/// `has_ec[i]` says whether summary `i` does. Empty input scores zero.
pub fn ec_fraction(has_ec: &[bool]) -> f64 {
    if has_ec.is_empty() {
        return 0.0;
    }
    has_ec.iter().filter(|&&x| x).count() as f64 / has_ec.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenizer_splits_punctuation() {
        assert_eq!(tokenize_eval("Great show!"), vec!["great", "show", "!"]);
        assert_eq!(
            tokenize_eval("\"Hello,\" she said."),
            vec!["\"", "hello", ",", "\"", "she", "said", "."]
        );
        assert_eq!(tokenize_eval("don't stop"), vec!["don't", "stop"]);
        assert_eq!(tokenize_eval("..."), vec![".", ".", "."]);
        assert_eq!(tokenize_eval(""), Vec::<String>::new());
    }

    #[test]
    fn lcs_known_values() {
        let a: Vec<&str> = "a b c d e".split(' ').collect();
        let b: Vec<&str> = "a c e".split(' ').collect();
        assert_eq!(lcs_len(&a, &b), 3);
        assert_eq!(lcs_len(&a, &a), 5);
        assert_eq!(lcs_len(&a, &[] as &[&str]), 0);
        let c: Vec<&str> = "e c a".split(' ').collect();
        assert_eq!(lcs_len(&a, &c), 1);
    }

    #[test]
    fn rouge_identity_is_perfect() {
        let s = rouge_l("the quick brown fox", "the quick brown fox", DEFAULT_BETA);
        assert_eq!(s.precision, 1.0);
        assert_eq!(s.recall, 1.0);
        assert!((s.f_measure - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rouge_subsequence_example() {
        let s = rouge_l("a c e", "a b c d e", DEFAULT_BETA);
        assert_eq!(s.precision, 1.0);
        assert!((s.recall - 0.6).abs() < 1e-12);
        let b2 = DEFAULT_BETA * DEFAULT_BETA;
        let expected = (1.0 + b2) * 1.0 * 0.6 / (0.6 + b2);
        assert!((s.f_measure - expected).abs() < 1e-12);
    }

    #[test]
    fn rouge_empty_inputs_score_zero() {
        let s = rouge_l("", "some reference", DEFAULT_BETA);
        assert_eq!(s.precision, 0.0);
        assert_eq!(s.recall, 0.0);
        assert_eq!(s.f_measure, 0.0);
        let s = rouge_l("some candidate", "", DEFAULT_BETA);
        assert_eq!(s.f_measure, 0.0);
    }

    #[test]
    fn ec_fraction_counts_flagged_summaries() {
        assert_eq!(ec_fraction(&[true, false, false, true]), 0.5);
        assert_eq!(ec_fraction(&[]), 0.0);
        assert_eq!(ec_fraction(&[false]), 0.0);
    }

    /// Exponential-time reference: longest common subsequence by enumerating
    /// all subsequences of the shorter side.
    fn lcs_brute(a: &[u8], b: &[u8]) -> usize {
        let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let mut best = 0;
        for mask in 0u32..(1 << small.len()) {
            let sub: Vec<u8> = (0..small.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| small[i])
                .collect();
            if sub.len() <= best {
                continue;
            }
            let mut it = big.iter();
            if sub.iter().all(|s| it.any(|x| x == s)) {
                best = sub.len();
            }
        }
        best
    }

    proptest! {
        #[test]
        fn lcs_matches_brute_force(
            a in proptest::collection::vec(0u8..4, 0..10),
            b in proptest::collection::vec(0u8..4, 0..10),
        ) {
            prop_assert_eq!(lcs_len(&a, &b), lcs_brute(&a, &b));
        }

        #[test]
        fn lcs_is_symmetric_and_bounded(
            a in proptest::collection::vec(0u8..4, 0..20),
            b in proptest::collection::vec(0u8..4, 0..20),
        ) {
            let l = lcs_len(&a, &b);
            prop_assert_eq!(l, lcs_len(&b, &a));
            prop_assert!(l <= a.len().min(b.len()));
        }
    }
}

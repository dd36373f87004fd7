use std::collections::HashMap;

use crate::scalar::Scalar;

/// Lowercases, drops bracketed `[tags]`, and splits on anything that is not
/// alphanumeric. Apostrophes survive only between two alphanumerics.
pub fn normalize_tokens(text: &str) -> Vec<String> {
    let mut visible = String::with_capacity(text.len());
    let mut depth = 0usize;
    for c in text.chars() {
        match c {
            '[' => depth += 1,
            ']' if depth > 0 => {
                depth -= 1;
                visible.push(' ');
            }
            _ if depth == 0 => visible.push(c),
            _ => {}
        }
    }
    let chars: Vec<char> = visible.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let is_apostrophe = matches!(c, '\'' | '\u{2019}');
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if is_apostrophe
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        {
            current.push('\'');
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn term_counts<S: AsRef<str>>(tokens: &[S]) -> HashMap<&str, usize> {
    let mut m = HashMap::new();
    for t in tokens {
        *m.entry(t.as_ref()).or_default() += 1;
    }
    m
}

/// Cosine similarity of term-count vectors. Two empty lists are identical
/// (1); one empty list against a non-empty one is 0.
pub fn cosine_bow<T: Scalar, S: AsRef<str>>(a: &[S], b: &[S]) -> T {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return T::one(),
        (true, false) | (false, true) => return T::zero(),
        _ => {}
    }
    let (ca, cb) = (term_counts(a), term_counts(b));
    let dot: usize = ca.iter().map(|(k, v)| v * cb.get(k).copied().unwrap_or(0)).sum();
    let norm = |m: &HashMap<&str, usize>| m.values().map(|v| v * v).sum::<usize>();
    let denom = (T::from_usize_lossy(norm(&ca)) * T::from_usize_lossy(norm(&cb))).sqrt();
    let sim = T::from_usize_lossy(dot) / denom;
    // Parallel vectors may land a hair above one.
    sim.min(T::one()).max(T::zero())
}

//! Tokenization shared by keyphrase mining, item profiles and TF-IDF matching.
//!
//! Text is lowercased and split on every non-alphanumeric character. Tokens
//! shorter than three characters and stopwords are dropped. Bigrams are
//! adjacent pairs in the filtered token stream of a single text.

use std::collections::HashSet;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// Minimum token length in characters.
pub const MIN_TOKEN_CHARS: usize = 3;

#[derive(Debug, Clone)]
pub struct Tokenizer {
    stopwords: HashSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Self::from_stopword_list(DEFAULT_STOPWORDS)
    }
}

impl Tokenizer {
    /// Builds a tokenizer from a stopword file body (one token per line,
    /// blank lines and `#` comments ignored).
    pub fn from_stopword_list(body: &str) -> Self {
        let stopwords = body
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Self { stopwords }
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(str::to_lowercase)
            .filter(|t| t.chars().count() >= MIN_TOKEN_CHARS && !self.stopwords.contains(t))
            .collect()
    }

    /// Unigrams followed by bigrams, each as a single space-joined string.
    pub fn phrases(&self, text: &str) -> Vec<String> {
        let tokens = self.tokenize(text);
        let mut out = Vec::with_capacity(tokens.len() * 2);
        out.extend(tokens.iter().cloned());
        out.extend(tokens.windows(2).map(|w| format!("{} {}", w[0], w[1])));
        out
    }
}

/// Splits a phrase into lowercase tokens on whitespace.
pub(crate) fn phrase_tokens(phrase: &str) -> Vec<String> {
    phrase.split_whitespace().map(str::to_lowercase).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_short_tokens_and_stopwords() {
        let t = Tokenizer::default();
        assert_eq!(t.tokenize("The pool was cold!"), vec!["pool", "cold"]);
        assert_eq!(t.tokenize("a an ok TV"), Vec::<String>::new());
    }

    #[test]
    fn splits_on_any_non_alphanumeric() {
        let t = Tokenizer::default();
        assert_eq!(t.tokenize("wifi/pool--spa_bar"), vec!["wifi", "pool", "spa", "bar"]);
    }

    #[test]
    fn bigrams_span_filtered_tokens() {
        let t = Tokenizer::default();
        assert_eq!(
            t.phrases("rooftop pool and spa"),
            vec!["rooftop", "pool", "spa", "rooftop pool", "pool spa"]
        );
    }

    #[test]
    fn custom_stopwords() {
        let t = Tokenizer::from_stopword_list("# comment\nhotel\n\n");
        assert_eq!(t.tokenize("the hotel pool"), vec!["the", "pool"]);
    }
}

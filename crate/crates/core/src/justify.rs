//! Text layer of the interfaces: keyword highlighting inside descriptions,
//! template-based justifications and a sentence-level diversity score.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ItemProfile, KeyphraseVocabulary};
use crate::engine::{Explanation, ExplanationScope, ItemSpace, RankedList};
use crate::text::phrase_tokens;

const DEFAULT_TEMPLATES: &str = include_str!("../data/templates.txt");
const DEFAULT_ADJECTIVES: &str = include_str!("../data/adjectives.txt");

/// Fewest templates a rotation may use.
pub const MIN_TEMPLATES: usize = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JustifyError {
    #[error("justifications need a per-item explanation")]
    WrongScope,
    #[error("diversity needs at least two justifications, got {0}")]
    TooFew(usize),
    #[error("no profile for item `{0}`")]
    UnknownItem(String),
    #[error("invalid template set: {0}")]
    InvalidTemplates(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightSpan {
    /// Character offset, inclusive.
    pub start: usize,
    /// Character offset, exclusive.
    pub end: usize,
    pub keyphrase: String,
}

struct Token {
    start: usize,
    end: usize,
    text: String,
}

fn word_tokens(text: &str) -> Vec<(Token, Option<char>)> {
    let mut out: Vec<(Token, Option<char>)> = Vec::new();
    let mut current: Option<Token> = None;
    for (pos, ch) in text.chars().enumerate() {
        if ch.is_alphanumeric() {
            let tok = current.get_or_insert_with(|| Token {
                start: pos,
                end: pos,
                text: String::new(),
            });
            tok.end = pos + 1;
            tok.text.extend(ch.to_lowercase());
        } else if let Some(tok) = current.take() {
            out.push((tok, Some(ch)));
        }
    }
    if let Some(tok) = current {
        out.push((tok, None));
    }
    out
}

/// Case-insensitive whole-token matches of `keyphrases` in `description`.
///
/// A bigram matches its two tokens separated by exactly one whitespace
/// character. Overlaps resolve leftmost-longest; spans come back sorted.
pub fn highlight<S: AsRef<str>>(description: &str, keyphrases: &[S]) -> Vec<HighlightSpan> {
    let tokens = word_tokens(description);
    let mut candidates: Vec<HighlightSpan> = Vec::new();
    for phrase in keyphrases {
        let parts = phrase_tokens(phrase.as_ref());
        let canonical = parts.join(" ");
        match parts.as_slice() {
            [one] => {
                for (tok, _) in &tokens {
                    if &tok.text == one {
                        candidates.push(HighlightSpan {
                            start: tok.start,
                            end: tok.end,
                            keyphrase: canonical.clone(),
                        });
                    }
                }
            }
            [first, second] => {
                for pair in tokens.windows(2) {
                    let (a, sep) = &pair[0];
                    let (b, _) = &pair[1];
                    let single_space = b.start == a.end + 1 && sep.is_some_and(char::is_whitespace);
                    if single_space && &a.text == first && &b.text == second {
                        candidates.push(HighlightSpan {
                            start: a.start,
                            end: b.end,
                            keyphrase: canonical.clone(),
                        });
                    }
                }
            }
            _ => {}
        }
    }
    candidates.sort_by(|a, b| a.start.cmp(&b.start).then((b.end - b.start).cmp(&(a.end - a.start))));
    let mut spans: Vec<HighlightSpan> = Vec::new();
    for c in candidates {
        if spans.last().is_none_or(|last| c.start >= last.end) {
            spans.push(c);
        }
    }
    spans
}

/// Intensity bucket of a keyphrase count within one item's own counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Intensity {
    Low,
    Medium,
    High,
}

/// Tercile of `count` within the non-zero counts of `profile`, using the
/// empirical CDF: share of non-zero counts `<= count`.
pub fn intensity(profile: &ItemProfile, count: u32) -> Intensity {
    let nonzero: Vec<u32> = profile.counts.iter().copied().filter(|&c| c > 0).collect();
    if nonzero.is_empty() || count == 0 {
        return Intensity::Low;
    }
    let at_or_below = nonzero.iter().filter(|&&c| c <= count).count();
    let q = at_or_below as f64 / nonzero.len() as f64;
    if q <= 1.0 / 3.0 {
        Intensity::Low
    } else if q <= 2.0 / 3.0 {
        Intensity::Medium
    } else {
        Intensity::High
    }
}

#[derive(Debug, Clone)]
pub struct Templates {
    templates: Vec<String>,
    adjectives: [String; 3],
}

impl Default for Templates {
    fn default() -> Self {
        Self::parse(DEFAULT_TEMPLATES, DEFAULT_ADJECTIVES).expect("bundled templates are valid")
    }
}

impl Templates {
    /// Parses `templates.txt` (one template per line, `{name}` and
    /// `{phrases}` placeholders) and `adjectives.txt` (low, medium, high).
    pub fn parse(templates: &str, adjectives: &str) -> Result<Self, JustifyError> {
        let templates: Vec<String> = templates
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        if templates.len() < MIN_TEMPLATES {
            return Err(JustifyError::InvalidTemplates(format!(
                "need at least {MIN_TEMPLATES} templates, got {}",
                templates.len()
            )));
        }
        if let Some(t) = templates.iter().find(|t| !t.contains("{phrases}")) {
            return Err(JustifyError::InvalidTemplates(format!("`{t}` lacks {{phrases}}")));
        }
        let adj: Vec<String> = adjectives
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        let adjectives: [String; 3] = adj
            .try_into()
            .map_err(|v: Vec<String>| JustifyError::InvalidTemplates(format!("need 3 adjectives, got {}", v.len())))?;
        Ok(Self { templates, adjectives })
    }

    pub fn load(templates: impl AsRef<Path>, adjectives: impl AsRef<Path>) -> Result<Self, JustifyError> {
        let read = |p: &Path| {
            fs::read_to_string(p).map_err(|e| JustifyError::InvalidTemplates(format!("{}: {e}", p.display())))
        };
        Self::parse(&read(templates.as_ref())?, &read(adjectives.as_ref())?)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn adjective(&self, intensity: Intensity) -> &str {
        match intensity {
            Intensity::Low => &self.adjectives[0],
            Intensity::Medium => &self.adjectives[1],
            Intensity::High => &self.adjectives[2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Justification {
    pub text: String,
    pub keyphrases_used: Vec<String>,
    pub template_id: usize,
}

fn join_list(parts: &[String]) -> String {
    match parts {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}

/// Fills the template picked by `rank_position mod T` with the item name
/// and each explanation keyphrase prefixed by its intensity adjective.
pub fn generate_justification(
    templates: &Templates,
    vocab: &KeyphraseVocabulary,
    explanation: &Explanation,
    profile: &ItemProfile,
    name: &str,
    rank_position: usize,
) -> Result<Justification, JustifyError> {
    if explanation.scope != ExplanationScope::PerItem {
        return Err(JustifyError::WrongScope);
    }
    let template_id = rank_position % templates.len();
    if explanation.keyphrases.is_empty() {
        return Ok(Justification {
            text: String::new(),
            keyphrases_used: Vec::new(),
            template_id,
        });
    }
    let rendered: Vec<String> = explanation
        .keyphrases
        .iter()
        .map(|phrase| {
            let count = vocab.index_of(phrase).map_or(0, |k| profile.counts[k]);
            format!("{} {}", templates.adjective(intensity(profile, count)), phrase)
        })
        .collect();
    let text = templates.templates[template_id]
        .replace("{name}", name)
        .replace("{phrases}", &join_list(&rendered));
    Ok(Justification {
        text,
        keyphrases_used: explanation.keyphrases.clone(),
        template_id,
    })
}

/// Justifications for every entry of a per-item list, rotating templates by
/// list position (0-based).
pub fn justify_list(
    templates: &Templates,
    space: &ItemSpace,
    list: &RankedList,
) -> Result<Vec<Justification>, JustifyError> {
    list.entries
        .iter()
        .enumerate()
        .map(|(pos, entry)| {
            let profile = space
                .profile(&entry.item_id)
                .ok_or_else(|| JustifyError::UnknownItem(entry.item_id.clone()))?;
            let name = space
                .catalog
                .get(&entry.item_id)
                .map_or(entry.item_id.as_str(), |i| i.name.as_str());
            generate_justification(templates, &space.vocab, &entry.explanation, profile, name, pos)
        })
        .collect()
}

pub(crate) fn sentences(text: &str) -> impl Iterator<Item = &str> {
    text.split(['.', '!', '?']).map(str::trim).filter(|s| !s.is_empty())
}

/// `1 - duplicates / total` over all sentences of all justifications.
pub fn diversity_score(justifications: &[Justification]) -> Result<f64, JustifyError> {
    if justifications.len() < 2 {
        return Err(JustifyError::TooFew(justifications.len()));
    }
    let mut seen = HashSet::new();
    let mut total = 0usize;
    for j in justifications {
        for s in sentences(&j.text) {
            total += 1;
            seen.insert(s);
        }
    }
    if total == 0 {
        return Ok(1.0);
    }
    Ok(1.0 - (total - seen.len()) as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spans(desc: &str, phrases: &[&str]) -> Vec<(usize, usize, String)> {
        highlight(desc, phrases)
            .into_iter()
            .map(|h| (h.start, h.end, h.keyphrase))
            .collect()
    }

    #[test]
    fn highlight_examples() {
        assert_eq!(spans("Rooftop pool and spa", &["pool"]), [(8, 12, "pool".into())]);
        assert_eq!(spans("POOL party", &["pool"]), [(0, 4, "pool".into())]);
        assert_eq!(
            spans("nice swimming pool", &["swimming pool", "pool"]),
            [(5, 18, "swimming pool".into())]
        );
    }

    #[test]
    fn highlight_whole_tokens_only() {
        assert!(spans("whirlpool", &["pool"]).is_empty());
        assert!(spans("swimming  pool", &["swimming pool"]).is_empty());
        assert!(spans("swimming-pool", &["swimming pool"]).is_empty());
        assert_eq!(spans("swimming\tpool", &["swimming pool"]).len(), 1);
    }

    #[test]
    fn highlight_offsets_are_characters() {
        let d = "Café près du pool";
        let s = highlight(d, &["pool"]);
        let chars: Vec<char> = d.chars().collect();
        let sub: String = chars[s[0].start..s[0].end].iter().collect();
        assert_eq!(sub, "pool");
    }

    #[test]
    fn adjective_terciles() {
        let p = ItemProfile::from_counts("h", vec![1, 2, 3, 0, 9]);
        assert_eq!(intensity(&p, 9), Intensity::High);
        assert_eq!(intensity(&p, 1), Intensity::Low);
        assert_eq!(intensity(&p, 2), Intensity::Medium);
        assert_eq!(intensity(&p, 0), Intensity::Low);
    }

    fn explanation(ks: &[&str]) -> Explanation {
        Explanation {
            keyphrases: ks.iter().map(|s| s.to_string()).collect(),
            scope: ExplanationScope::PerItem,
        }
    }

    #[test]
    fn rotation_and_determinism() {
        let t = Templates::default();
        let vocab = KeyphraseVocabulary::parse("pool\nwifi\n").unwrap();
        let p = ItemProfile::from_counts("h", vec![2, 5]);
        let e = explanation(&["pool", "wifi"]);
        let j1 = generate_justification(&t, &vocab, &e, &p, "Hotel Roma", 1).unwrap();
        let j2 = generate_justification(&t, &vocab, &e, &p, "Hotel Roma", 2).unwrap();
        assert_ne!(j1.template_id, j2.template_id);
        assert_ne!(j1.text, j2.text);
        assert_eq!(j1, generate_justification(&t, &vocab, &e, &p, "Hotel Roma", 1).unwrap());
        assert!(j1.text.contains("pool") && j1.text.contains("wifi"));
        assert!(j1.text.contains("excellent wifi"), "{}", j1.text);
    }

    #[test]
    fn empty_and_global_explanations() {
        let t = Templates::default();
        let vocab = KeyphraseVocabulary::parse("pool\n").unwrap();
        let p = ItemProfile::from_counts("h", vec![1]);
        let j = generate_justification(&t, &vocab, &explanation(&[]), &p, "X", 0).unwrap();
        assert!(j.text.is_empty() && j.keyphrases_used.is_empty());
        let global = Explanation {
            keyphrases: vec!["pool".into()],
            scope: ExplanationScope::Global,
        };
        assert_eq!(
            generate_justification(&t, &vocab, &global, &p, "X", 0),
            Err(JustifyError::WrongScope)
        );
    }

    fn just(text: &str) -> Justification {
        Justification {
            text: text.into(),
            keyphrases_used: vec![],
            template_id: 0,
        }
    }

    #[test]
    fn diversity_examples() {
        let same = vec![just("Nice pool."); 4];
        assert!((diversity_score(&same).unwrap() - 0.25).abs() < 1e-12);
        let distinct = vec![just("A pool. A spa!"), just("A gym? A bar.")];
        assert_eq!(diversity_score(&distinct).unwrap(), 1.0);
        assert_eq!(diversity_score(&[just("x")]), Err(JustifyError::TooFew(1)));
    }

    #[test]
    fn template_validation() {
        assert!(Templates::parse("{phrases}\n", "a\nb\nc\n").is_err());
        assert!(Templates::parse(&"{name} {phrases}\n".repeat(5), "a\nb\n").is_err());
        assert!(Templates::parse(&"{name}\n".repeat(5), "a\nb\nc\n").is_err());
        assert_eq!(
            Templates::parse(&"{phrases}\n".repeat(5), "a\nb\nc\n").unwrap().len(),
            5
        );
    }
}

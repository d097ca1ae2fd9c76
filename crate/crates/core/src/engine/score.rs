//! Deterministic relevance scoring.
//!
//! Lexical scoring is normalized token overlap with a phrase bonus for
//! contiguous matches. Semantic scoring is a pluggable [`SemanticScorer`]
//! interface; the built-in default is character-n-gram cosine similarity,
//! which is a pure function of its inputs, so the whole discovery surface
//! stays reproducible without any model download. Real embedding backends
//! plug in behind the same interface, registered by name.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};

use crate::store::word_tokens;

/// Pure content scorer: `(query, content) -> score in [0, 1]`.
///
/// Implementations must return the same score for the same inputs. An
/// implementation that cannot run concurrently returns `true` from
/// [`SemanticScorer::serialized`]; the engine then queues its calls.
pub trait SemanticScorer: Send + Sync {
    fn name(&self) -> &'static str;
    fn score(&self, query: &str, content: &str) -> f64;
    fn serialized(&self) -> bool {
        false
    }
}

/// Character-trigram cosine similarity over lowercased text.
pub struct CharNgramCosine {
    n: usize,
}

impl CharNgramCosine {
    pub fn new() -> Self {
        Self { n: 3 }
    }

    fn ngrams(&self, text: &str) -> BTreeMap<Vec<char>, f64> {
        let chars: Vec<char> = text.to_lowercase().chars().collect();
        let mut counts: BTreeMap<Vec<char>, f64> = BTreeMap::new();
        if chars.len() < self.n {
            if !chars.is_empty() {
                counts.insert(chars, 1.0);
            }
            return counts;
        }
        for window in chars.windows(self.n) {
            *counts.entry(window.to_vec()).or_insert(0.0) += 1.0;
        }
        counts
    }
}

impl Default for CharNgramCosine {
    fn default() -> Self {
        Self::new()
    }
}

impl SemanticScorer for CharNgramCosine {
    fn name(&self) -> &'static str {
        "char-ngram-cosine"
    }

    fn score(&self, query: &str, content: &str) -> f64 {
        let a = self.ngrams(query);
        let b = self.ngrams(content);
        if a.is_empty() || b.is_empty() {
            return 0.0;
        }
        let dot: f64 = a.iter().filter_map(|(g, x)| b.get(g).map(|y| x * y)).sum();
        let norm_a: f64 = a.values().map(|x| x * x).sum::<f64>().sqrt();
        let norm_b: f64 = b.values().map(|x| x * x).sum::<f64>().sqrt();
        let cos = dot / (norm_a * norm_b);
        cos.clamp(0.0, 1.0)
    }
}

/// Jaccard similarity over word-token sets. A coarser alternative scorer,
/// mostly useful to exercise the registry.
pub struct TokenJaccard;

impl SemanticScorer for TokenJaccard {
    fn name(&self) -> &'static str {
        "token-jaccard"
    }

    fn score(&self, query: &str, content: &str) -> f64 {
        let a: BTreeSet<String> = word_tokens(query).into_iter().collect();
        let b: BTreeSet<String> = word_tokens(content).into_iter().collect();
        if a.is_empty() || b.is_empty() {
            return 0.0;
        }
        let inter = a.intersection(&b).count() as f64;
        let union = a.union(&b).count() as f64;
        inter / union
    }
}

/// Wrapper that serializes calls to a scorer that declared itself
/// non-concurrent.
struct QueuedScorer {
    inner: Mutex<Arc<dyn SemanticScorer>>,
    name: &'static str,
}

impl SemanticScorer for QueuedScorer {
    fn name(&self) -> &'static str {
        self.name
    }

    fn score(&self, query: &str, content: &str) -> f64 {
        let guard = self.inner.lock().expect("scorer lock");
        guard.score(query, content)
    }
}

pub const DEFAULT_SCORER: &str = "char-ngram-cosine";

/// Look up a built-in scorer by its registered name, queueing it when it
/// declares itself serialized.
pub fn scorer_by_name(name: &str) -> Option<Arc<dyn SemanticScorer>> {
    let scorer: Arc<dyn SemanticScorer> = match name {
        "char-ngram-cosine" => Arc::new(CharNgramCosine::new()),
        "token-jaccard" => Arc::new(TokenJaccard),
        _ => return None,
    };
    if scorer.serialized() {
        let name = scorer.name();
        return Some(Arc::new(QueuedScorer { inner: Mutex::new(scorer), name }));
    }
    Some(scorer)
}

pub fn scorer_names() -> &'static [&'static str] {
    &["char-ngram-cosine", "token-jaccard"]
}

/// Fusion weights for hybrid search. Weights are renormalized over the
/// queries actually present in a request, so a lexical-only search uses the
/// lexical score at weight 1.
#[derive(Debug, Clone, Copy)]
pub struct FusionWeights {
    pub lexical: f64,
    pub semantic: f64,
}

impl Default for FusionWeights {
    fn default() -> Self {
        Self { lexical: 0.5, semantic: 0.5 }
    }
}

impl FusionWeights {
    /// Fuse the scores of the present queries. `None` when no query was given.
    pub fn fuse(&self, lexical: Option<f64>, semantic: Option<f64>) -> Option<f64> {
        match (lexical, semantic) {
            (None, None) => None,
            (Some(l), None) => Some(l),
            (None, Some(s)) => Some(s),
            (Some(l), Some(s)) => {
                let total = self.lexical + self.semantic;
                if total <= 0.0 {
                    return Some(0.0);
                }
                Some((self.lexical * l + self.semantic * s) / total)
            }
        }
    }
}

/// Normalized token overlap with a phrase bonus:
/// `0.8 * (matched query tokens / total query tokens) + 0.2 * (longest
/// contiguous matched run / total query tokens)`.
pub fn lexical_score(query_tokens: &[String], content_tokens: &[String]) -> f64 {
    if query_tokens.is_empty() || content_tokens.is_empty() {
        return 0.0;
    }
    let content_set: BTreeSet<&str> = content_tokens.iter().map(String::as_str).collect();
    let matched = query_tokens.iter().filter(|t| content_set.contains(t.as_str())).count();
    if matched == 0 {
        return 0.0;
    }
    let total = query_tokens.len() as f64;
    let coverage = matched as f64 / total;
    let run = longest_contiguous_run(query_tokens, content_tokens) as f64 / total;
    0.8 * coverage + 0.2 * run
}

/// Length of the longest contiguous slice of `query` that appears
/// contiguously (and in order) in `content`.
fn longest_contiguous_run(query: &[String], content: &[String]) -> usize {
    let mut best = 0;
    for q_start in 0..query.len() {
        for c_start in 0..content.len() {
            let mut len = 0;
            while q_start + len < query.len()
                && c_start + len < content.len()
                && query[q_start + len] == content[c_start + len]
            {
                len += 1;
            }
            best = best.max(len);
            if best == query.len() {
                return best;
            }
        }
    }
    best
}

/// Convenience entry point scoring raw strings.
pub fn lexical_score_text(query: &str, content: &str) -> f64 {
    lexical_score(&word_tokens(query), &word_tokens(content))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_phrase_match_scores_one() {
        assert_eq!(lexical_score_text("direito à moradia", "o direito à moradia digna"), 1.0);
    }

    #[test]
    fn scattered_match_loses_the_phrase_bonus() {
        // All three tokens present but never contiguous beyond length one.
        let score = lexical_score_text("a b c", "a x b y c");
        let expected = 0.8 * 1.0 + 0.2 * (1.0 / 3.0);
        assert!((score - expected).abs() < 1e-12, "{score}");
    }

    #[test]
    fn no_overlap_scores_zero() {
        assert_eq!(lexical_score_text("moradia", "o lazer e a segurança"), 0.0);
    }

    #[test]
    fn ngram_cosine_is_symmetric_bounded_and_deterministic() {
        let scorer = CharNgramCosine::new();
        let a = scorer.score("direitos sociais", "São direitos sociais a educação");
        let b = scorer.score("direitos sociais", "São direitos sociais a educação");
        assert_eq!(a, b);
        assert!(a > 0.0 && a <= 1.0);
        assert_eq!(scorer.score("xyz", ""), 0.0);
        assert!((scorer.score("moradia", "moradia") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fusion_renormalizes_over_present_queries() {
        let w = FusionWeights::default();
        assert_eq!(w.fuse(Some(0.6), None), Some(0.6));
        assert_eq!(w.fuse(None, Some(0.4)), Some(0.4));
        assert_eq!(w.fuse(Some(1.0), Some(0.0)), Some(0.5));
        assert_eq!(w.fuse(None, None), None);
        let skewed = FusionWeights { lexical: 3.0, semantic: 1.0 };
        assert_eq!(skewed.fuse(Some(1.0), Some(0.0)), Some(0.75));
    }

    #[test]
    fn registry_resolves_builtins() {
        assert!(scorer_by_name("char-ngram-cosine").is_some());
        assert!(scorer_by_name("token-jaccard").is_some());
        assert!(scorer_by_name("bert-base").is_none());
    }
}

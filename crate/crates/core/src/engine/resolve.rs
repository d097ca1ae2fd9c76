//! Reference resolution: natural-language references to ranked candidate ids.
//!
//! Scores are deterministic ordinal confidences, not calibrated
//! probabilities. An exact full-label match scores 1.0; every partial match
//! is capped strictly below it, so exact grounding always outranks fuzzy
//! grounding for the same query.

use crate::error::EngineError;
use crate::model::{EntityId, EntityKind, RankedCandidate};
use crate::store::word_tokens;

use super::score::lexical_score;
use super::Engine;

const DEFAULT_TOP_K: usize = 3;
/// Ceiling for non-exact matches; keeps exact label matches strictly on top.
const PARTIAL_CAP: f64 = 0.99;
/// Applied to candidates outside the context's root Work.
const OUT_OF_CONTEXT_FACTOR: f64 = 0.75;

impl Engine {
    /// Resolve a document/component reference to ranked candidate item ids.
    ///
    /// Candidates are scored on their label plus ancestor labels (including
    /// the root Work), so document-qualified references like "Article 6 of
    /// the Constitution of 1988" rank the right component first. A
    /// `context_id` penalizes candidates outside the context's root Work,
    /// which disambiguates relative references like "Article 1".
    pub fn resolve_item_reference(
        &self,
        reference_text: &str,
        context_id: Option<&EntityId>,
        top_k: Option<usize>,
    ) -> Result<Vec<RankedCandidate>, EngineError> {
        if reference_text.trim().is_empty() {
            return Err(EngineError::BadRequest {
                message: "reference_text must be non-empty".to_string(),
            });
        }
        let context_work = match context_id {
            Some(id) => {
                if self.store().item(id).is_none() {
                    return Err(EngineError::not_found("Item", id));
                }
                self.store().root_work_of(id).cloned()
            }
            None => None,
        };
        let query = word_tokens(reference_text);
        let mut candidates = Vec::new();
        for item in self.store().items() {
            let mut doc = word_tokens(&item.label);
            let mut cursor = item;
            while let Some(parent_id) = &cursor.parent {
                cursor = self.store().item(parent_id).expect("validated corpus");
                doc.extend(word_tokens(&cursor.label));
            }
            let mut confidence = reference_confidence(&query, &item.label, &doc);
            if let Some(work) = &context_work {
                if self.store().root_work_of(&item.id) != Some(work) {
                    confidence *= OUT_OF_CONTEXT_FACTOR;
                }
            }
            if confidence > 0.0 {
                candidates.push(RankedCandidate { id: item.id.clone(), confidence });
            }
        }
        Ok(rank(candidates, top_k))
    }

    /// Resolve a thematic reference to ranked candidate theme ids. Themes are
    /// scored on their label plus any attached texts (descriptions and the
    /// like).
    pub fn resolve_theme_reference(
        &self,
        reference_text: &str,
        top_k: Option<usize>,
    ) -> Result<Vec<RankedCandidate>, EngineError> {
        if reference_text.trim().is_empty() {
            return Err(EngineError::BadRequest {
                message: "reference_text must be non-empty".to_string(),
            });
        }
        let query = word_tokens(reference_text);
        let mut candidates = Vec::new();
        for theme in self.store().themes() {
            let mut doc = word_tokens(&theme.label);
            for unit in self.store().texts_of_node(EntityKind::Theme, &theme.id) {
                doc.extend(word_tokens(&unit.content));
            }
            let confidence = reference_confidence(&query, &theme.label, &doc);
            if confidence > 0.0 {
                candidates.push(RankedCandidate { id: theme.id.clone(), confidence });
            }
        }
        Ok(rank(candidates, top_k))
    }
}

fn reference_confidence(query: &[String], label: &str, doc: &[String]) -> f64 {
    if !query.is_empty() && query == word_tokens(label).as_slice() {
        return 1.0;
    }
    lexical_score(query, doc).min(PARTIAL_CAP)
}

fn rank(mut candidates: Vec<RankedCandidate>, top_k: Option<usize>) -> Vec<RankedCandidate> {
    candidates.sort_by(|a, b| {
        b.confidence
            .partial_cmp(&a.confidence)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.id.cmp(&b.id))
    });
    candidates.truncate(top_k.unwrap_or(DEFAULT_TOP_K));
    candidates
}

//! Hybrid search over text units and items.
//!
//! `search_text_units` answers "what text matches, in this temporal scope":
//! its candidates are texts attached to versions valid at the request
//! timestamp (or right now when omitted), so the no-argument form behaves
//! like a flat RAG index over the currently valid corpus.
//!
//! `search_items` answers "which structural locus has ever dealt with this":
//! it is deliberately time-agnostic and matches against every epoch of an
//! item's text history plus the item's own attached texts.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::model::{
    EntityId, EntityKind, MetadataFilter, Predicate, ScoredItem, ScoredTextUnit, TextUnit,
    Timestamp, ASPECT_CANONICAL,
};
use crate::store::word_tokens;

use super::score::FusionWeights;
use super::Engine;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchTextUnitsParams {
    /// Explicit pre-resolved version scope. Mutually exclusive with
    /// `item_ids`, `theme_ids` and `timestamp`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version_ids: Option<Vec<EntityId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item_ids: Option<Vec<EntityId>>,
    /// Direct members only; no taxonomy expansion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theme_ids: Option<Vec<EntityId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata_filter: Option<MetadataFilter>,
    /// Defaults to the resolved current instant of the request.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<Timestamp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic_query: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexical_query: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    /// Defaults to `["canonical"]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aspects: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    /// Per-request fusion weight overrides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexical_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic_weight: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchItemsParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item_ids: Option<Vec<EntityId>>,
    /// Direct members only; no taxonomy expansion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theme_ids: Option<Vec<EntityId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item_metadata_filter: Option<BTreeMap<String, Predicate>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic_query: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexical_query: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexical_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic_weight: Option<f64>,
}

struct Queries {
    lexical_tokens: Option<Vec<String>>,
    semantic: Option<String>,
    weights: FusionWeights,
}

impl Queries {
    fn present(&self) -> bool {
        self.lexical_tokens.is_some() || self.semantic.is_some()
    }

    /// Fused score of one content string; `None` when no query was given.
    fn score(&self, engine: &Engine, content: &str) -> Option<f64> {
        let lexical = self
            .lexical_tokens
            .as_ref()
            .map(|q| super::score::lexical_score(q, &word_tokens(content)));
        let semantic = self.semantic.as_ref().map(|q| engine.scorer().score(q, content));
        self.weights.fuse(lexical, semantic)
    }
}

impl Engine {
    /// Hybrid search for text units. `now` is the resolved current instant
    /// used when `timestamp` is omitted; callers pin and echo it so runs are
    /// replayable.
    pub fn search_text_units(
        &self,
        params: &SearchTextUnitsParams,
        now: Timestamp,
    ) -> Result<Vec<ScoredTextUnit>, EngineError> {
        let has_scope = params.version_ids.is_some()
            || params.item_ids.is_some()
            || params.theme_ids.is_some();
        if !has_scope && params.semantic_query.is_none() && params.lexical_query.is_none() {
            return Err(EngineError::MissingCriterion {
                message: "searchTextUnits needs a query or a scope parameter".to_string(),
            });
        }
        if params.version_ids.is_some()
            && (params.item_ids.is_some()
                || params.theme_ids.is_some()
                || params.timestamp.is_some())
        {
            return Err(EngineError::ConflictingScope);
        }

        // Candidate versions.
        let mut versions: Vec<&EntityId> = Vec::new();
        if let Some(version_ids) = &params.version_ids {
            for id in version_ids {
                if self.store().version(id).is_none() {
                    return Err(EngineError::UnknownId { id: id.clone() });
                }
            }
            versions.extend(version_ids.iter());
        } else {
            let items = self.scoped_items(params.item_ids.as_deref(), params.theme_ids.as_deref())?;
            let at = params.timestamp.unwrap_or(now);
            for item_id in items {
                if let Some(version) = self.store().lookup_valid_version(item_id, at) {
                    versions.push(&version.id);
                }
            }
        }
        let versions: BTreeSet<&EntityId> = versions.into_iter().collect();

        let filter = params.metadata_filter.clone().unwrap_or_default();
        let queries = self.queries(
            params.lexical_query.as_deref(),
            params.semantic_query.as_deref(),
            params.lexical_weight,
            params.semantic_weight,
        );
        let default_aspects = vec![ASPECT_CANONICAL.to_string()];
        let aspects: &[String] = params.aspects.as_deref().unwrap_or(&default_aspects);

        let mut hits: Vec<ScoredTextUnit> = Vec::new();
        for version_id in versions {
            let version = self.store().version(version_id).expect("scope is resolved");
            if !filter.matches_version(&version.metadata) {
                continue;
            }
            let item = self.store().item(&version.item).expect("validated corpus");
            if !filter.matches_item(&item.metadata) {
                continue;
            }
            for unit in self.store().texts_of_node(EntityKind::Version, version_id) {
                if !aspects.contains(&unit.aspect) {
                    continue;
                }
                if let Some(language) = &params.language {
                    if &unit.language != language {
                        continue;
                    }
                }
                match queries.score(self, &unit.content) {
                    Some(score) if score > 0.0 => {
                        hits.push(ScoredTextUnit { text_unit: unit.clone(), score })
                    }
                    Some(_) => {}
                    // Scope-only search: everything in scope matches fully.
                    None => hits.push(ScoredTextUnit { text_unit: unit.clone(), score: 1.0 }),
                }
            }
        }
        hits.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.text_unit.id.cmp(&b.text_unit.id))
        });
        if let Some(top_k) = params.top_k {
            hits.truncate(top_k);
        }
        Ok(hits)
    }

    /// Hybrid search for items across their entire version history.
    pub fn search_items(
        &self,
        params: &SearchItemsParams,
    ) -> Result<Vec<ScoredItem>, EngineError> {
        let any_criterion = params.item_ids.is_some()
            || params.theme_ids.is_some()
            || params.item_metadata_filter.is_some()
            || params.semantic_query.is_some()
            || params.lexical_query.is_some();
        if !any_criterion {
            return Err(EngineError::MissingCriterion {
                message: "searchItems needs at least one criterion".to_string(),
            });
        }

        let scope = self.scoped_items(params.item_ids.as_deref(), params.theme_ids.as_deref())?;
        let queries = self.queries(
            params.lexical_query.as_deref(),
            params.semantic_query.as_deref(),
            params.lexical_weight,
            params.semantic_weight,
        );

        let mut hits: Vec<ScoredItem> = Vec::new();
        for item_id in scope {
            let item = self.store().item(item_id).expect("scope is resolved");
            if let Some(filter) = &params.item_metadata_filter {
                if !crate::model::filter_matches(filter, &item.metadata) {
                    continue;
                }
            }
            if !queries.present() {
                hits.push(ScoredItem { item: item.clone(), score: 1.0 });
                continue;
            }
            // Max over every text the item has ever carried, any aspect and
            // any epoch, plus its own attached texts.
            let mut best: f64 = 0.0;
            for unit in self.item_texts(item_id) {
                if let Some(score) = queries.score(self, &unit.content) {
                    best = best.max(score);
                }
            }
            if best > 0.0 {
                hits.push(ScoredItem { item: item.clone(), score: best });
            }
        }
        hits.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.item.id.cmp(&b.item.id))
        });
        if let Some(top_k) = params.top_k {
            hits.truncate(top_k);
        }
        Ok(hits)
    }

    /// Resolve the item scope: explicit ids plus direct theme members; all
    /// items when no scope was given. Ids are verified.
    fn scoped_items(
        &self,
        item_ids: Option<&[EntityId]>,
        theme_ids: Option<&[EntityId]>,
    ) -> Result<Vec<&EntityId>, EngineError> {
        if item_ids.is_none() && theme_ids.is_none() {
            return Ok(self.store().items().iter().map(|i| &i.id).collect());
        }
        let mut scope: BTreeSet<&EntityId> = BTreeSet::new();
        if let Some(ids) = item_ids {
            for id in ids {
                match self.store().item(id) {
                    Some(item) => {
                        scope.insert(&item.id);
                    }
                    None => return Err(EngineError::UnknownId { id: id.clone() }),
                }
            }
        }
        if let Some(ids) = theme_ids {
            for id in ids {
                match self.store().theme(id) {
                    Some(theme) => scope.extend(theme.members.iter()),
                    None => return Err(EngineError::UnknownId { id: id.clone() }),
                }
            }
        }
        Ok(scope.into_iter().collect())
    }

    /// Texts attached to the item itself and to any of its versions.
    fn item_texts(&self, item_id: &EntityId) -> Vec<&TextUnit> {
        let mut texts = self.store().texts_of_node(EntityKind::Item, item_id);
        for version in self.store().versions_of_item(item_id) {
            texts.extend(self.store().texts_of_node(EntityKind::Version, &version.id));
        }
        texts
    }

    fn queries(
        &self,
        lexical: Option<&str>,
        semantic: Option<&str>,
        lexical_weight: Option<f64>,
        semantic_weight: Option<f64>,
    ) -> Queries {
        let defaults = self.weights();
        Queries {
            lexical_tokens: lexical.map(word_tokens),
            semantic: semantic.map(str::to_string),
            weights: FusionWeights {
                lexical: lexical_weight.unwrap_or(defaults.lexical),
                semantic: semantic_weight.unwrap_or(defaults.semantic),
            },
        }
    }
}

//! Deterministic fetch: primary-key retrieval, temporal resolution, text
//! lookup, and their batch variants.

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::model::{
    Action, EntityId, EntityKind, Item, TextUnit, Theme, Timestamp, Version, ASPECT_CANONICAL,
};

use super::Engine;

/// A full entity record of any kind, serialized as the record itself.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum AnyEntity<'a> {
    Item(&'a Item),
    Theme(&'a Theme),
    Version(&'a Version),
    Action(&'a Action),
}

/// One entry of a `getBatchTextUnits` request.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextUnitRequest {
    pub source_node_type: EntityKind,
    pub source_node_id: EntityId,
    pub language: String,
    /// Defaults to `["canonical"]` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aspects: Option<Vec<String>>,
}

impl Engine {
    /// Primary-key retrieval of a full entity record.
    pub fn get_entity(&self, kind: EntityKind, id: &EntityId) -> Result<AnyEntity<'_>, EngineError> {
        let store = self.store();
        let found = match kind {
            EntityKind::Item => store.item(id).map(AnyEntity::Item),
            EntityKind::Theme => store.theme(id).map(AnyEntity::Theme),
            EntityKind::Version => store.version(id).map(AnyEntity::Version),
            EntityKind::Action => store.action(id).map(AnyEntity::Action),
        };
        found.ok_or_else(|| EngineError::not_found(kind.to_string(), id))
    }

    /// The unique version of `item_id` in force at `timestamp`.
    ///
    /// Distinguishes an unknown item (`NotFound`) from a known item with no
    /// version covering the date (`NoValidVersion`), so callers can tell
    /// grounding failures from temporal gaps.
    pub fn get_valid_version(
        &self,
        item_id: &EntityId,
        timestamp: Timestamp,
    ) -> Result<&Version, EngineError> {
        if self.store().item(item_id).is_none() {
            return Err(EngineError::not_found("Item", item_id));
        }
        self.store()
            .lookup_valid_version(item_id, timestamp)
            .ok_or_else(|| EngineError::NoValidVersion { item: item_id.clone(), timestamp })
    }

    /// The canonical text of a known version in the requested language.
    pub fn get_text_for_version(
        &self,
        version_id: &EntityId,
        language: &str,
    ) -> Result<&TextUnit, EngineError> {
        if self.store().version(version_id).is_none() {
            return Err(EngineError::not_found("Version", version_id));
        }
        self.store()
            .text_unit(EntityKind::Version, version_id, language, ASPECT_CANONICAL)
            .ok_or_else(|| EngineError::NoTextUnit {
                version: version_id.clone(),
                language: language.to_string(),
            })
    }

    /// Batch primary-key retrieval. Misses are dropped; found records keep
    /// the input order.
    pub fn get_batch(&self, kind: EntityKind, ids: &[EntityId]) -> Vec<AnyEntity<'_>> {
        ids.iter().filter_map(|id| self.get_entity(kind, id).ok()).collect()
    }

    /// Batch temporal resolution on a single date. Items that are unknown or
    /// have no valid version are dropped; found versions keep input order.
    pub fn get_batch_valid_versions(
        &self,
        item_ids: &[EntityId],
        timestamp: Timestamp,
    ) -> Vec<&Version> {
        item_ids.iter().filter_map(|id| self.get_valid_version(id, timestamp).ok()).collect()
    }

    /// Batch text retrieval across arbitrary source nodes, preserving request
    /// order (and aspect order within a request). Misses are dropped.
    pub fn get_batch_text_units(&self, requests: &[TextUnitRequest]) -> Vec<&TextUnit> {
        let canonical = vec![ASPECT_CANONICAL.to_string()];
        let mut out = Vec::new();
        for request in requests {
            let aspects = request.aspects.as_ref().unwrap_or(&canonical);
            for aspect in aspects {
                if let Some(unit) = self.store().text_unit(
                    request.source_node_type,
                    &request.source_node_id,
                    &request.language,
                    aspect,
                ) {
                    out.push(unit);
                }
            }
        }
        out
    }
}

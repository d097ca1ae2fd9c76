//! Causal and lineage analysis, plus the introspection primitives.

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::EngineError;
use crate::model::{Action, EntityId, ItemKind, Theme, TimeInterval, Version};

use super::Engine;

/// Causal attribution of a single version: the action that created it and,
/// when its validity has ended, the action that terminated it.
#[derive(Debug, Clone, Serialize)]
pub struct Causality<'a> {
    pub creating_action: &'a Action,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminating_action: Option<&'a Action>,
}

impl Engine {
    /// Every action that created or terminated a version of the item, sorted
    /// by (date, id). An action that both terminates and produces versions of
    /// the item appears once: the action is the atomic event.
    pub fn get_item_history(&self, item_id: &EntityId) -> Result<Vec<&Action>, EngineError> {
        if self.store().item(item_id).is_none() {
            return Err(EngineError::not_found("Item", item_id));
        }
        Ok(self.store().actions_of_item(item_id))
    }

    /// Pinpoint causal attribution for one version. A version with no
    /// creating action is a corpus defect and is surfaced as
    /// `MissingProvenance`, never masked.
    pub fn trace_causality(&self, version_id: &EntityId) -> Result<Causality<'_>, EngineError> {
        if self.store().version(version_id).is_none() {
            return Err(EngineError::not_found("Version", version_id));
        }
        let creating_action = self
            .store()
            .action_producing(version_id)
            .ok_or_else(|| EngineError::MissingProvenance { version: version_id.clone() })?;
        Ok(Causality {
            creating_action,
            terminating_action: self.store().action_terminating(version_id),
        })
    }

    /// Versions of the given items whose validity overlaps `[start, end]`,
    /// sorted by (validity start, item id, version id). No descendant
    /// expansion: hierarchical scope is built by the caller with
    /// `getItemHierarchy`.
    pub fn get_versions_in_interval(
        &self,
        item_ids: &[EntityId],
        start_date: NaiveDate,
        end_date: NaiveDate,
    ) -> Result<Vec<&Version>, EngineError> {
        if start_date > end_date {
            return Err(EngineError::InvalidInterval {
                start: start_date.to_string(),
                end: end_date.to_string(),
            });
        }
        if item_ids.is_empty() {
            return Err(EngineError::BadRequest {
                message: "item_ids must be a non-empty list; scanning all items is not supported"
                    .to_string(),
            });
        }
        for id in item_ids {
            if self.store().item(id).is_none() {
                return Err(EngineError::not_found("Item", id));
            }
        }
        let mut versions: Vec<&Version> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for id in item_ids {
            if !seen.insert(id.clone()) {
                continue;
            }
            versions.extend(
                self.store()
                    .versions_of_item(id)
                    .into_iter()
                    .filter(|v| v.validity_interval.overlaps(start_date, end_date)),
            );
        }
        versions.sort_by(|a, b| {
            (a.validity_interval.start, &a.item, &a.id)
                .cmp(&(b.validity_interval.start, &b.item, &b.id))
        });
        Ok(versions)
    }

    /// Forward causal tracing: every action authorized by any version inside
    /// the given Work, optionally filtered by action type, sorted by
    /// (date, id).
    pub fn get_actions_by_source(
        &self,
        source_work_id: &EntityId,
        action_types: Option<&[String]>,
    ) -> Result<Vec<&Action>, EngineError> {
        let work = self
            .store()
            .item(source_work_id)
            .ok_or_else(|| EngineError::not_found("Item", source_work_id))?;
        if work.kind != ItemKind::Work {
            return Err(EngineError::NotAWork { id: source_work_id.clone() });
        }
        let mut actions = self.store().actions_from_work(source_work_id);
        if let Some(types) = action_types {
            actions.retain(|a| types.iter().any(|t| t == &a.action_type));
        }
        Ok(actions)
    }

    /// The known version history span of an item: earliest validity start to
    /// latest end, open-ended when any version is still in force.
    pub fn get_temporal_coverage(&self, item_id: &EntityId) -> Result<TimeInterval, EngineError> {
        if self.store().item(item_id).is_none() {
            return Err(EngineError::not_found("Item", item_id));
        }
        let versions = self.store().versions_of_item(item_id);
        if versions.is_empty() {
            return Err(EngineError::NoVersions { item: item_id.clone() });
        }
        let start = versions
            .iter()
            .map(|v| v.validity_interval.start)
            .min()
            .expect("non-empty");
        let mut end = Some(NaiveDate::MIN);
        for version in &versions {
            match (end, version.validity_interval.end) {
                (Some(current), Some(candidate)) => end = Some(current.max(candidate)),
                _ => end = None,
            }
        }
        Ok(TimeInterval { start, end })
    }

    /// Distinct languages of the text units in the graph, sorted.
    pub fn get_available_languages(&self) -> Vec<String> {
        self.store().languages().to_vec()
    }

    /// The action-type vocabulary: every declared type plus every type in
    /// use, sorted.
    pub fn get_supported_action_types(&self) -> Vec<String> {
        self.store().action_type_vocabulary().to_vec()
    }

    /// Full records of the themes with no parents, sorted by id.
    pub fn get_root_themes(&self) -> Vec<&Theme> {
        let mut roots: Vec<&Theme> = self
            .store()
            .themes()
            .iter()
            .filter(|t| t.parents.is_empty())
            .collect();
        roots.sort_by(|a, b| a.id.cmp(&b.id));
        roots
    }
}

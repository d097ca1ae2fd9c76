//! Structural navigation over the timeless hierarchies.

use std::collections::BTreeSet;

use crate::error::EngineError;
use crate::model::{EntityId, HierarchyKind, Item, ItemKind, Theme};

use super::Engine;

impl Engine {
    /// Descendant ids of a hierarchy root, in deterministic pre-order.
    ///
    /// `depth = Some(1)` returns direct children only; omitted or negative
    /// depth returns all descendants. The root itself is excluded. Sibling
    /// order is stored document order for items and versions, id order for
    /// themes and item types. In DAG-shaped hierarchies each node appears
    /// once, at its first visit.
    pub fn get_hierarchy(
        &self,
        kind: HierarchyKind,
        root_id: &EntityId,
        depth: Option<i64>,
    ) -> Result<Vec<EntityId>, EngineError> {
        let exists = match kind {
            HierarchyKind::Item => self.store().item(root_id).is_some(),
            HierarchyKind::Theme => self.store().theme(root_id).is_some(),
            HierarchyKind::Version => self.store().version(root_id).is_some(),
            HierarchyKind::ItemType => self.store().item_type(root_id).is_some(),
        };
        if !exists {
            return Err(EngineError::not_found(kind.to_string(), root_id));
        }
        let limit = match depth {
            Some(d) if d >= 0 => Some(d as u64),
            _ => None,
        };
        let mut visited: BTreeSet<EntityId> = BTreeSet::new();
        let mut out = Vec::new();
        // Pre-order: children pushed in reverse so the leftmost pops first.
        let mut stack: Vec<(EntityId, u64)> = Vec::new();
        for child in self.children_of(kind, root_id).into_iter().rev() {
            stack.push((child, 1));
        }
        while let Some((id, level)) = stack.pop() {
            if limit.is_some_and(|max| level > max) {
                continue;
            }
            if !visited.insert(id.clone()) {
                continue;
            }
            for child in self.children_of(kind, &id).into_iter().rev() {
                stack.push((child, level + 1));
            }
            out.push(id);
        }
        Ok(out)
    }

    fn children_of(&self, kind: HierarchyKind, id: &EntityId) -> Vec<EntityId> {
        match kind {
            HierarchyKind::Item => self
                .store()
                .item(id)
                .map(|item| item.children.clone())
                .unwrap_or_default(),
            HierarchyKind::Version => self
                .store()
                .version_children(id)
                .into_iter()
                .map(|v| v.id.clone())
                .collect(),
            HierarchyKind::Theme => {
                let mut children = self
                    .store()
                    .theme(id)
                    .map(|theme| theme.children.clone())
                    .unwrap_or_default();
                children.sort();
                children
            }
            HierarchyKind::ItemType => self.store().item_type_children(id).to_vec(),
        }
    }

    /// Structural lineage of an item: the path from its highest-level
    /// ancestor below the root Work down to its immediate parent. The Work
    /// itself is excluded, so a Work and a Work's direct child both get an
    /// empty path.
    pub fn get_item_ancestors(&self, item_id: &EntityId) -> Result<Vec<&Item>, EngineError> {
        let mut cursor = self
            .store()
            .item(item_id)
            .ok_or_else(|| EngineError::not_found("Item", item_id))?;
        let mut path = Vec::new();
        while let Some(parent_id) = &cursor.parent {
            let parent = self
                .store()
                .item(parent_id)
                .expect("validated corpus: parent exists");
            if parent.kind == ItemKind::Work {
                break;
            }
            path.push(parent);
            cursor = parent;
        }
        path.reverse();
        Ok(path)
    }

    /// Themes whose members directly include the item, sorted by id. No
    /// taxonomy expansion: propagating a theme down an item hierarchy is the
    /// caller's job.
    pub fn get_themes_for_item(&self, item_id: &EntityId) -> Result<Vec<&Theme>, EngineError> {
        if self.store().item(item_id).is_none() {
            return Err(EngineError::not_found("Item", item_id));
        }
        Ok(self.store().themes_of_member(item_id))
    }
}

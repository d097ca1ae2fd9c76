//! Frozen, indexed graph store.
//!
//! [`GraphStore::load`] validates a corpus, builds every access-path index,
//! and freezes the result. All indices are derived data: rebuilding them from
//! the entity tables yields identical query results, which is what makes the
//! on-disk snapshot (see [`crate::snapshot`]) observation-equivalent to
//! re-ingestion. After load the store is read-only and safe for unlimited
//! concurrent readers.

use std::collections::{BTreeMap, BTreeSet};

use sha2::{Digest, Sha256};

use crate::corpus::Corpus;
use crate::model::{
    Action, EntityId, EntityKind, Item, ItemKind, ItemType, TextUnit, Theme, Timestamp, Version,
};
use crate::validate::{validate_corpus, ValidationReport};

/// Key of the text-unit index: (source kind, source id, language, aspect).
type TextKey = (EntityKind, EntityId, String, String);

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("corpus failed validation with {} violation(s)", .0.violations.len())]
    ValidationFailed(ValidationReport),
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: EntityKind, id: EntityId },
}

#[derive(Debug)]
pub struct GraphStore {
    corpus: Corpus,
    digest: String,

    item_index: BTreeMap<EntityId, usize>,
    theme_index: BTreeMap<EntityId, usize>,
    version_index: BTreeMap<EntityId, usize>,
    action_index: BTreeMap<EntityId, usize>,
    item_type_index: BTreeMap<EntityId, usize>,
    item_types: Vec<ItemType>,

    /// Per-item versions sorted by (validity start, id); starts are pairwise
    /// disjoint per item, so binary search on start plus an end check is a
    /// complete point lookup.
    versions_by_item: BTreeMap<EntityId, Vec<usize>>,
    /// Version child adjacency (derived from `parents`), in corpus order.
    version_children: BTreeMap<EntityId, Vec<usize>>,
    /// Item-type child adjacency, in id order.
    item_type_children: BTreeMap<EntityId, Vec<EntityId>>,
    /// Themes listing an item among their members, in id order.
    themes_by_member: BTreeMap<EntityId, Vec<usize>>,

    actions_producing: BTreeMap<EntityId, usize>,
    actions_terminating: BTreeMap<EntityId, usize>,
    /// Actions that created or terminated any version of an item, sorted by
    /// (date, id).
    actions_by_item: BTreeMap<EntityId, Vec<usize>>,
    /// Actions whose source version belongs to the given root Work, sorted by
    /// (date, id). Resolved at build time so forward tracing is O(answer).
    actions_by_source_work: BTreeMap<EntityId, Vec<usize>>,
    /// Root Work of every item.
    root_work: BTreeMap<EntityId, EntityId>,

    text_units: BTreeMap<TextKey, usize>,
    /// Every text unit attached to a node, in corpus order.
    texts_by_node: BTreeMap<(EntityKind, EntityId), Vec<usize>>,
    /// Inverted lexical index: lowercase word token -> text unit postings.
    lexical_index: BTreeMap<String, BTreeSet<usize>>,

    languages: Vec<String>,
    action_type_vocabulary: Vec<String>,
}

impl GraphStore {
    /// Validate and index a corpus. The corpus must produce an empty
    /// [`ValidationReport`].
    pub fn load(corpus: Corpus) -> Result<Self, LoadError> {
        let item_index = build_index(corpus.items.iter().map(|i| &i.id), EntityKind::Item)?;
        let theme_index = build_index(corpus.themes.iter().map(|t| &t.id), EntityKind::Theme)?;
        let version_index =
            build_index(corpus.versions.iter().map(|v| &v.id), EntityKind::Version)?;
        let action_index = build_index(corpus.actions.iter().map(|a| &a.id), EntityKind::Action)?;

        let report = validate_corpus(&corpus);
        if !report.is_empty() {
            return Err(LoadError::ValidationFailed(report));
        }

        let mut item_types = corpus.item_types.clone();
        item_types.extend(corpus.implicit_item_types());
        let item_type_index: BTreeMap<EntityId, usize> =
            item_types.iter().enumerate().map(|(i, t)| (t.id.clone(), i)).collect();

        let mut versions_by_item: BTreeMap<EntityId, Vec<usize>> = BTreeMap::new();
        let mut version_children: BTreeMap<EntityId, Vec<usize>> = BTreeMap::new();
        for (idx, version) in corpus.versions.iter().enumerate() {
            versions_by_item.entry(version.item.clone()).or_default().push(idx);
            for parent in &version.parents {
                version_children.entry(parent.clone()).or_default().push(idx);
            }
        }
        for indices in versions_by_item.values_mut() {
            indices.sort_by_key(|&i| {
                let v = &corpus.versions[i];
                (v.validity_interval.start, v.id.clone())
            });
        }

        let mut item_type_children: BTreeMap<EntityId, Vec<EntityId>> = BTreeMap::new();
        for ty in &item_types {
            if let Some(parent) = &ty.parent {
                item_type_children.entry(parent.clone()).or_default().push(ty.id.clone());
            }
        }
        for children in item_type_children.values_mut() {
            children.sort();
        }

        let mut themes_by_member: BTreeMap<EntityId, Vec<usize>> = BTreeMap::new();
        for (idx, theme) in corpus.themes.iter().enumerate() {
            for member in &theme.members {
                themes_by_member.entry(member.clone()).or_default().push(idx);
            }
        }
        for indices in themes_by_member.values_mut() {
            indices.sort_by_key(|&i| corpus.themes[i].id.clone());
        }

        let mut root_work: BTreeMap<EntityId, EntityId> = BTreeMap::new();
        for item in &corpus.items {
            let mut cursor = item;
            while let Some(parent) = &cursor.parent {
                cursor = &corpus.items[item_index[parent]];
            }
            root_work.insert(item.id.clone(), cursor.id.clone());
        }

        let mut actions_producing = BTreeMap::new();
        let mut actions_terminating = BTreeMap::new();
        let mut actions_by_item: BTreeMap<EntityId, Vec<usize>> = BTreeMap::new();
        let mut actions_by_source_work: BTreeMap<EntityId, Vec<usize>> = BTreeMap::new();
        for (idx, action) in corpus.actions.iter().enumerate() {
            let mut touched = BTreeSet::new();
            if let Some(produced) = &action.produces_version {
                actions_producing.insert(produced.clone(), idx);
                touched.insert(corpus.versions[version_index[produced]].item.clone());
            }
            if let Some(terminated) = &action.terminates_version {
                actions_terminating.insert(terminated.clone(), idx);
                touched.insert(corpus.versions[version_index[terminated]].item.clone());
            }
            for item in touched {
                actions_by_item.entry(item).or_default().push(idx);
            }
            let source_item = &corpus.versions[version_index[&action.source_version]].item;
            let work = root_work[source_item].clone();
            actions_by_source_work.entry(work).or_default().push(idx);
        }
        let by_date = |indices: &mut Vec<usize>| {
            indices.sort_by_key(|&i| (corpus.actions[i].date, corpus.actions[i].id.clone()));
            indices.dedup();
        };
        actions_by_item.values_mut().for_each(by_date);
        actions_by_source_work.values_mut().for_each(by_date);

        let mut text_units: BTreeMap<TextKey, usize> = BTreeMap::new();
        let mut texts_by_node: BTreeMap<(EntityKind, EntityId), Vec<usize>> = BTreeMap::new();
        let mut lexical_index: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        let mut languages = BTreeSet::new();
        for (idx, unit) in corpus.text_units.iter().enumerate() {
            text_units.insert(
                (
                    unit.source_node_type,
                    unit.source_node_id.clone(),
                    unit.language.clone(),
                    unit.aspect.clone(),
                ),
                idx,
            );
            texts_by_node
                .entry((unit.source_node_type, unit.source_node_id.clone()))
                .or_default()
                .push(idx);
            for token in word_tokens(&unit.content) {
                lexical_index.entry(token).or_default().insert(idx);
            }
            languages.insert(unit.language.clone());
        }

        let mut action_type_vocabulary: BTreeSet<String> =
            corpus.action_types.iter().cloned().collect();
        for action in &corpus.actions {
            action_type_vocabulary.insert(action.action_type.clone());
        }

        let digest = corpus_digest(&corpus);

        Ok(GraphStore {
            corpus,
            digest,
            item_index,
            theme_index,
            version_index,
            action_index,
            item_type_index,
            item_types,
            versions_by_item,
            version_children,
            item_type_children,
            themes_by_member,
            actions_producing,
            actions_terminating,
            actions_by_item,
            actions_by_source_work,
            root_work,
            text_units,
            texts_by_node,
            lexical_index,
            languages: languages.into_iter().collect(),
            action_type_vocabulary: action_type_vocabulary.into_iter().collect(),
        })
    }

    /// SHA-256 over the canonical, id-sorted corpus serialization. Snapshots
    /// and audit-log headers pin this value.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    // ---- entity tables -----------------------------------------------------

    pub fn item(&self, id: &EntityId) -> Option<&Item> {
        self.item_index.get(id).map(|&i| &self.corpus.items[i])
    }

    pub fn theme(&self, id: &EntityId) -> Option<&Theme> {
        self.theme_index.get(id).map(|&i| &self.corpus.themes[i])
    }

    pub fn version(&self, id: &EntityId) -> Option<&Version> {
        self.version_index.get(id).map(|&i| &self.corpus.versions[i])
    }

    pub fn action(&self, id: &EntityId) -> Option<&Action> {
        self.action_index.get(id).map(|&i| &self.corpus.actions[i])
    }

    pub fn item_type(&self, id: &EntityId) -> Option<&ItemType> {
        self.item_type_index.get(id).map(|&i| &self.item_types[i])
    }

    pub fn items(&self) -> &[Item] {
        &self.corpus.items
    }

    pub fn themes(&self) -> &[Theme] {
        &self.corpus.themes
    }

    pub fn versions(&self) -> &[Version] {
        &self.corpus.versions
    }

    pub fn actions(&self) -> &[Action] {
        &self.corpus.actions
    }

    pub fn text_units_all(&self) -> &[TextUnit] {
        &self.corpus.text_units
    }

    // ---- temporal resolution ----------------------------------------------

    /// The unique version of `item_id` valid at `at` (half-open intervals),
    /// or `None` when no version covers the probe date. Equivalent to a
    /// linear scan over the item's versions.
    pub fn lookup_valid_version(&self, item_id: &EntityId, at: Timestamp) -> Option<&Version> {
        let date = at.date();
        let indices = self.versions_by_item.get(item_id)?;
        // First version with start > date; the candidate precedes it.
        let upper = indices
            .partition_point(|&i| self.corpus.versions[i].validity_interval.start <= date);
        if upper == 0 {
            return None;
        }
        let candidate = &self.corpus.versions[indices[upper - 1]];
        candidate.validity_interval.contains(date).then_some(candidate)
    }

    /// Versions of an item sorted by (validity start, id).
    pub fn versions_of_item(&self, item_id: &EntityId) -> Vec<&Version> {
        self.versions_by_item
            .get(item_id)
            .map(|indices| indices.iter().map(|&i| &self.corpus.versions[i]).collect())
            .unwrap_or_default()
    }

    // ---- adjacency ----------------------------------------------------------

    /// Child versions (versions naming `version_id` as a parent), in corpus
    /// declaration order.
    pub fn version_children(&self, version_id: &EntityId) -> Vec<&Version> {
        self.version_children
            .get(version_id)
            .map(|indices| indices.iter().map(|&i| &self.corpus.versions[i]).collect())
            .unwrap_or_default()
    }

    /// Child item types, in id order.
    pub fn item_type_children(&self, type_id: &EntityId) -> &[EntityId] {
        self.item_type_children.get(type_id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Themes whose members directly include `item_id`, in id order.
    pub fn themes_of_member(&self, item_id: &EntityId) -> Vec<&Theme> {
        self.themes_by_member
            .get(item_id)
            .map(|indices| indices.iter().map(|&i| &self.corpus.themes[i]).collect())
            .unwrap_or_default()
    }

    /// Root Work of an item (the item itself when it is a Work).
    pub fn root_work_of(&self, item_id: &EntityId) -> Option<&EntityId> {
        self.root_work.get(item_id)
    }

    // ---- causal indices ------------------------------------------------------

    pub fn action_producing(&self, version_id: &EntityId) -> Option<&Action> {
        self.actions_producing.get(version_id).map(|&i| &self.corpus.actions[i])
    }

    pub fn action_terminating(&self, version_id: &EntityId) -> Option<&Action> {
        self.actions_terminating.get(version_id).map(|&i| &self.corpus.actions[i])
    }

    /// Actions that created or terminated any version of `item_id`, sorted by
    /// (date, id); an action touching the item twice appears once.
    pub fn actions_of_item(&self, item_id: &EntityId) -> Vec<&Action> {
        self.actions_by_item
            .get(item_id)
            .map(|indices| indices.iter().map(|&i| &self.corpus.actions[i]).collect())
            .unwrap_or_default()
    }

    /// Actions authorized by any version inside the given root Work, sorted
    /// by (date, id).
    pub fn actions_from_work(&self, work_id: &EntityId) -> Vec<&Action> {
        self.actions_by_source_work
            .get(work_id)
            .map(|indices| indices.iter().map(|&i| &self.corpus.actions[i]).collect())
            .unwrap_or_default()
    }

    // ---- text ----------------------------------------------------------------

    /// The unique text unit for (source kind, source id, language, aspect).
    pub fn text_unit(
        &self,
        kind: EntityKind,
        source: &EntityId,
        language: &str,
        aspect: &str,
    ) -> Option<&TextUnit> {
        self.text_units
            .get(&(kind, source.clone(), language.to_string(), aspect.to_string()))
            .map(|&i| &self.corpus.text_units[i])
    }

    /// All text units attached to a node, in corpus order.
    pub fn texts_of_node(&self, kind: EntityKind, source: &EntityId) -> Vec<&TextUnit> {
        self.texts_by_node
            .get(&(kind, source.clone()))
            .map(|indices| indices.iter().map(|&i| &self.corpus.text_units[i]).collect())
            .unwrap_or_default()
    }

    /// Text units whose content contains the given (already lowercased) word
    /// token.
    pub fn texts_with_token(&self, token: &str) -> Option<&BTreeSet<usize>> {
        self.lexical_index.get(token)
    }

    pub fn text_unit_at(&self, idx: usize) -> &TextUnit {
        &self.corpus.text_units[idx]
    }

    // ---- introspection ---------------------------------------------------------

    /// Distinct text-unit languages, sorted.
    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    /// Declared action-type vocabulary plus every type in use, sorted.
    pub fn action_type_vocabulary(&self) -> &[String] {
        &self.action_type_vocabulary
    }

    pub fn item_types_all(&self) -> &[ItemType] {
        &self.item_types
    }
}

fn build_index<'a>(
    ids: impl Iterator<Item = &'a EntityId>,
    kind: EntityKind,
) -> Result<BTreeMap<EntityId, usize>, LoadError> {
    let mut index = BTreeMap::new();
    for (i, id) in ids.enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(LoadError::DuplicateId { kind, id: id.clone() });
        }
    }
    Ok(index)
}

/// Unicode-aware lowercase word tokens: split on non-alphanumeric characters,
/// no stemming, diacritics preserved. "moradia," indexes as "moradia";
/// "São" as "são".
pub fn word_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

fn corpus_digest(corpus: &Corpus) -> String {
    // Sort every table by id so the digest identifies graph content, not
    // file ordering.
    let mut sorted = corpus.clone();
    sorted.items.sort_by(|a, b| a.id.cmp(&b.id));
    sorted.themes.sort_by(|a, b| a.id.cmp(&b.id));
    sorted.versions.sort_by(|a, b| a.id.cmp(&b.id));
    sorted.actions.sort_by(|a, b| a.id.cmp(&b.id));
    sorted.text_units.sort_by(|a, b| a.id.cmp(&b.id));
    sorted.item_types.sort_by(|a, b| a.id.cmp(&b.id));
    sorted.action_types.sort();
    let bytes = serde_json::to_vec(&sorted).expect("corpus serializes");
    hex::encode(Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TimeInterval;

    fn corpus_one_item() -> Corpus {
        let mut corpus = Corpus::default();
        corpus.items.push(Item {
            id: "w".into(),
            kind: ItemKind::Work,
            type_id: "law".into(),
            label: "W".into(),
            uri: None,
            parent: None,
            children: vec![],
            metadata: Default::default(),
        });
        for (id, start, end) in [
            ("v1", "1990-01-01", Some("1995-06-15")),
            ("v2", "1995-06-15", Some("2003-01-01")),
            // gap 2003-01-01 .. 2004-01-01
            ("v3", "2004-01-01", None),
        ] {
            corpus.versions.push(Version {
                id: id.into(),
                item: "w".into(),
                validity_interval: TimeInterval {
                    start: start.parse().unwrap(),
                    end: end.map(|e| e.parse().unwrap()),
                },
                uri: None,
                parents: vec![],
                metadata: Default::default(),
            });
        }
        corpus
    }

    fn ts(s: &str) -> Timestamp {
        Timestamp::parse(s).unwrap()
    }

    #[test]
    fn lookup_matches_linear_scan_including_gaps_and_boundaries() {
        let store = GraphStore::load(corpus_one_item()).unwrap();
        let item = EntityId::from("w");
        for probe in [
            "1989-12-31", "1990-01-01", "1995-06-14", "1995-06-15", "2002-12-31", "2003-01-01",
            "2003-06-01", "2004-01-01", "2030-01-01",
        ] {
            let at = ts(probe);
            let fast = store.lookup_valid_version(&item, at).map(|v| v.id.clone());
            let slow = store
                .versions_of_item(&item)
                .into_iter()
                .find(|v| v.validity_interval.contains(at.date()))
                .map(|v| v.id.clone());
            assert_eq!(fast, slow, "probe {probe}");
        }
    }

    #[test]
    fn empty_corpus_loads_to_empty_store() {
        let store = GraphStore::load(Corpus::default()).unwrap();
        assert!(store.items().is_empty());
        assert!(store.languages().is_empty());
        assert!(store.lookup_valid_version(&"x".into(), ts("2000-01-01")).is_none());
    }

    #[test]
    fn failing_corpus_is_rejected_with_report() {
        let mut corpus = corpus_one_item();
        corpus.versions[0].validity_interval.end = None; // two open-ended versions
        match GraphStore::load(corpus) {
            Err(LoadError::ValidationFailed(report)) => {
                assert!(report.has("open-ended-version-uniqueness"))
            }
            other => panic!("expected ValidationFailed, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_are_rejected_before_validation() {
        let mut corpus = corpus_one_item();
        let dup = corpus.versions[0].clone();
        corpus.versions.push(dup);
        assert!(matches!(
            GraphStore::load(corpus),
            Err(LoadError::DuplicateId { kind: EntityKind::Version, .. })
        ));
    }

    #[test]
    fn digest_ignores_record_order() {
        let corpus = corpus_one_item();
        let mut shuffled = corpus.clone();
        shuffled.versions.reverse();
        assert_eq!(corpus_digest(&corpus), corpus_digest(&shuffled));
    }

    #[test]
    fn word_tokens_are_unicode_lowercase_with_punctuation_stripped() {
        assert_eq!(
            word_tokens("São direitos, o lazer, (Revogado)"),
            vec!["são", "direitos", "o", "lazer", "revogado"]
        );
        assert_eq!(word_tokens("  "), Vec::<String>::new());
    }
}

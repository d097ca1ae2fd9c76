//! Corpus invariant validation.
//!
//! Every corpus must produce an empty [`ValidationReport`] before the store
//! accepts it. Violations are data, not failures: the validator never errors,
//! it enumerates everything it finds, deterministically sorted by
//! `(invariant name, first offending id)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::model::{EntityId, EntityKind, ItemKind};

/// A single invariant violation: the invariant's stable name, the offending
/// entity ids, and a human-readable detail line.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub invariant: String,
    pub ids: Vec<EntityId>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, invariant: &str) -> bool {
        self.violations.iter().any(|v| v.invariant == invariant)
    }
}

struct Checker<'a> {
    corpus: &'a Corpus,
    violations: Vec<Violation>,
    items: BTreeMap<&'a EntityId, &'a crate::model::Item>,
    themes: BTreeMap<&'a EntityId, &'a crate::model::Theme>,
    versions: BTreeMap<&'a EntityId, &'a crate::model::Version>,
    actions: BTreeMap<&'a EntityId, &'a crate::model::Action>,
    item_types: BTreeSet<&'a EntityId>,
}

/// Check every corpus invariant. Empty report means the corpus is loadable.
pub fn validate_corpus(corpus: &Corpus) -> ValidationReport {
    let mut checker = Checker {
        corpus,
        violations: Vec::new(),
        items: BTreeMap::new(),
        themes: BTreeMap::new(),
        versions: BTreeMap::new(),
        actions: BTreeMap::new(),
        item_types: BTreeSet::new(),
    };
    checker.build_tables();
    checker.check_items();
    checker.check_item_types();
    checker.check_themes();
    checker.check_versions();
    checker.check_actions();
    checker.check_text_units();

    let mut violations = checker.violations;
    violations.sort();
    violations.dedup();
    ValidationReport { violations }
}

impl<'a> Checker<'a> {
    fn push(&mut self, invariant: &str, ids: Vec<EntityId>, detail: String) {
        self.violations.push(Violation { invariant: invariant.to_string(), ids, detail });
    }

    fn build_tables(&mut self) {
        for item in &self.corpus.items {
            if item.id.0.is_empty() {
                self.push("id-nonempty", vec![], "Item with empty id".into());
            }
            if self.items.insert(&item.id, item).is_some() {
                self.push(
                    "id-uniqueness",
                    vec![item.id.clone()],
                    format!("duplicate Item id {}", item.id),
                );
            }
        }
        for theme in &self.corpus.themes {
            if theme.id.0.is_empty() {
                self.push("id-nonempty", vec![], "Theme with empty id".into());
            }
            if self.themes.insert(&theme.id, theme).is_some() {
                self.push(
                    "id-uniqueness",
                    vec![theme.id.clone()],
                    format!("duplicate Theme id {}", theme.id),
                );
            }
        }
        for version in &self.corpus.versions {
            if version.id.0.is_empty() {
                self.push("id-nonempty", vec![], "Version with empty id".into());
            }
            if self.versions.insert(&version.id, version).is_some() {
                self.push(
                    "id-uniqueness",
                    vec![version.id.clone()],
                    format!("duplicate Version id {}", version.id),
                );
            }
        }
        for action in &self.corpus.actions {
            if action.id.0.is_empty() {
                self.push("id-nonempty", vec![], "Action with empty id".into());
            }
            if self.actions.insert(&action.id, action).is_some() {
                self.push(
                    "id-uniqueness",
                    vec![action.id.clone()],
                    format!("duplicate Action id {}", action.id),
                );
            }
        }
        let mut text_ids = BTreeSet::new();
        for unit in &self.corpus.text_units {
            if unit.id.is_empty() {
                self.push("id-nonempty", vec![], "TextUnit with empty id".into());
            }
            if !text_ids.insert(&unit.id) {
                self.push(
                    "id-uniqueness",
                    vec![EntityId::new(unit.id.clone())],
                    format!("duplicate TextUnit id {}", unit.id),
                );
            }
        }
        for ty in &self.corpus.item_types {
            if ty.id.0.is_empty() {
                self.push("id-nonempty", vec![], "ItemType with empty id".into());
            }
            if !self.item_types.insert(&ty.id) {
                self.push(
                    "id-uniqueness",
                    vec![ty.id.clone()],
                    format!("duplicate ItemType id {}", ty.id),
                );
            }
        }
    }

    fn check_items(&mut self) {
        let declared_types = !self.corpus.item_types.is_empty();
        for item in &self.corpus.items {
            match (item.kind, &item.parent) {
                (ItemKind::Work, Some(parent)) => self.push(
                    "work-has-no-parent",
                    vec![item.id.clone()],
                    format!("Work {} declares parent {}", item.id, parent),
                ),
                (ItemKind::WorkComponent, None) => self.push(
                    "component-has-parent",
                    vec![item.id.clone()],
                    format!("WorkComponent {} has no parent", item.id),
                ),
                _ => {}
            }
            if let Some(parent) = &item.parent {
                match self.items.get(parent) {
                    None => self.push(
                        "item-parent-exists",
                        vec![item.id.clone(), parent.clone()],
                        format!("parent {} of {} does not exist", parent, item.id),
                    ),
                    Some(p) => {
                        if !p.children.contains(&item.id) {
                            self.push(
                                "item-parent-child-consistency",
                                vec![item.id.clone(), parent.clone()],
                                format!("{} names parent {} but is not in its children", item.id, parent),
                            );
                        }
                    }
                }
            }
            let mut seen_children = BTreeSet::new();
            for child in &item.children {
                if !seen_children.insert(child) {
                    self.push(
                        "item-parent-child-consistency",
                        vec![item.id.clone(), child.clone()],
                        format!("{} lists child {} more than once", item.id, child),
                    );
                    continue;
                }
                match self.items.get(child) {
                    None => self.push(
                        "item-child-exists",
                        vec![item.id.clone(), child.clone()],
                        format!("child {} of {} does not exist", child, item.id),
                    ),
                    Some(c) => {
                        if c.parent.as_ref() != Some(&item.id) {
                            self.push(
                                "item-parent-child-consistency",
                                vec![item.id.clone(), child.clone()],
                                format!("{} lists child {} whose parent differs", item.id, child),
                            );
                        }
                    }
                }
            }
            if declared_types && !self.item_types.contains(&item.type_id) {
                self.push(
                    "item-type-exists",
                    vec![item.id.clone(), item.type_id.clone()],
                    format!("item {} has undeclared type {}", item.id, item.type_id),
                );
            }
        }
        // Parent chains must terminate (forest shape, no cycles).
        for item in &self.corpus.items {
            let mut seen = BTreeSet::new();
            let mut cursor = item;
            while let Some(parent) = &cursor.parent {
                if !seen.insert(&cursor.id) {
                    self.push(
                        "item-forest-acyclic",
                        vec![item.id.clone()],
                        format!("parent chain of {} contains a cycle", item.id),
                    );
                    break;
                }
                match self.items.get(parent) {
                    Some(p) => cursor = p,
                    None => break, // reported as item-parent-exists
                }
            }
        }
    }

    fn check_item_types(&mut self) {
        for ty in &self.corpus.item_types {
            if let Some(parent) = &ty.parent {
                if !self.item_types.contains(parent) {
                    self.push(
                        "itemtype-parent-exists",
                        vec![ty.id.clone(), parent.clone()],
                        format!("item type {} has undeclared parent {}", ty.id, parent),
                    );
                }
            }
        }
        let by_id: BTreeMap<&EntityId, &crate::model::ItemType> =
            self.corpus.item_types.iter().map(|t| (&t.id, t)).collect();
        for ty in &self.corpus.item_types {
            let mut seen = BTreeSet::new();
            let mut cursor = ty;
            while let Some(parent) = &cursor.parent {
                if !seen.insert(&cursor.id) {
                    self.push(
                        "itemtype-forest-acyclic",
                        vec![ty.id.clone()],
                        format!("item-type parent chain of {} contains a cycle", ty.id),
                    );
                    break;
                }
                match by_id.get(parent) {
                    Some(p) => cursor = p,
                    None => break,
                }
            }
        }
    }

    fn check_themes(&mut self) {
        for theme in &self.corpus.themes {
            for parent in &theme.parents {
                match self.themes.get(parent) {
                    None => self.push(
                        "theme-parent-exists",
                        vec![theme.id.clone(), parent.clone()],
                        format!("parent {} of theme {} does not exist", parent, theme.id),
                    ),
                    Some(p) => {
                        if !p.children.contains(&theme.id) {
                            self.push(
                                "theme-parent-child-consistency",
                                vec![theme.id.clone(), parent.clone()],
                                format!("theme {} names parent {} but is not in its children", theme.id, parent),
                            );
                        }
                    }
                }
            }
            for child in &theme.children {
                match self.themes.get(child) {
                    None => self.push(
                        "theme-child-exists",
                        vec![theme.id.clone(), child.clone()],
                        format!("child {} of theme {} does not exist", child, theme.id),
                    ),
                    Some(c) => {
                        if !c.parents.contains(&theme.id) {
                            self.push(
                                "theme-parent-child-consistency",
                                vec![theme.id.clone(), child.clone()],
                                format!("theme {} lists child {} that does not name it as parent", theme.id, child),
                            );
                        }
                    }
                }
            }
            for member in &theme.members {
                if !self.items.contains_key(member) {
                    self.push(
                        "theme-member-exists",
                        vec![theme.id.clone(), member.clone()],
                        format!("member {} of theme {} does not exist", member, theme.id),
                    );
                }
            }
        }
        // DAG check over parent edges: depth-first with a path set.
        let mut state: BTreeMap<&EntityId, u8> = BTreeMap::new(); // 1 = on path, 2 = done
        for theme in &self.corpus.themes {
            if state.contains_key(&theme.id) {
                continue;
            }
            let mut stack = vec![(theme, false)];
            let mut cyclic = Vec::new();
            while let Some((node, expanded)) = stack.pop() {
                if expanded {
                    state.insert(&node.id, 2);
                    continue;
                }
                match state.get(&node.id) {
                    Some(1) => continue,
                    Some(2) => continue,
                    _ => {}
                }
                state.insert(&node.id, 1);
                stack.push((node, true));
                for parent in &node.parents {
                    if let Some(p) = self.themes.get(parent) {
                        if state.get(parent) == Some(&1) {
                            cyclic.push(node.id.clone());
                        } else if state.get(parent) != Some(&2) {
                            stack.push((p, false));
                        }
                    }
                }
            }
            for id in cyclic {
                self.push(
                    "theme-dag-acyclic",
                    vec![id.clone()],
                    format!("theme parent edges reachable from {} form a cycle", id),
                );
            }
        }
    }

    fn check_versions(&mut self) {
        let mut by_item: BTreeMap<&EntityId, Vec<&crate::model::Version>> = BTreeMap::new();
        for version in &self.corpus.versions {
            by_item.entry(&version.item).or_default().push(version);
            if let Some(end) = version.validity_interval.end {
                if version.validity_interval.start >= end {
                    self.push(
                        "interval-start-before-end",
                        vec![version.id.clone()],
                        format!(
                            "version {} has start {} not before end {}",
                            version.id, version.validity_interval.start, end
                        ),
                    );
                }
            }
            let Some(item) = self.items.get(&version.item).copied() else {
                self.push(
                    "version-item-exists",
                    vec![version.id.clone(), version.item.clone()],
                    format!("version {} references missing item {}", version.id, version.item),
                );
                continue;
            };
            if item.kind == ItemKind::Work && !version.parents.is_empty() {
                self.push(
                    "work-version-no-parents",
                    vec![version.id.clone()],
                    format!("version {} of Work {} declares parent versions", version.id, item.id),
                );
            }
            for parent in &version.parents {
                match self.versions.get(parent) {
                    None => self.push(
                        "version-parent-exists",
                        vec![version.id.clone(), parent.clone()],
                        format!("parent version {} of {} does not exist", parent, version.id),
                    ),
                    Some(pv) => {
                        if item.parent.as_ref() != Some(&pv.item) {
                            self.push(
                                "version-parent-item-alignment",
                                vec![version.id.clone(), parent.clone()],
                                format!(
                                    "parent version {} belongs to {}, not to the structural parent of {}",
                                    parent, pv.item, item.id
                                ),
                            );
                        }
                    }
                }
            }
        }
        for (item_id, versions) in by_item {
            let open: Vec<_> =
                versions.iter().filter(|v| v.validity_interval.end.is_none()).collect();
            if open.len() > 1 {
                let mut ids: Vec<EntityId> = open.iter().map(|v| v.id.clone()).collect();
                ids.sort();
                self.push(
                    "open-ended-version-uniqueness",
                    ids,
                    format!("item {} has {} open-ended versions", item_id, open.len()),
                );
            }
            let mut sorted = versions.clone();
            sorted.sort_by_key(|v| (v.validity_interval.start, v.id.clone()));
            for pair in sorted.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let overlap = match a.validity_interval.end {
                    None => true, // open interval swallows every later start
                    Some(end) => b.validity_interval.start < end,
                };
                if overlap {
                    self.push(
                        "version-intervals-disjoint",
                        vec![a.id.clone(), b.id.clone()],
                        format!("versions {} and {} of item {} overlap", a.id, b.id, item_id),
                    );
                }
            }
        }
    }

    fn check_actions(&mut self) {
        let vocabulary: BTreeSet<&str> =
            self.corpus.action_types.iter().map(String::as_str).collect();
        let mut producers: BTreeMap<&EntityId, Vec<&EntityId>> = BTreeMap::new();
        let mut terminators: BTreeMap<&EntityId, Vec<&EntityId>> = BTreeMap::new();
        for action in &self.corpus.actions {
            if action.terminates_version.is_none() && action.produces_version.is_none() {
                self.push(
                    "action-effect-present",
                    vec![action.id.clone()],
                    format!("action {} neither terminates nor produces a version", action.id),
                );
            }
            if !self.versions.contains_key(&action.source_version) {
                self.push(
                    "action-source-exists",
                    vec![action.id.clone(), action.source_version.clone()],
                    format!("action {} has missing source version {}", action.id, action.source_version),
                );
            }
            if let Some(produced) = &action.produces_version {
                producers.entry(produced).or_default().push(&action.id);
                match self.versions.get(produced) {
                    None => self.push(
                        "action-produces-exists",
                        vec![action.id.clone(), produced.clone()],
                        format!("action {} produces missing version {}", action.id, produced),
                    ),
                    Some(v) => {
                        if v.validity_interval.start != action.date {
                            self.push(
                                "action-produces-start-alignment",
                                vec![action.id.clone(), produced.clone()],
                                format!(
                                    "action {} dated {} produces version {} starting {}",
                                    action.id, action.date, produced, v.validity_interval.start
                                ),
                            );
                        }
                    }
                }
            }
            if let Some(terminated) = &action.terminates_version {
                terminators.entry(terminated).or_default().push(&action.id);
                match self.versions.get(terminated) {
                    None => self.push(
                        "action-terminates-exists",
                        vec![action.id.clone(), terminated.clone()],
                        format!("action {} terminates missing version {}", action.id, terminated),
                    ),
                    Some(v) => {
                        if v.validity_interval.end != Some(action.date) {
                            self.push(
                                "action-terminates-end-alignment",
                                vec![action.id.clone(), terminated.clone()],
                                format!(
                                    "action {} dated {} terminates version {} ending {:?}",
                                    action.id, action.date, terminated, v.validity_interval.end
                                ),
                            );
                        }
                    }
                }
            }
            if let (Some(t), Some(p)) = (&action.terminates_version, &action.produces_version) {
                if let (Some(tv), Some(pv)) = (self.versions.get(t), self.versions.get(p)) {
                    if tv.item != pv.item {
                        self.push(
                            "action-same-item",
                            vec![action.id.clone()],
                            format!(
                                "action {} terminates a version of {} but produces one of {}",
                                action.id, tv.item, pv.item
                            ),
                        );
                    }
                }
            }
            if !vocabulary.is_empty() && !vocabulary.contains(action.action_type.as_str()) {
                self.push(
                    "action-type-supported",
                    vec![action.id.clone()],
                    format!("action {} has undeclared type {:?}", action.id, action.action_type),
                );
            }
        }
        // Causal attribution requires a unique producer/terminator per version.
        for (version, actions) in producers {
            if actions.len() > 1 {
                let mut ids: Vec<EntityId> = actions.into_iter().cloned().collect();
                ids.sort();
                self.push(
                    "version-producer-uniqueness",
                    ids,
                    format!("version {} is produced by more than one action", version),
                );
            }
        }
        for (version, actions) in terminators {
            if actions.len() > 1 {
                let mut ids: Vec<EntityId> = actions.into_iter().cloned().collect();
                ids.sort();
                self.push(
                    "version-terminator-uniqueness",
                    ids,
                    format!("version {} is terminated by more than one action", version),
                );
            }
        }
    }

    fn check_text_units(&mut self) {
        let mut keys: BTreeSet<(&EntityId, &str, &str)> = BTreeSet::new();
        for unit in &self.corpus.text_units {
            let exists = match unit.source_node_type {
                EntityKind::Item => self.items.contains_key(&unit.source_node_id),
                EntityKind::Theme => self.themes.contains_key(&unit.source_node_id),
                EntityKind::Version => self.versions.contains_key(&unit.source_node_id),
                EntityKind::Action => self.actions.contains_key(&unit.source_node_id),
            };
            if !exists {
                self.push(
                    "textunit-source-exists",
                    vec![EntityId::new(unit.id.clone()), unit.source_node_id.clone()],
                    format!(
                        "text unit {} references missing {} {}",
                        unit.id, unit.source_node_type, unit.source_node_id
                    ),
                );
            }
            if !keys.insert((&unit.source_node_id, &unit.language, &unit.aspect)) {
                self.push(
                    "textunit-uniqueness",
                    vec![EntityId::new(unit.id.clone())],
                    format!(
                        "more than one text unit for ({}, {}, {})",
                        unit.source_node_id, unit.language, unit.aspect
                    ),
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;
    use chrono::NaiveDate;

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn work(id: &str, children: &[&str]) -> Item {
        Item {
            id: id.into(),
            kind: ItemKind::Work,
            type_id: "law".into(),
            label: id.to_string(),
            uri: None,
            parent: None,
            children: children.iter().map(|c| EntityId::from(*c)).collect(),
            metadata: Metadata::new(),
        }
    }

    fn component(id: &str, parent: &str) -> Item {
        Item {
            id: id.into(),
            kind: ItemKind::WorkComponent,
            type_id: "article".into(),
            label: id.to_string(),
            uri: None,
            parent: Some(parent.into()),
            children: Vec::new(),
            metadata: Metadata::new(),
        }
    }

    fn version(id: &str, item: &str, start: &str, end: Option<&str>) -> Version {
        Version {
            id: id.into(),
            item: item.into(),
            validity_interval: TimeInterval { start: date(start), end: end.map(date) },
            uri: None,
            parents: Vec::new(),
            metadata: Metadata::new(),
        }
    }

    fn small_corpus() -> Corpus {
        Corpus {
            items: vec![work("w", &["w_a"]), component("w_a", "w")],
            versions: vec![
                version("v1", "w_a", "1990-01-01", Some("2000-01-01")),
                version("v2", "w_a", "2000-01-01", None),
            ],
            actions: vec![
                Action {
                    id: "a1".into(),
                    action_type: "Creation".into(),
                    date: date("1990-01-01"),
                    source_version: "v1".into(),
                    terminates_version: None,
                    produces_version: Some("v1".into()),
                    metadata: Metadata::new(),
                },
                Action {
                    id: "a2".into(),
                    action_type: "Amendment".into(),
                    date: date("2000-01-01"),
                    source_version: "v1".into(),
                    terminates_version: Some("v1".into()),
                    produces_version: Some("v2".into()),
                    metadata: Metadata::new(),
                },
            ],
            action_types: vec!["Creation".into(), "Amendment".into()],
            ..Default::default()
        }
    }

    #[test]
    fn valid_corpus_has_empty_report() {
        let report = validate_corpus(&small_corpus());
        assert!(report.is_empty(), "{report:?}");
        // Idempotent: re-validating an accepted corpus stays clean.
        assert!(validate_corpus(&small_corpus()).is_empty());
    }

    #[test]
    fn two_open_ended_versions_are_rejected() {
        let mut corpus = small_corpus();
        corpus.versions[0].validity_interval.end = None;
        corpus.actions.clear();
        let report = validate_corpus(&corpus);
        assert!(report.has("open-ended-version-uniqueness"), "{report:?}");
    }

    #[test]
    fn produces_start_misalignment_is_rejected() {
        let mut corpus = small_corpus();
        corpus.actions[1].date = date("2000-01-02");
        let report = validate_corpus(&corpus);
        assert!(report.has("action-produces-start-alignment"), "{report:?}");
        assert!(report.has("action-terminates-end-alignment"), "{report:?}");
    }

    #[test]
    fn every_invariant_is_individually_negatable() {
        // Each mutation flips exactly one field and must surface the named
        // invariant in the report.
        let cases: Vec<(&str, Box<dyn Fn(&mut Corpus)>)> = vec![
            ("work-has-no-parent", Box::new(|c| c.items[0].parent = Some("w_a".into()))),
            ("component-has-parent", Box::new(|c| c.items[1].parent = None)),
            ("item-parent-exists", Box::new(|c| c.items[1].parent = Some("ghost".into()))),
            ("item-child-exists", Box::new(|c| c.items[0].children.push("ghost".into()))),
            (
                "item-parent-child-consistency",
                Box::new(|c| c.items[0].children.clear()),
            ),
            ("interval-start-before-end", Box::new(|c| {
                c.versions[0].validity_interval.end = Some(date("1990-01-01"));
            })),
            ("version-item-exists", Box::new(|c| c.versions[0].item = "ghost".into())),
            ("version-intervals-disjoint", Box::new(|c| {
                c.versions[1].validity_interval.start = date("1999-01-01");
            })),
            ("version-parent-exists", Box::new(|c| c.versions[0].parents.push("ghost".into()))),
            ("action-effect-present", Box::new(|c| {
                c.actions[1].terminates_version = None;
                c.actions[1].produces_version = None;
            })),
            ("action-source-exists", Box::new(|c| c.actions[0].source_version = "ghost".into())),
            ("action-type-supported", Box::new(|c| c.actions[0].action_type = "Annexation".into())),
            ("textunit-source-exists", Box::new(|c| {
                c.text_units.push(TextUnit {
                    id: "t1".into(),
                    source_node_type: EntityKind::Version,
                    source_node_id: "ghost".into(),
                    language: "pt-BR".into(),
                    aspect: "canonical".into(),
                    content: "x".into(),
                });
            })),
            ("textunit-uniqueness", Box::new(|c| {
                for id in ["t1", "t2"] {
                    c.text_units.push(TextUnit {
                        id: id.into(),
                        source_node_type: EntityKind::Version,
                        source_node_id: "v1".into(),
                        language: "pt-BR".into(),
                        aspect: "canonical".into(),
                        content: "x".into(),
                    });
                }
            })),
            ("version-producer-uniqueness", Box::new(|c| {
                let mut dup = c.actions[0].clone();
                dup.id = "a3".into();
                c.actions.push(dup);
            })),
            ("id-uniqueness", Box::new(|c| c.items.push(work("w", &[])))),
        ];
        for (invariant, mutate) in cases {
            let mut corpus = small_corpus();
            mutate(&mut corpus);
            let report = validate_corpus(&corpus);
            assert!(report.has(invariant), "expected {invariant}, got {report:?}");
        }
    }

    #[test]
    fn report_is_sorted_by_invariant_then_id() {
        let mut corpus = small_corpus();
        corpus.items[1].parent = Some("ghost".into());
        corpus.actions[0].source_version = "ghost".into();
        let report = validate_corpus(&corpus);
        let names: Vec<&str> = report.violations.iter().map(|v| v.invariant.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }
}

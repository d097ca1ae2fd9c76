//! Corpus interchange format.
//!
//! A corpus is a directory holding one UTF-8 JSON file per entity kind:
//!
//! | file             | contents                         |
//! |------------------|----------------------------------|
//! | `items.json`     | list of [`Item`] records         |
//! | `themes.json`    | list of [`Theme`] records        |
//! | `versions.json`  | list of [`Version`] records      |
//! | `actions.json`   | list of [`Action`] records       |
//! | `textunits.json` | list of [`TextUnit`] records     |
//! | `itemtypes.json` | list of [`ItemType`] records (optional) |
//! | `actiontypes.json` | list of action-type names (optional) |
//!
//! A missing per-kind file is an empty list. `itemtypes.json` declares the
//! item-type taxonomy; when absent, the types referenced by items become flat
//! root nodes. `actiontypes.json` declares the action-type vocabulary, which
//! may be a superset of the types in use. Records with unknown fields are
//! rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{Action, EntityId, Item, ItemType, TextUnit, Theme, Version};

/// The full set of records that make up one graph.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    #[serde(default)]
    pub items: Vec<Item>,
    #[serde(default)]
    pub themes: Vec<Theme>,
    #[serde(default)]
    pub versions: Vec<Version>,
    #[serde(default)]
    pub actions: Vec<Action>,
    #[serde(default)]
    pub text_units: Vec<TextUnit>,
    #[serde(default)]
    pub item_types: Vec<ItemType>,
    #[serde(default)]
    pub action_types: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusIoError {
    #[error("corpus path {0} is not a directory")]
    NotADirectory(String),
    #[error("failed to read {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {file}: {source}")]
    Malformed {
        file: String,
        #[source]
        source: serde_json::Error,
    },
}

const ITEMS: &str = "items.json";
const THEMES: &str = "themes.json";
const VERSIONS: &str = "versions.json";
const ACTIONS: &str = "actions.json";
const TEXT_UNITS: &str = "textunits.json";
const ITEM_TYPES: &str = "itemtypes.json";
const ACTION_TYPES: &str = "actiontypes.json";

impl Corpus {
    /// Read a corpus from a directory of per-kind JSON files.
    pub fn read_dir(dir: impl AsRef<Path>) -> Result<Self, CorpusIoError> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(CorpusIoError::NotADirectory(dir.display().to_string()));
        }
        Ok(Corpus {
            items: read_list(dir, ITEMS)?,
            themes: read_list(dir, THEMES)?,
            versions: read_list(dir, VERSIONS)?,
            actions: read_list(dir, ACTIONS)?,
            text_units: read_list(dir, TEXT_UNITS)?,
            item_types: read_list(dir, ITEM_TYPES)?,
            action_types: read_list(dir, ACTION_TYPES)?,
        })
    }

    /// Write the corpus back out as per-kind JSON files.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<(), CorpusIoError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|source| CorpusIoError::Io {
            file: dir.display().to_string(),
            source,
        })?;
        write_list(dir, ITEMS, &self.items)?;
        write_list(dir, THEMES, &self.themes)?;
        write_list(dir, VERSIONS, &self.versions)?;
        write_list(dir, ACTIONS, &self.actions)?;
        write_list(dir, TEXT_UNITS, &self.text_units)?;
        if !self.item_types.is_empty() {
            write_list(dir, ITEM_TYPES, &self.item_types)?;
        }
        if !self.action_types.is_empty() {
            write_list(dir, ACTION_TYPES, &self.action_types)?;
        }
        Ok(())
    }

    /// Merge another corpus into this one, appending record lists.
    pub fn merge(&mut self, other: Corpus) {
        self.items.extend(other.items);
        self.themes.extend(other.themes);
        self.versions.extend(other.versions);
        self.actions.extend(other.actions);
        self.text_units.extend(other.text_units);
        self.item_types.extend(other.item_types);
        for ty in other.action_types {
            if !self.action_types.contains(&ty) {
                self.action_types.push(ty);
            }
        }
    }

    /// Item-type ids referenced by items but not declared in `item_types`.
    /// These become implicit flat root nodes of the type taxonomy.
    pub fn implicit_item_types(&self) -> Vec<ItemType> {
        let declared: std::collections::BTreeSet<&EntityId> =
            self.item_types.iter().map(|t| &t.id).collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut implicit = Vec::new();
        for item in &self.items {
            if !declared.contains(&item.type_id) && seen.insert(item.type_id.clone()) {
                implicit.push(ItemType {
                    id: item.type_id.clone(),
                    label: item.type_id.0.clone(),
                    parent: None,
                });
            }
        }
        implicit
    }
}

fn read_list<T: serde::de::DeserializeOwned>(
    dir: &Path,
    name: &str,
) -> Result<Vec<T>, CorpusIoError> {
    let path = dir.join(name);
    if !path.exists() {
        return Ok(Vec::new());
    }
    let bytes = fs::read(&path).map_err(|source| CorpusIoError::Io {
        file: path.display().to_string(),
        source,
    })?;
    serde_json::from_slice(&bytes).map_err(|source| CorpusIoError::Malformed {
        file: path.display().to_string(),
        source,
    })
}

fn write_list<T: Serialize>(dir: &Path, name: &str, list: &[T]) -> Result<(), CorpusIoError> {
    let path = dir.join(name);
    let mut bytes = serde_json::to_vec_pretty(list).expect("corpus records serialize");
    bytes.push(b'\n');
    fs::write(&path, bytes).map_err(|source| CorpusIoError::Io {
        file: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_files_mean_empty_lists() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = Corpus::read_dir(dir.path()).unwrap();
        assert_eq!(corpus, Corpus::default());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("items.json"),
            r#"[{"id":"a","kind":"Work","type_id":"t","label":"A","extra":1}]"#,
        )
        .unwrap();
        let err = Corpus::read_dir(dir.path()).unwrap_err();
        assert!(matches!(err, CorpusIoError::Malformed { .. }), "{err}");
    }

    #[test]
    fn round_trips_through_directory() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = Corpus {
            action_types: vec!["Creation".into()],
            ..Default::default()
        };
        corpus.write_dir(dir.path()).unwrap();
        assert_eq!(Corpus::read_dir(dir.path()).unwrap(), corpus);
    }
}

//! Structure-aware version comparison.
//!
//! Textual comparison works on whitespace-delimited tokens with punctuation
//! attached, so an amendment that inserts one word reports one insert edit.
//! The edit script is minimal (longest-common-subsequence): applying it to
//! the left version's token stream reproduces the right version's exactly.
//! Structural comparison is the symmetric difference of the two versions'
//! child-component item sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::model::{EntityId, EntityKind, ASPECT_CANONICAL};

use super::Engine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditOp {
    Insert,
    Delete,
    Replace,
}

/// One edit of the minimal token edit script.
///
/// `position` is a token index into version A's stream, before any edits are
/// applied: an insert places `tokens_b` before `A[position]` (appends when
/// `position == len(A)`), a delete removes `tokens_a` starting at `position`,
/// and a replace does both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextualEdit {
    pub op: EditOp,
    pub position: usize,
    pub tokens_a: Vec<String>,
    pub tokens_b: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    ComponentAdded,
    ComponentRemoved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralChange {
    pub change: ChangeKind,
    pub item: EntityId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextDiffReport {
    pub version_a: EntityId,
    pub version_b: EntityId,
    /// The language whose canonical texts were compared.
    pub language: String,
    pub textual_edits: Vec<TextualEdit>,
    pub structural_changes: Vec<StructuralChange>,
}

impl Engine {
    /// Granular comparison of two versions of the same item.
    ///
    /// The compared texts are the canonical units in a language both versions
    /// carry; when several are shared, the lexicographically first language
    /// code wins.
    pub fn compare_versions(
        &self,
        version_id_a: &EntityId,
        version_id_b: &EntityId,
    ) -> Result<TextDiffReport, EngineError> {
        let a = self
            .store()
            .version(version_id_a)
            .ok_or_else(|| EngineError::not_found("Version", version_id_a))?;
        let b = self
            .store()
            .version(version_id_b)
            .ok_or_else(|| EngineError::not_found("Version", version_id_b))?;
        if version_id_a == version_id_b {
            return Err(EngineError::IdenticalVersions { id: version_id_a.clone() });
        }
        if a.item != b.item {
            return Err(EngineError::DifferentItems {
                a: version_id_a.clone(),
                b: version_id_b.clone(),
            });
        }

        let language = self
            .shared_canonical_language(version_id_a, version_id_b)
            .ok_or_else(|| EngineError::NoComparableText {
                a: version_id_a.clone(),
                b: version_id_b.clone(),
            })?;
        let text_a = self
            .store()
            .text_unit(EntityKind::Version, version_id_a, &language, ASPECT_CANONICAL)
            .expect("language chosen from shared set");
        let text_b = self
            .store()
            .text_unit(EntityKind::Version, version_id_b, &language, ASPECT_CANONICAL)
            .expect("language chosen from shared set");

        let tokens_a = diff_tokens(&text_a.content);
        let tokens_b = diff_tokens(&text_b.content);
        let textual_edits = edit_script(&tokens_a, &tokens_b);

        let children_a = self.child_component_items(version_id_a);
        let children_b = self.child_component_items(version_id_b);
        let mut structural_changes: Vec<StructuralChange> = children_b
            .difference(&children_a)
            .map(|item| StructuralChange { change: ChangeKind::ComponentAdded, item: item.clone() })
            .chain(children_a.difference(&children_b).map(|item| StructuralChange {
                change: ChangeKind::ComponentRemoved,
                item: item.clone(),
            }))
            .collect();
        structural_changes.sort_by(|x, y| (&x.item, x.change).cmp(&(&y.item, y.change)));

        Ok(TextDiffReport {
            version_a: version_id_a.clone(),
            version_b: version_id_b.clone(),
            language,
            textual_edits,
            structural_changes,
        })
    }

    fn shared_canonical_language(&self, a: &EntityId, b: &EntityId) -> Option<String> {
        let langs_of = |id: &EntityId| -> BTreeSet<String> {
            self.store()
                .texts_of_node(EntityKind::Version, id)
                .into_iter()
                .filter(|u| u.aspect == ASPECT_CANONICAL)
                .map(|u| u.language.clone())
                .collect()
        };
        let shared: BTreeSet<String> =
            langs_of(a).intersection(&langs_of(b)).cloned().collect();
        shared.into_iter().next()
    }

    /// The items whose versions name the given version as a parent.
    fn child_component_items(&self, version_id: &EntityId) -> BTreeSet<EntityId> {
        self.store()
            .version_children(version_id)
            .into_iter()
            .map(|v| v.item.clone())
            .collect()
    }
}

/// Diff tokens: whitespace-delimited, punctuation attached, case preserved.
pub fn diff_tokens(content: &str) -> Vec<String> {
    content.split_whitespace().map(str::to_string).collect()
}

/// Minimal edit script between two token streams, grouped into
/// insert/delete/replace runs anchored on the LCS.
fn edit_script(a: &[String], b: &[String]) -> Vec<TextualEdit> {
    // Trim the common prefix and suffix first; the DP then only sees the
    // changed middle.
    let prefix = a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count();
    let suffix = a[prefix..]
        .iter()
        .rev()
        .zip(b[prefix..].iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let core_a = &a[prefix..a.len() - suffix];
    let core_b = &b[prefix..b.len() - suffix];

    let anchors = lcs_pairs(core_a, core_b);

    let mut edits = Vec::new();
    let mut i = 0; // cursor into core_a
    let mut j = 0; // cursor into core_b
    let mut emit = |i: usize, gap_a: &[String], gap_b: &[String]| {
        if gap_a.is_empty() && gap_b.is_empty() {
            return;
        }
        let op = match (gap_a.is_empty(), gap_b.is_empty()) {
            (true, false) => EditOp::Insert,
            (false, true) => EditOp::Delete,
            _ => EditOp::Replace,
        };
        edits.push(TextualEdit {
            op,
            position: prefix + i,
            tokens_a: gap_a.to_vec(),
            tokens_b: gap_b.to_vec(),
        });
    };
    for (ai, bj) in anchors {
        emit(i, &core_a[i..ai], &core_b[j..bj]);
        i = ai + 1;
        j = bj + 1;
    }
    emit(i, &core_a[i..], &core_b[j..]);
    edits
}

/// Index pairs of one longest common subsequence of `a` and `b`.
fn lcs_pairs(a: &[String], b: &[String]) -> Vec<(usize, usize)> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return Vec::new();
    }
    // lengths[i][j] = LCS length of a[i..] and b[j..]
    let mut lengths = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lengths[i][j] = if a[i] == b[j] {
                lengths[i + 1][j + 1] + 1
            } else {
                lengths[i + 1][j].max(lengths[i][j + 1])
            };
        }
    }
    let mut pairs = Vec::with_capacity(lengths[0][0] as usize);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if lengths[i + 1][j] >= lengths[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        diff_tokens(s)
    }

    /// Test-local edit application, mirroring the documented semantics.
    fn apply(a: &[String], edits: &[TextualEdit]) -> Vec<String> {
        let mut out = Vec::new();
        let mut cursor = 0;
        for edit in edits {
            out.extend_from_slice(&a[cursor..edit.position]);
            cursor = edit.position;
            match edit.op {
                EditOp::Insert => out.extend(edit.tokens_b.iter().cloned()),
                EditOp::Delete => cursor += edit.tokens_a.len(),
                EditOp::Replace => {
                    cursor += edit.tokens_a.len();
                    out.extend(edit.tokens_b.iter().cloned());
                }
            }
        }
        out.extend_from_slice(&a[cursor..]);
        out
    }

    #[test]
    fn single_word_insertion_is_one_insert_edit() {
        let a = toks("o trabalho, o lazer, e a segurança");
        let b = toks("o trabalho, o lazer, moradia e a segurança");
        let edits = edit_script(&a, &b);
        assert_eq!(edits.len(), 1);
        assert_eq!(edits[0].op, EditOp::Insert);
        assert_eq!(edits[0].tokens_b, vec!["moradia"]);
        assert_eq!(a[edits[0].position - 1], "lazer,");
        assert_eq!(apply(&a, &edits), b);
    }

    #[test]
    fn identical_streams_produce_no_edits() {
        let a = toks("na forma desta Constituição.");
        assert!(edit_script(&a, &a).is_empty());
    }

    #[test]
    fn replace_and_delete_runs_group() {
        let a = toks("a b c d e");
        let b = toks("a x y d");
        let edits = edit_script(&a, &b);
        assert_eq!(edits.len(), 2);
        assert_eq!(edits[0].op, EditOp::Replace);
        assert_eq!(edits[0].tokens_a, vec!["b", "c"]);
        assert_eq!(edits[0].tokens_b, vec!["x", "y"]);
        assert_eq!(edits[1].op, EditOp::Delete);
        assert_eq!(edits[1].tokens_a, vec!["e"]);
        assert_eq!(apply(&a, &edits), b);
    }

    #[test]
    fn edits_round_trip_on_edge_shapes() {
        let cases = [
            ("", "x y z"),
            ("x y z", ""),
            ("", ""),
            ("a", "b"),
            ("a a a", "a a"),
            ("um dois três", "zero um dois três quatro"),
        ];
        for (left, right) in cases {
            let a = toks(left);
            let b = toks(right);
            let edits = edit_script(&a, &b);
            assert_eq!(apply(&a, &edits), b, "{left:?} -> {right:?}");
        }
    }

    #[test]
    fn script_is_minimal_for_single_token_changes() {
        // One replace, not a delete+insert pair.
        let a = toks("direito a educação");
        let b = toks("direito a moradia");
        let edits = edit_script(&a, &b);
        assert_eq!(edits.len(), 1);
        assert_eq!(edits[0].op, EditOp::Replace);
    }
}

//! Core domain types for the temporal document graph.
//!
//! Five node kinds make up a corpus: [`Item`] (the timeless structural
//! hierarchy of a document), [`Theme`] (a multi-parent conceptual taxonomy),
//! [`Version`] (a time-bound state of an Item), [`Action`] (a reified event
//! that terminates and/or produces Versions), and [`TextUnit`] (language- and
//! aspect-tagged text attached to any node).
//!
//! All types are immutable value objects once a corpus is loaded; they are
//! safe to share across concurrent readers.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, NaiveDate, SecondsFormat, TimeZone, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Canonical identifier of a graph entity (URN-like, opaque).
///
/// Lexicographic order over ids is the engine-wide tie-break order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub String);

impl EntityId {
    pub fn new(s: impl Into<String>) -> Self {
        Self(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

/// The four addressable node kinds of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Item,
    Theme,
    Version,
    Action,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EntityKind::Item => "Item",
            EntityKind::Theme => "Theme",
            EntityKind::Version => "Version",
            EntityKind::Action => "Action",
        };
        f.write_str(s)
    }
}

/// Node kinds with a navigable hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HierarchyKind {
    Item,
    Theme,
    Version,
    ItemType,
}

impl fmt::Display for HierarchyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HierarchyKind::Item => "Item",
            HierarchyKind::Theme => "Theme",
            HierarchyKind::Version => "Version",
            HierarchyKind::ItemType => "ItemType",
        };
        f.write_str(s)
    }
}

/// Whether an [`Item`] is a whole document or a structural part of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ItemKind {
    Work,
    WorkComponent,
}

/// A scalar metadata value. Nested structures are intentionally rejected so
/// that filter predicates stay decidable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetaValue {
    Bool(bool),
    Number(f64),
    Date(NaiveDate),
    Text(String),
}

pub type Metadata = BTreeMap<String, MetaValue>;

/// Timeless structural node of a document hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Item {
    pub id: EntityId,
    pub kind: ItemKind,
    pub type_id: EntityId,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uri: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<EntityId>,
    /// Structural children in document order.
    #[serde(default)]
    pub children: Vec<EntityId>,
    #[serde(default)]
    pub metadata: Metadata,
}

/// Conceptual classification node in a multi-parent taxonomy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theme {
    pub id: EntityId,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uri: Option<String>,
    #[serde(default)]
    pub parents: Vec<EntityId>,
    #[serde(default)]
    pub children: Vec<EntityId>,
    /// Items directly classified under this theme.
    #[serde(default)]
    pub members: Vec<EntityId>,
    #[serde(default)]
    pub metadata: Metadata,
}

/// Half-open validity interval `[start, end)`.
///
/// An absent end means the interval is open-ended (currently valid).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeInterval {
    pub start: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<NaiveDate>,
}

impl TimeInterval {
    /// True iff `date` falls inside `[start, end)`.
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && self.end.map_or(true, |end| date < end)
    }

    /// True iff this interval overlaps the closed probe window `[from, to]`.
    pub fn overlaps(&self, from: NaiveDate, to: NaiveDate) -> bool {
        self.start <= to && self.end.map_or(true, |end| end > from)
    }
}

/// Time-bound state of an [`Item`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Version {
    pub id: EntityId,
    pub item: EntityId,
    pub validity_interval: TimeInterval,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uri: Option<String>,
    /// Snapshot links to parent Versions. Modeled as a list so an unchanged
    /// child Version can be reused under multiple parent Versions.
    #[serde(default)]
    pub parents: Vec<EntityId>,
    #[serde(default)]
    pub metadata: Metadata,
}

/// Reified atomic event linking a source Version to the Version it
/// terminates and/or produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Action {
    pub id: EntityId,
    #[serde(rename = "type")]
    pub action_type: String,
    pub date: NaiveDate,
    pub source_version: EntityId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminates_version: Option<EntityId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub produces_version: Option<EntityId>,
    #[serde(default)]
    pub metadata: Metadata,
}

/// Language- and aspect-tagged text attached to a graph node.
///
/// The `"canonical"` aspect of a Version carries the operative wording; other
/// aspects (`"summary"`, `"description"`, ...) are free-form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextUnit {
    pub id: String,
    pub source_node_type: EntityKind,
    pub source_node_id: EntityId,
    pub language: String,
    pub aspect: String,
    pub content: String,
}

pub const ASPECT_CANONICAL: &str = "canonical";

/// Node of the item-type taxonomy (e.g. article, paragraph).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemType {
    pub id: EntityId,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<EntityId>,
}

/// A discovery result: a candidate entity id with an ordinal confidence.
///
/// Confidences are deterministic ordinal scores in `[0, 1]`, not calibrated
/// probabilities. Result lists sort by `(confidence desc, id asc)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub id: EntityId,
    pub confidence: f64,
}

/// A search hit over text units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTextUnit {
    pub text_unit: TextUnit,
    pub score: f64,
}

/// A search hit over items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredItem {
    pub item: Item,
    pub score: f64,
}

/// Comparison operator of a range predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RangeOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

/// A metadata predicate. A missing key fails the predicate; a type mismatch
/// between the predicate value and the metadata value also fails it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Equals(MetaValue),
    In(Vec<MetaValue>),
    Range { op: RangeOp, value: MetaValue },
}

impl Predicate {
    pub fn matches(&self, value: Option<&MetaValue>) -> bool {
        let Some(value) = value else { return false };
        match self {
            Predicate::Equals(expected) => meta_eq(value, expected),
            Predicate::In(options) => options.iter().any(|o| meta_eq(value, o)),
            Predicate::Range { op, value: bound } => match meta_cmp(value, bound) {
                Some(ord) => match op {
                    RangeOp::Lt => ord == std::cmp::Ordering::Less,
                    RangeOp::Le => ord != std::cmp::Ordering::Greater,
                    RangeOp::Gt => ord == std::cmp::Ordering::Greater,
                    RangeOp::Ge => ord != std::cmp::Ordering::Less,
                },
                None => false,
            },
        }
    }
}

fn meta_eq(a: &MetaValue, b: &MetaValue) -> bool {
    meta_cmp(a, b) == Some(std::cmp::Ordering::Equal)
}

/// Same-variant comparison; `None` on type mismatch.
fn meta_cmp(a: &MetaValue, b: &MetaValue) -> Option<std::cmp::Ordering> {
    match (a, b) {
        (MetaValue::Bool(x), MetaValue::Bool(y)) => Some(x.cmp(y)),
        (MetaValue::Number(x), MetaValue::Number(y)) => x.partial_cmp(y),
        (MetaValue::Date(x), MetaValue::Date(y)) => Some(x.cmp(y)),
        (MetaValue::Text(x), MetaValue::Text(y)) => Some(x.cmp(y)),
        _ => None,
    }
}

/// Structured filters applied to item and version metadata during search.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataFilter {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub item_metadata_filter: BTreeMap<String, Predicate>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub version_metadata_filter: BTreeMap<String, Predicate>,
}

impl MetadataFilter {
    pub fn is_empty(&self) -> bool {
        self.item_metadata_filter.is_empty() && self.version_metadata_filter.is_empty()
    }

    pub fn matches_item(&self, metadata: &Metadata) -> bool {
        filter_matches(&self.item_metadata_filter, metadata)
    }

    pub fn matches_version(&self, metadata: &Metadata) -> bool {
        filter_matches(&self.version_metadata_filter, metadata)
    }
}

pub(crate) fn filter_matches(filter: &BTreeMap<String, Predicate>, metadata: &Metadata) -> bool {
    filter.iter().all(|(key, pred)| pred.matches(metadata.get(key)))
}

/// A point in time, accepted as an ISO 8601 date or date-time.
///
/// Comparisons against validity intervals happen at date granularity: the
/// time-of-day is truncated. The canonical form is RFC 3339 UTC with second
/// precision, so echoed timestamps round-trip byte-identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Timestamp(DateTime<Utc>);

impl Timestamp {
    pub fn from_datetime(dt: DateTime<Utc>) -> Self {
        Self(dt.with_nanosecond_zeroed())
    }

    pub fn from_date(date: NaiveDate) -> Self {
        Self(Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).expect("midnight is valid")))
    }

    /// Wall clock, truncated to whole seconds.
    pub fn now() -> Self {
        Self::from_datetime(Utc::now())
    }

    pub fn parse(s: &str) -> Result<Self, TimestampParseError> {
        if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
            return Ok(Self::from_datetime(dt.with_timezone(&Utc)));
        }
        if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            return Ok(Self::from_date(date));
        }
        if let Ok(naive) = chrono::NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S") {
            return Ok(Self::from_datetime(Utc.from_utc_datetime(&naive)));
        }
        Err(TimestampParseError(s.to_string()))
    }

    /// Date-granularity view used for all validity comparisons.
    pub fn date(&self) -> NaiveDate {
        self.0.date_naive()
    }

    pub fn to_rfc3339(&self) -> String {
        self.0.to_rfc3339_opts(SecondsFormat::Secs, true)
    }
}

trait ZeroNanos {
    fn with_nanosecond_zeroed(self) -> Self;
}

impl ZeroNanos for DateTime<Utc> {
    fn with_nanosecond_zeroed(self) -> Self {
        use chrono::Timelike;
        self.with_nanosecond(0).unwrap_or(self)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_rfc3339())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid timestamp {0:?}: expected ISO 8601 date or date-time")]
pub struct TimestampParseError(pub String);

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_rfc3339())
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Timestamp::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn interval_is_half_open() {
        let iv = TimeInterval { start: date("1988-10-05"), end: Some(date("2000-02-14")) };
        assert!(iv.contains(date("1988-10-05")));
        assert!(iv.contains(date("2000-02-13")));
        assert!(!iv.contains(date("2000-02-14")));
        assert!(!iv.contains(date("1988-10-04")));

        let open = TimeInterval { start: date("2000-02-14"), end: None };
        assert!(open.contains(date("2000-02-14")));
        assert!(open.contains(date("2999-01-01")));
    }

    #[test]
    fn timestamp_parses_dates_and_instants() {
        let d = Timestamp::parse("2001-05-20").unwrap();
        assert_eq!(d.to_rfc3339(), "2001-05-20T00:00:00Z");
        let t = Timestamp::parse("2001-05-20T12:00:00Z").unwrap();
        assert_eq!(t.date(), date("2001-05-20"));
        let offset = Timestamp::parse("2001-05-20T23:30:00-03:00").unwrap();
        // Offsets normalize to UTC before the date truncation.
        assert_eq!(offset.date(), date("2001-05-21"));
        assert!(Timestamp::parse("May 20th, 2001").is_err());
    }

    #[test]
    fn metadata_predicates() {
        let mut md = Metadata::new();
        md.insert("jurisdiction".into(), MetaValue::Text("federal".into()));
        md.insert("number".into(), MetaValue::Number(26.0));
        md.insert("publication_date".into(), MetaValue::Date(date("2000-02-14")));

        assert!(Predicate::Equals(MetaValue::Text("federal".into()))
            .matches(md.get("jurisdiction")));
        assert!(Predicate::In(vec![MetaValue::Number(25.0), MetaValue::Number(26.0)])
            .matches(md.get("number")));
        assert!(Predicate::Range { op: RangeOp::Ge, value: MetaValue::Date(date("2000-01-01")) }
            .matches(md.get("publication_date")));
        assert!(!Predicate::Range { op: RangeOp::Lt, value: MetaValue::Date(date("2000-01-01")) }
            .matches(md.get("publication_date")));
        // Missing key and type mismatch both fail.
        assert!(!Predicate::Equals(MetaValue::Bool(true)).matches(None));
        assert!(!Predicate::Equals(MetaValue::Text("26".into())).matches(md.get("number")));
    }

    #[test]
    fn meta_value_keeps_dates_distinct_from_text() {
        let v: MetaValue = serde_json::from_str("\"2010-01-01\"").unwrap();
        assert_eq!(v, MetaValue::Date(date("2010-01-01")));
        assert_eq!(serde_json::to_string(&v).unwrap(), "\"2010-01-01\"");
        let t: MetaValue = serde_json::from_str("\"federal\"").unwrap();
        assert_eq!(t, MetaValue::Text("federal".into()));
    }
}

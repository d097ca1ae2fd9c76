//! The primitive registry: one entry per callable primitive, with its
//! parameter schema, verification class, and handler.
//!
//! Everything that can call a primitive — plan steps, HTTP routes, the CLI
//! `query` command — goes through [`dispatch`], which is what makes their
//! canonical outputs byte-identical. The machine-readable interface
//! description served by the HTTP layer is generated from this table, never
//! hand-written.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::engine::{Engine, SearchItemsParams, SearchTextUnitsParams, TextUnitRequest};
use crate::error::EngineError;
use crate::model::{EntityId, EntityKind, HierarchyKind, Timestamp};
use crate::plan::path;
use crate::store::word_tokens;

/// Verification class of a primitive.
///
/// `Deterministic` and `Combinator` steps are re-executed during audit
/// verification; `Discovery` steps are only checked for chain integrity and
/// argument provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveClass {
    Deterministic,
    Discovery,
    Combinator,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    #[serde(rename = "type")]
    pub ty: &'static str,
    pub required: bool,
}

pub struct PrimitiveDef {
    pub name: &'static str,
    pub class: PrimitiveClass,
    pub summary: &'static str,
    pub params: &'static [ParamSpec],
    pub result: &'static str,
    handler: fn(&Engine, Value, Timestamp) -> Result<Value, EngineError>,
}

const fn p(name: &'static str, ty: &'static str, required: bool) -> ParamSpec {
    ParamSpec { name, ty, required }
}

pub fn find(name: &str) -> Option<&'static PrimitiveDef> {
    REGISTRY.iter().find(|def| def.name == name)
}

/// Execute a primitive by name. `now` is the resolved current instant for
/// defaulted timestamps; it must be pinned by the caller so results are
/// replayable.
pub fn dispatch(
    engine: &Engine,
    name: &str,
    arguments: Value,
    now: Timestamp,
) -> Result<Value, EngineError> {
    let def = find(name).ok_or_else(|| EngineError::UnknownPrimitive {
        name: name.to_string(),
        hint: hint_for(name),
    })?;
    (def.handler)(engine, arguments, now)
}

/// Suggest the intended primitive for a near-miss name.
pub fn hint_for(name: &str) -> Option<String> {
    // Known alias drift first, then a case-insensitive scan.
    const ALIASES: &[(&str, &str)] = &[
        ("getBatchTexts", "getBatchTextUnits"),
        ("getBatchText", "getBatchTextUnits"),
        ("getText", "getTextForVersion"),
        ("resolveItem", "resolveItemReference"),
        ("resolveTheme", "resolveThemeReference"),
    ];
    if let Some((_, target)) = ALIASES.iter().find(|(alias, _)| *alias == name) {
        return Some((*target).to_string());
    }
    let lowered = name.to_lowercase();
    REGISTRY
        .iter()
        .find(|def| def.name.to_lowercase() == lowered)
        .map(|def| def.name.to_string())
}

/// Every stable error code a primitive can produce.
pub fn error_codes() -> &'static [&'static str] {
    &[
        "NotFound",
        "NoValidVersion",
        "NoTextUnit",
        "NoVersions",
        "MissingProvenance",
        "DifferentItems",
        "IdenticalVersions",
        "NoComparableText",
        "NotAWork",
        "InvalidInterval",
        "ConflictingScope",
        "UnknownId",
        "MissingCriterion",
        "NoMatch",
        "BadRequest",
        "UnknownPrimitive",
        "ValidationFailed",
        "DuplicateId",
        "ParseError",
        "CycleDetected",
        "BadBinding",
        "StepFailed",
        "AmbiguousResolution",
        "EmptyResolution",
    ]
}

/// The served interface description, generated from the registry.
pub fn interface_description() -> Value {
    let primitives: Vec<Value> = REGISTRY
        .iter()
        .map(|def| {
            json!({
                "name": def.name,
                "class": def.class,
                "summary": def.summary,
                "params": def.params,
                "result": def.result,
            })
        })
        .collect();
    json!({
        "service": "diachron",
        "interface_version": "v1",
        "scorers": crate::engine::score::scorer_names(),
        "error_codes": error_codes(),
        "primitives": primitives,
    })
}

fn args<T: DeserializeOwned>(arguments: Value) -> Result<T, EngineError> {
    serde_json::from_value(arguments)
        .map_err(|e| EngineError::BadRequest { message: e.to_string() })
}

fn ok<T: Serialize>(value: T) -> Result<Value, EngineError> {
    Ok(serde_json::to_value(value).expect("results serialize"))
}

// ---------------------------------------------------------------------------
// Parameter record types
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoArgs {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntityArgs {
    kind: EntityKind,
    id: EntityId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IdArgs {
    id: EntityId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValidVersionArgs {
    item_id: EntityId,
    timestamp: Timestamp,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TextForVersionArgs {
    version_id: EntityId,
    language: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HierarchyArgs {
    kind: HierarchyKind,
    root_id: EntityId,
    #[serde(default)]
    depth: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KindedHierarchyArgs {
    #[serde(alias = "root_id", alias = "theme_id", alias = "version_id", alias = "type_id")]
    item_id: EntityId,
    #[serde(default)]
    depth: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemArgs {
    item_id: EntityId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VersionArgs {
    version_id: EntityId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VersionsInIntervalArgs {
    item_ids: Vec<EntityId>,
    start_date: chrono::NaiveDate,
    end_date: chrono::NaiveDate,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareArgs {
    version_id_a: EntityId,
    version_id_b: EntityId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionsBySourceArgs {
    source_work_id: EntityId,
    #[serde(default)]
    action_types: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchArgs {
    kind: EntityKind,
    ids: Vec<EntityId>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchIdsArgs {
    ids: Vec<EntityId>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchValidVersionsArgs {
    item_ids: Vec<EntityId>,
    timestamp: Timestamp,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchTextUnitsArgs {
    requests: Vec<TextUnitRequest>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResolveItemArgs {
    reference_text: String,
    #[serde(default)]
    context_id: Option<EntityId>,
    #[serde(default)]
    top_k: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResolveThemeArgs {
    reference_text: String,
    #[serde(default)]
    top_k: Option<usize>,
}

// ---------------------------------------------------------------------------
// Handlers
// ---------------------------------------------------------------------------

fn h_get_entity(engine: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: EntityArgs = args(a)?;
    ok(engine.get_entity(a.kind, &a.id)?)
}

fn kinded_get(kind: EntityKind) -> impl Fn(&Engine, Value) -> Result<Value, EngineError> {
    move |engine, a| {
        let a: IdArgs = args(a)?;
        ok(engine.get_entity(kind, &a.id)?)
    }
}

fn h_get_item(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_get(EntityKind::Item)(e, a)
}

fn h_get_theme(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_get(EntityKind::Theme)(e, a)
}

fn h_get_version(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_get(EntityKind::Version)(e, a)
}

fn h_get_action(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_get(EntityKind::Action)(e, a)
}

fn h_get_valid_version(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: ValidVersionArgs = args(a)?;
    ok(e.get_valid_version(&a.item_id, a.timestamp)?)
}

fn h_get_text_for_version(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: TextForVersionArgs = args(a)?;
    ok(e.get_text_for_version(&a.version_id, &a.language)?)
}

fn h_get_hierarchy(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: HierarchyArgs = args(a)?;
    ok(e.get_hierarchy(a.kind, &a.root_id, a.depth)?)
}

fn kinded_hierarchy(
    kind: HierarchyKind,
) -> impl Fn(&Engine, Value) -> Result<Value, EngineError> {
    move |engine, a| {
        let a: KindedHierarchyArgs = args(a)?;
        ok(engine.get_hierarchy(kind, &a.item_id, a.depth)?)
    }
}

fn h_get_item_hierarchy(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_hierarchy(HierarchyKind::Item)(e, a)
}

fn h_get_theme_hierarchy(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_hierarchy(HierarchyKind::Theme)(e, a)
}

fn h_get_version_hierarchy(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_hierarchy(HierarchyKind::Version)(e, a)
}

fn h_get_item_type_hierarchy(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_hierarchy(HierarchyKind::ItemType)(e, a)
}

fn h_get_item_ancestors(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: ItemArgs = args(a)?;
    ok(e.get_item_ancestors(&a.item_id)?)
}

fn h_get_themes_for_item(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: ItemArgs = args(a)?;
    ok(e.get_themes_for_item(&a.item_id)?)
}

fn h_get_item_history(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: ItemArgs = args(a)?;
    ok(e.get_item_history(&a.item_id)?)
}

fn h_trace_causality(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: VersionArgs = args(a)?;
    ok(e.trace_causality(&a.version_id)?)
}

fn h_get_versions_in_interval(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: VersionsInIntervalArgs = args(a)?;
    ok(e.get_versions_in_interval(&a.item_ids, a.start_date, a.end_date)?)
}

fn h_compare_versions(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: CompareArgs = args(a)?;
    ok(e.compare_versions(&a.version_id_a, &a.version_id_b)?)
}

fn h_get_actions_by_source(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: ActionsBySourceArgs = args(a)?;
    ok(e.get_actions_by_source(&a.source_work_id, a.action_types.as_deref())?)
}

fn h_get_temporal_coverage(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: ItemArgs = args(a)?;
    ok(e.get_temporal_coverage(&a.item_id)?)
}

fn h_get_available_languages(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let _: NoArgs = args(a)?;
    ok(e.get_available_languages())
}

fn h_get_supported_action_types(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let _: NoArgs = args(a)?;
    ok(e.get_supported_action_types())
}

fn h_get_root_themes(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let _: NoArgs = args(a)?;
    ok(e.get_root_themes())
}

fn h_get_batch(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: BatchArgs = args(a)?;
    ok(e.get_batch(a.kind, &a.ids))
}

fn kinded_batch(kind: EntityKind) -> impl Fn(&Engine, Value) -> Result<Value, EngineError> {
    move |engine, a| {
        let a: BatchIdsArgs = args(a)?;
        ok(engine.get_batch(kind, &a.ids))
    }
}

fn h_get_batch_items(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_batch(EntityKind::Item)(e, a)
}

fn h_get_batch_themes(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_batch(EntityKind::Theme)(e, a)
}

fn h_get_batch_versions(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_batch(EntityKind::Version)(e, a)
}

fn h_get_batch_actions(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    kinded_batch(EntityKind::Action)(e, a)
}

fn h_get_batch_valid_versions(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: BatchValidVersionsArgs = args(a)?;
    ok(e.get_batch_valid_versions(&a.item_ids, a.timestamp))
}

fn h_get_batch_text_units(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: BatchTextUnitsArgs = args(a)?;
    ok(e.get_batch_text_units(&a.requests))
}

fn h_resolve_item_reference(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: ResolveItemArgs = args(a)?;
    ok(e.resolve_item_reference(&a.reference_text, a.context_id.as_ref(), a.top_k)?)
}

fn h_resolve_theme_reference(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: ResolveThemeArgs = args(a)?;
    ok(e.resolve_theme_reference(&a.reference_text, a.top_k)?)
}

fn h_search_text_units(e: &Engine, a: Value, now: Timestamp) -> Result<Value, EngineError> {
    let params: SearchTextUnitsParams = args(a)?;
    ok(e.search_text_units(&params, now)?)
}

fn h_search_items(e: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let params: SearchItemsParams = args(a)?;
    ok(e.search_items(&params)?)
}

// ---------------------------------------------------------------------------
// Combinators: pure data steps so client-side reasoning stays inside plans
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SelectByRankArgs {
    list: Vec<Value>,
    /// 1-based: rank 1 is the top element.
    rank: usize,
}

fn h_select_by_rank(_: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: SelectByRankArgs = args(a)?;
    if a.rank == 0 || a.rank > a.list.len() {
        return Err(EngineError::BadRequest {
            message: format!("rank {} out of range for a list of {}", a.rank, a.list.len()),
        });
    }
    Ok(a.list[a.rank - 1].clone())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldExtractArgs {
    value: Value,
    path: String,
}

fn h_field_extract(_: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: FieldExtractArgs = args(a)?;
    match path::extract_str(&a.value, &a.path) {
        Some(found) => Ok(found.clone()),
        None => Err(EngineError::BadRequest {
            message: format!("path {:?} not found in value", a.path),
        }),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapOverListArgs {
    list: Vec<Value>,
    /// Extraction mode: pull this path out of every element, skipping
    /// elements where it is absent or null.
    #[serde(default)]
    path: Option<String>,
    /// Mapping mode: call this primitive once per element.
    #[serde(default)]
    primitive: Option<String>,
    /// Parameter name the element is bound to in mapping mode.
    #[serde(default)]
    arg: Option<String>,
    /// Extra constant arguments merged into every mapped call.
    #[serde(default)]
    args: Option<serde_json::Map<String, Value>>,
}

fn h_map_over_list(engine: &Engine, a: Value, now: Timestamp) -> Result<Value, EngineError> {
    let a: MapOverListArgs = args(a)?;
    match (&a.path, &a.primitive) {
        (Some(selector), None) => {
            let parsed = path::parse_path(selector)
                .map_err(|message| EngineError::BadRequest { message })?;
            let mut out = Vec::new();
            for element in &a.list {
                match path::extract(element, &parsed) {
                    Some(Value::Null) | None => {}
                    Some(found) => out.push(found.clone()),
                }
            }
            Ok(Value::Array(out))
        }
        (None, Some(primitive)) => {
            let def = find(primitive).ok_or_else(|| EngineError::UnknownPrimitive {
                name: primitive.clone(),
                hint: hint_for(primitive),
            })?;
            if def.class == PrimitiveClass::Discovery {
                return Err(EngineError::BadRequest {
                    message: format!(
                        "mapOverList cannot map the discovery primitive {primitive:?}"
                    ),
                });
            }
            let arg_name = a.arg.as_deref().ok_or_else(|| EngineError::BadRequest {
                message: "mapOverList with a primitive requires `arg`".to_string(),
            })?;
            let base = a.args.unwrap_or_default();
            let mut out = Vec::new();
            for element in a.list {
                let mut call = base.clone();
                call.insert(arg_name.to_string(), element);
                out.push(dispatch(engine, primitive, Value::Object(call), now)?);
            }
            Ok(Value::Array(out))
        }
        _ => Err(EngineError::BadRequest {
            message: "mapOverList takes exactly one of `path` or `primitive`".to_string(),
        }),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetUnionArgs {
    lists: Value,
}

fn h_set_union(_: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: SetUnionArgs = args(a)?;
    let mut scalars: Vec<Value> = Vec::new();
    collect_scalars(&a.lists, &mut scalars)?;
    scalars.sort_by(scalar_order);
    scalars.dedup();
    Ok(Value::Array(scalars))
}

/// Deep-flatten nested arrays down to their scalar leaves; nulls are skipped.
fn collect_scalars(value: &Value, out: &mut Vec<Value>) -> Result<(), EngineError> {
    match value {
        Value::Array(items) => {
            for item in items {
                collect_scalars(item, out)?;
            }
            Ok(())
        }
        Value::Null => Ok(()),
        Value::Object(_) => Err(EngineError::BadRequest {
            message: "setUnion requires scalar elements; extract ids first".to_string(),
        }),
        scalar => {
            out.push(scalar.clone());
            Ok(())
        }
    }
}

fn scalar_order(a: &Value, b: &Value) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    fn rank(v: &Value) -> u8 {
        match v {
            Value::Bool(_) => 0,
            Value::Number(_) => 1,
            Value::String(_) => 2,
            _ => 3,
        }
    }
    match (a, b) {
        (Value::Bool(x), Value::Bool(y)) => x.cmp(y),
        (Value::Number(x), Value::Number(y)) => x
            .as_f64()
            .partial_cmp(&y.as_f64())
            .unwrap_or(Ordering::Equal),
        (Value::String(x), Value::String(y)) => x.cmp(y),
        _ => rank(a).cmp(&rank(b)),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlattenArgs {
    list: Vec<Value>,
}

fn h_flatten(_: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: FlattenArgs = args(a)?;
    let mut out = Vec::new();
    for element in a.list {
        match element {
            Value::Array(items) => out.extend(items),
            other => out.push(other),
        }
    }
    Ok(Value::Array(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FilterGteArgs {
    list: Vec<Value>,
    path: String,
    value: Value,
}

fn h_filter_gte(_: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let parsed_args: FilterGteArgs = args(a)?;
    let parsed = path::parse_path(&parsed_args.path)
        .map_err(|message| EngineError::BadRequest { message })?;
    let mut out = Vec::new();
    for element in parsed_args.list {
        let keep = match path::extract(&element, &parsed) {
            Some(Value::String(s)) => matches!(&parsed_args.value, Value::String(v) if s >= v),
            Some(Value::Number(n)) => matches!(
                &parsed_args.value,
                Value::Number(v) if n.as_f64() >= v.as_f64()
            ),
            _ => false,
        };
        if keep {
            out.push(element);
        }
    }
    Ok(Value::Array(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FirstTextContainingTokenArgs {
    texts: Vec<Value>,
    token: String,
}

fn h_first_text_containing_token(
    _: &Engine,
    a: Value,
    _: Timestamp,
) -> Result<Value, EngineError> {
    let a: FirstTextContainingTokenArgs = args(a)?;
    let wanted = a.token.to_lowercase();
    for text in &a.texts {
        let Some(content) = text.get("content").and_then(Value::as_str) else {
            continue;
        };
        if word_tokens(content).iter().any(|t| *t == wanted) {
            return Ok(text.clone());
        }
    }
    Err(EngineError::NoMatch { token: a.token })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildTextRequestsArgs {
    node_type: EntityKind,
    ids: Vec<EntityId>,
    language: String,
    #[serde(default)]
    aspects: Option<Vec<String>>,
}

fn h_build_text_requests(_: &Engine, a: Value, _: Timestamp) -> Result<Value, EngineError> {
    let a: BuildTextRequestsArgs = args(a)?;
    let requests: Vec<TextUnitRequest> = a
        .ids
        .into_iter()
        .map(|id| TextUnitRequest {
            source_node_type: a.node_type,
            source_node_id: id,
            language: a.language.clone(),
            aspects: a.aspects.clone(),
        })
        .collect();
    ok(requests)
}

// ---------------------------------------------------------------------------
// The registry table
// ---------------------------------------------------------------------------

use PrimitiveClass::{Combinator, Deterministic, Discovery};

pub static REGISTRY: &[PrimitiveDef] = &[
    // Discovery and search.
    PrimitiveDef {
        name: "resolveItemReference",
        class: Discovery,
        summary: "Resolve a natural-language document/component reference to ranked candidate item ids",
        params: &[
            p("reference_text", "string", true),
            p("context_id", "ID", false),
            p("top_k", "int", false),
        ],
        result: "list[RankedCandidate]",
        handler: h_resolve_item_reference,
    },
    PrimitiveDef {
        name: "resolveThemeReference",
        class: Discovery,
        summary: "Resolve a natural-language theme name to ranked candidate theme ids",
        params: &[p("reference_text", "string", true), p("top_k", "int", false)],
        result: "list[RankedCandidate]",
        handler: h_resolve_theme_reference,
    },
    PrimitiveDef {
        name: "searchTextUnits",
        class: Discovery,
        summary: "Hybrid search for text units within a structural, thematic and temporal scope",
        params: &[
            p("version_ids", "list[ID]", false),
            p("item_ids", "list[ID]", false),
            p("theme_ids", "list[ID]", false),
            p("metadata_filter", "MetadataFilter", false),
            p("timestamp", "timestamp", false),
            p("semantic_query", "string", false),
            p("lexical_query", "string", false),
            p("language", "string", false),
            p("aspects", "list[string]", false),
            p("top_k", "int", false),
            p("lexical_weight", "float", false),
            p("semantic_weight", "float", false),
        ],
        result: "list[ScoredTextUnit]",
        handler: h_search_text_units,
    },
    PrimitiveDef {
        name: "searchItems",
        class: Discovery,
        summary: "Hybrid, time-agnostic search for items across their whole text history",
        params: &[
            p("item_ids", "list[ID]", false),
            p("theme_ids", "list[ID]", false),
            p("item_metadata_filter", "map[string, Predicate]", false),
            p("semantic_query", "string", false),
            p("lexical_query", "string", false),
            p("top_k", "int", false),
            p("lexical_weight", "float", false),
            p("semantic_weight", "float", false),
        ],
        result: "list[ScoredItem]",
        handler: h_search_items,
    },
    // Deterministic fetch.
    PrimitiveDef {
        name: "getEntity",
        class: Deterministic,
        summary: "Primary-key retrieval of a full entity record of any kind",
        params: &[p("kind", "EntityKind", true), p("id", "ID", true)],
        result: "Item | Theme | Version | Action",
        handler: h_get_entity,
    },
    PrimitiveDef {
        name: "getItem",
        class: Deterministic,
        summary: "Primary-key retrieval of an Item",
        params: &[p("id", "ID", true)],
        result: "Item",
        handler: h_get_item,
    },
    PrimitiveDef {
        name: "getTheme",
        class: Deterministic,
        summary: "Primary-key retrieval of a Theme",
        params: &[p("id", "ID", true)],
        result: "Theme",
        handler: h_get_theme,
    },
    PrimitiveDef {
        name: "getVersion",
        class: Deterministic,
        summary: "Primary-key retrieval of a Version",
        params: &[p("id", "ID", true)],
        result: "Version",
        handler: h_get_version,
    },
    PrimitiveDef {
        name: "getAction",
        class: Deterministic,
        summary: "Primary-key retrieval of an Action",
        params: &[p("id", "ID", true)],
        result: "Action",
        handler: h_get_action,
    },
    PrimitiveDef {
        name: "getValidVersion",
        class: Deterministic,
        summary: "The unique version of an item in force at a timestamp",
        params: &[p("item_id", "ID", true), p("timestamp", "timestamp", true)],
        result: "Version",
        handler: h_get_valid_version,
    },
    PrimitiveDef {
        name: "getTextForVersion",
        class: Deterministic,
        summary: "The canonical text of a known version in a language",
        params: &[p("version_id", "ID", true), p("language", "string", true)],
        result: "TextUnit",
        handler: h_get_text_for_version,
    },
    // Structural navigation.
    PrimitiveDef {
        name: "getHierarchy",
        class: Deterministic,
        summary: "Descendants of a hierarchy root in deterministic pre-order",
        params: &[
            p("kind", "HierarchyKind", true),
            p("root_id", "ID", true),
            p("depth", "int", false),
        ],
        result: "list[ID]",
        handler: h_get_hierarchy,
    },
    PrimitiveDef {
        name: "getItemHierarchy",
        class: Deterministic,
        summary: "Structural descendants of an item",
        params: &[p("item_id", "ID", true), p("depth", "int", false)],
        result: "list[ID]",
        handler: h_get_item_hierarchy,
    },
    PrimitiveDef {
        name: "getThemeHierarchy",
        class: Deterministic,
        summary: "Descendant themes of a theme",
        params: &[p("item_id", "ID", true), p("depth", "int", false)],
        result: "list[ID]",
        handler: h_get_theme_hierarchy,
    },
    PrimitiveDef {
        name: "getVersionHierarchy",
        class: Deterministic,
        summary: "Descendant versions of a version snapshot",
        params: &[p("item_id", "ID", true), p("depth", "int", false)],
        result: "list[ID]",
        handler: h_get_version_hierarchy,
    },
    PrimitiveDef {
        name: "getItemTypeHierarchy",
        class: Deterministic,
        summary: "Descendant item types of an item type",
        params: &[p("item_id", "ID", true), p("depth", "int", false)],
        result: "list[ID]",
        handler: h_get_item_type_hierarchy,
    },
    PrimitiveDef {
        name: "getItemAncestors",
        class: Deterministic,
        summary: "Structural lineage of an item, root Work excluded",
        params: &[p("item_id", "ID", true)],
        result: "list[Item]",
        handler: h_get_item_ancestors,
    },
    PrimitiveDef {
        name: "getThemesForItem",
        class: Deterministic,
        summary: "Themes directly classifying an item",
        params: &[p("item_id", "ID", true)],
        result: "list[Theme]",
        handler: h_get_themes_for_item,
    },
    // Causal and lineage analysis.
    PrimitiveDef {
        name: "getItemHistory",
        class: Deterministic,
        summary: "Every action that created or terminated a version of an item",
        params: &[p("item_id", "ID", true)],
        result: "list[Action]",
        handler: h_get_item_history,
    },
    PrimitiveDef {
        name: "traceCausality",
        class: Deterministic,
        summary: "The actions that created and (if ended) terminated a version",
        params: &[p("version_id", "ID", true)],
        result: "Causality",
        handler: h_trace_causality,
    },
    PrimitiveDef {
        name: "getVersionsInInterval",
        class: Deterministic,
        summary: "Versions of the given items valid at any point in an interval",
        params: &[
            p("item_ids", "list[ID]", true),
            p("start_date", "date", true),
            p("end_date", "date", true),
        ],
        result: "list[Version]",
        handler: h_get_versions_in_interval,
    },
    PrimitiveDef {
        name: "compareVersions",
        class: Deterministic,
        summary: "Token-level minimal diff and structural changes between two versions of one item",
        params: &[p("version_id_a", "ID", true), p("version_id_b", "ID", true)],
        result: "TextDiffReport",
        handler: h_compare_versions,
    },
    PrimitiveDef {
        name: "getActionsBySource",
        class: Deterministic,
        summary: "Forward causal tracing: every action authorized by a source Work",
        params: &[p("source_work_id", "ID", true), p("action_types", "list[string]", false)],
        result: "list[Action]",
        handler: h_get_actions_by_source,
    },
    // Introspection.
    PrimitiveDef {
        name: "getTemporalCoverage",
        class: Deterministic,
        summary: "Known version-history span of an item",
        params: &[p("item_id", "ID", true)],
        result: "TimeInterval",
        handler: h_get_temporal_coverage,
    },
    PrimitiveDef {
        name: "getAvailableLanguages",
        class: Deterministic,
        summary: "Distinct text languages in the graph",
        params: &[],
        result: "list[string]",
        handler: h_get_available_languages,
    },
    PrimitiveDef {
        name: "getSupportedActionTypes",
        class: Deterministic,
        summary: "The action-type vocabulary of the graph",
        params: &[],
        result: "list[string]",
        handler: h_get_supported_action_types,
    },
    PrimitiveDef {
        name: "getRootThemes",
        class: Deterministic,
        summary: "Full records of the taxonomy's root themes",
        params: &[],
        result: "list[Theme]",
        handler: h_get_root_themes,
    },
    // Batch operations.
    PrimitiveDef {
        name: "getBatch",
        class: Deterministic,
        summary: "Batch primary-key retrieval; misses are dropped",
        params: &[p("kind", "EntityKind", true), p("ids", "list[ID]", true)],
        result: "list[record]",
        handler: h_get_batch,
    },
    PrimitiveDef {
        name: "getBatchItems",
        class: Deterministic,
        summary: "Batch getItem; misses are dropped",
        params: &[p("ids", "list[ID]", true)],
        result: "list[Item]",
        handler: h_get_batch_items,
    },
    PrimitiveDef {
        name: "getBatchThemes",
        class: Deterministic,
        summary: "Batch getTheme; misses are dropped",
        params: &[p("ids", "list[ID]", true)],
        result: "list[Theme]",
        handler: h_get_batch_themes,
    },
    PrimitiveDef {
        name: "getBatchVersions",
        class: Deterministic,
        summary: "Batch getVersion; misses are dropped",
        params: &[p("ids", "list[ID]", true)],
        result: "list[Version]",
        handler: h_get_batch_versions,
    },
    PrimitiveDef {
        name: "getBatchActions",
        class: Deterministic,
        summary: "Batch getAction; misses are dropped",
        params: &[p("ids", "list[ID]", true)],
        result: "list[Action]",
        handler: h_get_batch_actions,
    },
    PrimitiveDef {
        name: "getBatchValidVersions",
        class: Deterministic,
        summary: "Valid version of each item on one date; items without one are dropped",
        params: &[p("item_ids", "list[ID]", true), p("timestamp", "timestamp", true)],
        result: "list[Version]",
        handler: h_get_batch_valid_versions,
    },
    PrimitiveDef {
        name: "getBatchTextUnits",
        class: Deterministic,
        summary: "Batch text retrieval across mixed source nodes, preserving request order",
        params: &[p("requests", "list[TextUnitRequest]", true)],
        result: "list[TextUnit]",
        handler: h_get_batch_text_units,
    },
    // Plan combinators.
    PrimitiveDef {
        name: "selectByRank",
        class: Combinator,
        summary: "Select the element at a 1-based rank",
        params: &[p("list", "list", true), p("rank", "int", true)],
        result: "any",
        handler: h_select_by_rank,
    },
    PrimitiveDef {
        name: "fieldExtract",
        class: Combinator,
        summary: "Extract a path from a value",
        params: &[p("value", "any", true), p("path", "selector", true)],
        result: "any",
        handler: h_field_extract,
    },
    PrimitiveDef {
        name: "mapOverList",
        class: Combinator,
        summary: "Extract a path from every element, or map a non-discovery primitive over them",
        params: &[
            p("list", "list", true),
            p("path", "selector", false),
            p("primitive", "string", false),
            p("arg", "string", false),
            p("args", "map", false),
        ],
        result: "list",
        handler: h_map_over_list,
    },
    PrimitiveDef {
        name: "setUnion",
        class: Combinator,
        summary: "Deep-flatten nested lists of scalars into a sorted, deduplicated set",
        params: &[p("lists", "list", true)],
        result: "list",
        handler: h_set_union,
    },
    PrimitiveDef {
        name: "flatten",
        class: Combinator,
        summary: "Flatten one nesting level of a list",
        params: &[p("list", "list", true)],
        result: "list",
        handler: h_flatten,
    },
    PrimitiveDef {
        name: "filterGte",
        class: Combinator,
        summary: "Keep elements whose path value is >= a bound (ISO dates compare as strings)",
        params: &[p("list", "list", true), p("path", "selector", true), p("value", "scalar", true)],
        result: "list",
        handler: h_filter_gte,
    },
    PrimitiveDef {
        name: "firstTextContainingToken",
        class: Combinator,
        summary: "First text unit whose content contains a word token",
        params: &[p("texts", "list[TextUnit]", true), p("token", "string", true)],
        result: "TextUnit",
        handler: h_first_text_containing_token,
    },
    PrimitiveDef {
        name: "buildTextRequests",
        class: Combinator,
        summary: "Build getBatchTextUnits requests for a list of ids",
        params: &[
            p("node_type", "EntityKind", true),
            p("ids", "list[ID]", true),
            p("language", "string", true),
            p("aspects", "list[string]", false),
        ],
        result: "list[TextUnitRequest]",
        handler: h_build_text_requests,
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique() {
        let mut names: Vec<&str> = REGISTRY.iter().map(|d| d.name).collect();
        let count = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), count);
    }

    #[test]
    fn hint_points_alias_drift_at_the_real_primitive() {
        assert_eq!(hint_for("getBatchTexts").as_deref(), Some("getBatchTextUnits"));
        assert_eq!(hint_for("getvalidversion").as_deref(), Some("getValidVersion"));
        assert_eq!(hint_for("fooBar"), None);
    }

    #[test]
    fn interface_description_covers_every_primitive() {
        let description = interface_description();
        let listed = description["primitives"].as_array().unwrap();
        assert_eq!(listed.len(), REGISTRY.len());
        for def in REGISTRY {
            assert!(
                listed.iter().any(|p| p["name"] == def.name),
                "{} missing from interface description",
                def.name
            );
        }
    }
}

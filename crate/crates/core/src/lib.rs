//! Diachron — a deterministic query engine for temporal knowledge graphs of
//! versioned documents.
//!
//! A corpus of Items (document structure), Themes (conceptual taxonomy),
//! Versions (time-bound states), Actions (reified change events) and
//! TextUnits (attached texts) is validated, frozen into an indexed
//! [`store::GraphStore`], and queried through a fixed registry of primitives:
//! discovery (reference resolution, hybrid search), deterministic fetch
//! (point-in-time version resolution, text lookup), structural navigation,
//! causal lineage tracing, introspection, and batch variants.
//!
//! On top of the primitives sits a plan executor: externally-authored DAG
//! plans of primitive invocations run in a deterministic order and emit a
//! hash-chained audit log that can be re-verified against the store. The same
//! registry backs an HTTP service and a CLI, which produce byte-identical
//! canonical serializations for identical calls.

pub mod corpus;
pub mod engine;
pub mod error;
pub mod model;
pub mod registry;
pub mod snapshot;
pub mod store;
pub mod validate;

pub mod plan;
pub mod service;

pub mod cli;

pub use engine::{Engine, EngineConfig};
pub use error::{ApiError, EngineError};
pub use store::GraphStore;

/// Canonical serialization: compact JSON with struct-declaration field order
/// and sorted maps. Logs, goldens and transport bodies are byte-comparable.
pub fn canonical_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("values serialize")
}

//! The query engine: every primitive as a typed method over a frozen store.
//!
//! All operations are pure reads. Deterministic primitives are a function of
//! `(store, arguments)`; discovery primitives are additionally a function of
//! the configured scorer and fusion weights, which are fixed at engine
//! construction, so identical engines produce identical rankings.

mod diff;
mod fetch;
mod lineage;
mod navigate;
mod resolve;
pub mod score;
mod search;

pub use diff::{ChangeKind, EditOp, StructuralChange, TextDiffReport, TextualEdit};
pub use fetch::{AnyEntity, TextUnitRequest};
pub use lineage::Causality;
pub use search::{SearchItemsParams, SearchTextUnitsParams};

use std::sync::Arc;

use crate::error::EngineError;
use crate::store::GraphStore;
use score::{scorer_by_name, FusionWeights, SemanticScorer, DEFAULT_SCORER};

/// Engine construction options: which semantic scorer to use and how to fuse
/// lexical and semantic scores.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub scorer: String,
    pub lexical_weight: f64,
    pub semantic_weight: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self { scorer: DEFAULT_SCORER.to_string(), lexical_weight: 0.5, semantic_weight: 0.5 }
    }
}

pub struct Engine {
    store: Arc<GraphStore>,
    scorer: Arc<dyn SemanticScorer>,
    weights: FusionWeights,
}

impl Engine {
    pub fn new(store: Arc<GraphStore>) -> Self {
        Self::with_config(store, EngineConfig::default()).expect("default scorer exists")
    }

    pub fn with_config(store: Arc<GraphStore>, config: EngineConfig) -> Result<Self, EngineError> {
        let scorer = scorer_by_name(&config.scorer).ok_or_else(|| EngineError::BadRequest {
            message: format!(
                "unknown scorer {:?}; registered scorers: {}",
                config.scorer,
                score::scorer_names().join(", ")
            ),
        })?;
        Ok(Self {
            store,
            scorer,
            weights: FusionWeights {
                lexical: config.lexical_weight,
                semantic: config.semantic_weight,
            },
        })
    }

    pub fn store(&self) -> &GraphStore {
        &self.store
    }

    pub(crate) fn scorer(&self) -> &dyn SemanticScorer {
        self.scorer.as_ref()
    }

    pub(crate) fn weights(&self) -> FusionWeights {
        self.weights
    }
}

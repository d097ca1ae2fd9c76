//! Plan execution with a hash-chained audit trail.
//!
//! Steps run one at a time in topological order (ties broken by step id), and
//! every attempted step appends one [`AuditRecord`] before the next starts.
//! Each record's chained digest is `sha256(previous chained digest ‖ the
//! record's canonical serialization without the chained digest)`; the first
//! record chains from the plan digest. A failed step is logged as the final
//! record and halts the run.
//!
//! Wall-clock step durations are kept on [`PlanRun`] as diagnostics only:
//! they are not part of the canonical record or the digest chain, so two runs
//! with the same store, plan and pinned instant serialize byte-identically.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::canonical_json;
use crate::engine::Engine;
use crate::error::ApiError;
use crate::model::Timestamp;
use crate::registry;

use super::{CandidatePolicy, Plan, PlanStep, BINDING_KEY};

pub const HASH_ALGORITHM: &str = "sha-256";
const RESOLVER_PRIMITIVES: &[&str] = &["resolveItemReference", "resolveThemeReference"];

/// Run-level execution options; anything set here overrides the plan
/// document's own `options`.
#[derive(Debug, Clone, Default)]
pub struct ExecOptions {
    pub pinned_now: Option<Timestamp>,
    pub candidate_policy: Option<CandidatePolicy>,
}

/// First line of an audit log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditHeader {
    pub schema: u32,
    pub plan_id: String,
    pub plan_digest: String,
    pub store_digest: String,
    pub pinned_now: Timestamp,
    pub hash_algorithm: String,
}

/// One executed (or failed) step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditRecord {
    pub step_id: String,
    pub primitive: String,
    /// Fully-resolved argument values, bindings substituted.
    pub args: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ApiError>,
    /// Digest of the canonical result (or error) serialization.
    pub result_digest: String,
    /// The previous record's chained digest; the plan digest for the first
    /// record.
    pub prev_digest: String,
    /// Omitted from its own preimage; see [`AuditRecord::preimage`].
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub chained_digest: String,
    pub pinned_now: Timestamp,
}

impl AuditRecord {
    /// Canonical serialization without the chained digest — the byte string
    /// the chain hash covers.
    pub fn preimage(&self) -> String {
        let mut stripped = self.clone();
        stripped.chained_digest = String::new();
        canonical_json(&stripped)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFailure {
    pub step_id: String,
    pub code: String,
    pub message: String,
}

impl std::fmt::Display for StepFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "step {} failed with {}: {}", self.step_id, self.code, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct PlanRun {
    pub header: AuditHeader,
    pub records: Vec<AuditRecord>,
    /// Final values of every `bind_as` name, in name order.
    pub outputs: BTreeMap<String, Value>,
    pub failure: Option<StepFailure>,
    /// Wall-clock step durations (step id, microseconds); diagnostics only.
    pub durations: Vec<(String, u128)>,
}

impl PlanRun {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    /// The newline-delimited canonical audit log: header line, then one line
    /// per record.
    pub fn audit_log(&self) -> String {
        let mut out = canonical_json(&self.header);
        out.push('\n');
        for record in &self.records {
            out.push_str(&canonical_json(record));
            out.push('\n');
        }
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Chain step: `sha256(previous digest ‖ preimage)`, both as bytes.
pub fn chain_digest(prev_hex: &str, preimage: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(prev_hex.as_bytes());
    hasher.update(preimage.as_bytes());
    hex::encode(hasher.finalize())
}

pub fn plan_digest(plan: &Plan) -> String {
    sha256_hex(canonical_json(plan).as_bytes())
}

/// Execute a validated plan against an engine. `line_sink`, when given,
/// receives each audit-log line (header first) as soon as it is sealed.
pub fn execute_plan(
    engine: &Engine,
    plan: &Plan,
    options: &ExecOptions,
    mut line_sink: Option<&mut dyn FnMut(&str)>,
) -> PlanRun {
    let pinned_now = options
        .pinned_now
        .or(plan.options.pinned_now)
        .unwrap_or_else(Timestamp::now);
    let policy = options
        .candidate_policy
        .or(plan.options.candidate_policy)
        .unwrap_or_default();

    let header = AuditHeader {
        schema: 1,
        plan_id: plan.id.clone(),
        plan_digest: plan_digest(plan),
        store_digest: engine.store().digest().to_string(),
        pinned_now,
        hash_algorithm: HASH_ALGORITHM.to_string(),
    };
    if let Some(sink) = line_sink.as_deref_mut() {
        sink(&canonical_json(&header));
    }

    let mut run = PlanRun {
        header,
        records: Vec::new(),
        outputs: BTreeMap::new(),
        failure: None,
        durations: Vec::new(),
    };
    let mut bindings: BTreeMap<&str, Value> = BTreeMap::new();
    let mut prev_digest = run.header.plan_digest.clone();

    for step in execution_order(plan) {
        let started = std::time::Instant::now();
        let outcome = run_step(engine, step, &bindings, policy, pinned_now);
        let elapsed = started.elapsed().as_micros();

        let (args, result) = match outcome {
            Ok((args, value)) => (args, Ok(value)),
            Err(failure) => (failure.args, Err(failure.error)),
        };
        let (result_value, error_value) = match &result {
            Ok(value) => (Some(value.clone()), None),
            Err(error) => (None, Some(error.clone())),
        };
        let result_digest = match &result {
            Ok(value) => sha256_hex(canonical_json(value).as_bytes()),
            Err(error) => sha256_hex(canonical_json(error).as_bytes()),
        };
        let mut record = AuditRecord {
            step_id: step.id.clone(),
            primitive: step.primitive.clone(),
            args,
            result: result_value,
            error: error_value,
            result_digest,
            prev_digest: prev_digest.clone(),
            chained_digest: String::new(),
            pinned_now,
        };
        record.chained_digest = chain_digest(&prev_digest, &record.preimage());
        prev_digest = record.chained_digest.clone();
        if let Some(sink) = line_sink.as_deref_mut() {
            sink(&canonical_json(&record));
        }
        run.records.push(record);
        run.durations.push((step.id.clone(), elapsed));

        match result {
            Ok(value) => {
                bindings.insert(step.id.as_str(), value.clone());
                if let Some(bind) = &step.bind_as {
                    bindings.insert(bind.as_str(), value.clone());
                    run.outputs.insert(bind.clone(), value);
                }
            }
            Err(error) => {
                run.failure = Some(StepFailure {
                    step_id: step.id.clone(),
                    code: error.code,
                    message: error.message,
                });
                break;
            }
        }
    }
    run
}

/// Topological order; ready steps execute in step-id order. Plan validation
/// guarantees references only point backward, so every plan has one.
fn execution_order(plan: &Plan) -> Vec<&PlanStep> {
    let index_of: BTreeMap<&str, usize> =
        plan.steps.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
    let mut name_to_step: BTreeMap<&str, usize> = index_of.clone();
    for (i, step) in plan.steps.iter().enumerate() {
        if let Some(bind) = &step.bind_as {
            name_to_step.entry(bind.as_str()).or_insert(i);
        }
    }

    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); plan.steps.len()];
    let mut indegree: Vec<usize> = vec![0; plan.steps.len()];
    for (i, step) in plan.steps.iter().enumerate() {
        let mut deps: BTreeSet<usize> = BTreeSet::new();
        for (target, _) in super::collect_bindings(&step.args) {
            if let Ok(name) = target {
                if let Some(&dep) = name_to_step.get(name) {
                    if dep != i {
                        deps.insert(dep);
                    }
                }
            }
        }
        indegree[i] = deps.len();
        for dep in deps {
            dependents[dep].push(i);
        }
    }

    let mut ready: BinaryHeap<Reverse<(&str, usize)>> = plan
        .steps
        .iter()
        .enumerate()
        .filter(|(i, _)| indegree[*i] == 0)
        .map(|(i, s)| Reverse((s.id.as_str(), i)))
        .collect();
    let mut order = Vec::with_capacity(plan.steps.len());
    while let Some(Reverse((_, i))) = ready.pop() {
        order.push(&plan.steps[i]);
        for &next in &dependents[i] {
            indegree[next] -= 1;
            if indegree[next] == 0 {
                ready.push(Reverse((plan.steps[next].id.as_str(), next)));
            }
        }
    }
    order
}

struct StepError {
    args: Value,
    error: ApiError,
}

fn run_step(
    engine: &Engine,
    step: &PlanStep,
    bindings: &BTreeMap<&str, Value>,
    policy: CandidatePolicy,
    pinned_now: Timestamp,
) -> Result<(Value, Value), StepError> {
    let args = match resolve_args(&step.args, &|name| bindings.get(name)) {
        Ok(args) => Value::Object(args),
        Err(message) => {
            return Err(StepError {
                args: Value::Object(step.args.clone()),
                error: ApiError::new("BadBinding", message),
            })
        }
    };
    let raw = registry::dispatch(engine, &step.primitive, args.clone(), pinned_now)
        .map_err(|e| StepError { args: args.clone(), error: ApiError::from(&e) })?;
    if RESOLVER_PRIMITIVES.contains(&step.primitive.as_str()) {
        let value = apply_policy(raw, policy).map_err(|error| StepError {
            args: args.clone(),
            error,
        })?;
        return Ok((args, value));
    }
    Ok((args, raw))
}

/// Substitute `$from` bindings recursively through the argument tree.
pub(crate) fn resolve_args<'a, F>(
    args: &Map<String, Value>,
    lookup: &F,
) -> Result<Map<String, Value>, String>
where
    F: Fn(&str) -> Option<&'a Value>,
{
    let mut resolved = Map::new();
    for (key, value) in args {
        resolved.insert(key.clone(), resolve_value(value, lookup)?);
    }
    Ok(resolved)
}

fn resolve_value<'a, F>(value: &Value, lookup: &F) -> Result<Value, String>
where
    F: Fn(&str) -> Option<&'a Value>,
{
    match value {
        Value::Object(map) if map.contains_key(BINDING_KEY) => {
            let name = map
                .get(BINDING_KEY)
                .and_then(Value::as_str)
                .ok_or_else(|| format!("{BINDING_KEY} must be a string"))?;
            let source =
                lookup(name).ok_or_else(|| format!("binding {name:?} is not available"))?;
            match map.get("path").and_then(Value::as_str) {
                None => Ok(source.clone()),
                Some(selector) => super::path::extract_str(source, selector)
                    .cloned()
                    .ok_or_else(|| format!("path {selector:?} not found in binding {name:?}")),
            }
        }
        Value::Object(map) => {
            let mut out = Map::new();
            for (key, nested) in map {
                out.insert(key.clone(), resolve_value(nested, lookup)?);
            }
            Ok(Value::Object(out))
        }
        Value::Array(items) => Ok(Value::Array(
            items.iter().map(|v| resolve_value(v, lookup)).collect::<Result<_, _>>()?,
        )),
        literal => Ok(literal.clone()),
    }
}

fn apply_policy(candidates: Value, policy: CandidatePolicy) -> Result<Value, ApiError> {
    let list = candidates.as_array().cloned().unwrap_or_default();
    match policy {
        CandidatePolicy::TakeTop => list.first().cloned().ok_or_else(|| {
            ApiError::new("EmptyResolution", "resolver returned no candidates")
        }),
        CandidatePolicy::RequireUnique { threshold } => {
            let passing: Vec<Value> = list
                .into_iter()
                .filter(|c| confidence_of(c) >= threshold)
                .collect();
            match passing.len() {
                1 => Ok(passing.into_iter().next().expect("one element")),
                n => Err(ApiError::new(
                    "AmbiguousResolution",
                    format!("{n} candidates at or above threshold {threshold}, need exactly 1"),
                )),
            }
        }
        CandidatePolicy::Threshold { threshold } => Ok(Value::Array(
            list.into_iter().filter(|c| confidence_of(c) >= threshold).collect(),
        )),
    }
}

fn confidence_of(candidate: &Value) -> f64 {
    candidate.get("confidence").and_then(Value::as_f64).unwrap_or(0.0)
}

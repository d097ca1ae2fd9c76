//! Audit-log verification.
//!
//! Two layers of checks per logged step:
//!
//! 1. **Chain integrity** — the chained digests are recomputed from the plan
//!    digest forward; any mutated byte breaks the chain at that record and
//!    every record after it.
//! 2. **Replay equivalence** — argument provenance is re-derived from the
//!    plan's bindings and earlier logged results for every step; steps of the
//!    deterministic and combinator classes are additionally re-executed
//!    against the store and must reproduce the logged result digest.
//!    Discovery steps are not re-executed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::canonical_json;
use crate::engine::Engine;
use crate::model::Timestamp;
use crate::registry::{self, PrimitiveClass};

use super::exec::{chain_digest, plan_digest, sha256_hex, AuditHeader, AuditRecord, HASH_ALGORITHM};
use super::Plan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepStatus {
    #[serde(rename = "verified")]
    Verified,
    #[serde(rename = "replay-mismatch")]
    ReplayMismatch,
    #[serde(rename = "chain-broken")]
    ChainBroken,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepVerification {
    pub step_id: String,
    pub status: StepStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub plan_digest_match: bool,
    pub store_digest_match: bool,
    /// Whether the log covers the whole plan (or legitimately halts on a
    /// logged failure).
    pub complete: bool,
    pub steps: Vec<StepVerification>,
    pub ok: bool,
}

/// Verify an audit log (as produced by [`super::PlanRun::audit_log`]) against
/// its plan and a store. All findings are report content; this never fails.
pub fn verify_audit_log(engine: &Engine, plan: &Plan, log_text: &str) -> VerificationReport {
    let mut report = VerificationReport {
        plan_digest_match: false,
        store_digest_match: false,
        complete: false,
        steps: Vec::new(),
        ok: false,
    };
    let mut lines = log_text.lines().filter(|l| !l.trim().is_empty());
    let Some(header_line) = lines.next() else {
        return report;
    };
    let header: AuditHeader = match serde_json::from_str(header_line) {
        Ok(header) => header,
        Err(_) => return report,
    };
    report.plan_digest_match =
        header.plan_digest == plan_digest(plan) && header.hash_algorithm == HASH_ALGORITHM;
    report.store_digest_match = header.store_digest == engine.store().digest();

    let steps_by_id: BTreeMap<&str, &super::PlanStep> =
        plan.steps.iter().map(|s| (s.id.as_str(), s)).collect();

    let mut expected_prev = header.plan_digest.clone();
    let mut bindings: BTreeMap<String, Value> = BTreeMap::new();
    let mut record_count = 0usize;
    let mut saw_failure = false;

    for (index, line) in lines.enumerate() {
        record_count += 1;
        let record: AuditRecord = match serde_json::from_str(line) {
            Ok(record) => record,
            Err(_) => {
                // The line is unreadable; everything after it is off-chain.
                report.steps.push(StepVerification {
                    step_id: format!("record-{index}"),
                    status: StepStatus::ChainBroken,
                    reason: Some("unparseable record".to_string()),
                });
                expected_prev = chain_digest(&expected_prev, line);
                continue;
            }
        };
        let expected_chain = chain_digest(&expected_prev, &record.preimage());
        if record.chained_digest != expected_chain || record.prev_digest != expected_prev {
            report.steps.push(StepVerification {
                step_id: record.step_id.clone(),
                status: StepStatus::ChainBroken,
                reason: Some("chained digest mismatch".to_string()),
            });
            expected_prev = expected_chain;
            continue;
        }
        expected_prev = expected_chain;

        let verification = check_record(engine, &header, &steps_by_id, &bindings, &record, saw_failure);
        if record.error.is_some() {
            saw_failure = true;
        } else if verification.status == StepStatus::Verified {
            // Bindings feed later provenance checks from the *logged* values.
            if let Some(step) = steps_by_id.get(record.step_id.as_str()) {
                let value = record.result.clone().expect("verified records carry results");
                if let Some(bind) = &step.bind_as {
                    bindings.insert(bind.clone(), value.clone());
                }
                bindings.insert(record.step_id.clone(), value);
            }
        }
        report.steps.push(verification);
    }

    report.complete = saw_failure || record_count == plan.steps.len();
    report.ok = report.plan_digest_match
        && report.store_digest_match
        && report.complete
        && report.steps.iter().all(|s| s.status == StepStatus::Verified);
    report
}

fn check_record(
    engine: &Engine,
    header: &AuditHeader,
    steps_by_id: &BTreeMap<&str, &super::PlanStep>,
    bindings: &BTreeMap<String, Value>,
    record: &AuditRecord,
    after_failure: bool,
) -> StepVerification {
    let mismatch = |reason: String| StepVerification {
        step_id: record.step_id.clone(),
        status: StepStatus::ReplayMismatch,
        reason: Some(reason),
    };

    if after_failure {
        return mismatch("recorded after a logged failure".to_string());
    }
    let Some(step) = steps_by_id.get(record.step_id.as_str()) else {
        return mismatch("step is not part of the plan".to_string());
    };
    if step.primitive != record.primitive {
        return mismatch(format!(
            "plan names primitive {:?}, log names {:?}",
            step.primitive, record.primitive
        ));
    }
    if record.pinned_now != header.pinned_now {
        return mismatch("record pinned_now differs from header".to_string());
    }

    // Argument provenance: the logged resolved args must re-derive from plan
    // literals and earlier logged results.
    match super::exec::resolve_args(&step.args, &|name: &str| bindings.get(name)) {
        Ok(expected_args) => {
            if Value::Object(expected_args) != record.args {
                return mismatch("resolved args do not re-derive from earlier results".to_string());
            }
        }
        Err(reason) => return mismatch(format!("argument provenance failed: {reason}")),
    }

    // Internal consistency of the result digest.
    let payload_digest = match (&record.result, &record.error) {
        (Some(result), None) => sha256_hex(canonical_json(result).as_bytes()),
        (None, Some(error)) => sha256_hex(canonical_json(error).as_bytes()),
        _ => return mismatch("record must carry exactly one of result or error".to_string()),
    };
    if payload_digest != record.result_digest {
        return mismatch("result digest does not match the logged payload".to_string());
    }

    // Replay for deterministic classes only.
    let class = registry::find(&record.primitive).map(|def| def.class);
    let replayable =
        matches!(class, Some(PrimitiveClass::Deterministic) | Some(PrimitiveClass::Combinator));
    if replayable {
        if let Err(reason) = replay(engine, record, header.pinned_now) {
            return mismatch(reason);
        }
    }

    StepVerification { step_id: record.step_id.clone(), status: StepStatus::Verified, reason: None }
}

fn replay(engine: &Engine, record: &AuditRecord, pinned_now: Timestamp) -> Result<(), String> {
    match registry::dispatch(engine, &record.primitive, record.args.clone(), pinned_now) {
        Ok(value) => {
            let digest = sha256_hex(canonical_json(&value).as_bytes());
            if Some(&value) != record.result.as_ref() || digest != record.result_digest {
                return Err("re-execution produced a different result".to_string());
            }
            Ok(())
        }
        Err(error) => {
            let error = crate::error::ApiError::from(&error);
            if Some(&error) != record.error.as_ref() {
                return Err(format!("re-execution failed with {}", error.code));
            }
            Ok(())
        }
    }
}

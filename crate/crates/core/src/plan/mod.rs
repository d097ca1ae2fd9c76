//! Executable DAG plans over the primitive registry.
//!
//! A plan is an externally-authored document: a list of steps, each invoking
//! one registered primitive with literal arguments and/or bindings to the
//! results of earlier steps. Execution is strictly ordered and emits a
//! hash-chained audit log (see [`exec`]); [`verify`] re-checks a log against
//! the plan and a store.

pub mod exec;
pub mod path;
pub mod verify;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::model::Timestamp;
use crate::registry;

pub use exec::{execute_plan, AuditHeader, AuditRecord, ExecOptions, PlanRun, StepFailure};
pub use verify::{verify_audit_log, StepStatus, StepVerification, VerificationReport};

/// Key marking a binding reference inside step arguments:
/// `{"$from": "<step id or bind name>", "path": "<selector>"}`.
pub const BINDING_KEY: &str = "$from";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    /// Plan document schema version; currently always 1.
    pub schema: u32,
    pub id: String,
    #[serde(default)]
    pub options: PlanOptions,
    pub steps: Vec<PlanStep>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinned_now: Option<Timestamp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_policy: Option<CandidatePolicy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanStep {
    pub id: String,
    pub primitive: String,
    #[serde(default)]
    pub args: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bind_as: Option<String>,
}

/// How resolver steps (`resolveItemReference`, `resolveThemeReference`)
/// narrow their candidate lists during plan execution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum CandidatePolicy {
    /// Bind the rank-1 candidate; fail on an empty candidate list.
    TakeTop,
    /// Fail unless exactly one candidate scores at or above the threshold.
    RequireUnique { threshold: f64 },
    /// Bind all candidates at or above the threshold.
    Threshold { threshold: f64 },
}

impl Default for CandidatePolicy {
    fn default() -> Self {
        CandidatePolicy::TakeTop
    }
}

/// One plan validation finding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanViolation {
    pub code: PlanViolationCode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_id: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanViolationCode {
    ParseError,
    CycleDetected,
    UnknownPrimitive,
    BadBinding,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanDiagnostics {
    pub violations: Vec<PlanViolation>,
}

impl std::fmt::Display for PlanDiagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            match &v.step_id {
                Some(step) => write!(f, "{:?} at step {}: {}", v.code, step, v.message)?,
                None => write!(f, "{:?}: {}", v.code, v.message)?,
            }
        }
        Ok(())
    }
}

impl std::error::Error for PlanDiagnostics {}

/// Parse and statically validate a plan document, reporting every violation.
pub fn parse_plan(document: &str) -> Result<Plan, PlanDiagnostics> {
    let plan: Plan = match serde_json::from_str(document) {
        Ok(plan) => plan,
        Err(e) => {
            return Err(PlanDiagnostics {
                violations: vec![PlanViolation {
                    code: PlanViolationCode::ParseError,
                    step_id: None,
                    message: e.to_string(),
                }],
            })
        }
    };
    let violations = validate_plan(&plan);
    if violations.is_empty() {
        Ok(plan)
    } else {
        Err(PlanDiagnostics { violations })
    }
}

fn validate_plan(plan: &Plan) -> Vec<PlanViolation> {
    let mut violations = Vec::new();
    let mut push = |code, step_id: Option<&str>, message: String| {
        violations.push(PlanViolation { code, step_id: step_id.map(str::to_string), message });
    };

    if plan.schema != 1 {
        push(
            PlanViolationCode::ParseError,
            None,
            format!("unsupported plan schema {}", plan.schema),
        );
    }

    // Names declared anywhere, to tell forward references from unknown ones.
    let mut all_names: std::collections::BTreeSet<&str> = std::collections::BTreeSet::new();
    for step in &plan.steps {
        all_names.insert(step.id.as_str());
        if let Some(bind) = &step.bind_as {
            all_names.insert(bind.as_str());
        }
    }

    let mut declared: std::collections::BTreeSet<&str> = std::collections::BTreeSet::new();
    for step in &plan.steps {
        if !declared.insert(step.id.as_str()) {
            push(
                PlanViolationCode::BadBinding,
                Some(&step.id),
                format!("duplicate step id {:?}", step.id),
            );
        }
        match registry::find(&step.primitive) {
            None => {
                let hint = registry::hint_for(&step.primitive)
                    .map(|h| format!("; did you mean {h:?}?"))
                    .unwrap_or_default();
                push(
                    PlanViolationCode::UnknownPrimitive,
                    Some(&step.id),
                    format!("unknown primitive {:?}{hint}", step.primitive),
                );
            }
            Some(def) => {
                for key in step.args.keys() {
                    if !def.params.iter().any(|p| p.name == key) {
                        push(
                            PlanViolationCode::ParseError,
                            Some(&step.id),
                            format!("{} has no parameter {:?}", def.name, key),
                        );
                    }
                }
                for param in def.params.iter().filter(|p| p.required) {
                    if !step.args.contains_key(param.name) {
                        push(
                            PlanViolationCode::ParseError,
                            Some(&step.id),
                            format!("{} requires parameter {:?}", def.name, param.name),
                        );
                    }
                }
            }
        }
        for (target, selector) in collect_bindings(&step.args) {
            match target {
                Ok(name) => {
                    if declared.contains(name) {
                        // fine: backward reference
                    } else if name == step.id || all_names.contains(name) {
                        push(
                            PlanViolationCode::CycleDetected,
                            Some(&step.id),
                            format!("binding {name:?} refers to this step or a later one"),
                        );
                    } else {
                        push(
                            PlanViolationCode::BadBinding,
                            Some(&step.id),
                            format!("binding {name:?} does not match any step id or bind name"),
                        );
                    }
                }
                Err(message) => push(PlanViolationCode::BadBinding, Some(&step.id), message),
            }
            if let Some(selector) = selector {
                if let Err(message) = path::parse_path(selector) {
                    push(PlanViolationCode::BadBinding, Some(&step.id), message);
                }
            }
        }
        if let Some(bind) = &step.bind_as {
            if bind != &step.id && !declared.insert(bind.as_str()) {
                push(
                    PlanViolationCode::BadBinding,
                    Some(&step.id),
                    format!("bind name {bind:?} collides with an earlier step or binding"),
                );
            }
        }
    }
    violations
}

/// All binding references in an argument tree, left to right:
/// `(target name or shape error, optional selector)`.
fn collect_bindings(args: &Map<String, Value>) -> Vec<(Result<&str, String>, Option<&str>)> {
    let mut found = Vec::new();
    for value in args.values() {
        collect_bindings_value(value, &mut found);
    }
    found
}

fn collect_bindings_value<'v>(
    value: &'v Value,
    found: &mut Vec<(Result<&'v str, String>, Option<&'v str>)>,
) {
    match value {
        Value::Object(map) if map.contains_key(BINDING_KEY) => {
            let target = match map.get(BINDING_KEY).and_then(Value::as_str) {
                Some(name) => Ok(name),
                None => Err(format!("{BINDING_KEY} must be a string")),
            };
            let selector = map.get("path").and_then(Value::as_str);
            let target = if map.keys().any(|k| k != BINDING_KEY && k != "path") {
                Err(format!("a binding object takes only {BINDING_KEY:?} and \"path\""))
            } else if map.contains_key("path") && selector.is_none() {
                Err("binding \"path\" must be a string".to_string())
            } else {
                target
            };
            found.push((target, selector));
        }
        Value::Object(map) => {
            for nested in map.values() {
                collect_bindings_value(nested, found);
            }
        }
        Value::Array(items) => {
            for nested in items {
                collect_bindings_value(nested, found);
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan_json(steps: &str) -> String {
        format!(r#"{{"schema": 1, "id": "t", "steps": {steps}}}"#)
    }

    #[test]
    fn minimal_plan_parses() {
        let plan = parse_plan(&plan_json(
            r#"[{"id": "s1", "primitive": "getAvailableLanguages", "args": {}}]"#,
        ))
        .unwrap();
        assert_eq!(plan.steps.len(), 1);
        assert!(parse_plan(&plan_json("[]")).unwrap().steps.is_empty());
    }

    #[test]
    fn forward_reference_is_a_cycle() {
        let err = parse_plan(&plan_json(
            r#"[
                {"id": "s1", "primitive": "getItem", "args": {"id": {"$from": "s2", "path": "id"}}},
                {"id": "s2", "primitive": "getRootThemes", "args": {}}
            ]"#,
        ))
        .unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| v.code == PlanViolationCode::CycleDetected), "{err:?}");
    }

    #[test]
    fn unknown_primitive_carries_a_hint() {
        let err = parse_plan(&plan_json(
            r#"[{"id": "s1", "primitive": "getBatchTexts", "args": {"requests": []}}]"#,
        ))
        .unwrap_err();
        let violation = &err.violations[0];
        assert_eq!(violation.code, PlanViolationCode::UnknownPrimitive);
        assert!(violation.message.contains("getBatchTextUnits"), "{}", violation.message);
    }

    #[test]
    fn unknown_binding_and_bad_selector_are_bad_bindings() {
        let err = parse_plan(&plan_json(
            r#"[{"id": "s1", "primitive": "getItem", "args": {"id": {"$from": "nope", "path": "[x"}}}]"#,
        ))
        .unwrap_err();
        assert!(err.violations.iter().all(|v| v.code == PlanViolationCode::BadBinding));
        assert_eq!(err.violations.len(), 2);
    }

    #[test]
    fn arg_names_are_checked_against_the_signature() {
        let err = parse_plan(&plan_json(
            r#"[{"id": "s1", "primitive": "getItem", "args": {"item": "x"}}]"#,
        ))
        .unwrap_err();
        // Unknown arg name plus missing required `id`.
        assert_eq!(err.violations.len(), 2);
        assert!(err.violations.iter().all(|v| v.code == PlanViolationCode::ParseError));
    }

    #[test]
    fn every_violation_is_reported_not_just_the_first() {
        let err = parse_plan(&plan_json(
            r#"[
                {"id": "s1", "primitive": "noSuch", "args": {}},
                {"id": "s1", "primitive": "getRootThemes", "args": {}}
            ]"#,
        ))
        .unwrap_err();
        assert!(err.violations.len() >= 2, "{err:?}");
    }
}

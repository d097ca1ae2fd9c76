//! Path selectors used by plan bindings and the data combinators.
//!
//! A selector is a dot/bracket sequence over JSON values:
//! `creating_action.produces_version`, `[0].id`, `item.id`. A bare numeric
//! segment is an index, so `0.id` and `[0].id` are equivalent. The empty
//! selector addresses the whole value.

use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Field(String),
    Index(usize),
}

pub fn parse_path(selector: &str) -> Result<Vec<Segment>, String> {
    let mut segments = Vec::new();
    let mut rest = selector.trim();
    while !rest.is_empty() {
        if let Some(stripped) = rest.strip_prefix('.') {
            rest = stripped;
            continue;
        }
        if let Some(stripped) = rest.strip_prefix('[') {
            let close = stripped
                .find(']')
                .ok_or_else(|| format!("unclosed '[' in selector {selector:?}"))?;
            let index: usize = stripped[..close]
                .trim()
                .parse()
                .map_err(|_| format!("bad index in selector {selector:?}"))?;
            segments.push(Segment::Index(index));
            rest = &stripped[close + 1..];
            continue;
        }
        let end = rest.find(['.', '[']).unwrap_or(rest.len());
        let token = &rest[..end];
        if token.is_empty() {
            return Err(format!("empty segment in selector {selector:?}"));
        }
        match token.parse::<usize>() {
            Ok(index) => segments.push(Segment::Index(index)),
            Err(_) => segments.push(Segment::Field(token.to_string())),
        }
        rest = &rest[end..];
    }
    Ok(segments)
}

pub fn extract<'v>(value: &'v Value, path: &[Segment]) -> Option<&'v Value> {
    let mut cursor = value;
    for segment in path {
        cursor = match segment {
            Segment::Field(name) => cursor.as_object()?.get(name)?,
            Segment::Index(index) => cursor.as_array()?.get(*index)?,
        };
    }
    Some(cursor)
}

/// Parse and extract in one step; `None` covers both a bad selector and a
/// missing path.
pub fn extract_str<'v>(value: &'v Value, selector: &str) -> Option<&'v Value> {
    let path = parse_path(selector).ok()?;
    extract(value, &path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn selectors_address_fields_and_indices() {
        let value = json!({"items": [{"id": "a"}, {"id": "b"}], "n": 2});
        assert_eq!(extract_str(&value, "items[1].id"), Some(&json!("b")));
        assert_eq!(extract_str(&value, "items.0.id"), Some(&json!("a")));
        assert_eq!(extract_str(&value, ".n"), Some(&json!(2)));
        assert_eq!(extract_str(&value, ""), Some(&value));
        assert_eq!(extract_str(&value, "items[9].id"), None);
        assert_eq!(extract_str(&value, "missing"), None);
    }

    #[test]
    fn malformed_selectors_are_rejected() {
        assert!(parse_path("items[").is_err());
        assert!(parse_path("a..b").is_err());
        assert!(parse_path("[x]").is_err());
    }
}

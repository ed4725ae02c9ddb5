// SPDX-License-Identifier: MIT
//! Text format for models.
//!
//! ```text
//! nodes: 1 2 3 4
//! {1} _||_ {4} | {2,3}
//! {2} _||_ {3} | {4}
//! ```
//!
//! Mirrors are added on load. Listing both a statement and its mirror is
//! accepted with a warning.

use super::{IndependenceModel, ModelError, Triple};
use crate::nodeset::NodeSet;

#[derive(Debug, Clone)]
pub struct ParsedModel {
    pub model: IndependenceModel,
    pub warnings: Vec<String>,
}

fn perr(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse { line, message: message.into() }
}

fn parse_set(m: &IndependenceModel, text: &str, line: usize) -> Result<NodeSet, ModelError> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| perr(line, format!("expected a braced set, got `{}`", text.trim())))?;
    let mut s = NodeSet::EMPTY;
    for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let v = m.index_of(tok).ok_or_else(|| perr(line, format!("unknown node `{tok}`")))?;
        if s.contains(v) {
            return Err(perr(line, format!("node `{tok}` repeated within a set")));
        }
        s.insert(v);
    }
    Ok(s)
}

pub fn parse_model(text: &str, max_nodes: usize) -> Result<ParsedModel, ModelError> {
    let mut model: Option<IndependenceModel> = None;
    let mut warnings = Vec::new();
    let mut listed: Vec<Triple> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("nodes:") {
            if model.is_some() {
                return Err(perr(line, "repeated `nodes:` declaration"));
            }
            let labels = rest.split_whitespace().map(str::to_string).collect();
            model = Some(IndependenceModel::empty_bounded(labels, max_nodes)?);
            continue;
        }
        let m = model.as_mut().ok_or_else(|| perr(line, "statement before `nodes:` declaration"))?;
        let (lhs, c_text) = body.rsplit_once('|').ok_or_else(|| perr(line, "missing `|`"))?;
        let (a_text, b_text) = lhs.split_once("_||_").ok_or_else(|| perr(line, "missing `_||_`"))?;
        let a = parse_set(m, a_text, line)?;
        let b = parse_set(m, b_text, line)?;
        let c = parse_set(m, c_text, line)?;
        let t = Triple::new(a, b, c).map_err(|_| perr(line, "sets are not pairwise disjoint"))?;
        if t.is_trivial() {
            warnings.push(format!("line {line}: statement with an empty side holds by convention"));
            continue;
        }
        if listed.contains(&t) {
            warnings.push(format!("line {line}: duplicate statement {}", m.render(&t)));
        } else if listed.contains(&t.swapped()) {
            warnings.push(format!("line {line}: mirror of an earlier statement listed explicitly"));
        }
        listed.push(t);
        m.insert(t)?;
    }
    let model = model.ok_or_else(|| perr(0, "missing `nodes:` declaration"))?;
    Ok(ParsedModel { model, warnings })
}

/// Canonical form: one statement per mirror pair, in triple order.
pub fn write_model(m: &IndependenceModel) -> String {
    let mut s = format!("nodes: {}\n", m.labels().join(" "));
    for t in m.canonical_statements() {
        s.push_str(&m.render(&t));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_MAX_NODES;

    const DIAMOND: &str = "nodes: 1 2 3 4\n{2} _||_ {3} | {4}\n{1} _||_ {4} | {3}\n{1} _||_ {4} | {2,3}\n";

    #[test]
    fn parse_and_round_trip() {
        let p = parse_model(DIAMOND, DEFAULT_MAX_NODES).unwrap();
        assert!(p.warnings.is_empty());
        assert_eq!(p.model.len(), 6);
        let canonical = write_model(&p.model);
        assert_eq!(canonical, "nodes: 1 2 3 4\n{1} _||_ {4} | {3}\n{1} _||_ {4} | {2,3}\n{2} _||_ {3} | {4}\n");
        let again = parse_model(&canonical, DEFAULT_MAX_NODES).unwrap();
        assert_eq!(write_model(&again.model), canonical);
    }

    #[test]
    fn empty_conditioning_and_warnings() {
        let p = parse_model("nodes: a b\n{a} _||_ {b} | {}\n{b} _||_ {a} | {}\n", DEFAULT_MAX_NODES).unwrap();
        assert_eq!(p.warnings.len(), 1);
        assert!(p.model.pair(0, 1, NodeSet::EMPTY));
    }

    #[test]
    fn errors() {
        let e = parse_model("nodes: a b\n{a} _||_ {c} | {}\n", DEFAULT_MAX_NODES).unwrap_err();
        assert!(matches!(e, ModelError::Parse { line: 2, .. }));
        let e = parse_model("nodes: a b\n{a} _||_ {a} | {}\n", DEFAULT_MAX_NODES).unwrap_err();
        assert!(matches!(e, ModelError::Parse { line: 2, .. }));
        assert!(parse_model("{a} _||_ {b} | {}\n", DEFAULT_MAX_NODES).is_err());
        assert!(matches!(
            parse_model("nodes: 1 2 3 4 5 6 7 8 9\n", DEFAULT_MAX_NODES),
            Err(ModelError::TooManyNodes { .. })
        ));
    }
}

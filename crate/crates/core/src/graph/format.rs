// SPDX-License-Identifier: MIT
//! Line-oriented text format for graphs.
//!
//! ```text
//! # comment
//! nodes: a b c
//! a -> b
//! b <-> c
//! ```

use thiserror::Error;

use super::{Graph, GraphError, Mark};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut graph: Option<Graph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("nodes:") {
            if graph.is_some() {
                return Err(err(line_no, "repeated `nodes:` declaration"));
            }
            let labels: Vec<&str> = rest.split_whitespace().collect();
            graph = Some(Graph::new(labels).map_err(|e| err(line_no, e.to_string()))?);
            continue;
        }
        let g = graph
            .as_mut()
            .ok_or_else(|| err(line_no, "edge before `nodes:` declaration"))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [a, op, b] = tokens[..] else {
            return Err(err(line_no, format!("expected `a -> b` or `a <-> b`, got `{line}`")));
        };
        let ia = g.node(a).map_err(|e| err(line_no, e.to_string()))?;
        let ib = g.node(b).map_err(|e| err(line_no, e.to_string()))?;
        let res = match op {
            "->" => g.add_arrow(ia, ib),
            "<-" => g.add_arrow(ib, ia),
            "<->" => g.add_arc(ia, ib),
            _ => return Err(err(line_no, format!("unknown edge operator `{op}`"))),
        };
        res.map_err(|e: GraphError| err(line_no, e.to_string()))?;
    }
    graph.ok_or_else(|| err(0, "missing `nodes:` declaration"))
}

/// Canonical serialization; [`parse_graph`] reads it back to an equal graph.
pub fn write_graph(g: &Graph) -> String {
    let mut s = String::from("nodes:");
    for l in g.labels() {
        s.push(' ');
        s.push_str(l);
    }
    s.push('\n');
    for e in g.edges() {
        let op = match e.mark {
            Mark::Arrow => "->",
            Mark::Arc => "<->",
        };
        s.push_str(&format!("{} {} {}\n", g.label(e.from), op, g.label(e.to)));
    }
    s
}

impl std::str::FromStr for Graph {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, GraphError> {
        Ok(parse_graph(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "nodes: 1 2 3 4\n2 -> 1\n3 -> 1\n4 -> 2\n4 -> 3\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(write_graph(&g), text);
        let arcs = "nodes: a b c\na <-> b\na -> c\n";
        assert_eq!(write_graph(&parse_graph(arcs).unwrap()), arcs);
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_graph("# chain\n\nnodes: a b # two nodes\na -> b # arrow\n").unwrap();
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_graph("nodes: a b\na -> c\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_graph("nodes: a b\na -> b\nb <-> a\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_graph("nodes: a b\n\na -> a\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(parse_graph("a -> b\n").is_err());
        assert!(parse_graph("nodes: a b\na => b\n").is_err());
    }
}

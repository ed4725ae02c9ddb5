// SPDX-License-Identifier: MIT
//! JSON form of an SCM.
//!
//! ```json
//! {
//!   "graph": "nodes: 1 2\n2 -> 1\n",
//!   "supports": { "1": [0, 1], "2": [0, 1] },
//!   "noise_blocks": [
//!     { "nodes": ["1"], "table": [ { "values": [0], "prob": "1/2" }, { "values": [1], "prob": "1/2" } ] }
//!   ],
//!   "mechanisms": { "1": [ { "parents": [0], "noise": 0, "out": 0 } ] }
//! }
//! ```
//!
//! Maps follow node order. Mechanism rows list parent values in increasing
//! node order. Probabilities are exact rationals written as strings.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value as Json};

use super::{Mechanism, NoiseBlock, Prob, Scm, ScmError, Value};
use crate::graph::parse_graph;

#[derive(Serialize, Deserialize)]
struct Row {
    values: Vec<Value>,
    prob: String,
}

#[derive(Serialize, Deserialize)]
struct Block {
    nodes: Vec<String>,
    table: Vec<Row>,
}

#[derive(Serialize, Deserialize)]
struct MechRow {
    parents: Vec<Value>,
    noise: Value,
    out: Value,
}

#[derive(Serialize, Deserialize)]
struct ScmFile {
    graph: String,
    supports: Map<String, Json>,
    noise_blocks: Vec<Block>,
    mechanisms: Map<String, Json>,
}

fn ferr(e: impl std::fmt::Display) -> ScmError {
    ScmError::Format(e.to_string())
}

pub fn parse_scm(text: &str) -> Result<Scm, ScmError> {
    let file: ScmFile = serde_json::from_str(text).map_err(ferr)?;
    let g = parse_graph(&file.graph).map_err(ferr)?;
    let node = |l: &str| g.index_of(l).ok_or_else(|| ferr(format!("unknown node `{l}`")));
    let mut supports = vec![None; g.n()];
    for (l, v) in file.supports {
        supports[node(&l)?] = Some(serde_json::from_value::<Vec<Value>>(v).map_err(ferr)?);
    }
    let supports = supports
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| ferr(format!("no values for `{}`", g.label(i)))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut blocks = Vec::new();
    for b in file.noise_blocks {
        let nodes = b.nodes.iter().map(|l| node(l)).collect::<Result<Vec<_>, _>>()?;
        let mut table = Vec::new();
        for r in b.table {
            let p = Prob::from_str(r.prob.trim()).map_err(|_| ScmError::BadProbability(r.prob.clone()))?;
            table.push((r.values, p));
        }
        blocks.push(NoiseBlock { nodes, table });
    }
    let mut mechanisms = vec![Mechanism::default(); g.n()];
    for (l, rows) in file.mechanisms {
        let v = node(&l)?;
        for r in serde_json::from_value::<Vec<MechRow>>(rows).map_err(ferr)? {
            if mechanisms[v].table.insert((r.parents, r.noise), r.out).is_some() {
                return Err(ferr(format!("repeated mechanism row for `{l}`")));
            }
        }
    }
    Scm::new(g, supports, blocks, mechanisms)
}

pub fn write_scm(s: &Scm) -> String {
    let g = s.graph();
    let mut supports = Map::new();
    let mut mechanisms = Map::new();
    for v in 0..g.n() {
        supports.insert(g.label(v).to_string(), serde_json::to_value(s.support(v)).unwrap());
        let rows: Vec<MechRow> = s
            .mechanism(v)
            .table
            .iter()
            .map(|((parents, noise), out)| MechRow { parents: parents.clone(), noise: *noise, out: *out })
            .collect();
        mechanisms.insert(g.label(v).to_string(), serde_json::to_value(rows).unwrap());
    }
    let noise_blocks = s
        .blocks()
        .iter()
        .map(|b| Block {
            nodes: b.nodes.iter().map(|&v| g.label(v).to_string()).collect(),
            table: b.table.iter().map(|(values, p)| Row { values: values.clone(), prob: p.to_string() }).collect(),
        })
        .collect();
    let file = ScmFile { graph: g.to_text(), supports, noise_blocks, mechanisms };
    let mut out = serde_json::to_string_pretty(&file).unwrap();
    out.push('\n');
    out
}

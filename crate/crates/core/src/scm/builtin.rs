// SPDX-License-Identifier: MIT
//! Named example SCMs.
//!
//! - `mod2@p`: `X2 = ε2`, `X1 = X2 ⊕ ε1`, with `ε1 ~ Bern(p)`, `ε2 ~ Bern(1/2)`.
//! - `xor3`: `X1 = X2 ⊕ X3 ⊕ ε1`, `ε1 ~ Bern(1/3)`, `X2`, `X3` fair coins.
//! - `maxdiamond`: `X4 = ε4`, `X3 = max(2 X4, ε3)`, `X2 = max(X4, ε2)`,
//!   `X1 = max(X2, X3, ε1)`, noises i.i.d. uniform on `{0, 1, 2}`.

use std::str::FromStr;

use super::{NoiseBlock, Prob, Scm, ScmError, Value};
use crate::graph::Graph;

pub const BUILTIN_IDS: [&str; 4] = ["mod2@1/2", "mod2@1/3", "xor3", "maxdiamond"];

fn bernoulli(v: usize, p: &Prob) -> NoiseBlock {
    let one = Prob::from_integer(1.into());
    NoiseBlock { nodes: vec![v], table: vec![(vec![0], &one - p), (vec![1], p.clone())] }
}

fn uniform(v: usize, values: &[Value]) -> NoiseBlock {
    let p = Prob::new(1.into(), (values.len() as i64).into());
    NoiseBlock { nodes: vec![v], table: values.iter().map(|&x| (vec![x], p.clone())).collect() }
}

fn half() -> Prob {
    Prob::new(1.into(), 2.into())
}

pub fn mod2(p: Prob) -> Result<Scm, ScmError> {
    let g = Graph::from_edges(&["1", "2"], &[("2", "1")], &[]);
    Scm::from_fn(g, vec![vec![0, 1]; 2], vec![bernoulli(0, &p), bernoulli(1, &half())], |v, pa, e| {
        if v == 0 { (pa[0] + e) % 2 } else { e }
    })
}

pub fn xor3() -> Result<Scm, ScmError> {
    let g = Graph::from_edges(&["1", "2", "3"], &[("2", "1"), ("3", "1")], &[]);
    let third = Prob::new(1.into(), 3.into());
    let blocks = vec![bernoulli(0, &third), bernoulli(1, &half()), bernoulli(2, &half())];
    Scm::from_fn(g, vec![vec![0, 1]; 3], blocks, |v, pa, e| if v == 0 { (pa[0] + pa[1] + e) % 2 } else { e })
}

pub fn maxdiamond() -> Result<Scm, ScmError> {
    let g = Graph::from_edges(&["1", "2", "3", "4"], &[("4", "3"), ("4", "2"), ("3", "1"), ("2", "1")], &[]);
    let noise = [0, 1, 2];
    let supports = vec![vec![0, 1, 2, 4], vec![0, 1, 2], vec![0, 1, 2, 4], vec![0, 1, 2]];
    let blocks = (0..4).map(|v| uniform(v, &noise)).collect();
    Scm::from_fn(g, supports, blocks, |v, pa, e| match v {
        0 => pa[0].max(pa[1]).max(e),
        1 => pa[0].max(e),
        2 => (2 * pa[0]).max(e),
        _ => e,
    })
}

/// Loads a named example; `mod2@p` accepts any rational `0 < p < 1`.
pub fn builtin(id: &str) -> Result<Scm, ScmError> {
    match id {
        "xor3" => xor3(),
        "maxdiamond" => maxdiamond(),
        _ => {
            let p = id.strip_prefix("mod2@").ok_or_else(|| ScmError::UnknownBuiltin(id.to_string()))?;
            let p = Prob::from_str(p).map_err(|_| ScmError::BadProbability(p.to_string()))?;
            let zero = Prob::from_integer(0.into());
            let one = Prob::from_integer(1.into());
            if p <= zero || p >= one {
                return Err(ScmError::BadProbability(p.to_string()));
            }
            mod2(p)
        }
    }
}

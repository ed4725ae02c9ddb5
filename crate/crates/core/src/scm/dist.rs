// SPDX-License-Identifier: MIT
//! Finite distributions over value tuples with exact probabilities.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{Prob, Value};

/// Positive-probability tuples only; absent tuples have probability zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dist(BTreeMap<Vec<Value>, Prob>);

impl Dist {
    pub fn new() -> Self {
        Dist(BTreeMap::new())
    }

    pub fn add(&mut self, k: Vec<Value>, p: Prob) {
        if p.is_zero() {
            return;
        }
        *self.0.entry(k).or_insert_with(Prob::zero) += p;
    }

    pub fn get(&self, k: &[Value]) -> Prob {
        self.0.get(k).cloned().unwrap_or_else(Prob::zero)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Value>, &Prob)> {
        self.0.iter()
    }

    /// Marginal over the given columns, in the given order.
    pub fn project(&self, cols: &[usize]) -> Dist {
        let mut out = Dist::new();
        for (k, p) in &self.0 {
            out.add(cols.iter().map(|&c| k[c]).collect(), p.clone());
        }
        out
    }

    /// Columns `a` independent of columns `b` given columns `c`: for every
    /// `c` value with positive mass, `P(a,b,c) P(c) = P(a,c) P(b,c)` over all
    /// `a` and `b` values seen with that `c`.
    pub fn independent(&self, a: &[usize], b: &[usize], c: &[usize]) -> bool {
        let cat = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
        let p_c = self.project(c);
        let p_ac = self.project(&cat(a, c));
        let p_bc = self.project(&cat(b, c));
        let p_abc = self.project(&cat(&cat(a, b), c));
        let split = |d: &Dist, w: usize| {
            let mut by_c: BTreeMap<Vec<Value>, Vec<(Vec<Value>, Prob)>> = BTreeMap::new();
            for (k, p) in d.iter() {
                by_c.entry(k[w..].to_vec()).or_default().push((k[..w].to_vec(), p.clone()));
            }
            by_c
        };
        let ac = split(&p_ac, a.len());
        let bc = split(&p_bc, b.len());
        for (cv, pc) in p_c.iter() {
            let (Some(xs), Some(ys)) = (ac.get(cv), bc.get(cv)) else { continue };
            for (xa, pa) in xs {
                for (xb, pb) in ys {
                    let key: Vec<Value> = xa.iter().chain(xb).chain(cv).copied().collect();
                    if p_abc.get(&key) * pc != pa * pb {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Total mass.
    pub fn total(&self) -> Prob {
        self.0.values().fold(Prob::zero(), |acc, p| acc + p)
    }
}

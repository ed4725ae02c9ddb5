// SPDX-License-Identifier: MIT
//! Exact, oracle-setting workbench for constraint-based structure learning
//! over directed ancestral graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: mixed graphs with arrows and arcs, ancestry, partial orders,
//!   collider paths, latent projection and augmentation;
//! - [`separation`]: m-separation, induced independence models, maximality
//!   and the ordered local Markov property;
//! - [`imodel`]: explicit independence models, the nine structural
//!   properties, stability conditions and closures;
//! - [`learn`]: the brute-force natural learner, Markov-equivalence deciders
//!   and end-to-end audits;
//! - [`scm`]: finite discrete structural causal models with exact rational
//!   arithmetic;
//! - [`fixtures`]: the worked examples bundled with expected verdicts.
//!
//! Every verdict is exact. Nothing here samples or estimates.

pub mod fixtures;
pub mod graph;
pub mod imodel;
pub mod learn;
pub mod nodeset;
pub mod report;
pub mod sample;
pub mod scm;
pub mod separation;

pub use graph::{Graph, GraphError, Mark, PartialOrder, Path, Skeleton};
pub use imodel::{IndependenceModel, ModelError, PropertyId, Triple, Witness};
pub use nodeset::NodeSet;
pub use report::AuditReport;
pub use scm::{JointTable, Scm, ScmError};
pub use separation::SeparationQuery;

/// Default bound on the number of nodes of a materialized independence model.
pub const DEFAULT_MAX_NODES: usize = 8;

/// Outcome of a check that either holds or fails with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    Holds,
    Fails(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }

    pub fn into_witness(self) -> Option<W> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }

    pub fn map<V, F: FnOnce(W) -> V>(self, f: F) -> Verdict<V> {
        match self {
            Verdict::Holds => Verdict::Holds,
            Verdict::Fails(w) => Verdict::Fails(f(w)),
        }
    }
}

impl<W> From<Option<W>> for Verdict<W> {
    fn from(o: Option<W>) -> Self {
        match o {
            None => Verdict::Holds,
            Some(w) => Verdict::Fails(w),
        }
    }
}

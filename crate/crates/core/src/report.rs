// SPDX-License-Identifier: MIT
//! Structured audit reports with a JSON form and a human rendering.
//!
//! A report holds named flags in insertion order, a ledger of guarantees
//! (hypotheses met, conclusion observed) and a provenance block. A false
//! flag always carries a witness string.

use serde::{Deserialize, Serialize};

use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flag {
    pub name: String,
    pub value: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

/// One guarantee. `hypotheses_met` is `None` when it does not apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub claim: String,
    pub hypotheses_met: Option<bool>,
    pub conclusion_observed: bool,
}

impl LedgerEntry {
    pub fn new(claim: &str, hypotheses_met: Option<bool>, conclusion_observed: bool) -> Self {
        LedgerEntry { claim: claim.to_string(), hypotheses_met, conclusion_observed }
    }

    /// Hypotheses hold yet the promised conclusion is absent.
    pub fn is_inconsistent(&self) -> bool {
        self.hypotheses_met == Some(true) && !self.conclusion_observed
    }

    pub fn status(&self) -> &'static str {
        match self.hypotheses_met {
            None => "n/a",
            Some(false) => "hypotheses not met",
            Some(true) if self.conclusion_observed => "conclusion observed",
            Some(true) => "CONCLUSION MISSING",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub inputs: Vec<String>,
    pub fixtures: Vec<String>,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub subject: String,
    pub flags: Vec<Flag>,
    pub ledger: Vec<LedgerEntry>,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn new(subject: &str) -> Self {
        AuditReport {
            subject: subject.to_string(),
            flags: Vec::new(),
            ledger: Vec::new(),
            provenance: Provenance { tool_version: env!("CARGO_PKG_VERSION").to_string(), ..Default::default() },
            notes: Vec::new(),
        }
    }

    /// Adds or replaces a flag.
    pub fn push(&mut self, name: &str, v: Verdict<String>) {
        let flag = Flag { name: name.to_string(), value: v.holds(), witness: v.into_witness() };
        match self.flags.iter_mut().find(|f| f.name == name) {
            Some(f) => *f = flag,
            None => self.flags.push(flag),
        }
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        self.get(name).map(|f| f.value)
    }

    pub fn get(&self, name: &str) -> Option<&Flag> {
        self.flags.iter().find(|f| f.name == name)
    }

    pub fn entry(&self, claim: &str) -> Option<&LedgerEntry> {
        self.ledger.iter().find(|e| e.claim == claim)
    }

    pub fn inconsistencies(&self) -> Vec<&LedgerEntry> {
        self.ledger.iter().filter(|e| e.is_inconsistent()).collect()
    }

    /// Appends the flags and ledger of another report, keeping ours on clashes.
    pub fn absorb(&mut self, other: AuditReport) {
        for f in other.flags {
            if self.get(&f.name).is_none() {
                self.flags.push(f);
            }
        }
        for e in other.ledger {
            if self.entry(&e.claim).is_none() {
                self.ledger.push(e);
            }
        }
        self.notes.extend(other.notes);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn render(&self) -> String {
        let mut s = format!("{}\n", self.subject);
        let width = self.flags.iter().map(|f| f.name.len()).max().unwrap_or(0);
        for f in &self.flags {
            let mark = if f.value { "yes" } else { "no " };
            s.push_str(&format!("  {:width$}  {mark}", f.name));
            if let Some(w) = &f.witness {
                s.push_str(&format!("  ({w})"));
            }
            s.push('\n');
        }
        if !self.ledger.is_empty() {
            s.push_str("guarantees\n");
            let width = self.ledger.iter().map(|e| e.claim.len()).max().unwrap_or(0);
            for e in &self.ledger {
                s.push_str(&format!("  {:width$}  {}\n", e.claim, e.status()));
            }
        }
        for n in &self.notes {
            s.push_str(&format!("note: {n}\n"));
        }
        s
    }
}

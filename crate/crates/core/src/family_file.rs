//! JSON description of a function family for the H-Test.
//!
//! ```json
//! { "n": 4, "k": 2, "edges": [[1, 2]],
//!   "members": { "v1": "dict:3", "v2": "dict:3", "e1,2": "-dict:3" } }
//! ```
//!
//! The key `"all"` supplies a spec for every member not listed explicitly.
//! When `edges` is omitted the complete hypergraph on `k` vertices is used.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FnSpec;
use crate::testers::{complete_hypergraph, FunctionFamily, Hypergraph};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_singletons: bool,
    pub members: BTreeMap<String, String>,
}

/// Member key for an edge: its vertices joined by commas, e.g. `e1,2`.
pub fn edge_key(edge: &[usize]) -> String {
    let parts: Vec<String> = edge.iter().map(usize::to_string).collect();
    format!("e{}", parts.join(","))
}

impl FamilyFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("family file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family file serializes")
    }

    pub fn hypergraph(&self) -> Result<Hypergraph> {
        match (&self.edges, self.allow_singletons) {
            (None, _) => complete_hypergraph(self.k),
            (Some(edges), false) => Hypergraph::new(self.k, edges.clone()),
            (Some(edges), true) => Hypergraph::with_singletons(self.k, edges.clone()),
        }
    }

    fn spec_for(&self, key: &str) -> Result<FnSpec> {
        self.members
            .get(key)
            .or_else(|| self.members.get("all"))
            .ok_or_else(|| Error::Parse(format!("family file has no spec for member {key}")))?
            .parse()
    }

    pub fn build(&self) -> Result<FunctionFamily> {
        let h = self.hypergraph()?;
        let mut known: Vec<String> = (1..=h.k()).map(|i| format!("v{i}")).collect();
        known.extend(h.edges().iter().map(|e| edge_key(e)));
        known.push("all".into());
        if let Some(extra) = self.members.keys().find(|key| !known.contains(key)) {
            return Err(Error::Parse(format!("unknown family member {extra:?}")));
        }
        let vertices = (1..=h.k())
            .map(|i| self.spec_for(&format!("v{i}"))?.build(self.n))
            .collect::<Result<Vec<_>>>()?;
        let edges = h
            .edges()
            .iter()
            .map(|e| self.spec_for(&edge_key(e))?.build(self.n))
            .collect::<Result<Vec<_>>>()?;
        FunctionFamily::new(h, vertices, edges)
    }
}

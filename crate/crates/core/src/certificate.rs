//! Violation certificates shared by every checking stage.

use serde::{Deserialize, Serialize};

/// A named violation: which check failed, on which elements, and the family that exhibits it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub lemma: String,
    pub elements: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_handle: Option<String>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

impl Certificate {
    pub fn new(lemma: &str, elements: Vec<String>) -> Self {
        Certificate { lemma: lemma.into(), elements, witness_handle: None, detail: String::new() }
    }

    pub fn with_handle(mut self, handle: impl Into<String>) -> Self {
        self.witness_handle = Some(handle.into());
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

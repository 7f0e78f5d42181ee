//! JSON instance files: `{"factors": [6, 6], "rows": ["1010...", ...]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::charmap::CharMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub factors: Vec<usize>,
    pub rows: Vec<String>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Instance(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Instance(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes") + "\n"
    }

    /// The matrix, with shape checked but validity not yet decided.
    pub fn to_matrix(&self) -> Result<CharMatrix> {
        let dim = 2 * self.factors.len();
        if self.rows.len() != dim {
            return Err(Error::Instance(format!("expected {dim} rows for {} factors, found {}", self.factors.len(), self.rows.len())));
        }
        CharMatrix::from_rows(&self.factors, &self.rows)
    }
}

impl From<&CharMatrix> for InstanceFile {
    fn from(lambda: &CharMatrix) -> Self {
        InstanceFile {
            factors: lambda.polytope().factors().to_vec(),
            rows: lambda.matrix().rows().iter().map(ToString::to_string).collect(),
        }
    }
}

//! JSON document envelope shared with the command-line tools: a tagged
//! wrapper {version, kind, payload} whose payload schema is fixed by the
//! kind. Emitted documents re-parse to equal values.

use serde::{Deserialize, Serialize};

use crate::balance::{BeamTerm, ForceSystem};
use crate::error::{Error, Result};
use crate::optimize::{GroundStructure, TrussSolution};
use crate::stress::StressedChain;

pub const DOC_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocKind {
    ForceSystem,
    StressedChain,
    GroundStructure,
    TrussSolution,
    Beams,
    Report,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Document {
    pub version: String,
    pub kind: DocKind,
    pub payload: serde_json::Value,
}

impl Document {
    pub fn new(kind: DocKind, payload: serde_json::Value) -> Self {
        Document { version: DOC_VERSION.into(), kind, payload }
    }

    pub fn parse(text: &str) -> Result<Document> {
        let doc: Document =
            serde_json::from_str(text).map_err(|e| Error::Schema(format!("bad document: {e}")))?;
        if doc.version != DOC_VERSION {
            return Err(Error::Schema(format!(
                "unsupported document version {:?}",
                doc.version
            )));
        }
        doc.validate_payload()?;
        Ok(doc)
    }

    /// The payload must deserialize under its declared kind.
    pub fn validate_payload(&self) -> Result<()> {
        match self.kind {
            DocKind::ForceSystem => {
                self.typed::<ForceSystem>()?;
            }
            DocKind::StressedChain => {
                self.typed::<StressedChain>()?;
            }
            DocKind::GroundStructure => {
                self.typed::<GroundStructure>()?.validate()?;
            }
            DocKind::TrussSolution => {
                self.typed::<TrussSolution>()?;
            }
            DocKind::Beams => {
                self.typed::<Vec<BeamTerm>>()?;
            }
            DocKind::Report => {}
        }
        Ok(())
    }

    pub fn typed<T: serde::de::DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.payload.clone())
            .map_err(|e| Error::Schema(format!("payload does not match kind: {e}")))
    }

    pub fn from_value<T: Serialize>(kind: DocKind, value: &T) -> Result<Document> {
        let payload = serde_json::to_value(value)
            .map_err(|e| Error::Schema(format!("serialization failed: {e}")))?;
        Ok(Document::new(kind, payload))
    }

    pub fn to_string_pretty(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Schema(format!("serialization failed: {e}")))
    }
}

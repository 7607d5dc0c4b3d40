//! Reference-set ingestion.
//!
//! Format: UTF-8 text, one SMILES per line; `#`-prefixed comment lines and
//! blank lines are ignored. Lines that fail to parse are collected as
//! rejections rather than aborting the run, so metric denominators stay
//! auditable.

use std::fs;
use std::io;
use std::path::Path;

use crate::error::Error;
use crate::molgraph::MolGraph;
use crate::smiles;

/// One rejected input line.
#[derive(Debug, Clone)]
pub struct Rejection {
    /// 1-based line number.
    pub line: usize,
    pub text: String,
    pub error: Error,
}

#[derive(Debug, Clone, Default)]
pub struct ReferenceSet {
    pub molecules: Vec<MolGraph>,
    pub rejections: Vec<Rejection>,
}

impl ReferenceSet {
    pub fn accepted(&self) -> usize {
        self.molecules.len()
    }

    pub fn rejected(&self) -> usize {
        self.rejections.len()
    }
}

/// Parses reference text line by line.
pub fn parse_reference(text: &str) -> ReferenceSet {
    let mut set = ReferenceSet::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match smiles::parse(line) {
            Ok(graph) => set.molecules.push(graph),
            Err(error) => set.rejections.push(Rejection {
                line: idx + 1,
                text: line.to_string(),
                error,
            }),
        }
    }
    set
}

/// Reads and parses a reference file. IO failures are fatal; line-level
/// parse failures are returned as rejections.
pub fn load_reference(path: &Path) -> io::Result<ReferenceSet> {
    let text = fs::read_to_string(path)?;
    Ok(parse_reference(&text))
}

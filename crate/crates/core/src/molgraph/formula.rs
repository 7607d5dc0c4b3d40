//! Molecular formulas as element-to-count maps.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Element symbol to count map, hydrogens included.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Formula(BTreeMap<String, u32>);

impl Formula {
    pub fn new() -> Formula {
        Formula::default()
    }

    pub fn add(&mut self, symbol: &str, count: u32) {
        if count == 0 {
            return;
        }
        *self.0.entry(symbol.to_string()).or_insert(0) += count;
    }

    pub fn count(&self, symbol: &str) -> u32 {
        self.0.get(symbol).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<String, u32> {
        &self.0
    }

    /// Sum of per-element absolute count differences, over the union of
    /// elements in either formula.
    pub fn distance(&self, other: &Formula) -> u32 {
        let mut symbols: Vec<&String> = self.0.keys().chain(other.0.keys()).collect();
        symbols.sort();
        symbols.dedup();
        symbols
            .into_iter()
            .map(|s| self.count(s).abs_diff(other.count(s)))
            .sum()
    }

    /// Parses Hill-style formulas such as `C7H8N2O2`.
    pub fn parse(text: &str) -> Result<Formula> {
        let bytes = text.as_bytes();
        let mut formula = Formula::new();
        let mut i = 0;
        while i < bytes.len() {
            if !bytes[i].is_ascii_uppercase() {
                return Err(Error::Formula(format!(
                    "expected element symbol at byte {i} of {text:?}"
                )));
            }
            let mut end = i + 1;
            while end < bytes.len() && bytes[end].is_ascii_lowercase() {
                end += 1;
            }
            let symbol = &text[i..end];
            i = end;
            let mut count: u32 = 0;
            let digits_start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                count = count
                    .checked_mul(10)
                    .and_then(|c| c.checked_add(u32::from(bytes[i] - b'0')))
                    .ok_or_else(|| Error::Formula(format!("count overflow in {text:?}")))?;
                i += 1;
            }
            if i == digits_start {
                count = 1;
            }
            if count == 0 {
                return Err(Error::Formula(format!("zero count in {text:?}")));
            }
            if formula.0.contains_key(symbol) {
                return Err(Error::Formula(format!("repeated element {symbol} in {text:?}")));
            }
            formula.add(symbol, count);
        }
        if formula.0.is_empty() {
            return Err(Error::Formula("empty formula".into()));
        }
        Ok(formula)
    }
}

impl fmt::Display for Formula {
    /// Hill order: carbon, hydrogen, then the rest alphabetically.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut write_one = |symbol: &str| -> fmt::Result {
            match self.count(symbol) {
                0 => Ok(()),
                1 => write!(f, "{symbol}"),
                n => write!(f, "{symbol}{n}"),
            }
        };
        write_one("C")?;
        write_one("H")?;
        for symbol in self.0.keys() {
            if symbol != "C" && symbol != "H" {
                write_one(symbol)?;
            }
        }
        Ok(())
    }
}

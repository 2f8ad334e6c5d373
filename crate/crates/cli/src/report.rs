//! Plain-text reports: `key=value` lines, a blank line, then free-form detail.

use std::collections::BTreeMap;
use std::fmt;

use stasheff::graded::format_word;
use stasheff::{MultiMap, Residuals};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    fields: Vec<(String, String)>,
    detail: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report::default();
        r.field("command", command);
        r
    }

    pub fn field(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.fields.push((key.into(), value.to_string()));
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.detail.push(text.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    /// Records the per-arity nonzero counts of a residual report and its first offender.
    pub fn residuals(&mut self, key: &str, r: &Residuals) {
        self.field(key, counts(&r.nonzero_counts()));
        if let Some((n, w)) = r.first_offender() {
            self.line(format!("{key}: first nonzero residual at arity {n} on {}", format_word(&w)));
        }
    }

    /// Lists every nonzero entry of a map under a label.
    pub fn entries(&mut self, label: &str, m: &MultiMap) {
        for (w, v) in m.table() {
            let terms: Vec<String> = v.iter().map(|(b, c)| format!("{c}*{b}")).collect();
            self.line(format!("{label} {} = {}", format_word(w), terms.join(" + ")));
        }
    }
}

/// `arity:count` pairs joined by commas, or `none` for an empty report.
pub fn counts(m: &BTreeMap<usize, usize>) -> String {
    if m.is_empty() {
        return "none".into();
    }
    m.iter().map(|(n, c)| format!("{n}:{c}")).collect::<Vec<_>>().join(",")
}

/// Reads a `counts` value back, treating any nonzero count as a failure.
pub fn counts_are_zero(value: &str) -> bool {
    value == "none" || value.split(',').all(|p| p.rsplit(':').next() == Some("0"))
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.fields {
            writeln!(f, "{k}={v}")?;
        }
        writeln!(f)?;
        for l in &self.detail {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Splits rendered report text back into its key/value fields.
pub fn parse_fields(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .take_while(|l| !l.is_empty())
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

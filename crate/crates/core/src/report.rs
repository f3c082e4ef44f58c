//! Result records shared by the bound evaluators.

use std::collections::BTreeMap;

use serde::Serialize;

/// A named scalar bound with the free parameters at which it was attained.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub value: f64,
    /// Free parameters at the optimum (α*, c*, δ*, ...).
    pub params_at_opt: BTreeMap<String, f64>,
    /// Unclamped value, present only when `value` was clamped.
    pub raw_value: Option<f64>,
    /// False when a side condition of the bound fails or a solver did not
    /// converge.
    pub valid: bool,
    pub notes: String,
}

impl BoundReport {
    pub fn new(name: &str, value: f64) -> Self {
        BoundReport {
            name: name.to_string(),
            value,
            params_at_opt: BTreeMap::new(),
            raw_value: None,
            valid: true,
            notes: String::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params_at_opt.insert(key.to_string(), value);
        self
    }

    pub fn invalid(mut self, why: &str) -> Self {
        self.valid = false;
        self.note(why);
        self
    }

    pub fn note(&mut self, text: &str) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text);
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params_at_opt.get(key).copied()
    }
}

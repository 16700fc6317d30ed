//! Resource bounds shared by every command.

use serde::Serialize;
use thiserror::Error;

pub const ENV_VAR: &str = "MODULO_BUDGETS";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BudgetError {
    #[error("unknown budget `{0}`")]
    UnknownKey(String),
    #[error("budget `{key}` expects a non-negative integer, got `{value}`")]
    BadValue { key: String, value: String },
    #[error("malformed budget assignment `{0}` (expected key=value)")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budgets {
    /// Rewrite steps for `normalize`, and proof reduction steps.
    pub fuel: usize,
    /// Rewrite steps per side when deciding congruence; also the weak-head
    /// exposure budget of the checker.
    pub congruence_depth: usize,
    pub search_depth: usize,
    /// Distinct proofs explored by the strong normalization probe.
    pub sn_fuel: usize,
    /// Truncation bound N for natural-number domains (elements 0..=N).
    pub nat_bound: usize,
    /// Maximum number of hypotheses in a context of the context universe.
    pub max_hyps: usize,
    /// Largest domain size tried by model search.
    pub domain_size: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            fuel: 1000,
            congruence_depth: 8,
            search_depth: 8,
            sn_fuel: 1000,
            nat_bound: 8,
            max_hyps: 3,
            domain_size: 1,
        }
    }
}

impl Budgets {
    pub const KEYS: [&'static str; 7] = [
        "fuel",
        "congruence_depth",
        "search_depth",
        "sn_fuel",
        "nat_bound",
        "max_hyps",
        "domain_size",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), BudgetError> {
        let slot = match key.replace('-', "_").as_str() {
            "fuel" => &mut self.fuel,
            "congruence_depth" | "depth" => &mut self.congruence_depth,
            "search_depth" => &mut self.search_depth,
            "sn_fuel" => &mut self.sn_fuel,
            "nat_bound" => &mut self.nat_bound,
            "max_hyps" => &mut self.max_hyps,
            "domain_size" => &mut self.domain_size,
            _ => return Err(BudgetError::UnknownKey(key.to_string())),
        };
        *slot = value.trim().parse().map_err(|_| BudgetError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        })?;
        Ok(())
    }

    /// Applies a comma-separated list of `key=value` assignments.
    pub fn apply_overrides(&mut self, spec: &str) -> Result<(), BudgetError> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| BudgetError::Malformed(item.to_string()))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// Defaults overridden by the environment variable, if set.
    pub fn from_env() -> Result<Self, BudgetError> {
        let mut b = Budgets::default();
        if let Ok(spec) = std::env::var(ENV_VAR) {
            b.apply_overrides(&spec)?;
        }
        Ok(b)
    }
}

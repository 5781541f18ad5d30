//! Scenario configuration: the ring, the Witt length, the top level and the
//! seed, with the budget checks that every pipeline relies on.

use std::path::Path;

use frames_core::base_rings::RingDesc;
use frames_core::ring::checked_modulus;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub ring: RingDesc,
    pub witt_length: usize,
    pub max_level: usize,
    pub seed: u64,
    /// Checks the selftest runs; empty means all nine criteria.
    #[serde(default)]
    pub suites: Vec<u8>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            ring: RingDesc::eisenstein(3, 7, 1, 3, &[(vec![1], 1)]),
            witt_length: 4,
            max_level: 3,
            seed: 0,
            suites: Vec::new(),
        }
    }
}

/// A configuration problem, reported before any computation runs.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl Scenario {
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let sc = match path {
            None => Scenario::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?
            }
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.ring.validate().map_err(|e| ConfigError(e.to_string()))?;
        if self.max_level == 0 || self.max_level > self.ring.a {
            return Err(ConfigError(format!("max_level = {} must lie in [1, a = {}]", self.max_level, self.ring.a)));
        }
        if self.witt_length < self.max_level + 1 {
            return Err(ConfigError(format!(
                "witt_length = {} is below max_level + 1 = {}",
                self.witt_length,
                self.max_level + 1
            )));
        }
        let padded = self.ring.n + self.witt_length as u32;
        checked_modulus(self.ring.p, padded)
            .map_err(|_| ConfigError(format!("coefficient precision N + n = {padded} does not fit in 62 bits at p = {}", self.ring.p)))?;
        if let Some(bad) = self.suites.iter().find(|s| !(1..=9).contains(*s)) {
            return Err(ConfigError(format!("unknown suite {bad}; suites are 1..9")));
        }
        Ok(())
    }
}

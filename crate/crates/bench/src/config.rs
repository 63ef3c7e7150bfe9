//! Override file: one TOML table per scenario id.
//!
//! ```toml
//! [ex2-exponential]
//! x0 = [3.0, 4.0]
//! v0 = -20.0
//! rtol = 1e-9
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use crate::registry::lookup;
use crate::runner::Overrides;
use crate::BenchError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub scenarios: BTreeMap<String, Overrides>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let scenarios: BTreeMap<String, Overrides> =
            toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        if let Some(id) = scenarios.keys().find(|id| lookup(id).is_none()) {
            return Err(BenchError::UnknownScenario(id.clone()));
        }
        Ok(Self { scenarios })
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn overrides_for(&self, id: &str) -> Overrides {
        self.scenarios.get(id).cloned().unwrap_or_default()
    }
}

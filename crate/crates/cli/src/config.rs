//! Reading experiment configs.
//!
//! A config is one JSON object. The `matrix`, `system` and `target` members
//! may be given inline or as a path to a JSON file, resolved against the
//! directory of the config file.

use std::fs;
use std::path::{Path, PathBuf};

use lpmix_core::{Error, Result};
use serde::de::DeserializeOwned;
use serde_json::Value;

pub struct ConfigFile {
    pub value: Value,
    base: PathBuf,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self> {
        let value = read_json(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(ConfigFile { value, base })
    }

    /// Deserialize the whole object after resolving file references in `indirect`.
    pub fn parse<T: DeserializeOwned>(&self, indirect: &[&str]) -> Result<T> {
        let mut v = self.value.clone();
        if let Value::Object(map) = &mut v {
            for key in indirect {
                if let Some(Value::String(rel)) = map.get(*key) {
                    let loaded = read_json(&self.base.join(rel))?;
                    map.insert((*key).to_string(), loaded);
                }
            }
        } else {
            return Err(Error::InvalidInput("config must be a JSON object".into()));
        }
        serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("config: {e}")))
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::failure::{CliResult, Failure};

/// Resolves a command's settings: defaults, then the `[command]` table of the
/// optional TOML file, then explicitly given flags.
pub fn resolve<F: Serialize, C: DeserializeOwned>(command: &str, file: Option<&Path>, flags: &F) -> CliResult<C> {
    let mut merged = Map::new();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(anyhow::anyhow!("cannot read config {}: {e}", path.display())))?;
        let table: toml::Table = toml::from_str(&text)
            .map_err(|e| Failure::usage(anyhow::anyhow!("invalid config {}: {e}", path.display())))?;
        if let Some(section) = table.get(command) {
            let section = serde_json::to_value(section).map_err(Failure::usage)?;
            match section {
                Value::Object(m) => merged.extend(m),
                _ => {
                    return Err(Failure::usage(anyhow::anyhow!(
                        "config section [{command}] in {} is not a table",
                        path.display()
                    )))
                }
            }
        }
    }
    if let Value::Object(m) = serde_json::to_value(flags).map_err(Failure::usage)? {
        merged.extend(m.into_iter().filter(|(_, v)| !v.is_null()));
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| Failure::usage(anyhow::anyhow!("invalid {command} settings: {e}")))
}

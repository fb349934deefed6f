use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// Provenance attached to every artifact the CLI writes.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub inputs: BTreeMap<&'static str, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub config: Value,
}

impl RunManifest {
    pub fn new(subcommand: &'static str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            inputs: BTreeMap::new(),
            model: None,
            config: Value::Object(Default::default()),
        }
    }

    pub fn input(mut self, key: &'static str, path: &Path) -> Self {
        self.inputs.insert(key, path.display().to_string());
        self
    }

    pub fn model(mut self, model: impl Into<String>) -> Self {
        self.model = Some(model.into());
        self
    }

    pub fn config(mut self, config: impl Serialize) -> Self {
        self.config = serde_json::to_value(config).expect("config serialises");
        self
    }

    /// Adds a top-level `manifest` key to a JSON object document.
    pub fn embed(&self, json: &str) -> Result<String, serde_json::Error> {
        let mut doc: Value = serde_json::from_str(json)?;
        if let Value::Object(map) = &mut doc {
            map.insert("manifest".into(), serde_json::to_value(self)?);
        } else {
            doc = serde_json::json!({ "manifest": self, "data": doc });
        }
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes `<artifact>.manifest.json` next to a non-JSON artifact.
    pub fn write_sidecar(&self, artifact: &Path) -> std::io::Result<PathBuf> {
        let mut name = artifact.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        fs::write(&path, s)?;
        Ok(path)
    }
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Provenance recorded at the top of every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<PathBuf>,
    pub overrides: Vec<(String, String)>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub timestamp: String,
}

impl RunManifest {
    /// `# key: value` lines for CSV files and plot scripts.
    pub fn comment_block(&self) -> String {
        let mut s = String::from("# manifest\n");
        s.push_str(&format!("# command: {}\n", self.command));
        let config = self
            .config_path
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "(defaults)".into());
        s.push_str(&format!("# config_path: {config}\n"));
        for (k, v) in &self.overrides {
            s.push_str(&format!("# override: {k}={v}\n"));
        }
        s.push_str(&format!("# output_dir: {}\n", self.output_dir.display()));
        s.push_str(&format!("# seed: {}\n", self.seed));
        s.push_str(&format!("# timestamp: {}\n", self.timestamp));
        s
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }

    pub fn prepare_output_dir(&self) -> Result<()> {
        fs::create_dir_all(&self.output_dir)
            .with_context(|| format!("creating {}", self.output_dir.display()))
    }

    /// Writes a CSV (or script) body prefixed by the manifest comment block.
    pub fn write_commented(&self, name: &str, body: &[u8]) -> Result<PathBuf> {
        let path = self.path(name);
        let mut file =
            fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        file.write_all(self.comment_block().as_bytes())?;
        file.write_all(body)?;
        Ok(path)
    }

    /// Writes `value` as pretty JSON with the manifest under a `manifest` key.
    pub fn write_json(&self, name: &str, value: serde_json::Value) -> Result<PathBuf> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(&self.embed(value))?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn embed(&self, mut value: serde_json::Value) -> serde_json::Value {
        if let serde_json::Value::Object(map) = &mut value {
            map.insert(
                "manifest".into(),
                serde_json::to_value(self).expect("manifest serializes"),
            );
        }
        value
    }
}

pub fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

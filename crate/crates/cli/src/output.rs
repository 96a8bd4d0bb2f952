//! Run metadata and output files. Every file opens with the tool version,
//! the command, its resolved config and the master seed.

use std::fs;
use std::path::{Path, PathBuf};

use ncg_core::Result;
use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct Meta {
    pub command: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
}

impl Meta {
    pub fn new<C: Serialize>(command: &'static str, config: &C, seed: Option<u64>) -> Self {
        Self { command, config: serde_json::to_value(config).expect("configs serialize"), seed }
    }

    /// Lines for text formats; writers prefix each with `# `.
    pub fn header(&self) -> Vec<String> {
        let mut lines = vec![
            format!("ncg {VERSION}"),
            format!("command: {}", self.command),
            format!("config: {}", self.config),
        ];
        if let Some(seed) = self.seed {
            lines.push(format!("seed: {seed}"));
        }
        lines
    }

    pub fn json(&self) -> Value {
        json!({ "version": VERSION, "command": self.command, "config": self.config, "seed": self.seed })
    }
}

/// Output directory, created on first use.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Write with a caller-supplied writer taking the header.
    pub fn write_with(
        &self,
        name: &str,
        meta: &Meta,
        f: impl FnOnce(&mut Vec<u8>, &[String]) -> Result<()>,
    ) -> Result<PathBuf> {
        let mut buf = Vec::new();
        f(&mut buf, &meta.header())?;
        let path = self.path(name);
        fs::write(&path, buf)?;
        Ok(path)
    }

    /// Pretty JSON with a `meta` object beside the body fields. Keys are sorted.
    pub fn write_json<T: Serialize>(&self, name: &str, meta: &Meta, body: &T) -> Result<PathBuf> {
        let mut doc = serde_json::Map::new();
        doc.insert("meta".into(), meta.json());
        match serde_json::to_value(body).expect("bodies serialize") {
            Value::Object(fields) => doc.extend(fields),
            other => {
                doc.insert("result".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json renders");
        text.push('\n');
        let path = self.path(name);
        fs::write(&path, text)?;
        Ok(path)
    }
}

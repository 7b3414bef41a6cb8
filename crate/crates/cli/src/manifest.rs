//! Run manifest and the output directory writer that keeps it current.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub git_rev: Option<String>,
    pub seed: Option<u64>,
    /// Input files by role (`config`, `params`, `scenario`, `checkpoint`).
    pub inputs: BTreeMap<String, String>,
    pub out_dir: String,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub status: String,
    /// Files written by the run, relative to `out_dir`.
    pub outputs: Vec<String>,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Owns the output directory. The manifest is written as soon as the run
/// starts and rewritten with the file list when it ends.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Outputs {
    pub fn begin(
        command: &str,
        dir: &Path,
        seed: Option<u64>,
        inputs: BTreeMap<String, String>,
    ) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let rev = env!("NAVSIM_GIT_REV");
        let out = Self {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                command: command.into(),
                version: env!("CARGO_PKG_VERSION").into(),
                git_rev: (!rev.is_empty()).then(|| rev.to_string()),
                seed,
                inputs,
                out_dir: dir.display().to_string(),
                started_at: now(),
                finished_at: None,
                status: "running".into(),
                outputs: Vec::new(),
            },
        };
        out.flush()?;
        Ok(out)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn flush(&self) -> anyhow::Result<()> {
        let path = self.dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }

    /// Path for `rel` inside the output directory, recorded in the manifest.
    pub fn declare(&mut self, rel: &str) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        if !self.manifest.outputs.iter().any(|o| o == rel) {
            self.manifest.outputs.push(rel.to_string());
        }
        Ok(path)
    }

    pub fn write(&mut self, rel: &str, contents: impl AsRef<[u8]>) -> anyhow::Result<PathBuf> {
        let path = self.declare(rel)?;
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn finish(mut self, ok: bool) -> anyhow::Result<RunManifest> {
        self.manifest.finished_at = Some(now());
        self.manifest.status = if ok { "ok" } else { "failed" }.into();
        self.flush()?;
        Ok(self.manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_outputs() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("run");
        let mut out = Outputs::begin("rollout", &dir, Some(3), BTreeMap::new()).unwrap();
        let early: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap()).unwrap();
        assert_eq!(early["status"], "running");
        out.write("a/b.csv", "x").unwrap();
        out.write("c.svg", "y").unwrap();
        out.write("c.svg", "z").unwrap();
        let m = out.finish(true).unwrap();
        assert_eq!(m.outputs, vec!["a/b.csv", "c.svg"]);
        let disk: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap()).unwrap();
        assert_eq!(disk["status"], "ok");
        assert_eq!(disk["seed"], 3);
        assert_eq!(fs::read_to_string(dir.join("c.svg")).unwrap(), "z");
    }
}

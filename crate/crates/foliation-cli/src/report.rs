//! Per-file outcomes and their renderings. Both the JSON report and the
//! text summary are deterministic bytes for a fixed input and version.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub path: PathBuf,
    pub command: &'static str,
    pub exit: i32,
    pub text: String,
    pub json: serde_json::Value,
}

impl Outcome {
    pub fn json_bytes(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `<stem>.<command>.json` and `<stem>.<command>.txt` into the
    /// directory, creating it as needed.
    pub fn write_into(&self, dir: &Path) -> io::Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let stem = self
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "input".to_string());
        let json_path = dir.join(format!("{stem}.{}.json", self.command));
        let text_path = dir.join(format!("{stem}.{}.txt", self.command));
        fs::write(&json_path, self.json_bytes())?;
        fs::write(&text_path, &self.text)?;
        Ok((json_path, text_path))
    }
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::fail::{CliResult, Failure};

pub struct Input {
    pub path: PathBuf,
    pub text: String,
    pub value: Value,
}

/// Reads a JSON file; syntax errors carry line and column.
pub fn load(path: &Path) -> CliResult<Input> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(crate::fail::EXIT_OTHER, format!("{}: {e}", path.display())))?;
    let value = serde_json::from_str(&text).map_err(|e| {
        Failure::schema(format!("{}: malformed JSON at line {} column {}: {e}", path.display(), e.line(), e.column()))
    })?;
    Ok(Input { path: path.to_path_buf(), text, value })
}

impl Input {
    /// Typed view of the whole file; schema errors report the JSON path.
    pub fn parse<T: DeserializeOwned>(&self) -> CliResult<T> {
        parse_at(&self.path, &self.text)
    }

    pub fn has_key(&self, k: &str) -> bool {
        self.value.get(k).is_some()
    }

    pub fn schema(&self) -> Option<&str> {
        self.value.get("schema").and_then(Value::as_str)
    }
}

pub fn parse_at<T: DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let loc = e.path().to_string();
        Failure::schema(format!("{}: schema violation at {loc}: {}", path.display(), e.inner()))
    })
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Failure::from(e.error))?;
    Ok(())
}

/// To `out` when given, else stdout.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

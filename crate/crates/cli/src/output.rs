use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

/// Writes `contents` to `path` via a temporary file in the same directory and a
/// rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    args: &'a [String],
    device: Option<&'a str>,
    output: String,
    unix_time: u64,
    extra: Value,
}

/// Destination of a command's primary output.
pub struct Sink {
    pub path: Option<PathBuf>,
    /// Command-line arguments, program name excluded.
    pub args: Vec<String>,
}

impl Sink {
    /// Emits the data, plus a `.meta.json` sidecar when writing to a file.
    pub fn emit(&self, command: &str, device: Option<&str>, data: &str, extra: Value) -> std::io::Result<()> {
        match &self.path {
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(data.as_bytes())?;
                out.flush()
            }
            Some(path) => {
                write_atomic(path, data.as_bytes())?;
                let meta = Meta {
                    tool: env!("CARGO_PKG_NAME"),
                    version: env!("CARGO_PKG_VERSION"),
                    command,
                    args: &self.args,
                    device,
                    output: path.display().to_string(),
                    unix_time: SystemTime::now()
                        .duration_since(UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0),
                    extra,
                };
                let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
                text.push('\n');
                write_atomic(&meta_path(path), text.as_bytes())
            }
        }
    }
}

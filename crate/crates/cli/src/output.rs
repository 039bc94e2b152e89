//! Run manifests, versioned envelopes, atomic writes and CSV rendering.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use perimetry::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub subcommand: &'static str,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub tool_version: &'static str,
}

impl Manifest {
    pub fn new<P: Serialize>(subcommand: &'static str, params: &P, seed: Option<u64>, inputs: &[&Path], out: Option<&Path>) -> Self {
        Self {
            subcommand,
            parameters: serde_json::to_value(params).unwrap_or(Value::Null),
            seed,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            outputs: out.iter().map(|p| p.display().to_string()).collect(),
            tool_version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn value(&self) -> Value {
        serde_json::to_value(self).expect("manifest serializes")
    }
}

/// `{"version":1,"manifest":{...}, ...body}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct Document<T> {
    pub version: u32,
    #[serde(default)]
    pub manifest: Value,
    #[serde(flatten)]
    pub body: T,
}

pub fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_file(path)?;
    let doc: Document<T> = serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    if doc.version != SCHEMA_VERSION {
        return Err(Error::Version(doc.version));
    }
    Ok(doc.body)
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes to a sibling temporary file and renames it over `out`, or to stdout.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
        Some(path) => {
            let mut tmp = PathBuf::from(path);
            let name = path
                .file_name()
                .ok_or_else(|| Error::InvalidParameter(format!("bad output path {}", path.display())))?;
            tmp.set_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
            fs::write(&tmp, bytes).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
            fs::rename(&tmp, path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        }
    }
}

pub fn json_document<T: Serialize>(manifest: &Manifest, body: &T) -> Result<Vec<u8>> {
    let doc = Document {
        version: SCHEMA_VERSION,
        manifest: manifest.value(),
        body,
    };
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// CSV with the manifest as a leading comment line.
pub fn csv_document(manifest: &Manifest, header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut s = format!("# manifest: {}\n", manifest.value());
    s.push_str(&header.join(","));
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s.into_bytes()
}

pub fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

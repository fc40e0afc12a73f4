//! Deterministic report emission: JSON with floats at 17 significant
//! digits, CSV files led by a header comment naming the subcommand, the
//! config hash, and the artifact version.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Compact JSON formatter printing every float as `{:.16e}` (17 significant
/// digits, enough to round-trip f64 exactly).
struct F64Formatter;

impl serde_json::ser::Formatter for F64Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes to compact JSON with fixed-precision floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, F64Formatter);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// Hash of the semantic configuration (output paths excluded), first 16 hex
/// characters of SHA-256 over the canonical JSON encoding.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = to_json(config);
    let digest = Sha256::digest(json.as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// The `#` comment line carried at the top of every CSV output.
pub fn csv_header_comment(subcommand: &str, hash: &str) -> String {
    format!("# swirl {subcommand} config={hash} version={VERSION}")
}

/// Metadata record leading a JSON-lines output.
#[derive(Serialize)]
pub struct JsonlMeta<'a> {
    pub subcommand: &'a str,
    pub config_hash: &'a str,
    pub version: &'static str,
}

/// Writes `text` to the file at `path`, or to stdout when `path` is None.
pub fn write_text(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(p, text)
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())
        }
    }
}

pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

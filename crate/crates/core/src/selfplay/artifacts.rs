//! Byte-reproducible JSON artifacts: sorted keys, LF line endings.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

/// Pretty JSON with keys in sorted order and a trailing newline.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("artifact types serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
    s.push('\n');
    s
}

/// One compact sorted-key JSON object per line.
pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        let value = serde_json::to_value(item).expect("artifact types serialize");
        out.push_str(&serde_json::to_string(&value).expect("values serialize"));
        out.push('\n');
    }
    out
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    fs::write(path, to_sorted_json(value))
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> io::Result<()> {
    fs::write(path, to_jsonl(items))
}

/// Writes through a temporary sibling so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

pub fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

/// Files named in `files` go under `out`; without `out` only the entry
/// named `stdout_name` is printed.
pub fn emit(out: Option<&Path>, files: &[(&str, String)], stdout_name: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for (name, body) in files {
                std::fs::write(dir.join(name), body)?;
            }
        }
        None => {
            let body = files
                .iter()
                .find(|(n, _)| *n == stdout_name)
                .map(|(_, b)| b.as_str())
                .unwrap_or("");
            let mut so = std::io::stdout().lock();
            so.write_all(body.as_bytes())?;
            so.flush()?;
        }
    }
    Ok(())
}

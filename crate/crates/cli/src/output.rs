use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use anyhow::{Context, Result};

use crate::args::{Format, GlobalArgs};

/// Write `content` to `--out` or standard output.
pub fn emit(global: &GlobalArgs, content: &str) -> Result<()> {
    match &global.out {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
            log::info!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

pub fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn format_or(global: &GlobalArgs, default: Format) -> Format {
    global.format.unwrap_or(default)
}

/// Lines of a file, or of standard input when `path` is `None`.
pub fn read_input(path: Option<&Path>) -> Result<Vec<String>> {
    let reader: Box<dyn Read> = match path {
        Some(p) => Box::new(std::fs::File::open(p).with_context(|| format!("opening {}", p.display()))?),
        None => Box::new(std::io::stdin()),
    };
    BufReader::new(reader)
        .lines()
        .collect::<std::io::Result<_>>()
        .with_context(|| path.map_or("reading standard input".to_owned(), |p| format!("reading {}", p.display())))
}

/// Quote a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

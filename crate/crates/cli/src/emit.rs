use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::{Common, Format};

fn write_to(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn summary_path(c: &Common) -> Option<PathBuf> {
    c.summary.clone().or_else(|| {
        c.out.as_ref().map(|p| if p.extension().is_some_and(|e| e == "json") { p.with_extension("summary.json") } else { p.with_extension("json") })
    })
}

/// Writes the main output in the chosen format. With CSV, the JSON summary
/// (if any) goes to --summary, next to --out, or to stderr.
pub fn emit(c: &Common, csv: String, full: serde_json::Value, summary: Option<serde_json::Value>) -> Result<()> {
    match c.format {
        Format::Json => write_to(c.out.as_deref(), &(serde_json::to_string_pretty(&full)? + "\n")),
        Format::Csv => {
            write_to(c.out.as_deref(), &csv)?;
            if let Some(s) = summary {
                let text = serde_json::to_string_pretty(&s)? + "\n";
                match summary_path(c) {
                    Some(p) => write_to(Some(&p), &text)?,
                    None => eprint!("{text}"),
                }
            }
            Ok(())
        }
    }
}

/// JSON-only outputs ignore --format.
pub fn emit_json(c: &Common, value: serde_json::Value) -> Result<()> {
    write_to(c.out.as_deref(), &(serde_json::to_string_pretty(&value)? + "\n"))
}

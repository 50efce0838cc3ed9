//! CSV emission: `#`-prefixed metadata block (command, echoed config,
//! per-run summaries), one header row, LF line endings, 17-significant-
//! digit numbers.

use std::io::Write;

use crate::config::{fmt_f64, RunConfig};

/// Writes the metadata comment block shared by every command.
pub fn write_preamble(
    out: &mut dyn Write,
    command: &str,
    config: &RunConfig,
    summary: &[String],
) -> std::io::Result<()> {
    writeln!(out, "# tracksim {command}")?;
    writeln!(out, "# config:")?;
    for line in config.echo_lines() {
        writeln!(out, "#   {line}")?;
    }
    writeln!(out, "# end config")?;
    for line in summary {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

/// One output row: preformatted cells joined by commas.
pub fn write_row(out: &mut dyn Write, cells: &[String]) -> std::io::Result<()> {
    writeln!(out, "{}", cells.join(","))
}

pub fn cell(value: f64) -> String {
    fmt_f64(value)
}

/// Extracts the echoed configuration from CSV text produced by
/// [`write_preamble`]. Used by round-trip tests and handy for reproducing
/// a run from its output.
pub fn config_block(csv: &str) -> Option<String> {
    let mut lines = Vec::new();
    let mut inside = false;
    for line in csv.lines() {
        match line {
            "# config:" => inside = true,
            "# end config" => return Some(lines.join("\n")),
            _ if inside => lines.push(line.trim_start_matches('#').trim().to_string()),
            _ => {}
        }
    }
    None
}

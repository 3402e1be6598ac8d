//! CSV output: `#`-prefixed comment headers carrying the resolved
//! configuration, comma separators, LF line endings, fixed float formats
//! so identical configurations yield byte-identical files.

use std::path::Path;

use lanheat::analytical::TemperatureSeries;

use crate::physics::CliError;

pub fn format_ns(t_ns: f64) -> String {
    format!("{t_ns:.4}")
}

pub fn format_temp(t_c: f64) -> String {
    format!("{t_c:.6}")
}

/// Comment-header values must not introduce line breaks.
pub fn csv_escape_comment(v: &str) -> String {
    v.replace(['\n', '\r'], " ")
}

pub fn write_series_csv(
    path: &Path,
    tool_line: &str,
    audit: &[(String, String)],
    series: &TemperatureSeries,
) -> Result<(), CliError> {
    let mut text = String::new();
    text.push_str(&format!("# {tool_line}\n"));
    for (k, v) in audit {
        text.push_str(&format!("# {k} = {}\n", csv_escape_comment(v)));
    }
    text.push_str(&format!("# probe_position_m = {:e}\n", series.position));
    text.push_str("t_ns,T_C\n");
    for &(t, temp) in &series.samples {
        text.push_str(&format!("{},{}\n", format_ns(t * 1e9), format_temp(temp)));
    }
    std::fs::write(path, text)?;
    Ok(())
}

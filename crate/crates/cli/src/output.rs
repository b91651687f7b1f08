//! CSV artifacts with a `#`-prefixed JSON header, written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// `%.12g`: twelve significant digits, trailing zeros trimmed.
pub fn g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            s
        }
    };
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = trim(format!("{x:.decimals$}"));
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let sci = format!("{x:.11e}");
        let (mantissa, e) = sci.split_once('e').expect("scientific format");
        format!("{}e{}", trim(mantissa.to_owned()), e)
    }
}

/// Header line shared by every artifact.
#[derive(Serialize)]
struct Header<'a, C: Serialize> {
    version: &'a str,
    config: &'a C,
}

pub struct CsvFile {
    header: String,
    columns: String,
    rows: Vec<String>,
}

impl CsvFile {
    pub fn new<C: Serialize>(config: &C, columns: &[&str]) -> Result<Self> {
        let header = serde_json::to_string(&Header { version: env!("CARGO_PKG_VERSION"), config })?;
        Ok(CsvFile { header, columns: columns.join(","), rows: Vec::new() })
    }

    pub fn row(&mut self, fields: &[String]) {
        self.rows.push(fields.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = format!("# {}\n{}\n", self.header, self.columns);
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut tmp = PathBuf::from(path);
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    tmp.set_file_name(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Reads a CSV written by [`CsvFile`]: skips `#` lines, returns the column
/// names and numeric rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let columns: Vec<String> =
        lines.next().context("missing column header")?.split(',').map(|c| c.trim().to_owned()).collect();
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            line.split(',')
                .map(|v| v.trim().parse::<f64>().with_context(|| format!("row {}: `{v}` is not a number", i + 1)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((columns, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(g12(0.375), "0.375");
        assert_eq!(g12(50.0), "50");
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(g12(2.0 / 3.0 * 1e6), "666666.666667");
        assert_eq!(g12(1.25e-9), "1.25e-9");
        assert_eq!(g12(-1e-20 * 0.0), "0");
        assert_eq!(g12(123456789012345.0), "1.23456789012e14");
        assert_eq!(g12(-0.5), "-0.5");
    }
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::rows::{write_rows_csv, ReportFile, Row};
use crate::CliError;

/// Merges report files into one table keyed by inequality id. A repeated id
/// is accepted only when both rows are identical.
pub fn merge(paths: &[PathBuf]) -> Result<Vec<Row>, CliError> {
    let mut merged: BTreeMap<String, (Row, &Path)> = BTreeMap::new();
    for path in paths {
        for row in ReportFile::read(path)?.rows {
            match merged.get(&row.id) {
                Some((existing, first)) if *existing != row => {
                    return Err(CliError::Conflict(format!(
                        "id {:?} differs between {} and {}",
                        row.id,
                        first.display(),
                        path.display()
                    )));
                }
                Some(_) => {}
                None => {
                    merged.insert(row.id.clone(), (row, path.as_path()));
                }
            }
        }
    }
    Ok(merged.into_values().map(|(r, _)| r).collect())
}

pub fn table(rows: &[Row]) -> String {
    let mut s = String::new();
    let id_w = rows.iter().map(|r| r.id.len()).chain([2]).max().unwrap_or(2);
    let st_w = rows.iter().map(|r| r.statement.chars().count()).chain([9]).max().unwrap_or(9);
    writeln!(s, "{:<id_w$}  {:<st_w$}  {:<7}  {:>12}  {:>10}", "id", "statement", "verdict", "constant", "stability").unwrap();
    for r in rows {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        writeln!(
            s,
            "{:<id_w$}  {:<st_w$}  {:<7}  {:>12}  {:>10}",
            r.id,
            r.statement,
            verdict,
            r.constant.to_string(),
            r.stability.to_string()
        )
        .unwrap();
    }
    s
}

pub fn write_summary(dir: &Path, rows: &[Row]) -> Result<(), CliError> {
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(rows)?)?;
    write_rows_csv(&dir.join("summary.csv"), rows)
}

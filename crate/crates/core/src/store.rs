//! On-disk data directory.
//!
//! ```text
//! faculties.csv   faculty_id,a1,a2,...   one 0/1 row per faculty
//! usage.csv       user_id,attribute_id,weight   one row per nonzero cell
//! visits.csv      user_id,visits   one row per user with visits > 0
//! visit_log.csv   user_id,faculty_id,count   raw visit events (optional)
//! config.json     engine defaults (optional)
//! ```
//!
//! Rows are written in lexicographic id order, so saving a loaded directory
//! reproduces it byte for byte. Every file is written to a temporary sibling
//! first and renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use crate::context::{record_visit, FormalContext, MultiValuedContext, VisitLog, VisitsVector};
use crate::error::{check_id, Error, Result};

pub const FACULTIES_FILE: &str = "faculties.csv";
pub const USAGE_FILE: &str = "usage.csv";
pub const VISITS_FILE: &str = "visits.csv";
pub const LOG_FILE: &str = "visit_log.csv";

const USAGE_HEADER: &str = "user_id,attribute_id,weight";
const VISITS_HEADER: &str = "user_id,visits";
const LOG_HEADER: &str = "user_id,faculty_id,count";

/// Catalog plus everything known about its users.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub catalog: FormalContext,
    pub usage: MultiValuedContext,
    pub visits: VisitsVector,
    /// Raw events, when they are known. Data imported without a log keeps
    /// `None` and is never given a partial one.
    pub log: Option<VisitLog>,
}

impl Dataset {
    /// A catalog with no history yet; the (empty) log is tracked from here on.
    pub fn fresh(catalog: FormalContext) -> Dataset {
        Dataset {
            usage: MultiValuedContext::for_catalog(&catalog),
            catalog,
            visits: VisitsVector::new(),
            log: Some(VisitLog::new()),
        }
    }

    /// Records one visit in the weights, the totals and the log.
    pub fn record(&mut self, u: &str, s: &str) -> Result<()> {
        record_visit(&mut self.usage, &mut self.visits, u, s, &self.catalog)?;
        if let Some(log) = &mut self.log {
            log.add(u, s, 1)?;
        }
        Ok(())
    }
}

struct Lines<'a> {
    file: &'a Path,
    text: &'a str,
}

struct Row<'a> {
    line: usize,
    cells: Vec<(usize, &'a str)>,
}

impl<'a> Lines<'a> {
    fn parse_err(&self, line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            file: self.file.to_path_buf(),
            line,
            column,
            message: message.into(),
        }
    }

    fn invalid(&self, line: usize, source: Error) -> Error {
        Error::Invalid {
            file: self.file.to_path_buf(),
            line,
            source: Box::new(source),
        }
    }

    /// Splits into rows of `(column, cell)`; the header is row 0. A single
    /// trailing newline is allowed, blank lines elsewhere are not.
    fn rows(&self) -> Result<Vec<Row<'a>>> {
        let body = self.text.strip_suffix('\n').unwrap_or(self.text);
        if body.is_empty() {
            return Err(self.parse_err(1, 1, "missing header"));
        }
        body.split('\n')
            .enumerate()
            .map(|(i, raw)| {
                let line = i + 1;
                let raw = raw.strip_suffix('\r').unwrap_or(raw);
                if raw.is_empty() {
                    return Err(self.parse_err(line, 1, "blank line"));
                }
                let mut column = 1;
                let cells = raw
                    .split(',')
                    .map(|cell| {
                        let at = column;
                        column += cell.chars().count() + 1;
                        (at, cell)
                    })
                    .collect();
                Ok(Row { line, cells })
            })
            .collect()
    }

    fn expect_header(&self, rows: &[Row<'a>], expected: &str) -> Result<()> {
        let got: Vec<&str> = rows[0].cells.iter().map(|c| c.1).collect();
        if got.join(",") != expected {
            return Err(self.parse_err(1, 1, format!("expected header `{expected}`")));
        }
        Ok(())
    }

    fn expect_width(&self, row: &Row<'a>, width: usize) -> Result<()> {
        if row.cells.len() != width {
            let column = row.cells.get(width).map_or(1, |c| c.0);
            return Err(self.parse_err(
                row.line,
                column,
                format!("expected {width} fields, found {}", row.cells.len()),
            ));
        }
        Ok(())
    }

    fn id(&self, row: &Row<'a>, idx: usize, kind: &'static str) -> Result<&'a str> {
        let (column, cell) = row.cells[idx];
        check_id(kind, cell).map_err(|e| self.parse_err(row.line, column, e.to_string()))?;
        Ok(cell)
    }

    fn count(&self, row: &Row<'a>, idx: usize, what: &str) -> Result<u64> {
        let (column, cell) = row.cells[idx];
        let digits = !cell.is_empty() && cell.bytes().all(|b| b.is_ascii_digit());
        digits
            .then(|| cell.parse::<u64>().ok())
            .flatten()
            .ok_or_else(|| {
                self.parse_err(
                    row.line,
                    column,
                    format!("{what} must be a non-negative base-10 integer, got `{cell}`"),
                )
            })
    }
}

pub fn parse_faculties(file: &Path, text: &str) -> Result<FormalContext> {
    let lines = Lines { file, text };
    let rows = lines.rows()?;
    let header = &rows[0];
    if header.cells[0].1 != "faculty_id" {
        return Err(lines.parse_err(1, 1, "first header field must be `faculty_id`"));
    }
    let mut attributes = Vec::new();
    for i in 1..header.cells.len() {
        attributes.push(lines.id(header, i, "attribute")?);
    }
    let mut seen_attr = std::collections::BTreeSet::new();
    for (i, a) in attributes.iter().enumerate() {
        if !seen_attr.insert(*a) {
            return Err(lines.parse_err(1, header.cells[i + 1].0, format!("duplicate attribute `{a}`")));
        }
    }
    let mut faculties = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut pairs = Vec::new();
    for row in &rows[1..] {
        lines.expect_width(row, header.cells.len())?;
        let s = lines.id(row, 0, "faculty")?;
        if !seen.insert(s) {
            return Err(lines.invalid(row.line, Error::DuplicateId { kind: "faculty", id: s.to_string() }));
        }
        for (i, &(column, cell)) in row.cells.iter().enumerate().skip(1) {
            match cell {
                "1" => pairs.push((s, attributes[i - 1])),
                "0" => {}
                _ => return Err(lines.parse_err(row.line, column, format!("expected 0 or 1, got `{cell}`"))),
            }
        }
        faculties.push(s);
    }
    FormalContext::new(faculties, attributes, pairs)
}

pub fn write_faculties(catalog: &FormalContext) -> String {
    let mut out = String::from("faculty_id");
    for a in catalog.attributes() {
        out.push(',');
        out.push_str(a);
    }
    out.push('\n');
    for (si, s) in catalog.faculties().iter().enumerate() {
        out.push_str(s);
        for ai in 0..catalog.attributes().len() {
            out.push_str(if catalog.has(si, ai) { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    out
}

pub fn parse_usage(file: &Path, text: &str, catalog: &FormalContext) -> Result<MultiValuedContext> {
    let lines = Lines { file, text };
    let rows = lines.rows()?;
    lines.expect_header(&rows, USAGE_HEADER)?;
    let mut usage = MultiValuedContext::for_catalog(catalog);
    let mut seen = std::collections::BTreeSet::new();
    for row in &rows[1..] {
        lines.expect_width(row, 3)?;
        let u = lines.id(row, 0, "user")?;
        let a = lines.id(row, 1, "attribute")?;
        let w = lines.count(row, 2, "weight")?;
        if catalog.attribute_index(a).is_none() {
            return Err(lines.invalid(row.line, Error::UnknownAttribute(a.to_string())));
        }
        if !seen.insert((u, a)) {
            return Err(lines.parse_err(row.line, 1, format!("duplicate cell ({u}, {a})")));
        }
        if w > 0 {
            usage.set_weight(u, a, w)?;
        }
    }
    Ok(usage)
}

pub fn write_usage(usage: &MultiValuedContext) -> String {
    let mut out = format!("{USAGE_HEADER}\n");
    for (u, a, w) in usage.nonzero() {
        out.push_str(&format!("{u},{a},{w}\n"));
    }
    out
}

pub fn parse_visits(file: &Path, text: &str) -> Result<VisitsVector> {
    let lines = Lines { file, text };
    let rows = lines.rows()?;
    lines.expect_header(&rows, VISITS_HEADER)?;
    let mut visits = VisitsVector::new();
    for row in &rows[1..] {
        lines.expect_width(row, 2)?;
        let u = lines.id(row, 0, "user")?;
        let v = lines.count(row, 1, "visits")?;
        if visits.get(u) > 0 {
            return Err(lines.parse_err(row.line, 1, format!("duplicate user `{u}`")));
        }
        visits.set(u, v)?;
    }
    Ok(visits)
}

pub fn write_visits(visits: &VisitsVector) -> String {
    let mut out = format!("{VISITS_HEADER}\n");
    for (u, v) in visits.iter() {
        out.push_str(&format!("{u},{v}\n"));
    }
    out
}

pub fn parse_log(file: &Path, text: &str, catalog: &FormalContext) -> Result<VisitLog> {
    let lines = Lines { file, text };
    let rows = lines.rows()?;
    lines.expect_header(&rows, LOG_HEADER)?;
    let mut log = VisitLog::new();
    for row in &rows[1..] {
        lines.expect_width(row, 3)?;
        let u = lines.id(row, 0, "user")?;
        let s = lines.id(row, 1, "faculty")?;
        let c = lines.count(row, 2, "count")?;
        if catalog.faculty_index(s).is_none() {
            return Err(lines.invalid(row.line, Error::UnknownFaculty(s.to_string())));
        }
        if log.count(u, s) > 0 {
            return Err(lines.parse_err(row.line, 1, format!("duplicate entry ({u}, {s})")));
        }
        log.add(u, s, c)?;
    }
    Ok(log)
}

pub fn write_log(log: &VisitLog) -> String {
    let mut out = format!("{LOG_HEADER}\n");
    for (u, s, c) in log.entries() {
        out.push_str(&format!("{u},{s},{c}\n"));
    }
    out
}

fn read_optional(path: &Path) -> Result<Option<String>> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(Some(text)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::storage(path, e)),
    }
}

/// Loads a data directory. Only `faculties.csv` is mandatory; missing usage
/// and visit files mean an empty history.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let path = dir.join(FACULTIES_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::storage(&path, e))?;
    let catalog = parse_faculties(&path, &text)?;

    let path = dir.join(USAGE_FILE);
    let usage = match read_optional(&path)? {
        Some(text) => parse_usage(&path, &text, &catalog)?,
        None => MultiValuedContext::for_catalog(&catalog),
    };
    let path = dir.join(VISITS_FILE);
    let visits = match read_optional(&path)? {
        Some(text) => parse_visits(&path, &text)?,
        None => VisitsVector::new(),
    };
    let path = dir.join(LOG_FILE);
    let log = match read_optional(&path)? {
        Some(text) => Some(parse_log(&path, &text, &catalog)?),
        None if usage.users().len() == 0 && visits.is_empty() => Some(VisitLog::new()),
        None => None,
    };
    // visitors of attribute-less faculties own an all-zero row that usage.csv
    // cannot express
    let mut usage = usage;
    for (u, _) in visits.iter() {
        usage.register_user(u)?;
    }
    Ok(Dataset {
        catalog,
        usage,
        visits,
        log,
    })
}

pub(crate) fn write_atomically(files: &[(PathBuf, String)]) -> Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, contents) in files {
        let mut tmp = path.clone().into_os_string();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        fs::write(&tmp, contents).map_err(|e| Error::storage(&tmp, e))?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        fs::rename(&tmp, path).map_err(|e| Error::storage(path, e))?;
    }
    Ok(())
}

pub fn save_dataset(data: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::storage(dir, e))?;
    let mut files = vec![
        (dir.join(FACULTIES_FILE), write_faculties(&data.catalog)),
        (dir.join(USAGE_FILE), write_usage(&data.usage)),
        (dir.join(VISITS_FILE), write_visits(&data.visits)),
    ];
    if let Some(log) = &data.log {
        files.push((dir.join(LOG_FILE), write_log(log)));
    }
    write_atomically(&files)
}

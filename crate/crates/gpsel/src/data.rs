//! Dataset ingestion, experiment configuration and report persistence.
//!
//! Missing-value policy is listwise deletion at ingest: any row with an
//! unparseable or empty cell is dropped and its index logged.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::bench::{BenchmarkReport, Metrics, MethodSummary};
use crate::linalg::Mat;
use crate::selector::Method;
use crate::{Error, Result};

/// One named predictor column.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Response vector plus named predictor matrix: the universe every method
/// consumes. Immutable after load.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub y: Vec<f64>,
    pub columns: Vec<Column>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(name: impl Into<String>, y: Vec<f64>, columns: Vec<Column>) -> Result<Self> {
        let n = y.len();
        if n < 2 {
            return Err(Error::ShapeMismatch(format!(
                "need at least 2 observations, got {n}"
            )));
        }
        for c in &columns {
            if c.values.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "column {} has {} rows, response has {n}",
                    c.name,
                    c.values.len()
                )));
            }
        }
        let name = name.into();
        Ok(Dataset {
            provenance: name.clone(),
            name,
            y,
            columns,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn var_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    /// Row subset in the given order.
    pub fn subset_rows(&self, rows: &[usize]) -> Result<Dataset> {
        for &r in rows {
            if r >= self.n() {
                return Err(Error::ShapeMismatch(format!("row {r} out of range")));
            }
        }
        let y = rows.iter().map(|&r| self.y[r]).collect();
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                values: rows.iter().map(|&r| c.values[r]).collect(),
            })
            .collect();
        Ok(Dataset {
            name: self.name.clone(),
            y,
            columns,
            provenance: format!("{} (subset of {} rows)", self.provenance, rows.len()),
        })
    }

    /// Same dataset with a transformed response.
    pub fn with_response(&self, y: Vec<f64>) -> Result<Dataset> {
        if y.len() != self.n() {
            return Err(Error::ShapeMismatch("response length changed".into()));
        }
        Ok(Dataset {
            name: self.name.clone(),
            y,
            columns: self.columns.clone(),
            provenance: self.provenance.clone(),
        })
    }
}

/// Named predictor columns plus an intercept flag; assembles into the dense
/// matrix handed to the least-squares layer.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub columns: Vec<Column>,
    pub n: usize,
    pub includes_intercept: bool,
}

impl DesignMatrix {
    pub fn new(columns: Vec<Column>, n: usize, includes_intercept: bool) -> Result<Self> {
        for c in &columns {
            if c.values.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "column {} has {} rows, expected {n}",
                    c.name,
                    c.values.len()
                )));
            }
        }
        Ok(DesignMatrix {
            columns,
            n,
            includes_intercept,
        })
    }

    /// All predictors of a dataset, with intercept.
    pub fn from_dataset(data: &Dataset) -> Self {
        DesignMatrix {
            columns: data.columns.clone(),
            n: data.n(),
            includes_intercept: true,
        }
    }

    pub fn assemble(&self) -> Result<Mat> {
        let ones = vec![1.0; self.n];
        let mut cols: Vec<&[f64]> = Vec::with_capacity(self.columns.len() + 1);
        if self.includes_intercept {
            cols.push(&ones);
        }
        for c in &self.columns {
            cols.push(&c.values);
        }
        Mat::from_columns(&cols)
    }
}

/// Outcome of a CSV load: the dataset plus the indices (0-based, in file
/// order) of rows dropped for unparseable or missing cells.
#[derive(Debug, Clone)]
pub struct LoadOutcome {
    pub dataset: Dataset,
    pub dropped_rows: Vec<usize>,
}

/// Load a CSV file with a header row. `predictor_columns = None` takes every
/// non-response column, preserving file order.
pub fn load_csv(
    path: impl AsRef<Path>,
    response_column: &str,
    predictor_columns: Option<&[String]>,
) -> Result<LoadOutcome> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::FileNotFound(path.display().to_string()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::ParseError {
            row: 0,
            column: "<header>".into(),
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();

    let resp_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| Error::ParseError {
            row: 0,
            column: response_column.into(),
            message: "response column not found in header".into(),
        })?;
    let pred_idx: Vec<usize> = match predictor_columns {
        Some(names) => names
            .iter()
            .map(|n| {
                headers
                    .iter()
                    .position(|h| h == n)
                    .ok_or_else(|| Error::ParseError {
                        row: 0,
                        column: n.clone(),
                        message: "predictor column not found in header".into(),
                    })
            })
            .collect::<Result<_>>()?,
        None => (0..headers.len()).filter(|&i| i != resp_idx).collect(),
    };

    let mut y = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); pred_idx.len()];
    let mut dropped = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::ParseError {
            row: row_no + 1,
            column: "<record>".into(),
            message: e.to_string(),
        })?;
        let mut parsed = Vec::with_capacity(pred_idx.len() + 1);
        let mut ok = true;
        for &idx in std::iter::once(&resp_idx).chain(pred_idx.iter()) {
            match record.get(idx).map(str::trim) {
                Some(cell) if !cell.is_empty() => match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => parsed.push(v),
                    _ => {
                        ok = false;
                        break;
                    }
                },
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            dropped.push(row_no);
            continue;
        }
        y.push(parsed[0]);
        for (c, v) in cols.iter_mut().zip(&parsed[1..]) {
            c.push(*v);
        }
    }
    if y.len() < 2 {
        return Err(Error::EmptyAfterFiltering);
    }
    let columns = pred_idx
        .iter()
        .zip(cols)
        .map(|(&i, values)| Column {
            name: headers[i].clone(),
            values,
        })
        .collect();
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "dataset".into());
    let mut dataset = Dataset::new(stem, y, columns)?;
    dataset.provenance = format!(
        "{} ({} rows kept, {} dropped)",
        path.display(),
        dataset.n(),
        dropped.len()
    );
    Ok(LoadOutcome {
        dataset,
        dropped_rows: dropped,
    })
}

/// Experiment configuration, parsed from a flat `key = value` file with `#`
/// comments. Unknown keys and malformed values are all reported together.
#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    pub example: Option<u8>,
    pub data: Option<String>,
    pub response: Option<String>,
    pub methods: Vec<Method>,
    pub reps: Option<usize>,
    pub splits: Option<usize>,
    pub train: Option<usize>,
    pub test: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub jobs: Option<usize>,
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::FileNotFound(path.display().to_string()));
    }
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut violations = Vec::new();
    let mut seen = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            violations.push(format!("line {}: expected `key = value`", lineno + 1));
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        if seen.insert(key.to_string(), lineno).is_some() {
            violations.push(format!("line {}: duplicate key `{key}`", lineno + 1));
            continue;
        }
        match key {
            "example" => match value.parse::<u8>() {
                Ok(v) if (1..=6).contains(&v) => cfg.example = Some(v),
                _ => violations.push(format!("example must be 1..6, got `{value}`")),
            },
            "data" => cfg.data = Some(value.to_string()),
            "response" => cfg.response = Some(value.to_string()),
            "methods" => {
                for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    match Method::parse(name) {
                        Ok(m) => cfg.methods.push(m),
                        Err(_) => violations.push(format!("unsupported method `{name}`")),
                    }
                }
            }
            "reps" => match value.parse::<usize>() {
                Ok(v) if v >= 1 => cfg.reps = Some(v),
                _ => violations.push(format!("reps must be a positive integer, got `{value}`")),
            },
            "splits" => match value.parse::<usize>() {
                Ok(v) if v >= 1 => cfg.splits = Some(v),
                _ => violations.push(format!("splits must be a positive integer, got `{value}`")),
            },
            "train" => match value.parse::<usize>() {
                Ok(v) if v >= 3 => cfg.train = Some(v),
                _ => violations.push(format!("train must be an integer >= 3, got `{value}`")),
            },
            "test" => match value.parse::<usize>() {
                Ok(v) if v >= 1 => cfg.test = Some(v),
                _ => violations.push(format!("test must be a positive integer, got `{value}`")),
            },
            "seed" => match value.parse::<u64>() {
                Ok(v) => cfg.seed = Some(v),
                _ => violations.push(format!("seed must be a nonnegative integer, got `{value}`")),
            },
            "out" => cfg.out = Some(value.to_string()),
            "jobs" => match value.parse::<usize>() {
                Ok(v) if v >= 1 => cfg.jobs = Some(v),
                _ => violations.push(format!("jobs must be a positive integer, got `{value}`")),
            },
            other => violations.push(format!("unknown key `{other}`")),
        }
    }
    if cfg.example.is_some() && cfg.data.is_some() {
        violations.push("specify either `example` or `data`, not both".into());
    }
    if cfg.data.is_some() && cfg.response.is_none() {
        violations.push("`data` requires `response`".into());
    }
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::InvalidConfig(violations))
    }
}


/// Write a dataset as CSV with the response in the first column.
pub fn write_dataset_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    out.push('y');
    for c in &data.columns {
        out.push(',');
        out.push_str(&c.name);
    }
    out.push('\n');
    for i in 0..data.n() {
        let _ = write!(out, "{}", data.y[i]);
        for c in &data.columns {
            let _ = write!(out, ",{}", c.values[i]);
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Report output format selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Md,
    Both,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<ReportFormat> {
        match s.to_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Md),
            "both" => Ok(ReportFormat::Both),
            other => Err(Error::Domain(format!(
                "unknown format `{other}` (expected csv, md or both)"
            ))),
        }
    }
}

fn opt_to_cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

fn cell_to_opt(s: &str) -> Result<Option<f64>> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(None);
    }
    t.parse::<f64>().map(Some).map_err(|e| Error::ParseError {
        row: 0,
        column: t.to_string(),
        message: e.to_string(),
    })
}

/// Machine rendering: metadata comment lines, then one row per method with
/// columns method,mse,mse_se,hits,hits_se,fp,fp_se,v1..vp. Floats print in
/// shortest-round-trip form so re-parsing reproduces them exactly.
pub fn report_to_csv(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# title: {}", report.title);
    let _ = writeln!(out, "# reps: {}", report.reps);
    let _ = writeln!(out, "# seed: {}", report.seed);
    let _ = writeln!(out, "# vars: {}", report.var_names.join("|"));
    let _ = writeln!(
        out,
        "# failures: {}",
        report
            .rows
            .iter()
            .map(|r| r.failures.to_string())
            .collect::<Vec<_>>()
            .join("|")
    );
    out.push_str("method,mse,mse_se,hits,hits_se,fp,fp_se");
    for j in 1..=report.var_names.len() {
        let _ = write!(out, ",v{j}");
    }
    out.push('\n');
    for row in &report.rows {
        let m = &row.metrics;
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            row.method,
            m.mse,
            m.mse_se,
            opt_to_cell(m.hits),
            opt_to_cell(m.hits_se),
            opt_to_cell(m.fp),
            opt_to_cell(m.fp_se)
        );
        for f in &row.freqs {
            let _ = write!(out, ",{f}");
        }
        out.push('\n');
    }
    out
}

/// Parse a report back from its CSV rendering.
pub fn report_from_csv(text: &str) -> Result<BenchmarkReport> {
    let mut title = String::new();
    let mut reps = 0usize;
    let mut seed = 0u64;
    let mut var_names = Vec::new();
    let mut failures: Vec<usize> = Vec::new();
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (lineno, line) in text.lines().enumerate() {
        if let Some(meta) = line.strip_prefix("# ") {
            if let Some((k, v)) = meta.split_once(": ") {
                match k {
                    "title" => title = v.to_string(),
                    "reps" => {
                        reps = v.parse().map_err(|_| Error::ParseError {
                            row: lineno + 1,
                            column: "reps".into(),
                            message: "bad integer".into(),
                        })?
                    }
                    "seed" => {
                        seed = v.parse().map_err(|_| Error::ParseError {
                            row: lineno + 1,
                            column: "seed".into(),
                            message: "bad integer".into(),
                        })?
                    }
                    "vars" => {
                        var_names = if v.is_empty() {
                            Vec::new()
                        } else {
                            v.split('|').map(str::to_string).collect()
                        }
                    }
                    "failures" => {
                        failures = v
                            .split('|')
                            .filter(|t| !t.is_empty())
                            .map(|t| t.parse().unwrap_or(0))
                            .collect()
                    }
                    _ => {}
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            header_seen = true; // column header line
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() < 7 {
            return Err(Error::ParseError {
                row: lineno + 1,
                column: "<row>".into(),
                message: format!("expected at least 7 cells, got {}", cells.len()),
            });
        }
        let metrics = Metrics {
            mse: cells[1].parse().map_err(|_| Error::ParseError {
                row: lineno + 1,
                column: "mse".into(),
                message: "bad float".into(),
            })?,
            mse_se: cells[2].parse().map_err(|_| Error::ParseError {
                row: lineno + 1,
                column: "mse_se".into(),
                message: "bad float".into(),
            })?,
            hits: cell_to_opt(cells[3])?,
            hits_se: cell_to_opt(cells[4])?,
            fp: cell_to_opt(cells[5])?,
            fp_se: cell_to_opt(cells[6])?,
        };
        let freqs = cells[7..]
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::ParseError {
                row: lineno + 1,
                column: "frequencies".into(),
                message: e.to_string(),
            })?;
        rows.push(MethodSummary {
            method: cells[0].to_string(),
            metrics,
            freqs,
            failures: 0,
        });
    }
    for (row, f) in rows.iter_mut().zip(failures) {
        row.failures = f;
    }
    Ok(BenchmarkReport {
        title,
        var_names,
        rows,
        reps,
        seed,
    })
}

/// Six significant digits for the human-readable rendering.
fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".into();
    }
    let a = v.abs();
    if !(1e-4..1e7).contains(&a) {
        return format!("{v:.5e}");
    }
    let digits = (5 - a.log10().floor() as i32).max(0) as usize;
    format!("{v:.digits$}")
}

fn cell_with_se(v: Option<f64>, se: Option<f64>) -> String {
    match (v, se) {
        (Some(v), Some(se)) => format!("{} ({})", sig6(v), sig6(se)),
        (Some(v), None) => sig6(v),
        _ => "-".into(),
    }
}

/// Human rendering that mirrors the benchmark table layout: a metrics table
/// (HITS column dropped under a null truth, selected-count column for real
/// data) followed by the per-variable selection frequencies.
pub fn report_to_markdown(report: &BenchmarkReport) -> String {
    let has_hits = report.rows.iter().any(|r| r.metrics.hits.is_some());
    let has_fp = report.rows.iter().any(|r| r.metrics.fp.is_some());
    let mut out = String::new();
    let _ = writeln!(out, "# {}", report.title);
    let _ = writeln!(out);
    let _ = writeln!(out, "{} replicates, seed {}.", report.reps, report.seed);
    let _ = writeln!(out);
    let mut header = String::from("| Method | MSE ");
    let mut rule = String::from("|---|---");
    if has_hits {
        header.push_str("| HITS ");
        rule.push_str("|---");
    }
    if has_fp {
        header.push_str("| FP ");
        rule.push_str("|---");
    }
    if !has_hits && !has_fp {
        header.push_str("| Selected ");
        rule.push_str("|---");
    }
    let _ = writeln!(out, "{header}|");
    let _ = writeln!(out, "{rule}|");
    for row in &report.rows {
        let m = &row.metrics;
        let mut line = format!(
            "| {} | {} ",
            row.method,
            cell_with_se(Some(m.mse), Some(m.mse_se))
        );
        if has_hits {
            let _ = write!(line, "| {} ", cell_with_se(m.hits, m.hits_se));
        }
        if has_fp {
            let _ = write!(line, "| {} ", cell_with_se(m.fp, m.fp_se));
        }
        if !has_hits && !has_fp {
            let _ = write!(line, "| {} ", sig6(row.mean_selected()));
        }
        let _ = writeln!(out, "{line}|");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "## Relative frequencies of the selected variables");
    let _ = writeln!(out);
    let mut header = String::from("| Method ");
    let mut rule = String::from("|---");
    for v in &report.var_names {
        let _ = write!(header, "| {v} ");
        rule.push_str("|---");
    }
    let _ = writeln!(out, "{header}|");
    let _ = writeln!(out, "{rule}|");
    for row in &report.rows {
        let mut line = format!("| {} ", row.method);
        for f in &row.freqs {
            let _ = write!(line, "| {} ", sig6(*f));
        }
        let _ = writeln!(out, "{line}|");
    }
    let failures: usize = report.rows.iter().map(|r| r.failures).sum();
    if failures > 0 {
        let _ = writeln!(out);
        let _ = writeln!(out, "{failures} replicate fits failed and were excluded.");
    }
    out
}

/// Persist a report under `dir/base.{csv,md}` per the requested format.
pub fn write_report(
    report: &BenchmarkReport,
    dir: impl AsRef<Path>,
    base: &str,
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if matches!(format, ReportFormat::Csv | ReportFormat::Both) {
        let path = dir.join(format!("{base}.csv"));
        std::fs::write(&path, report_to_csv(report))?;
        written.push(path);
    }
    if matches!(format, ReportFormat::Md | ReportFormat::Both) {
        let path = dir.join(format!("{base}.md"));
        std::fs::write(&path, report_to_markdown(report))?;
        written.push(path);
    }
    Ok(written)
}

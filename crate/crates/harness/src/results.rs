//! Result rows, summary statistics, reference-table comparison, and
//! plot-ready exports.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("reference table: {0}")]
    Reference(String),
    #[error("instance {0} missing from the reference table")]
    MissingReference(String),
    #[error("no rows to process")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Truncated,
    Error,
}

impl std::fmt::Display for RowStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowStatus::Ok => write!(f, "ok"),
            RowStatus::Truncated => write!(f, "truncated"),
            RowStatus::Error => write!(f, "error"),
        }
    }
}

/// One solver result. Serialized with the column order
/// `instance,config,objective,wall_s,seed,runs,status`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub config: String,
    /// Best objective over the runs; absent on error rows.
    pub objective: Option<f64>,
    pub wall_s: f64,
    pub seed: u64,
    pub runs: u32,
    pub status: RowStatus,
}

/// Appends rows to a CSV file, writing the header only when the file is new
/// or empty, and flushing after every row.
pub struct ResultSink {
    writer: csv::Writer<std::fs::File>,
}

impl ResultSink {
    pub fn append(path: &Path) -> Result<Self, ResultsError> {
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        let writer = csv::WriterBuilder::new()
            .has_headers(fresh)
            .from_writer(file);
        Ok(ResultSink { writer })
    }

    pub fn write(&mut self, row: &ResultRow) -> Result<(), ResultsError> {
        self.writer.serialize(row)?;
        self.writer.flush()?;
        Ok(())
    }
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>, ResultsError> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Published per-instance objectives and wall times for a named baseline.
#[derive(Debug, Clone)]
pub struct ReferenceTable {
    pub name: String,
    entries: BTreeMap<String, (f64, f64)>,
}

impl ReferenceTable {
    pub fn from_csv_path(name: &str, path: &Path) -> Result<Self, ResultsError> {
        let mut reader = csv::Reader::from_path(path)?;
        let mut entries = BTreeMap::new();
        #[derive(Deserialize)]
        struct Entry {
            instance: String,
            objective: f64,
            time_s: f64,
        }
        for entry in reader.deserialize::<Entry>() {
            let e = entry?;
            if e.objective <= 0.0 || e.time_s < 0.0 {
                return Err(ResultsError::Reference(format!(
                    "non-positive value for {}",
                    e.instance
                )));
            }
            entries.insert(e.instance, (e.objective, e.time_s));
        }
        if entries.is_empty() {
            return Err(ResultsError::Reference("empty table".into()));
        }
        Ok(ReferenceTable {
            name: name.to_string(),
            entries,
        })
    }

    pub fn objective(&self, instance: &str) -> Option<f64> {
        self.entries.get(instance).map(|&(obj, _)| obj)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Relative tolerance at which two objectives count as equal.
pub const COMPARISON_EQUALITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComparisonClass {
    Better,
    Equal,
    Worse,
}

impl std::fmt::Display for ComparisonClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComparisonClass::Better => write!(f, "better"),
            ComparisonClass::Equal => write!(f, "equal"),
            ComparisonClass::Worse => write!(f, "worse"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub instance: String,
    pub objective: f64,
    pub reference: f64,
    pub class: ComparisonClass,
    /// 100 * (objective - reference) / reference.
    pub deviation_pct: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub better: usize,
    pub equal: usize,
    pub worse: usize,
}

pub fn deviation_pct(objective: f64, reference: f64) -> f64 {
    100.0 * (objective - reference) / reference
}

pub fn classify(objective: f64, reference: f64) -> ComparisonClass {
    if (objective - reference).abs() <= COMPARISON_EQUALITY_TOLERANCE * reference {
        ComparisonClass::Equal
    } else if objective < reference {
        ComparisonClass::Better
    } else {
        ComparisonClass::Worse
    }
}

/// Classifies each successful row against the reference objective. Every row
/// instance must be present in the reference table.
pub fn compare_to_reference(
    rows: &[ResultRow],
    reference: &ReferenceTable,
) -> Result<ComparisonReport, ResultsError> {
    let mut report = ComparisonReport::default();
    for row in rows {
        let Some(objective) = row.objective else {
            continue;
        };
        let reference_obj = reference
            .objective(&row.instance)
            .ok_or_else(|| ResultsError::MissingReference(row.instance.clone()))?;
        let class = classify(objective, reference_obj);
        match class {
            ComparisonClass::Better => report.better += 1,
            ComparisonClass::Equal => report.equal += 1,
            ComparisonClass::Worse => report.worse += 1,
        }
        report.rows.push(ComparisonRow {
            instance: row.instance.clone(),
            objective,
            reference: reference_obj,
            class,
            deviation_pct: deviation_pct(objective, reference_obj),
        });
    }
    Ok(report)
}

pub fn write_comparison_csv(report: &ComparisonReport, path: &Path) -> Result<(), ResultsError> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in &report.rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Min, max, mean, and median of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

pub fn summary_stats(values: &[f64]) -> Option<SummaryStats> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(SummaryStats {
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        median: quantile_sorted(&sorted, 0.5),
    })
}

/// Quantile by linear interpolation between closest ranks over the inclusive
/// range (h = (n - 1) q): for {1,2,3,4}, q1 = 1.75, median = 2.5, q3 = 3.25.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&q));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Field of a result row to group by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Config,
    Instance,
}

/// Value plotted per row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotValue {
    Objective,
    WallSeconds,
    /// Percent deviation from a reference objective.
    DeviationPct,
}

/// One box-plot record: the five-number summary plus the mean.
#[derive(Debug, Clone, Serialize)]
pub struct PlotRecord {
    pub group: String,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Aggregates rows into per-group quartile/mean records, ready for any
/// external box-plot tool. Error rows are skipped; deviation plots skip rows
/// whose instance the reference does not cover.
pub fn emit_plot_data(
    rows: &[ResultRow],
    group_by: GroupBy,
    value: PlotValue,
    reference: Option<&ReferenceTable>,
) -> Result<Vec<PlotRecord>, ResultsError> {
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for row in rows {
        let Some(objective) = row.objective else {
            continue;
        };
        let v = match value {
            PlotValue::Objective => objective,
            PlotValue::WallSeconds => row.wall_s,
            PlotValue::DeviationPct => {
                let Some(reference) = reference else {
                    return Err(ResultsError::Reference(
                        "deviation plots need a reference table".into(),
                    ));
                };
                match reference.objective(&row.instance) {
                    Some(r) => deviation_pct(objective, r),
                    None => continue,
                }
            }
        };
        let key = match group_by {
            GroupBy::Config => row.config.clone(),
            GroupBy::Instance => row.instance.clone(),
        };
        groups.entry(key).or_default().push(v);
    }
    if groups.is_empty() {
        return Err(ResultsError::Empty);
    }
    Ok(groups
        .into_iter()
        .map(|(group, mut values)| {
            values.sort_by(f64::total_cmp);
            PlotRecord {
                group,
                count: values.len(),
                min: values[0],
                q1: quantile_sorted(&values, 0.25),
                median: quantile_sorted(&values, 0.5),
                q3: quantile_sorted(&values, 0.75),
                max: values[values.len() - 1],
                mean: values.iter().sum::<f64>() / values.len() as f64,
            }
        })
        .collect())
}

pub fn write_plot_csv(records: &[PlotRecord], path: &Path) -> Result<(), ResultsError> {
    let mut writer = csv::Writer::from_path(path)?;
    for record in records {
        writer.serialize(record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Prints the per-config summary block in the min/max/mean/median layout.
pub fn print_summary<W: Write>(
    out: &mut W,
    rows: &[ResultRow],
    reference: Option<&ReferenceTable>,
) -> std::io::Result<()> {
    let mut configs: BTreeMap<&str, Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        configs.entry(&row.config).or_default().push(row);
    }
    for (config, rows) in configs {
        writeln!(out, "config {config}: {} rows", rows.len())?;
        let walls: Vec<f64> = rows.iter().map(|r| r.wall_s).collect();
        if let Some(s) = summary_stats(&walls) {
            writeln!(
                out,
                "  wall_s      min {:>10.2}  max {:>10.2}  mean {:>10.2}  median {:>10.2}",
                s.min, s.max, s.mean, s.median
            )?;
        }
        if let Some(reference) = reference {
            let devs: Vec<f64> = rows
                .iter()
                .filter_map(|r| {
                    let obj = r.objective?;
                    reference
                        .objective(&r.instance)
                        .map(|base| deviation_pct(obj, base))
                })
                .collect();
            if let Some(s) = summary_stats(&devs) {
                writeln!(
                    out,
                    "  deviation%  min {:>10.2}  max {:>10.2}  mean {:>10.2}  median {:>10.2}  (vs {}, {} rows)",
                    s.min, s.max, s.mean, s.median, reference.name, devs.len()
                )?;
            }
        }
    }
    Ok(())
}

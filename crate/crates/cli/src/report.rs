//! Experiment records and their JSON, CSV and plot-data forms.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use regcauchy::numerics::LimitEstimate;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Predicted,
    Observed,
    Tolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tagged {
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub name: String,
    pub re: Tagged,
    pub im: Tagged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub y: f64,
    pub re: f64,
    pub im: f64,
    pub predicted_re: Option<f64>,
    pub predicted_im: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitRecord {
    pub name: String,
    pub re: Tagged,
    pub im: Tagged,
    pub uncertainty: Tagged,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: Tagged,
    pub predicted: Tagged,
    pub tolerance: Tagged,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRecord {
    pub id: String,
    pub inputs: Vec<(String, String)>,
    pub grid: Vec<GridRow>,
    pub limits: Vec<LimitRecord>,
    pub quantities: Vec<Quantity>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub curves: Vec<Curve>,
}

impl ReportRecord {
    pub fn new(id: impl Into<String>) -> Self {
        ReportRecord {
            id: id.into(),
            inputs: Vec::new(),
            grid: Vec::new(),
            limits: Vec::new(),
            quantities: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            curves: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.push((key.to_string(), value.to_string()));
    }

    pub fn limit(&mut self, name: &str, est: &LimitEstimate) {
        self.limits.push(LimitRecord {
            name: name.into(),
            re: observed(est.value.re),
            im: observed(est.value.im),
            uncertainty: observed(est.uncertainty),
            verdict: format!("{:?}", est.verdict),
        });
    }

    pub fn quantity(&mut self, name: &str, value: num_complex::Complex64, provenance: Provenance) {
        self.quantities.push(Quantity {
            name: name.into(),
            re: Tagged {
                value: value.re,
                provenance,
            },
            im: Tagged {
                value: value.im,
                provenance,
            },
        });
    }

    /// Records `|observed − predicted| ≤ tolerance·scale`, with `scale = max(|predicted|, 1)`
    /// when `relative`, else `1`.
    pub fn check(&mut self, name: &str, observed_value: f64, predicted: f64, tolerance: f64, relative: bool) -> bool {
        let scale = if relative { predicted.abs().max(f64::MIN_POSITIVE) } else { 1.0 };
        let pass = (observed_value - predicted).abs() <= tolerance * scale;
        self.checks.push(Check {
            name: name.into(),
            observed: observed(observed_value),
            predicted: Tagged {
                value: predicted,
                provenance: Provenance::Predicted,
            },
            tolerance: Tagged {
                value: tolerance,
                provenance: Provenance::Tolerance,
            },
            pass,
        });
        pass
    }

    /// Records a yes/no outcome as a check of `1` against `1`.
    pub fn flag(&mut self, name: &str, ok: bool) -> bool {
        self.check(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0, false)
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn observed(value: f64) -> Tagged {
    Tagged {
        value,
        provenance: Provenance::Observed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Report {
    pub experiments: Vec<ReportRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plotdata,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Plotdata => "dat",
        }
    }
}

/// Writes `contents` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(contents.as_bytes())?;
            f.sync_all()
        })
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}

pub fn to_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serialises")
}

pub fn to_csv(report: &Report) -> String {
    let mut out = String::from("y,re,im,predicted_re,predicted_im\n");
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    for rec in &report.experiments {
        for row in &rec.grid {
            out.push_str(&format!(
                "{:e},{:e},{:e},{},{}\n",
                row.y,
                row.re,
                row.im,
                opt(row.predicted_re),
                opt(row.predicted_im)
            ));
        }
    }
    out
}

fn curve_text(curve: &Curve) -> String {
    let mut out = format!("# {}\n", curve.name);
    for (x, y) in &curve.points {
        out.push_str(&format!("{x:e} {y:e}\n"));
    }
    out
}

/// Emits the report and returns the written paths. For plot data `path` is a
/// stem: each curve goes to `<stem>-<experiment>-<curve>.dat`, or
/// `<stem>-<curve>.dat` when the stem is the experiment id.
pub fn emit_report(report: &Report, format: Format, path: &Path) -> CliResult<Vec<PathBuf>> {
    match format {
        Format::Json => {
            write_atomic(path, &(to_json(report) + "\n"))?;
            Ok(vec![path.to_path_buf()])
        }
        Format::Csv => {
            write_atomic(path, &to_csv(report))?;
            Ok(vec![path.to_path_buf()])
        }
        Format::Plotdata => {
            let stem = path.with_extension("");
            let base = stem.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let mut written = Vec::new();
            for rec in &report.experiments {
                for curve in &rec.curves {
                    let name = if base == rec.id {
                        format!("{base}-{}.dat", curve.name)
                    } else {
                        format!("{base}-{}-{}.dat", rec.id, curve.name)
                    };
                    let file = stem.with_file_name(name);
                    write_atomic(&file, &curve_text(curve))?;
                    written.push(file);
                }
            }
            Ok(written)
        }
    }
}

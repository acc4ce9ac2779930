//! Sample, layout and report files.
//!
//! Samples come as JSON (`{"samples": [...], "similarities": null | [[...]]}`)
//! or as CSV with the columns `id,x,y,cluster`. Layouts are JSON documents
//! carrying a schema version, the grid size and one entry per occupied cell.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use gridweave_core::{GridLayout, GridSpec, MeasureReport, SampleRecord, SampleSet};
use serde::{Deserialize, Serialize};

pub const LAYOUT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{context}: {detail}")]
    Parse { context: String, detail: String },
    #[error("{context}: {source}")]
    Invalid {
        context: String,
        source: gridweave_core::Error,
    },
    #[error("unsupported schema version {0} (expected {LAYOUT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("layout references unknown sample `{0}`")]
    UnknownSample(String),
    #[error("layout is inconsistent: {0}")]
    Schema(String),
}

impl IoError {
    /// Short machine-readable code for error payloads.
    pub fn code(&self) -> &'static str {
        match self {
            IoError::Io { .. } => "io",
            IoError::Parse { .. } => "parse",
            IoError::Invalid { .. } => "invalid_input",
            IoError::UnsupportedVersion(_) => "unsupported_version",
            IoError::UnknownSample(_) => "unknown_sample",
            IoError::Schema(_) => "schema",
        }
    }
}

pub type IoResult<T> = Result<T, IoError>;

fn read(path: &Path) -> IoResult<String> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `text` to `path`, creating parent directories.
pub fn write(path: &Path, text: &str) -> IoResult<()> {
    let io = |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, text).map_err(io)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SampleJson {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub cluster: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SamplesJson {
    pub samples: Vec<SampleJson>,
    #[serde(default)]
    pub similarities: Option<Vec<Vec<f64>>>,
}

impl SamplesJson {
    pub fn from_set(set: &SampleSet) -> Self {
        let samples = set
            .samples()
            .iter()
            .map(|s| SampleJson {
                id: s.id.clone(),
                x: s.position[0],
                y: s.position[1],
                cluster: set.cluster_name(s.cluster).to_owned(),
                meta: s
                    .meta
                    .iter()
                    .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                    .collect(),
            })
            .collect();
        Self {
            samples,
            similarities: set.similarity_rows(),
        }
    }
}

fn meta_text(v: serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }
}

/// Checks records one by one so errors can name the offending record.
fn build_set(records: Vec<SampleRecord>, similarities: Option<Vec<Vec<f64>>>, origin: &str) -> IoResult<SampleSet> {
    let mut seen = BTreeSet::new();
    for (i, r) in records.iter().enumerate() {
        let context = format!("{origin}, record {}", i + 1);
        if !(r.x.is_finite() && r.y.is_finite()) {
            return Err(IoError::Invalid {
                context,
                source: gridweave_core::Error::NonFinitePosition(r.id.clone()),
            });
        }
        if !seen.insert(r.id.as_str()) {
            return Err(IoError::Invalid {
                context,
                source: gridweave_core::Error::DuplicateId(r.id.clone()),
            });
        }
    }
    SampleSet::new(records, similarities).map_err(|source| IoError::Invalid {
        context: origin.to_owned(),
        source,
    })
}

pub fn parse_samples_json(text: &str, origin: &str) -> IoResult<SampleSet> {
    let doc: SamplesJson = serde_json::from_str(text).map_err(|e| IoError::Parse {
        context: format!("{origin}, line {} column {}", e.line(), e.column()),
        detail: e.to_string(),
    })?;
    let records = doc
        .samples
        .into_iter()
        .map(|s| SampleRecord {
            id: s.id,
            x: s.x,
            y: s.y,
            cluster: s.cluster,
            meta: s.meta.into_iter().map(|(k, v)| (k, meta_text(v))).collect(),
        })
        .collect();
    build_set(records, doc.similarities, origin)
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    id: String,
    x: f64,
    y: f64,
    cluster: String,
}

pub fn parse_samples_csv(text: &str, origin: &str) -> IoResult<SampleSet> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for row in reader.deserialize::<CsvRow>() {
        let row = row.map_err(|e| IoError::Parse {
            context: match e.position() {
                Some(p) => format!("{origin}, line {}", p.line()),
                None => origin.to_owned(),
            },
            detail: e.to_string(),
        })?;
        records.push(SampleRecord {
            id: row.id,
            x: row.x,
            y: row.y,
            cluster: row.cluster,
            meta: BTreeMap::new(),
        });
    }
    build_set(records, None, origin)
}

/// Reads a sample file, choosing CSV for a `.csv` extension and JSON
/// otherwise.
pub fn load_samples(path: &Path) -> IoResult<SampleSet> {
    let text = read(path)?;
    let origin = path.display().to_string();
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        parse_samples_csv(&text, &origin)
    } else {
        parse_samples_json(&text, &origin)
    }
}

pub fn samples_to_json(set: &SampleSet) -> String {
    serde_json::to_string_pretty(&SamplesJson::from_set(set)).expect("sample sets serialize")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridJson {
    pub w: usize,
    pub h: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellJson {
    pub col: usize,
    pub row: usize,
    pub sample: String,
    pub cluster: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutJson {
    pub version: u32,
    pub grid: GridJson,
    pub cells: Vec<CellJson>,
}

impl LayoutJson {
    /// `samples` must be the set the layout was computed for (layout sample
    /// `i` is `samples.sample(i)`).
    pub fn from_layout(layout: &GridLayout, samples: &SampleSet) -> Self {
        let spec = layout.spec();
        let cells = (0..spec.capacity())
            .filter_map(|cell| {
                let s = layout.sample_at(cell)?;
                let (col, row) = spec.coords(cell);
                let sample = samples.sample(s);
                Some(CellJson {
                    col,
                    row,
                    sample: sample.id.clone(),
                    cluster: samples.cluster_name(sample.cluster).to_owned(),
                })
            })
            .collect();
        Self {
            version: LAYOUT_VERSION,
            grid: GridJson {
                w: spec.width(),
                h: spec.height(),
            },
            cells,
        }
    }

    /// Resolves sample ids against `samples`; every sample must be placed
    /// exactly once.
    pub fn to_layout(&self, samples: &SampleSet) -> IoResult<GridLayout> {
        if self.version != LAYOUT_VERSION {
            return Err(IoError::UnsupportedVersion(self.version));
        }
        let invalid = |source| IoError::Invalid {
            context: "layout".into(),
            source,
        };
        let spec = GridSpec::new(self.grid.w, self.grid.h).map_err(invalid)?;
        let mut cell_of = vec![usize::MAX; samples.len()];
        for c in &self.cells {
            if c.col >= spec.width() || c.row >= spec.height() {
                return Err(IoError::Schema(format!("cell ({}, {}) outside {spec}", c.col, c.row)));
            }
            let s = samples
                .index_of(&c.sample)
                .ok_or_else(|| IoError::UnknownSample(c.sample.clone()))?;
            if samples.cluster_name(samples.sample(s).cluster) != c.cluster {
                return Err(IoError::Schema(format!(
                    "sample `{}` is in cluster `{}`, not `{}`",
                    c.sample,
                    samples.cluster_name(samples.sample(s).cluster),
                    c.cluster
                )));
            }
            if cell_of[s] != usize::MAX {
                return Err(IoError::Schema(format!("sample `{}` placed twice", c.sample)));
            }
            cell_of[s] = spec.index(c.col, c.row);
        }
        if let Some(s) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(IoError::Schema(format!(
                "sample `{}` is not placed",
                samples.sample(s).id
            )));
        }
        GridLayout::new(spec, cell_of, samples.clusters()).map_err(invalid)
    }
}

/// Reads a layout file on its own, without the sample file it was computed
/// for. Sample positions are set to the cell centers.
pub fn load_layout_standalone(path: &Path) -> IoResult<(GridLayout, SampleSet)> {
    let origin = path.display().to_string();
    let text = read(path)?;
    let doc: LayoutJson = serde_json::from_str(&text).map_err(|e| IoError::Parse {
        context: format!("{origin}, line {} column {}", e.line(), e.column()),
        detail: e.to_string(),
    })?;
    if doc.version != LAYOUT_VERSION {
        return Err(IoError::UnsupportedVersion(doc.version));
    }
    let records = doc
        .cells
        .iter()
        .map(|c| SampleRecord {
            id: c.sample.clone(),
            x: c.col as f64 + 0.5,
            y: c.row as f64 + 0.5,
            cluster: c.cluster.clone(),
            meta: BTreeMap::new(),
        })
        .collect();
    let samples = build_set(records, None, &origin)?;
    let layout = doc.to_layout(&samples)?;
    Ok((layout, samples))
}

pub fn layout_to_json(layout: &GridLayout, samples: &SampleSet) -> String {
    serde_json::to_string_pretty(&LayoutJson::from_layout(layout, samples)).expect("layouts serialize")
}

pub fn parse_layout_json(text: &str, samples: &SampleSet, origin: &str) -> IoResult<GridLayout> {
    // Check the version before the rest of the schema so old files get the
    // clearer error.
    #[derive(Deserialize)]
    struct Versioned {
        version: u32,
    }
    let parse_err = |e: serde_json::Error| IoError::Parse {
        context: format!("{origin}, line {} column {}", e.line(), e.column()),
        detail: e.to_string(),
    };
    let v: Versioned = serde_json::from_str(text).map_err(parse_err)?;
    if v.version != LAYOUT_VERSION {
        return Err(IoError::UnsupportedVersion(v.version));
    }
    let doc: LayoutJson = serde_json::from_str(text).map_err(parse_err)?;
    doc.to_layout(samples)
}

pub fn save_layout(layout: &GridLayout, samples: &SampleSet, path: &Path) -> IoResult<()> {
    write(path, &layout_to_json(layout, samples))
}

pub fn load_layout(path: &Path, samples: &SampleSet) -> IoResult<GridLayout> {
    parse_layout_json(&read(path)?, samples, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub proximity: f64,
    pub compactness: f64,
    pub area_ratio: f64,
    pub triple_ratio: f64,
    pub perimeter_ratio: f64,
    pub cut_ratio: f64,
    pub prox2: f64,
    pub comp: f64,
}

impl From<&MeasureReport> for ReportJson {
    fn from(r: &MeasureReport) -> Self {
        Self {
            proximity: r.proximity,
            compactness: r.compactness,
            area_ratio: r.area_ratio,
            triple_ratio: r.triple_ratio,
            perimeter_ratio: r.perimeter_ratio,
            cut_ratio: r.cut_ratio,
            prox2: r.raw.prox2,
            comp: r.raw.comp,
        }
    }
}

pub fn report_to_json(report: &MeasureReport) -> String {
    serde_json::to_string_pretty(&ReportJson::from(report)).expect("reports serialize")
}

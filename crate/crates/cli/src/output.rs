//! Atomic file output and the JSON run report.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use xncut::segmenter::{SegmenterConfig, SplitRecord, StageTimings};

/// Writes `path` through a temporary file in the same directory that is
/// renamed into place once `fill` succeeds, so readers never see a partial
/// file.
pub fn write_atomic(
    path: &Path,
    fill: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    {
        let mut out = BufWriter::new(tmp.as_file());
        fill(&mut out)?;
        out.flush()?;
    }
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Configuration block of the report: the segmenter settings plus the
/// front-end options that shaped the features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub input: PathBuf,
    #[serde(flatten)]
    pub segmenter: SegmenterConfig,
    pub pca: Option<usize>,
    pub upsample: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub depth: usize,
    pub energy: f64,
    pub ncut: f64,
    pub n_mismatch: usize,
    pub n_boundary: usize,
    pub accepted: bool,
}

impl From<&SplitRecord> for SplitReport {
    fn from(s: &SplitRecord) -> Self {
        SplitReport {
            depth: s.depth,
            energy: s.energy,
            ncut: s.ncut,
            n_mismatch: s.n_mismatch,
            n_boundary: s.n_boundary,
            accepted: s.accepted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingsMs {
    pub quantize: f64,
    pub graph: f64,
    pub eigen: f64,
    pub cut: f64,
}

impl From<&StageTimings> for TimingsMs {
    fn from(t: &StageTimings) -> Self {
        let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
        TimingsMs { quantize: ms(t.quantize), graph: ms(t.graph), eigen: ms(t.eigen), cut: ms(t.cut) }
    }
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ReportConfig,
    pub n_segments: usize,
    pub splits: Vec<SplitReport>,
    pub timings_ms: TimingsMs,
}

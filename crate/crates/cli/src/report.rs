use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const REPORT_FILE: &str = "report.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `measured ≤ tolerance`
    AtMost,
    /// `measured ≥ tolerance`
    AtLeast,
    /// `|measured − target| ≤ tolerance`
    Near,
    /// `measured` is exactly `target`.
    Equal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Disabled checks are reported but never fail a run.
    pub enabled: bool,
    pub pass: bool,
    pub measured: f64,
    pub relation: Relation,
    pub target: Option<f64>,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Check {
    fn new(name: impl Into<String>, measured: f64, relation: Relation, target: Option<f64>, tolerance: f64, pass: bool) -> Self {
        Self { name: name.into(), enabled: true, pass, measured, relation, target, tolerance, note: String::new() }
    }

    pub fn at_most(name: impl Into<String>, measured: f64, tol: f64) -> Self {
        Self::new(name, measured, Relation::AtMost, None, tol, measured <= tol)
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tol: f64) -> Self {
        Self::new(name, measured, Relation::AtLeast, None, tol, measured >= tol)
    }

    pub fn near(name: impl Into<String>, measured: f64, target: f64, tol: f64) -> Self {
        Self::new(name, measured, Relation::Near, Some(target), tol, (measured - target).abs() <= tol)
    }

    pub fn equal(name: impl Into<String>, measured: f64, target: f64) -> Self {
        Self::new(name, measured, Relation::Equal, Some(target), 0.0, measured == target)
    }

    /// A boolean outcome; `measured` is 1 for true.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::equal(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    /// Recorded without a verdict, e.g. when there is nothing to fit.
    pub fn skipped(name: impl Into<String>, why: impl Into<String>) -> Self {
        let mut c = Self::new(name, f64::NAN, Relation::Equal, None, 0.0, false);
        c.enabled = false;
        c.note = why.into();
        c
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn failed(&self) -> bool {
        self.enabled && !self.pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub experiment: String,
    pub config: Vec<(String, String)>,
    pub version: String,
    pub wall_time_s: f64,
    pub checks: Vec<Check>,
    pub files: Vec<FileEntry>,
    pub pass: bool,
}

impl RunReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn file(&self, name: &str) -> Option<&FileEntry> {
        self.files.iter().find(|f| f.path == name)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let p = dir.join(REPORT_FILE);
        let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
    }
}

/// Writes `bytes` to a sibling temporary file, syncs it, then renames it
/// over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))
}

/// Collects artifacts of one run and their hashes.
pub struct Artifacts {
    pub dir: PathBuf,
    pub files: Vec<FileEntry>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.files.retain(|f| f.path != name);
        self.files.push(FileEntry {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Comma-separated table with a header row.
pub struct Csv {
    out: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { out: format!("{}\n", header.join(",")), width: header.len() }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.width, "row width");
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    /// Appends `# `-prefixed lines, skipped by CSV readers that honour comments.
    pub fn comment(&mut self, text: &str) {
        for l in text.lines() {
            self.out.push_str("# ");
            self.out.push_str(l);
            self.out.push('\n');
        }
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.out.into_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
            assert_eq!(digits, 17, "{s}");
        }
    }

    #[test]
    fn check_relations() {
        assert!(Check::near("s", -0.52, -0.5, 0.15).pass);
        assert!(!Check::at_most("d", 2e-6, 1e-6).pass);
        assert!(Check::at_least("x", 1.0, 1.0).pass);
        let s = Check::skipped("fit", "too few points");
        assert!(!s.failed());
    }
}

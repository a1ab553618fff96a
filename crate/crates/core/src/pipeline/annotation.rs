use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::video::{load_sequence, FrameSequence, VideoFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "SHDT")]
    Shdt,
    #[serde(rename = "TDT")]
    Tdt,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Shdt => "SHDT",
            Mode::Tdt => "TDT",
        }
    }

    /// Method labels the suggester for this mode chooses from.
    pub fn methods(self) -> &'static [&'static str] {
        match self {
            Mode::Shdt => &SHDT_METHODS,
            Mode::Tdt => &TDT_METHODS,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const SHDT_METHODS: [&str; 4] = ["SNtextons", "ARtextons", "GraphcutTextures", "GatysDT"];
pub const TDT_METHODS: [&str; 3] = ["LDS", "GraphcutTextures", "STGConvNet"];
pub const NULL_METHOD: &str = "NULL";

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

/// One manifest row. Non-DT rows (`dt = false`) only feed retrieval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: String,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub dt: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_dt: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_spatial: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_temporal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_md_spatial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_md_temporal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

impl Annotation {
    pub fn new(id: impl Into<String>) -> Self {
        Annotation {
            id: id.into(),
            dt: true,
            l_dt: None,
            s_spatial: None,
            s_temporal: None,
            l_md_spatial: None,
            l_md_temporal: None,
            split: None,
            path: None,
            format: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invalid(format!("row {:?}: {m}", self.id)));
        if self.id.is_empty() || self.id.chars().any(char::is_whitespace) {
            return bad("id must be non-empty without whitespace".into());
        }
        if !self.dt {
            return Ok(());
        }
        let Some(mode) = self.l_dt else {
            return bad("DT rows need l_dt".into());
        };
        let score = |name: &str, s: Option<f64>| -> Result<Option<f64>> {
            match s {
                Some(v) if v == 0.0 || v == 0.5 || v == 1.0 => Ok(Some(v)),
                Some(v) => Err(Error::Invalid(format!(
                    "row {:?}: {name} = {v} not in {{0, 0.5, 1}}",
                    self.id
                ))),
                None => Ok(None),
            }
        };
        let method = |name: &str, label: &Option<String>, s: Option<f64>, allowed: &[&str]| -> Result<()> {
            if let Some(m) = label {
                if m != NULL_METHOD && !allowed.contains(&m.as_str()) {
                    return Err(Error::Invalid(format!(
                        "row {:?}: {name} {m:?} not in {allowed:?}",
                        self.id
                    )));
                }
                if (m == NULL_METHOD) != (s == Some(0.0)) {
                    return Err(Error::Invalid(format!(
                        "row {:?}: {name} must be NULL exactly when its score is 0",
                        self.id
                    )));
                }
            }
            Ok(())
        };
        let st = score("s_temporal", self.s_temporal)?;
        if st.is_none() {
            return bad("DT rows need s_temporal".into());
        }
        method("l_md_temporal", &self.l_md_temporal, st, &TDT_METHODS)?;
        match mode {
            Mode::Shdt => {
                let ss = score("s_spatial", self.s_spatial)?;
                if ss.is_none() {
                    return bad("SHDT rows need s_spatial".into());
                }
                method("l_md_spatial", &self.l_md_spatial, ss, &SHDT_METHODS)?;
            }
            Mode::Tdt => {
                if self.s_spatial.is_some() || self.l_md_spatial.is_some() {
                    return bad("TDT rows carry no spatial fields".into());
                }
            }
        }
        Ok(())
    }

    /// Method label usable for training the suggester of this row's mode.
    pub fn method_label(&self) -> Option<&str> {
        let label = match self.l_dt? {
            Mode::Shdt => self.l_md_spatial.as_deref(),
            Mode::Tdt => self.l_md_temporal.as_deref(),
        }?;
        (label != NULL_METHOD).then_some(label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub rows: Vec<Annotation>,
    /// Directory relative video paths are resolved against.
    pub base_dir: PathBuf,
}

impl Manifest {
    pub fn new(rows: Vec<Annotation>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &rows {
            r.validate()?;
            if !seen.insert(r.id.as_str()) {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        Ok(Manifest {
            rows,
            base_dir: PathBuf::from("."),
        })
    }

    /// One JSON object per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row: Annotation =
                serde_json::from_str(line).map_err(|e| Error::parse(format!("{source}:{}", n + 1), e))?;
            rows.push(row);
        }
        Self::new(rows)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::unreadable(path, e))?;
        let mut m = Self::parse(&text, &path.display().to_string())?;
        m.base_dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(m)
    }

    pub fn to_jsonl(&self) -> String {
        self.rows
            .iter()
            .map(|r| serde_json::to_string(r).expect("annotation serializes") + "\n")
            .collect()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Annotation> {
        self.rows.iter().find(|r| r.id == id)
    }

    pub fn video_path(&self, row: &Annotation) -> Result<PathBuf> {
        let p = row
            .path
            .as_ref()
            .ok_or_else(|| Error::Invalid(format!("row {:?} has no video path", row.id)))?;
        let p = Path::new(p);
        Ok(if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        })
    }

    pub fn load_video(&self, row: &Annotation) -> Result<FrameSequence> {
        let path = self.video_path(row)?;
        let format = match &row.format {
            Some(f) => f.parse()?,
            None => VideoFormat::infer(&path),
        };
        let seq = load_sequence(&path, format)?;
        let (h, w, t) = (seq.height(), seq.width(), seq.len());
        FrameSequence::new(h, w, t, seq.data().to_vec(), row.id.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(json: &str) -> Result<Annotation> {
        let a: Annotation = serde_json::from_str(json).unwrap();
        a.validate().map(|_| a)
    }

    #[test]
    fn valid_rows() {
        row(
            r#"{"id":"a","l_dt":"SHDT","s_spatial":1,"s_temporal":0.5,"l_md_spatial":"GatysDT","l_md_temporal":"LDS"}"#,
        )
        .unwrap();
        row(r#"{"id":"b","l_dt":"TDT","s_temporal":0,"l_md_temporal":"NULL","extra":42}"#).unwrap();
        row(r#"{"id":"c","dt":false}"#).unwrap();
    }

    #[test]
    fn invalid_rows() {
        assert!(row(r#"{"id":"a","l_dt":"TDT","s_temporal":1,"s_spatial":1}"#).is_err());
        assert!(row(r#"{"id":"a","l_dt":"SHDT","s_temporal":1}"#).is_err());
        assert!(row(r#"{"id":"a","l_dt":"TDT","s_temporal":0.3}"#).is_err());
        assert!(row(r#"{"id":"a","l_dt":"TDT","s_temporal":0,"l_md_temporal":"LDS"}"#).is_err());
        assert!(row(r#"{"id":"a","l_dt":"TDT","s_temporal":1,"l_md_temporal":"NULL"}"#).is_err());
        assert!(row(r#"{"id":"a","l_dt":"TDT","s_temporal":1,"l_md_temporal":"GatysDT"}"#).is_err());
        assert!(row(r#"{"id":"a b","dt":false}"#).is_err());
    }

    #[test]
    fn manifest_parsing() {
        let text = "# comment\n{\"id\":\"x\",\"dt\":false}\n\n{\"id\":\"y\",\"l_dt\":\"TDT\",\"s_temporal\":1}\n";
        let m = Manifest::parse(text, "m").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(Manifest::parse(&m.to_jsonl(), "m").unwrap().rows, m.rows);
        let dup = "{\"id\":\"x\",\"dt\":false}\n{\"id\":\"x\",\"dt\":false}\n";
        assert!(matches!(Manifest::parse(dup, "m"), Err(Error::DuplicateId(_))));
        assert!(matches!(Manifest::parse("{nope", "m"), Err(Error::Parse { .. })));
    }

    #[test]
    fn method_labels_follow_mode() {
        let a = row(
            r#"{"id":"a","l_dt":"SHDT","s_spatial":1,"s_temporal":1,"l_md_spatial":"ARtextons","l_md_temporal":"LDS"}"#,
        )
        .unwrap();
        assert_eq!(a.method_label(), Some("ARtextons"));
        let b = row(r#"{"id":"b","l_dt":"TDT","s_temporal":0,"l_md_temporal":"NULL"}"#).unwrap();
        assert_eq!(b.method_label(), None);
    }
}

//! Feature files: a `DTFEAT 1 <kind> <dim>` header line followed by one
//! record per video, either as text lines `<id> v1 .. vdim` or as binary
//! records (u32 LE id length, id bytes, dim f32 LE values).

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Descriptor, FeatureKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureFileFormat {
    Text,
    Binary,
}

impl FeatureFileFormat {
    /// Binary for `.bin` files, text otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("bin") => FeatureFileFormat::Binary,
            _ => FeatureFileFormat::Text,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub kind: FeatureKind,
    pub dim: usize,
    pub rows: BTreeMap<String, Vec<f64>>,
}

impl FeatureTable {
    pub fn new(kind: FeatureKind, dim: usize) -> Self {
        FeatureTable {
            kind,
            dim,
            rows: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let id = id.into();
        if values.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: values.len(),
            });
        }
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::Invalid(format!(
                "feature id {id:?} must be non-empty without whitespace"
            )));
        }
        if self.rows.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.rows.insert(id, values);
        Ok(())
    }

    pub fn descriptor(&self, id: &str) -> Result<Descriptor> {
        self.rows
            .get(id)
            .map(|v| Descriptor::new(self.kind, v.clone()))
            .ok_or_else(|| Error::MissingId {
                id: id.to_string(),
                kind: self.kind,
            })
    }
}

pub fn write_features(table: &FeatureTable, path: &Path, format: FeatureFileFormat) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "DTFEAT 1 {} {}", table.kind, table.dim)?;
    for (id, values) in &table.rows {
        match format {
            FeatureFileFormat::Text => {
                out.write_all(id.as_bytes())?;
                for v in values {
                    write!(out, " {v}")?;
                }
                out.write_all(b"\n")?;
            }
            FeatureFileFormat::Binary => {
                out.write_all(&(id.len() as u32).to_le_bytes())?;
                out.write_all(id.as_bytes())?;
                for &v in values {
                    out.write_all(&(v as f32).to_le_bytes())?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn parse_header(line: &str, path: &Path) -> Result<(FeatureKind, usize)> {
    let loc = format!("{}:1", path.display());
    let parts: Vec<&str> = line.split_whitespace().collect();
    match parts.as_slice() {
        ["DTFEAT", "1", kind, dim] => {
            let kind = kind.parse().map_err(|e: Error| Error::parse(&loc, e))?;
            let dim = dim
                .parse()
                .map_err(|_| Error::parse(&loc, format!("bad dimension {dim:?}")))?;
            Ok((kind, dim))
        }
        _ => Err(Error::parse(&loc, "expected header \"DTFEAT 1 <kind> <dim>\"")),
    }
}

pub fn read_features(path: &Path, format: FeatureFileFormat) -> Result<FeatureTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::unreadable(path, e))?;
    let mut reader = BufReader::new(file);
    let mut header = String::new();
    reader.read_line(&mut header).map_err(|e| Error::unreadable(path, e))?;
    let (kind, dim) = parse_header(&header, path)?;
    let mut table = FeatureTable::new(kind, dim);
    match format {
        FeatureFileFormat::Text => {
            for (n, line) in reader.lines().enumerate() {
                let line = line.map_err(|e| Error::unreadable(path, e))?;
                let mut fields = line.split_whitespace();
                let Some(id) = fields.next() else { continue };
                let loc = format!("{}:{}", path.display(), n + 2);
                let values = fields
                    .map(|f| {
                        f.parse::<f64>()
                            .map_err(|_| Error::parse(&loc, format!("bad number {f:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                table.insert(id, values)?;
            }
        }
        FeatureFileFormat::Binary => {
            let mut bytes = Vec::new();
            reader.read_to_end(&mut bytes).map_err(|e| Error::unreadable(path, e))?;
            let mut pos = 0usize;
            let truncated = || Error::parse(path.display().to_string(), "truncated binary record");
            while pos < bytes.len() {
                let len_bytes = bytes.get(pos..pos + 4).ok_or_else(truncated)?;
                let len = u32::from_le_bytes(len_bytes.try_into().unwrap()) as usize;
                pos += 4;
                let id = bytes.get(pos..pos + len).ok_or_else(truncated)?;
                let id = std::str::from_utf8(id)
                    .map_err(|_| Error::parse(path.display().to_string(), "id is not UTF-8"))?
                    .to_string();
                pos += len;
                let raw = bytes.get(pos..pos + 4 * dim).ok_or_else(truncated)?;
                pos += 4 * dim;
                let values = raw
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
                    .collect();
                table.insert(id, values)?;
            }
        }
    }
    Ok(table)
}

/// Reads externally computed features, checking every row has `expected_dim`.
pub fn ingest_external(path: &Path, expected_dim: Option<usize>) -> Result<BTreeMap<String, Descriptor>> {
    let table = read_features(path, FeatureFileFormat::from_path(path))?;
    if let Some(d) = expected_dim {
        if d != table.dim {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: table.dim,
            });
        }
    }
    Ok(table
        .rows
        .into_iter()
        .map(|(id, v)| (id, Descriptor::new(FeatureKind::External, v)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::rng::rng_for;

    #[test]
    fn single_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        std::fs::write(&p, "DTFEAT 1 EXTERNAL 4\na 0 0 0 0\n").unwrap();
        let m = ingest_external(&p, Some(4)).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m["a"].values, vec![0.0; 4]);
    }

    #[test]
    fn ragged_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        std::fs::write(&p, "DTFEAT 1 EXTERNAL 2\na 1 2\nb 1 2 3\n").unwrap();
        assert!(matches!(
            ingest_external(&p, None),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn duplicate_ids() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        std::fs::write(&p, "DTFEAT 1 EXTERNAL 1\na 1\na 2\n").unwrap();
        assert!(matches!(ingest_external(&p, None), Err(Error::DuplicateId(id)) if id == "a"));
    }

    #[test]
    fn bad_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        std::fs::write(&p, "FEATURES 4\n").unwrap();
        assert!(matches!(ingest_external(&p, None), Err(Error::Parse { .. })));
    }

    #[test]
    fn text_round_trip_is_bitwise() {
        let mut rng = rng_for(3, &[]);
        let mut table = FeatureTable::new(FeatureKind::External, 16);
        for i in 0..100 {
            let v: Vec<f64> = (0..16).map(|_| rng.gen::<f64>() * 1e3 - 500.0).collect();
            table.insert(format!("vid{i:03}"), v).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        write_features(&table, &p, FeatureFileFormat::Text).unwrap();
        let back = read_features(&p, FeatureFileFormat::Text).unwrap();
        for (id, v) in &table.rows {
            let w = &back.rows[id];
            assert!(v.iter().zip(w).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
        assert_eq!(back, table);
    }

    #[test]
    fn binary_round_trip_of_f32_values() {
        let mut rng = rng_for(4, &[]);
        let mut table = FeatureTable::new(FeatureKind::External, 8);
        for i in 0..100 {
            let v: Vec<f64> = (0..8).map(|_| rng.gen::<f32>() as f64).collect();
            table.insert(format!("v{i}"), v).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.bin");
        write_features(&table, &p, FeatureFileFormat::Binary).unwrap();
        let back = ingest_external(&p, Some(8)).unwrap();
        assert_eq!(back.len(), 100);
        for (id, v) in &table.rows {
            assert_eq!(&back[id].values, v);
        }
    }
}

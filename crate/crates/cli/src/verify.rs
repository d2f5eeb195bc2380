//! Checksum and shape checks of the local data files against the registry.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use swarmclust::ingest::parse_records;
use swarmclust::{DatasetSpec, MissingPolicy, Registry};

use crate::error::{CliError, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Checksum {
    /// Matches the digest recorded for `source`.
    Verified {
        source: String,
    },
    Mismatch {
        actual: String,
    },
    /// The registry records no digest for this dataset.
    Unpinned {
        actual: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub name: String,
    pub path: PathBuf,
    /// `None` when the file is absent.
    pub checksum: Option<Checksum>,
    /// Shape deviations that still allow clustering, such as fewer rows.
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

impl Verification {
    pub fn is_missing(&self) -> bool {
        self.checksum.is_none()
    }

    pub fn is_ok(&self) -> bool {
        !self.is_missing() && self.errors.is_empty() && !matches!(self.checksum, Some(Checksum::Mismatch { .. }))
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let state = match &self.checksum {
            None => "MISSING".to_string(),
            Some(Checksum::Verified { source }) => format!("sha256 ok ({source})"),
            Some(Checksum::Mismatch { actual }) => format!("sha256 MISMATCH ({actual})"),
            Some(Checksum::Unpinned { actual }) => format!("sha256 unpinned ({actual})"),
        };
        write!(f, "{:<18} {:<40} {state}", self.name, self.path.display())?;
        for w in &self.warnings {
            write!(f, "\n    warning: {w}")?;
        }
        for e in &self.errors {
            write!(f, "\n    error: {e}")?;
        }
        Ok(())
    }
}

/// Compares a file's contents with the registry entry: digest, row count,
/// attribute count and class count.
pub fn verify_bytes(spec: &DatasetSpec, path: &Path, bytes: &[u8]) -> Verification {
    let actual = sha256_hex(bytes);
    let checksum = if spec.checksums.is_empty() {
        Checksum::Unpinned { actual }
    } else if let Some(c) = spec.checksums.iter().find(|c| c.sha256.eq_ignore_ascii_case(&actual)) {
        Checksum::Verified {
            source: c.source.clone(),
        }
    } else {
        Checksum::Mismatch { actual }
    };
    let mut v = Verification {
        name: spec.name.clone(),
        path: path.to_path_buf(),
        checksum: Some(checksum),
        warnings: Vec::new(),
        errors: Vec::new(),
    };
    let text = match std::str::from_utf8(bytes) {
        Ok(t) => t,
        Err(e) => {
            v.errors.push(format!("not UTF-8: {e}"));
            return v;
        }
    };
    let loaded = match parse_records(spec, text, &path.display().to_string(), MissingPolicy::DropRow) {
        Ok(l) => l,
        Err(e) => {
            v.errors.push(e.to_string());
            return v;
        }
    };
    if loaded.raw_points != spec.expected_points {
        let kind = if loaded.raw_points < spec.expected_points {
            "fewer"
        } else {
            "more"
        };
        v.warnings.push(format!(
            "{} rows, {kind} than the published {}",
            loaded.raw_points, spec.expected_points
        ));
    }
    if loaded.rows_with_missing > 0 {
        v.warnings.push(format!(
            "{} rows with missing values ({} complete rows)",
            loaded.rows_with_missing,
            loaded.effective_points()
        ));
    }
    if loaded.dataset.n_dims() != spec.effective_dims {
        v.errors.push(format!(
            "{} features, expected {}",
            loaded.dataset.n_dims(),
            spec.effective_dims
        ));
    }
    if loaded.class_names.len() != spec.expected_clusters {
        v.errors.push(format!(
            "{} classes, expected {}",
            loaded.class_names.len(),
            spec.expected_clusters
        ));
    }
    v
}

pub fn verify_dataset(spec: &DatasetSpec, data_dir: &Path) -> Result<Verification> {
    let path = spec.path_in(data_dir);
    match fs::read(&path) {
        Ok(bytes) => Ok(verify_bytes(spec, &path, &bytes)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Verification {
            name: spec.name.clone(),
            path,
            checksum: None,
            warnings: Vec::new(),
            errors: Vec::new(),
        }),
        Err(e) => Err(CliError::io(&path)(e)),
    }
}

pub fn verify_all(registry: &Registry, data_dir: &Path) -> Result<Vec<Verification>> {
    registry.datasets.iter().map(|s| verify_dataset(s, data_dir)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(checksums: &str) -> DatasetSpec {
        let text = format!(
            r#"
            [[dataset]]
            name = "toy"
            file = "toy.csv"
            label_column = 2
            expected_points = 4
            expected_dims = 2
            expected_clusters = 2
            effective_dims = 2
            {checksums}
            "#
        );
        Registry::from_toml(&text).unwrap().datasets.remove(0)
    }

    const TOY: &[u8] = b"0,0,a\n0,1,a\n5,5,b\n";

    #[test]
    fn digest_of_known_input() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn verified_unpinned_and_mismatch() {
        let digest = sha256_hex(TOY);
        let pinned = spec(&format!("checksums = [{{ source = \"test\", sha256 = \"{digest}\" }}]"));
        let v = verify_bytes(&pinned, Path::new("toy.csv"), TOY);
        assert_eq!(v.checksum, Some(Checksum::Verified { source: "test".into() }));
        assert!(v.is_ok());
        assert_eq!(v.warnings.len(), 1, "{:?}", v.warnings);
        assert!(v.warnings[0].contains("fewer"));

        let v = verify_bytes(&spec(""), Path::new("toy.csv"), TOY);
        assert!(matches!(v.checksum, Some(Checksum::Unpinned { .. })));

        let wrong = spec("checksums = [{ source = \"x\", sha256 = \"00\" }]");
        let v = verify_bytes(&wrong, Path::new("toy.csv"), TOY);
        assert!(matches!(v.checksum, Some(Checksum::Mismatch { .. })));
        assert!(!v.is_ok());
    }

    #[test]
    fn shape_errors() {
        let v = verify_bytes(&spec(""), Path::new("toy.csv"), b"0,0,a\n0,1,a\n5,5,a\n1,1,a\n");
        assert_eq!(v.errors, vec!["1 classes, expected 2".to_string()]);
        let v = verify_bytes(&spec(""), Path::new("toy.csv"), b"0,0,a\n0,?,b\n5,5,b\n1,1,a\n");
        assert!(v.warnings[0].contains("missing"));
        assert!(v.is_ok());
    }

    #[test]
    fn absent_file_reported_missing() {
        let dir = tempfile::tempdir().unwrap();
        let v = verify_dataset(&spec(""), dir.path()).unwrap();
        assert!(v.is_missing());
        assert!(!v.is_ok());
    }
}

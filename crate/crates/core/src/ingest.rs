//! Dataset loading from delimited text files, missing-value handling and
//! min-max normalization, plus the registry of benchmark datasets.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// The registry that ships with the repository (`datasets.toml`).
pub const BUILTIN_REGISTRY: &str = include_str!("../../../datasets.toml");

/// What to do with a row that has a missing feature value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    DropRow,
    #[default]
    ImputeFeatureMean,
}

impl fmt::Display for MissingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MissingPolicy::DropRow => "drop_row",
            MissingPolicy::ImputeFeatureMean => "impute_feature_mean",
        })
    }
}

impl FromStr for MissingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop_row" => Ok(MissingPolicy::DropRow),
            "impute_feature_mean" => Ok(MissingPolicy::ImputeFeatureMean),
            other => Err(Error::Registry(format!("unknown missing-value policy `{other}`"))),
        }
    }
}

/// Field separator of a dataset file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    #[default]
    Comma,
    Char(u8),
    /// Runs of spaces and tabs.
    Whitespace,
}

impl Serialize for Delimiter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Delimiter::Comma => s.serialize_str(","),
            Delimiter::Char(c) => s.serialize_str(&(*c as char).to_string()),
            Delimiter::Whitespace => s.serialize_str("whitespace"),
        }
    }
}

impl<'de> Deserialize<'de> for Delimiter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        match raw.as_str() {
            "," => Ok(Delimiter::Comma),
            "whitespace" => Ok(Delimiter::Whitespace),
            "\\t" | "\t" => Ok(Delimiter::Char(b'\t')),
            s if s.len() == 1 && s.is_ascii() => Ok(Delimiter::Char(s.as_bytes()[0])),
            s => Err(serde::de::Error::custom(format!("unsupported delimiter `{s}`"))),
        }
    }
}

fn default_missing_token() -> String {
    "?".to_string()
}

/// Where a dataset lives and how to read it. `expected_*` are the reference
/// shape (points, attributes, clusters) the dataset is published with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub file: PathBuf,
    #[serde(default)]
    pub delimiter: Delimiter,
    #[serde(default)]
    pub header: bool,
    pub label_column: usize,
    /// Empty means every column that is neither the label nor dropped.
    #[serde(default)]
    pub feature_columns: Vec<usize>,
    #[serde(default)]
    pub drop_columns: Vec<usize>,
    #[serde(default = "default_missing_token")]
    pub missing_token: String,
    /// Known class names in label order. When absent, classes are the sorted
    /// distinct label strings found in the file.
    #[serde(default)]
    pub classes: Option<Vec<String>>,
    pub expected_points: usize,
    pub expected_dims: usize,
    pub expected_clusters: usize,
    /// Number of features actually clustered on (differs from
    /// `expected_dims` when id or label columns are counted there).
    pub effective_dims: usize,
    /// Accepted SHA-256 digests of the data file, tagged by source.
    #[serde(default)]
    pub checksums: Vec<Checksum>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checksum {
    pub source: String,
    pub sha256: String,
}

impl DatasetSpec {
    pub fn path_in(&self, data_dir: &Path) -> PathBuf {
        data_dir.join(&self.file)
    }

    fn resolved_feature_columns(&self, n_columns: usize) -> Vec<usize> {
        if !self.feature_columns.is_empty() {
            return self.feature_columns.clone();
        }
        (0..n_columns)
            .filter(|c| *c != self.label_column && !self.drop_columns.contains(c))
            .collect()
    }
}

/// The named set of dataset specifications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    #[serde(rename = "dataset")]
    pub datasets: Vec<DatasetSpec>,
}

impl Registry {
    pub fn builtin() -> Self {
        Self::from_toml(BUILTIN_REGISTRY).expect("shipped registry parses")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let registry: Registry = toml::from_str(text).map_err(|e| Error::Registry(e.to_string()))?;
        let mut seen = BTreeSet::new();
        for spec in &registry.datasets {
            if !seen.insert(spec.name.as_str()) {
                return Err(Error::Registry(format!("duplicate dataset `{}`", spec.name)));
            }
        }
        Ok(registry)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        Self::from_toml(&text)
    }

    pub fn get(&self, name: &str) -> Option<&DatasetSpec> {
        self.datasets.iter().find(|d| d.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.datasets.iter().map(|d| d.name.as_str())
    }
}

/// A loaded dataset together with what happened while reading it.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub class_names: Vec<String>,
    pub policy: MissingPolicy,
    /// Data rows in the file.
    pub raw_points: usize,
    /// Rows with at least one missing feature.
    pub rows_with_missing: usize,
    pub imputed_cells: usize,
}

impl LoadedDataset {
    pub fn effective_points(&self) -> usize {
        self.dataset.n_points()
    }
}

fn split_records(text: &str, spec: &DatasetSpec, path: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut records = Vec::new();
    match spec.delimiter {
        Delimiter::Whitespace => {
            for (i, line) in text.lines().enumerate().skip(usize::from(spec.header)) {
                if line.trim().is_empty() {
                    continue;
                }
                records.push((i + 1, line.split_whitespace().map(str::to_string).collect()));
            }
        }
        Delimiter::Comma | Delimiter::Char(_) => {
            let delimiter = match spec.delimiter {
                Delimiter::Char(c) => c,
                _ => b',',
            };
            let mut reader = csv::ReaderBuilder::new()
                .delimiter(delimiter)
                .has_headers(spec.header)
                .flexible(true)
                .trim(csv::Trim::All)
                .from_reader(text.as_bytes());
            for record in reader.records() {
                let record = record.map_err(|e| Error::Parse {
                    path: path.to_string(),
                    line: e.position().map_or(0, |p| p.line() as usize),
                    message: e.to_string(),
                })?;
                let line = record.position().map_or(0, |p| p.line() as usize);
                if record.iter().all(str::is_empty) {
                    continue;
                }
                records.push((line, record.iter().map(str::to_string).collect()));
            }
        }
    }
    Ok(records)
}

/// Reads the dataset described by `spec` from `data_dir`, mapping labels to
/// contiguous integers and applying `policy` to missing feature values.
/// Features are returned un-normalized.
pub fn load_csv(spec: &DatasetSpec, data_dir: &Path, policy: MissingPolicy) -> Result<LoadedDataset> {
    let path = spec.path_in(data_dir);
    let text = fs::read_to_string(&path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.clone()),
        _ => Error::Io(e),
    })?;
    parse_records(spec, &text, &path.display().to_string(), policy)
}

/// Parses dataset text already in memory; `origin` names it in errors.
pub fn parse_records(spec: &DatasetSpec, text: &str, origin: &str, policy: MissingPolicy) -> Result<LoadedDataset> {
    let records = split_records(text, spec, origin)?;
    let Some((_, first)) = records.first() else {
        return Err(Error::EmptyDataset);
    };
    let n_columns = first.len();
    if spec.label_column >= n_columns {
        return Err(Error::Parse {
            path: origin.to_string(),
            line: records[0].0,
            message: format!(
                "label column {} out of range for {n_columns} columns",
                spec.label_column
            ),
        });
    }
    let feature_columns = spec.resolved_feature_columns(n_columns);
    if let Some(&bad) = feature_columns.iter().find(|&&c| c >= n_columns) {
        return Err(Error::Parse {
            path: origin.to_string(),
            line: records[0].0,
            message: format!("feature column {bad} out of range for {n_columns} columns"),
        });
    }

    let mut rows: Vec<Vec<Option<f64>>> = Vec::with_capacity(records.len());
    let mut raw_labels = Vec::with_capacity(records.len());
    for (line, fields) in &records {
        if fields.len() != n_columns {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: *line,
                message: format!("expected {n_columns} columns, found {}", fields.len()),
            });
        }
        let mut row = Vec::with_capacity(feature_columns.len());
        for &c in &feature_columns {
            let cell = fields[c].as_str();
            if cell.is_empty() || cell == spec.missing_token {
                row.push(None);
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                path: origin.to_string(),
                line: *line,
                message: format!("column {c}: cannot parse `{cell}` as a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    line: *line,
                    message: format!("column {c}: non-finite value `{cell}`"),
                });
            }
            row.push(Some(value));
        }
        let label = fields[spec.label_column].clone();
        if label.is_empty() || label == spec.missing_token {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: *line,
                message: "missing class label".into(),
            });
        }
        rows.push(row);
        raw_labels.push((*line, label));
    }

    let class_names: Vec<String> = match &spec.classes {
        Some(classes) => classes.clone(),
        None => raw_labels
            .iter()
            .map(|(_, l)| l.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    let mut labels = Vec::with_capacity(raw_labels.len());
    for (line, label) in &raw_labels {
        let index = class_names
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                line: *line,
                message: format!("unknown class label `{label}`"),
            })?;
        labels.push(index);
    }

    let raw_points = rows.len();
    let rows_with_missing = rows.iter().filter(|r| r.iter().any(Option::is_none)).count();
    let n_dims = feature_columns.len();
    let mut imputed_cells = 0;
    let mut features = Vec::with_capacity(raw_points * n_dims);
    let mut kept_labels = Vec::with_capacity(raw_points);

    match policy {
        MissingPolicy::DropRow => {
            for (row, label) in rows.iter().zip(&labels) {
                if row.iter().all(Option::is_some) {
                    features.extend(row.iter().map(|v| v.unwrap()));
                    kept_labels.push(*label);
                }
            }
        }
        MissingPolicy::ImputeFeatureMean => {
            let means: Vec<f64> = (0..n_dims)
                .map(|d| {
                    let (sum, count) = rows
                        .iter()
                        .filter_map(|r| r[d])
                        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
                    if count == 0 {
                        0.0
                    } else {
                        sum / count as f64
                    }
                })
                .collect();
            for row in &rows {
                for (d, v) in row.iter().enumerate() {
                    features.push(v.unwrap_or_else(|| {
                        imputed_cells += 1;
                        means[d]
                    }));
                }
            }
            kept_labels = labels;
        }
    }

    let dataset = Dataset::new(spec.name.clone(), features, n_dims, Some(kept_labels))?;
    Ok(LoadedDataset {
        dataset,
        class_names,
        policy,
        raw_points,
        rows_with_missing,
        imputed_cells,
    })
}

/// Maps every feature linearly onto [0, 1] using its observed range.
/// Constant features map to 0.
pub fn normalize_minmax(data: &Dataset) -> Dataset {
    let bounds = data.bounds();
    let n_dims = data.n_dims();
    let mut features = data.features().to_vec();
    for p in features.chunks_exact_mut(n_dims) {
        for (d, v) in p.iter_mut().enumerate() {
            let span = bounds.upper[d] - bounds.lower[d];
            *v = if span > 0.0 {
                ((*v - bounds.lower[d]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
    }
    data.with_features(features)
        .expect("normalization preserves dataset invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(text_label: usize) -> DatasetSpec {
        DatasetSpec {
            name: "fixture".into(),
            file: "fixture.csv".into(),
            delimiter: Delimiter::Comma,
            header: false,
            label_column: text_label,
            feature_columns: vec![],
            drop_columns: vec![],
            missing_token: "?".into(),
            classes: None,
            expected_points: 3,
            expected_dims: 2,
            expected_clusters: 2,
            effective_dims: 2,
            checksums: vec![],
        }
    }

    const FIXTURE: &str = "1.0,2.0,a\n?,4.0,b\n5.0,6.0,a\n";

    #[test]
    fn drop_row_removes_missing() {
        let loaded = parse_records(&spec(2), FIXTURE, "fixture", MissingPolicy::DropRow).unwrap();
        assert_eq!(loaded.raw_points, 3);
        assert_eq!(loaded.effective_points(), 2);
        assert_eq!(loaded.rows_with_missing, 1);
        assert_eq!(loaded.dataset.features(), &[1.0, 2.0, 5.0, 6.0]);
        assert_eq!(loaded.dataset.labels().unwrap(), &[0, 0]);
    }

    #[test]
    fn impute_uses_column_mean() {
        let loaded = parse_records(&spec(2), FIXTURE, "fixture", MissingPolicy::ImputeFeatureMean).unwrap();
        assert_eq!(loaded.effective_points(), 3);
        assert_eq!(loaded.imputed_cells, 1);
        assert_eq!(loaded.dataset.point(1), &[3.0, 4.0]);
        assert_eq!(loaded.dataset.labels().unwrap(), &[0, 1, 0]);
        assert_eq!(loaded.class_names, vec!["a", "b"]);
    }

    #[test]
    fn parse_errors_are_descriptive() {
        let err = parse_records(&spec(2), "1,2,a\n1,2\n", "f.csv", MissingPolicy::DropRow).unwrap_err();
        assert!(err.to_string().contains("expected 3 columns"), "{err}");

        let err = parse_records(&spec(2), "1,x,a\n1,2,b\n", "f.csv", MissingPolicy::DropRow).unwrap_err();
        assert!(err.to_string().contains("cannot parse `x`"), "{err}");

        let mut known = spec(2);
        known.classes = Some(vec!["a".into()]);
        let err = parse_records(&known, "1,2,a\n1,2,z\n", "f.csv", MissingPolicy::DropRow).unwrap_err();
        assert!(err.to_string().contains("unknown class label `z`"), "{err}");

        let err = parse_records(&spec(5), "1,2,a\n", "f.csv", MissingPolicy::DropRow).unwrap_err();
        assert!(err.to_string().contains("label column 5"), "{err}");
    }

    #[test]
    fn whitespace_delimiter_tolerates_runs() {
        let mut s = spec(2);
        s.delimiter = Delimiter::Whitespace;
        let loaded = parse_records(&s, "1.0\t\t2.0  1\n3.0 4.0\t2\n", "ws", MissingPolicy::DropRow).unwrap();
        assert_eq!(loaded.dataset.features(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn dropped_columns_and_header() {
        let mut s = spec(3);
        s.drop_columns = vec![0];
        s.header = true;
        let loaded = parse_records(&s, "id,x,y,c\n17,1,2,a\n18,3,4,b\n", "h", MissingPolicy::DropRow).unwrap();
        assert_eq!(loaded.dataset.n_dims(), 2);
        assert_eq!(loaded.dataset.features(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn missing_file_is_reported() {
        let err = load_csv(&spec(2), Path::new("/nonexistent-dir"), MissingPolicy::DropRow).unwrap_err();
        assert!(matches!(err, Error::MissingFile(_)));
    }

    #[test]
    fn normalize_examples() {
        let ds = Dataset::new("n", vec![2.0, 7.0, 4.0, 7.0, 6.0, 7.0], 2, None).unwrap();
        let norm = normalize_minmax(&ds);
        assert_eq!(norm.features(), &[0.0, 0.0, 0.5, 0.0, 1.0, 0.0]);
        let again = normalize_minmax(&norm);
        assert_eq!(again, norm);
    }

    #[test]
    fn builtin_registry_matches_reference_shapes() {
        let registry = Registry::builtin();
        let shape = |name: &str| {
            let s = registry.get(name).unwrap();
            (s.expected_points, s.expected_dims, s.expected_clusters)
        };
        assert_eq!(shape("iris"), (150, 4, 3));
        assert_eq!(shape("breast_cancer"), (699, 10, 2));
        assert_eq!(shape("seeds"), (210, 7, 3));
        assert_eq!(shape("mammographic_mass"), (961, 6, 2));
        assert_eq!(shape("sonar"), (208, 60, 2));
    }

    #[test]
    fn missing_policy_round_trips_through_strings() {
        for p in [MissingPolicy::DropRow, MissingPolicy::ImputeFeatureMean] {
            assert_eq!(p.to_string().parse::<MissingPolicy>().unwrap(), p);
        }
        assert!("zero_fill".parse::<MissingPolicy>().is_err());
    }

    proptest! {
        #[test]
        fn normalized_features_in_unit_range(values in prop::collection::vec(-1e3f64..1e3, 6..60)) {
            let n = values.len() / 3 * 3;
            let ds = Dataset::new("p", values[..n].to_vec(), 3, None).unwrap();
            let norm = normalize_minmax(&ds);
            prop_assert!(norm.features().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}

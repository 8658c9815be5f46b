use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::example::{Example, Label};

/// Labeled examples sharing one feature dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    pub name: String,
    pub examples: Vec<Example>,
    pub d: usize,
    /// Raw label values mapped to `-1` and `+1`, in that order.
    pub classes: [String; 2],
}

impl Dataset {
    pub fn new(name: impl Into<String>, examples: Vec<Example>) -> Result<Self> {
        let d = examples
            .first()
            .ok_or_else(|| Error::input("dataset has no examples"))?
            .dim();
        for (i, e) in examples.iter().enumerate() {
            if e.dim() != d {
                return Err(Error::input(format!(
                    "example {i} has {} features, expected {d}",
                    e.dim()
                )));
            }
            if e.label.is_none() {
                return Err(Error::input(format!("example {i} has no label")));
            }
        }
        Ok(Dataset {
            name: name.into(),
            examples,
            d,
            classes: ["-1".into(), "+1".into()],
        })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }
}

/// Reads a numeric CSV with one example per row. The label column must hold
/// exactly two distinct values; the smaller maps to `-1` (numeric order when
/// both parse as numbers, lexicographic otherwise).
pub fn load_csv(path: impl AsRef<Path>, label_col: usize, has_header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_reader(file);

    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut rows: Vec<(Vec<f64>, String)> = Vec::new();
    let mut width = None;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() <= label_col {
            return Err(parse_err(
                line,
                format!("label column {label_col} missing (row has {} fields)", record.len()),
            ));
        }
        if *width.get_or_insert(record.len()) != record.len() {
            return Err(parse_err(line, "inconsistent number of fields".into()));
        }
        let mut features = Vec::with_capacity(record.len() - 1);
        for (c, field) in record.iter().enumerate() {
            if c == label_col {
                continue;
            }
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line, format!("column {c}: '{field}' is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("column {c}: non-finite value")));
            }
            features.push(v);
        }
        if features.is_empty() {
            return Err(parse_err(line, "row has no feature columns".into()));
        }
        rows.push((features, record[label_col].to_string()));
    }

    let classes: BTreeSet<&str> = rows.iter().map(|(_, l)| l.as_str()).collect();
    if classes.len() != 2 {
        return Err(Error::input(format!(
            "{}: label column must hold exactly two classes, found {}",
            path.display(),
            classes.len()
        )));
    }
    let mut classes: Vec<String> = classes.into_iter().map(str::to_string).collect();
    classes.sort_by(|a, b| compare_labels(a, b));
    let negative = classes[0].clone();

    let examples = rows
        .into_iter()
        .map(|(f, l)| {
            let y = if l == negative { Label::Negative } else { Label::Positive };
            Example::labeled(f, y)
        })
        .collect();
    let name = path
        .file_stem()
        .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
    let mut ds = Dataset::new(name, examples)?;
    ds.classes = [classes[0].clone(), classes[1].clone()];
    Ok(ds)
}

fn compare_labels(a: &str, b: &str) -> Ordering {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    }
}

/// Shuffled training stream and held-out test set.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<Example>,
    pub test: Vec<Example>,
}

/// Seeded shuffle of `ds`; the first `round(split * n)` shuffled examples form
/// the training stream (in shuffled order), the rest the test set.
pub fn split_and_stream(ds: &Dataset, split: f64, seed: u64) -> Result<Split> {
    if !(split > 0.0 && split < 1.0) {
        return Err(Error::input(format!("split fraction must lie in (0, 1), got {split}")));
    }
    let n = ds.len();
    let n_train = (split * n as f64).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::input(format!(
            "split {split} of {n} examples leaves an empty train or test set"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pick = |idx: &[usize]| idx.iter().map(|&i| ds.examples[i].clone()).collect();
    Ok(Split {
        train: pick(&order[..n_train]),
        test: pick(&order[n_train..]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn two_row_file_maps_by_sorted_label() {
        let f = write("0.1,A\n0.2,B\n");
        let ds = load_csv(f.path(), 1, false).unwrap();
        let labels: Vec<_> = ds.examples.iter().map(|e| e.label.unwrap()).collect();
        assert_eq!(labels, vec![Label::Negative, Label::Positive]);
        assert_eq!(ds.classes, ["A".to_string(), "B".to_string()]);
        assert_eq!(ds.d, 1);
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let f = write("1,10\n2,9\n3,10\n");
        let ds = load_csv(f.path(), 1, false).unwrap();
        assert_eq!(ds.classes, ["9".to_string(), "10".to_string()]);
        assert_eq!(ds.examples[1].label, Some(Label::Negative));
    }

    #[test]
    fn header_is_skipped() {
        let f = write("a,b,y\n1,2,x\n3,4,z\n5,6,x\n");
        let ds = load_csv(f.path(), 2, true).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.examples[0].features, vec![1.0, 2.0]);
        let label_first = write("y,a\nx,1\nz,2\n");
        let ds = load_csv(label_first.path(), 0, true).unwrap();
        assert_eq!(ds.examples[1].features, vec![2.0]);
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = load_csv("/definitely/not/here.csv", 0, false).unwrap_err();
        assert!(err.to_string().contains("/definitely/not/here.csv"));
    }

    #[test]
    fn bad_rows_report_line_numbers() {
        let f = write("1,a\n2,b\nfoo,a\n");
        match load_csv(f.path(), 1, false).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("foo"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let f = write("1,a\n2,b,3\n");
        assert!(matches!(load_csv(f.path(), 1, false), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn class_count_must_be_two() {
        let f = write("1,a\n2,b\n3,c\n");
        assert!(matches!(load_csv(f.path(), 1, false), Err(Error::Input(_))));
        let f = write("1,a\n2,a\n");
        assert!(matches!(load_csv(f.path(), 1, false), Err(Error::Input(_))));
    }

    fn ten_rows() -> Dataset {
        let ex = (0..10)
            .map(|i| Example::labeled(vec![i as f64], if i % 2 == 0 { Label::Positive } else { Label::Negative }))
            .collect();
        Dataset::new("ten", ex).unwrap()
    }

    #[test]
    fn split_sizes_and_determinism() {
        let ds = ten_rows();
        let a = split_and_stream(&ds, 0.5, 3).unwrap();
        assert_eq!((a.train.len(), a.test.len()), (5, 5));
        assert_eq!(a, split_and_stream(&ds, 0.5, 3).unwrap());
        let b = split_and_stream(&ds, 0.5, 4).unwrap();
        assert_ne!(a.train, b.train);
        let mut all: Vec<f64> = a.train.iter().chain(&a.test).map(|e| e.features[0]).collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..10).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn degenerate_splits_fail() {
        let ds = ten_rows();
        assert!(split_and_stream(&ds, 0.0, 1).is_err());
        assert!(split_and_stream(&ds, 1.0, 1).is_err());
        assert!(split_and_stream(&ds, 0.01, 1).is_err());
        assert!(split_and_stream(&ds, 0.99, 1).is_err());
    }
}

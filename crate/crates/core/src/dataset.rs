//! Partially labeled datasets and their CSV representation.
//!
//! The CSV header is `x1,...,xd,bag[,y]`. The `bag` column is a
//! `;`-separated list of 1-based labels and `y` (optional) holds the ground
//! truth used for evaluation.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::labels::{Bag, Label, LabelSpace};

#[derive(Clone, Debug, PartialEq)]
pub struct PartialExample {
    pub x: Vec<f64>,
    pub bag: Bag,
    pub truth: Option<Label>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialDataset {
    examples: Vec<PartialExample>,
    label_space: LabelSpace,
    dim: usize,
}

impl PartialDataset {
    pub fn new(examples: Vec<PartialExample>, label_space: LabelSpace) -> Result<Self> {
        let first = examples.first().ok_or(Error::Empty("dataset"))?;
        let dim = first.x.len();
        if dim == 0 {
            return Err(Error::Empty("feature vector"));
        }
        let full = label_space.full_bag();
        for ex in &examples {
            if ex.x.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: ex.x.len() });
            }
            if ex.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            if ex.bag.is_empty() {
                return Err(Error::EmptyBag);
            }
            if !ex.bag.is_subset(full) {
                Bag::from_mask(ex.bag.mask(), label_space)?;
            }
            if let Some(y) = ex.truth {
                label_space.check(y)?;
            }
        }
        Ok(Self { examples, label_space, dim })
    }

    pub fn examples(&self) -> &[PartialExample] {
        &self.examples
    }

    pub fn label_space(&self) -> LabelSpace {
        self.label_space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn bags(&self) -> impl Iterator<Item = Bag> + '_ {
        self.examples.iter().map(|e| e.bag)
    }

    pub fn features(&self) -> Vec<Vec<f64>> {
        self.examples.iter().map(|e| e.x.clone()).collect()
    }

    pub fn has_truths(&self) -> bool {
        self.examples.iter().all(|e| e.truth.is_some())
    }

    /// Ground-truth labels, failing on the first example without one.
    pub fn truths(&self) -> Result<Vec<Label>> {
        self.examples
            .iter()
            .enumerate()
            .map(|(i, e)| e.truth.ok_or(Error::MissingTruth(i)))
            .collect()
    }

    /// Subset by example index, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let examples = indices
            .iter()
            .map(|&i| {
                self.examples
                    .get(i)
                    .cloned()
                    .ok_or(Error::IndexOutOfRange { index: i, len: self.len() })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(examples, self.label_space)
    }

    /// Same bags and truths, new feature vectors.
    pub fn with_features(&self, features: Vec<Vec<f64>>) -> Result<Self> {
        if features.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: features.len() });
        }
        let examples = self
            .examples
            .iter()
            .zip(features)
            .map(|(e, x)| PartialExample { x, bag: e.bag, truth: e.truth })
            .collect();
        Self::new(examples, self.label_space)
    }

    /// Reads the CSV format. When `label_space` is `None` the number of labels
    /// is the largest label seen (at least 2).
    pub fn read_csv<R: Read>(reader: R, label_space: Option<LabelSpace>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let bag_col = headers
            .iter()
            .position(|h| h == "bag")
            .ok_or_else(|| Error::Parse { line: 1, msg: "missing `bag` column".into() })?;
        for (i, h) in headers.iter().take(bag_col).enumerate() {
            if h != format!("x{}", i + 1) {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected column `x{}`, found `{h}`", i + 1),
                });
            }
        }
        let has_truth = match headers.len() - bag_col {
            1 => false,
            2 if &headers[bag_col + 1] == "y" => true,
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "expected header `x1,...,xd,bag[,y]`".into(),
                })
            }
        };
        let dim = bag_col;

        // Bags are parsed against a 64-label space first, then narrowed.
        let wide = label_space.unwrap_or(LabelSpace::new(LabelSpace::MAX_LABELS)?);
        let mut examples = Vec::new();
        let mut max_label = 0;
        for (row, record) in rdr.records().enumerate() {
            let line = row + 2;
            let record = record?;
            let parse_err = |msg: String| Error::Parse { line, msg };
            if record.len() != headers.len() {
                return Err(parse_err(format!("expected {} fields, got {}", headers.len(), record.len())));
            }
            let x = (0..dim)
                .map(|j| {
                    record[j]
                        .parse::<f64>()
                        .map_err(|_| parse_err(format!("bad feature `{}`", &record[j])))
                })
                .collect::<Result<Vec<_>>>()?;
            let bag = Bag::parse(&record[bag_col], wide).map_err(|e| parse_err(e.to_string()))?;
            max_label = max_label.max(bag.labels().last().unwrap_or(0));
            let truth = if has_truth {
                let y: Label = record[bag_col + 1]
                    .parse()
                    .map_err(|_| parse_err(format!("bad label `{}`", &record[bag_col + 1])))?;
                wide.check(y).map_err(|e| parse_err(e.to_string()))?;
                max_label = max_label.max(y);
                Some(y)
            } else {
                None
            };
            examples.push(PartialExample { x, bag, truth });
        }
        let space = match label_space {
            Some(s) => s,
            None => LabelSpace::new(max_label.max(2))?,
        };
        Self::new(examples, space)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P, label_space: Option<LabelSpace>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file), label_space)
    }

    /// Writes the CSV format; the `y` column is emitted only when every
    /// example has a truth.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let with_truth = self.has_truths();
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=self.dim).map(|j| format!("x{j}")).collect();
        header.push("bag".into());
        if with_truth {
            header.push("y".into());
        }
        wtr.write_record(&header)?;
        for ex in &self.examples {
            let mut rec: Vec<String> = ex.x.iter().map(|v| v.to_string()).collect();
            rec.push(ex.bag.to_string());
            if with_truth {
                rec.push(ex.truth.unwrap_or_default().to_string());
            }
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

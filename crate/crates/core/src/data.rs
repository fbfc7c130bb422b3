//! Samples, datasets, and their CSV representation.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// A feature vector in `R^d` with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("point must have at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Squared Euclidean distance between coordinate slices of equal length.
///
/// Squared distances order points exactly like distances do, and avoid the
/// sqrt in the hot sorting paths.
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(ai, bi)| (ai - bi) * (ai - bi)).sum()
}

/// Euclidean distance between two points of equal dimension.
pub fn euclidean_distance(a: &Point, b: &Point) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(squared_distance(a.coords(), b.coords()).sqrt())
}

/// One observation: feature vector and real response.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Point,
    pub y: f64,
}

impl Sample {
    pub fn new(x: Point, y: f64) -> Result<Self> {
        if !y.is_finite() {
            return Err(Error::invalid("response must be finite"));
        }
        Ok(Sample { x, y })
    }
}

/// An ordered, immutable collection of samples sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    d: usize,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::invalid("dataset must contain at least one sample"));
        };
        let d = first.x.dim();
        if samples.iter().any(|s| s.x.dim() != d) {
            return Err(Error::invalid("all samples must share the same dimension"));
        }
        Ok(Dataset { samples, d })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Replace the sample at `index`, preserving the dataset dimension.
    pub fn replace(&mut self, index: usize, sample: Sample) -> Result<()> {
        if index >= self.samples.len() {
            return Err(Error::invalid(format!("index {index} out of range")));
        }
        if sample.x.dim() != self.d {
            return Err(Error::invalid("replacement sample has wrong dimension"));
        }
        self.samples[index] = sample;
        Ok(())
    }

    /// Read `x1,...,xd,y` rows. The header fixes the dimension.
    pub fn read_csv<R: Read>(reader: R, path: &str) -> Result<Self> {
        let reader = BufReader::new(reader);
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            path: path.to_string(),
            line: 1,
            msg: "empty file".to_string(),
        })?;
        let header = header?;
        let columns: Vec<&str> = header.trim().split(',').collect();
        if columns.len() < 2 || columns.last() != Some(&"y") {
            return Err(Error::Parse {
                path: path.to_string(),
                line: 1,
                msg: format!("expected header x1,...,xd,y, got {header:?}"),
            });
        }
        let d = columns.len() - 1;
        let mut samples = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != d + 1 {
                return Err(Error::Parse {
                    path: path.to_string(),
                    line: line_no,
                    msg: format!("expected {} fields, got {}", d + 1, fields.len()),
                });
            }
            let mut values = Vec::with_capacity(d + 1);
            for field in &fields {
                let v: f64 = field.trim().parse().map_err(|e| Error::Parse {
                    path: path.to_string(),
                    line: line_no,
                    msg: format!("bad number {field:?}: {e}"),
                })?;
                values.push(v);
            }
            let y = values.pop().expect("at least one field");
            let sample = Sample::new(Point::new(values)?, y)?;
            samples.push(sample);
        }
        Dataset::new(samples)
    }

    pub fn read_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(file, &path.display().to_string())
    }

    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        let header: Vec<String> = (1..=self.d)
            .map(|i| format!("x{i}"))
            .chain(std::iter::once("y".to_string()))
            .collect();
        writeln!(writer, "{}", header.join(","))?;
        for s in &self.samples {
            let row: Vec<String> =
                s.x.coords()
                    .iter()
                    .chain(std::iter::once(&s.y))
                    .map(|v| fmt_float17(*v))
                    .collect();
            writeln!(writer, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// 17 significant digits: enough for a lossless f64 round trip.
pub fn fmt_float17(v: f64) -> String {
    format!("{v:.16e}")
}

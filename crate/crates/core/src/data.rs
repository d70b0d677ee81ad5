//! Labeled datasets: synthetic Gaussian-mixture generation and CSV I/O.
//!
//! The on-disk format is a plain CSV with header `x1,...,xd,y`, one sample
//! per row, labels written literally as `-1` / `1`, LF line endings, and
//! floats in Rust's shortest round-trip decimal encoding.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::truncation::Sign;

/// A labeled sample: feature vector and a +/-1 label.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: Sign,
}

/// A collection of samples of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    d: usize,
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            samples: Vec::new(),
        }
    }

    pub fn push(&mut self, x: Vec<f64>, y: Sign) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                actual: x.len(),
            });
        }
        if x.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidNumber("in sample"));
        }
        self.samples.push(Sample { x, y });
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter()
    }

    /// Fraction of samples labeled -1.
    pub fn minus_fraction(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let m = self.samples.iter().filter(|s| s.y == Sign::Minus).count();
        m as f64 / self.samples.len() as f64
    }

    /// Copy with a constant-1 coordinate appended to every sample.
    pub fn with_bias_column(&self) -> Dataset {
        let mut out = Dataset::new(self.d + 1);
        for s in &self.samples {
            let mut x = s.x.clone();
            x.push(1.0);
            out.samples.push(Sample { x, y: s.y });
        }
        out
    }
}

/// Gaussian mixture: y uniform on {-1, +1}, x = y * mu + sigma^(1/2) ⊙ g.
#[derive(Debug, Clone)]
pub struct GaussianMixtureConfig {
    pub mu: Vec<f64>,
    pub sigma_diag: Vec<f64>,
    pub n: usize,
    pub seed: u64,
}

impl GaussianMixtureConfig {
    fn validate(&self) -> Result<()> {
        if self.sigma_diag.len() != self.mu.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mu.len(),
                actual: self.sigma_diag.len(),
            });
        }
        if self.sigma_diag.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InvalidConfig(
                "sigma_diag entries must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Draw a dataset from the mixture using the seeded generator.
pub fn sample_mixture(cfg: &GaussianMixtureConfig) -> Result<Dataset> {
    cfg.validate()?;
    let d = cfg.mu.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Dataset::new(d);
    let sd: Vec<f64> = cfg.sigma_diag.iter().map(|s| s.sqrt()).collect();
    for _ in 0..cfg.n {
        let y = if rng.random::<bool>() {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let ys = y.as_i8() as f64;
        let x: Vec<f64> = (0..d)
            .map(|j| {
                let g: f64 = StandardNormal.sample(&mut rng);
                ys * cfg.mu[j] + sd[j] * g
            })
            .collect();
        out.push(x, y)?;
    }
    Ok(out)
}

/// Write a dataset as CSV; see the module docs for the exact format.
pub fn write_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_dataset_to(dataset, &mut w)
}

pub fn write_dataset_to(dataset: &Dataset, w: &mut impl Write) -> Result<()> {
    for j in 0..dataset.d {
        write!(w, "x{},", j + 1)?;
    }
    writeln!(w, "y")?;
    for s in &dataset.samples {
        for v in &s.x {
            write!(w, "{v},")?;
        }
        writeln!(w, "{}", s.y.as_i8())?;
    }
    w.flush()?;
    Ok(())
}

/// Read a dataset written by [`write_dataset`]. Errors carry the 1-based
/// row number (the header is row 1).
pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let f = BufReader::new(File::open(path)?);
    read_dataset_from(f)
}

pub fn read_dataset_from(r: impl BufRead) -> Result<Dataset> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or(Error::DataFormat {
            row: 1,
            message: "missing header".into(),
        })?
        .map_err(Error::Io)?;
    let cols: Vec<&str> = header.trim_end_matches('\r').split(',').collect();
    if cols.len() < 2 || cols[cols.len() - 1] != "y" {
        return Err(Error::DataFormat {
            row: 1,
            message: "header must be x1,...,xd,y".into(),
        });
    }
    let d = cols.len() - 1;
    for (j, c) in cols[..d].iter().enumerate() {
        if *c != format!("x{}", j + 1) {
            return Err(Error::DataFormat {
                row: 1,
                message: format!("expected column x{}, found {c:?}", j + 1),
            });
        }
    }
    let mut out = Dataset::new(d);
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let line = line.map_err(Error::Io)?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(Error::DataFormat {
                row,
                message: format!("expected {} fields, found {}", d + 1, fields.len()),
            });
        }
        let y = match fields[d] {
            "1" => Sign::Plus,
            "-1" => Sign::Minus,
            other => {
                return Err(Error::DataFormat {
                    row,
                    message: format!("label must be -1 or 1, found {other:?}"),
                })
            }
        };
        let mut x = Vec::with_capacity(d);
        for (j, f) in fields[..d].iter().enumerate() {
            let v: f64 = f.parse().map_err(|_| Error::DataFormat {
                row,
                message: format!("bad number {f:?} in column x{}", j + 1),
            })?;
            if v.is_nan() {
                return Err(Error::DataFormat {
                    row,
                    message: format!("NaN in column x{}", j + 1),
                });
            }
            x.push(v);
        }
        out.push(x, y)?;
    }
    Ok(out)
}

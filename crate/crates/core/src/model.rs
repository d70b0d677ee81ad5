//! Trained-model serialization: JSON `{d, k, w, bias}`.
//!
//! `d` is the classifier's operating dimension, i.e. `w.len()`. When
//! `bias` is set, the last coordinate of `w` multiplies an implicit
//! constant-1 feature, and datasets fed to the model carry `d - 1`
//! feature columns.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::TruncationConfig;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::truncation::WeightVector;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Model {
    pub d: usize,
    pub k: usize,
    pub w: Vec<f64>,
    pub bias: bool,
}

impl Model {
    pub fn new(w: &WeightVector, cfg: &TruncationConfig, bias: bool) -> Result<Self> {
        cfg.check_dim(w.dim())?;
        Ok(Self {
            d: cfg.d(),
            k: cfg.k(),
            w: w.as_slice().to_vec(),
            bias,
        })
    }

    pub fn config(&self) -> Result<TruncationConfig> {
        TruncationConfig::new(self.d, self.k)
    }

    pub fn weights(&self) -> Result<WeightVector> {
        WeightVector::new(self.w.clone())
    }

    /// The dataset dimension this model expects (before any bias column).
    pub fn feature_dim(&self) -> usize {
        if self.bias {
            self.d - 1
        } else {
            self.d
        }
    }

    /// Append the bias column when the model was trained with one.
    pub fn prepare(&self, dataset: &Dataset) -> Result<Dataset> {
        if dataset.d() != self.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim(),
                actual: dataset.d(),
            });
        }
        Ok(if self.bias {
            dataset.with_bias_column()
        } else {
            dataset.clone()
        })
    }

    fn validate(&self) -> Result<()> {
        if self.w.len() != self.d {
            return Err(Error::InvalidConfig(format!(
                "model d = {} does not match w length {}",
                self.d,
                self.w.len()
            )));
        }
        if self.w.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidNumber("in model weights"));
        }
        self.config().map(|_| ())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Model> {
        let model: Model = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        model.validate()?;
        Ok(model)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        self.validate()?;
        let mut f = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut f, self)?;
        writeln!(f)?;
        Ok(())
    }
}

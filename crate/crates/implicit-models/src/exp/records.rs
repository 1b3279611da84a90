//! Result rows shared by every experiment: one record per
//! (method, training size, repetition).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Unregularized conditional likelihood.
    Cl,
    ClWeakReg,
    ClStrongReg,
    /// Pixel-wise independent random forest.
    Rf,
    /// Conditional-likelihood-trained CRF on top of the forest.
    ClCrf,
    /// Implicit model.
    Im,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Cl => "CL",
            Method::ClWeakReg => "CL-weak-reg",
            Method::ClStrongReg => "CL-strong-reg",
            Method::Rf => "RF",
            Method::ClCrf => "CL-CRF",
            Method::Im => "IM",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "CL" => Method::Cl,
            "CL-weak-reg" => Method::ClWeakReg,
            "CL-strong-reg" => Method::ClStrongReg,
            "RF" => Method::Rf,
            "CL-CRF" => Method::ClCrf,
            "IM" => Method::Im,
            other => return Err(Error::Parse(format!("unknown method {other:?}"))),
        })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One experiment cell result. `risk_diff` is always the absolute difference
/// between training and test error.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub method: Method,
    pub train_size: usize,
    pub repetition: usize,
    pub train_error: f64,
    pub test_error: f64,
    pub risk_diff: f64,
    pub seed: u64,
    pub wall_time: f64,
}

impl ExperimentRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        experiment: impl Into<String>,
        method: Method,
        train_size: usize,
        repetition: usize,
        train_error: f64,
        test_error: f64,
        seed: u64,
        wall_time: f64,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            method,
            train_size,
            repetition,
            train_error,
            test_error,
            risk_diff: (train_error - test_error).abs(),
            seed,
            wall_time,
        }
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean of one record field over a (method, size) cell.
pub fn cell_values(
    records: &[ExperimentRecord],
    method: Method,
    train_size: usize,
    field: impl Fn(&ExperimentRecord) -> f64,
) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.method == method && r.train_size == train_size)
        .map(field)
        .collect()
}

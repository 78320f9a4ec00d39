use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What the values in a [`SpectrumTable`] measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Energy,
    Theta,
}

/// How a level was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    AiryZero,
    NaiveBohrSommerfeld,
    VorosEqc,
    Shooting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub value: f64,
    pub estimator: Estimator,
    pub bracket_width: Option<f64>,
}

/// Ordered list of levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub units: Units,
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    /// Builds a table, checking that values increase strictly with `n`.
    pub fn new(units: Units, rows: Vec<SpectrumRow>) -> Result<Self> {
        for (k, pair) in rows.windows(2).enumerate() {
            if !(pair[1].value > pair[0].value) {
                return Err(Error::InvalidInput(format!(
                    "spectrum values not increasing at row {}",
                    k + 1
                )));
            }
        }
        Ok(Self { units, rows })
    }

    pub fn from_values(
        units: Units,
        estimator: Estimator,
        values: impl IntoIterator<Item = f64>,
    ) -> Result<Self> {
        let rows = values
            .into_iter()
            .enumerate()
            .map(|(n, value)| SpectrumRow {
                n,
                value,
                estimator,
                bracket_width: None,
            })
            .collect();
        Self::new(units, rows)
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.rows.get(n).map(|r| r.value)
    }
}

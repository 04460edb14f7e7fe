//! One (aspect, score kind, ticker) result and its CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::series::ScoreKind;

/// Reason code for a `u` that was computed but whose denominator `H(y)` is unusable.
pub const DENOMINATOR_NEAR_ZERO: &str = "DenominatorNearZero";
/// Reason code for a `u` computed from samples with floored zero neighbour
/// distances (tied values). A single tie shifts the estimate by a large
/// constant, so such `u` values are reported but not marked valid.
pub const TIED_SAMPLE: &str = "TiedSample";

/// Statistics for one cell. A missing statistic is `None` and carries a
/// reason code in the matching `*_reason` column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceCell {
    pub aspect: String,
    pub kind: ScoreKind,
    pub ticker: String,
    /// Lag-aligned (sentiment, price) pairs used by r and U.
    pub n: usize,
    pub r: Option<f64>,
    pub r_significant: Option<bool>,
    pub r_reason: Option<String>,
    pub granger_f: Option<f64>,
    pub granger_p: Option<f64>,
    pub granger_causal: Option<bool>,
    pub granger_n: Option<usize>,
    pub granger_perfect_fit: Option<bool>,
    pub granger_reason: Option<String>,
    pub u: Option<f64>,
    pub u_valid: Option<bool>,
    /// `H(y) − H(y|x)` in nats.
    pub mutual_information: Option<f64>,
    pub h_y: Option<f64>,
    /// Zero neighbour distances that had to be floored; large counts mean ties dominate `u`.
    pub u_floored: Option<usize>,
    pub u_reason: Option<String>,
}

impl DependenceCell {
    pub fn empty(aspect: &str, kind: ScoreKind, ticker: &str) -> Self {
        DependenceCell {
            aspect: aspect.to_string(),
            kind,
            ticker: ticker.to_string(),
            n: 0,
            r: None,
            r_significant: None,
            r_reason: None,
            granger_f: None,
            granger_p: None,
            granger_causal: None,
            granger_n: None,
            granger_perfect_fit: None,
            granger_reason: None,
            u: None,
            u_valid: None,
            mutual_information: None,
            h_y: None,
            u_floored: None,
            u_reason: None,
        }
    }

    /// `u` when it is usable in a heatmap.
    pub fn valid_u(&self) -> Option<f64> {
        match self.u_valid {
            Some(true) => self.u,
            _ => None,
        }
    }
}

pub fn write_cells<W: Write>(out: W, cells: &[DependenceCell]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for c in cells {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_cells<R: Read>(input: R) -> Result<Vec<DependenceCell>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

//! JSON system documents.
//!
//! ```json
//! { "n": 2, "K": [[1, 0], [0, 1]], "C": [[0, 1], [-1, 0]] }
//! ```
//!
//! Keys: `K`, `C` for circulatory systems, `G`, `K` for gyroscopic ones,
//! `M`, `A2`, `A3` for the lumped form, and `M` alone for a bare matrix.
//! `n` is optional; when present every matrix must be `n × n`.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matcrit::RealSquareMatrix;
use crate::mech::{CirculatorySystem, GyroscopicSystem};

type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub n: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<Rows>,
    #[serde(rename = "K")]
    pub k: Option<Rows>,
    #[serde(rename = "C")]
    pub c: Option<Rows>,
    #[serde(rename = "G")]
    pub g: Option<Rows>,
    #[serde(rename = "A2")]
    pub a2: Option<Rows>,
    #[serde(rename = "A3")]
    pub a3: Option<Rows>,
}

impl SystemDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::input(format!("malformed system document: {e}")))
    }

    fn field(&self, key: &str) -> Option<&Rows> {
        match key {
            "M" => self.m.as_ref(),
            "K" => self.k.as_ref(),
            "C" => self.c.as_ref(),
            "G" => self.g.as_ref(),
            "A2" => self.a2.as_ref(),
            "A3" => self.a3.as_ref(),
            _ => None,
        }
    }

    pub fn matrix(&self, key: &str) -> Result<RealSquareMatrix> {
        let rows = self
            .field(key)
            .ok_or_else(|| Error::input(format!("document has no {key:?} matrix")))?;
        let m = RealSquareMatrix::from_rows(rows)
            .map_err(|e| Error::input(format!("{key}: {e}")))?;
        if let Some(n) = self.n {
            if m.n() != n {
                return Err(Error::input(format!("{key} is {}x{0}, but n = {n}", m.n())));
            }
        }
        Ok(m)
    }

    pub fn circulatory(&self) -> Result<CirculatorySystem> {
        CirculatorySystem::new(self.matrix("K")?, self.matrix("C")?)
    }

    pub fn gyroscopic(&self) -> Result<GyroscopicSystem> {
        GyroscopicSystem::new(self.matrix("G")?, self.matrix("K")?)
    }

    /// `(M, A2, A3)` of `M q'' + A2 q' + A3 q = 0`.
    pub fn lumped(&self) -> Result<(RealSquareMatrix, RealSquareMatrix, RealSquareMatrix)> {
        Ok((self.matrix("M")?, self.matrix("A2")?, self.matrix("A3")?))
    }
}

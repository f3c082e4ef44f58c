//! On-disk operator format: `{"dims":[..], "matrix":[[[re,im],..],..]}`.

use serde::{Deserialize, Serialize};

use super::{DensityOperator, HermitianOperator, Test};
use crate::error::{Error, Result};
use crate::C64;

/// Which invariants the loader enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Hermitian,
    Density,
    Test,
}

impl std::str::FromStr for OperatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hermitian" => Ok(OperatorKind::Hermitian),
            "density" => Ok(OperatorKind::Density),
            "test" => Ok(OperatorKind::Test),
            other => Err(Error::Format(format!("unknown operator kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OperatorFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl OperatorFile {
    pub fn from_operator(op: &HermitianOperator) -> Self {
        let n = op.dim();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let z = op.entry(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        OperatorFile {
            dims: op.dims().to_vec(),
            matrix,
        }
    }

    pub fn to_hermitian(&self) -> Result<HermitianOperator> {
        let rows: Vec<Vec<C64>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .collect();
        HermitianOperator::from_rows(self.dims.clone(), &rows)
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        DensityOperator::new(self.to_hermitian()?)
    }

    pub fn to_test(&self) -> Result<Test> {
        Test::new(self.to_hermitian()?)
    }

    /// Validates according to `kind` and returns the underlying operator.
    pub fn load(&self, kind: OperatorKind) -> Result<HermitianOperator> {
        match kind {
            OperatorKind::Hermitian => self.to_hermitian(),
            OperatorKind::Density => Ok(self.to_density()?.into_op()),
            OperatorKind::Test => Ok(self.to_test()?.into_op()),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("operator file serializes")
    }
}

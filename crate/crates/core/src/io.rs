//! JSON documents for coefficients, operators and estimator reports.
//!
//! Complex numbers are stored interleaved as `[re, im, re, im, …]`; operator
//! blocks are row-major. Non-finite numbers in reports are written as `null`.
//! The layout is described in `docs/schema.md`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{EstimateReport, LevelRecord};
use crate::linalg::DenseMatrix;
use crate::model::{BlockCoefficients, BlockOperator, BlockStructure, StructureKind};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub sizes: Vec<usize>,
    pub levels: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub sizes: Vec<usize>,
    pub blocks: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDoc<T> {
    pub l_rule: usize,
    pub l_used: usize,
    pub levels: Vec<LevelRecord<T>>,
    pub f_hat: CoefficientsDoc,
}

fn kind_fields(s: &BlockStructure) -> (String, Option<usize>) {
    match s.kind() {
        StructureKind::Circular { d } => ("circular".into(), Some(*d)),
        StructureKind::Spherical => ("spherical".into(), Some(2)),
        StructureKind::Custom { .. } => ("custom".into(), None),
    }
}

fn structure_from(kind: &str, d: Option<usize>, sizes: &[usize]) -> Result<BlockStructure> {
    let s = match kind {
        "circular" => BlockStructure::circular(
            d.ok_or_else(|| Error::Serde("circular structure needs \"d\"".into()))?,
            sizes.len(),
        )?,
        "spherical" => BlockStructure::spherical(sizes.len())?,
        "custom" => BlockStructure::custom(sizes.to_vec())?,
        other => return Err(Error::Serde(format!("unknown structure kind {other:?}"))),
    };
    if s.sizes() != sizes {
        return Err(Error::Serde(format!("sizes {sizes:?} do not match a {kind} structure")));
    }
    Ok(s)
}

fn interleave<T: Real>(v: &[Complex<T>]) -> Vec<f64> {
    v.iter().flat_map(|c| [c.re.as_f64(), c.im.as_f64()]).collect()
}

fn deinterleave<T: Real>(v: &[f64]) -> Result<Vec<Complex<T>>> {
    if !v.len().is_multiple_of(2) {
        return Err(Error::Serde("interleaved complex array has odd length".into()));
    }
    Ok(v.chunks_exact(2).map(|p| Complex::new(T::lit(p[0]), T::lit(p[1]))).collect())
}

impl CoefficientsDoc {
    pub fn from_coeffs<T: Real>(f: &BlockCoefficients<T>) -> Self {
        let (kind, d) = kind_fields(f.structure());
        Self { kind, d, sizes: f.structure().sizes(), levels: f.blocks().iter().map(|b| interleave(b)).collect() }
    }

    pub fn to_coeffs<T: Real>(&self) -> Result<BlockCoefficients<T>> {
        let s = structure_from(&self.kind, self.d, &self.sizes)?;
        let blocks = self.levels.iter().map(|b| deinterleave(b)).collect::<Result<_>>()?;
        BlockCoefficients::new(s, blocks)
    }
}

impl OperatorDoc {
    pub fn from_operator<T: Real>(k: &BlockOperator<T>) -> Self {
        let (kind, d) = kind_fields(k.structure());
        Self {
            kind,
            d,
            sizes: k.structure().sizes(),
            blocks: k.blocks().iter().map(|b| interleave(b.entries())).collect(),
        }
    }

    pub fn to_operator<T: Real>(&self) -> Result<BlockOperator<T>> {
        let s = structure_from(&self.kind, self.d, &self.sizes)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&self.sizes)
            .map(|(b, &side)| DenseMatrix::new(side, deinterleave(b)?))
            .collect::<Result<_>>()?;
        BlockOperator::new(s, blocks)
    }
}

fn to_string<S: Serialize>(doc: &S) -> Result<String> {
    serde_json::to_string_pretty(doc).map_err(|e| Error::Serde(e.to_string()))
}

pub fn coeffs_to_json<T: Real>(f: &BlockCoefficients<T>) -> Result<String> {
    to_string(&CoefficientsDoc::from_coeffs(f))
}

pub fn coeffs_from_json<T: Real>(text: &str) -> Result<BlockCoefficients<T>> {
    serde_json::from_str::<CoefficientsDoc>(text).map_err(|e| Error::Serde(e.to_string()))?.to_coeffs()
}

pub fn operator_to_json<T: Real>(k: &BlockOperator<T>) -> Result<String> {
    to_string(&OperatorDoc::from_operator(k))
}

pub fn operator_from_json<T: Real>(text: &str) -> Result<BlockOperator<T>> {
    serde_json::from_str::<OperatorDoc>(text).map_err(|e| Error::Serde(e.to_string()))?.to_operator()
}

pub fn report_to_json<T: Real + Serialize>(report: &EstimateReport<T>) -> Result<String> {
    to_string(&ReportDoc {
        l_rule: report.l_rule,
        l_used: report.l_used,
        levels: report.levels.clone(),
        f_hat: CoefficientsDoc::from_coeffs(&report.f_hat),
    })
}

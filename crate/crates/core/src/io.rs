//! JSON file formats for schemes and hypergroups.
//!
//! Numbers may be JSON integers, JSON floats, or strings `"p/q"`. Inputs made
//! only of integers and strings load exactly; any float selects `f64`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergroup::FiniteHypergroup;
use crate::matrix::DenseMatrix;
use crate::scalar::{parse_rational, Rational, Scalar};
use crate::scheme::{GeneralizedScheme, RelationPartition};
use crate::tensor::Tensor3;

/// A number in a file: exact integer, float, or `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    pub fn is_exact(&self) -> bool {
        !matches!(self, Num::Float(_))
    }

    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Num::Int(i) => Ok(Rational::from_int(*i)),
            Num::Text(s) => parse_rational(s).ok_or_else(|| Error::invalid(format!("not a rational: {s:?}"))),
            Num::Float(x) => Err(Error::invalid(format!("float {x} where an exact value is required"))),
        }
    }

    pub fn to_f64(&self) -> Result<f64> {
        match self {
            Num::Float(x) => Ok(*x),
            _ => Ok(self.to_rational()?.to_f64()),
        }
    }

    /// Exact values become integers or `"p/q"`; floats stay floats.
    pub fn from_scalar<T: Scalar>(v: &T) -> Self {
        if T::EXACT {
            let s = v.to_string();
            s.parse().map(Num::Int).unwrap_or(Num::Text(s))
        } else {
            Num::Float(v.to_f64())
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Int(i) => write!(f, "{i}"),
            Num::Float(x) => write!(f, "{x}"),
            Num::Text(s) => f.write_str(s),
        }
    }
}

fn all_exact<'a>(mut it: impl Iterator<Item = &'a Num>) -> bool {
    it.all(Num::is_exact)
}

/// A scheme on `0..n_points`: the relation label matrix and, optionally,
/// kernels and a point weight `omega_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeFile {
    pub n_points: usize,
    pub relations: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernels: Option<Vec<Vec<Vec<Num>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_x: Option<Vec<Num>>,
}

/// A scheme file parsed into exact or floating-point data.
#[derive(Debug, Clone)]
pub enum LoadedScheme {
    /// Only the partition was given.
    Partition(RelationPartition),
    Exact(GeneralizedScheme<Rational>),
    Float(GeneralizedScheme<f64>),
}

impl SchemeFile {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(format!("scheme file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_partition(p: &RelationPartition) -> Self {
        Self { n_points: p.n_points(), relations: p.to_rows(), kernels: None, omega_x: None }
    }

    pub fn from_generalized<T: Scalar>(gs: &GeneralizedScheme<T>) -> Self {
        let kernels = gs
            .kernels()
            .iter()
            .map(|k| k.to_rows().iter().map(|r| r.iter().map(Num::from_scalar).collect()).collect())
            .collect();
        Self {
            kernels: Some(kernels),
            omega_x: Some(gs.omega_x().iter().map(Num::from_scalar).collect()),
            ..Self::from_partition(gs.partition())
        }
    }

    pub fn partition(&self) -> Result<RelationPartition> {
        if self.relations.len() != self.n_points || self.relations.iter().any(|r| r.len() != self.n_points) {
            return Err(Error::invalid(format!("relations must be a {0}x{0} matrix", self.n_points)));
        }
        RelationPartition::new(self.relations.clone())
    }

    pub fn load(&self) -> Result<LoadedScheme> {
        let partition = self.partition()?;
        let Some(kernels) = &self.kernels else {
            if self.omega_x.is_some() {
                return Err(Error::invalid("omega_x given without kernels"));
            }
            return Ok(LoadedScheme::Partition(partition));
        };
        let exact =
            all_exact(kernels.iter().flatten().flatten()) && self.omega_x.as_ref().is_none_or(|w| all_exact(w.iter()));
        if exact {
            Ok(LoadedScheme::Exact(self.build(partition, kernels, Num::to_rational)?))
        } else {
            Ok(LoadedScheme::Float(self.build(partition, kernels, Num::to_f64)?))
        }
    }

    fn build<T: Scalar>(
        &self,
        partition: RelationPartition,
        kernels: &[Vec<Vec<Num>>],
        conv: impl Fn(&Num) -> Result<T>,
    ) -> Result<GeneralizedScheme<T>> {
        let mats = kernels
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let rows = k.iter().map(|r| r.iter().map(&conv).collect::<Result<Vec<T>>>()).collect::<Result<_>>()?;
                DenseMatrix::from_rows(rows).ok_or_else(|| Error::invalid(format!("kernel {i} is ragged")))
            })
            .collect::<Result<Vec<_>>>()?;
        let omega = match &self.omega_x {
            Some(w) => w.iter().map(&conv).collect::<Result<Vec<T>>>()?,
            None => vec![T::one(); self.n_points],
        };
        GeneralizedScheme::new(partition, mats, omega)
    }
}

/// A finite hypergroup on `0..n` given by its convolution tensor
/// `conv[i][j][k] = (delta_i * delta_j)({k})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergroupFile {
    pub n: usize,
    pub identity: usize,
    pub involution: Vec<usize>,
    pub conv: Vec<Vec<Vec<Num>>>,
}

/// A hypergroup file parsed into exact or floating-point data.
#[derive(Debug, Clone)]
pub enum LoadedHypergroup {
    Exact(FiniteHypergroup<Rational>),
    Float(FiniteHypergroup<f64>),
}

impl HypergroupFile {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(format!("hypergroup file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_hypergroup<T: Scalar>(h: &FiniteHypergroup<T>) -> Self {
        let n = h.n();
        let conv = (0..n)
            .map(|i| (0..n).map(|j| h.conv().fiber(i, j).iter().map(Num::from_scalar).collect()).collect())
            .collect();
        Self { n, identity: h.identity(), involution: h.involution().to_vec(), conv }
    }

    pub fn load(&self) -> Result<LoadedHypergroup> {
        let n = self.n;
        let shape_ok = self.conv.len() == n && self.conv.iter().all(|r| r.len() == n && r.iter().all(|f| f.len() == n));
        if !shape_ok {
            return Err(Error::invalid(format!("conv must be an {n}x{n}x{n} array")));
        }
        if all_exact(self.conv.iter().flatten().flatten()) {
            Ok(LoadedHypergroup::Exact(self.build(Num::to_rational)?))
        } else {
            Ok(LoadedHypergroup::Float(self.build(Num::to_f64)?))
        }
    }

    fn build<T: Scalar>(&self, conv: impl Fn(&Num) -> Result<T>) -> Result<FiniteHypergroup<T>> {
        let nested = self
            .conv
            .iter()
            .map(|r| r.iter().map(|f| f.iter().map(&conv).collect::<Result<Vec<T>>>()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let tensor = Tensor3::from_nested(nested).ok_or_else(|| Error::invalid("conv is ragged"))?;
        FiniteHypergroup::new(tensor, self.identity, self.involution.clone())
    }
}

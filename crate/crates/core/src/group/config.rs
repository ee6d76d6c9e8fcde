//! JSON description of a group action.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{close_group, GroupAction, GroupElement, SystemParams, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::perm::IndexPermutation;
use crate::time::{TimeSpec, TimeTransform};
use crate::Scalar;

/// Space matrix in row-major order, either nested (`[[..],[..]]`) or flat.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhoSpec {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl RhoSpec {
    fn to_mat<S: Scalar>(&self, d: usize, generator: usize) -> Result<Mat<S>> {
        let flat: Vec<f64> = match self {
            RhoSpec::Nested(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::InvalidAction(format!(
                        "generator {generator}: rho must be {d}×{d}"
                    )));
                }
                rows.iter().flatten().copied().collect()
            }
            RhoSpec::Flat(v) => {
                if v.len() != d * d {
                    return Err(Error::InvalidAction(format!(
                        "generator {generator}: rho must have {} entries",
                        d * d
                    )));
                }
                v.clone()
            }
        };
        Ok(Mat::from_rows(d, d, flat.into_iter().map(S::lit).collect()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub tau: TimeSpec,
    pub rho: RhoSpec,
    pub sigma: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub period: f64,
    pub masses: Vec<f64>,
    pub generators: Vec<GeneratorSpec>,
}

impl ActionConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn build<S: Scalar>(&self) -> Result<GroupAction<S>> {
        self.build_with_cap(DEFAULT_CAP)
    }

    pub fn build_with_cap<S: Scalar>(&self, cap: usize) -> Result<GroupAction<S>> {
        let params = SystemParams::new(
            self.n,
            self.d,
            S::lit(self.alpha),
            S::lit(self.period),
            self.masses.iter().map(|m| S::lit(*m)).collect(),
        )?;
        let generators = self
            .generators
            .iter()
            .enumerate()
            .map(|(k, g)| {
                Ok(GroupElement {
                    tau: TimeTransform::try_from(&g.tau)?,
                    rho: g.rho.to_mat(self.d, k)?,
                    sigma: IndexPermutation::parse_cycles(&g.sigma, self.n)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        close_group(params, generators, cap)
    }

    /// Configuration reproducing the generators of an existing action.
    pub fn from_action<S: Scalar>(action: &GroupAction<S>, name: Option<String>) -> Self {
        let d = action.d();
        let p = &action.params;
        Self {
            name,
            n: p.n,
            d,
            alpha: p.alpha.to_f64_lossy(),
            period: p.period.to_f64_lossy(),
            masses: p.masses.iter().map(|m| m.to_f64_lossy()).collect(),
            generators: action
                .generators()
                .iter()
                .map(|g| GeneratorSpec {
                    tau: TimeSpec::from(&g.tau),
                    rho: RhoSpec::Nested(
                        (0..d)
                            .map(|r| (0..d).map(|c| g.rho[(r, c)].to_f64_lossy()).collect())
                            .collect(),
                    ),
                    sigma: g.sigma.to_string(),
                })
                .collect(),
        }
    }
}

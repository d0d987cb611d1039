use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use spectral_sk::poly::Poly;
use spectral_sk::riemann::{HyperellipticCurve, SectionKm, SpectralFamily};
use spectral_sk::C64;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Classify,
    Potential,
    Metric,
    B2scan,
    Periods,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub branch_points: Vec<C64>,
}

/// Numerators are constant-term first; `a1 = D dz / y`, `a2 = P dz^2 / f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub rank: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<Vec<C64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Cell budget of the plane quadrature for `potential`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cells: Option<usize>,
    /// Finite-difference step for `metric`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Sample values of `a` for `b2scan`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<C64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Golden store used by `validate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goldens: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyConfig>,
    #[serde(default)]
    pub numeric: NumericConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

pub const DEFAULT_TOL: f64 = spectral_sk::quad2d::DEFAULT_TOL;

impl JobConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    /// Fills defaults so the embedded config reproduces the run.
    pub fn normalized(mut self, task: Task) -> Result<Self, CliError> {
        self.task = Some(task);
        let tol = self.numeric.tol.unwrap_or(DEFAULT_TOL);
        if !(spectral_sk::quad2d::MIN_TOL..=spectral_sk::quad2d::MAX_TOL).contains(&tol) {
            return Err(CliError::Config(format!("tol {tol} outside [1e-10, 1e-2]")));
        }
        self.numeric.tol = Some(tol);
        if task == Task::B2scan && self.numeric.samples.is_none() {
            self.numeric.samples = Some(spectral_sk::acceptance::b2_samples());
        }
        if self.output.format.is_none() {
            self.output.format = Some(match task {
                Task::Metric | Task::B2scan => Format::Csv,
                _ => Format::Json,
            });
        }
        Ok(self)
    }

    pub fn tol(&self) -> f64 {
        self.numeric.tol.unwrap_or(DEFAULT_TOL)
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or(Format::Json)
    }

    pub fn curve(&self) -> Result<HyperellipticCurve, CliError> {
        let c = self
            .curve
            .as_ref()
            .ok_or_else(|| CliError::Config("this task needs a curve".into()))?;
        HyperellipticCurve::new(c.branch_points.clone()).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn family(&self) -> Result<Family, CliError> {
        let curve = self.curve()?;
        let f = self
            .family
            .as_ref()
            .ok_or_else(|| CliError::Config("this task needs a family".into()))?;
        let cfg = |e: spectral_sk::riemann::RiemannError| CliError::Config(e.to_string());
        match f.rank {
            1 => {
                if f.a2.is_some() {
                    return Err(CliError::Config("rank 1 family takes only a1".into()));
                }
                let d = Poly(f.a1.clone().ok_or_else(|| CliError::Config("rank 1 needs a1".into()))?);
                let fam = SpectralFamily::rank1(curve, SectionKm::one_form(d.clone()).map_err(cfg)?)
                    .map_err(cfg)?;
                Ok(Family { fam, d, p: None })
            }
            2 => {
                let p = Poly(f.a2.clone().ok_or_else(|| CliError::Config("rank 2 needs a2".into()))?);
                let d = Poly(f.a1.clone().unwrap_or_default());
                let a1 = match &f.a1 {
                    Some(_) => Some(SectionKm::one_form(d.clone()).map_err(cfg)?),
                    None => None,
                };
                let fam = SpectralFamily::rank2(curve, a1, SectionKm::quadratic(p.clone()).map_err(cfg)?)
                    .map_err(cfg)?;
                Ok(Family { fam, d, p: Some(p) })
            }
            r => Err(CliError::Config(format!("rank {r} unsupported (1 or 2)"))),
        }
    }
}

/// A validated family with its numerators.
pub struct Family {
    pub fam: SpectralFamily,
    pub d: Poly,
    pub p: Option<Poly>,
}

impl Family {
    /// Parameters of the potential: `(d0, d1)`, `(c0, c1, c2)` or all five.
    pub fn parameters(&self) -> Vec<C64> {
        let pad = |p: &Poly, n: usize| (0..n).map(|k| p.coeff(k)).collect::<Vec<_>>();
        match &self.p {
            None => pad(&self.d, 2),
            Some(p) if self.fam.is_traceless() => pad(p, 3),
            Some(p) => {
                let mut v = pad(&self.d, 2);
                v.extend(pad(p, 3));
                v
            }
        }
    }
}

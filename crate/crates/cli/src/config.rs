//! Scenario configuration files and fixture resolution.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use stabilize_core::algebra::{AlgebraElement, Field, SemisimpleAlgebra};
use stabilize_core::banach::{FinDimBanachSpace, NormDescriptor, UnitBall};
use stabilize_core::colimit::{Multiplicities, Tower, TowerSpec};
use stabilize_core::group::{FiniteGroup, GroupDescriptor, Representation};
use stabilize_core::measure::{FiniteMetricSpace, MeasureDescriptor};
use stabilize_core::stabilization::CorrectionConfig;
use stabilize_core::C64;

use crate::CliError;

/// Largest perturbation size accepted in a config.
pub const MAX_ETA: f64 = 1.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(flatten)]
    pub kind: ScenarioKind,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
}

/// A batch file: `{"scenarios": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Batch {
    pub scenarios: Vec<Scenario>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigFile {
    Batch(Batch),
    Single(Box<Scenario>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Correct a perturbed linear map between algebras.
    Correct {
        source: SemisimpleAlgebra,
        map: MapFixture,
        #[serde(default)]
        eta: f64,
        #[serde(default)]
        correction: CorrectionConfig,
    },
    /// Correct a perturbed representation of a group.
    Haar {
        group: GroupRef,
        rep: RepFixture,
        eta: f64,
        #[serde(default)]
        correction: CorrectionConfig,
    },
    /// Recover a unitary conjugator between a representation and a conjugate.
    Conjugate {
        group: GroupRef,
        rep: RepFixture,
        /// `|v - 1|` for the conjugating unitary `v`.
        distance: f64,
    },
    /// Factor a perturbed stage-0 representation, pushed to the top of an
    /// isometric tower, through the earliest possible stage.
    Factor {
        group: GroupRef,
        rep: RepFixture,
        tower: TowerSpec,
        eta: f64,
        epsilon: f64,
        #[serde(default)]
        correction: CorrectionConfig,
    },
    /// Lift an exact representation in the top of a surjective tower.
    Lift {
        group: GroupRef,
        rep: RepFixture,
        tower: TowerSpec,
        #[serde(default = "default_lift_tol")]
        tol: f64,
        #[serde(default)]
        correction: CorrectionConfig,
    },
    Geometry {
        #[serde(default)]
        hausdorff: Vec<HausdorffCase>,
        #[serde(default)]
        min_expansion: Option<IndexRange>,
        #[serde(default)]
        operator_norms: Vec<OperatorCase>,
    },
    Transport {
        space: FiniteMetricSpace,
        pairs: Vec<MeasurePair>,
    },
    /// Random pairs of maps from a discrete space into a stage of an
    /// isometric tower.
    Supmetric {
        tower: TowerSpec,
        stage: usize,
        points: usize,
        trials: usize,
    },
}

fn default_lift_tol() -> f64 {
    1e-8
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Builtin(String),
    Table(GroupDescriptor),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RepFixture {
    Regular {
        #[serde(default = "complex_field")]
        field: Field,
    },
    Rotation {
        #[serde(default)]
        algebra: Option<SemisimpleAlgebra>,
    },
    Trivial {
        algebra: SemisimpleAlgebra,
    },
    Character {
        chi: Vec<C64>,
    },
    Explicit {
        algebra: SemisimpleAlgebra,
        values: Vec<AlgebraElement>,
    },
}

fn complex_field() -> Field {
    Field::Complex
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapFixture {
    Identity,
    Scalar(f64),
    Embedding(Multiplicities),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HausdorffCase {
    pub ambient: NormDescriptor,
    pub k: BallFixture,
    pub l: BallFixture,
    #[serde(default)]
    pub expected: Option<f64>,
}

/// The unit ball of a norm on the ambient coordinates, or the ambient ball
/// restricted to the span of some columns.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallFixture {
    Norm(NormDescriptor),
    Polygon(usize),
    Span(Vec<Vec<f64>>),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IndexRange {
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorCase {
    pub matrix: Vec<Vec<f64>>,
    pub source: NormDescriptor,
    pub target: NormDescriptor,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasurePair {
    pub mu: MeasureDescriptor,
    pub nu: MeasureDescriptor,
}

/// A check on a report field, addressed by a dotted path into the
/// `results` object (array elements by index).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertion {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub le: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse(text: &str) -> Result<ConfigFile, serde_json::Error> {
    // Try the batch form only when it is one, so single-scenario errors are
    // reported against the scenario schema.
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("scenarios").is_some() {
        serde_json::from_value(value).map(ConfigFile::Batch)
    } else {
        serde_json::from_value(value).map(|s| ConfigFile::Single(Box::new(s)))
    }
}

impl ConfigFile {
    pub fn into_scenarios(self) -> Vec<Scenario> {
        match self {
            ConfigFile::Batch(b) => b.scenarios,
            ConfigFile::Single(s) => vec![*s],
        }
    }
}

fn fixture(msg: impl std::fmt::Display) -> CliError {
    CliError::Fixture(msg.to_string())
}

impl GroupRef {
    pub fn resolve(&self) -> Result<Arc<FiniteGroup>, CliError> {
        let g = match self {
            GroupRef::Builtin(name) => FiniteGroup::builtin(name),
            GroupRef::Table(desc) => FiniteGroup::try_from(desc.clone()),
        };
        g.map(Arc::new).map_err(fixture)
    }
}

impl RepFixture {
    pub fn resolve(&self, group: &Arc<FiniteGroup>) -> Result<Representation, CliError> {
        let g = group.clone();
        let rep = match self {
            RepFixture::Regular { field } => Ok(Representation::regular(g, *field)),
            RepFixture::Rotation { algebra } => Representation::cyclic_rotation(g).and_then(|r| match algebra {
                Some(a) => Representation::new(r.group().clone(), a.clone(), r.values().to_vec()),
                None => Ok(r),
            }),
            RepFixture::Trivial { algebra } => Ok(Representation::trivial(g, algebra.clone())),
            RepFixture::Character { chi } => Representation::from_character(g, chi),
            RepFixture::Explicit { algebra, values } => Representation::new(g, algebra.clone(), values.clone()),
        };
        rep.map_err(fixture)
    }
}

impl BallFixture {
    pub fn resolve(&self, ambient: &FinDimBanachSpace) -> Result<UnitBall, CliError> {
        let d = ambient.dim();
        match self {
            BallFixture::Norm(n) => {
                let s = FinDimBanachSpace::new(n.clone()).map_err(fixture)?;
                if s.dim() != d {
                    return Err(fixture(format!("ball of dimension {} in a {d}-dimensional ambient", s.dim())));
                }
                Ok(UnitBall::of_space(&s))
            }
            BallFixture::Polygon(i) => {
                let s = stabilize_core::banach::polygon_space(*i).map_err(fixture)?;
                if d != 2 {
                    return Err(fixture("polygon balls need a planar ambient"));
                }
                Ok(UnitBall::of_space(&s))
            }
            BallFixture::Span(cols) => {
                if cols.is_empty() || cols.iter().any(|c| c.len() != d) {
                    return Err(fixture(format!("span columns must have length {d}")));
                }
                let basis = nalgebra::DMatrix::from_fn(d, cols.len(), |i, j| cols[j][i]);
                UnitBall::induced(ambient, basis).map_err(fixture)
            }
        }
    }
}

pub fn resolve_tower(spec: &TowerSpec) -> Result<Tower, CliError> {
    Tower::from_spec(spec).map_err(fixture)
}

pub fn check_eta(eta: f64) -> Result<(), CliError> {
    if !(0.0..=MAX_ETA).contains(&eta) {
        return Err(CliError::Config(format!("eta = {eta} is outside [0, {MAX_ETA}]")));
    }
    Ok(())
}

pub fn matrix(rows: &[Vec<f64>]) -> Result<nalgebra::DMatrix<f64>, CliError> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    if r == 0 || c == 0 || rows.iter().any(|x| x.len() != c) {
        return Err(CliError::Config("matrix rows must be non-empty and of equal length".into()));
    }
    Ok(nalgebra::DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn metric_space(space: &FiniteMetricSpace) -> Arc<FiniteMetricSpace> {
    Arc::new(space.clone())
}

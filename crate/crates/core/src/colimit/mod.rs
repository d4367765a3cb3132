//! Finite towers `A_0 -> A_1 -> ... -> A_N` of semisimple algebras whose
//! connecting maps are all isometric embeddings or all surjections. The
//! last stage stands in for the colimit.

mod factor;
mod lift;
mod sup_metric;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, BasisAlgebra, Block, Field, LinearMap, SemisimpleAlgebra};
use crate::error::{Error, Result};
use crate::stabilization::basis_defect;
use crate::C64;

pub use factor::{factor_through_stage, FactorReport};
pub use lift::{lift_along_surjections, lift_with_candidate, LiftReport};
pub use sup_metric::{check_sup_metric_equality, SupMetricCheck};

const MORPHISM_TOL: f64 = 1e-12;
const ISOMETRY_TOL: f64 = 1e-9;
const ISOMETRY_SAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerKind {
    Isometric,
    Surjective,
}

/// Multiplicities of one embedding step: `m[t][s]` copies of source block
/// `s` sit on the diagonal of target block `t`. A flat list is read as one
/// entry per target block when the source has a single block, and as one
/// entry per source block of a single target block otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Multiplicities {
    Flat(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AfStep {
    Pattern(Multiplicities),
    Explicit {
        multiplicities: Multiplicities,
        #[serde(default)]
        target: Option<SemisimpleAlgebra>,
    },
}

/// Wire form of a tower.
///
/// `{"kind":"af","base":{"blocks":[{"field":"complex","n":2}]},"steps":[[2],[2]]}`
/// or `{"kind":"surjective","base":{...},"steps":[[0],[0]]}` where each
/// surjective step lists the source blocks kept, in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TowerSpec {
    Af { base: SemisimpleAlgebra, steps: Vec<AfStep> },
    Surjective { base: SemisimpleAlgebra, steps: Vec<Vec<usize>> },
}

/// A finite tower with consecutive connecting maps `maps[j]: A_j -> A_{j+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tower {
    stages: Vec<SemisimpleAlgebra>,
    maps: Vec<LinearMap>,
    kind: TowerKind,
}

impl Tower {
    /// Validates that every connecting map is a unital morphism, and is
    /// isometric or surjective according to `kind`.
    pub fn new(stages: Vec<SemisimpleAlgebra>, maps: Vec<LinearMap>, kind: TowerKind) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidTower("a tower needs at least one stage".into()));
        }
        if maps.len() + 1 != stages.len() {
            return Err(Error::InvalidTower(format!("{} stages need {} maps", stages.len(), stages.len() - 1)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x70e7);
        for (j, map) in maps.iter().enumerate() {
            if map.source().as_matrix() != Some(&stages[j]) || map.target() != &stages[j + 1] {
                return Err(Error::InvalidTower(format!("map {j} does not connect stages {j} and {}", j + 1)));
            }
            let defect = basis_defect(map);
            if !(defect <= MORPHISM_TOL) || !(map.unit_residual() <= MORPHISM_TOL) {
                return Err(Error::InvalidTower(format!("map {j} is not a unital morphism (defect {defect:e})")));
            }
            match kind {
                TowerKind::Isometric => {
                    for _ in 0..ISOMETRY_SAMPLES {
                        let a = stages[j].random_element(&mut rng);
                        let n = a.operator_norm();
                        let image = map.apply_element(&a)?.operator_norm();
                        if (image - n).abs() > ISOMETRY_TOL * n.max(1.0) {
                            return Err(Error::InvalidTower(format!("map {j} is not isometric")));
                        }
                    }
                }
                TowerKind::Surjective => {
                    let rank = map.coefficient_array().rank(1e-10);
                    if rank != stages[j + 1].dim() {
                        return Err(Error::InvalidTower(format!("map {j} is not surjective (rank {rank})")));
                    }
                }
            }
        }
        Ok(Tower { stages, maps, kind })
    }

    pub fn from_spec(spec: &TowerSpec) -> Result<Self> {
        match spec {
            TowerSpec::Af { base, steps } => build_af_tower(base.clone(), steps),
            TowerSpec::Surjective { base, steps } => build_surjective_tower(base.clone(), steps),
        }
    }

    pub fn kind(&self) -> TowerKind {
        self.kind
    }

    pub fn stages(&self) -> &[SemisimpleAlgebra] {
        &self.stages
    }

    pub fn stage(&self, i: usize) -> &SemisimpleAlgebra {
        &self.stages[i]
    }

    /// Index `N` of the last stage.
    pub fn top_index(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn top(&self) -> &SemisimpleAlgebra {
        &self.stages[self.top_index()]
    }

    pub fn maps(&self) -> &[LinearMap] {
        &self.maps
    }

    /// `iota_{j,i}: A_i -> A_j` for `i <= j`, composed from consecutive maps.
    pub fn connecting(&self, i: usize, j: usize) -> Result<LinearMap> {
        if i > j || j > self.top_index() {
            return Err(Error::Precondition(format!("no connecting map from stage {i} to stage {j}")));
        }
        let mut map = LinearMap::identity(&self.stages[i]);
        for step in &self.maps[i..j] {
            map = step.compose(&map)?;
        }
        Ok(map)
    }

    /// `iota_i: A_i -> A_N`.
    pub fn structure_map(&self, i: usize) -> Result<LinearMap> {
        self.connecting(i, self.top_index())
    }

    /// Largest `|iota_{k,j} iota_{j,i} - iota_{k,i}|` over basis elements and
    /// all `i <= j <= k`.
    pub fn functoriality_residual(&self) -> Result<f64> {
        let n = self.top_index();
        let mut worst: f64 = 0.0;
        for i in 0..=n {
            for j in i..=n {
                for k in j..=n {
                    let two = self.connecting(j, k)?.compose(&self.connecting(i, j)?)?;
                    worst = worst.max(two.basis_distance(&self.connecting(i, k)?)?);
                }
            }
        }
        Ok(worst)
    }
}

fn matrix_of(m: &Multiplicities, sources: usize) -> Result<Vec<Vec<f64>>> {
    Ok(match m {
        Multiplicities::Matrix(rows) => rows.clone(),
        Multiplicities::Flat(v) if sources == 1 => v.iter().map(|&x| vec![x]).collect(),
        Multiplicities::Flat(v) if v.len() == sources => vec![v.clone()],
        Multiplicities::Flat(v) => {
            return Err(Error::InvalidTower(format!(
                "flat pattern of length {} for a source with {sources} blocks",
                v.len()
            )))
        }
    })
}

/// Unital block-diagonal embedding with the given multiplicities.
pub fn af_embedding(source: &SemisimpleAlgebra, step: &AfStep) -> Result<LinearMap> {
    let (mult, target) = match step {
        AfStep::Pattern(m) => (m, None),
        AfStep::Explicit { multiplicities, target } => (multiplicities, target.as_ref()),
    };
    let rows = matrix_of(mult, source.num_blocks())?;
    if rows.is_empty() {
        return Err(Error::InvalidTower("embedding pattern has no target blocks".into()));
    }
    let mut counts = Vec::with_capacity(rows.len());
    for row in &rows {
        if row.len() != source.num_blocks() {
            return Err(Error::InvalidTower(format!(
                "pattern row has {} entries for {} source blocks",
                row.len(),
                source.num_blocks()
            )));
        }
        let mut r = Vec::with_capacity(row.len());
        for &m in row {
            if !(m >= 0.0) || m.fract() != 0.0 || m > 1e6 {
                return Err(Error::InvalidTower(format!("multiplicity {m} is not a non-negative integer")));
            }
            r.push(m as usize);
        }
        counts.push(r);
    }
    for s in 0..source.num_blocks() {
        if counts.iter().all(|r| r[s] == 0) {
            return Err(Error::InvalidTower(format!("source block {s} is not embedded anywhere")));
        }
    }
    let mut blocks = Vec::with_capacity(counts.len());
    for (t, r) in counts.iter().enumerate() {
        let n: usize = r.iter().zip(source.blocks()).map(|(m, b)| m * b.n).sum();
        if n == 0 {
            return Err(Error::InvalidTower(format!("target block {t} receives nothing")));
        }
        let complex = r.iter().zip(source.blocks()).any(|(&m, b)| m > 0 && b.field == Field::Complex);
        blocks.push(Block { field: if complex { Field::Complex } else { Field::Real }, n });
    }
    let target = match target {
        Some(t) => {
            if t.num_blocks() != blocks.len() || t.blocks().iter().zip(&blocks).any(|(a, b)| a.n != b.n) {
                return Err(Error::InvalidTower(format!(
                    "multiplicities give block sizes {:?}, target has {:?}",
                    blocks.iter().map(|b| b.n).collect::<Vec<_>>(),
                    t.blocks().iter().map(|b| b.n).collect::<Vec<_>>()
                )));
            }
            if t.blocks().iter().zip(&blocks).any(|(a, b)| a.field == Field::Real && b.field == Field::Complex) {
                return Err(Error::InvalidTower("a complex block cannot be embedded in a real block".into()));
            }
            t.clone()
        }
        None => SemisimpleAlgebra::new(blocks)?,
    };
    let images = (0..source.dim())
        .map(|idx| {
            let el = source.basis_element(idx);
            embed_element(&el, &counts, &target)
        })
        .collect();
    LinearMap::new(BasisAlgebra::Matrix(source.clone()), target, images)
}

fn embed_element(el: &AlgebraElement, counts: &[Vec<usize>], target: &SemisimpleAlgebra) -> AlgebraElement {
    let blocks = counts
        .iter()
        .zip(target.blocks())
        .map(|(row, tb)| {
            let mut m = DMatrix::<C64>::zeros(tb.n, tb.n);
            let mut at = 0;
            for (s, &copies) in row.iter().enumerate() {
                let b = el.block(s);
                for _ in 0..copies {
                    m.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
                    at += b.nrows();
                }
            }
            m
        })
        .collect();
    AlgebraElement::from_blocks(blocks)
}

/// Isometric tower of block-diagonal embeddings starting at `base`.
pub fn build_af_tower(base: SemisimpleAlgebra, steps: &[AfStep]) -> Result<Tower> {
    let mut stages = vec![base];
    let mut maps = Vec::with_capacity(steps.len());
    for step in steps {
        let map = af_embedding(stages.last().expect("non-empty"), step)?;
        stages.push(map.target().clone());
        maps.push(map);
    }
    Tower::new(stages, maps, TowerKind::Isometric)
}

/// Projection keeping the listed blocks of `source`, in the listed order.
pub fn block_projection(source: &SemisimpleAlgebra, keep: &[usize]) -> Result<LinearMap> {
    if keep.is_empty() {
        return Err(Error::InvalidTower("a projection must keep at least one block".into()));
    }
    for (k, &b) in keep.iter().enumerate() {
        if b >= source.num_blocks() {
            return Err(Error::InvalidTower(format!("block {b} does not exist")));
        }
        if keep[..k].contains(&b) {
            return Err(Error::InvalidTower(format!("block {b} is kept twice; the map would not be surjective")));
        }
    }
    let target = SemisimpleAlgebra::new(keep.iter().map(|&b| source.blocks()[b]).collect())?;
    let images = (0..source.dim())
        .map(|idx| {
            let (b, r, c) = source.basis_position(idx);
            match keep.iter().position(|&k| k == b) {
                Some(t) => target.basis_element(target.basis_index(t, r, c)),
                None => target.zero(),
            }
        })
        .collect();
    LinearMap::new(BasisAlgebra::Matrix(source.clone()), target, images)
}

/// Surjective tower of block projections starting at `base`.
pub fn build_surjective_tower(base: SemisimpleAlgebra, steps: &[Vec<usize>]) -> Result<Tower> {
    let mut stages = vec![base];
    let mut maps = Vec::with_capacity(steps.len());
    for keep in steps {
        let map = block_projection(stages.last().expect("non-empty"), keep)?;
        stages.push(map.target().clone());
        maps.push(map);
    }
    Tower::new(stages, maps, TowerKind::Surjective)
}

/// Least-squares preimages under a linear map between matrix algebras, in
/// the Frobenius inner product on coefficients.
pub(crate) struct Pullback {
    map: LinearMap,
    pinv: DMatrix<C64>,
}

impl Pullback {
    pub(crate) fn new(map: LinearMap) -> Self {
        let pinv = map.coefficient_array().pseudo_inverse(1e-12).expect("non-negative epsilon");
        Pullback { map, pinv }
    }

    /// Minimal-norm least-squares preimage, with imaginary parts dropped on
    /// real blocks of the source.
    pub(crate) fn preimage(&self, y: &AlgebraElement) -> AlgebraElement {
        let src = self.map.source().as_matrix().expect("matrix source");
        let coeffs = &self.pinv * nalgebra::DVector::from_vec(self.map.target().coeffs(y));
        src.element_from_coeffs(coeffs.as_slice()).realify(BasisAlgebra::real_blocks(src))
    }

    pub(crate) fn map(&self) -> &LinearMap {
        &self.map
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_tower() -> Tower {
        let base = SemisimpleAlgebra::matrix(2).unwrap();
        let step = AfStep::Pattern(Multiplicities::Flat(vec![2.0]));
        build_af_tower(base, &[step.clone(), step]).unwrap()
    }

    #[test]
    fn constant_scalar_tower() {
        let c = SemisimpleAlgebra::scalars();
        let step = AfStep::Pattern(Multiplicities::Flat(vec![1.0]));
        let t = build_af_tower(c.clone(), &[step.clone(), step.clone(), step]).unwrap();
        assert!(t.stages().iter().all(|s| *s == c));
        assert_eq!(t.structure_map(0).unwrap(), LinearMap::identity(&c));
    }

    #[test]
    fn doubling_tower() {
        let t = diag_tower();
        let dims: Vec<usize> = t.stages().iter().map(|s| s.blocks()[0].n).collect();
        assert_eq!(dims, vec![2, 4, 8]);
        let a = AlgebraElement::from_matrix(DMatrix::from_fn(2, 2, |r, c| C64::new((r * 2 + c) as f64, 1.0)));
        let img = t.connecting(0, 1).unwrap().apply_element(&a).unwrap();
        let b = img.block(0);
        assert_eq!(b.view((0, 0), (2, 2)), a.block(0).view((0, 0), (2, 2)));
        assert_eq!(b.view((2, 2), (2, 2)), a.block(0).view((0, 0), (2, 2)));
        assert!(b.view((0, 2), (2, 2)).iter().all(|z| z.norm() == 0.0));
        assert!(t.functoriality_residual().unwrap() <= 1e-12);
    }

    #[test]
    fn bookkeeping_errors() {
        let m2 = SemisimpleAlgebra::matrix(2).unwrap();
        let half = AfStep::Explicit {
            multiplicities: Multiplicities::Flat(vec![1.5]),
            target: Some(SemisimpleAlgebra::matrix(3).unwrap()),
        };
        assert!(matches!(build_af_tower(m2.clone(), &[half]), Err(Error::InvalidTower(_))));
        let wrong = AfStep::Explicit {
            multiplicities: Multiplicities::Flat(vec![1.0]),
            target: Some(SemisimpleAlgebra::matrix(3).unwrap()),
        };
        assert!(build_af_tower(m2.clone(), &[wrong]).is_err());
        let real = AfStep::Explicit {
            multiplicities: Multiplicities::Flat(vec![1.0]),
            target: Some(SemisimpleAlgebra::new(vec![Block::real(2)]).unwrap()),
        };
        assert!(build_af_tower(m2, &[real]).is_err());
    }

    #[test]
    fn mixed_multiplicities() {
        // C + M2 -> M3 + M5 with m = [[1, 1], [1, 2]]
        let src = SemisimpleAlgebra::new(vec![Block::complex(1), Block::complex(2)]).unwrap();
        let step = AfStep::Pattern(Multiplicities::Matrix(vec![vec![1.0, 1.0], vec![1.0, 2.0]]));
        let t = build_af_tower(src, &[step]).unwrap();
        assert_eq!(t.top().blocks().iter().map(|b| b.n).collect::<Vec<_>>(), vec![3, 5]);
    }

    #[test]
    fn surjective_towers() {
        let m2 = Block::complex(2);
        let pair = SemisimpleAlgebra::new(vec![m2, m2]).unwrap();
        let t = build_surjective_tower(pair, &[vec![0]]).unwrap();
        assert_eq!(t.top(), &SemisimpleAlgebra::matrix(2).unwrap());

        let mixed = SemisimpleAlgebra::new(vec![m2, Block::complex(3)]).unwrap();
        let t = build_surjective_tower(mixed, &[vec![1], vec![0]]).unwrap();
        assert_eq!(t.top(), &SemisimpleAlgebra::matrix(3).unwrap());
        assert!(t.functoriality_residual().unwrap() <= 1e-12);

        let same = SemisimpleAlgebra::matrix(2).unwrap();
        let t = build_surjective_tower(same.clone(), &[vec![0], vec![0]]).unwrap();
        assert_eq!(t.structure_map(0).unwrap(), LinearMap::identity(&same));
        assert!(build_surjective_tower(same.clone(), &[vec![0, 0]]).is_err());
        assert!(build_surjective_tower(same, &[vec![1]]).is_err());
    }

    #[test]
    fn validation_rejects_non_isometric_maps() {
        let c = SemisimpleAlgebra::scalars();
        let c2 = SemisimpleAlgebra::new(vec![Block::complex(1), Block::complex(1)]).unwrap();
        // projection C + C -> C is a unital morphism but not isometric
        let p = block_projection(&c2, &[0]).unwrap();
        assert!(Tower::new(vec![c2.clone(), c.clone()], vec![p.clone()], TowerKind::Isometric).is_err());
        assert!(Tower::new(vec![c2, c], vec![p], TowerKind::Surjective).is_ok());
    }

    #[test]
    fn spec_json() {
        let spec: TowerSpec = serde_json::from_str(
            r#"{"kind":"af","base":{"blocks":[{"field":"complex","n":2}]},"steps":[[2],[2]]}"#,
        )
        .unwrap();
        assert_eq!(Tower::from_spec(&spec).unwrap(), diag_tower());
        let spec: TowerSpec = serde_json::from_str(
            r#"{"kind":"surjective","base":{"blocks":[{"field":"complex","n":2},{"field":"real","n":1}]},"steps":[[1]]}"#,
        )
        .unwrap();
        assert_eq!(Tower::from_spec(&spec).unwrap().top().blocks(), &[Block::real(1)]);
    }
}

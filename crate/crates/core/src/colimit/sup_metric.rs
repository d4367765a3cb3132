use serde::{Deserialize, Serialize};

use super::{Tower, TowerKind};
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::measure::FiniteMetricSpace;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupMetricCheck {
    /// `sup_p |iota_i f(p) - iota_i g(p)|` in the top stage.
    pub lhs: f64,
    /// `inf_{j >= i} sup_p |iota_{j,i} f(p) - iota_{j,i} g(p)|`.
    pub rhs: f64,
    pub gap: f64,
}

/// Compares the sup distance of two maps `K -> A_i` after pushing them to
/// the top with the infimum over the intermediate stages. The two agree
/// on isometric towers.
pub fn check_sup_metric_equality(
    k: &FiniteMetricSpace,
    tower: &Tower,
    stage: usize,
    f: &[AlgebraElement],
    g: &[AlgebraElement],
) -> Result<SupMetricCheck> {
    if tower.kind() != TowerKind::Isometric {
        return Err(Error::Precondition("sup-metric equality is only asserted for isometric towers".into()));
    }
    if stage > tower.top_index() {
        return Err(Error::Precondition(format!("stage {stage} is beyond the top of the tower")));
    }
    if f.len() != k.len() || g.len() != k.len() {
        return Err(Error::ShapeMismatch(format!(
            "maps have {} and {} values on a space of {} points",
            f.len(),
            g.len(),
            k.len()
        )));
    }
    let a = tower.stage(stage);
    for x in f.iter().chain(g) {
        a.check(x)?;
    }
    let sup_at = |j: usize| -> Result<f64> {
        let map = tower.connecting(stage, j)?;
        let mut worst: f64 = 0.0;
        for (x, y) in f.iter().zip(g) {
            worst = worst.max(map.apply_element(x)?.distance(&map.apply_element(y)?));
        }
        Ok(worst)
    };
    let lhs = sup_at(tower.top_index())?;
    let mut rhs = f64::INFINITY;
    for j in stage..=tower.top_index() {
        rhs = rhs.min(sup_at(j)?);
    }
    if k.is_empty() {
        rhs = 0.0;
    }
    Ok(SupMetricCheck { lhs, rhs, gap: (lhs - rhs).abs() })
}

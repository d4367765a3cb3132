//! Correction engines that turn approximately multiplicative maps into
//! exact algebra morphisms, and nearby representations into conjugates.

mod defect;
mod haar;
mod intertwiner;
mod newton;
mod polar;
mod self_adjoint;

use serde::{Deserialize, Serialize};

use crate::algebra::LinearMap;

pub use defect::{basis_defect, bilinear_defect, DefectReport};
pub use haar::haar_correct;
pub use intertwiner::{average_intertwiner, unitarize_conjugation};
pub use newton::{newton_correct, newton_correct_with};
pub use polar::polar_decompose;
pub use self_adjoint::self_adjoint_part;

/// Knobs shared by [`newton_correct_with`] and [`haar_correct`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorrectionConfig {
    /// Stop once the basis defect is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Inputs whose initial defect exceeds this are refused by
    /// [`haar_correct`].
    pub admissible_defect: f64,
    /// Declare divergence after this many consecutive defect increases.
    pub divergence_window: usize,
    /// Force (`Some(true)`) or forbid unitary mode; `None` follows the input.
    pub unitary: Option<bool>,
}

impl Default for CorrectionConfig {
    fn default() -> Self {
        CorrectionConfig {
            tol: crate::tolerance::ALGEBRAIC,
            max_iter: 50,
            admissible_defect: 0.2,
            divergence_window: 3,
            unitary: None,
        }
    }
}

/// Iteration history of one correction run.
#[derive(Clone, Debug, Serialize)]
pub struct CorrectionTrace {
    pub iterations: usize,
    /// Basis defect before the first step and after every step.
    pub defects: Vec<f64>,
    pub converged: bool,
    /// `max_b |Psi_final(b) - Psi_0(b)|` over the source basis.
    pub distance_to_input: f64,
    /// `distance_to_input / defects[0]` when the initial defect is nonzero.
    pub stability_constant: Option<f64>,
    /// `|Psi_final(1) - 1|`.
    pub unit_residual: f64,
    #[serde(skip)]
    pub map: LinearMap,
}

impl CorrectionTrace {
    pub fn last_defect(&self) -> f64 {
        self.defects.last().copied().unwrap_or(f64::NAN)
    }

    /// Largest `defects[n+1] / defects[n]^2` over steps that start below
    /// `below` and end above the round-off floor `floor`.
    pub fn quadratic_constant(&self, below: f64, floor: f64) -> Option<f64> {
        self.defects
            .windows(2)
            .filter(|w| w[0] < below && w[0] > 0.0 && w[1] > floor)
            .map(|w| w[1] / (w[0] * w[0]))
            .reduce(f64::max)
    }

    /// `iteration,defect` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,defect\n");
        for (i, d) in self.defects.iter().enumerate() {
            out.push_str(&format!("{i},{d:e}\n"));
        }
        out
    }
}

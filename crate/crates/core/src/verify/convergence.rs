//! Finite-difference against closed-form `∇J` as the step shrinks.

use serde::{Deserialize, Serialize};

use super::sampling::{stream_seed, IDENTITY_DOMAIN_BASE};
use crate::connection::{Connection, DerivativePath};
use crate::error::{Error, Result};
use crate::geometry::{adapted_frame, AlmostHermitianBackend, DerivativeOracle, FdSettings, ManifoldPoint};

/// Largest `‖(∇_{E_a} J) E_b‖` discrepancy between the two paths at each step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub steps: Vec<f64>,
    pub discrepancies: Vec<f64>,
}

impl ConvergenceStudy {
    /// `discrepancy(h_i) / discrepancy(h_{i+1})` for consecutive steps.
    pub fn ratios(&self) -> Vec<f64> {
        self.discrepancies.windows(2).map(|w| w[0] / w[1]).collect()
    }

    /// `discrepancy / h²` per step.
    pub fn constants(&self) -> Vec<f64> {
        self.steps
            .iter()
            .zip(&self.discrepancies)
            .map(|(h, d)| d / (h * h))
            .collect()
    }
}

/// Compares central-difference `∇J` with the closed form over random adapted
/// frames at `points`, one frame per point.
pub fn fd_convergence(
    b: &dyn AlmostHermitianBackend,
    points: &[ManifoldPoint],
    steps: &[f64],
    seed: u64,
) -> Result<ConvergenceStudy> {
    if b.exact().is_none() {
        return Err(Error::Config(format!(
            "backend `{}` has no closed-form connection",
            b.name()
        )));
    }
    let exact = Connection::new(b).with_path(DerivativePath::Exact);
    let frames = points
        .iter()
        .enumerate()
        .map(|(i, p)| adapted_frame(b, p, stream_seed(seed, IDENTITY_DOMAIN_BASE, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let discrepancies = steps
        .iter()
        .map(|&h| {
            let fd = Connection::new(b)
                .with_path(DerivativePath::FiniteDifference)
                .with_oracle(DerivativeOracle::new(FdSettings::central(h)));
            let mut worst: f64 = 0.0;
            for f in &frames {
                let q = f.base();
                for x in f.vectors() {
                    for y in f.vectors() {
                        let d = fd.nabla_j(q, x, y) - exact.nabla_j(q, x, y);
                        worst = worst.max(d.norm());
                    }
                }
            }
            worst
        })
        .collect();
    Ok(ConvergenceStudy {
        steps: steps.to_vec(),
        discrepancies,
    })
}

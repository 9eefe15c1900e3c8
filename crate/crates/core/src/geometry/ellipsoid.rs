use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::octonion::{cross_matrix, Mat7, Vec7};
use super::{AlmostHermitianBackend, BackendKind, ManifoldPoint};
use crate::error::{Error, Result};

/// The ellipsoid `diag(1 + δ, 1, ..., 1)·S⁶` with induced metric and the
/// octonionic structure corrected pointwise to an orthogonal complex structure.
///
/// With `A = P (q̂ ×) P` (skew, `A ν = 0`) the corrected structure is
/// `J = A (ννᵀ - A²)^{-1/2}`, the orthogonal polar factor of `A` on `T_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid {
    delta: f64,
    inv_axes_sq: [f64; 7],
}

impl Ellipsoid {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::DeltaOutOfRange(delta));
        }
        let mut inv_axes_sq = [1.0; 7];
        inv_axes_sq[0] = 1.0 / ((1.0 + delta) * (1.0 + delta));
        Ok(Ellipsoid { delta, inv_axes_sq })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn quadratic(&self, u: &Vec7) -> f64 {
        (0..7).map(|i| u[i] * u[i] * self.inv_axes_sq[i]).sum()
    }

    fn gradient(&self, u: &Vec7) -> Vec7 {
        Vec7::from_fn(|i, _| 2.0 * u[i] * self.inv_axes_sq[i])
    }
}

impl AlmostHermitianBackend for Ellipsoid {
    fn name(&self) -> &str {
        "perturbed"
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Perturbed
    }

    fn retract(&self, u: &Vec7) -> Vec7 {
        u / self.quadratic(u).sqrt()
    }

    fn retract_jacobian(&self, u: &Vec7) -> Mat7 {
        let qf = self.quadratic(u);
        let s = qf.sqrt();
        Mat7::identity() / s - u * self.gradient(u).transpose() / (2.0 * qf * s)
    }

    fn unit_normal(&self, q: &Vec7) -> Vec7 {
        self.gradient(q).normalize()
    }

    fn j_matrix(&self, q: &Vec7) -> Mat7 {
        let n = self.unit_normal(q);
        let p = Mat7::identity() - n * n.transpose();
        let a = p * cross_matrix(&q.normalize()) * p;
        let m = n * n.transpose() - a * a;
        let eig = m.symmetric_eigen();
        let inv_sqrt = eig.eigenvectors
            * Mat7::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
            * eig.eigenvectors.transpose();
        a * inv_sqrt
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> ManifoldPoint {
        loop {
            let raw = Vec7::from_fn(|_, _| StandardNormal.sample(rng));
            let n = raw.norm();
            if n > 1e-6 {
                let mut v = raw / n;
                v[0] *= 1.0 + self.delta;
                return ManifoldPoint::new(v, BackendKind::Perturbed);
            }
        }
    }

    fn constraint_residual(&self, q: &Vec7) -> f64 {
        (self.quadratic(q) - 1.0).abs()
    }
}

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::octonion::{cross, cross_matrix, phi, Mat7, Vec7};
use super::{AlmostHermitianBackend, BackendKind, ExactGeometry, ManifoldPoint};
use crate::error::{Error, Result};

/// Round sphere of radius `r` in R^7 with `J_q(v) = q̂ × v`, extended off the
/// sphere as a degree-0 homogeneous field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundSphere {
    radius: f64,
}

impl RoundSphere {
    pub fn unit() -> Self {
        RoundSphere { radius: 1.0 }
    }

    pub fn new(radius: f64) -> Result<Self> {
        if radius.is_finite() && radius > 0.0 {
            Ok(RoundSphere { radius })
        } else {
            Err(Error::InvalidRadius(radius))
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn unit_point(q: &Vec7) -> Vec7 {
        q / q.norm()
    }
}

impl AlmostHermitianBackend for RoundSphere {
    fn name(&self) -> &str {
        "s6"
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Sphere
    }

    fn retract(&self, u: &Vec7) -> Vec7 {
        u * (self.radius / u.norm())
    }

    fn retract_jacobian(&self, u: &Vec7) -> Mat7 {
        let n = u.norm();
        let uh = u / n;
        (Mat7::identity() - uh * uh.transpose()) * (self.radius / n)
    }

    fn unit_normal(&self, q: &Vec7) -> Vec7 {
        Self::unit_point(q)
    }

    fn j_matrix(&self, q: &Vec7) -> Mat7 {
        cross_matrix(&Self::unit_point(q))
    }

    fn j(&self, q: &Vec7, v: &Vec7) -> Vec7 {
        cross(&Self::unit_point(q), v)
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> ManifoldPoint {
        loop {
            let raw = Vec7::from_fn(|_, _| StandardNormal.sample(rng));
            let n = raw.norm();
            if n > 1e-6 {
                return ManifoldPoint::new(raw * (self.radius / n), BackendKind::Sphere);
            }
        }
    }

    fn constraint_residual(&self, q: &Vec7) -> f64 {
        (q.norm() - self.radius).abs()
    }

    fn exact(&self) -> Option<&dyn ExactGeometry> {
        Some(self)
    }
}

impl ExactGeometry for RoundSphere {
    // (∇_X J)Y = (1/r) P(X × Y)
    fn nabla_j(&self, q: &Vec7, x: &Vec7, y: &Vec7) -> Vec7 {
        let n = Self::unit_point(q);
        let (x, y) = (x - n * n.dot(x), y - n * n.dot(y));
        let c = cross(&x, &y);
        (c - n * n.dot(&c)) / self.radius
    }

    fn nabla2_j(&self, q: &Vec7, w: &Vec7, x: &Vec7, y: &Vec7) -> Vec7 {
        let n = Self::unit_point(q);
        let proj = |v: &Vec7| v - n * n.dot(v);
        let (w, x, y) = (proj(w), proj(x), proj(y));
        let jx = cross(&n, &x);
        let jy = cross(&n, &y);
        let out = jy * w.dot(&x) - jx * w.dot(&y) + w * phi(&x, &y, &n);
        -out / (self.radius * self.radius)
    }

    fn curvature(&self, q: &Vec7, x: &Vec7, y: &Vec7, z: &Vec7) -> Vec7 {
        let n = Self::unit_point(q);
        let proj = |v: &Vec7| v - n * n.dot(v);
        let (x, y, z) = (proj(x), proj(y), proj(z));
        (x * y.dot(&z) - y * x.dot(&z)) / (self.radius * self.radius)
    }
}

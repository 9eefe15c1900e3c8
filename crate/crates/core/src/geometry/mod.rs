//! Almost Hermitian six-manifold backends.
//!
//! Every backend is a hypersurface of Euclidean R^7 carrying the induced
//! metric: the round sphere of radius `r`, the flat hyperplane `x7 = 0`, and an
//! ellipsoid. Points and tangent vectors are stored as ambient `Vec7`
//! coordinates; a tangent vector at `q` is any ambient vector orthogonal to the
//! unit normal at `q`. Ambient tensor fields are kept "projected": they vanish
//! on normal inputs and take tangent values, so covariant derivatives are
//! tangential projections of ambient directional derivatives.

mod derivative;
mod ellipsoid;
mod flat;
mod frame;
pub mod octonion;
mod sphere;

use std::fmt::Debug;

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

pub use derivative::{DerivativeOracle, FdScheme, FdSettings, FdValue};
pub use ellipsoid::Ellipsoid;
pub use flat::FlatKahler;
pub use frame::{adapted_frame, AdaptedFrame, Chart};
pub use octonion::{Mat7, Vec7};
pub use sphere::RoundSphere;

use crate::error::Result;

/// Tag identifying which backend produced a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Sphere,
    Flat,
    Perturbed,
}

/// A point of a backend manifold in ambient coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldPoint {
    coords: Vec7,
    kind: BackendKind,
}

impl ManifoldPoint {
    pub fn new(coords: Vec7, kind: BackendKind) -> Self {
        ManifoldPoint { coords, kind }
    }

    pub fn ambient(&self) -> &Vec7 {
        &self.coords
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    /// Coordinates in the backend's own ambient space: 7 numbers for the
    /// sphere and ellipsoid, 6 for flat space.
    pub fn coords(&self) -> &[f64] {
        match self.kind {
            BackendKind::Flat => &self.coords.as_slice()[..6],
            _ => self.coords.as_slice(),
        }
    }
}

/// Closed-form connection data, used in place of finite differences.
/// Arguments are ambient vectors and are projected to `T_q` first.
pub trait ExactGeometry: Send + Sync {
    /// `(∇_X J) Y`.
    fn nabla_j(&self, q: &Vec7, x: &Vec7, y: &Vec7) -> Vec7;
    /// `(∇²_{W,X} J) Y`.
    fn nabla2_j(&self, q: &Vec7, w: &Vec7, x: &Vec7, y: &Vec7) -> Vec7;
    /// `R(X, Y) Z`.
    fn curvature(&self, q: &Vec7, x: &Vec7, y: &Vec7, z: &Vec7) -> Vec7;
}

/// An almost Hermitian structure `(g, J)` on a hypersurface of R^7.
pub trait AlmostHermitianBackend: Send + Sync + Debug {
    fn name(&self) -> &str;

    fn kind(&self) -> BackendKind;

    fn ambient_dim(&self) -> usize {
        7
    }

    /// Smooth map from a neighbourhood of the manifold onto it, equal to the
    /// identity on the manifold with differential `P_q` there. Charts are
    /// `x ↦ retract(p + Σ xᵢ bᵢ)`.
    fn retract(&self, u: &Vec7) -> Vec7;

    /// Differential of [`Self::retract`] at `u`.
    fn retract_jacobian(&self, u: &Vec7) -> Mat7;

    /// Unit normal of the hypersurface at `q`.
    fn unit_normal(&self, q: &Vec7) -> Vec7;

    /// `J_q` as an ambient matrix with `J = P J P`.
    fn j_matrix(&self, q: &Vec7) -> Mat7;

    fn sample_point(&self, rng: &mut dyn RngCore) -> ManifoldPoint;

    /// Distance-like residual of the defining equation at `q`.
    fn constraint_residual(&self, q: &Vec7) -> f64;

    fn exact(&self) -> Option<&dyn ExactGeometry> {
        None
    }

    /// Orthogonal projector onto `T_q`.
    fn projector(&self, q: &Vec7) -> Mat7 {
        let n = self.unit_normal(q);
        Mat7::identity() - n * n.transpose()
    }

    fn project(&self, q: &Vec7, v: &Vec7) -> Vec7 {
        let n = self.unit_normal(q);
        v - n * n.dot(v)
    }

    /// Induced metric.
    fn metric(&self, _q: &Vec7, u: &Vec7, v: &Vec7) -> f64 {
        u.dot(v)
    }

    fn j(&self, q: &Vec7, v: &Vec7) -> Vec7 {
        self.j_matrix(q) * v
    }

    /// Fundamental two-form `σ(X, Y) = g(JX, Y)`.
    fn sigma(&self, q: &Vec7, x: &Vec7, y: &Vec7) -> f64 {
        self.metric(q, &self.j(q, &self.project(q, x)), y)
    }

    /// A Gaussian random vector projected to `T_q` and normalised.
    fn random_unit_tangent(&self, q: &Vec7, rng: &mut dyn RngCore) -> Vec7 {
        loop {
            let raw = Vec7::from_fn(|_, _| StandardNormal.sample(rng));
            let t = self.project(q, &raw);
            let n = t.norm();
            if n > 1e-8 {
                return t / n;
            }
        }
    }
}

/// Unit round S⁶ with the octonionic almost complex structure.
pub fn backend_s6() -> RoundSphere {
    RoundSphere::unit()
}

/// Round S⁶ of the given radius.
pub fn backend_s6_radius(radius: f64) -> Result<RoundSphere> {
    RoundSphere::new(radius)
}

/// Flat R⁶ with the constant complex structure `J0`.
pub fn backend_flat_kahler() -> FlatKahler {
    FlatKahler
}

/// Ellipsoid `diag(1 + δ, 1, ..., 1)·S⁶` with the polar-corrected octonionic `J`.
pub fn backend_perturbed(delta: f64) -> Result<Ellipsoid> {
    Ellipsoid::new(delta)
}

/// Pointwise checks every backend must satisfy: returns the largest of
/// `|g - gᵀ|`-type residuals for `J² = -1`, `g(J·,J·) = g` and tangency of `J`,
/// together with the smallest metric eigenvalue on `T_q`.
pub fn structure_residuals(b: &dyn AlmostHermitianBackend, q: &Vec7) -> StructureResiduals {
    let p = b.projector(q);
    let j = b.j_matrix(q);
    let n = b.unit_normal(q);
    let j_squared = (j * j + p).abs().max();
    // induced metric restricted to T_q is the identity on an orthonormal basis
    let compat = (j.transpose() * j - p).abs().max();
    let tangency = (j * n).norm().max((n.transpose() * j).norm());
    let eig = p.symmetric_eigen();
    let mut evals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    evals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    StructureResiduals {
        j_squared,
        compatibility: compat,
        tangency,
        // the smallest eigenvalue belongs to the normal direction
        min_metric_eigenvalue: evals[1],
        on_manifold: b.constraint_residual(q),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureResiduals {
    pub j_squared: f64,
    pub compatibility: f64,
    pub tangency: f64,
    pub min_metric_eigenvalue: f64,
    pub on_manifold: f64,
}

impl StructureResiduals {
    pub fn max_residual(&self) -> f64 {
        self.j_squared.max(self.compatibility).max(self.tangency)
    }
}

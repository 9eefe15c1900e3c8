//! Levi-Civita and canonical Hermitian connection data at a point.
//!
//! All tensors are evaluated on ambient vectors, which are first projected to
//! the tangent space. Covariant derivatives of a projected tensor field `T`
//! are `P_q (D_X T)`, with `D_X` the ambient directional derivative of `T`
//! evaluated on fixed ambient arguments. Backends with closed-form connection
//! data use it unless the finite-difference path is requested explicitly.

mod curvature;
mod fields;
mod forms;

use serde::{Deserialize, Serialize};

use crate::exterior6::{KForm, Vector6};
use crate::geometry::{AdaptedFrame, AlmostHermitianBackend, DerivativeOracle, ExactGeometry, Vec7};

pub(crate) use curvature::with_j;
pub use curvature::{CurvatureRecord, Rank4};
pub use fields::{constant_field, j_field, CoefficientField};
pub use forms::FormField;

/// Tolerances for first-order, curvature-level and third-order identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tier1: f64,
    pub tier2: f64,
    pub tier3: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tier1: 1e-6,
            tier2: 1e-5,
            tier3: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    One,
    Two,
    Three,
}

impl Tolerances {
    pub fn get(&self, tier: Tier) -> f64 {
        match tier {
            Tier::One => self.tier1,
            Tier::Two => self.tier2,
            Tier::Three => self.tier3,
        }
    }
}

/// Where `∇J`, `∇²J` and `R` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativePath {
    Exact,
    FiniteDifference,
}

/// How the finite-difference path computes `R(X, Y) Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureRoute {
    /// `∇²_{X,Y} Z − ∇²_{Y,X} Z` for a projected constant field `Z`.
    Commutator,
    /// Gauss equation with the shape operator of the hypersurface.
    Gauss,
}

/// Connection calculator bound to one backend.
#[derive(Clone, Copy)]
pub struct Connection<'a> {
    backend: &'a dyn AlmostHermitianBackend,
    oracle: DerivativeOracle,
    path: DerivativePath,
    route: CurvatureRoute,
}

impl std::fmt::Debug for Connection<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Connection")
            .field("backend", &self.backend.name())
            .field("oracle", &self.oracle)
            .field("path", &self.path)
            .field("route", &self.route)
            .finish()
    }
}

impl<'a> Connection<'a> {
    /// Exact path when the backend has closed forms, finite differences otherwise.
    pub fn new(backend: &'a dyn AlmostHermitianBackend) -> Self {
        let path = if backend.exact().is_some() {
            DerivativePath::Exact
        } else {
            DerivativePath::FiniteDifference
        };
        Connection {
            backend,
            oracle: DerivativeOracle::default(),
            path,
            route: CurvatureRoute::Commutator,
        }
    }

    pub fn with_oracle(mut self, oracle: DerivativeOracle) -> Self {
        self.oracle = oracle;
        self
    }

    /// Requesting [`DerivativePath::Exact`] on a backend without closed forms
    /// falls back to finite differences.
    pub fn with_path(mut self, path: DerivativePath) -> Self {
        self.path = match path {
            DerivativePath::Exact if self.backend.exact().is_none() => {
                DerivativePath::FiniteDifference
            }
            p => p,
        };
        self
    }

    pub fn with_route(mut self, route: CurvatureRoute) -> Self {
        self.route = route;
        self
    }

    pub fn backend(&self) -> &'a dyn AlmostHermitianBackend {
        self.backend
    }

    pub fn oracle(&self) -> &DerivativeOracle {
        &self.oracle
    }

    pub fn path(&self) -> DerivativePath {
        self.path
    }

    fn exact(&self) -> Option<&'a dyn ExactGeometry> {
        match self.path {
            DerivativePath::Exact => self.backend.exact(),
            DerivativePath::FiniteDifference => None,
        }
    }

    fn project(&self, q: &Vec7, v: &Vec7) -> Vec7 {
        self.backend.project(q, v)
    }

    /// `(∇_X J) Y`.
    pub fn nabla_j(&self, q: &Vec7, x: &Vec7, y: &Vec7) -> Vec7 {
        if let Some(e) = self.exact() {
            return e.nabla_j(q, x, y);
        }
        let b = self.backend;
        let x = self.project(q, x);
        let y = self.project(q, y);
        let d = self
            .oracle
            .along(b, q, &[x], |c| b.j(c, &y))
            .expect("first-order stencil");
        self.project(q, &d)
    }

    /// `∇σ(X, Y, Z) = g((∇_X J) Y, Z)`.
    pub fn nabla_sigma(&self, q: &Vec7, x: &Vec7, y: &Vec7, z: &Vec7) -> f64 {
        self.nabla_j(q, x, y).dot(&self.project(q, z))
    }

    /// `(∇²_{W,X} J) Y`, the covariant derivative of the tensor `∇J`.
    pub fn nabla2_j(&self, q: &Vec7, w: &Vec7, x: &Vec7, y: &Vec7) -> Vec7 {
        if let Some(e) = self.exact() {
            return e.nabla2_j(q, w, x, y);
        }
        let b = self.backend;
        let w = self.project(q, w);
        let x = self.project(q, x);
        let y = self.project(q, y);
        let d = self
            .oracle
            .along(b, q, &[w], |c| self.nabla_j(c, &x, &y))
            .expect("first-order stencil");
        self.project(q, &d)
    }

    /// `∇²σ(W, X, Y, Z) = g((∇²_{W,X} J) Y, Z)`.
    pub fn nabla2_sigma(&self, q: &Vec7, w: &Vec7, x: &Vec7, y: &Vec7, z: &Vec7) -> f64 {
        self.nabla2_j(q, w, x, y).dot(&self.project(q, z))
    }

    /// `∇_Y Z` at `c` for the projected constant field `Z = P z`.
    fn nabla_constant_field(&self, c: &Vec7, y: &Vec7, z: &Vec7) -> Vec7 {
        let b = self.backend;
        let y = self.project(c, y);
        let d = self
            .oracle
            .along(b, c, &[y], |m| b.project(m, z))
            .expect("first-order stencil");
        self.project(c, &d)
    }

    /// Shape operator `S(v) = −D_v ν` at `q`.
    pub fn shape_operator(&self, q: &Vec7, v: &Vec7) -> Vec7 {
        let b = self.backend;
        let v = self.project(q, v);
        let d = self
            .oracle
            .along(b, q, &[v], |m| b.unit_normal(m))
            .expect("first-order stencil");
        -self.project(q, &d)
    }

    /// `R(X, Y) Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_{[X,Y]} Z`.
    pub fn curvature(&self, q: &Vec7, x: &Vec7, y: &Vec7, z: &Vec7) -> Vec7 {
        if let Some(e) = self.exact() {
            return e.curvature(q, x, y, z);
        }
        let b = self.backend;
        let x = self.project(q, x);
        let y = self.project(q, y);
        let z = self.project(q, z);
        match self.route {
            CurvatureRoute::Commutator => {
                let second = |a: &Vec7, bb: &Vec7| {
                    let d = self
                        .oracle
                        .along(b, q, &[*a], |c| self.nabla_constant_field(c, bb, &z))
                        .expect("first-order stencil");
                    self.project(q, &d)
                };
                second(&x, &y) - second(&y, &x)
            }
            CurvatureRoute::Gauss => {
                let sx = self.shape_operator(q, &x);
                let sy = self.shape_operator(q, &y);
                sx * sy.dot(&z) - sy * sx.dot(&z)
            }
        }
    }

    /// `R(W, X, Y, Z) = g(R(W, X) Y, Z)`.
    pub fn riemann4(&self, q: &Vec7, w: &Vec7, x: &Vec7, y: &Vec7, z: &Vec7) -> f64 {
        self.curvature(q, w, x, y).dot(&self.project(q, z))
    }

    /// `(Ric(X, Y), Ric*(X, Y))`, traced over the projected ambient basis.
    pub fn ricci_pair(&self, q: &Vec7, x: &Vec7, y: &Vec7) -> (f64, f64) {
        let b = self.backend;
        let y = self.project(q, y);
        let jy = b.j(q, &y);
        let mut ric = 0.0;
        let mut ric_star = 0.0;
        for a in 0..7 {
            let mut e = Vec7::zeros();
            e[a] = 1.0;
            let e = self.project(q, &e);
            let je = b.j(q, &e);
            let r_e = |z: &Vec7| self.curvature(q, x, &e, z);
            ric += r_e(&e).dot(&y);
            ric_star += r_e(&je).dot(&jy);
        }
        (ric, ric_star)
    }

    /// `g((Ric − Ric*) X, Y)`.
    pub fn ric_minus_ric_star(&self, q: &Vec7, x: &Vec7, y: &Vec7) -> f64 {
        let (r, rs) = self.ricci_pair(q, x, y);
        r - rs
    }

    /// `g((∇_Z (Ric − Ric*)) X, Y)`, by differencing the traced tensor field
    /// with the third-order step.
    pub fn nabla_ric_difference(&self, q: &Vec7, z: &Vec7, x: &Vec7, y: &Vec7) -> f64 {
        let b = self.backend;
        let z = self.project(q, z);
        let x = self.project(q, x);
        let y = self.project(q, y);
        self.oracle
            .along_with_step(b, q, &[z], self.oracle.step_for(3), |c| {
                self.ric_minus_ric_star(c, &x, &y)
            })
            .expect("first-order stencil")
    }

    /// Difference tensor of the canonical Hermitian connection,
    /// `D_X Y = −½ J (∇_X J) Y`.
    pub fn hermitian_difference(&self, q: &Vec7, x: &Vec7, y: &Vec7) -> Vec7 {
        -0.5 * self.backend.j(q, &self.nabla_j(q, x, y))
    }

    /// `∇σ` over all frame triples.
    pub fn nabla_sigma_frame(&self, frame: &AdaptedFrame) -> NablaSigma {
        let q = frame.base();
        let e = frame.vectors();
        let mut values = [[[0.0; 6]; 6]; 6];
        for a in 0..6 {
            for b in 0..6 {
                let v = self.nabla_j(q, &e[a], &e[b]);
                for c in 0..6 {
                    values[a][b][c] = v.dot(&e[c]);
                }
            }
        }
        NablaSigma { values }
    }
}

/// Frame components `∇σ(E_a, E_b, E_c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NablaSigma {
    pub values: [[[f64; 6]; 6]; 6],
}

impl NablaSigma {
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.values[a][b][c]
    }

    /// Evaluation on model-basis vectors.
    pub fn eval(&self, x: &Vector6, y: &Vector6, z: &Vector6) -> f64 {
        let mut s = 0.0;
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    s += self.values[a][b][c] * x.0[a] * y.0[b] * z.0[c];
                }
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .flatten()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Largest deviation from total antisymmetry.
    pub fn skew_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    let v = self.values[a][b][c];
                    worst = worst
                        .max((v + self.values[b][a][c]).abs())
                        .max((v + self.values[a][c][b]).abs())
                        .max((v + self.values[c][b][a]).abs());
                }
            }
        }
        worst
    }

    /// The alternating part `Alt(∇σ)` as a 3-form, with
    /// `Alt(∇σ)(e_a, e_b, e_c)` the average over permutations.
    pub fn alternation(&self) -> KForm {
        KForm::from_fn(3, |t| {
            let (a, b, c) = (t[0], t[1], t[2]);
            let v = &self.values;
            (v[a][b][c] + v[b][c][a] + v[c][a][b] - v[b][a][c] - v[a][c][b] - v[c][b][a]) / 6.0
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        adapted_frame, backend_flat_kahler, backend_perturbed, backend_s6, backend_s6_radius,
        AlmostHermitianBackend, Chart, ManifoldPoint,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(b: &dyn AlmostHermitianBackend, seed: u64) -> (ManifoldPoint, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (b.sample_point(&mut rng), rng)
    }

    #[test]
    fn fd_matches_closed_forms_on_the_sphere() {
        let b = backend_s6();
        let exact = Connection::new(&b);
        let fd = Connection::new(&b).with_path(DerivativePath::FiniteDifference);
        let gauss = fd.with_route(CurvatureRoute::Gauss);
        assert_eq!(exact.path(), DerivativePath::Exact);
        for seed in 0..5 {
            let (p, mut rng) = setup(&b, seed);
            let q = p.ambient();
            let [w, x, y] = std::array::from_fn(|_| b.random_unit_tangent(q, &mut rng));
            let e1 = (fd.nabla_j(q, &x, &y) - exact.nabla_j(q, &x, &y)).norm();
            let e2 = (fd.nabla2_j(q, &w, &x, &y) - exact.nabla2_j(q, &w, &x, &y)).norm();
            assert!(e1 < 1e-5, "{e1}");
            assert!(e2 < 1e-5, "{e2}");
            let r = exact.curvature(q, &w, &x, &y);
            let e = (fd.curvature(q, &w, &x, &y) - r).norm();
            let eg = (gauss.curvature(q, &w, &x, &y) - r).norm();
            assert!(e < 1e-5, "{e}");
            assert!(eg < 1e-5, "{eg}");
        }
    }

    #[test]
    fn exact_request_falls_back_without_closed_forms() {
        let b = backend_perturbed(0.1).unwrap();
        let c = Connection::new(&b).with_path(DerivativePath::Exact);
        assert_eq!(c.path(), DerivativePath::FiniteDifference);
    }

    #[test]
    fn sphere_ricci_scales_with_radius() {
        for r in [1.0, 2.0] {
            let b = backend_s6_radius(r).unwrap();
            let c = Connection::new(&b);
            let (p, mut rng) = setup(&b, 3);
            let q = p.ambient();
            let x = b.random_unit_tangent(q, &mut rng);
            let (ric, ric_star) = c.ricci_pair(q, &x, &x);
            assert!((ric - 5.0 / (r * r)).abs() < 1e-12);
            assert!((ric_star - 1.0 / (r * r)).abs() < 1e-12);
            let rec = c.riemann(&adapted_frame(&b, &p, 0).unwrap()).unwrap();
            assert!((rec.scalar_curvature() - 30.0 / (r * r)).abs() < 1e-12);
            assert!(rec.symmetry_residuals().max() < 1e-14);
        }
    }

    #[test]
    fn perturbed_curvature_routes_agree() {
        let b = backend_perturbed(0.1).unwrap();
        let c = Connection::new(&b);
        let gauss = c.with_route(CurvatureRoute::Gauss);
        let (p, _) = setup(&b, 4);
        let frame = adapted_frame(&b, &p, 1).unwrap();
        let r1 = c.riemann(&frame).unwrap();
        let r2 = gauss.riemann(&frame).unwrap();
        let mut worst: f64 = 0.0;
        for (a, bb) in r1.r4.iter().flatten().flatten().flatten().zip(r2.r4.iter().flatten().flatten().flatten()) {
            worst = worst.max((a - bb).abs());
        }
        assert!(worst < 1e-5, "{worst}");
        assert!(r1.symmetry_residuals().max() < 1e-5);
    }

    #[test]
    fn flat_connection_vanishes() {
        let b = backend_flat_kahler();
        let c = Connection::new(&b).with_path(DerivativePath::FiniteDifference);
        let (p, mut rng) = setup(&b, 5);
        let q = p.ambient();
        let [x, y, z] = std::array::from_fn(|_| b.random_unit_tangent(q, &mut rng));
        assert!(c.nabla_j(q, &x, &y).norm() < 1e-12);
        assert!(c.curvature(q, &x, &y, &z).norm() < 1e-9);
        assert!(c.hat_curvature(q, &x, &y, &z).norm() < 1e-9);
        let chart = Chart::from_frame(&adapted_frame(&b, &p, 0).unwrap());
        assert!(c.nijenhuis(&chart, &x, &y).unwrap().norm() < 1e-10);
    }

    #[test]
    fn levi_civita_is_torsion_free_and_metric() {
        let b = backend_perturbed(0.2).unwrap();
        let c = Connection::new(&b);
        let (p, _) = setup(&b, 6);
        let chart = Chart::from_frame(&adapted_frame(&b, &p, 2).unwrap());
        let u = |x: &[f64; 6]| [1.0 + x[1], x[0], 0.5, -x[2], 0.0, 0.2];
        let v = |x: &[f64; 6]| [0.0, 1.0, x[0] * x[3], 0.3, -0.7, x[5]];
        let w = constant_field([0.2, 0.1, -1.0, 0.0, 0.4, 0.0]);
        assert!(c.torsion(&chart, &u, &v).unwrap().norm() < 1e-6);
        assert!(c.koszul_residual(&chart, &u, &v, &w).unwrap() < 1e-6);
        let br = c.bracket(&u, &v).unwrap();
        let br_rev = c.bracket(&v, &u).unwrap();
        for k in 0..6 {
            assert!((br[k] + br_rev[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn exterior_derivative_of_sigma() {
        let b = backend_flat_kahler();
        let c = Connection::new(&b);
        let (p, _) = setup(&b, 7);
        let chart = Chart::from_frame(&adapted_frame(&b, &p, 0).unwrap());
        let d = c.exterior_derivative(&chart, &FormField::sigma(&b)).unwrap();
        assert!(d.max_abs() < 1e-12);
        let top = FormField::new(6, |_, _| 1.0);
        assert!(matches!(
            c.exterior_derivative(&chart, &top),
            Err(crate::Error::UnsupportedDegree(6, _))
        ));
    }

    #[test]
    fn nabla_sigma_frame_is_skew_on_the_sphere() {
        let b = backend_s6();
        let c = Connection::new(&b);
        let (p, _) = setup(&b, 8);
        let ns = c.nabla_sigma_frame(&adapted_frame(&b, &p, 0).unwrap());
        assert!(ns.skew_residual() < 1e-14);
        // |∇σ|² = Σ_abc over an orthonormal frame = 6 · 4 for μ = 1
        assert!((ns.norm() - 24f64.sqrt()).abs() < 1e-12);
        let alt = ns.alternation();
        assert!((alt.component(&[0, 2, 4]) - ns.get(0, 2, 4)).abs() < 1e-14);
    }
}

use rand::{Rng, RngCore};

use super::octonion::{Mat7, Vec7};
use super::{AlmostHermitianBackend, BackendKind, ExactGeometry, ManifoldPoint};

/// Flat R^6, embedded as the hyperplane `x7 = 0`, with the constant complex
/// structure `J0 e_{2k} = e_{2k+1}`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlatKahler;

fn e7() -> Vec7 {
    Vec7::from_fn(|r, _| if r == 6 { 1.0 } else { 0.0 })
}

impl AlmostHermitianBackend for FlatKahler {
    fn name(&self) -> &str {
        "c3"
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Flat
    }

    fn ambient_dim(&self) -> usize {
        6
    }

    fn retract(&self, u: &Vec7) -> Vec7 {
        let mut v = *u;
        v[6] = 0.0;
        v
    }

    fn retract_jacobian(&self, _u: &Vec7) -> Mat7 {
        let mut m = Mat7::identity();
        m[(6, 6)] = 0.0;
        m
    }

    fn unit_normal(&self, _q: &Vec7) -> Vec7 {
        e7()
    }

    fn j_matrix(&self, _q: &Vec7) -> Mat7 {
        let mut m = Mat7::zeros();
        for k in 0..3 {
            m[(2 * k + 1, 2 * k)] = 1.0;
            m[(2 * k, 2 * k + 1)] = -1.0;
        }
        m
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> ManifoldPoint {
        let mut v = Vec7::from_fn(|_, _| rng.random_range(-1.0..1.0));
        v[6] = 0.0;
        ManifoldPoint::new(v, BackendKind::Flat)
    }

    fn constraint_residual(&self, q: &Vec7) -> f64 {
        q[6].abs()
    }

    fn exact(&self) -> Option<&dyn ExactGeometry> {
        Some(self)
    }
}

impl ExactGeometry for FlatKahler {
    fn nabla_j(&self, _q: &Vec7, _x: &Vec7, _y: &Vec7) -> Vec7 {
        Vec7::zeros()
    }

    fn nabla2_j(&self, _q: &Vec7, _w: &Vec7, _x: &Vec7, _y: &Vec7) -> Vec7 {
        Vec7::zeros()
    }

    fn curvature(&self, _q: &Vec7, _x: &Vec7, _y: &Vec7, _z: &Vec7) -> Vec7 {
        Vec7::zeros()
    }
}

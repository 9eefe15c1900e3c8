use nalgebra::{Matrix6, Vector6 as NVector6};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::octonion::Vec7;
use super::{AlmostHermitianBackend, ManifoldPoint};
use crate::error::{Error, Result};
use crate::exterior6::Vector6;

const MAX_DRAWS: usize = 100;
const DEGENERATE_NORM: f64 = 1e-8;

/// Orthonormal frame `E1, JE1, E2, JE2, E3, JE3` of `T_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptedFrame {
    base: Vec7,
    vectors: [Vec7; 6],
    orientation: i8,
}

impl AdaptedFrame {
    /// Builds a frame from `E1, E2, E3`, filling the odd slots with `J`.
    pub fn from_e(b: &dyn AlmostHermitianBackend, q: &Vec7, e: [Vec7; 3]) -> Result<Self> {
        let mut vectors = [Vec7::zeros(); 6];
        for (k, ek) in e.iter().enumerate() {
            vectors[2 * k] = *ek;
            vectors[2 * k + 1] = b.j(q, ek);
        }
        let frame = AdaptedFrame {
            base: *q,
            vectors,
            orientation: 1,
        };
        let gram = frame.gram_residual();
        if gram > 1e-10 {
            return Err(Error::FrameNotAdapted(format!("gram residual {gram:.3e}")));
        }
        Ok(frame)
    }

    pub fn base(&self) -> &Vec7 {
        &self.base
    }

    pub fn vectors(&self) -> &[Vec7; 6] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &Vec7 {
        &self.vectors[i]
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    /// `max |g(E_a, E_b) − δ_ab|`.
    pub fn gram_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..6 {
            for c in 0..6 {
                let target = if a == c { 1.0 } else { 0.0 };
                worst = worst.max((self.vectors[a].dot(&self.vectors[c]) - target).abs());
            }
        }
        worst
    }

    /// `max ‖J E_{2k} − E_{2k+1}‖`.
    pub fn j_residual(&self, b: &dyn AlmostHermitianBackend) -> f64 {
        (0..3)
            .map(|k| (b.j(&self.base, &self.vectors[2 * k]) - self.vectors[2 * k + 1]).norm())
            .fold(0.0, f64::max)
    }

    /// Model-basis components of a tangent vector.
    pub fn components(&self, v: &Vec7) -> Vector6 {
        Vector6(std::array::from_fn(|i| self.vectors[i].dot(v)))
    }

    /// Tangent vector with the given model-basis components.
    pub fn assemble(&self, c: &Vector6) -> Vec7 {
        self.vectors
            .iter()
            .zip(c.0.iter())
            .fold(Vec7::zeros(), |acc, (e, ci)| acc + e * *ci)
    }

    /// Replaces `(E3, JE3)` by `(−E3, −JE3)` and flips the orientation sign.
    pub fn flipped(&self) -> Self {
        let mut out = *self;
        out.vectors[4] = -out.vectors[4];
        out.vectors[5] = -out.vectors[5];
        out.orientation = -out.orientation;
        out
    }
}

/// Deterministic random adapted frame at `p`.
pub fn adapted_frame(
    b: &dyn AlmostHermitianBackend,
    p: &ManifoldPoint,
    seed: u64,
) -> Result<AdaptedFrame> {
    let q = p.ambient();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<Vec7> = Vec::with_capacity(6);
    let mut e = [Vec7::zeros(); 3];
    for slot in &mut e {
        let mut found = None;
        for _ in 0..MAX_DRAWS {
            let mut v = b.random_unit_tangent(q, &mut rng);
            for c in &chosen {
                v -= c * c.dot(&v);
            }
            // second pass keeps orthogonality at rounding level
            for c in &chosen {
                v -= c * c.dot(&v);
            }
            let n = v.norm();
            if n > DEGENERATE_NORM {
                found = Some(v / n);
                break;
            }
        }
        let v = found.ok_or(Error::DegenerateFrame(MAX_DRAWS))?;
        let jv = b.j(q, &v);
        chosen.push(v);
        chosen.push(jv);
        *slot = v;
    }
    AdaptedFrame::from_e(b, q, e)
}

/// Projection chart `x ↦ retract(p + Σ xᵢ bᵢ)` around `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    base: Vec7,
    basis: [Vec7; 6],
}

impl Chart {
    pub fn new(base: Vec7, basis: [Vec7; 6]) -> Self {
        Chart { base, basis }
    }

    /// Chart whose coordinate vectors at the centre are the frame vectors.
    pub fn from_frame(frame: &AdaptedFrame) -> Self {
        Chart::new(*frame.base(), *frame.vectors())
    }

    pub fn base(&self) -> &Vec7 {
        &self.base
    }

    fn ambient(&self, x: &[f64; 6]) -> Vec7 {
        self.basis
            .iter()
            .zip(x.iter())
            .fold(self.base, |acc, (e, xi)| acc + e * *xi)
    }

    pub fn point(&self, b: &dyn AlmostHermitianBackend, x: &[f64; 6]) -> Vec7 {
        b.retract(&self.ambient(x))
    }

    /// Coordinate vectors `∂/∂xᵢ` at `x`.
    pub fn coordinate_vectors(&self, b: &dyn AlmostHermitianBackend, x: &[f64; 6]) -> [Vec7; 6] {
        let jac = b.retract_jacobian(&self.ambient(x));
        std::array::from_fn(|i| jac * self.basis[i])
    }

    pub fn pushforward(&self, b: &dyn AlmostHermitianBackend, x: &[f64; 6], c: &[f64; 6]) -> Vec7 {
        self.coordinate_vectors(b, x)
            .iter()
            .zip(c.iter())
            .fold(Vec7::zeros(), |acc, (e, ci)| acc + e * *ci)
    }

    /// Chart coefficients of a tangent vector at `x`.
    pub fn coefficients(
        &self,
        b: &dyn AlmostHermitianBackend,
        x: &[f64; 6],
        v: &Vec7,
    ) -> Result<[f64; 6]> {
        let cv = self.coordinate_vectors(b, x);
        let gram = Matrix6::from_fn(|i, j| cv[i].dot(&cv[j]));
        let rhs = NVector6::from_fn(|i, _| cv[i].dot(v));
        let sol = gram
            .cholesky()
            .ok_or_else(|| Error::Chart("coordinate Gram matrix is singular".into()))?
            .solve(&rhs);
        Ok(std::array::from_fn(|i| sol[i]))
    }

    /// Condition number of the coordinate Gram matrix at the centre.
    pub fn condition_number(&self, b: &dyn AlmostHermitianBackend) -> f64 {
        let cv = self.coordinate_vectors(b, &[0.0; 6]);
        let gram = Matrix6::from_fn(|i, j| cv[i].dot(&cv[j]));
        let ev = gram.symmetric_eigen().eigenvalues;
        let (lo, hi) = ev
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &l| (lo.min(l), hi.max(l)));
        (hi / lo).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{backend_perturbed, backend_s6};
    use rand::SeedableRng;

    #[test]
    fn random_frames_are_adapted() {
        let b = backend_perturbed(0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for seed in 0..20 {
            let p = b.sample_point(&mut rng);
            let f = adapted_frame(&b, &p, seed).unwrap();
            assert!(f.gram_residual() < 1e-12);
            assert!(f.j_residual(&b) < 1e-12);
            for v in f.vectors() {
                assert!(b.unit_normal(f.base()).dot(v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn frames_are_deterministic() {
        let b = backend_s6();
        let p = b.sample_point(&mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(adapted_frame(&b, &p, 3).unwrap(), adapted_frame(&b, &p, 3).unwrap());
        assert_ne!(adapted_frame(&b, &p, 3).unwrap(), adapted_frame(&b, &p, 4).unwrap());
    }

    #[test]
    fn components_and_assemble_are_inverse() {
        let b = backend_s6();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = b.sample_point(&mut rng);
        let f = adapted_frame(&b, &p, 0).unwrap();
        let v = b.random_unit_tangent(p.ambient(), &mut rng);
        assert!((f.assemble(&f.components(&v)) - v).norm() < 1e-14);
        let g = f.flipped();
        assert_eq!(g.orientation(), -1);
        assert_eq!(*g.vector(4), -*f.vector(4));
        assert!(g.j_residual(&b) < 1e-14);
    }

    #[test]
    fn non_orthonormal_input_is_rejected() {
        let b = backend_s6();
        let p = b.sample_point(&mut ChaCha8Rng::seed_from_u64(4));
        let f = adapted_frame(&b, &p, 0).unwrap();
        let e = [*f.vector(0), *f.vector(0), *f.vector(4)];
        assert!(matches!(
            AdaptedFrame::from_e(&b, f.base(), e),
            Err(Error::FrameNotAdapted(_))
        ));
    }

    #[test]
    fn chart_coefficients_invert_pushforward() {
        let b = backend_perturbed(0.1).unwrap();
        let p = b.sample_point(&mut ChaCha8Rng::seed_from_u64(6));
        let chart = Chart::from_frame(&adapted_frame(&b, &p, 1).unwrap());
        let x = [0.01, -0.02, 0.0, 0.03, 0.01, -0.01];
        let c = [0.5, -1.0, 0.25, 2.0, 0.0, 1.0];
        let v = chart.pushforward(&b, &x, &c);
        let back = chart.coefficients(&b, &x, &v).unwrap();
        for k in 0..6 {
            assert!((back[k] - c[k]).abs() < 1e-12);
        }
        assert!((chart.point(&b, &[0.0; 6]) - p.ambient()).norm() < 1e-14);
        assert!((chart.condition_number(&b) - 1.0).abs() < 1e-12);
    }
}

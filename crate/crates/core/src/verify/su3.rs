//! SU(3) frames, complex volume forms and the constant `λ`.

use std::f64::consts::SQRT_2;

use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::connection::{Connection, FormField};
use crate::error::{Error, Result};
use crate::exterior6::{KForm, Vector6};
use crate::geometry::{AdaptedFrame, Vec7};

/// Below this norm `(∇_{E1} J) E2` is treated as zero and `E3` comes from
/// the third seed instead.
const ALIGNMENT_FLOOR: f64 = 1e-9;

/// Complex `(1,0)` coframe `fᵏ = (eᵏ + i Jeᵏ)/√2` of an adapted frame and the
/// forms it determines, all in the frame's model basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Su3Frame {
    pub frame: AdaptedFrame,
    /// `(Re fᵏ, Im fᵏ)`.
    pub f: [(KForm, KForm); 3],
    /// `i Σ fᵏ ∧ f̄ᵏ`.
    pub sigma: KForm,
    /// `Re(2√2 f¹∧f²∧f³)`.
    pub psi_plus: KForm,
    /// `Im(2√2 f¹∧f²∧f³)`.
    pub psi_minus: KForm,
}

impl Su3Frame {
    pub fn psi_complex(&self) -> (KForm, KForm) {
        (self.psi_plus.clone(), self.psi_minus.clone())
    }
}

fn covector(i: usize, scale: f64) -> KForm {
    KForm::basis(&[i]).scale(scale)
}

fn wedge(a: &KForm, b: &KForm) -> KForm {
    a.wedge(b).expect("degrees are small")
}

/// `σ(E_a, E_b) = g(J E_a, E_b)` from the backend, in frame components.
pub fn frame_sigma(conn: &Connection, frame: &AdaptedFrame) -> KForm {
    let b = conn.backend();
    let q = frame.base();
    let e = frame.vectors();
    KForm::from_fn(2, |t| b.sigma(q, &e[t[0]], &e[t[1]]))
}

/// Builds `fᵏ`, `σ` and `ψ±` from an adapted frame. The frame is re-oriented
/// first so that `g((∇_{E1} J) E2, E3) ≥ 0`.
pub fn build_su3_frame(conn: &Connection, frame: &AdaptedFrame) -> Result<Su3Frame> {
    let b = conn.backend();
    let q = frame.base();
    let gram = frame.gram_residual();
    let jres = frame.j_residual(b);
    if gram > 1e-10 || jres > 1e-10 {
        return Err(Error::FrameNotAdapted(format!(
            "gram residual {gram:.3e}, J residual {jres:.3e}"
        )));
    }
    let e = frame.vectors();
    let frame = if conn.nabla_sigma(q, &e[0], &e[2], &e[4]) < 0.0 {
        frame.flipped()
    } else {
        *frame
    };
    let r = 1.0 / SQRT_2;
    let f: [(KForm, KForm); 3] = std::array::from_fn(|k| (covector(2 * k, r), covector(2 * k + 1, r)));
    let mut sigma = KForm::zero(2);
    for (a, bb) in &f {
        sigma = &sigma + &wedge(a, bb).scale(2.0);
    }
    let (a1, b1) = &f[0];
    let (a2, b2) = &f[1];
    let (a3, b3) = &f[2];
    let t = |x: &KForm, y: &KForm, z: &KForm| wedge(&wedge(x, y), z);
    let re = &(&(&t(a1, a2, a3) - &t(a1, b2, b3)) - &t(b1, a2, b3)) - &t(b1, b2, a3);
    let im = &(&(&t(b1, a2, a3) + &t(a1, b2, a3)) + &t(a1, a2, b3)) - &t(b1, b2, b3);
    let s = 2.0 * SQRT_2;
    let out = Su3Frame {
        frame,
        f,
        sigma,
        psi_plus: re.scale(s),
        psi_minus: im.scale(s),
    };
    let sigma_res = (&out.sigma - &frame_sigma(conn, &frame)).max_abs();
    if sigma_res > 1e-10 {
        return Err(Error::FrameNotAdapted(format!(
            "σ reconstruction residual {sigma_res:.3e}"
        )));
    }
    Ok(out)
}

/// A smooth adapted frame field determined by three fixed ambient seeds:
/// `E1` from `s1`, `E2` from `s2` made orthogonal to `E1, JE1`, and `E3`
/// along the part of `(∇_{E1} J) E2` orthogonal to `E1, JE1, E2, JE2`
/// (from `s3` when that vanishes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameField {
    seeds: [Vec7; 3],
}

fn orthogonalize(v: &Vec7, against: &[Vec7]) -> Vec7 {
    let mut v = *v;
    for _ in 0..2 {
        for c in against {
            v -= c * c.dot(&v);
        }
    }
    v
}

impl FrameField {
    pub fn new(seeds: [Vec7; 3]) -> Self {
        FrameField { seeds }
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        FrameField::new(std::array::from_fn(|_| {
            Vec7::from_fn(|_, _| rng.sample(StandardNormal))
        }))
    }

    pub fn at(&self, conn: &Connection, q: &Vec7) -> Result<AdaptedFrame> {
        let b = conn.backend();
        let unit = |v: Vec7| {
            let n = v.norm();
            if n > 1e-8 {
                Ok(v / n)
            } else {
                Err(Error::DegenerateFrame(1))
            }
        };
        let e1 = unit(b.project(q, &self.seeds[0]))?;
        let je1 = b.j(q, &e1);
        let e2 = unit(orthogonalize(&b.project(q, &self.seeds[1]), &[e1, je1]))?;
        let je2 = b.j(q, &e2);
        let span = [e1, je1, e2, je2];
        let aligned = orthogonalize(&conn.nabla_j(q, &e1, &e2), &span);
        let e3 = if aligned.norm() > ALIGNMENT_FLOOR {
            aligned.normalize()
        } else {
            unit(orthogonalize(&b.project(q, &self.seeds[2]), &span))?
        };
        AdaptedFrame::from_e(b, q, [e1, e2, e3])
    }

    /// A model-basis form transported by the field: its value at `c` on
    /// `v1..vk` is the model form evaluated on the frame components.
    pub fn form<'f>(&'f self, conn: &'f Connection<'f>, model: KForm) -> FormField<'f> {
        let degree = model.degree();
        FormField::new(degree, move |c, vs| {
            let frame = match self.at(conn, c) {
                Ok(f) => f,
                Err(_) => return f64::NAN,
            };
            let comps: Vec<Vector6> = vs.iter().map(|v| frame.components(v)).collect();
            model.eval(&comps)
        })
    }
}

/// `λ` at a point with its misfit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    pub re: f64,
    pub im: f64,
    /// Deviation of `g(∇_{F̄i} F̄j, F̄k)` from total antisymmetry in `(i, j)`.
    pub misfit: f64,
}

impl LambdaEstimate {
    pub fn value(&self) -> Complex<f64> {
        Complex::new(self.re, self.im)
    }
}

/// `∇σ(A, B, C)` extended complex-trilinearly to `F̄_k = (E_k + i JE_k)/√2`.
fn nabla_sigma_bar(conn: &Connection, frame: &AdaptedFrame, idx: [usize; 3]) -> Complex<f64> {
    let q = frame.base();
    let e = frame.vectors();
    let mut acc = Complex::new(0.0, 0.0);
    for mask in 0..8u32 {
        let pick = |slot: usize| {
            let k = idx[slot];
            if mask & (1 << slot) != 0 {
                e[2 * k + 1]
            } else {
                e[2 * k]
            }
        };
        let v = conn.nabla_sigma(q, &pick(0), &pick(1), &pick(2));
        acc += Complex::<f64>::i().powu(mask.count_ones()) * v;
    }
    acc / (2.0 * SQRT_2)
}

/// `λ` from `−λ = 2g(∇_{F̄1} F̄2, F̄3)`. For `(0,1)` fields `V, W` one has
/// `(J + i)∇_V W = −(∇_V J) W`, hence `2g(∇_V W, F̄3) = i ∇σ(V, W, F̄3)`.
pub fn estimate_lambda(conn: &Connection, su3: &Su3Frame) -> LambdaEstimate {
    let t123 = nabla_sigma_bar(conn, &su3.frame, [0, 1, 2]);
    let t213 = nabla_sigma_bar(conn, &su3.frame, [1, 0, 2]);
    let lambda: Complex<f64> = -(Complex::<f64>::i() * t123);
    LambdaEstimate {
        re: lambda.re,
        im: lambda.im,
        misfit: (t123 + t213).norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior6::model_su3_forms;
    use crate::geometry::{adapted_frame, backend_flat_kahler, backend_perturbed, backend_s6, backend_s6_radius};
    use crate::verify::sampling::sample_points;

    #[test]
    fn forms_match_the_model() {
        let b = backend_s6();
        let conn = Connection::new(&b);
        let model = model_su3_forms();
        for (i, p) in sample_points(&b, 4, 11).iter().enumerate() {
            let su3 = build_su3_frame(&conn, &adapted_frame(&b, p, i as u64).unwrap()).unwrap();
            assert!((&su3.sigma - &KForm::from(&model.sigma)).max_abs() < 1e-12);
            assert!((&su3.psi_plus - &KForm::from(&model.psi_plus)).max_abs() < 1e-12);
            assert!((&su3.psi_minus - &KForm::from(&model.psi_minus)).max_abs() < 1e-12);
            assert!(su3.sigma.wedge(&su3.psi_plus).unwrap().max_abs() < 1e-12);
            assert!(conn.nabla_sigma(su3.frame.base(), &su3.frame.vectors()[0], &su3.frame.vectors()[2], &su3.frame.vectors()[4]) >= 0.0);
        }
    }

    #[test]
    fn lambda_on_the_sphere_scales_with_radius() {
        for r in [1.0, 2.0] {
            let b = backend_s6_radius(r).unwrap();
            let conn = Connection::new(&b);
            for (i, p) in sample_points(&b, 4, 12).iter().enumerate() {
                let su3 = build_su3_frame(&conn, &adapted_frame(&b, p, i as u64).unwrap()).unwrap();
                let l = estimate_lambda(&conn, &su3);
                assert!((l.value().norm() - SQRT_2 / r).abs() < 1e-12, "{l:?}");
                assert!(l.misfit < 1e-12);
                let field = FrameField::random(&mut crate::verify::sampling::stream_rng(0, 9, i as u64));
                let aligned = build_su3_frame(&conn, &field.at(&conn, p.ambient()).unwrap()).unwrap();
                let l = estimate_lambda(&conn, &aligned);
                assert!(l.re.abs() < 1e-12, "{l:?}");
                assert!((l.im + SQRT_2 / r).abs() < 1e-12, "{l:?}");
            }
        }
    }

    #[test]
    fn lambda_vanishes_on_flat_space() {
        let b = backend_flat_kahler();
        let conn = Connection::new(&b);
        let p = &sample_points(&b, 1, 13)[0];
        let su3 = build_su3_frame(&conn, &adapted_frame(&b, p, 0).unwrap()).unwrap();
        assert!(estimate_lambda(&conn, &su3).value().norm() < 1e-12);
    }

    #[test]
    fn foreign_frame_is_rejected() {
        let pert = backend_perturbed(0.2).unwrap();
        let s6 = backend_s6();
        let p = &sample_points(&pert, 1, 14)[0];
        let frame = adapted_frame(&pert, p, 0).unwrap();
        assert!(matches!(
            build_su3_frame(&Connection::new(&s6), &frame),
            Err(Error::FrameNotAdapted(_))
        ));
    }

    #[test]
    fn frame_field_aligns_e3() {
        let b = backend_s6();
        let conn = Connection::new(&b);
        let mut rng = crate::verify::sampling::stream_rng(1, 2, 3);
        let field = FrameField::random(&mut rng);
        let p = &sample_points(&b, 1, 15)[0];
        let frame = field.at(&conn, p.ambient()).unwrap();
        let e = frame.vectors();
        assert!(frame.gram_residual() < 1e-12);
        let n = conn.nabla_j(p.ambient(), &e[0], &e[2]);
        assert!((n.normalize() - e[4]).norm() < 1e-10);
        let sigma = field.form(&conn, KForm::from(&model_su3_forms().sigma));
        assert!((sigma.eval(p.ambient(), &[e[0], e[1]]) - 1.0).abs() < 1e-10);
    }
}

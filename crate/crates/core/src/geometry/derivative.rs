//! Finite-difference derivative oracle.
//!
//! Mixed partials `∂ᵏ f / ∂t₁…∂t_k` at `t = 0` are taken with the tensor
//! product central stencil `Σ_{s ∈ {±1}ᵏ} (Π s) f(h s) / (2h)ᵏ`, optionally
//! Richardson-extrapolated as `(4 D(h/2) − D(h)) / 3`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::octonion::Vec7;
use super::AlmostHermitianBackend;
use crate::error::{Error, Result};

/// Values that can be combined linearly by a stencil.
pub trait FdValue: Sized {
    fn zero_like(&self) -> Self;
    fn axpy(&mut self, a: f64, x: &Self);
}

impl FdValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
}

impl FdValue for Vec7 {
    fn zero_like(&self) -> Self {
        Vec7::zeros()
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * a;
    }
}

impl FdValue for DVector<f64> {
    fn zero_like(&self) -> Self {
        DVector::zeros(self.len())
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * a;
    }
}

impl<const N: usize> FdValue for [f64; N] {
    fn zero_like(&self) -> Self {
        [0.0; N]
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FdScheme {
    Central,
    Richardson,
}

/// Step sizes: `step` for orders 1 and 2, `step3` for order 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdSettings {
    pub step: f64,
    pub step3: f64,
    pub scheme: FdScheme,
}

impl Default for FdSettings {
    fn default() -> Self {
        FdSettings {
            step: 1e-3,
            step3: 3e-3,
            scheme: FdScheme::Central,
        }
    }
}

impl FdSettings {
    pub fn central(step: f64) -> Self {
        FdSettings {
            step,
            step3: 3.0 * step,
            scheme: FdScheme::Central,
        }
    }

    pub fn with_scheme(mut self, scheme: FdScheme) -> Self {
        self.scheme = scheme;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeOracle {
    pub settings: FdSettings,
}

impl Default for DerivativeOracle {
    fn default() -> Self {
        DerivativeOracle::new(FdSettings::default())
    }
}

impl DerivativeOracle {
    pub fn new(settings: FdSettings) -> Self {
        DerivativeOracle { settings }
    }

    pub fn step_for(&self, order: usize) -> f64 {
        if order >= 3 {
            self.settings.step3
        } else {
            self.settings.step
        }
    }

    /// Mixed partial of `f` in the parameters `t ∈ R^order` at `t = 0`.
    pub fn parametric<V: FdValue>(
        &self,
        order: usize,
        step: f64,
        f: impl Fn(&[f64]) -> V,
    ) -> Result<V> {
        if !(1..=3).contains(&order) {
            return Err(Error::UnsupportedOrder(order));
        }
        Ok(match self.settings.scheme {
            FdScheme::Central => mixed(order, step, &f),
            FdScheme::Richardson => {
                let coarse = mixed(order, step, &f);
                let fine = mixed(order, step / 2.0, &f);
                let mut out = fine.zero_like();
                out.axpy(4.0 / 3.0, &fine);
                out.axpy(-1.0 / 3.0, &coarse);
                out
            }
        })
    }

    /// Mixed directional derivative of a field along the manifold:
    /// `∂ᵏ/∂t₁…∂t_k f(retract(q + Σ tᵢ dᵢ))`.
    pub fn along<V: FdValue>(
        &self,
        b: &dyn AlmostHermitianBackend,
        q: &Vec7,
        dirs: &[Vec7],
        f: impl Fn(&Vec7) -> V,
    ) -> Result<V> {
        self.along_with_step(b, q, dirs, self.step_for(dirs.len()), f)
    }

    pub fn along_with_step<V: FdValue>(
        &self,
        b: &dyn AlmostHermitianBackend,
        q: &Vec7,
        dirs: &[Vec7],
        step: f64,
        f: impl Fn(&Vec7) -> V,
    ) -> Result<V> {
        self.parametric(dirs.len(), step, |t| {
            let mut u = *q;
            for (ti, d) in t.iter().zip(dirs) {
                u += d * *ti;
            }
            f(&b.retract(&u))
        })
    }

    /// Mixed partial of a function of six chart coordinates at the origin in
    /// the given coordinate directions.
    pub fn coords<V: FdValue>(
        &self,
        dirs: &[[f64; 6]],
        f: impl Fn(&[f64; 6]) -> V,
    ) -> Result<V> {
        self.parametric(dirs.len(), self.step_for(dirs.len()), |t| {
            let mut x = [0.0; 6];
            for (ti, d) in t.iter().zip(dirs) {
                for k in 0..6 {
                    x[k] += ti * d[k];
                }
            }
            f(&x)
        })
    }
}

fn mixed<V: FdValue>(order: usize, h: f64, f: &impl Fn(&[f64]) -> V) -> V {
    let mut acc: Option<V> = None;
    let mut t = [0.0; 3];
    let scale = (2.0 * h).powi(order as i32).recip();
    for mask in 0..(1usize << order) {
        let mut sign = 1.0;
        for (i, ti) in t.iter_mut().enumerate().take(order) {
            if mask & (1 << i) != 0 {
                *ti = -h;
                sign = -sign;
            } else {
                *ti = h;
            }
        }
        let v = f(&t[..order]);
        let acc = acc.get_or_insert_with(|| v.zero_like());
        acc.axpy(sign * scale, &v);
    }
    acc.expect("stencil has at least two nodes")
}

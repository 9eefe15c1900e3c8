use nalgebra::DVector;

use super::Connection;
use crate::error::{Error, Result};
use crate::exterior6::KForm;
use crate::geometry::{AlmostHermitianBackend, Chart, Vec7};

type FormEval<'f> = Box<dyn Fn(&Vec7, &[Vec7]) -> f64 + Send + Sync + 'f>;

/// A differential `k`-form given by its values on tangent vectors.
pub struct FormField<'f> {
    degree: usize,
    eval: FormEval<'f>,
}

impl<'f> FormField<'f> {
    pub fn new(
        degree: usize,
        eval: impl Fn(&Vec7, &[Vec7]) -> f64 + Send + Sync + 'f,
    ) -> Self {
        FormField {
            degree,
            eval: Box::new(eval),
        }
    }

    /// The fundamental two-form `σ = g(J·, ·)` of a backend.
    pub fn sigma(b: &'f dyn AlmostHermitianBackend) -> Self {
        FormField::new(2, move |q, v| b.sigma(q, &v[0], &v[1]))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, q: &Vec7, vectors: &[Vec7]) -> f64 {
        (self.eval)(q, vectors)
    }
}

impl Connection<'_> {
    /// Components of the pulled-back form on the coordinate vectors at `x`.
    pub fn pull_back(&self, chart: &Chart, x: &[f64; 6], form: &FormField) -> KForm {
        let b = self.backend();
        let p = chart.point(b, x);
        let cv = chart.coordinate_vectors(b, x);
        KForm::from_fn(form.degree(), |t| {
            let vs: Vec<Vec7> = t.iter().map(|&i| cv[i]).collect();
            form.eval(&p, &vs)
        })
    }

    /// `dω` at the chart centre from coordinate partials of the pulled-back
    /// components: `dω_{i0…ik} = Σ_j (−1)^j ∂_{i_j} ω_{i0…î_j…ik}`.
    pub fn exterior_derivative(&self, chart: &Chart, form: &FormField) -> Result<KForm> {
        let k = form.degree();
        if k >= 6 {
            return Err(Error::UnsupportedDegree(k, "0..=5"));
        }
        let tuples = KForm::<f64>::tuples(k);
        let mut partials = Vec::with_capacity(6);
        for i in 0..6 {
            let mut dir = [0.0; 6];
            dir[i] = 1.0;
            let d: DVector<f64> = self.oracle().coords(&[dir], |x| {
                DVector::from_vec(self.pull_back(chart, x, form).coeffs().to_vec())
            })?;
            partials.push(d);
        }
        let position = |t: &[usize]| tuples.iter().position(|s| s.as_slice() == t);
        let out = KForm::from_fn(k + 1, |t| {
            let mut s = 0.0;
            for j in 0..t.len() {
                let rest: Vec<usize> = t
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != j)
                    .map(|(_, &v)| v)
                    .collect();
                let pos = position(&rest).expect("increasing tuple");
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * partials[t[j]][pos];
            }
            s
        });
        if out.coeffs().iter().all(|c| c.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Chart("non-finite exterior derivative".into()))
        }
    }
}

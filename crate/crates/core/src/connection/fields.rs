//! Vector fields as chart-coefficient functions.
//!
//! A field is a map from chart coordinates `x ∈ R^6` to coefficients on the
//! coordinate vectors `∂/∂xᵢ`. Brackets are computed from coefficient
//! derivatives, so they do not involve the connection.

use super::Connection;
use crate::error::{Error, Result};
use crate::geometry::{Chart, Vec7};

/// Chart-coefficient vector field.
pub type CoefficientField<'f> = dyn Fn(&[f64; 6]) -> [f64; 6] + 'f;

/// Field with constant coefficients.
pub fn constant_field(c: [f64; 6]) -> impl Fn(&[f64; 6]) -> [f64; 6] {
    move |_| c
}

/// Coefficients of `J U` for a field `U`. Chart failures surface as NaN
/// coefficients and are reported by the consumers.
pub fn j_field<'f>(
    conn: &'f Connection<'f>,
    chart: &'f Chart,
    u: &'f CoefficientField<'f>,
) -> impl Fn(&[f64; 6]) -> [f64; 6] + 'f {
    move |x| {
        let b = conn.backend();
        let p = chart.point(b, x);
        let v = b.j(&p, &chart.pushforward(b, x, &u(x)));
        chart.coefficients(b, x, &v).unwrap_or([f64::NAN; 6])
    }
}

fn finite_or_chart_error(v: Vec7) -> Result<Vec7> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(v)
    } else {
        Err(Error::Chart("non-finite field value in chart".into()))
    }
}

impl Connection<'_> {
    /// Ambient value of a field at chart coordinates `x`.
    pub fn field_value(&self, chart: &Chart, x: &[f64; 6], u: &CoefficientField) -> Vec7 {
        chart.pushforward(self.backend(), x, &u(x))
    }

    /// Coefficients of `[U, V]` at the chart centre.
    pub fn bracket(&self, u: &CoefficientField, v: &CoefficientField) -> Result<[f64; 6]> {
        let o = self.oracle();
        let zero = [0.0; 6];
        let du_v = o.coords(&[u(&zero)], |x| v(x))?;
        let dv_u = o.coords(&[v(&zero)], |x| u(x))?;
        let out: [f64; 6] = std::array::from_fn(|k| du_v[k] - dv_u[k]);
        if out.iter().all(|c| c.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Chart("non-finite bracket coefficients".into()))
        }
    }

    /// `∇_U V` at the chart centre: tangential part of the ambient derivative.
    pub fn nabla_vector(
        &self,
        chart: &Chart,
        u: &CoefficientField,
        v: &CoefficientField,
    ) -> Result<Vec7> {
        let b = self.backend();
        let q = chart.base();
        let u0 = u(&[0.0; 6]);
        let d = self
            .oracle()
            .coords(&[u0], |x| chart.pushforward(b, x, &v(x)))?;
        finite_or_chart_error(b.project(q, &d))
    }

    /// `2g(∇_U V, W)` minus the six-term Koszul expansion, at the chart centre.
    pub fn koszul_residual(
        &self,
        chart: &Chart,
        u: &CoefficientField,
        v: &CoefficientField,
        w: &CoefficientField,
    ) -> Result<f64> {
        let b = self.backend();
        let zero = [0.0; 6];
        let o = self.oracle();
        let g = |x: &[f64; 6], a: &CoefficientField, c: &CoefficientField| {
            chart
                .pushforward(b, x, &a(x))
                .dot(&chart.pushforward(b, x, &c(x)))
        };
        let deriv = |dir: &CoefficientField, a: &CoefficientField, c: &CoefficientField| {
            o.coords(&[dir(&zero)], |x| g(x, a, c))
        };
        let at0 = |c: [f64; 6]| chart.pushforward(b, &zero, &c);
        let val = |a: &CoefficientField| at0(a(&zero));
        let lhs = 2.0 * self.nabla_vector(chart, u, v)?.dot(&val(w));
        let rhs = deriv(u, v, w)? + deriv(v, u, w)? - deriv(w, u, v)?
            + at0(self.bracket(u, v)?).dot(&val(w))
            - at0(self.bracket(u, w)?).dot(&val(v))
            - at0(self.bracket(v, w)?).dot(&val(u));
        Ok((lhs - rhs).abs())
    }

    /// Torsion `∇_U V − ∇_V U − [U, V]` at the chart centre.
    pub fn torsion(
        &self,
        chart: &Chart,
        u: &CoefficientField,
        v: &CoefficientField,
    ) -> Result<Vec7> {
        let br = chart.pushforward(self.backend(), &[0.0; 6], &self.bracket(u, v)?);
        Ok(self.nabla_vector(chart, u, v)? - self.nabla_vector(chart, v, u)? - br)
    }

    /// Nijenhuis tensor from brackets of coordinate-constant fields `X`, `Y`
    /// (tangent vectors at the chart centre):
    /// `4N(X,Y) = [X,Y] − [JX,JY] + J[JX,Y] + J[X,JY]`.
    pub fn nijenhuis(&self, chart: &Chart, x: &Vec7, y: &Vec7) -> Result<Vec7> {
        let b = self.backend();
        let q = chart.base();
        let zero = [0.0; 6];
        let cx = chart.coefficients(b, &zero, &b.project(q, x))?;
        let cy = chart.coefficients(b, &zero, &b.project(q, y))?;
        let fx = constant_field(cx);
        let fy = constant_field(cy);
        let jx = j_field(self, chart, &fx);
        let jy = j_field(self, chart, &fy);
        let amb = |c: [f64; 6]| chart.pushforward(b, &zero, &c);
        let sum = amb(self.bracket(&fx, &fy)?) - amb(self.bracket(&jx, &jy)?)
            + b.j(q, &amb(self.bracket(&jx, &fy)?))
            + b.j(q, &amb(self.bracket(&fx, &jy)?));
        finite_or_chart_error(sum / 4.0)
    }

    /// Canonical Hermitian connection `∇̂_U V = ∇_U V − ½ J (∇_U J) V`.
    pub fn hat_nabla(
        &self,
        chart: &Chart,
        u: &CoefficientField,
        v: &CoefficientField,
    ) -> Result<Vec7> {
        let b = self.backend();
        let zero = [0.0; 6];
        let q = chart.base();
        let u0 = chart.pushforward(b, &zero, &u(&zero));
        let v0 = chart.pushforward(b, &zero, &v(&zero));
        Ok(self.nabla_vector(chart, u, v)? + self.hermitian_difference(q, &u0, &v0))
    }
}

//! Pointwise residuals of the registered identities and the aggregate checks.

use std::f64::consts::SQRT_2;

use nalgebra::{Complex, Matrix6};
use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mu::{estimate_mu, mu_samples, MuEstimate, PAIRS_PER_POINT};
use super::registry::{residual, sanitize, vector_residual, IdentityId, IdentityReport};
use super::sampling::{stream_rng, CLASSIFY_DOMAIN, FRAME_FIELD_DOMAIN, IDENTITY_DOMAIN_BASE};
use super::su3::{build_su3_frame, estimate_lambda, frame_sigma, FrameField};
use crate::connection::{constant_field, j_field, with_j, Connection, FormField, Tier, Tolerances};
use crate::error::{Error, Result};
use crate::exterior6::{j0_basis, model_su3_forms, KForm};
use crate::geometry::{
    adapted_frame, DerivativeOracle, FdScheme, AdaptedFrame, AlmostHermitianBackend, Chart, ManifoldPoint, Vec7,
};

/// Random vector tuples drawn per point.
pub const DRAWS_PER_POINT: usize = 10;

/// Master seed used by the free-function entry points.
pub const DEFAULT_SEED: u64 = 0x006e_6b36;

/// Runs identities over sampled points with one connection and one seed.
#[derive(Debug, Clone, Copy)]
pub struct Verifier<'a> {
    conn: Connection<'a>,
    /// Same connection with Richardson-extrapolated stencils, used for
    /// derivatives taken in chart coordinates.
    fine: Connection<'a>,
    tolerances: Tolerances,
    seed: u64,
    draws: usize,
}

/// Quantities shared by all points of one identity run.
#[derive(Debug, Clone, Default)]
struct Shared {
    mu: f64,
    mu_samples: Vec<Vec<f64>>,
}

/// Per-point state: base point, a random adapted frame and the draw stream.
struct Site<'v, 'a> {
    conn: &'v Connection<'a>,
    fine: &'v Connection<'a>,
    q: Vec7,
    frame: AdaptedFrame,
    rng: ChaCha8Rng,
    draws: usize,
}

impl Site<'_, '_> {
    fn b(&self) -> &dyn AlmostHermitianBackend {
        self.conn.backend()
    }

    fn t(&mut self) -> Vec7 {
        let b = self.conn.backend();
        b.random_unit_tangent(&self.q, &mut self.rng)
    }

    fn j(&self, v: &Vec7) -> Vec7 {
        self.b().j(&self.q, v)
    }

    fn g(&self, u: &Vec7, v: &Vec7) -> f64 {
        self.b().metric(&self.q, u, v)
    }

    fn nj(&self, x: &Vec7, y: &Vec7) -> Vec7 {
        self.conn.nabla_j(&self.q, x, y)
    }

    fn ns(&self, x: &Vec7, y: &Vec7, z: &Vec7) -> f64 {
        self.conn.nabla_sigma(&self.q, x, y, z)
    }

    fn n2s(&self, w: &Vec7, x: &Vec7, y: &Vec7, z: &Vec7) -> f64 {
        self.conn.nabla2_sigma(&self.q, w, x, y, z)
    }

    fn r(&self, w: &Vec7, x: &Vec7, y: &Vec7, z: &Vec7) -> f64 {
        self.conn.riemann4(&self.q, w, x, y, z)
    }

    fn rhat(&self, w: &Vec7, x: &Vec7, y: &Vec7, z: &Vec7) -> f64 {
        self.conn.hat_curvature(&self.q, w, x, y).dot(z)
    }

    fn a(&self, x: &Vec7, y: &Vec7) -> f64 {
        self.conn.ric_minus_ric_star(&self.q, x, y)
    }

    fn e(&self, i: usize) -> Vec7 {
        *self.frame.vector(i)
    }

    fn chart(&self) -> Chart {
        Chart::from_frame(&self.frame)
    }

    fn frame_field(&mut self) -> FrameField {
        FrameField::random(&mut self.rng)
    }

    fn max_over_draws(&mut self, mut f: impl FnMut(&mut Self) -> Result<f64>) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for _ in 0..self.draws {
            let r = f(self)?;
            if r.is_nan() {
                return Ok(f64::NAN);
            }
            worst = worst.max(r);
        }
        Ok(worst)
    }
}

/// Component-wise normalised residual of two forms of equal degree.
fn form_residual(l: &KForm, r: &KForm) -> f64 {
    l.coeffs()
        .iter()
        .zip(r.coeffs())
        .map(|(a, b)| residual(*a, *b))
        .fold(0.0, f64::max)
}

fn model_f64() -> (KForm, KForm, KForm, KForm) {
    let m = model_su3_forms();
    (
        KForm::from(&m.sigma),
        KForm::from(&m.psi_plus),
        KForm::from(&m.psi_minus),
        KForm::from(&m.vol),
    )
}

fn richardson(conn: Connection) -> Connection {
    let settings = conn.oracle().settings.with_scheme(FdScheme::Richardson);
    conn.with_oracle(DerivativeOracle::new(settings))
}

fn needs_mu(id: IdentityId) -> bool {
    matches!(id.number(), 15 | 16 | 24 | 27 | 28 | 32)
}

/// `dσ` and `dψ₋` in the basis of the frame field at the chart centre.
struct PdeForms {
    d_sigma: KForm,
    d_psi_minus: KForm,
}

fn pde_forms(conn: &Connection, q: &Vec7, ff: &FrameField) -> Result<PdeForms> {
    let frame = ff.at(conn, q)?;
    let chart = Chart::from_frame(&frame);
    let (_, _, psi_minus, _) = model_f64();
    Ok(PdeForms {
        d_sigma: conn.exterior_derivative(&chart, &FormField::sigma(conn.backend()))?,
        d_psi_minus: conn.exterior_derivative(&chart, &ff.form(conn, psi_minus))?,
    })
}

impl<'a> Verifier<'a> {
    pub fn new(conn: Connection<'a>, seed: u64) -> Self {
        Verifier {
            conn,
            fine: richardson(conn),
            tolerances: Tolerances::default(),
            seed,
            draws: DRAWS_PER_POINT,
        }
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn with_draws(mut self, draws: usize) -> Self {
        self.draws = draws.max(1);
        self
    }

    pub fn connection(&self) -> &Connection<'a> {
        &self.conn
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn estimate_mu(&self, points: &[ManifoldPoint]) -> Result<MuEstimate> {
        estimate_mu(&self.conn, points, self.seed)
    }

    fn shared(&self, id: IdentityId, points: &[ManifoldPoint]) -> Result<Shared> {
        if !needs_mu(id) {
            return Ok(Shared::default());
        }
        let est = self.estimate_mu(points)?;
        let mu_samples = if id.number() == 16 {
            mu_samples(&self.conn, points, self.seed, PAIRS_PER_POINT).0
        } else {
            Vec::new()
        };
        Ok(Shared {
            mu: est.value,
            mu_samples,
        })
    }

    fn site(&self, domain: u64, index: usize, p: &ManifoldPoint) -> Result<Site<'_, 'a>> {
        let mut rng = stream_rng(self.seed, domain, index as u64);
        let frame = adapted_frame(self.conn.backend(), p, rng.next_u64())?;
        Ok(Site {
            conn: &self.conn,
            fine: &self.fine,
            q: *p.ambient(),
            frame,
            rng,
            draws: self.draws,
        })
    }

    /// Per-point residuals of `id`. Failures at a point are recorded as NaN.
    pub fn residuals(&self, id: IdentityId, points: &[ManifoldPoint]) -> Result<Vec<f64>> {
        let shared = self.shared(id, points)?;
        let domain = IDENTITY_DOMAIN_BASE + u64::from(id.number());
        Ok(points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                self.site(domain, i, p)
                    .and_then(|mut s| point_residual(id, &mut s, &shared, i))
                    .unwrap_or(f64::NAN)
            })
            .collect())
    }

    pub fn run_identity(&self, id: IdentityId, points: &[ManifoldPoint]) -> Result<IdentityReport> {
        let res = self.residuals(id, points)?;
        Ok(IdentityReport::from_residuals(
            id.to_string(),
            &res,
            self.tolerances.get(id.tier()),
        ))
    }

    /// Residuals of `dσ = 3μψ₊` and `dψ₋ = −2μ σ∧σ` at each point, in the
    /// frame of a smooth aligned frame field.
    pub fn pde_residuals(&self, points: &[ManifoldPoint], mu: f64) -> Vec<(f64, f64)> {
        let (sigma, psi_plus, _, _) = model_f64();
        let sigma2 = sigma.wedge(&sigma).expect("degree 4");
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let mut rng = stream_rng(self.seed, FRAME_FIELD_DOMAIN, i as u64);
                let ff = FrameField::random(&mut rng);
                match pde_forms(&self.fine, p.ambient(), &ff) {
                    Ok(f) => (
                        form_residual(&f.d_sigma, &psi_plus.scale(3.0 * mu)),
                        form_residual(&f.d_psi_minus, &sigma2.scale(-2.0 * mu)),
                    ),
                    Err(_) => (f64::NAN, f64::NAN),
                }
            })
            .collect()
    }

    /// Reports named `pde.dsigma` and `pde.dpsi_minus`.
    pub fn check_pde_pair(&self, points: &[ManifoldPoint]) -> Result<(IdentityReport, IdentityReport)> {
        let mu = self.estimate_mu(points)?.value;
        let res = self.pde_residuals(points, mu);
        let tol = self.tolerances.get(Tier::Two);
        let a: Vec<f64> = res.iter().map(|r| r.0).collect();
        let c: Vec<f64> = res.iter().map(|r| r.1).collect();
        Ok((
            IdentityReport::from_residuals("pde.dsigma", &a, tol),
            IdentityReport::from_residuals("pde.dpsi_minus", &c, tol),
        ))
    }

    /// `Ric − Ric* = 4μ² id`, `Ric = 5 Ric*` and `Ric = 5μ² g` on frame
    /// curvature records, with the mean scalar curvature.
    pub fn check_einstein(&self, points: &[ManifoldPoint]) -> Result<EinsteinCheck> {
        let mu = self.estimate_mu(points)?.value;
        let mu2 = mu * mu;
        let id6 = Matrix6::<f64>::identity();
        let per_point: Vec<(f64, f64, f64, f64)> = points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let nan = (f64::NAN, f64::NAN, f64::NAN, f64::NAN);
                let Ok(site) = self.site(IDENTITY_DOMAIN_BASE, i, p) else {
                    return nan;
                };
                let Ok(rec) = self.conn.riemann(&site.frame) else {
                    return nan;
                };
                let mres = |l: Matrix6<f64>, r: Matrix6<f64>| {
                    l.iter()
                        .zip(r.iter())
                        .map(|(a, b)| residual(*a, *b))
                        .fold(0.0, f64::max)
                };
                (
                    mres(rec.ric - rec.ric_star, id6 * (4.0 * mu2)),
                    mres(rec.ric, rec.ric_star * 5.0),
                    mres(rec.ric, id6 * (5.0 * mu2)),
                    rec.scalar_curvature(),
                )
            })
            .collect();
        let tol = self.tolerances.get(Tier::Two);
        let combined: Vec<f64> = per_point
            .iter()
            .map(|r| r.0.max(r.1).max(r.2))
            .collect();
        let col = |f: fn(&(f64, f64, f64, f64)) -> f64| -> Vec<f64> {
            per_point.iter().map(f).collect()
        };
        let max_of = |v: Vec<f64>| v.into_iter().map(sanitize).fold(0.0, f64::max);
        let scalars = col(|r| r.3);
        let n = scalars.len().max(1) as f64;
        Ok(EinsteinCheck {
            report: IdentityReport::from_residuals("einstein", &combined, tol),
            ric_difference: max_of(col(|r| r.0)),
            ric_ratio: max_of(col(|r| r.1)),
            ric_metric: max_of(col(|r| r.2)),
            scalar_curvature: sanitize(scalars.iter().sum::<f64>() / n),
            expected_scalar_curvature: sanitize(30.0 * mu2),
        })
    }

    /// `λ` in the frame of a smooth aligned frame field at every point.
    pub fn lambda_summary(&self, points: &[ManifoldPoint]) -> Result<LambdaSummary> {
        let values: Vec<Result<Complex<f64>>> = points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let mut rng = stream_rng(self.seed, FRAME_FIELD_DOMAIN, i as u64);
                let ff = FrameField::random(&mut rng);
                let frame = ff.at(&self.conn, p.ambient())?;
                let su3 = build_su3_frame(&self.conn, &frame)?;
                Ok(estimate_lambda(&self.conn, &su3).value())
            })
            .collect();
        let values: Vec<Complex<f64>> = values.into_iter().collect::<Result<_>>()?;
        if values.is_empty() {
            return Err(Error::Config("no points to estimate lambda".into()));
        }
        let mean = values.iter().sum::<Complex<f64>>() / values.len() as f64;
        let spread = values
            .iter()
            .map(|v| (v - mean).norm())
            .fold(0.0, f64::max);
        Ok(LambdaSummary {
            re: mean.re,
            im: mean.im,
            spread,
        })
    }

    /// Gray–Hervella `W1` classification from `∇σ` over random frames.
    pub fn classify(&self, points: &[ManifoldPoint]) -> Result<Classification> {
        let stats: Vec<Result<(f64, f64, f64)>> = points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let site = self.site(CLASSIFY_DOMAIN, i, p)?;
                let ns = self.conn.nabla_sigma_frame(&site.frame);
                let part30 = ns.alternation().split3()?.part_30;
                let mut comp: f64 = 0.0;
                let mut member: f64 = 0.0;
                for u in 0..6 {
                    for v in 0..6 {
                        for z in 0..6 {
                            let val = ns.get(u, v, z);
                            comp += (val - part30.component(&[u, v, z])).powi(2);
                            let (sz, jz) = j0_basis(z);
                            let (sv, jv) = j0_basis(v);
                            let lhs = f64::from(sz) * ns.get(u, v, jz);
                            let rhs = f64::from(sv) * ns.get(u, jv, z);
                            member = member.max((lhs - rhs).abs());
                        }
                    }
                }
                Ok((ns.norm(), comp.sqrt(), member))
            })
            .collect();
        let stats: Vec<(f64, f64, f64)> = stats.into_iter().collect::<Result<_>>()?;
        let max = |f: fn(&(f64, f64, f64)) -> f64| stats.iter().map(f).fold(0.0, f64::max);
        let nabla_sigma_norm = max(|s| s.0);
        let complementary_residual = max(|s| s.1);
        let membership_residual = max(|s| s.2);
        let tol = self.tolerances.get(Tier::Two);
        let label = if nabla_sigma_norm < tol {
            ClassLabel::Kahler
        } else if complementary_residual < tol {
            ClassLabel::NearlyKahler
        } else {
            ClassLabel::Other
        };
        Ok(Classification {
            label,
            nabla_sigma_norm,
            complementary_residual,
            membership_residual,
            tol,
        })
    }
}

/// Result of [`Verifier::check_einstein`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EinsteinCheck {
    pub report: IdentityReport,
    /// Largest residual of `Ric − Ric* = 4μ² id`.
    pub ric_difference: f64,
    /// Largest residual of `Ric = 5 Ric*`.
    pub ric_ratio: f64,
    /// Largest residual of `Ric = 5μ² g`.
    pub ric_metric: f64,
    pub scalar_curvature: f64,
    pub expected_scalar_curvature: f64,
}

/// Mean of `λ` over points and the largest deviation from the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaSummary {
    pub re: f64,
    pub im: f64,
    pub spread: f64,
}

impl LambdaSummary {
    pub fn value(&self) -> Complex<f64> {
        Complex::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassLabel {
    #[serde(rename = "Kähler")]
    Kahler,
    #[serde(rename = "nearly Kähler")]
    NearlyKahler,
    #[serde(rename = "other")]
    Other,
}

impl ClassLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassLabel::Kahler => "Kähler",
            ClassLabel::NearlyKahler => "nearly Kähler",
            ClassLabel::Other => "other",
        }
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: ClassLabel,
    /// Largest frame norm of `∇σ`.
    pub nabla_sigma_norm: f64,
    /// Largest norm of `∇σ` minus its `[[Λ^{3,0}]]` part.
    pub complementary_residual: f64,
    /// Largest deviation from `∇σ(U, V, JZ) = ∇σ(U, JV, Z)`.
    pub membership_residual: f64,
    pub tol: f64,
}

fn point_residual(id: IdentityId, s: &mut Site, sh: &Shared, index: usize) -> Result<f64> {
    match id.number() {
        1 => s.max_over_draws(|s| {
            let (x, y) = (s.t(), s.t());
            let l = s.nj(&s.j(&x), &y);
            let r = -s.j(&s.nj(&x, &y));
            Ok(vector_residual(&l, &r))
        }),
        2 => s.max_over_draws(|s| {
            let (x, y, z) = (s.t(), s.t(), s.t());
            let a = s.ns(&s.j(&x), &y, &z);
            let b = s.ns(&x, &s.j(&y), &z);
            let c = s.ns(&x, &y, &s.j(&z));
            Ok(residual(a, b).max(residual(a, c)))
        }),
        3 => s.max_over_draws(|s| {
            let (x, y, z) = (s.t(), s.t(), s.t());
            let v = s.ns(&x, &y, &z);
            Ok(residual(v, -s.ns(&y, &x, &z))
                .max(residual(v, -s.ns(&x, &z, &y)))
                .max(residual(v, -s.ns(&z, &y, &x))))
        }),
        4 => s.max_over_draws(|s| {
            let (x, y, z) = (s.t(), s.t(), s.t());
            let (jx, jy, jz) = (s.j(&x), s.j(&y), s.j(&z));
            let l = s.ns(&jx, &jy, &z) + s.ns(&x, &jy, &jz) + s.ns(&jx, &y, &jz);
            Ok(residual(l, -3.0 * s.ns(&x, &y, &z)))
        }),
        5 => {
            let d_sigma = s
                .fine
                .exterior_derivative(&s.chart(), &FormField::sigma(s.b()))?;
            let ns = s.conn.nabla_sigma_frame(&s.frame);
            let rhs = KForm::from_fn(3, |t| 3.0 * ns.get(t[0], t[1], t[2]));
            Ok(form_residual(&d_sigma, &rhs))
        }
        6 => s.max_over_draws(|s| {
            let (w, x, y, z) = (s.t(), s.t(), s.t(), s.t());
            let l = s.n2s(&w, &x, &y, &z) - s.n2s(&x, &w, &y, &z);
            let rxw = |v: &Vec7| s.conn.curvature(&s.q, &x, &w, v);
            let r = s.b().sigma(&s.q, &rxw(&y), &z) + s.b().sigma(&s.q, &y, &rxw(&z));
            Ok(residual(l, r))
        }),
        7 => s.max_over_draws(|s| {
            let (x, y) = (s.t(), s.t());
            let l = s.n2s(&x, &x, &s.j(&y), &y);
            Ok(residual(l, s.nj(&x, &y).norm_squared()))
        }),
        8 => s.max_over_draws(|s| {
            let (x, y) = (s.t(), s.t());
            let l = s.nj(&x, &y).norm_squared();
            let r = s.r(&x, &y, &s.j(&x), &s.j(&y)) - s.r(&x, &y, &x, &y);
            Ok(residual(l, r))
        }),
        9 => s.max_over_draws(|s| {
            let (w, x, y, z) = (s.t(), s.t(), s.t(), s.t());
            let l = s.r(&s.j(&w), &s.j(&x), &s.j(&y), &s.j(&z));
            Ok(residual(l, s.r(&w, &x, &y, &z)))
        }),
        10 => s.max_over_draws(|s| {
            let (w, x, y, z) = (s.t(), s.t(), s.t(), s.t());
            let l = s.g(&s.nj(&w, &x), &s.nj(&y, &z));
            let r = s.r(&w, &x, &s.j(&y), &s.j(&z)) - s.r(&w, &x, &y, &z);
            Ok(residual(l, r))
        }),
        11 => s.max_over_draws(|s| {
            let (w, x, y, z) = (s.t(), s.t(), s.t(), s.t());
            let l = 2.0 * s.n2s(&w, &x, &y, &z);
            let term = |a: &Vec7, c: &Vec7, d: &Vec7| s.g(&s.nj(&w, a), &s.nj(c, &s.j(d)));
            let r = -(term(&x, &y, &z) + term(&y, &z, &x) + term(&z, &x, &y));
            Ok(residual(l, r))
        }),
        12 => s.max_over_draws(|s| {
            let (x, y) = (s.t(), s.t());
            let r: f64 = (0..6)
                .map(|i| s.g(&s.nj(&x, &s.e(i)), &s.nj(&y, &s.e(i))))
                .sum();
            Ok(residual(s.a(&x, &y), r))
        }),
        13 => s.max_over_draws(|s| {
            let (x, y) = (s.t(), s.t());
            let a = s.a(&x, &y);
            Ok(residual(a, s.a(&y, &x)).max(residual(a, s.a(&s.j(&x), &s.j(&y)))))
        }),
        14 => s.max_over_draws(|s| {
            let (x, y, z) = (s.t(), s.t(), s.t());
            let l = 2.0 * s.conn.nabla_ric_difference(&s.q, &z, &x, &y);
            let r = s.a(&s.j(&x), &s.nj(&z, &y)) + s.a(&s.j(&y), &s.nj(&z, &x));
            Ok(residual(l, r))
        }),
        15 => {
            let mu2 = sh.mu * sh.mu;
            s.max_over_draws(|s| {
                let (x, y) = (s.t(), s.t());
                Ok(residual(s.a(&x, &y), 4.0 * mu2 * s.g(&x, &y)))
            })
        }
        16 => Ok(sh
            .mu_samples
            .get(index)
            .map(|v| {
                v.iter()
                    .map(|m| residual(*m, sh.mu))
                    .fold(0.0, f64::max)
            })
            .unwrap_or(f64::NAN)),
        17 => {
            let chart = s.chart();
            s.max_over_draws(|s| {
                let (x, y) = (s.t(), s.t());
                let n = s.fine.nijenhuis(&chart, &x, &y)?;
                Ok(vector_residual(&n, &s.j(&s.nj(&x, &y))))
            })
        }
        18 => {
            let chart = s.chart();
            s.max_over_draws(|s| hat_metric_and_j(s, &chart))
        }
        19 => s.max_over_draws(|s| {
            let (w, x, y, z) = (s.t(), s.t(), s.t(), s.t());
            let (jx, jy, jz) = (s.j(&x), s.j(&y), s.j(&z));
            let closed = 0.25
                * (3.0 * s.r(&w, &x, &y, &z)
                    + 2.0 * s.r(&w, &x, &jy, &jz)
                    + s.r(&w, &z, &jx, &jy)
                    + s.r(&w, &y, &jz, &jx));
            Ok(residual(s.rhat(&w, &x, &y, &z), closed))
        }),
        20 => s.max_over_draws(|s| {
            let (w, x, y, z) = (s.t(), s.t(), s.t(), s.t());
            let l = s.rhat(&w, &x, &s.j(&y), &s.j(&z));
            Ok(residual(l, s.rhat(&w, &x, &y, &z)))
        }),
        21 => s.max_over_draws(|s| {
            let (w, x, y, z) = (s.t(), s.t(), s.t(), s.t());
            Ok(residual(s.rhat(&w, &x, &y, &z), s.rhat(&y, &z, &w, &x)))
        }),
        22 => s.max_over_draws(|s| {
            let y = s.t();
            let l = (0..6).fold(Vec7::zeros(), |acc, j| {
                acc + s.conn.nabla2_j(&s.q, &s.e(j), &s.e(j), &y)
            });
            let jy = s.j(&y);
            let r = (0..6).fold(Vec7::zeros(), |acc, i| acc - s.e(i) * s.a(&jy, &s.e(i)));
            Ok(vector_residual(&l, &r))
        }),
        23 => {
            let rec = s.conn.riemann(&s.frame)?;
            let a = rec.ric - rec.ric_star;
            s.max_over_draws(|s| {
                let (w, x) = (s.t(), s.t());
                let wc = s.frame.components(&w).0;
                let xc = s.frame.components(&x).0;
                let (mut plain, mut starred) = (0.0, 0.0);
                for i in 0..6 {
                    for j in 0..6 {
                        for p in 0..6 {
                            for r in 0..6 {
                                let c = a[(i, j)] * wc[p] * xc[r];
                                if c == 0.0 {
                                    continue;
                                }
                                plain += c * rec.r4[p][i][j][r];
                                starred += c * with_j(&rec.r4, [p, i, j, r], 0b1100);
                            }
                        }
                    }
                }
                Ok(residual(plain, 5.0 * starred))
            })
        }
        24 => {
            let mu2 = sh.mu * sh.mu;
            s.max_over_draws(|s| {
                let (x, y) = (s.t(), s.t());
                let (ric, ric_star) = s.conn.ricci_pair(&s.q, &x, &y);
                Ok(residual(ric, 5.0 * ric_star).max(residual(ric, 5.0 * mu2 * s.g(&x, &y))))
            })
        }
        25 => {
            let chart = s.chart();
            s.max_over_draws(|s| antiholomorphic_derivative(s, &chart))
        }
        26 => {
            let ff = s.frame_field();
            bracket_residual(s, &ff)
        }
        27 => {
            let ff = s.frame_field();
            let frame = ff.at(s.conn, &s.q)?;
            let su3 = build_su3_frame(s.conn, &frame)?;
            let lambda = estimate_lambda(s.conn, &su3).value();
            let expected = Complex::new(0.0, -SQRT_2 * sh.mu);
            Ok((lambda - expected).norm() / 1f64.max(lambda.norm()).max(expected.norm()))
        }
        28 | 32 => {
            let ff = s.frame_field();
            let PdeForms {
                d_sigma,
                d_psi_minus,
            } = pde_forms(s.fine, &s.q, &ff)?;
            let (sigma, psi_plus, _, _) = model_f64();
            let sigma2 = sigma.wedge(&sigma)?;
            let mu = sh.mu;
            if id.number() == 28 {
                Ok(form_residual(&d_sigma, &psi_plus.scale(3.0 * mu))
                    .max(form_residual(&d_psi_minus, &sigma2.scale(-2.0 * mu))))
            } else {
                let (m2, m3) = (mu * mu, mu * mu * mu);
                Ok(
                    form_residual(&d_sigma.scale(m2), &psi_plus.scale(3.0 * m3)).max(
                        form_residual(&d_psi_minus.scale(m3), &sigma2.scale(-2.0 * m2 * m2)),
                    ),
                )
            }
        }
        29 => {
            let su3 = build_su3_frame(s.conn, &s.frame)?;
            let model = form_residual(&su3.psi_minus, &su3.psi_plus.j_pullback().scale(-1.0))
                .max(form_residual(&su3.psi_minus, &su3.psi_plus.j_last_slot().scale(-1.0)));
            let frame = su3.frame;
            let drawn = s.max_over_draws(|s| {
                let (x, y, z) = (s.t(), s.t(), s.t());
                let c = |v: &Vec7| frame.components(v);
                let l = su3.psi_minus.eval(&[c(&x), c(&y), c(&z)]);
                let r = -su3.psi_plus.eval(&[c(&x), c(&y), c(&s.j(&z))]);
                Ok(residual(l, r))
            })?;
            Ok(model.max(drawn))
        }
        30 => {
            let su3 = build_su3_frame(s.conn, &s.frame)?;
            let sigma = frame_sigma(s.conn, &su3.frame);
            let vol = KForm::vol();
            let pp = &su3.psi_plus;
            let pm = &su3.psi_minus;
            let s3 = sigma.wedge(&sigma)?.wedge(&sigma)?;
            let pw = pp.wedge(pm)?;
            let zero5 = KForm::zero(5);
            Ok(form_residual(&pw, &vol.scale(4.0))
                .max(form_residual(&pw, &s3.scale(2.0 / 3.0)))
                .max(form_residual(&sigma.wedge(pp)?, &zero5))
                .max(form_residual(&sigma.wedge(pm)?, &zero5))
                .max(form_residual(&pp.hodge_star(), pm)))
        }
        31 => {
            let ff = s.frame_field();
            hat_parallel(s, &ff)
        }
        n => Err(Error::UnknownIdentity(format!("I{n}"))),
    }
}

fn coeffs_at_centre(s: &Site, chart: &Chart, v: &Vec7) -> Result<[f64; 6]> {
    chart.coefficients(s.b(), &[0.0; 6], v)
}

/// `∇̂g = 0` and `∇̂J = 0` on coordinate-constant fields.
fn hat_metric_and_j(s: &mut Site, chart: &Chart) -> Result<f64> {
    let (x, y, z) = (s.t(), s.t(), s.t());
    let b = s.b();
    let fx = constant_field(coeffs_at_centre(s, chart, &x)?);
    let fy = constant_field(coeffs_at_centre(s, chart, &y)?);
    let cz = coeffs_at_centre(s, chart, &z)?;
    let fz = constant_field(cz);
    let jx = j_field(s.fine, chart, &fx);
    let hj = s.fine.hat_nabla(chart, &fz, &jx)? - s.j(&s.fine.hat_nabla(chart, &fz, &fx)?);
    let dg = s.fine.oracle().coords(&[cz], |p| {
        chart
            .pushforward(b, p, &fx(p))
            .dot(&chart.pushforward(b, p, &fy(p)))
    })?;
    let hg = dg
        - s.g(&s.fine.hat_nabla(chart, &fz, &fx)?, &y)
        - s.g(&x, &s.fine.hat_nabla(chart, &fz, &fy)?);
    Ok(vector_residual(&hj, &Vec7::zeros()).max(residual(hg, 0.0)))
}

/// `(0,1)` part of `∇_{X̄} Y` for `X = V − iJV`, `Y = U − iJU` extended as
/// coordinate fields; with `∇_{X̄} Y = a + ib` it is proportional to
/// `(J − i)(a + ib)`.
fn antiholomorphic_derivative(s: &mut Site, chart: &Chart) -> Result<f64> {
    let (v, u) = (s.t(), s.t());
    let fv = constant_field(coeffs_at_centre(s, chart, &v)?);
    let fu = constant_field(coeffs_at_centre(s, chart, &u)?);
    let jv = j_field(s.fine, chart, &fv);
    let ju = j_field(s.fine, chart, &fu);
    let nab = |a: &dyn Fn(&[f64; 6]) -> [f64; 6], c: &dyn Fn(&[f64; 6]) -> [f64; 6]| {
        s.fine.nabla_vector(chart, a, c)
    };
    let a = nab(&fv, &fu)? + nab(&jv, &ju)?;
    let b = nab(&jv, &fu)? - nab(&fv, &ju)?;
    let re = s.j(&a) + b;
    let im = s.j(&b) - a;
    let num = (re.norm_squared() + im.norm_squared()).sqrt();
    let den = 1f64.max((a.norm_squared() + b.norm_squared()).sqrt());
    Ok(num / den)
}

/// `[F_i, F_j]^{0,1} = −λ̄ F̄_k` for the fields of a smooth aligned frame,
/// with `λ` from `∇σ` at the centre.
fn bracket_residual(s: &mut Site, ff: &FrameField) -> Result<f64> {
    let b = s.b();
    let conn = s.conn;
    let frame = ff.at(conn, &s.q)?;
    let su3 = build_su3_frame(conn, &frame)?;
    let lambda = estimate_lambda(conn, &su3).value();
    let chart = Chart::from_frame(&frame);
    let field = |a: usize| {
        let chart = &chart;
        move |x: &[f64; 6]| -> [f64; 6] {
            let p = chart.point(b, x);
            match ff.at(conn, &p) {
                Ok(f) => chart.coefficients(b, x, f.vector(a)).unwrap_or([f64::NAN; 6]),
                Err(_) => [f64::NAN; 6],
            }
        }
    };
    let fields: Vec<_> = (0..6).map(field).collect();
    let br = |a: usize, c: usize| -> Result<Vec7> {
        let co = s.fine.bracket(&fields[a], &fields[c])?;
        Ok(chart.pushforward(b, &[0.0; 6], &co))
    };
    let e = frame.vectors();
    let expected = -lambda.conj();
    let scale = 1f64.max(expected.norm());
    let mut worst: f64 = 0.0;
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let (ei, jei, ej, jej) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        let zr = (br(ei, ej)? - br(jei, jej)?) * 0.5;
        let zi = -(br(ei, jej)? + br(jei, ej)?) * 0.5;
        for m in 0..3 {
            let (em, jem) = (&e[2 * m], &e[2 * m + 1]);
            let c = Complex::new(zr.dot(em) + zi.dot(jem), zi.dot(em) - zr.dot(jem)) / SQRT_2;
            let target = if m == k { expected } else { Complex::new(0.0, 0.0) };
            worst = worst.max((c - target).norm() / scale);
        }
    }
    Ok(worst)
}

/// `∇̂(∇σ) = 0` on random vectors and `∇̂ψ± = 0` for the forms of a smooth
/// aligned frame field on coordinate-constant fields.
fn hat_parallel(s: &mut Site, ff: &FrameField) -> Result<f64> {
    let conn = s.conn;
    let fine = s.fine;
    let b = conn.backend();
    let q = s.q;
    let d = |a: &Vec7, v: &Vec7| conn.hermitian_difference(&q, a, v);
    let tensor = s.max_over_draws(|s| {
        let (w, x, y, z) = (s.t(), s.t(), s.t(), s.t());
        let l = s.n2s(&w, &x, &y, &z);
        let r = s.ns(&d(&w, &x), &y, &z) + s.ns(&x, &d(&w, &y), &z) + s.ns(&x, &y, &d(&w, &z));
        Ok(residual(l, r))
    })?;
    let frame = ff.at(conn, &q)?;
    let chart = Chart::from_frame(&frame);
    let (_, psi_plus, psi_minus, _) = model_f64();
    let forms = [ff.form(conn, psi_plus), ff.form(conn, psi_minus)];
    let draws = s.draws;
    let mut worst = tensor;
    for _ in 0..draws {
        let vs = [s.t(), s.t(), s.t(), s.t()];
        let c: Vec<[f64; 6]> = vs
            .iter()
            .map(|v| coeffs_at_centre(s, &chart, v))
            .collect::<Result<_>>()?;
        let fw = constant_field(c[0]);
        let fx = constant_field(c[1]);
        let fy = constant_field(c[2]);
        let fz = constant_field(c[3]);
        let hx = fine.hat_nabla(&chart, &fw, &fx)?;
        let hy = fine.hat_nabla(&chart, &fw, &fy)?;
        let hz = fine.hat_nabla(&chart, &fw, &fz)?;
        let (x, y, z) = (vs[1], vs[2], vs[3]);
        for form in &forms {
            let dpsi = fine.oracle().coords(&[c[0]], |p| {
                let pt = chart.point(b, p);
                let args = [c[1], c[2], c[3]].map(|cc| chart.pushforward(b, p, &cc));
                form.eval(&pt, &args)
            })?;
            let rhs = form.eval(&q, &[hx, y, z]) + form.eval(&q, &[x, hy, z]) + form.eval(&q, &[x, y, hz]);
            let r = residual(dpsi, rhs);
            if r.is_nan() {
                return Ok(f64::NAN);
            }
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// `run_identity` with the default connection of `b`.
pub fn run_identity(
    id: IdentityId,
    b: &dyn AlmostHermitianBackend,
    points: &[ManifoldPoint],
    seed: u64,
) -> Result<IdentityReport> {
    Verifier::new(Connection::new(b), seed).run_identity(id, points)
}

pub fn check_pde_pair(
    b: &dyn AlmostHermitianBackend,
    points: &[ManifoldPoint],
) -> Result<(IdentityReport, IdentityReport)> {
    Verifier::new(Connection::new(b), DEFAULT_SEED).check_pde_pair(points)
}

pub fn check_einstein(b: &dyn AlmostHermitianBackend, points: &[ManifoldPoint]) -> Result<EinsteinCheck> {
    Verifier::new(Connection::new(b), DEFAULT_SEED).check_einstein(points)
}

pub fn classify_gray_hervella_w1(
    b: &dyn AlmostHermitianBackend,
    points: &[ManifoldPoint],
) -> Result<Classification> {
    Verifier::new(Connection::new(b), DEFAULT_SEED).classify(points)
}

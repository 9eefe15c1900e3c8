use nalgebra::Matrix6;

use super::Connection;
use crate::error::{Error, Result};
use crate::exterior6::j0_basis;
use crate::geometry::{AdaptedFrame, Vec7};

/// A `(4,0)` tensor over the six frame slots.
pub type Rank4 = [[[[f64; 6]; 6]; 6]; 6];

/// Curvature data over an adapted frame `E_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureRecord {
    /// `R(E_a, E_b, E_c, E_d) = g(R(E_a, E_b) E_c, E_d)`.
    pub r4: Rank4,
    /// `Ric(E_a, E_b) = Σ_i R(E_a, E_i, E_i, E_b)`.
    pub ric: Matrix6<f64>,
    /// `Ric*(E_a, E_b) = Σ_i R(E_a, E_i, JE_i, JE_b)`.
    pub ric_star: Matrix6<f64>,
    /// `R̂` from the closed formula
    /// `¼(3R(W,X,Y,Z) + 2R(W,X,JY,JZ) + R(W,Z,JX,JY) + R(W,Y,JZ,JX))`.
    pub rhat: Rank4,
}

/// Index of `J E_a` in the frame, with sign.
fn j_slot(a: usize) -> (f64, usize) {
    let (s, i) = j0_basis(a);
    (f64::from(s), i)
}

/// `T` with `J` inserted in the slots selected by `mask` (bit k = slot k).
pub(crate) fn with_j(t: &Rank4, idx: [usize; 4], mask: u8) -> f64 {
    let mut sign = 1.0;
    let mut i = idx;
    for (k, slot) in i.iter_mut().enumerate() {
        if mask & (1 << k) != 0 {
            let (s, j) = j_slot(*slot);
            sign *= s;
            *slot = j;
        }
    }
    sign * t[i[0]][i[1]][i[2]][i[3]]
}

fn zero_rank4() -> Rank4 {
    [[[[0.0; 6]; 6]; 6]; 6]
}

impl CurvatureRecord {
    pub fn from_r4(r4: Rank4) -> Self {
        let mut ric = Matrix6::zeros();
        let mut ric_star = Matrix6::zeros();
        for a in 0..6 {
            for b in 0..6 {
                for i in 0..6 {
                    ric[(a, b)] += r4[a][i][i][b];
                    ric_star[(a, b)] += with_j(&r4, [a, i, i, b], 0b1100);
                }
            }
        }
        let mut rhat = zero_rank4();
        for w in 0..6 {
            for x in 0..6 {
                for y in 0..6 {
                    for z in 0..6 {
                        rhat[w][x][y][z] = 0.25
                            * (3.0 * r4[w][x][y][z]
                                + 2.0 * with_j(&r4, [w, x, y, z], 0b1100)
                                + with_j(&r4, [w, z, x, y], 0b1100)
                                + with_j(&r4, [w, y, z, x], 0b1100));
                    }
                }
            }
        }
        CurvatureRecord {
            r4,
            ric,
            ric_star,
            rhat,
        }
    }

    pub fn scalar_curvature(&self) -> f64 {
        self.ric.trace()
    }

    /// Largest of the antisymmetry, pair-symmetry and first Bianchi residuals.
    pub fn symmetry_residuals(&self) -> SymmetryResiduals {
        let r = &self.r4;
        let mut out = SymmetryResiduals::default();
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    for d in 0..6 {
                        let v = r[a][b][c][d];
                        out.antisymmetry = out
                            .antisymmetry
                            .max((v + r[b][a][c][d]).abs())
                            .max((v + r[a][b][d][c]).abs());
                        out.pair_symmetry = out.pair_symmetry.max((v - r[c][d][a][b]).abs());
                        out.bianchi = out
                            .bianchi
                            .max((v + r[b][c][a][d] + r[c][a][b][d]).abs());
                    }
                }
            }
        }
        out.ricci_symmetry = (self.ric - self.ric.transpose()).abs().max();
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SymmetryResiduals {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
    pub ricci_symmetry: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        self.antisymmetry
            .max(self.pair_symmetry)
            .max(self.bianchi)
            .max(self.ricci_symmetry)
    }
}

/// Symmetry residual above which [`Connection::riemann`] reports a broken
/// derivative path.
pub const DEFAULT_SYMMETRY_LIMIT: f64 = 1e-4;

impl Connection<'_> {
    /// Curvature record over `frame`; fails when the symmetries of `R` are
    /// violated by more than [`DEFAULT_SYMMETRY_LIMIT`].
    pub fn riemann(&self, frame: &AdaptedFrame) -> Result<CurvatureRecord> {
        self.riemann_with_limit(frame, DEFAULT_SYMMETRY_LIMIT)
    }

    pub fn riemann_with_limit(&self, frame: &AdaptedFrame, limit: f64) -> Result<CurvatureRecord> {
        let q = frame.base();
        let e = frame.vectors();
        let mut r4 = zero_rank4();
        for a in 0..6 {
            for b in 0..6 {
                if a == b {
                    continue;
                }
                for c in 0..6 {
                    let v = self.curvature(q, &e[a], &e[b], &e[c]);
                    for d in 0..6 {
                        r4[a][b][c][d] = v.dot(&e[d]);
                    }
                }
            }
        }
        let rec = CurvatureRecord::from_r4(r4);
        let res = rec.symmetry_residuals();
        let scale = rec
            .r4
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(1.0f64, |m, v| m.max(v.abs()));
        let checks = [
            ("antisymmetry", res.antisymmetry),
            ("pair symmetry", res.pair_symmetry),
            ("first Bianchi", res.bianchi),
            ("Ricci symmetry", res.ricci_symmetry),
        ];
        for (which, residual) in checks {
            if residual / scale > limit {
                return Err(Error::CurvatureSymmetry {
                    which,
                    residual,
                    limit,
                });
            }
        }
        Ok(rec)
    }

    /// `R̂(W, X) Y` from the definition of the curvature of
    /// `∇̂ = ∇ + D`, `D_X Y = −½ J (∇_X J) Y`:
    /// `R + (∇_W D)_X − (∇_X D)_W + [D_W, D_X]`.
    pub fn hat_curvature(&self, q: &Vec7, w: &Vec7, x: &Vec7, y: &Vec7) -> Vec7 {
        let b = self.backend();
        let nabla_d = |a: &Vec7, c: &Vec7| -> Vec7 {
            let inner = self.nabla_j(q, c, y);
            -0.5 * (self.nabla_j(q, a, &inner) + b.j(q, &self.nabla2_j(q, a, c, y)))
        };
        let d = |a: &Vec7, v: &Vec7| self.hermitian_difference(q, a, v);
        self.curvature(q, w, x, y) + nabla_d(w, x) - nabla_d(x, w) + d(w, &d(x, y))
            - d(x, &d(w, y))
    }
}

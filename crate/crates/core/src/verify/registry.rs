use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::connection::Tier;
use crate::error::{Error, Result};

/// Key `I1`..`I32` of a registered identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdentityId(u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentitySpec {
    pub number: u8,
    pub statement: &'static str,
    pub tier: Tier,
}

const fn spec(number: u8, statement: &'static str, tier: Tier) -> IdentitySpec {
    IdentitySpec {
        number,
        statement,
        tier,
    }
}

pub const REGISTRY: [IdentitySpec; 32] = [
    spec(1, "(∇_{JX}J)Y = −J(∇_X J)Y", Tier::One),
    spec(2, "∇σ(JX,Y,Z) = ∇σ(X,JY,Z) = ∇σ(X,Y,JZ)", Tier::One),
    spec(3, "∇σ is totally skew", Tier::One),
    spec(4, "J·∇σ = −3∇σ", Tier::One),
    spec(5, "dσ = 3∇σ", Tier::One),
    spec(6, "∇²σ(W,X,Y,Z) − ∇²σ(X,W,Y,Z) = σ(R(X,W)Y,Z) + σ(Y,R(X,W)Z)", Tier::Two),
    spec(7, "∇²σ(X,X,JY,Y) = ‖(∇_X J)Y‖²", Tier::Two),
    spec(8, "‖(∇_X J)Y‖² = R(X,Y,JX,JY) − R(X,Y,X,Y)", Tier::Two),
    spec(9, "R(JW,JX,JY,JZ) = R(W,X,Y,Z)", Tier::Two),
    spec(10, "g((∇_W J)X,(∇_Y J)Z) = R(W,X,JY,JZ) − R(W,X,Y,Z)", Tier::Two),
    spec(11, "2∇²σ(W,X,Y,Z) = −Σ_cyc(X,Y,Z) g((∇_W J)X,(∇_Y J)JZ)", Tier::Two),
    spec(12, "g((Ric − Ric*)X,Y) = Σ_i g((∇_X J)E_i,(∇_Y J)E_i)", Tier::Two),
    spec(13, "Ric − Ric* is self-adjoint and commutes with J", Tier::Two),
    spec(
        14,
        "2g((∇_Z(Ric − Ric*))X,Y) = g((Ric − Ric*)JX,(∇_Z J)Y) + g((Ric − Ric*)JY,(∇_Z J)X)",
        Tier::Three,
    ),
    spec(15, "Ric − Ric* = 4μ² id", Tier::Two),
    spec(16, "μ is constant", Tier::Two),
    spec(17, "N(X,Y) = J(∇_X J)Y", Tier::One),
    spec(18, "∇̂g = 0 and ∇̂J = 0", Tier::One),
    spec(
        19,
        "R̂(W,X,Y,Z) = ¼(3R(W,X,Y,Z) + 2R(W,X,JY,JZ) + R(W,Z,JX,JY) + R(W,Y,JZ,JX))",
        Tier::Two,
    ),
    spec(20, "R̂(W,X,JY,JZ) = R̂(W,X,Y,Z)", Tier::Two),
    spec(21, "R̂(W,X,Y,Z) = R̂(Y,Z,W,X)", Tier::Two),
    spec(22, "Σ_j (∇²_{E_j,E_j} J)Y = −(Ric − Ric*)JY", Tier::Two),
    spec(
        23,
        "Σ_ij g((Ric − Ric*)E_i,E_j)(R(W,E_i,E_j,X) − 5R(W,E_i,JE_j,JX)) = 0",
        Tier::Two,
    ),
    spec(24, "Ric = 5Ric* and Ric = 5μ² g", Tier::Two),
    spec(25, "∇_{X̄}Y ∈ T^{1,0} for X, Y ∈ T^{1,0}", Tier::One),
    spec(26, "[F_i,F_j]^{0,1} = −λ̄ F̄_k for cyclic (i,j,k)", Tier::Two),
    spec(27, "λ = −i√2 μ", Tier::Two),
    spec(28, "dσ = 3μψ₊ and dψ₋ = −2μ σ∧σ", Tier::Two),
    spec(29, "ψ₋ = −J·ψ₊ and ψ₋ = −ψ₊(·,·,J·)", Tier::One),
    spec(30, "ψ₊∧ψ₋ = 4vol = ⅔σ³, σ∧ψ± = 0, *ψ₊ = ψ₋", Tier::One),
    spec(31, "∇̂(∇σ) = 0 and ∇̂ψ± = 0", Tier::Two),
    spec(32, "dσ̃ = 3ψ̃₊ and dψ̃₋ = −2σ̃∧σ̃ for σ̃ = μ²σ, ψ̃± = μ³ψ±", Tier::Two),
];

impl IdentityId {
    pub fn new(number: u8) -> Result<Self> {
        if (1..=32).contains(&number) {
            Ok(IdentityId(number))
        } else {
            Err(Error::UnknownIdentity(format!("I{number}")))
        }
    }

    pub fn number(&self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = IdentityId> {
        (1..=32).map(IdentityId)
    }

    pub fn spec(&self) -> &'static IdentitySpec {
        &REGISTRY[usize::from(self.0) - 1]
    }

    pub fn tier(&self) -> Tier {
        self.spec().tier
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I{}", self.0)
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t
            .strip_prefix('I')
            .or_else(|| t.strip_prefix('i'))
            .ok_or_else(|| Error::UnknownIdentity(t.to_string()))?;
        let n: u8 = digits
            .parse()
            .map_err(|_| Error::UnknownIdentity(t.to_string()))?;
        IdentityId::new(n).map_err(|_| Error::UnknownIdentity(t.to_string()))
    }
}

impl Serialize for IdentityId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IdentityId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Residual statistics of one identity over a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub id: String,
    pub n: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Non-finite residuals are recorded as `f64::MAX` so reports stay
/// serialisable and fail.
pub(crate) fn sanitize(r: f64) -> f64 {
    if r.is_finite() {
        r
    } else {
        f64::MAX
    }
}

impl IdentityReport {
    pub fn from_residuals(id: impl Into<String>, residuals: &[f64], tol: f64) -> Self {
        let n = residuals.len();
        let max_residual = residuals.iter().map(|&r| sanitize(r)).fold(0.0, f64::max);
        let mean_residual = if n == 0 {
            0.0
        } else {
            sanitize(residuals.iter().map(|&r| sanitize(r) / n as f64).sum())
        };
        IdentityReport {
            id: id.into(),
            n,
            max_residual,
            mean_residual,
            tol,
            pass: n > 0 && max_residual < tol,
        }
    }
}

/// `|l − r| / max(1, |l|, |r|)`.
pub fn residual(l: f64, r: f64) -> f64 {
    (l - r).abs() / 1f64.max(l.abs()).max(r.abs())
}

/// Vector version of [`residual`] with Euclidean norms.
pub fn vector_residual(l: &crate::geometry::Vec7, r: &crate::geometry::Vec7) -> f64 {
    (l - r).norm() / 1f64.max(l.norm()).max(r.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let id: IdentityId = "I17".parse().unwrap();
        assert_eq!(id.number(), 17);
        assert_eq!(id.to_string(), "I17");
        assert!("I0".parse::<IdentityId>().is_err());
        assert!("I33".parse::<IdentityId>().is_err());
        assert!("foo".parse::<IdentityId>().is_err());
        assert_eq!(IdentityId::all().count(), 32);
        for (i, s) in REGISTRY.iter().enumerate() {
            assert_eq!(usize::from(s.number), i + 1);
        }
    }

    #[test]
    fn report_pass_flag() {
        let r = IdentityReport::from_residuals("I1", &[1e-9, 2e-9], 1e-6);
        assert!(r.pass);
        assert_eq!(r.n, 2);
        let r = IdentityReport::from_residuals("I1", &[1e-9, f64::NAN], 1e-6);
        assert!(!r.pass);
        assert_eq!(r.max_residual, f64::MAX);
        assert!(!IdentityReport::from_residuals("I1", &[], 1e-6).pass);
    }

    #[test]
    fn residual_normalisation() {
        assert_eq!(residual(0.0, 1e-3), 1e-3);
        assert!((residual(100.0, 101.0) - 1.0 / 101.0).abs() < 1e-15);
    }
}

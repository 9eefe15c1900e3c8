use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{stream_rng, MU_DOMAIN};
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::geometry::{ManifoldPoint, Vec7};

/// Pairs whose bracket `‖X‖²‖Y‖² − g(X,Y)² − σ(X,Y)²` falls below this are skipped.
pub const DEGENERATE_BRACKET: f64 = 1e-6;

/// Pairs drawn per point.
pub const PAIRS_PER_POINT: usize = 10;

/// The constant-type function `μ`, sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub value: f64,
    /// `max − min` over all samples.
    pub spread: f64,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
    pub skipped: usize,
}

/// `‖X‖²‖Y‖² − g(X,Y)² − σ(X,Y)²`.
pub fn mu_bracket(conn: &Connection, q: &Vec7, x: &Vec7, y: &Vec7) -> f64 {
    let b = conn.backend();
    let gxy = b.metric(q, x, y);
    let sxy = b.sigma(q, x, y);
    b.metric(q, x, x) * b.metric(q, y, y) - gxy * gxy - sxy * sxy
}

/// Per-sample `μ = sqrt(‖(∇_X J)Y‖² / bracket)` over random unit pairs.
pub fn estimate_mu(conn: &Connection, points: &[ManifoldPoint], seed: u64) -> Result<MuEstimate> {
    estimate_mu_with(conn, points, seed, PAIRS_PER_POINT)
}

pub fn estimate_mu_with(
    conn: &Connection,
    points: &[ManifoldPoint],
    seed: u64,
    pairs: usize,
) -> Result<MuEstimate> {
    let (per_point, skipped) = mu_samples(conn, points, seed, pairs);
    let all: Vec<f64> = per_point.into_iter().flatten().collect();
    if all.is_empty() {
        return Err(Error::AllPairsDegenerate);
    }
    let value = all.iter().sum::<f64>() / all.len() as f64;
    let min = all.iter().copied().fold(f64::INFINITY, f64::min);
    let max = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MuEstimate {
        value,
        spread: max - min,
        min,
        max,
        samples: all.len(),
        skipped,
    })
}

/// Non-degenerate per-pair samples of `μ` at each point, and the number of
/// skipped pairs.
pub fn mu_samples(
    conn: &Connection,
    points: &[ManifoldPoint],
    seed: u64,
    pairs: usize,
) -> (Vec<Vec<f64>>, usize) {
    let b = conn.backend();
    let per_point: Vec<(Vec<f64>, usize)> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let q = p.ambient();
            let mut rng = stream_rng(seed, MU_DOMAIN, i as u64);
            let mut out = Vec::with_capacity(pairs);
            let mut skipped = 0;
            for _ in 0..pairs {
                let x = b.random_unit_tangent(q, &mut rng);
                let y = b.random_unit_tangent(q, &mut rng);
                let bracket = mu_bracket(conn, q, &x, &y);
                if bracket < DEGENERATE_BRACKET {
                    skipped += 1;
                    continue;
                }
                out.push((conn.nabla_j(q, &x, &y).norm_squared() / bracket).sqrt());
            }
            (out, skipped)
        })
        .collect();
    let skipped = per_point.iter().map(|(_, s)| s).sum();
    (per_point.into_iter().map(|(v, _)| v).collect(), skipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{backend_flat_kahler, backend_s6, backend_s6_radius, AlmostHermitianBackend};
    use crate::verify::sampling::sample_points;

    #[test]
    fn flat_mu_is_zero() {
        let b = backend_flat_kahler();
        let m = estimate_mu(&Connection::new(&b), &sample_points(&b, 5, 1), 1).unwrap();
        assert_eq!(m.value, 0.0);
        assert_eq!(m.samples + m.skipped, 5 * PAIRS_PER_POINT);
    }

    #[test]
    fn sphere_mu_is_inverse_radius() {
        for r in [1.0, 2.0, 0.5] {
            let b = backend_s6_radius(r).unwrap();
            let m = estimate_mu(&Connection::new(&b), &sample_points(&b, 5, 2), 2).unwrap();
            assert!((m.value - 1.0 / r).abs() < 1e-10, "{m:?}");
            assert!(m.spread < 1e-10);
        }
    }

    #[test]
    fn bracket_degenerates_on_complex_lines() {
        let b = backend_s6();
        let conn = Connection::new(&b);
        let p = &sample_points(&b, 1, 3)[0];
        let q = p.ambient();
        let mut rng = stream_rng(0, 0, 0);
        let x = b.random_unit_tangent(q, &mut rng);
        let jx = b.j(q, &x);
        assert!(mu_bracket(&conn, q, &x, &jx).abs() < 1e-12);
        assert!(mu_bracket(&conn, q, &x, &x).abs() < 1e-12);
    }

    #[test]
    fn no_pairs_is_an_error() {
        let b = backend_s6();
        let pts = sample_points(&b, 2, 4);
        assert!(matches!(
            estimate_mu_with(&Connection::new(&b), &pts, 4, 0),
            Err(Error::AllPairsDegenerate)
        ));
    }
}

//! The full identity suite on the round unit six-sphere with its octonionic
//! almost complex structure, using closed-form derivatives.
//!
//! `cargo run --example s6_suite -- [points] [seed]`

use nk6::connection::Connection;
use nk6::geometry::{backend_s6, AlmostHermitianBackend};
use nk6::verify::sampling::sample_points;
use nk6::verify::{IdentityId, Verifier, DEFAULT_SEED};

fn main() -> nk6::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);

    let b = backend_s6();
    let points = sample_points(&b, n, seed);
    let v = Verifier::new(Connection::new(&b), seed);
    for id in IdentityId::all() {
        let r = v.run_identity(id, &points)?;
        println!(
            "{:>4}  max {:.2e}  mean {:.2e}  tol {:.0e}  {}  {}",
            r.id,
            r.max_residual,
            r.mean_residual,
            r.tol,
            if r.pass { "pass" } else { "FAIL" },
            id.spec().statement
        );
    }
    let mu = v.estimate_mu(&points)?;
    let lambda = v.lambda_summary(&points)?;
    let e = v.check_einstein(&points)?;
    println!("mu = {:.9} (spread {:.1e})", mu.value, mu.spread);
    println!("lambda = {:.9} {:+.9}i", lambda.re, lambda.im);
    let conn = v.connection();
    let q = points[0].ambient();
    let x = b.random_unit_tangent(q, &mut rand::rng());
    let (ric, ric_star) = conn.ricci_pair(q, &x, &x);
    println!("Ric(X,X) = {ric:.9}, Ric*(X,X) = {ric_star:.9} for a random unit X");
    println!("Einstein residuals: Ric − Ric* {:.1e}, Ric − 5Ric* {:.1e}, Ric − 5μ²g {:.1e}", e.ric_difference, e.ric_ratio, e.ric_metric);
    println!("scalar curvature = {:.6} (expected {:.6})", e.scalar_curvature, e.expected_scalar_curvature);
    Ok(())
}

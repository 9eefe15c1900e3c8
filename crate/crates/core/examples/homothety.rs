//! Scaling the sphere to radius `r` scales `μ` by `1/r`, `λ` by `1/r` and the
//! scalar curvature by `1/r²`.
//!
//! `cargo run --example homothety`

use nk6::connection::Connection;
use nk6::geometry::backend_s6_radius;
use nk6::verify::sampling::sample_points;
use nk6::verify::{IdentityId, Verifier, DEFAULT_SEED};

fn main() -> nk6::Result<()> {
    println!("{:>5} {:>12} {:>12} {:>12} {:>10}", "r", "mu", "|lambda|", "scalar", "I32");
    for r in [0.5, 1.0, 2.0, 4.0] {
        let b = backend_s6_radius(r)?;
        let points = sample_points(&b, 10, DEFAULT_SEED);
        let v = Verifier::new(Connection::new(&b), DEFAULT_SEED);
        let mu = v.estimate_mu(&points)?;
        let lambda = v.lambda_summary(&points)?;
        let e = v.check_einstein(&points)?;
        let i32 = v.run_identity(IdentityId::new(32).expect("registered"), &points)?;
        println!(
            "{r:>5} {:>12.8} {:>12.8} {:>12.6} {:>10.2e}",
            mu.value,
            lambda.value().norm(),
            e.scalar_curvature,
            i32.max_residual
        );
    }
    Ok(())
}

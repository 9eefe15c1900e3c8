//! Flat C³ as a control: every identity holds, `∇J = 0`, `μ = 0` and the
//! structure classifies as Kähler.
//!
//! `cargo run --example flat_kahler`

use nk6::connection::Connection;
use nk6::geometry::backend_flat_kahler;
use nk6::verify::sampling::sample_points;
use nk6::verify::{IdentityId, Verifier, DEFAULT_SEED};

fn main() -> nk6::Result<()> {
    let b = backend_flat_kahler();
    let points = sample_points(&b, 10, DEFAULT_SEED);
    let v = Verifier::new(Connection::new(&b), DEFAULT_SEED);
    for id in IdentityId::all() {
        let r = v.run_identity(id, &points)?;
        println!("{:>4}  max {:.2e}  {}", r.id, r.max_residual, if r.pass { "pass" } else { "FAIL" });
    }
    let mu = v.estimate_mu(&points)?;
    let class = v.classify(&points)?;
    println!("mu = {:.3e}", mu.value);
    println!("class: {} (|∇σ| = {:.2e})", class.label, class.nabla_sigma_norm);
    Ok(())
}

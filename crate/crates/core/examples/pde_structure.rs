//! The structure equations `dσ = 3μψ₊` and `dψ₋ = −2μσ∧σ` evaluated with
//! finite-difference exterior derivatives along a smooth SU(3) frame field.
//!
//! `cargo run --example pde_structure`

use nk6::connection::Connection;
use nk6::geometry::{backend_perturbed, backend_s6, backend_s6_radius, AlmostHermitianBackend};
use nk6::verify::sampling::sample_points;
use nk6::verify::{Verifier, DEFAULT_SEED};

fn report(name: &str, b: &dyn AlmostHermitianBackend) -> nk6::Result<()> {
    let points = sample_points(b, 8, DEFAULT_SEED);
    let v = Verifier::new(Connection::new(b), DEFAULT_SEED);
    let (ds, dp) = v.check_pde_pair(&points)?;
    println!(
        "{name:<14} dσ {:.2e} {}   dψ₋ {:.2e} {}",
        ds.max_residual,
        if ds.pass { "pass" } else { "FAIL" },
        dp.max_residual,
        if dp.pass { "pass" } else { "FAIL" },
    );
    Ok(())
}

fn main() -> nk6::Result<()> {
    report("S⁶", &backend_s6())?;
    report("S⁶(r = 2)", &backend_s6_radius(2.0)?)?;
    report("ellipsoid 0.1", &backend_perturbed(0.1)?)?;
    Ok(())
}

//! Deforming the sphere into an ellipsoid breaks the nearly Kähler condition
//! while keeping a valid almost Hermitian structure. The residuals of the
//! defining identities grow with the deformation.
//!
//! `cargo run --example negative_control`

use nk6::connection::Connection;
use nk6::geometry::{backend_perturbed, structure_residuals};
use nk6::verify::sampling::sample_points;
use nk6::verify::{IdentityId, Verifier, DEFAULT_SEED};

fn main() -> nk6::Result<()> {
    let ids: Vec<IdentityId> = [3, 5, 15, 16, 24, 28]
        .into_iter()
        .map(|n| IdentityId::new(n).expect("registered"))
        .collect();
    print!("{:>6} {:>9}", "delta", "J,g");
    for id in &ids {
        print!(" {:>9}", id.to_string());
    }
    println!();
    for delta in [0.001, 0.01, 0.05, 0.1, 0.2] {
        let b = backend_perturbed(delta)?;
        let points = sample_points(&b, 6, DEFAULT_SEED);
        let structure = points
            .iter()
            .map(|p| structure_residuals(&b, p.ambient()).max_residual())
            .fold(0.0, f64::max);
        let v = Verifier::new(Connection::new(&b), DEFAULT_SEED);
        print!("{delta:>6} {structure:>9.1e}");
        for id in &ids {
            print!(" {:>9.2e}", v.run_identity(*id, &points)?.max_residual);
        }
        println!();
    }
    Ok(())
}

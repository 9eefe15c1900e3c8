//! Gray–Hervella W1 classification from sampled `∇σ`.
//!
//! `cargo run --example classify`

use nk6::geometry::{backend_flat_kahler, backend_perturbed, backend_s6, AlmostHermitianBackend};
use nk6::verify::classify_gray_hervella_w1;
use nk6::verify::sampling::sample_points;

fn main() -> nk6::Result<()> {
    let s6 = backend_s6();
    let c3 = backend_flat_kahler();
    let ell = backend_perturbed(0.1)?;
    let backends: [(&str, &dyn AlmostHermitianBackend); 3] =
        [("S⁶", &s6), ("C³", &c3), ("ellipsoid", &ell)];
    for (name, b) in backends {
        let c = classify_gray_hervella_w1(b, &sample_points(b, 8, 5))?;
        println!(
            "{name:<10} {:<14} |∇σ| {:.3e}  non-W1 part {:.3e}  J-membership {:.3e}",
            c.label.to_string(),
            c.nabla_sigma_norm,
            c.complementary_residual,
            c.membership_residual
        );
    }
    Ok(())
}

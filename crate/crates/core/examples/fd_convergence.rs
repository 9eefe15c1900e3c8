//! Central differences against the closed-form `∇J` on S⁶. Halving the step
//! should divide the discrepancy by about four.
//!
//! `cargo run --example fd_convergence`

use nk6::geometry::backend_s6;
use nk6::verify::fd_convergence;
use nk6::verify::sampling::sample_points;

fn main() -> nk6::Result<()> {
    let b = backend_s6();
    let points = sample_points(&b, 10, 1);
    let steps = [8e-3, 4e-3, 2e-3, 1e-3];
    let study = fd_convergence(&b, &points, &steps, 1)?;
    for ((h, d), c) in study.steps.iter().zip(&study.discrepancies).zip(study.constants()) {
        println!("h = {h:.0e}  discrepancy {d:.3e}  discrepancy/h² {c:.4}");
    }
    for r in study.ratios() {
        println!("ratio {r:.4}");
    }
    Ok(())
}

//! The SU(3) forms of the model space `(R^6, g0, J0)` and their type
//! decompositions, computed in exact integer arithmetic.
//!
//! `cargo run --example model_forms`

use nk6::exterior6::{model_su3_forms, numerical_rank, operator_matrix, KForm};

fn main() {
    let m = model_su3_forms();
    let sigma2 = m.sigma.wedge(&m.sigma).unwrap();
    let sigma3 = sigma2.wedge(&m.sigma).unwrap();
    let psi_pm = m.psi_plus.wedge(&m.psi_minus).unwrap();

    println!("σ  = {:?}", m.sigma.coeffs());
    println!("ψ₊ = {:?}", m.psi_plus.coeffs());
    println!("ψ₋ = {:?}", m.psi_minus.coeffs());
    println!("σ∧ψ₊ = 0: {}", m.sigma.wedge(&m.psi_plus).unwrap() == KForm::zero(5));
    println!("σ∧ψ₋ = 0: {}", m.sigma.wedge(&m.psi_minus).unwrap() == KForm::zero(5));
    println!("σ³ = {} vol", sigma3.component(&[0, 1, 2, 3, 4, 5]));
    println!("ψ₊∧ψ₋ = {} vol", psi_pm.component(&[0, 1, 2, 3, 4, 5]));

    let psi_plus = KForm::<f64>::from(&m.psi_plus);
    let psi_minus = KForm::<f64>::from(&m.psi_minus);
    println!("⋆ψ₊ − ψ₋ = {:.1e}", (&psi_plus.hodge_star() - &psi_minus).max_abs());
    let split = psi_plus.split3().unwrap();
    println!("ψ₊ has [[Λ^{{2,1}}]] part {:.1e}", split.part_21.max_abs());

    for degree in 2..=3 {
        let jm = operator_matrix(degree, |f| f.j_action().unwrap());
        println!("rank of J on Λ^{degree}: {}", numerical_rank(&jm, 1e-12));
    }
}

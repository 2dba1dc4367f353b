//! Cross-checks the two propagator routes: spectral (Jacobi
//! eigendecomposition) against the scaled-and-squared power series.
//!
//! ```bash
//! cargo run --example propagator_cross_check
//! ```

use qem::linalg::{eigendecompose, propagator, taylor_propagator};
use qem::model::{cue_hamiltonian, Cue, ModelParams, WordClass};

fn main() {
    let t = std::f64::consts::FRAC_PI_2;
    let params = ModelParams::reference_fit();
    let h = cue_hamiltonian(Cue::L1, params.drivers_for(WordClass::Hfc));

    let eigen = eigendecompose(&h).unwrap();
    println!("cue Hamiltonian for list 1 (HFC drivers)");
    println!(
        "  eigenvalues: {}",
        eigen
            .values
            .iter()
            .map(|v| format!("{v:+.5}"))
            .collect::<Vec<_>>()
            .join("  ")
    );
    println!(
        "  reconstruction residual: {:.2e}",
        eigen.reconstruct().max_abs_diff(&h)
    );

    let spectral = propagator(&h, t).unwrap();
    let series = taylor_propagator(&h, t).unwrap();
    println!("propagators at t = pi/2");
    println!("  spectral unitarity defect: {:.2e}", spectral.unitarity_defect());
    println!("  series unitarity defect:   {:.2e}", series.unitarity_defect());
    println!("  route disagreement:        {:.2e}", spectral.max_abs_diff(&series));

    let half = propagator(&h, t / 2.0).unwrap();
    println!(
        "  group property |U(t/2)U(t/2) - U(t)|: {:.2e}",
        half.compose(&half).max_abs_diff(&spectral)
    );
}

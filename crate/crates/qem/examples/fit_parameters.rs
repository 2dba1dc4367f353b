//! Fits the eight drivers to the bundled observed dataset: coarse
//! multi-resolution grid search, then Nelder-Mead refinement.
//!
//! ```bash
//! cargo run --example fit_parameters
//! ```

use qem::fit::{grid_search, refine, GridSpec};
use qem::model::ModelParams;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/brainerd2013_table2.csv");
    let obs = qem::load_observations(std::fs::File::open(path).unwrap()).unwrap();

    let spec = GridSpec::default();
    println!(
        "grid: {} points per driver on [{}, {}], {} levels, shrink {}",
        spec.axes[0].points,
        spec.axes[0].lower,
        spec.axes[0].upper,
        spec.refinement_levels,
        spec.shrink_factor
    );

    let coarse = grid_search(&obs, &spec, &ModelParams::zero_drivers()).unwrap();
    for level in coarse.trajectory.as_deref().unwrap_or_default() {
        println!("  level {}: incumbent rmse {:.6}", level.level, level.rmse);
    }
    println!(
        "grid search: rmse {:.6} after {} evaluations",
        coarse.rmse, coarse.evaluations
    );

    let polished = refine(&obs, &coarse.params).unwrap();
    println!(
        "refinement:  rmse {:.6} after {} more evaluations",
        polished.rmse, polished.evaluations
    );

    let p = &polished.params;
    println!();
    println!("fitted drivers:");
    println!("  nu        {:+.5}", p.nu);
    println!("  nu_prime  {:+.5}", p.nu_prime);
    println!("  gamma     {:+.5}", p.gamma);
    println!("  gamma_prime  HFC {:+.5}  HFA {:+.5}  LFC {:+.5}  LFA {:+.5}",
        p.gamma_prime.hfc, p.gamma_prime.hfa, p.gamma_prime.lfc, p.gamma_prime.lfa);
    println!("  kappa     {:+.5}", p.kappa);
}

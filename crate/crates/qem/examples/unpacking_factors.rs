//! Splits each unpacking factor into its verbatim and gist balance terms.
//!
//! The identity `UF = 1 + verbatim_balance + gist_balance` holds exactly:
//! everything above 1 is carried by gist amplitude that every single-list
//! probe accepts but the union query counts only once, plus the verbatim
//! imbalance between the single-probe and union-probe evolutions.
//!
//! ```bash
//! cargo run --example unpacking_factors
//! ```

use qem::model::{uf_decomposition, unpacking_factor, Cue, ModelParams, WordClass};

fn main() {
    let params = ModelParams::reference_fit();

    println!("class  cue      UF   = 1 + verbatim + gist");
    for &class in &WordClass::ALL {
        for &cue in &Cue::ALL {
            let uf = unpacking_factor(class, cue, &params).unwrap();
            let d = uf_decomposition(class, cue, &params).unwrap();
            println!(
                "{class}    {cue}   {uf:.4} = 1 {:+.4} {:+.4}",
                d.verbatim_balance, d.gist_balance
            );
        }
    }

    // With the drivers off, the dynamics only add phases: the gist slot
    // carries 1/8 of the initial weight, giving UF = 0.75 / 0.5 = 1.5,
    // and removing gist entirely restores classical additivity.
    let mut quiet = ModelParams::zero_drivers();
    println!();
    println!(
        "zero drivers, g = 0.5: UF = {:.3}",
        unpacking_factor(WordClass::Hfc, Cue::L1, &quiet).unwrap()
    );
    quiet.g = 0.0;
    println!(
        "zero drivers, g = 0.0: UF = {:.3}",
        unpacking_factor(WordClass::Hfc, Cue::L1, &quiet).unwrap()
    );
}

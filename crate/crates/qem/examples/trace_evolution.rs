//! Samples the acceptance probabilities through both evolution stages for
//! an HFC word cued from list 1, as CSV on standard output.
//!
//! The first stage (cue processing) runs to t1 = pi/2; the second stage
//! branches per probe and runs to t1 + t2. Pipe the output into any
//! plotter to see the oscillating probability curves.
//!
//! ```bash
//! cargo run --example trace_evolution > trace.csv
//! ```

use qem::model::{trace_evolution, Cue, ModelParams, WordClass};

fn main() {
    let params = ModelParams::reference_fit();
    let points = trace_evolution(WordClass::Hfc, Cue::L1, &params, 50).unwrap();

    println!("t,p_L1,p_L2,p_L3,p_L123");
    for p in &points {
        println!(
            "{:.6},{:.6},{:.6},{:.6},{:.6}",
            p.t, p.p_l1, p.p_l2, p.p_l3, p.p_l123
        );
    }

    let first = points.first().unwrap();
    let last = points.last().unwrap();
    eprintln!(
        "start (t=0): singles {:.3}, union {:.3}",
        first.p_l1, first.p_l123
    );
    eprintln!(
        "end (t=pi):  own-list {:.3}, other lists {:.3}/{:.3}, union {:.3}",
        last.p_l1, last.p_l2, last.p_l3, last.p_l123
    );
}

//! Shared fixtures and randomized sweep checks used by the integration
//! and acceptance suites.
#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qem::linalg::{propagator, taylor_propagator, SymMatrix5, Vector5, C64, DIM};
use qem::model::{
    acceptance_probability, cue_hamiltonian, final_state, initial_state, probe_hamiltonian,
    uf_decomposition, unpacking_factor, Cue, GammaPrime, ModelParams, Probe, WordClass,
};

pub fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn fixture_observations() -> qem::ObservedDataset {
    let file = std::fs::File::open(data_file("brainerd2013_table2.csv")).unwrap();
    qem::load_observations(file).unwrap()
}

/// Published best-fit drivers, frozen here independently of the library's
/// own constant so that a drift in either copy fails a test.
pub fn reference_params() -> ModelParams {
    ModelParams {
        nu: -0.6885,
        nu_prime: 0.40345,
        gamma: 0.30631,
        gamma_prime: GammaPrime {
            hfc: -0.0099825,
            hfa: 0.022938,
            lfc: 0.027313,
            lfa: 0.10107,
        },
        kappa: -0.45978,
        g: 0.5,
        t1: std::f64::consts::FRAC_PI_2,
        t2: std::f64::consts::FRAC_PI_2,
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(rng: &mut ChaCha8Rng) -> SymMatrix5 {
    let mut m = SymMatrix5::zeros();
    for i in 0..DIM {
        m.set_diagonal_entry(i, rng.random_range(-1.0..=1.0));
        for j in (i + 1)..DIM {
            m.set_symmetric_pair(i, j, rng.random_range(-1.0..=1.0));
        }
    }
    m
}

pub fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    ModelParams {
        nu: rng.random_range(-1.0..=1.0),
        nu_prime: rng.random_range(-1.0..=1.0),
        gamma: rng.random_range(-1.0..=1.0),
        gamma_prime: GammaPrime {
            hfc: rng.random_range(-1.0..=1.0),
            hfa: rng.random_range(-1.0..=1.0),
            lfc: rng.random_range(-1.0..=1.0),
            lfa: rng.random_range(-1.0..=1.0),
        },
        kappa: rng.random_range(-1.0..=1.0),
        g: rng.random_range(-1.0..=1.0),
        t1: std::f64::consts::FRAC_PI_2,
        t2: std::f64::consts::FRAC_PI_2,
    }
}

fn random_class(rng: &mut ChaCha8Rng) -> WordClass {
    WordClass::ALL[rng.random_range(0..4)]
}

fn random_cue(rng: &mut ChaCha8Rng) -> Cue {
    Cue::ALL[rng.random_range(0..4)]
}

fn random_probe(rng: &mut ChaCha8Rng) -> Probe {
    Probe::ALL[rng.random_range(0..4)]
}

/// Model Hamiltonians reconstruct from their eigensystem within 1e-10,
/// and the spectral and power-series propagators agree on them. Returns
/// the worst residual seen.
pub fn sweep_reconstruction(draws: usize) -> f64 {
    let mut rng = rng(11);
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let p = random_params(&mut rng);
        let drivers = p.drivers_for(random_class(&mut rng));
        let h = if rng.random_range(0..2) == 0 {
            cue_hamiltonian(random_cue(&mut rng), drivers)
        } else {
            probe_hamiltonian(random_probe(&mut rng), drivers, p.kappa)
        };
        let eig = qem::eigendecompose(&h).unwrap();
        let residual = eig.reconstruct().max_abs_diff(&h);
        assert!(residual < 1e-10, "reconstruction residual {residual:e}");
        let t = std::f64::consts::FRAC_PI_2;
        let disagreement = eig
            .propagator(t)
            .max_abs_diff(&taylor_propagator(&h, t).unwrap());
        assert!(disagreement < 1e-10, "propagator disagreement {disagreement:e}");
        worst = worst.max(residual).max(disagreement);
    }
    worst
}

/// Spectral vs power-series propagators on general random symmetric
/// matrices with entries in [-1, 1] at t = pi/2. Returns the worst
/// max-norm difference.
pub fn sweep_oracle_agreement(draws: usize) -> f64 {
    let mut rng = rng(23);
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let h = random_symmetric(&mut rng);
        let t = std::f64::consts::FRAC_PI_2;
        let diff = propagator(&h, t)
            .unwrap()
            .max_abs_diff(&taylor_propagator(&h, t).unwrap());
        assert!(diff < 1e-10, "oracle disagreement {diff:e}");
        worst = worst.max(diff);
    }
    worst
}

/// Every constructed propagator is unitary within 1e-10.
pub fn sweep_unitarity(draws: usize) -> f64 {
    let mut rng = rng(37);
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let p = random_params(&mut rng);
        let drivers = p.drivers_for(random_class(&mut rng));
        let h = probe_hamiltonian(random_probe(&mut rng), drivers, p.kappa);
        let t = rng.random_range(0.0..=std::f64::consts::TAU);
        let defect = propagator(&h, t).unwrap().unitarity_defect();
        assert!(defect < 1e-10, "unitarity defect {defect:e}");
        worst = worst.max(defect);
    }
    worst
}

/// U(t1) U(t2) = U(t1 + t2) within 1e-9.
pub fn sweep_group_property(draws: usize) -> f64 {
    let mut rng = rng(41);
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let h = random_symmetric(&mut rng);
        let t1 = rng.random_range(0.0..=std::f64::consts::PI);
        let t2 = rng.random_range(0.0..=std::f64::consts::PI);
        let composed = propagator(&h, t1)
            .unwrap()
            .compose(&propagator(&h, t2).unwrap());
        let direct = propagator(&h, t1 + t2).unwrap();
        let diff = composed.max_abs_diff(&direct);
        assert!(diff < 1e-9, "group property violated by {diff:e}");
        worst = worst.max(diff);
    }
    worst
}

/// Propagators preserve vector norms and evolved belief states stay
/// unit-norm, both within 1e-10.
pub fn sweep_norm_conservation(draws: usize) -> f64 {
    let mut rng = rng(53);
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let p = random_params(&mut rng);
        let state = final_state(
            random_class(&mut rng),
            random_cue(&mut rng),
            random_probe(&mut rng),
            &p,
        )
        .unwrap();
        let drift = (state.norm() - 1.0).abs();
        assert!(drift < 1e-10, "state norm drifted by {drift:e}");
        worst = worst.max(drift);

        // Arbitrary complex vectors, not just belief states.
        let mut raw = [C64::ZERO; DIM];
        for slot in raw.iter_mut() {
            *slot = C64::new(
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            );
        }
        let v = Vector5(raw);
        let u = propagator(&random_symmetric(&mut rng), std::f64::consts::FRAC_PI_2).unwrap();
        let diff = (u.apply(&v).norm() - v.norm()).abs();
        assert!(diff < 1e-10, "apply changed a norm by {diff:e}");
        worst = worst.max(diff);
    }
    worst
}

/// All acceptance probabilities stay in [0, 1]; the model additionally
/// asserts the pre-clamp value within 1e-12 slack internally.
pub fn sweep_probability_bounds(draws: usize) -> f64 {
    let mut rng = rng(61);
    let mut worst_excursion = 0.0f64;
    for _ in 0..draws {
        let p = random_params(&mut rng);
        let prob = acceptance_probability(
            random_class(&mut rng),
            random_cue(&mut rng),
            random_probe(&mut rng),
            &p,
        )
        .unwrap();
        assert!((0.0..=1.0).contains(&prob));
        worst_excursion = worst_excursion.max((prob - 0.5).abs() - 0.5);
    }
    worst_excursion
}

/// 1 + verbatim_balance + gist_balance equals the unpacking factor within
/// 1e-12.
pub fn sweep_uf_identity(draws: usize) -> f64 {
    let mut rng = rng(71);
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let p = random_params(&mut rng);
        let class = random_class(&mut rng);
        let cue = random_cue(&mut rng);
        let uf = unpacking_factor(class, cue, &p).unwrap();
        let d = uf_decomposition(class, cue, &p).unwrap();
        let residual = (1.0 + d.verbatim_balance + d.gist_balance - uf).abs();
        assert!(residual < 1e-12, "decomposition identity off by {residual:e}");
        worst = worst.max(residual);
    }
    worst
}

/// Cells related by relabeling the studied lists predict identical
/// probabilities within 1e-10.
pub fn sweep_permutation_symmetry(draws: usize) -> f64 {
    let mut rng = rng(83);
    let mut worst = 0.0f64;
    let check_equal = |values: &[f64], what: &str, worst: &mut f64| {
        for v in &values[1..] {
            let diff = (v - values[0]).abs();
            assert!(diff < 1e-10, "{what} asymmetric by {diff:e}");
            *worst = worst.max(diff);
        }
    };
    for _ in 0..draws {
        let p = random_params(&mut rng);
        let class = random_class(&mut rng);
        let prob = |cue, probe| acceptance_probability(class, cue, probe, &p).unwrap();

        let targets = [
            prob(Cue::L1, Probe::L1),
            prob(Cue::L2, Probe::L2),
            prob(Cue::L3, Probe::L3),
        ];
        check_equal(&targets, "target-cell probability", &mut worst);

        let off = [
            prob(Cue::L1, Probe::L2),
            prob(Cue::L1, Probe::L3),
            prob(Cue::L2, Probe::L1),
            prob(Cue::L2, Probe::L3),
            prob(Cue::L3, Probe::L1),
            prob(Cue::L3, Probe::L2),
        ];
        check_equal(&off, "cross-cell probability", &mut worst);

        let distractor = [
            prob(Cue::L4, Probe::L1),
            prob(Cue::L4, Probe::L2),
            prob(Cue::L4, Probe::L3),
        ];
        check_equal(&distractor, "distractor-cell probability", &mut worst);
    }
    worst
}

/// The union-probe Hamiltonian equals the element-wise sum of the three
/// attenuated single-probe Hamiltonians, entry for entry, and matches the
/// closed-form union couplings exactly.
pub fn sweep_union_hamiltonian(draws: usize) {
    let mut rng = rng(97);
    for _ in 0..draws {
        let p = random_params(&mut rng);
        let d = p.drivers_for(random_class(&mut rng));
        let union = probe_hamiltonian(Probe::L123, d, p.kappa);
        let summed = probe_hamiltonian(Probe::L1, d, p.kappa)
            .add(&probe_hamiltonian(Probe::L2, d, p.kappa))
            .add(&probe_hamiltonian(Probe::L3, d, p.kappa));
        assert_eq!(union, summed);

        let att = d.attenuated(p.kappa);
        let e = union.entries();
        assert_eq!([e[0][0], e[1][1], e[2][2], e[3][3], e[4][4]], [-1.0, -1.0, -1.0, 3.0, -3.0]);
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert_eq!(e[i][j], 2.0 * att.nu);
            }
            assert_eq!(e[i][4], att.nu_prime);
            assert_eq!(e[i][3], 2.0 * att.gamma);
        }
        assert_eq!(e[3][4], 3.0 * att.gamma_prime);
    }
}

/// Projector algebra: idempotent, mutually commuting, and overlapping on
/// the gist slot. All equalities are exact.
pub fn check_projector_algebra() {
    use qem::projector;
    for &a in &Probe::ALL {
        let ma = projector(a);
        assert_eq!(ma.product_entries(&ma), *ma.entries());
        for &b in &Probe::ALL {
            let mb = projector(b);
            assert_eq!(ma.product_entries(&mb), mb.product_entries(&ma));
            if a != b {
                assert!(
                    ma.product_entries(&mb).iter().flatten().any(|&x| x != 0.0),
                    "projectors {a} and {b} must not be orthogonal"
                );
            }
        }
    }
}

/// Norm-checked initial projections for the degenerate zero-driver model.
pub fn zero_driver_initial_projections() -> (f64, f64) {
    let psi0 = initial_state(0.5).unwrap();
    let single = qem::projector(Probe::L1).apply(&psi0).norm_sqr();
    let union = qem::projector(Probe::L123).apply(&psi0).norm_sqr();
    (single, union)
}

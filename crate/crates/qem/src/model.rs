//! Two-stage Hamiltonian belief dynamics for the three-list source
//! recognition task.
//!
//! A participant studies three word lists, then judges whether a cue word
//! appeared on list 1, 2, 3, or any of them. The belief state is a
//! unit-norm amplitude vector over the basis `(V1, V2, V3, G, N)`:
//! one verbatim dimension per studied list, a shared gist dimension, and a
//! non-related dimension supporting rejection of unstudied words.
//!
//! Processing runs in two Schroedinger stages. Seeing the cue evolves the
//! initial state under a cue Hamiltonian for duration `t1`; reading the
//! probe question evolves it further under an attenuated probe Hamiltonian
//! for `t2`. Projecting the final state onto the probe's accepting
//! subspace gives the acceptance probability. Summing the three
//! single-list probabilities and dividing by the union-probe probability
//! yields the unpacking factor, the measure of over-distributed source
//! memory this model exists to reproduce.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    eigendecompose, propagator, LinalgError, SymMatrix5, Unitary5, Vector5, DIM,
};

/// Basis dimensions in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Verbatim trace for list 1.
    V1,
    /// Verbatim trace for list 2.
    V2,
    /// Verbatim trace for list 3.
    V3,
    /// Gist trace shared across lists.
    G,
    /// Non-related support for unstudied words.
    N,
}

impl Basis {
    pub const ALL: [Basis; DIM] = [Basis::V1, Basis::V2, Basis::V3, Basis::G, Basis::N];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::ops::Index<Basis> for Vector5 {
    type Output = crate::linalg::C64;
    fn index(&self, b: Basis) -> &Self::Output {
        &self.0[b.index()]
    }
}

/// Origin list of the cue word. `L4` is the unstudied distractor pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cue {
    L1,
    L2,
    L3,
    L4,
}

impl Cue {
    pub const ALL: [Cue; 4] = [Cue::L1, Cue::L2, Cue::L3, Cue::L4];

    /// Verbatim basis slot for a studied-list cue; `None` for `L4`.
    fn verbatim(self) -> Option<usize> {
        match self {
            Cue::L1 => Some(0),
            Cue::L2 => Some(1),
            Cue::L3 => Some(2),
            Cue::L4 => None,
        }
    }
}

/// Membership question asked about the cue word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Probe {
    /// "Was it on list 1?"
    L1,
    /// "Was it on list 2?"
    L2,
    /// "Was it on list 3?"
    L3,
    /// "Was it on any of the lists?"
    L123,
}

impl Probe {
    pub const ALL: [Probe; 4] = [Probe::L1, Probe::L2, Probe::L3, Probe::L123];
    pub const SINGLES: [Probe; 3] = [Probe::L1, Probe::L2, Probe::L3];

    pub fn is_union(self) -> bool {
        self == Probe::L123
    }

    /// Basis slots whose amplitudes count as acceptance for this probe.
    fn accepting_slots(self) -> &'static [usize] {
        match self {
            Probe::L1 => &[0, 3],
            Probe::L2 => &[1, 3],
            Probe::L3 => &[2, 3],
            Probe::L123 => &[0, 1, 2, 3],
        }
    }
}

/// Word-stimulus class: high/low frequency crossed with concrete/abstract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum WordClass {
    Hfc,
    Hfa,
    Lfc,
    Lfa,
}

impl WordClass {
    pub const ALL: [WordClass; 4] = [WordClass::Hfc, WordClass::Hfa, WordClass::Lfc, WordClass::Lfa];
}

macro_rules! token_enum {
    ($ty:ty { $($variant:path => $token:literal),+ $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let s = match self {
                    $($variant => $token,)+
                };
                f.write_str(s)
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($token => Ok($variant),)+
                    other => Err(format!(
                        concat!("unknown ", stringify!($ty), " token {:?} (expected one of ",
                                $(concat!($token, " "),)+ ")"),
                        other
                    )),
                }
            }
        }
    };
}

token_enum!(Cue {
    Cue::L1 => "L1",
    Cue::L2 => "L2",
    Cue::L3 => "L3",
    Cue::L4 => "L4",
});

token_enum!(Probe {
    Probe::L1 => "L1",
    Probe::L2 => "L2",
    Probe::L3 => "L3",
    Probe::L123 => "L123",
});

token_enum!(WordClass {
    WordClass::Hfc => "HFC",
    WordClass::Hfa => "HFA",
    WordClass::Lfc => "LFC",
    WordClass::Lfa => "LFA",
});

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("gist weight g = {0} outside [-1, 1]")]
    GistWeightOutOfRange(f64),
    #[error("stage duration {name} = {value} must be positive and finite")]
    InvalidStageDuration { name: &'static str, value: f64 },
    #[error("driver {name} = {value} is not finite")]
    NonFiniteDriver { name: &'static str, value: f64 },
    #[error("union acceptance probability {0:e} is too close to zero for an unpacking factor")]
    DegenerateUnion(f64),
    #[error("first probe acceptance probability {0:e} is too close to zero to condition on")]
    ConditioningOnNull(f64),
    #[error("sequential querying is defined for single-list probes only, got {0}")]
    UnionProbeInSequence(Probe),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Per-class gist-to-non-related driver strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrime {
    #[serde(rename = "HFC")]
    pub hfc: f64,
    #[serde(rename = "HFA")]
    pub hfa: f64,
    #[serde(rename = "LFC")]
    pub lfc: f64,
    #[serde(rename = "LFA")]
    pub lfa: f64,
}

impl GammaPrime {
    pub fn uniform(value: f64) -> Self {
        GammaPrime {
            hfc: value,
            hfa: value,
            lfc: value,
            lfa: value,
        }
    }

    pub fn for_class(&self, class: WordClass) -> f64 {
        match class {
            WordClass::Hfc => self.hfc,
            WordClass::Hfa => self.hfa,
            WordClass::Lfc => self.lfc,
            WordClass::Lfa => self.lfa,
        }
    }

    pub fn set_class(&mut self, class: WordClass, value: f64) {
        match class {
            WordClass::Hfc => self.hfc = value,
            WordClass::Hfa => self.hfa = value,
            WordClass::Lfc => self.lfc = value,
            WordClass::Lfa => self.lfa = value,
        }
    }
}

fn default_g() -> f64 {
    0.5
}

fn default_stage_time() -> f64 {
    std::f64::consts::FRAC_PI_2
}

/// Full parameter set of the model.
///
/// The four transport drivers move amplitude between basis components
/// during evolution: `nu` couples the cue's verbatim slot to the other
/// verbatim slots, `nu_prime` couples it to the non-related slot, `gamma`
/// couples the non-cue verbatim slots to gist, and `gamma_prime` (one
/// value per word class) couples gist to the non-related slot. `kappa`
/// rescales all four drivers in the probe stage. `g` sets the gist weight
/// of the initial state; `t1` and `t2` are the stage durations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub nu: f64,
    pub nu_prime: f64,
    pub gamma: f64,
    pub gamma_prime: GammaPrime,
    pub kappa: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "default_stage_time")]
    pub t1: f64,
    #[serde(default = "default_stage_time")]
    pub t2: f64,
}

impl ModelParams {
    /// All drivers zero, `g = 0.5`, both stages `pi/2`. Dynamics reduce to
    /// pure phases, so acceptance probabilities equal the initial-state
    /// projections.
    pub fn zero_drivers() -> Self {
        ModelParams {
            nu: 0.0,
            nu_prime: 0.0,
            gamma: 0.0,
            gamma_prime: GammaPrime::uniform(0.0),
            kappa: 0.0,
            g: default_g(),
            t1: default_stage_time(),
            t2: default_stage_time(),
        }
    }

    /// Reference best-fit parameter set for the bundled observed dataset
    /// (`data/brainerd2013_table2.csv`). Running `refine` from here on
    /// that dataset reproduces an RMSE of about 0.0545.
    pub fn reference_fit() -> Self {
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
            g: default_g(),
            t1: default_stage_time(),
            t2: default_stage_time(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in [
            ("nu", self.nu),
            ("nu_prime", self.nu_prime),
            ("gamma", self.gamma),
            ("gamma_prime.HFC", self.gamma_prime.hfc),
            ("gamma_prime.HFA", self.gamma_prime.hfa),
            ("gamma_prime.LFC", self.gamma_prime.lfc),
            ("gamma_prime.LFA", self.gamma_prime.lfa),
            ("kappa", self.kappa),
        ] {
            if !value.is_finite() {
                return Err(ModelError::NonFiniteDriver { name, value });
            }
        }
        if !(-1.0..=1.0).contains(&self.g) {
            return Err(ModelError::GistWeightOutOfRange(self.g));
        }
        for (name, value) in [("t1", self.t1), ("t2", self.t2)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::InvalidStageDuration { name, value });
            }
        }
        Ok(())
    }

    /// Driver set with `gamma_prime` resolved for one word class.
    pub fn drivers_for(&self, class: WordClass) -> Drivers {
        Drivers {
            nu: self.nu,
            nu_prime: self.nu_prime,
            gamma: self.gamma,
            gamma_prime: self.gamma_prime.for_class(class),
        }
    }
}

/// The four transport strengths entering one Hamiltonian, with the
/// per-class gist driver already resolved to a scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drivers {
    pub nu: f64,
    pub nu_prime: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
}

impl Drivers {
    /// Probe-stage drivers: every transport scaled by `kappa`.
    pub fn attenuated(self, kappa: f64) -> Self {
        Drivers {
            nu: kappa * self.nu,
            nu_prime: kappa * self.nu_prime,
            gamma: kappa * self.gamma,
            gamma_prime: kappa * self.gamma_prime,
        }
    }
}

/// Initial belief state for gist weight `g`:
/// `[sqrt((1-g^2)/6), sqrt((1-g^2)/6), sqrt((1-g^2)/6), g/sqrt(2), 1/sqrt(2)]`.
pub fn initial_state(g: f64) -> Result<Vector5, ModelError> {
    if !(-1.0..=1.0).contains(&g) {
        return Err(ModelError::GistWeightOutOfRange(g));
    }
    let verbatim = ((1.0 - g * g) / 6.0).sqrt();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    Ok(Vector5::from_real([
        verbatim,
        verbatim,
        verbatim,
        g * inv_sqrt2,
        inv_sqrt2,
    ]))
}

/// Cue-stage Hamiltonian.
///
/// For a studied-list cue `Li` the diagonal is +1 at `Vi` and `G` and -1
/// elsewhere; `nu` couples `Vi` to the other verbatim slots, `nu_prime`
/// couples `Vi` to `N`, `gamma` couples the other verbatim slots to `G`,
/// and `gamma_prime` couples `G` to `N`. For the distractor cue `L4` the
/// diagonal is `(-1,-1,-1,-1,+1)` with `nu_prime` from every verbatim slot
/// to `N` and `gamma_prime` from `G` to `N`.
pub fn cue_hamiltonian(cue: Cue, drivers: Drivers) -> SymMatrix5 {
    const G: usize = 3;
    const N: usize = 4;
    let mut h = SymMatrix5::zeros();
    match cue.verbatim() {
        Some(v) => {
            for slot in 0..DIM {
                let sign = if slot == v || slot == G { 1.0 } else { -1.0 };
                h.set_diagonal_entry(slot, sign);
            }
            for other in 0..3 {
                if other != v {
                    h.set_symmetric_pair(v, other, drivers.nu);
                    h.set_symmetric_pair(other, G, drivers.gamma);
                }
            }
            h.set_symmetric_pair(v, N, drivers.nu_prime);
            h.set_symmetric_pair(G, N, drivers.gamma_prime);
        }
        None => {
            for slot in 0..DIM {
                let sign = if slot == N { 1.0 } else { -1.0 };
                h.set_diagonal_entry(slot, sign);
            }
            for verbatim in 0..3 {
                h.set_symmetric_pair(verbatim, N, drivers.nu_prime);
            }
            h.set_symmetric_pair(G, N, drivers.gamma_prime);
        }
    }
    h
}

/// Probe-stage Hamiltonian: the matching cue Hamiltonian with all drivers
/// attenuated by `kappa`. The union probe is the element-wise sum of the
/// three attenuated single-list operators, built as that exact sum.
pub fn probe_hamiltonian(probe: Probe, drivers: Drivers, kappa: f64) -> SymMatrix5 {
    let att = drivers.attenuated(kappa);
    match probe {
        Probe::L1 => cue_hamiltonian(Cue::L1, att),
        Probe::L2 => cue_hamiltonian(Cue::L2, att),
        Probe::L3 => cue_hamiltonian(Cue::L3, att),
        Probe::L123 => cue_hamiltonian(Cue::L1, att)
            .add(&cue_hamiltonian(Cue::L2, att))
            .add(&cue_hamiltonian(Cue::L3, att)),
    }
}

/// Acceptance projector for a probe: diagonal 0/1 matrix selecting the
/// probe's verbatim slot(s) and the gist slot.
pub fn projector(probe: Probe) -> SymMatrix5 {
    let mut diag = [0.0; DIM];
    for &slot in probe.accepting_slots() {
        diag[slot] = 1.0;
    }
    SymMatrix5::from_diagonal(diag)
}

/// Squared norm of the projected state, checked against [0, 1] with 1e-12
/// slack and then clamped. A violation beyond the slack means amplitude
/// leaked somewhere upstream, so it panics rather than hiding the bug.
fn projected_probability(probe: Probe, state: &Vector5) -> f64 {
    let p = projector(probe).apply(state).norm_sqr();
    assert!(
        (-1e-12..=1.0 + 1e-12).contains(&p),
        "projected probability {p} escaped [0,1] beyond tolerance"
    );
    p.clamp(0.0, 1.0)
}

/// Belief state after both evolution stages for one design cell.
pub fn final_state(
    class: WordClass,
    cue: Cue,
    probe: Probe,
    params: &ModelParams,
) -> Result<Vector5, ModelError> {
    params.validate()?;
    let drivers = params.drivers_for(class);
    let psi0 = initial_state(params.g)?;
    let after_cue = propagator(&cue_hamiltonian(cue, drivers), params.t1)?.apply(&psi0);
    let after_probe =
        propagator(&probe_hamiltonian(probe, drivers, params.kappa), params.t2)?.apply(&after_cue);
    Ok(after_probe)
}

/// Probability of a "yes" response for one (class, cue, probe) cell.
pub fn acceptance_probability(
    class: WordClass,
    cue: Cue,
    probe: Probe,
    params: &ModelParams,
) -> Result<f64, ModelError> {
    Ok(projected_probability(
        probe,
        &final_state(class, cue, probe, params)?,
    ))
}

/// Threshold below which a denominator probability counts as degenerate.
const DEGENERATE_PROBABILITY: f64 = 1e-12;

/// Unpacking factor: sum of the three single-list acceptance probabilities
/// over the union acceptance probability. Values above 1 indicate
/// subadditive (over-distributed) source memory.
pub fn unpacking_factor(
    class: WordClass,
    cue: Cue,
    params: &ModelParams,
) -> Result<f64, ModelError> {
    let union = acceptance_probability(class, cue, Probe::L123, params)?;
    if union <= DEGENERATE_PROBABILITY {
        return Err(ModelError::DegenerateUnion(union));
    }
    let mut singles = 0.0;
    for probe in Probe::SINGLES {
        singles += acceptance_probability(class, cue, probe, params)?;
    }
    Ok(singles / union)
}

/// The two excess terms of the unpacking factor split by trace type.
///
/// `1 + verbatim_balance + gist_balance` equals the unpacking factor
/// exactly: the verbatim term compares each single-probe state's own
/// verbatim amplitude against the union state's verbatim amplitudes, and
/// the gist term compares the three single-probe gist amplitudes against
/// the union state's gist amplitude, both over the union probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UfDecomposition {
    pub verbatim_balance: f64,
    pub gist_balance: f64,
}

/// Splits the unpacking factor into its verbatim and gist balance terms.
pub fn uf_decomposition(
    class: WordClass,
    cue: Cue,
    params: &ModelParams,
) -> Result<UfDecomposition, ModelError> {
    let union_state = final_state(class, cue, Probe::L123, params)?;
    let union = projected_probability(Probe::L123, &union_state);
    if union <= DEGENERATE_PROBABILITY {
        return Err(ModelError::DegenerateUnion(union));
    }

    let mut verbatim_excess = 0.0;
    let mut gist_singles = 0.0;
    for (slot, probe) in Probe::SINGLES.into_iter().enumerate() {
        let state = final_state(class, cue, probe, params)?;
        verbatim_excess += state.0[slot].norm_sqr() - union_state.0[slot].norm_sqr();
        gist_singles += state[Basis::G].norm_sqr();
    }
    let gist_excess = gist_singles - union_state[Basis::G].norm_sqr();

    Ok(UfDecomposition {
        verbatim_balance: verbatim_excess / union,
        gist_balance: gist_excess / union,
    })
}

/// Outcome of two projective queries in sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequentialOutcome {
    /// Acceptance probability of the first probe.
    pub p_first: f64,
    /// Acceptance probability of the second probe given the first was
    /// accepted.
    pub p_second_given_first_yes: f64,
    /// Joint probability of accepting both, in this order.
    pub p_joint: f64,
}

/// Two single-list probes asked in sequence after one cue stage.
///
/// The state evolves through the cue stage, then through the first probe's
/// Hamiltonian for `t2`. Accepting the first probe projects and
/// renormalizes the state, which then evolves through the second probe's
/// Hamiltonian for another `t2` before the second projection. Because each
/// probe re-evolves the state, swapping the probe order generally changes
/// the joint probability even though the projectors commute.
pub fn sequential_acceptance(
    class: WordClass,
    cue: Cue,
    first: Probe,
    second: Probe,
    params: &ModelParams,
) -> Result<SequentialOutcome, ModelError> {
    for probe in [first, second] {
        if probe.is_union() {
            return Err(ModelError::UnionProbeInSequence(probe));
        }
    }
    params.validate()?;
    let drivers = params.drivers_for(class);
    let psi0 = initial_state(params.g)?;
    let after_cue = propagator(&cue_hamiltonian(cue, drivers), params.t1)?.apply(&psi0);

    let after_first = propagator(&probe_hamiltonian(first, drivers, params.kappa), params.t2)?
        .apply(&after_cue);
    let p_first = projected_probability(first, &after_first);
    if p_first <= DEGENERATE_PROBABILITY {
        return Err(ModelError::ConditioningOnNull(p_first));
    }
    // Lueders collapse onto the accepted subspace.
    let collapsed = projector(first).apply(&after_first).scale(1.0 / p_first.sqrt());

    let after_second = propagator(&probe_hamiltonian(second, drivers, params.kappa), params.t2)?
        .apply(&collapsed);
    let p_second = projected_probability(second, &after_second);

    Ok(SequentialOutcome {
        p_first,
        p_second_given_first_yes: p_second,
        p_joint: p_first * p_second,
    })
}

/// One sampled instant of the acceptance-probability time course.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub p_l1: f64,
    pub p_l2: f64,
    pub p_l3: f64,
    pub p_l123: f64,
}

/// Acceptance probabilities sampled along both evolution stages.
///
/// Stage one applies the four projectors to the state evolving under the
/// cue Hamiltonian over `[0, t1]`. Stage two branches: each probe's curve
/// continues from the shared stage-one endpoint under that probe's own
/// Hamiltonian over `(t1, t1 + t2]`. The result holds `2 * steps_per_stage`
/// points with strictly increasing `t`; the last point of each curve equals
/// the corresponding [`acceptance_probability`].
pub fn trace_evolution(
    class: WordClass,
    cue: Cue,
    params: &ModelParams,
    steps_per_stage: usize,
) -> Result<Vec<TracePoint>, ModelError> {
    assert!(steps_per_stage >= 2, "need at least two samples per stage");
    params.validate()?;
    let drivers = params.drivers_for(class);
    let psi0 = initial_state(params.g)?;

    let cue_eigen = eigendecompose(&cue_hamiltonian(cue, drivers))?;
    let mut points = Vec::with_capacity(2 * steps_per_stage);

    let sample = |state: &Vector5, t: f64| -> TracePoint {
        TracePoint {
            t,
            p_l1: projected_probability(Probe::L1, state),
            p_l2: projected_probability(Probe::L2, state),
            p_l3: projected_probability(Probe::L3, state),
            p_l123: projected_probability(Probe::L123, state),
        }
    };

    for step in 0..steps_per_stage {
        let t = params.t1 * step as f64 / (steps_per_stage - 1) as f64;
        let state = cue_eigen.propagator(t).apply(&psi0);
        points.push(sample(&state, t));
    }

    let stage_end = cue_eigen.propagator(params.t1).apply(&psi0);
    let probe_eigens: Vec<crate::linalg::Eigen> = Probe::ALL
        .iter()
        .map(|&probe| eigendecompose(&probe_hamiltonian(probe, drivers, params.kappa)))
        .collect::<Result<_, _>>()?;
    for step in 1..=steps_per_stage {
        let dt = params.t2 * step as f64 / steps_per_stage as f64;
        let branch = |idx: usize, probe: Probe| -> f64 {
            let state = probe_eigens[idx].propagator(dt).apply(&stage_end);
            projected_probability(probe, &state)
        };
        points.push(TracePoint {
            t: params.t1 + dt,
            p_l1: branch(0, Probe::L1),
            p_l2: branch(1, Probe::L2),
            p_l3: branch(2, Probe::L3),
            p_l123: branch(3, Probe::L123),
        });
    }
    Ok(points)
}

/// Model output over the full 4 x 4 x 4 design plus unpacking factors.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTable {
    probabilities: [[[f64; 4]; 4]; 4],
    unpacking: [[f64; 4]; 4],
}

impl PredictionTable {
    pub fn probability(&self, class: WordClass, cue: Cue, probe: Probe) -> f64 {
        self.probabilities[class as usize][cue as usize][probe as usize]
    }

    pub fn unpacking(&self, class: WordClass, cue: Cue) -> f64 {
        self.unpacking[class as usize][cue as usize]
    }

    /// All 64 probability cells in class-major, cue-then-probe order.
    pub fn cells(&self) -> impl Iterator<Item = (WordClass, Cue, Probe, f64)> + '_ {
        WordClass::ALL.into_iter().flat_map(move |class| {
            Cue::ALL.into_iter().flat_map(move |cue| {
                Probe::ALL
                    .into_iter()
                    .map(move |probe| (class, cue, probe, self.probability(class, cue, probe)))
            })
        })
    }

    /// All 16 unpacking-factor cells in class-major, cue order.
    pub fn unpacking_cells(&self) -> impl Iterator<Item = (WordClass, Cue, f64)> + '_ {
        WordClass::ALL.into_iter().flat_map(move |class| {
            Cue::ALL
                .into_iter()
                .map(move |cue| (class, cue, self.unpacking(class, cue)))
        })
    }

    pub(crate) fn raw_probabilities(&self) -> &DesignProbabilities {
        &self.probabilities
    }
}

/// All 64 design-cell probabilities, class-major. Used directly by the
/// fitting objective, which must keep evaluating even where the union
/// probability degenerates.
pub(crate) type DesignProbabilities = [[[f64; 4]; 4]; 4];

/// Computes the 64 acceptance probabilities, reusing each class's eight
/// propagators across its sixteen cells. The per-cell arithmetic is
/// identical to [`acceptance_probability`], so values agree bit-for-bit.
pub(crate) fn design_probabilities(
    params: &ModelParams,
) -> Result<DesignProbabilities, ModelError> {
    params.validate()?;
    let psi0 = initial_state(params.g)?;
    let mut probabilities = [[[0.0; 4]; 4]; 4];

    for (ci, &class) in WordClass::ALL.iter().enumerate() {
        let drivers = params.drivers_for(class);
        let cue_props: Vec<Unitary5> = Cue::ALL
            .iter()
            .map(|&cue| propagator(&cue_hamiltonian(cue, drivers), params.t1))
            .collect::<Result<_, _>>()?;
        let probe_props: Vec<Unitary5> = Probe::ALL
            .iter()
            .map(|&probe| propagator(&probe_hamiltonian(probe, drivers, params.kappa), params.t2))
            .collect::<Result<_, _>>()?;

        for (qi, _) in Cue::ALL.iter().enumerate() {
            let after_cue = cue_props[qi].apply(&psi0);
            for (pi, &probe) in Probe::ALL.iter().enumerate() {
                let state = probe_props[pi].apply(&after_cue);
                probabilities[ci][qi][pi] = projected_probability(probe, &state);
            }
        }
    }
    Ok(probabilities)
}

/// Evaluates the model over the whole design: 64 acceptance probabilities
/// and 16 unpacking factors.
pub fn predict_table(params: &ModelParams) -> Result<PredictionTable, ModelError> {
    let probabilities = design_probabilities(params)?;
    let mut unpacking = [[0.0; 4]; 4];
    for ci in 0..4 {
        for qi in 0..4 {
            let union = probabilities[ci][qi][3];
            if union <= DEGENERATE_PROBABILITY {
                return Err(ModelError::DegenerateUnion(union));
            }
            let singles: f64 = probabilities[ci][qi][..3].iter().sum();
            unpacking[ci][qi] = singles / union;
        }
    }
    Ok(PredictionTable {
        probabilities,
        unpacking,
    })
}

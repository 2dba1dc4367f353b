//! Parameter estimation against observed choice proportions.
//!
//! The objective is the root-mean-square error over the 64 probability
//! cells of the design; unpacking factors are derived quantities and stay
//! out of the objective. Estimation runs in two stages: an exhaustive
//! multi-resolution grid search that re-centers a shrinking grid on the
//! incumbent, followed by a Nelder-Mead simplex polish.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ObservedDataset;
use crate::model::{
    design_probabilities, DesignProbabilities, ModelError, ModelParams, PredictionTable,
    WordClass,
};

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("no free parameters configured for the search")]
    NoFreeParameters,
    #[error("grid axis {0} appears more than once")]
    DuplicateAxis(FitParam),
    #[error("grid axis {param}: lower bound {lower} is not below upper bound {upper}")]
    BadBounds {
        param: FitParam,
        lower: f64,
        upper: f64,
    },
    #[error("grid axis {param}: needs at least 2 points, got {points}")]
    TooFewPoints { param: FitParam, points: usize },
    #[error("refinement needs at least one level")]
    NoLevels,
    #[error("shrink factor {0} must lie strictly between 0 and 1")]
    BadShrink(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A fittable scalar parameter of [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitParam {
    Nu,
    NuPrime,
    Gamma,
    GammaPrime(WordClass),
    Kappa,
}

impl FitParam {
    /// The eight drivers fitted by default; `g`, `t1`, `t2` stay fixed.
    pub const ALL: [FitParam; 8] = [
        FitParam::Nu,
        FitParam::NuPrime,
        FitParam::Gamma,
        FitParam::GammaPrime(WordClass::Hfc),
        FitParam::GammaPrime(WordClass::Hfa),
        FitParam::GammaPrime(WordClass::Lfc),
        FitParam::GammaPrime(WordClass::Lfa),
        FitParam::Kappa,
    ];

    pub fn get(self, params: &ModelParams) -> f64 {
        match self {
            FitParam::Nu => params.nu,
            FitParam::NuPrime => params.nu_prime,
            FitParam::Gamma => params.gamma,
            FitParam::GammaPrime(class) => params.gamma_prime.for_class(class),
            FitParam::Kappa => params.kappa,
        }
    }

    pub fn set(self, params: &mut ModelParams, value: f64) {
        match self {
            FitParam::Nu => params.nu = value,
            FitParam::NuPrime => params.nu_prime = value,
            FitParam::Gamma => params.gamma = value,
            FitParam::GammaPrime(class) => params.gamma_prime.set_class(class, value),
            FitParam::Kappa => params.kappa = value,
        }
    }
}

impl std::fmt::Display for FitParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FitParam::Nu => write!(f, "nu"),
            FitParam::NuPrime => write!(f, "nu_prime"),
            FitParam::Gamma => write!(f, "gamma"),
            FitParam::GammaPrime(class) => write!(f, "gamma_prime.{class}"),
            FitParam::Kappa => write!(f, "kappa"),
        }
    }
}

/// One dimension of the search grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub param: FitParam,
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
}

/// Multi-resolution grid configuration.
///
/// Every refinement level evaluates the full Cartesian product of its
/// axes, then re-centers each axis on the incumbent with the axis range
/// multiplied by `shrink_factor`. Re-centered ranges may extend past the
/// initial bounds; drivers are unconstrained reals, so nothing clamps
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<GridAxis>,
    pub refinement_levels: usize,
    pub shrink_factor: f64,
}

impl GridSpec {
    /// Same bounds and point count on all eight drivers.
    pub fn uniform(
        lower: f64,
        upper: f64,
        points: usize,
        refinement_levels: usize,
        shrink_factor: f64,
    ) -> Self {
        GridSpec {
            axes: FitParam::ALL
                .into_iter()
                .map(|param| GridAxis {
                    param,
                    lower,
                    upper,
                    points,
                })
                .collect(),
            refinement_levels,
            shrink_factor,
        }
    }

    fn validate(&self) -> Result<(), FitError> {
        if self.axes.is_empty() {
            return Err(FitError::NoFreeParameters);
        }
        for (i, axis) in self.axes.iter().enumerate() {
            if self.axes[..i].iter().any(|a| a.param == axis.param) {
                return Err(FitError::DuplicateAxis(axis.param));
            }
            if axis.lower >= axis.upper {
                return Err(FitError::BadBounds {
                    param: axis.param,
                    lower: axis.lower,
                    upper: axis.upper,
                });
            }
            if axis.points < 2 {
                return Err(FitError::TooFewPoints {
                    param: axis.param,
                    points: axis.points,
                });
            }
        }
        if self.refinement_levels < 1 {
            return Err(FitError::NoLevels);
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(FitError::BadShrink(self.shrink_factor));
        }
        Ok(())
    }
}

impl Default for GridSpec {
    /// Three points per driver on `[-1, 1]`, five refinement levels,
    /// shrink factor one half.
    fn default() -> Self {
        GridSpec::uniform(-1.0, 1.0, 3, 5, 0.5)
    }
}

/// Incumbent RMSE after each refinement level (best found so far).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelBest {
    pub level: usize,
    pub rmse: f64,
}

/// Outcome of a fitting run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: ModelParams,
    pub rmse: f64,
    pub evaluations: u64,
    /// Per-level incumbents for grid searches; not serialized.
    #[serde(skip)]
    pub trajectory: Option<Vec<LevelBest>>,
}

/// Root-mean-square error between predicted and observed probabilities
/// over the 64 design cells.
pub fn rmse(pred: &PredictionTable, obs: &ObservedDataset) -> f64 {
    rmse_raw(pred.raw_probabilities(), obs)
}

fn rmse_raw(probs: &DesignProbabilities, obs: &ObservedDataset) -> f64 {
    let mut acc = 0.0;
    for (ci, &class) in WordClass::ALL.iter().enumerate() {
        for (qi, &cue) in crate::model::Cue::ALL.iter().enumerate() {
            for (pi, &probe) in crate::model::Probe::ALL.iter().enumerate() {
                let diff = probs[ci][qi][pi] - obs.proportion(class, cue, probe);
                acc += diff * diff;
            }
        }
    }
    (acc / 64.0).sqrt()
}

fn objective(candidate: &ModelParams, obs: &ObservedDataset) -> f64 {
    let probs = design_probabilities(candidate)
        .expect("grid and simplex candidates are always valid parameter sets");
    rmse_raw(&probs, obs)
}

/// Exhaustive multi-resolution grid search over the configured axes.
///
/// Values for parameters without an axis come from `base` (by default the
/// caller fixes `g = 0.5` and both stage durations at `pi/2`). Within a
/// level, RMSE ties break toward the lexicographically smallest grid index
/// vector, so the result is deterministic and identical under parallel and
/// sequential evaluation.
pub fn grid_search(
    obs: &ObservedDataset,
    spec: &GridSpec,
    base: &ModelParams,
) -> Result<FitResult, FitError> {
    grid_search_impl(obs, spec, base, true)
}

pub(crate) fn grid_search_impl(
    obs: &ObservedDataset,
    spec: &GridSpec,
    base: &ModelParams,
    parallel: bool,
) -> Result<FitResult, FitError> {
    spec.validate()?;
    base.validate().map_err(FitError::Model)?;

    let n_axes = spec.axes.len();
    let total: usize = spec.axes.iter().map(|a| a.points).product();

    let mut lows: Vec<f64> = spec.axes.iter().map(|a| a.lower).collect();
    let mut highs: Vec<f64> = spec.axes.iter().map(|a| a.upper).collect();

    let decode = |flat: usize, lows: &[f64], highs: &[f64]| -> ModelParams {
        let mut candidate = *base;
        let mut rem = flat;
        // Row-major: the last axis varies fastest, so the flat order equals
        // the lexicographic order of index vectors.
        for k in (0..n_axes).rev() {
            let axis = &spec.axes[k];
            let idx = rem % axis.points;
            rem /= axis.points;
            let step = (highs[k] - lows[k]) / (axis.points - 1) as f64;
            axis.param.set(&mut candidate, lows[k] + step * idx as f64);
        }
        candidate
    };

    let better = |a: (usize, f64), b: (usize, f64)| -> (usize, f64) {
        if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };

    let mut best_params = *base;
    let mut best_rmse = f64::INFINITY;
    let mut trajectory = Vec::with_capacity(spec.refinement_levels);

    for level in 1..=spec.refinement_levels {
        let eval = |flat: usize| (flat, objective(&decode(flat, &lows, &highs), obs));
        let (level_flat, level_rmse) = if parallel {
            (0..total)
                .into_par_iter()
                .map(eval)
                .reduce(|| (usize::MAX, f64::INFINITY), better)
        } else {
            (0..total)
                .map(eval)
                .fold((usize::MAX, f64::INFINITY), better)
        };
        let level_params = decode(level_flat, &lows, &highs);
        if level_rmse < best_rmse {
            best_rmse = level_rmse;
            best_params = level_params;
        }
        trajectory.push(LevelBest {
            level,
            rmse: best_rmse,
        });
        for (k, axis) in spec.axes.iter().enumerate() {
            let center = axis.param.get(&level_params);
            let range = (highs[k] - lows[k]) * spec.shrink_factor;
            lows[k] = center - range / 2.0;
            highs[k] = center + range / 2.0;
        }
    }

    Ok(FitResult {
        params: best_params,
        rmse: best_rmse,
        evaluations: (spec.refinement_levels * total) as u64,
        trajectory: Some(trajectory),
    })
}

// Nelder-Mead constants: standard moves, fixed initial step, and the
// termination thresholds the simplex must reach.
const NM_INITIAL_STEP: f64 = 0.05;
const NM_DIAMETER_TOL: f64 = 1e-6;
const NM_SPREAD_TOL: f64 = 1e-10;
const NM_MAX_EVALS: u64 = 5000;

/// Derivative-free simplex descent on the eight drivers, starting from
/// `start`.
///
/// Terminates when the simplex diameter drops below 1e-6, the RMSE spread
/// across vertices drops below 1e-10, or 5000 objective evaluations are
/// spent. The best vertex ever seen is returned, so the result is never
/// worse than the start.
pub fn refine(obs: &ObservedDataset, start: &ModelParams) -> Result<FitResult, FitError> {
    start.validate().map_err(FitError::Model)?;
    let n = FitParam::ALL.len();

    let to_params = |x: &[f64]| -> ModelParams {
        let mut p = *start;
        for (param, &v) in FitParam::ALL.iter().zip(x) {
            param.set(&mut p, v);
        }
        p
    };
    let mut evaluations: u64 = 0;
    let eval = |x: &[f64], evals: &mut u64| -> f64 {
        *evals += 1;
        objective(&to_params(x), obs)
    };

    let x0: Vec<f64> = FitParam::ALL.iter().map(|p| p.get(start)).collect();
    let mut simplex: Vec<Vec<f64>> = vec![x0.clone()];
    for i in 0..n {
        let mut v = x0.clone();
        v[i] += NM_INITIAL_STEP;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex
        .iter()
        .map(|x| eval(x, &mut evaluations))
        .collect();

    let mut best_value = values[0];
    let mut best_vertex = simplex[0].clone();
    let track_best = |value: f64, vertex: &[f64], best_value: &mut f64, best_vertex: &mut Vec<f64>| {
        if value < *best_value {
            *best_value = value;
            *best_vertex = vertex.to_vec();
        }
    };
    for (v, x) in values.iter().zip(&simplex) {
        track_best(*v, x, &mut best_value, &mut best_vertex);
    }

    while evaluations < NM_MAX_EVALS {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|x| {
                x.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < NM_DIAMETER_TOL || values[n] - values[0] < NM_SPREAD_TOL {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|x| x[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(c, w)| c + (c - w))
            .collect();
        let f_reflected = eval(&reflected, &mut evaluations);
        track_best(f_reflected, &reflected, &mut best_value, &mut best_vertex);

        if f_reflected < values[0] {
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let f_expanded = eval(&expanded, &mut evaluations);
            track_best(f_expanded, &expanded, &mut best_value, &mut best_vertex);
            if f_expanded < f_reflected {
                simplex[n] = expanded;
                values[n] = f_expanded;
            } else {
                simplex[n] = reflected;
                values[n] = f_reflected;
            }
        } else if f_reflected < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_reflected;
        } else {
            let toward = if f_reflected < values[n] {
                &reflected
            } else {
                &worst
            };
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(toward)
                .map(|(c, t)| c + 0.5 * (t - c))
                .collect();
            let f_contracted = eval(&contracted, &mut evaluations);
            track_best(f_contracted, &contracted, &mut best_value, &mut best_vertex);
            if f_contracted < f_reflected.min(values[n]) {
                simplex[n] = contracted;
                values[n] = f_contracted;
            } else {
                // Shrink everything toward the best vertex.
                for i in 1..=n {
                    let shrunk: Vec<f64> = simplex[0]
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    let f_shrunk = eval(&shrunk, &mut evaluations);
                    track_best(f_shrunk, &shrunk, &mut best_value, &mut best_vertex);
                    simplex[i] = shrunk;
                    values[i] = f_shrunk;
                }
            }
        }
    }

    Ok(FitResult {
        params: to_params(&best_vertex),
        rmse: best_value,
        evaluations,
        trajectory: None,
    })
}

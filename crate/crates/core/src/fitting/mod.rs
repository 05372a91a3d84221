//! Minimax estimation of τ from a measured matrix.
//!
//! The objective is the largest absolute difference between measured and
//! modelled entries. It is searched with a bounded Nelder–Mead simplex from
//! τ = 0 and from `restarts` uniform random points of the box.

mod simplex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{TauParams, TAU_COUNT};
use crate::error::{Error, Result};
use crate::tomography::{CompiledGate, MeasMatrix, MATRIX_DIM};
use simplex::{minimize, SimplexOptions};

/// Two objective values closer than this are treated as equal when ranking restarts.
const TIE_TOLERANCE: f64 = 1e-12;
const PROBE_STEP: f64 = 0.1;
const PROBE_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMode {
    #[default]
    Global,
    PerInput,
}

/// Entries of the measured matrix that enter the objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataSubset {
    #[default]
    All,
    /// Z⊗Z block of the computational-basis rows only.
    Computational,
}

impl DataSubset {
    fn includes(self, row: usize, col: usize) -> bool {
        match self {
            DataSubset::All => true,
            DataSubset::Computational => row < 4 && col < 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    /// Search box |τᵢ| ≤ bound.
    pub bound: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Simplex diameter at which a descent stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub mode: FitMode,
    pub subset: DataSubset,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            bound: 3.0,
            restarts: 32,
            seed: 0,
            tolerance: 1e-6,
            max_iterations: 2000,
            mode: FitMode::Global,
            subset: DataSubset::All,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bound.is_finite() && self.bound > 0.0) {
            return Err(Error::Config(format!("bound must be positive, got {}", self.bound)));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    fn simplex(&self) -> SimplexOptions {
        SimplexOptions {
            bound: self.bound,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            step: (0.25 * self.bound).min(0.5),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub mode: FitMode,
    /// Best global τ. In per-input mode this is the global fit the rows start from.
    pub tau: TauParams,
    /// One τ per matrix row, in per-input mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_taus: Option<Vec<TauParams>>,
    pub achieved_e_max: f64,
    pub achieved_e_mean: f64,
    pub objective_evaluations: usize,
    /// 0 for the τ = 0 start, k for the k-th random start.
    pub restart_index_of_best: usize,
    /// 1-based indices of τ components that the data do not constrain.
    pub unconstrained: Vec<usize>,
}

impl FitResult {
    /// Modelled matrix at the fitted parameters, row by row in per-input mode.
    pub fn model_matrix(&self) -> Result<MeasMatrix> {
        let gate = CompiledGate::cnot();
        let mut entries = [[0.0; MATRIX_DIM]; MATRIX_DIM];
        for (r, row) in entries.iter_mut().enumerate() {
            let tau = self.row_taus.as_ref().map_or(&self.tau, |t| &t[r]);
            *row = gate.row(r, tau)?;
        }
        MeasMatrix::new(entries)
    }
}

/// max |measured − model| over the selected entries of `rows`.
fn row_error(gate: &CompiledGate, m: &MeasMatrix, subset: DataSubset, rows: &[usize], tau: &TauParams) -> f64 {
    let overlaps = gate.overlaps(tau);
    let mut worst = 0.0f64;
    for &r in rows {
        let Ok(model) = gate.row_with(r, &overlaps) else {
            return f64::INFINITY;
        };
        for (c, v) in model.iter().enumerate() {
            if subset.includes(r, c) {
                worst = worst.max((m.get(r, c) - v).abs());
            }
        }
    }
    worst
}

fn rows_in(subset: DataSubset) -> Vec<usize> {
    (0..MATRIX_DIM)
        .filter(|&r| (0..MATRIX_DIM).any(|c| subset.includes(r, c)))
        .collect()
}

struct Search {
    best: TauParams,
    value: f64,
    index: usize,
    evaluations: usize,
}

/// Runs the simplex from each start and keeps the lowest value; ties go to
/// the earlier start.
fn search(starts: &[[f64; TAU_COUNT]], cfg: &FitConfig, objective: impl Fn(&TauParams) -> f64) -> Search {
    let mut f = |x: &[f64; TAU_COUNT]| objective(&TauParams::new(*x).unwrap_or_default());
    let mut out = Search {
        best: TauParams::zero(),
        value: f64::INFINITY,
        index: 0,
        evaluations: 0,
    };
    for (i, start) in starts.iter().enumerate() {
        let m = minimize(&mut f, *start, cfg.simplex());
        out.evaluations += m.evaluations;
        if m.value < out.value - TIE_TOLERANCE {
            out.best = TauParams::new(m.x).expect("simplex points are finite");
            out.value = m.value;
            out.index = i;
        }
    }
    out
}

fn random_starts(rng: &mut ChaCha8Rng, count: usize, bound: f64) -> Vec<[f64; TAU_COUNT]> {
    (0..count)
        .map(|_| std::array::from_fn(|_| rng.random_range(-bound..=bound)))
        .collect()
}

/// τ components along which E_max changes by less than the probe threshold.
fn unconstrained(tau: &TauParams, base: f64, objective: impl Fn(&TauParams) -> f64) -> Vec<usize> {
    (0..TAU_COUNT)
        .filter(|&i| {
            [PROBE_STEP, -PROBE_STEP].iter().all(|d| {
                let mut v = *tau.values();
                v[i] += d;
                let probe = TauParams::new(v).expect("finite");
                (objective(&probe) - base).abs() < PROBE_THRESHOLD
            })
        })
        .map(|i| i + 1)
        .collect()
}

fn mean_error(fitted: &MeasMatrix, m: &MeasMatrix, subset: DataSubset) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for r in 0..MATRIX_DIM {
        for c in 0..MATRIX_DIM {
            if subset.includes(r, c) {
                sum += (fitted.get(r, c) - m.get(r, c)).abs();
                n += 1;
            }
        }
    }
    sum / n as f64
}

fn fit_global_inner(m_exp: &MeasMatrix, cfg: &FitConfig) -> Result<FitResult> {
    let gate = CompiledGate::cnot();
    let rows = rows_in(cfg.subset);
    let objective = |tau: &TauParams| row_error(gate, m_exp, cfg.subset, &rows, tau);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts = vec![[0.0; TAU_COUNT]];
    starts.extend(random_starts(&mut rng, cfg.restarts, cfg.bound));
    let found = search(&starts, cfg, objective);
    if !found.value.is_finite() {
        return Err(Error::NonFinite("fit objective"));
    }
    let mut result = FitResult {
        mode: FitMode::Global,
        tau: found.best,
        row_taus: None,
        achieved_e_max: found.value,
        achieved_e_mean: 0.0,
        objective_evaluations: found.evaluations,
        restart_index_of_best: found.index,
        unconstrained: unconstrained(&found.best, found.value, objective),
    };
    result.achieved_e_mean = mean_error(&result.model_matrix()?, m_exp, cfg.subset);
    Ok(result)
}

/// Single τ minimising the worst entry error over the whole matrix.
pub fn fit_global(m_exp: &MeasMatrix, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    fit_global_inner(m_exp, cfg)
}

/// Independent τ for every input row.
///
/// Each row is searched from the global optimum, τ = 0 and its own random
/// starts, so no row ends up worse than under the global fit.
pub fn fit_per_input(m_exp: &MeasMatrix, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    let global = fit_global_inner(m_exp, cfg)?;
    let gate = CompiledGate::cnot();
    let mut row_taus = vec![global.tau; MATRIX_DIM];
    let mut evaluations = global.objective_evaluations;
    let mut e_max = 0.0f64;
    for r in rows_in(cfg.subset) {
        let objective = |tau: &TauParams| row_error(gate, m_exp, cfg.subset, &[r], tau);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(r as u64 + 1);
        let mut starts = vec![*global.tau.values(), [0.0; TAU_COUNT]];
        starts.extend(random_starts(&mut rng, cfg.restarts, cfg.bound));
        let found = search(&starts, cfg, objective);
        evaluations += found.evaluations;
        row_taus[r] = found.best;
        e_max = e_max.max(found.value);
    }
    let mut result = FitResult {
        mode: FitMode::PerInput,
        row_taus: Some(row_taus),
        achieved_e_max: e_max,
        objective_evaluations: evaluations,
        ..global
    };
    result.achieved_e_mean = mean_error(&result.model_matrix()?, m_exp, cfg.subset);
    Ok(result)
}

/// Dispatches on `cfg.mode`.
pub fn fit(m_exp: &MeasMatrix, cfg: &FitConfig) -> Result<FitResult> {
    match cfg.mode {
        FitMode::Global => fit_global(m_exp, cfg),
        FitMode::PerInput => fit_per_input(m_exp, cfg),
    }
}

//! Minimizations over extensions and auxiliary dynamics.
//!
//! Entanglement fidelity equals both
//!
//! * `F2(rho, E) = min_{ext} F(ext, (E (x) I_T)(ext))` and
//! * `F1(rho, E) = min_{ext, E'} F((I (x) E')(ext), (E (x) E')(ext))`,
//!
//! where `ext` ranges over extensions of `rho` to `S (x) T`. Every extension
//! with a fixed `d_T` is the image of the canonical purification under some
//! channel `Lambda` on the purifier, so the searches run over the real
//! parameters of `Lambda`'s Stinespring isometry (and of `E'` for `F1`),
//! re-orthonormalized at every evaluation.
//!
//! Restart `r` draws its start from seed `budget.seed + r`. When `d_T` is at
//! least the rank of `rho`, restart 0 starts from the canonical purification
//! itself, a feasible point whose objective equals `F_e`.

mod nelder_mead;
mod random_search;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{channel_from_isometry, QuantumChannel, Side};
use crate::error::{Error, Result};
use crate::fidelity::{fidelity_of_matrices, kraus_sum};
use crate::io::{ChannelJson, MatrixJson, PureStateJson};
use crate::numerics::{
    complex_gaussian, haar_isometry, orthonormalize_columns, partial_trace, seeded_rng, ComplexMatrix,
    SubsystemShape, C64, ONE, ZERO,
};
use crate::states::{
    canonical_purification, density_from_pure, sample_density, sample_pure, DensityOperator, Extension,
    PureState, Purification,
};

/// Largest auxiliary dimension the searches accept.
pub const MAX_AUX_DIM: usize = 8;
/// Slack allowed between a search minimum and the entanglement fidelity it should reproduce.
pub const TOL_THEOREM: f64 = 1e-6;
/// Slack for the pointwise bound `F(ext, (E (x) I)(ext)) >= F_e`.
pub const TOL_POINTWISE: f64 = 1e-9;
/// Slack in the empirical Knill-Laflamme comparison.
pub const KL_SLACK: f64 = 1e-4;
/// Objective value returned for degenerate (rank-deficient) isometry parameters.
const PENALTY: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations_per_restart: usize,
    pub seed: u64,
    /// Dimension of the auxiliary system `T`.
    pub aux_dim: usize,
}

impl SearchBudget {
    pub fn new(restarts: usize, iterations_per_restart: usize, seed: u64, aux_dim: usize) -> Result<Self> {
        if restarts == 0 {
            return Err(Error::Parameter {
                name: "restarts",
                value: 0.0,
            });
        }
        if iterations_per_restart == 0 {
            return Err(Error::Parameter {
                name: "iterations_per_restart",
                value: 0.0,
            });
        }
        if aux_dim == 0 || aux_dim > MAX_AUX_DIM {
            return Err(Error::Parameter {
                name: "aux_dim",
                value: aux_dim as f64,
            });
        }
        Ok(Self {
            restarts,
            iterations_per_restart,
            seed,
            aux_dim,
        })
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 8,
            iterations_per_restart: 2000,
            seed: 0,
            aux_dim: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Smallest objective value over every evaluated point.
    pub min_value: f64,
    pub argmin_extension: Extension,
    /// The auxiliary dynamics `E'` at the minimum (`F1` only).
    pub argmin_aux_channel: Option<QuantumChannel>,
    pub evaluations: usize,
    /// Whether the restart that produced the minimum met the simplex tolerance.
    pub converged: bool,
    /// Final value of each restart, in restart order.
    pub restart_values: Vec<f64>,
    /// Objective at the canonical-purification start, when that start exists.
    pub anchor_value: Option<f64>,
    /// Largest `max |tr_T(ext) - rho|` over every extension evaluated.
    pub max_extension_residual: f64,
}

impl SearchResult {
    /// `1 - min_value`.
    pub fn epsilon(&self) -> f64 {
        1.0 - self.min_value
    }

    /// Second-best minus best restart value (0 for a single restart).
    pub fn refinement_gap(&self) -> f64 {
        let mut v = self.restart_values.clone();
        v.sort_by(f64::total_cmp);
        if v.len() < 2 {
            0.0
        } else {
            v[1] - v[0]
        }
    }

    /// Best final value among restarts that did not start from the canonical purification.
    pub fn best_random_start(&self) -> Option<f64> {
        let skip = usize::from(self.anchor_value.is_some());
        self.restart_values.iter().skip(skip).copied().min_by(f64::total_cmp)
    }

    pub fn to_json(&self) -> SearchResultJson {
        SearchResultJson {
            min_value: self.min_value,
            epsilon: self.epsilon(),
            evaluations: self.evaluations,
            converged: self.converged,
            restart_values: self.restart_values.clone(),
            refinement_gap: self.refinement_gap(),
            anchor_value: self.anchor_value,
            max_extension_residual: self.max_extension_residual,
            argmin_extension: ExtensionJson {
                dim_s: self.argmin_extension.system_dim(),
                dim_t: self.argmin_extension.aux_dim(),
                joint: MatrixJson::from(self.argmin_extension.joint.matrix()),
            },
            argmin_aux_channel: self.argmin_aux_channel.as_ref().map(ChannelJson::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionJson {
    pub dim_s: usize,
    pub dim_t: usize,
    #[serde(flatten)]
    pub joint: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResultJson {
    pub min_value: f64,
    pub epsilon: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub restart_values: Vec<f64>,
    pub refinement_gap: f64,
    pub anchor_value: Option<f64>,
    pub max_extension_residual: f64,
    pub argmin_extension: ExtensionJson,
    pub argmin_aux_channel: Option<ChannelJson>,
}

/// Real coordinates of a `rows x cols` isometry: row-major `(re, im)` pairs of a
/// matrix whose columns are orthonormalized on decode.
#[derive(Debug, Clone, Copy)]
struct IsometryParams {
    rows: usize,
    cols: usize,
}

impl IsometryParams {
    fn len(&self) -> usize {
        2 * self.rows * self.cols
    }

    fn decode(&self, x: &[f64]) -> Option<ComplexMatrix> {
        let entries: Vec<C64> = x.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        let raw = ComplexMatrix::from_row_major(self.rows, self.cols, entries).ok()?;
        orthonormalize_columns(&raw)
    }

    fn encode(&self, m: &ComplexMatrix) -> Vec<f64> {
        m.row_major().iter().flat_map(|z| [z.re, z.im]).collect()
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.rows * self.cols)
            .flat_map(|_| {
                let z = complex_gaussian(rng);
                [z.re, z.im]
            })
            .collect()
    }

    /// Isometry whose first `rows / k` block is `embedding` and the rest zero.
    fn embedding_anchor(&self, block_rows: usize) -> Vec<f64> {
        let m = ComplexMatrix::from_fn(self.rows, self.cols, |r, c| if r < block_rows && r == c { ONE } else { ZERO });
        self.encode(&m)
    }
}

/// `sum_i vec(Psi B_i^T) vec(Psi B_i^T)^dag`: the image of the purification
/// `Psi` (`d x r` amplitudes) under the purifier-side Kraus operators `B_i`.
fn extension_matrix(psi: &ComplexMatrix, aux_kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let d = psi.rows();
    let dt = aux_kraus[0].rows();
    let mut out = ComplexMatrix::zeros(d * dt, d * dt);
    for b in aux_kraus {
        let image = psi * &b.transpose();
        out = &out + &ComplexMatrix::outer(&image.row_major());
    }
    out
}

/// Extension `(I_S (x) Lambda)(|psi><psi|)` for a channel `Lambda` from the
/// purifier of `purification` to `T`.
pub fn extension_from_aux_channel(purification: &Purification, aux: &QuantumChannel) -> Result<Extension> {
    aux.check_input(purification.purifier_dim())?;
    let joint = extension_matrix(&purification.amplitude_matrix(), aux.kraus());
    Ok(Extension {
        joint: DensityOperator::from_matrix_unchecked(joint),
        shape: SubsystemShape::bipartite(purification.system_dim(), aux.dim_out())?,
    })
}

fn aux_kraus_count(purifier_dim: usize, aux_dim: usize) -> usize {
    purifier_dim * aux_dim
}

/// Random extension of `rho` to `S (x) T`: a Haar-random channel from the
/// canonical purifier to `T` with full Kraus rank applied to the purification.
pub fn sample_extension(rho: &DensityOperator, aux_dim: usize, seed: u64) -> Result<Extension> {
    if aux_dim == 0 {
        return Err(Error::Parameter {
            name: "aux_dim",
            value: 0.0,
        });
    }
    let purification = canonical_purification(rho);
    let r = purification.purifier_dim();
    let k = aux_kraus_count(r, aux_dim);
    let v = haar_isometry(aux_dim * k, r, &mut seeded_rng(seed));
    extension_from_aux_channel(&purification, &channel_from_isometry(&v, aux_dim))
}

fn check_square_channel(rho: &DensityOperator, e: &QuantumChannel) -> Result<()> {
    if !e.is_square() {
        return Err(Error::NonSquareChannel {
            dim_in: e.dim_in(),
            dim_out: e.dim_out(),
        });
    }
    e.check_input(rho.dim())
}

/// `F(ext, (E (x) I_T)(ext))`.
pub fn f2_objective(ext: &Extension, e: &QuantumChannel) -> Result<f64> {
    e.check_input(ext.system_dim())?;
    let joint = ext.joint.matrix();
    let evolved = e.extend_with_identity(ext.aux_dim(), Side::Left).apply_matrix(joint);
    Ok(fidelity_of_matrices(joint, &evolved))
}

/// `F((I_S (x) E')(ext), (E (x) E')(ext))`.
pub fn f1_objective(ext: &Extension, e: &QuantumChannel, aux: &QuantumChannel) -> Result<f64> {
    e.check_input(ext.system_dim())?;
    aux.check_input(ext.aux_dim())?;
    if !aux.is_square() {
        return Err(Error::NonSquareChannel {
            dim_in: aux.dim_in(),
            dim_out: aux.dim_out(),
        });
    }
    let after_aux = QuantumChannel::identity(ext.system_dim())
        .tensor(aux)
        .apply_matrix(ext.joint.matrix());
    let both = e.extend_with_identity(ext.aux_dim(), Side::Left).apply_matrix(&after_aux);
    Ok(fidelity_of_matrices(&after_aux, &both))
}

struct Multistart {
    best_x: Vec<f64>,
    restart_values: Vec<f64>,
    evaluations: usize,
    converged: bool,
}

/// Runs a simplex search followed by a random-perturbation polish per restart;
/// restart 0 uses `anchor` when given.
fn multistart(
    budget: &SearchBudget,
    anchor: Option<Vec<f64>>,
    random_start: impl Fn(&mut rand_chacha::ChaCha8Rng) -> Vec<f64>,
    objective: &mut dyn FnMut(&[f64]) -> f64,
) -> Multistart {
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    let mut restart_values = Vec::with_capacity(budget.restarts);
    let mut evaluations = 0;
    for restart in 0..budget.restarts {
        let mut rng = seeded_rng(budget.seed.wrapping_add(restart as u64));
        let (x0, step) = match (&anchor, restart) {
            (Some(a), 0) => (a.clone(), 0.05),
            _ => (random_start(&mut rng), 0.5),
        };
        let m = nelder_mead::minimize_restarting(&mut *objective, &x0, step, budget.iterations_per_restart);
        let m = random_search::polish(&mut *objective, m, 0.05, budget.iterations_per_restart, &mut rng);
        evaluations += m.evaluations;
        restart_values.push(m.value);
        if best.as_ref().is_none_or(|(v, _, _)| m.value < *v) {
            best = Some((m.value, m.x, m.converged));
        }
    }
    let (_, best_x, converged) = best.expect("at least one restart");
    Multistart {
        best_x,
        restart_values,
        evaluations,
        converged,
    }
}

/// Mutable bookkeeping shared by every objective evaluation.
struct Tracker {
    min_value: f64,
    max_residual: f64,
}

impl Tracker {
    fn new() -> Self {
        Self {
            min_value: f64::INFINITY,
            max_residual: 0.0,
        }
    }

    fn record(&mut self, value: f64, joint: &ComplexMatrix, shape: &SubsystemShape, rho: &ComplexMatrix) -> f64 {
        let residual = partial_trace(joint, shape, &[0])
            .map(|m| m.max_abs_diff(rho))
            .unwrap_or(f64::INFINITY);
        self.max_residual = self.max_residual.max(residual);
        self.min_value = self.min_value.min(value);
        value
    }
}

/// Searches extensions for the minimum of `F(ext, (E (x) I_T)(ext))`.
pub fn f2_search(rho: &DensityOperator, e: &QuantumChannel, budget: &SearchBudget) -> Result<SearchResult> {
    check_square_channel(rho, e)?;
    let purification = canonical_purification(rho);
    let psi = purification.amplitude_matrix();
    let r = purification.purifier_dim();
    let dt = budget.aux_dim;
    let k = aux_kraus_count(r, dt);
    let params = IsometryParams { rows: dt * k, cols: r };
    let shape = SubsystemShape::bipartite(rho.dim(), dt)?;
    let extended = e.extend_with_identity(dt, Side::Left);

    let build = |x: &[f64]| -> Option<ComplexMatrix> {
        let v = params.decode(x)?;
        let aux = channel_from_isometry(&v, dt);
        Some(extension_matrix(&psi, aux.kraus()))
    };

    let mut tracker = Tracker::new();
    let mut objective = |x: &[f64]| -> f64 {
        match build(x) {
            Some(joint) => {
                let value = fidelity_of_matrices(&joint, &extended.apply_matrix(&joint));
                tracker.record(value, &joint, &shape, rho.matrix())
            }
            None => PENALTY,
        }
    };

    let anchor = (dt >= r).then(|| params.embedding_anchor(dt));
    let anchor_value = anchor.as_ref().map(|a| objective(a));
    let run = multistart(budget, anchor, |rng| params.random(rng), &mut objective);

    let joint = build(&run.best_x).expect("best point decodes");
    Ok(SearchResult {
        min_value: tracker.min_value.clamp(0.0, 1.0),
        argmin_extension: Extension {
            joint: DensityOperator::from_matrix_unchecked(joint),
            shape,
        },
        argmin_aux_channel: None,
        evaluations: run.evaluations + usize::from(anchor_value.is_some()),
        converged: run.converged,
        restart_values: run.restart_values,
        anchor_value,
        max_extension_residual: tracker.max_residual,
    })
}

/// Jointly searches extensions and dynamics `E'` on `T` for the minimum of
/// `F((I (x) E')(ext), (E (x) E')(ext))`.
pub fn f1_search(rho: &DensityOperator, e: &QuantumChannel, budget: &SearchBudget) -> Result<SearchResult> {
    check_square_channel(rho, e)?;
    let purification = canonical_purification(rho);
    let psi = purification.amplitude_matrix();
    let d = rho.dim();
    let r = purification.purifier_dim();
    let dt = budget.aux_dim;
    let ext_params = IsometryParams {
        rows: dt * aux_kraus_count(r, dt),
        cols: r,
    };
    let aux_params = IsometryParams {
        rows: dt * dt * dt,
        cols: dt,
    };
    let split = ext_params.len();
    let shape = SubsystemShape::bipartite(d, dt)?;
    let extended = e.extend_with_identity(dt, Side::Left);
    let id_s = QuantumChannel::identity(d);

    let build = |x: &[f64]| -> Option<(ComplexMatrix, QuantumChannel)> {
        let lambda = channel_from_isometry(&ext_params.decode(&x[..split])?, dt);
        let aux = channel_from_isometry(&aux_params.decode(&x[split..])?, dt);
        Some((extension_matrix(&psi, lambda.kraus()), aux))
    };

    let mut tracker = Tracker::new();
    let mut objective = |x: &[f64]| -> f64 {
        match build(x) {
            Some((joint, aux)) => {
                let after_aux = id_s.tensor(&aux).apply_matrix(&joint);
                let value = fidelity_of_matrices(&after_aux, &extended.apply_matrix(&after_aux));
                tracker.record(value, &joint, &shape, rho.matrix())
            }
            None => PENALTY,
        }
    };

    let anchor = (dt >= r).then(|| {
        let mut a = ext_params.embedding_anchor(dt);
        a.extend(aux_params.embedding_anchor(dt));
        a
    });
    let anchor_value = anchor.as_ref().map(|a| objective(a));
    let run = multistart(
        budget,
        anchor,
        |rng| {
            let mut x = ext_params.random(rng);
            x.extend(aux_params.random(rng));
            x
        },
        &mut objective,
    );

    let (joint, aux) = build(&run.best_x).expect("best point decodes");
    Ok(SearchResult {
        min_value: tracker.min_value.clamp(0.0, 1.0),
        argmin_extension: Extension {
            joint: DensityOperator::from_matrix_unchecked(joint),
            shape,
        },
        argmin_aux_channel: Some(aux),
        evaluations: run.evaluations + usize::from(anchor_value.is_some()),
        converged: run.converged,
        restart_values: run.restart_values,
        anchor_value,
        max_extension_residual: tracker.max_residual,
    })
}

/// Sampled purification overlaps against the closed-form fidelity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefinitionalReport {
    pub closed_form: f64,
    /// Largest overlap found by sampling plus local refinement.
    pub best_overlap: f64,
    /// Largest `overlap - closed_form` over every evaluated pair.
    pub max_excess: f64,
    /// `closed_form - best_overlap`.
    pub gap: f64,
    pub samples: usize,
    pub evaluations: usize,
    pub pass: bool,
}

/// Fixes the canonical purification of `rho1`, sweeps Haar-random unitaries on
/// the purifier of `rho2`'s purification, then refines the best draw by direct
/// search. Purifiers are padded to the system dimension so any unitary applies.
pub fn verify_definitional_fidelity(
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    samples: usize,
    seed: u64,
) -> Result<DefinitionalReport> {
    let d = rho1.dim();
    if rho2.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "fidelity arguments",
            expected: d,
            found: rho2.dim(),
        });
    }
    let closed_form = fidelity_of_matrices(rho1.matrix(), rho2.matrix()).clamp(0.0, 1.0);
    let padded = |rho: &DensityOperator| {
        let m = canonical_purification(rho).amplitude_matrix();
        ComplexMatrix::from_fn(d, d, |s, p| if p < m.cols() { m.get(s, p) } else { ZERO })
    };
    // <psi1| (I (x) U) |psi2> = tr(Psi1^dag Psi2 U^T)
    let cross = &padded(rho1).adjoint() * &padded(rho2);
    let overlap = |u: &ComplexMatrix| -> f64 {
        let mut t = ZERO;
        for i in 0..d {
            for j in 0..d {
                t += cross.get(i, j) * u.get(i, j);
            }
        }
        t.norm_sqr()
    };

    let params = IsometryParams { rows: d, cols: d };
    let mut rng = seeded_rng(seed);
    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..samples.max(1) {
        let u = haar_isometry(d, d, &mut rng);
        let value = overlap(&u);
        max_excess = max_excess.max(value - closed_form);
        if value > best.0 {
            best = (value, params.encode(&u));
        }
    }

    let mut refined_max = best.0;
    let mut objective = |x: &[f64]| -> f64 {
        match params.decode(x) {
            Some(u) => {
                let value = overlap(&u);
                max_excess = max_excess.max(value - closed_form);
                refined_max = refined_max.max(value);
                -value
            }
            None => 0.0,
        }
    };
    let m = nelder_mead::minimize(&mut objective, &best.1, 0.05, 400 * d * d);
    let best_overlap = refined_max;
    Ok(DefinitionalReport {
        closed_form,
        best_overlap,
        max_excess,
        gap: closed_form - best_overlap,
        samples: samples.max(1),
        evaluations: samples.max(1) + m.evaluations,
        pass: max_excess <= TOL_POINTWISE,
    })
}

/// `<psi| E(|psi><psi|) |psi> = sum_i |<psi|A_i|psi>|^2`.
fn pure_storage_fidelity(e: &QuantumChannel, psi: &[C64]) -> f64 {
    e.kraus().iter().map(|a| a.expectation(psi).norm_sqr()).sum()
}

/// Candidates drawn per restart before refinement.
const PURE_SAMPLES_PER_RESTART: usize = 64;

/// Estimates `min_psi <psi|E(|psi><psi|)|psi>` over pure inputs by dense
/// sampling followed by direct search from the best `restarts` samples. The
/// result is an upper bound on the true minimum. The minimizing state is
/// reported as a trivial extension (`d_T = 1`).
pub fn min_pure_fidelity(e: &QuantumChannel, budget: &SearchBudget) -> Result<SearchResult> {
    if !e.is_square() {
        return Err(Error::NonSquareChannel {
            dim_in: e.dim_in(),
            dim_out: e.dim_out(),
        });
    }
    let d = e.dim_in();
    let to_state = |x: &[f64]| -> Option<Vec<C64>> {
        let v: Vec<C64> = x.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        let n = crate::numerics::norm(&v);
        (n > 1e-12).then(|| v.into_iter().map(|z| z / n).collect())
    };
    let mut evaluations = 0;
    let mut global_min = f64::INFINITY;
    let mut objective = |x: &[f64]| -> f64 {
        evaluations += 1;
        match to_state(x) {
            Some(psi) => {
                let value = pure_storage_fidelity(e, &psi);
                global_min = global_min.min(value);
                value
            }
            None => PENALTY,
        }
    };

    let mut rng = seeded_rng(budget.seed);
    let mut candidates: Vec<(f64, Vec<f64>)> = (0..budget.restarts * PURE_SAMPLES_PER_RESTART)
        .map(|_| {
            let psi = sample_pure(d, &mut rng);
            let x: Vec<f64> = psi.amplitudes().iter().flat_map(|z| [z.re, z.im]).collect();
            (objective(&x), x)
        })
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut restart_values = Vec::with_capacity(budget.restarts);
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    for (_, x0) in candidates.into_iter().take(budget.restarts) {
        let m = nelder_mead::minimize_restarting(&mut objective, &x0, 0.1, budget.iterations_per_restart);
        restart_values.push(m.value);
        if best.as_ref().is_none_or(|(v, _, _)| m.value < *v) {
            best = Some((m.value, m.x, m.converged));
        }
    }
    let (_, x, converged) = best.expect("at least one restart");
    let psi = PureState::normalized(to_state(&x).expect("best point is a state"))?;
    Ok(SearchResult {
        min_value: global_min.clamp(0.0, 1.0),
        argmin_extension: Extension {
            joint: density_from_pure(&psi),
            shape: SubsystemShape::bipartite(d, 1)?,
        },
        argmin_aux_channel: None,
        evaluations,
        converged,
        restart_values,
        anchor_value: None,
        max_extension_residual: 0.0,
    })
}

/// Argmin of [`min_pure_fidelity`] as a state vector.
pub fn argmin_pure_state(result: &SearchResult) -> Option<PureStateJson> {
    let eig = result.argmin_extension.joint.eigen();
    (result.argmin_extension.aux_dim() == 1 && eig.values[0] > 1.0 - 1e-9).then(|| {
        let v = eig.vectors.column_vec(0);
        PureStateJson::from(&PureState::normalized(v).expect("eigenvector is nonzero").with_canonical_phase())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnillLaflammeReport {
    /// `1 - min_psi F(psi, E(psi))` as estimated by [`min_pure_fidelity`].
    pub epsilon_hat: f64,
    /// `1 - 3 epsilon_hat / 2`.
    pub bound: f64,
    pub slack: f64,
    /// Second-best minus best restart in the pure-state search.
    pub refinement_gap: f64,
    pub states_checked: usize,
    /// `F_e(I/d, E)`.
    pub fe_maximally_mixed: f64,
    pub min_fe: f64,
    /// `min (F_e - bound)` over the checked states.
    pub min_margin: f64,
    pub violations: usize,
    pub pass: bool,
}

/// Empirical check that `F_e(rho, E) >= 1 - 3 eps / 2` whenever every pure
/// state is stored with fidelity at least `1 - eps`. Checks `I/d` plus
/// `n_states` random states of random rank.
pub fn knill_laflamme_check(e: &QuantumChannel, n_states: usize, budget: &SearchBudget) -> Result<KnillLaflammeReport> {
    let pure = min_pure_fidelity(e, budget)?;
    let epsilon_hat = pure.epsilon();
    let bound = 1.0 - 1.5 * epsilon_hat;
    let d = e.dim_in();

    let fe_maximally_mixed = kraus_sum(DensityOperator::maximally_mixed(d).matrix(), e);
    let mut rng = seeded_rng(budget.seed.wrapping_add(0x9e37_79b9));
    let mut values = vec![fe_maximally_mixed];
    for _ in 0..n_states {
        let rank = rng.random_range(1..=d);
        let rho = sample_density(d, rank, &mut rng)?;
        values.push(kraus_sum(rho.matrix(), e));
    }
    let min_fe = values.iter().copied().fold(f64::INFINITY, f64::min);
    let violations = values.iter().filter(|&&fe| fe < bound - KL_SLACK).count();
    Ok(KnillLaflammeReport {
        epsilon_hat,
        bound,
        slack: KL_SLACK,
        refinement_gap: pure.refinement_gap(),
        states_checked: values.len(),
        fe_maximally_mixed,
        min_fe,
        min_margin: min_fe - bound,
        violations,
        pass: violations == 0,
    })
}

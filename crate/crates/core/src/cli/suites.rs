//! Seeded property batches behind `entfid verify`.
//!
//! Each batch draws `samples` instances and reports the largest violation of one
//! property. Violations are non-negative; a batch passes when its maximum is at
//! most the tolerance.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{channel_from_unitary_rep, random_channel, stinespring_dilation, QuantumChannel};
use crate::extremal::{
    f1_objective, f1_search, f2_objective, f2_search, sample_extension, verify_definitional_fidelity, SearchBudget,
};
use crate::fidelity::{
    entanglement_fidelity_kraus, entanglement_fidelity_purification, entanglement_fidelity_with_purification,
    fidelity_of_matrices, kraus_sum,
};
use crate::numerics::{
    gaussian_matrix, haar_isometry, herm_eig, partial_trace, seeded_rng, ComplexMatrix, SubsystemShape,
};
use crate::states::{
    canonical_purification, density_from_pure, is_extension, sample_density, sample_pure, DensityOperator,
    Purification,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyRow {
    pub property: String,
    pub samples: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    /// Largest system dimension drawn (at least 2).
    pub max_dim: usize,
    /// Auxiliary dimension for searches; `None` uses the rank of each state.
    pub aux_dim: Option<usize>,
    pub restarts: usize,
    pub tolerance_overrides: BTreeMap<String, f64>,
    /// Test hook: slips a channel with broken completeness into the channel batches.
    pub inject_faulty_channel: bool,
}

/// Property names with their default tolerances, in output order.
pub const PROPERTIES: &[(&str, f64)] = &[
    ("partial_trace_preserves_trace", 1e-12),
    ("eigen_reconstruction", 1e-10),
    ("fidelity_symmetry", 1e-10),
    ("fidelity_range", 1e-9),
    ("partial_trace_monotonicity", 1e-9),
    ("operation_monotonicity", 1e-9),
    ("channel_completeness", 1e-8),
    ("channel_output_valid", 1e-9),
    ("dilation_round_trip", 1e-8),
    ("formula_agreement", 1e-10),
    ("fe_le_fidelity", 1e-9),
    ("pure_state_equality", 1e-9),
    ("purification_independence", 1e-9),
    ("extension_validity", 1e-8),
    ("pointwise_extension_bound", 1e-9),
    ("slice_consistency", 0.0),
    ("definitional_overlap_bound", 1e-9),
    ("search_f1_ge_fe", 1e-6),
    ("search_f1_le_f2", 1e-6),
    ("search_f2_le_fe", 1e-9),
];

pub fn is_property(name: &str) -> bool {
    PROPERTIES.iter().any(|(p, _)| *p == name)
}

struct Draw<'a> {
    config: &'a SuiteConfig,
    rng: ChaCha8Rng,
}

impl Draw<'_> {
    fn dim(&mut self) -> usize {
        self.rng.random_range(2..=self.config.max_dim.max(2))
    }

    fn density(&mut self, dim: usize) -> DensityOperator {
        let rank = self.rng.random_range(1..=dim);
        sample_density(dim, rank, &mut self.rng).expect("rank within range")
    }

    fn channel(&mut self, dim: usize) -> QuantumChannel {
        let k = self.rng.random_range(1..=4);
        random_channel(dim, k, self.rng.random()).expect("positive sizes")
    }

    fn hermitian(&mut self, dim: usize) -> ComplexMatrix {
        let g = gaussian_matrix(dim, dim, &mut self.rng);
        &g + &g.adjoint()
    }
}

/// Channel with Kraus operators scaled past completeness.
fn faulty_channel(dim: usize) -> QuantumChannel {
    let kraus = QuantumChannel::identity(dim)
        .kraus()
        .iter()
        .map(|a| a.scale_real(1.05))
        .collect();
    QuantumChannel::new_unchecked(kraus).expect("square shapes")
}

/// Deviation of a matrix from being a density operator.
fn state_violation(m: &ComplexMatrix) -> f64 {
    let herm = m.hermitian_deviation();
    let trace = (m.trace() - crate::numerics::ONE).norm();
    let sym = (m + &m.adjoint()).scale_real(0.5);
    let min_eig = crate::numerics::herm_eig_unchecked(&sym).values.last().copied().unwrap_or(0.0);
    herm.max(trace).max(-min_eig).max(0.0)
}

/// Purification of `rho` with a Haar-random isometry applied on the purifier.
fn rotated_purification(rho: &DensityOperator, rng: &mut ChaCha8Rng) -> Purification {
    let p = canonical_purification(rho);
    let r = p.purifier_dim();
    let extra = rng.random_range(0..=2);
    let v = haar_isometry(r + extra, r, rng);
    Purification::from_amplitude_matrix(&(&p.amplitude_matrix() * &v.transpose())).expect("isometry preserves norm")
}

fn batch(config: &SuiteConfig, index: usize, name: &str, mut violation: impl FnMut(&mut Draw) -> f64) -> PropertyRow {
    let samples = config.samples.max(1);
    batch_of(config, index, name, samples, &mut violation)
}

fn batch_of(
    config: &SuiteConfig,
    index: usize,
    name: &str,
    samples: usize,
    violation: &mut dyn FnMut(&mut Draw) -> f64,
) -> PropertyRow {
    let mut draw = Draw {
        config,
        rng: seeded_rng(config.seed.wrapping_add((index as u64) << 32)),
    };
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let v = violation(&mut draw);
        worst = if v.is_nan() { f64::INFINITY } else { worst.max(v) };
    }
    let default = PROPERTIES.iter().find(|(p, _)| *p == name).map(|(_, t)| *t).unwrap_or(0.0);
    let tolerance = config.tolerance_overrides.get(name).copied().unwrap_or(default);
    PropertyRow {
        property: name.to_string(),
        samples,
        max_violation: worst,
        tolerance,
        pass: worst <= tolerance,
    }
}

pub fn run_suites(config: &SuiteConfig) -> Vec<PropertyRow> {
    let mut rows = Vec::new();
    let mut idx = 0;
    let mut next = || {
        idx += 1;
        idx
    };

    rows.push(batch(config, next(), "partial_trace_preserves_trace", |d| {
        let (a, b) = (d.dim(), d.dim());
        let m = d.hermitian(a * b);
        let reduced = partial_trace(&m, &SubsystemShape::bipartite(a, b).unwrap(), &[0]).unwrap();
        (reduced.trace() - m.trace()).norm()
    }));
    rows.push(batch(config, next(), "eigen_reconstruction", |d| {
        let dim = d.rng.random_range(1..=16);
        let m = d.hermitian(dim);
        herm_eig(&m).unwrap().reconstruct().max_abs_diff(&m)
    }));
    rows.push(batch(config, next(), "fidelity_symmetry", |d| {
        let dim = d.dim();
        let (a, b) = (d.density(dim), d.density(dim));
        (fidelity_of_matrices(a.matrix(), b.matrix()) - fidelity_of_matrices(b.matrix(), a.matrix())).abs()
    }));
    rows.push(batch(config, next(), "fidelity_range", |d| {
        let dim = d.dim();
        let (a, b) = (d.density(dim), d.density(dim));
        let f = fidelity_of_matrices(a.matrix(), b.matrix());
        (-f).max(f - 1.0).max(0.0)
    }));
    rows.push(batch(config, next(), "partial_trace_monotonicity", |d| {
        let (s, t) = (d.dim(), d.rng.random_range(2..=3));
        let (a, b) = (d.density(s * t), d.density(s * t));
        let shape = SubsystemShape::bipartite(s, t).unwrap();
        let whole = fidelity_of_matrices(a.matrix(), b.matrix());
        let part = fidelity_of_matrices(
            &partial_trace(a.matrix(), &shape, &[0]).unwrap(),
            &partial_trace(b.matrix(), &shape, &[0]).unwrap(),
        );
        (whole - part).max(0.0)
    }));
    rows.push(batch(config, next(), "operation_monotonicity", |d| {
        let dim = d.dim();
        let (a, b, e) = (d.density(dim), d.density(dim), d.channel(dim));
        let before = fidelity_of_matrices(a.matrix(), b.matrix());
        let after = fidelity_of_matrices(&e.apply_matrix(a.matrix()), &e.apply_matrix(b.matrix()));
        (before - after).max(0.0)
    }));

    let mut first = config.inject_faulty_channel;
    let mut pool_channel = |d: &mut Draw, dim: usize| {
        if std::mem::take(&mut first) {
            faulty_channel(dim)
        } else {
            d.channel(dim)
        }
    };
    rows.push(batch(config, next(), "channel_completeness", |d| {
        let dim = d.dim();
        pool_channel(d, dim).completeness_residual()
    }));
    let mut first = config.inject_faulty_channel;
    rows.push(batch(config, next(), "channel_output_valid", |d| {
        let dim = d.dim();
        let e = if std::mem::take(&mut first) { faulty_channel(dim) } else { d.channel(dim) };
        let rho = d.density(dim);
        state_violation(&e.apply_matrix(rho.matrix()))
    }));
    rows.push(batch(config, next(), "dilation_round_trip", |d| {
        let dim = d.dim();
        let e = d.channel(dim);
        let back = channel_from_unitary_rep(&stinespring_dilation(&e).unwrap()).unwrap();
        e.max_output_deviation(&back)
    }));
    rows.push(batch(config, next(), "formula_agreement", |d| {
        let dim = d.dim();
        let (rho, e) = (d.density(dim), d.channel(dim));
        let a = entanglement_fidelity_purification(&rho, &e).unwrap().value;
        let b = entanglement_fidelity_kraus(&rho, &e).unwrap().value;
        (a - b).abs()
    }));
    rows.push(batch(config, next(), "fe_le_fidelity", |d| {
        let dim = d.dim();
        let (rho, e) = (d.density(dim), d.channel(dim));
        let fe = kraus_sum(rho.matrix(), &e);
        let f = fidelity_of_matrices(rho.matrix(), &e.apply_matrix(rho.matrix()));
        (fe - f).max(0.0)
    }));
    rows.push(batch(config, next(), "pure_state_equality", |d| {
        let dim = d.dim();
        let psi = sample_pure(dim, &mut d.rng);
        let rho = density_from_pure(&psi);
        let e = d.channel(dim);
        let fe = kraus_sum(rho.matrix(), &e);
        let f = fidelity_of_matrices(rho.matrix(), &e.apply_matrix(rho.matrix()));
        (fe - f).abs()
    }));
    rows.push(batch(config, next(), "purification_independence", |d| {
        let dim = d.dim();
        let (rho, e) = (d.density(dim), d.channel(dim));
        let reference = entanglement_fidelity_purification(&rho, &e).unwrap().value;
        let other = rotated_purification(&rho, &mut d.rng);
        (entanglement_fidelity_with_purification(&other, &e).unwrap().value - reference).abs()
    }));
    rows.push(batch(config, next(), "extension_validity", |d| {
        let dim = d.dim();
        let rho = d.density(dim);
        let ext = sample_extension(&rho, d.rng.random_range(1..=3), d.rng.random()).unwrap();
        let check = is_extension(&ext, &rho);
        check.residual.max(state_violation(ext.joint.matrix()))
    }));
    rows.push(batch(config, next(), "pointwise_extension_bound", |d| {
        let dim = d.dim();
        let (rho, e) = (d.density(dim), d.channel(dim));
        let ext = sample_extension(&rho, d.rng.random_range(1..=3), d.rng.random()).unwrap();
        (kraus_sum(rho.matrix(), &e) - f2_objective(&ext, &e).unwrap()).max(0.0)
    }));
    rows.push(batch(config, next(), "slice_consistency", |d| {
        let dim = d.dim();
        let (rho, e) = (d.density(dim), d.channel(dim));
        let dt = d.rng.random_range(1..=3);
        let ext = sample_extension(&rho, dt, d.rng.random()).unwrap();
        let f1 = f1_objective(&ext, &e, &QuantumChannel::identity(dt)).unwrap();
        (f1 - f2_objective(&ext, &e).unwrap()).abs()
    }));

    let heavy = (config.samples / 10).max(1);
    rows.push(batch_of(config, next(), "definitional_overlap_bound", heavy, &mut |d| {
        let (a, b) = (d.density(2), d.density(2));
        let report = verify_definitional_fidelity(&a, &b, 100, d.rng.random()).unwrap();
        report.max_excess.max(0.0)
    }));

    let searches = (config.samples / 50).max(1);
    let mut outcomes = Vec::with_capacity(searches);
    let mut rng = seeded_rng(config.seed.wrapping_add((next() as u64) << 32));
    for _ in 0..searches {
        let mut draw = Draw { config, rng: rng.clone() };
        let rho = draw.density(2);
        let e = draw.channel(2);
        let seed: u64 = draw.rng.random();
        rng = draw.rng;
        let aux_dim = config.aux_dim.unwrap_or_else(|| rho.rank().max(1));
        let budget = SearchBudget::new(config.restarts.max(1), 400, seed, aux_dim).expect("validated by caller");
        let fe = kraus_sum(rho.matrix(), &e);
        let f2 = f2_search(&rho, &e, &budget).unwrap().min_value;
        let f1 = f1_search(&rho, &e, &budget).unwrap().min_value;
        outcomes.push((fe, f1, f2));
    }
    let mut it = outcomes.iter().cycle();
    rows.push(batch_of(config, next(), "search_f1_ge_fe", searches, &mut |_| {
        let (fe, f1, _) = it.next().unwrap();
        (fe - f1).max(0.0)
    }));
    let mut it = outcomes.iter().cycle();
    rows.push(batch_of(config, next(), "search_f1_le_f2", searches, &mut |_| {
        let (_, f1, f2) = it.next().unwrap();
        (f1 - f2).max(0.0)
    }));
    let mut it = outcomes.iter().cycle();
    rows.push(batch_of(config, next(), "search_f2_le_fe", searches, &mut |_| {
        let (fe, _, f2) = it.next().unwrap();
        (f2 - fe).max(0.0)
    }));
    rows
}

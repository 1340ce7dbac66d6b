//! Density operators, pure states, purifications and extensions.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    self, complex_gaussian, herm_eig, herm_eig_unchecked, partial_trace, seeded_rng, ComplexMatrix, HermEig,
    SubsystemShape, C64, TOL_HERM, TOL_PSD, ZERO,
};

/// Allowed deviation of a density operator's trace from 1.
pub const TOL_TRACE: f64 = 1e-9;
/// Allowed deviation of a pure state's norm from 1.
pub const TOL_NORM: f64 = 1e-9;
/// Max-abs residual for `tr_T(joint) == base`.
pub const TOL_EXTENSION: f64 = 1e-8;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > TOL_HERM {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::Trace { re: tr.re, im: tr.im });
        }
        let eig = herm_eig(&matrix)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -TOL_PSD {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is a density operator by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix_unchecked(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigen(&self) -> HermEig {
        herm_eig_unchecked(&self.matrix)
    }

    /// Number of eigenvalues above `TOL_PSD`.
    pub fn rank(&self) -> usize {
        self.eigen().values.iter().filter(|&&x| x > TOL_PSD).count()
    }
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Shape("amplitudes: empty state vector".into()));
        }
        if let Some(index) = amplitudes.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let norm = numerics::norm(&amplitudes);
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = numerics::norm(&amplitudes);
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Self::new(amplitudes)
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                context: "basis index",
                expected: dim,
                found: index,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    /// The singlet `(|01> - |10>)/sqrt(2)`.
    pub fn epr() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: vec![ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO],
        }
    }

    /// Multiplies by a global phase so the first nonzero amplitude is real positive.
    pub fn with_canonical_phase(mut self) -> Self {
        if let Some(first) = self.amplitudes.iter().find(|z| z.norm() > 0.0) {
            let phase = first.conj() / first.norm();
            self.amplitudes.iter_mut().for_each(|z| *z *= phase);
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        numerics::inner(&self.amplitudes, &other.amplitudes)
    }
}

/// `|psi><psi|`.
pub fn density_from_pure(psi: &PureState) -> DensityOperator {
    DensityOperator::from_matrix_unchecked(ComplexMatrix::outer(psi.amplitudes()))
}

/// `<psi|rho|psi>`, the probability that `psi` was stored correctly as `rho`.
pub fn probability_correct(psi: &PureState, rho: &DensityOperator) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "state and density operator",
            expected: rho.dim(),
            found: psi.dim(),
        });
    }
    Ok(rho.matrix().expectation(psi.amplitudes()).re.clamp(0.0, 1.0))
}

/// `1 - <psi|rho|psi>`.
pub fn probability_error(psi: &PureState, rho: &DensityOperator) -> Result<f64> {
    probability_correct(psi, rho).map(|p| 1.0 - p)
}

/// Pure state on `S (x) P` whose reduction to `S` is a given density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Purification {
    pub state: PureState,
    pub shape: SubsystemShape,
}

impl Purification {
    pub fn system_dim(&self) -> usize {
        self.shape.dims()[0]
    }

    pub fn purifier_dim(&self) -> usize {
        self.shape.dims()[1]
    }

    /// Amplitudes as a `system_dim x purifier_dim` matrix: `M[s, p] = <s, p|psi>`.
    pub fn amplitude_matrix(&self) -> ComplexMatrix {
        let r = self.purifier_dim();
        let a = self.state.amplitudes();
        ComplexMatrix::from_fn(self.system_dim(), r, |s, p| a[s * r + p])
    }

    pub fn from_amplitude_matrix(m: &ComplexMatrix) -> Result<Self> {
        let state = PureState::new(m.row_major())?;
        Ok(Self {
            state,
            shape: SubsystemShape::bipartite(m.rows(), m.cols())?,
        })
    }

    pub fn density(&self) -> DensityOperator {
        density_from_pure(&self.state)
    }
}

/// `sum_k sqrt(lambda_k) |e_k> (x) |k>` over the eigenpairs with `lambda_k > TOL_PSD`.
pub fn canonical_purification(rho: &DensityOperator) -> Purification {
    let eig = rho.eigen();
    let kept: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > TOL_PSD).collect();
    let d = rho.dim();
    let r = kept.len().max(1);
    let mut amplitudes = vec![ZERO; d * r];
    for (p, &k) in kept.iter().enumerate() {
        let weight = eig.values[k].sqrt();
        for s in 0..d {
            amplitudes[s * r + p] = eig.vectors.get(s, k) * weight;
        }
    }
    let norm = numerics::norm(&amplitudes);
    amplitudes.iter_mut().for_each(|z| *z /= norm);
    Purification {
        state: PureState { amplitudes },
        shape: SubsystemShape::bipartite(d, r).expect("positive dims"),
    }
}

/// Density operator on `S (x) T` together with its bipartite shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub joint: DensityOperator,
    pub shape: SubsystemShape,
}

impl Extension {
    pub fn new(joint: DensityOperator, system_dim: usize, aux_dim: usize) -> Result<Self> {
        let shape = SubsystemShape::bipartite(system_dim, aux_dim)?;
        if shape.total() != joint.dim() {
            return Err(Error::DimensionMismatch {
                context: "extension shape",
                expected: shape.total(),
                found: joint.dim(),
            });
        }
        Ok(Self { joint, shape })
    }

    pub fn system_dim(&self) -> usize {
        self.shape.dims()[0]
    }

    pub fn aux_dim(&self) -> usize {
        self.shape.dims()[1]
    }

    /// `tr_T(joint)`.
    pub fn reduced(&self) -> ComplexMatrix {
        partial_trace(self.joint.matrix(), &self.shape, &[0]).expect("shape checked at construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionCheck {
    pub is_extension: bool,
    /// Max-abs entry of `tr_T(joint) - base`.
    pub residual: f64,
}

pub fn is_extension(candidate: &Extension, base: &DensityOperator) -> ExtensionCheck {
    if candidate.system_dim() != base.dim() {
        return ExtensionCheck {
            is_extension: false,
            residual: f64::INFINITY,
        };
    }
    let residual = candidate.reduced().max_abs_diff(base.matrix());
    ExtensionCheck {
        is_extension: residual <= TOL_EXTENSION,
        residual,
    }
}

/// Haar-uniform pure state: normalized complex Gaussian vector, canonical phase.
pub fn sample_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    assert!(dim >= 1, "dimension must be positive");
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Ok(psi) = PureState::normalized(v) {
            return psi.with_canonical_phase();
        }
    }
}

pub fn random_pure(dim: usize, seed: u64) -> PureState {
    sample_pure(dim, &mut seeded_rng(seed))
}

/// `G G^dag / tr(G G^dag)` for a `dim x rank` Ginibre matrix `G`.
pub fn sample_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    if rank == 0 || rank > dim {
        return Err(Error::Rank { rank, dim });
    }
    let g = numerics::gaussian_matrix(dim, rank, rng);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    let mut m = w.scale_real(1.0 / tr);
    // exact Hermiticity on the diagonal
    for i in 0..dim {
        let z = m.get(i, i);
        m.set(i, i, C64::new(z.re, 0.0));
    }
    Ok(DensityOperator::from_matrix_unchecked(m))
}

pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    sample_density(dim, rank, &mut seeded_rng(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_density(dim: usize, k: usize) -> DensityOperator {
        density_from_pure(&PureState::basis(dim, k).unwrap())
    }

    #[test]
    fn validation_errors() {
        let not_herm = ComplexMatrix::from_real_rows(&[&[0.5, 1.0], &[0.0, 0.5]]).unwrap();
        assert!(matches!(DensityOperator::new(not_herm), Err(Error::NotHermitian { .. })));
        let bad_trace = ComplexMatrix::diag_real(&[0.9, 0.0]);
        let err = DensityOperator::new(bad_trace).unwrap_err();
        assert!(matches!(err, Error::Trace { .. }));
        assert!(err.to_string().contains("trace"));
        let negative = ComplexMatrix::diag_real(&[1.5, -0.5]);
        assert!(matches!(DensityOperator::new(negative), Err(Error::NotPositive { .. })));
        assert!(matches!(
            DensityOperator::new(ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            PureState::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn density_of_basis_state() {
        assert_eq!(basis_density(2, 0).matrix(), &ComplexMatrix::diag_real(&[1.0, 0.0]));
    }

    #[test]
    fn density_of_epr() {
        let rho = density_from_pure(&PureState::epr());
        let expected = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.5, -0.5, 0.0],
            &[0.0, -0.5, 0.5, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
        assert!(DensityOperator::new(rho.matrix().clone()).is_ok());
    }

    #[test]
    fn density_of_random_pure_is_valid() {
        for seed in 0..20 {
            let psi = random_pure(5, seed);
            let rho = density_from_pure(&psi);
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(DensityOperator::new(rho.into_matrix()).is_ok());
        }
    }

    #[test]
    fn probability_examples() {
        let zero = PureState::basis(2, 0).unwrap();
        assert_eq!(probability_correct(&zero, &basis_density(2, 0)).unwrap(), 1.0);
        assert_eq!(probability_correct(&zero, &DensityOperator::maximally_mixed(2)).unwrap(), 0.5);
        assert_eq!(probability_correct(&zero, &basis_density(2, 1)).unwrap(), 0.0);
        assert_eq!(probability_error(&zero, &basis_density(2, 1)).unwrap(), 1.0);
        assert!(probability_correct(&zero, &DensityOperator::maximally_mixed(3)).is_err());
    }

    #[test]
    fn probability_of_own_projector_is_one() {
        for seed in 0..50 {
            let psi = random_pure(4, seed);
            let p = probability_correct(&psi, &density_from_pure(&psi)).unwrap();
            assert!((p - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn purification_of_maximally_mixed() {
        let p = canonical_purification(&DensityOperator::maximally_mixed(2));
        assert_eq!(p.purifier_dim(), 2);
        let reduced = partial_trace(p.density().matrix(), &p.shape, &[0]).unwrap();
        assert!(reduced.max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 0.5])) < 1e-15);
        // maximally entangled: reduction on P is also I/2
        let other = partial_trace(p.density().matrix(), &p.shape, &[1]).unwrap();
        assert!(other.max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn purification_of_pure_state_has_trivial_purifier() {
        let p = canonical_purification(&basis_density(2, 0));
        assert_eq!(p.purifier_dim(), 1);
        assert!((p.state.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
        assert!(p.state.amplitudes()[1].norm() < 1e-15);
    }

    #[test]
    fn purification_of_diagonal_state() {
        let rho = DensityOperator::new(ComplexMatrix::diag_real(&[0.9, 0.1])).unwrap();
        let p = canonical_purification(&rho);
        let a = p.state.amplitudes();
        // |00> and |11> components, up to eigenvector phases
        assert!((a[0].norm() - 0.9f64.sqrt()).abs() < 1e-14);
        assert!((a[3].norm() - 0.1f64.sqrt()).abs() < 1e-14);
        assert!(a[1].norm() < 1e-14 && a[2].norm() < 1e-14);
    }

    #[test]
    fn purification_recovers_random_states() {
        for seed in 0..30 {
            let dim = 2 + (seed as usize % 3);
            let rank = 1 + (seed as usize % dim);
            let rho = random_density(dim, rank, seed).unwrap();
            let p = canonical_purification(&rho);
            assert_eq!(p.purifier_dim(), rank);
            let reduced = partial_trace(p.density().matrix(), &p.shape, &[0]).unwrap();
            assert!(reduced.max_abs_diff(rho.matrix()) <= 1e-10);
        }
    }

    #[test]
    fn extension_checks() {
        let epr = Extension::new(density_from_pure(&PureState::epr()), 2, 2).unwrap();
        let check = is_extension(&epr, &DensityOperator::maximally_mixed(2));
        assert!(check.is_extension && check.residual < 1e-15);

        let rho = random_density(2, 2, 1).unwrap();
        let sigma = random_density(3, 2, 2).unwrap();
        let product = DensityOperator::new(numerics::kron(rho.matrix(), sigma.matrix())).unwrap();
        assert!(is_extension(&Extension::new(product, 2, 3).unwrap(), &rho).is_extension);

        let mixed = Extension::new(DensityOperator::maximally_mixed(4), 2, 2).unwrap();
        let check = is_extension(&mixed, &basis_density(2, 0));
        assert!(!check.is_extension);
        assert!((check.residual - 0.5).abs() < 1e-15);

        assert!(!is_extension(&mixed, &DensityOperator::maximally_mixed(3)).is_extension);
    }

    #[test]
    fn random_pure_conventions() {
        let one = random_pure(1, 99);
        assert_eq!(one.amplitudes(), &[C64::new(1.0, 0.0)]);
        let a = random_pure(4, 7);
        assert_eq!(a, random_pure(4, 7));
        assert_ne!(a, random_pure(4, 8));
        assert_eq!(a.amplitudes()[0].im, 0.0);
        assert!(a.amplitudes()[0].re > 0.0);
    }

    #[test]
    fn random_pure_is_uniform_on_average() {
        // Monte-Carlo estimate of E|psi><psi| = I/dim
        let dim = 3;
        let n = 10_000;
        let mut rng = seeded_rng(2024);
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for _ in 0..n {
            acc = &acc + density_from_pure(&sample_pure(dim, &mut rng)).matrix();
        }
        let mean = acc.scale_real(1.0 / n as f64);
        let target = ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64);
        assert!(mean.max_abs_diff(&target) < 0.02);
    }

    #[test]
    fn random_density_contract() {
        let pure = random_density(4, 1, 3).unwrap();
        assert!((pure.eigen().values[0] - 1.0).abs() <= 1e-10);
        assert_eq!(pure.rank(), 1);
        for seed in 0..20 {
            let rho = random_density(4, 3, seed).unwrap();
            assert!(DensityOperator::new(rho.matrix().clone()).is_ok());
            assert_eq!(rho.rank(), 3);
        }
        assert_eq!(random_density(3, 2, 5).unwrap(), random_density(3, 2, 5).unwrap());
        assert!(matches!(random_density(3, 0, 1), Err(Error::Rank { .. })));
        assert!(matches!(random_density(3, 4, 1), Err(Error::Rank { .. })));
    }
}

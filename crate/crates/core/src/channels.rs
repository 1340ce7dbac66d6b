//! Trace-preserving quantum operations in operator-sum form.
//!
//! The Kraus list is the primary representation. Unitary-with-ancilla forms
//! are derived on demand by [`stinespring_dilation`] and converted back with
//! [`channel_from_unitary_rep`].

use crate::error::{Error, Result};
use crate::numerics::{
    complete_basis, haar_isometry, kron, seeded_rng, ComplexMatrix, SubsystemShape, C64, ONE, TOL_PSD, ZERO,
};
use crate::states::{canonical_purification, DensityOperator};

/// Max-abs residual allowed in `sum_i A_i^dag A_i = I`.
pub const TOL_COMPLETENESS: f64 = 1e-8;
/// Max-abs residual allowed in `U^dag U = I`.
pub const TOL_UNITARY: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<ComplexMatrix>,
    dim_in: usize,
    dim_out: usize,
}

/// Which side of a bipartite space the channel acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `E (x) I_T`
    Left,
    /// `I_T (x) E`
    Right,
}

impl QuantumChannel {
    /// Validates shapes and the completeness relation.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let channel = Self::new_unchecked(kraus)?;
        let residual = channel.completeness_residual();
        if residual.is_nan() || residual > TOL_COMPLETENESS {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(channel)
    }

    /// Checks shapes only. The result may violate completeness; this exists for
    /// negative controls in the verification suites.
    pub fn new_unchecked(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        for k in &kraus {
            if k.cols() != dim_in {
                return Err(Error::DimensionMismatch {
                    context: "kraus operator columns",
                    expected: dim_in,
                    found: k.cols(),
                });
            }
            if k.rows() != dim_out {
                return Err(Error::DimensionMismatch {
                    context: "kraus operator rows",
                    expected: dim_out,
                    found: k.rows(),
                });
            }
        }
        Ok(Self { kraus, dim_in, dim_out })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(dim)],
            dim_in: dim,
            dim_out: dim,
        }
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn is_square(&self) -> bool {
        self.dim_in == self.dim_out
    }

    /// `max |sum_i A_i^dag A_i - I|`.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for a in &self.kraus {
            sum = &sum + &(&a.adjoint() * a);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim_in))
    }

    /// `sum_i A_i rho A_i^dag`, validated as a density operator.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_input(rho.dim())?;
        DensityOperator::new(self.apply_matrix(rho.matrix()))
    }

    /// Kraus sum on a raw matrix, no validation.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for a in &self.kraus {
            out = &out + &(&(a * m) * &a.adjoint());
        }
        out
    }

    pub(crate) fn check_input(&self, dim: usize) -> Result<()> {
        if dim != self.dim_in {
            return Err(Error::DimensionMismatch {
                context: "channel input",
                expected: self.dim_in,
                found: dim,
            });
        }
        Ok(())
    }

    /// `{A_i (x) I_T}` for [`Side::Left`], `{I_T (x) A_i}` for [`Side::Right`].
    pub fn extend_with_identity(&self, aux_dim: usize, side: Side) -> Self {
        let id = ComplexMatrix::identity(aux_dim);
        let kraus = self
            .kraus
            .iter()
            .map(|a| match side {
                Side::Left => kron(a, &id),
                Side::Right => kron(&id, a),
            })
            .collect();
        Self {
            kraus,
            dim_in: self.dim_in * aux_dim,
            dim_out: self.dim_out * aux_dim,
        }
    }

    /// `{A_i (x) B_j}` over all pairs, `i` major.
    pub fn tensor(&self, other: &QuantumChannel) -> Self {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| kron(a, b)))
            .collect();
        Self {
            kraus,
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
        }
    }

    /// Largest entrywise output deviation over the matrix units `|i><j|`,
    /// which span all inputs.
    pub fn max_output_deviation(&self, other: &QuantumChannel) -> f64 {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                let mut unit = ComplexMatrix::zeros(self.dim_in, self.dim_in);
                unit.set(i, j, ONE);
                worst = worst.max(self.apply_matrix(&unit).max_abs_diff(&other.apply_matrix(&unit)));
            }
        }
        worst
    }
}

/// `E(rho) = tr_E( U (rho (x) sigma) U^dag )`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryRep {
    pub unitary: ComplexMatrix,
    pub ancilla_state: DensityOperator,
    pub shape: SubsystemShape,
}

impl UnitaryRep {
    pub fn new(unitary: ComplexMatrix, ancilla_state: DensityOperator, system_dim: usize) -> Result<Self> {
        let shape = SubsystemShape::bipartite(system_dim, ancilla_state.dim())?;
        if !unitary.is_square() || unitary.rows() != shape.total() {
            return Err(Error::DimensionMismatch {
                context: "unitary on system (x) ancilla",
                expected: shape.total(),
                found: unitary.rows(),
            });
        }
        let deviation = unitary.unitary_deviation();
        if deviation > TOL_UNITARY {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self {
            unitary,
            ancilla_state,
            shape,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.shape.dims()[0]
    }

    pub fn ancilla_dim(&self) -> usize {
        self.shape.dims()[1]
    }

    /// Evaluates the map directly from the unitary form.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let joint = kron(rho, self.ancilla_state.matrix());
        let evolved = &(&self.unitary * &joint) * &self.unitary.adjoint();
        crate::numerics::partial_trace(&evolved, &self.shape, &[0]).expect("shape checked at construction")
    }
}

/// Unitary on `S (x) E` with ancilla `|0><0|` and `E` of dimension equal to the
/// Kraus count, such that `(I (x) <i|) U (I (x) |0>) = A_i`. Columns not fixed by
/// the Kraus operators are completed by Gram-Schmidt over the canonical basis.
pub fn stinespring_dilation(e: &QuantumChannel) -> Result<UnitaryRep> {
    if !e.is_square() {
        return Err(Error::NonSquareChannel {
            dim_in: e.dim_in,
            dim_out: e.dim_out,
        });
    }
    let d = e.dim_in;
    let k = e.kraus.len().max(1);
    let n = d * k;

    // column s*k of U is sum_i A_i|s> (x) |i>
    let prescribed: Vec<Vec<C64>> = (0..d)
        .map(|s| {
            let mut col = vec![ZERO; n];
            for (i, a) in e.kraus.iter().enumerate() {
                for t in 0..d {
                    col[t * k + i] = a.get(t, s);
                }
            }
            col
        })
        .collect();
    let mut completion = complete_basis(&prescribed, n).into_iter();

    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
    for c in 0..n {
        if c % k == 0 {
            columns.push(prescribed[c / k].clone());
        } else {
            columns.push(completion.next().expect("completion fills the basis"));
        }
    }
    let unitary = ComplexMatrix::from_fn(n, n, |r, c| columns[c][r]);

    let mut ancilla = ComplexMatrix::zeros(k, k);
    ancilla.set(0, 0, ONE);
    UnitaryRep::new(unitary, DensityOperator::from_matrix_unchecked(ancilla), d)
}

/// Kraus operators `A_{e,r} = (I (x) <e, r|) (U (x) I_R) (I (x) |phi>)` where
/// `|phi>` purifies the ancilla state on `E (x) R` (`R` trivial for pure ancillas).
pub fn channel_from_unitary_rep(rep: &UnitaryRep) -> Result<QuantumChannel> {
    let d = rep.system_dim();
    let de = rep.ancilla_dim();
    let purification = canonical_purification(&rep.ancilla_state);
    let phi = purification.amplitude_matrix();
    let dr = phi.cols();
    let u = &rep.unitary;

    let mut kraus = Vec::with_capacity(de * dr);
    for e in 0..de {
        for r in 0..dr {
            let a = ComplexMatrix::from_fn(d, d, |t, s| {
                (0..de).map(|e2| u.get(t * de + e, s * de + e2) * phi.get(e2, r)).sum()
            });
            kraus.push(a);
        }
    }
    QuantumChannel::new(kraus)
}

/// Built-in channel families.
#[derive(Debug, Clone, PartialEq)]
pub enum StandardChannel {
    Identity,
    /// `(1 - p) rho + p I/d`.
    Depolarizing(f64),
    /// Keeps the diagonal, scales off-diagonal entries by `1 - p`.
    Dephasing(f64),
    /// Qubit decay `|1> -> |0>` with probability `gamma`.
    AmplitudeDamping(f64),
    /// Discards the input and prepares the given state.
    ReplaceWith(DensityOperator),
}

pub fn standard_channel(kind: &StandardChannel, dim: usize) -> Result<QuantumChannel> {
    if dim == 0 {
        return Err(Error::Shape("channel dimension must be positive".into()));
    }
    let check = |name: &'static str, p: f64| {
        if (0.0..=1.0).contains(&p) {
            Ok(p)
        } else {
            Err(Error::Parameter { name, value: p })
        }
    };
    let id = ComplexMatrix::identity(dim);
    let kraus = match kind {
        StandardChannel::Identity => vec![id],
        StandardChannel::Depolarizing(p) => {
            let p = check("p", *p)?;
            let d2 = (dim * dim) as f64;
            let mut kraus = vec![id.scale_real((1.0 - p * (d2 - 1.0) / d2).sqrt())];
            let w = (p / d2).sqrt();
            if dim == 2 {
                kraus.extend(paulis().iter().map(|m| m.scale_real(w)));
            } else {
                kraus.extend(weyl_operators(dim).iter().skip(1).map(|m| m.scale_real(w)));
            }
            kraus
        }
        StandardChannel::Dephasing(p) => {
            let p = check("p", *p)?;
            let mut kraus = vec![id.scale_real((1.0 - p).sqrt())];
            for k in 0..dim {
                let mut proj = ComplexMatrix::zeros(dim, dim);
                proj.set(k, k, C64::new(p.sqrt(), 0.0));
                kraus.push(proj);
            }
            kraus
        }
        StandardChannel::AmplitudeDamping(gamma) => {
            let g = check("gamma", *gamma)?;
            if dim != 2 {
                return Err(Error::DimensionMismatch {
                    context: "amplitude damping is a qubit channel",
                    expected: 2,
                    found: dim,
                });
            }
            vec![
                ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - g).sqrt()]])?,
                ComplexMatrix::from_real_rows(&[&[0.0, g.sqrt()], &[0.0, 0.0]])?,
            ]
        }
        StandardChannel::ReplaceWith(sigma) => {
            let eig = sigma.eigen();
            let mut kraus = Vec::new();
            for (k, &mu) in eig.values.iter().enumerate() {
                if mu <= TOL_PSD {
                    continue;
                }
                let v = eig.vectors.column_vec(k);
                for j in 0..dim {
                    let mut basis = vec![ZERO; dim];
                    basis[j] = ONE;
                    kraus.push(ComplexMatrix::outer_pair(&v, &basis).scale_real(mu.sqrt()));
                }
            }
            kraus
        }
    };
    QuantumChannel::new(kraus)
}

/// `X, Y, Z`.
fn paulis() -> [ComplexMatrix; 3] {
    let i = C64::new(0.0, 1.0);
    [
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap(),
        ComplexMatrix::from_row_major(2, 2, vec![ZERO, -i, i, ZERO]).unwrap(),
        ComplexMatrix::diag_real(&[1.0, -1.0]),
    ]
}

/// Clock-and-shift operators `X^a Z^b`, `(a, b) = (0, 0)` first.
fn weyl_operators(dim: usize) -> Vec<ComplexMatrix> {
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / dim as f64);
    let mut out = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            // (X^a Z^b)|j> = omega^{b j} |j + a>
            out.push(ComplexMatrix::from_fn(dim, dim, |r, c| {
                if r == (c + a) % dim {
                    omega((b * c) % dim)
                } else {
                    ZERO
                }
            }));
        }
    }
    out
}

/// Haar-random isometry `C^dim -> C^{dim * kraus_count}` sliced into Kraus blocks.
pub fn random_channel(dim: usize, kraus_count: usize, seed: u64) -> Result<QuantumChannel> {
    if dim == 0 || kraus_count == 0 {
        return Err(Error::Shape(format!(
            "random channel needs positive dim and kraus_count, got {dim} and {kraus_count}"
        )));
    }
    let mut rng = seeded_rng(seed);
    Ok(channel_from_isometry(&haar_isometry(dim * kraus_count, dim, &mut rng), dim))
}

/// Slices an isometry with `dim_out * k` rows into `k` Kraus blocks of `dim_out` rows.
pub(crate) fn channel_from_isometry(v: &ComplexMatrix, dim_out: usize) -> QuantumChannel {
    let k = v.rows() / dim_out;
    let kraus = (0..k).map(|i| v.row_block(i * dim_out, dim_out)).collect();
    QuantumChannel {
        kraus,
        dim_in: v.cols(),
        dim_out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::partial_trace;
    use crate::states::{density_from_pure, random_density, PureState};

    fn unit_inputs(dim: usize) -> Vec<ComplexMatrix> {
        let mut out = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let mut m = ComplexMatrix::zeros(dim, dim);
                m.set(i, j, ONE);
                out.push(m);
            }
        }
        out
    }

    fn replace_mixed() -> QuantumChannel {
        standard_channel(&StandardChannel::ReplaceWith(DensityOperator::maximally_mixed(2)), 2).unwrap()
    }

    #[test]
    fn explicit_e2_kraus_set_is_complete() {
        // (1/sqrt 2)|i><j|: sum A^dag A computed by hand is sum_j |j><j| = I
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut kraus = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let mut m = ComplexMatrix::zeros(2, 2);
                m.set(i, j, C64::new(h, 0.0));
                kraus.push(m);
            }
        }
        let e2 = QuantumChannel::new(kraus).unwrap();
        assert!(e2.completeness_residual() < 1e-15);
        for seed in 0..5 {
            let out = e2.apply(&random_density(2, 2, seed).unwrap()).unwrap();
            assert!(out.matrix().max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 0.5])) < 1e-15);
        }
    }

    #[test]
    fn incomplete_kraus_set_is_rejected() {
        let err = QuantumChannel::new(vec![ComplexMatrix::diag_real(&[1.0, 0.0])]).unwrap_err();
        assert!(matches!(err, Error::NotTracePreserving { residual } if (residual - 1.0).abs() < 1e-15));
        assert_eq!(QuantumChannel::new(vec![]), Err(Error::EmptyKraus));
        assert!(QuantumChannel::new(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)]).is_err());
    }

    #[test]
    fn apply_examples() {
        let rho = random_density(3, 2, 4).unwrap();
        assert!(QuantumChannel::identity(3).apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let depol = standard_channel(&StandardChannel::Depolarizing(1.0), 2).unwrap();
        let zero = density_from_pure(&PureState::basis(2, 0).unwrap());
        let out = depol.apply(&zero).unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 0.5])) < 1e-15);
        assert!(depol.apply(&rho).is_err());
    }

    #[test]
    fn faulty_channel_output_fails_validation() {
        let faulty = QuantumChannel::new_unchecked(vec![ComplexMatrix::diag_real(&[1.0, 0.0])]).unwrap();
        let mixed = DensityOperator::maximally_mixed(2);
        assert!(matches!(faulty.apply(&mixed), Err(Error::Trace { .. })));
    }

    #[test]
    fn identity_extension() {
        let ext = QuantumChannel::identity(2).extend_with_identity(3, Side::Left);
        assert_eq!(ext, QuantumChannel::identity(6));
    }

    #[test]
    fn e2_extended_on_epr() {
        let out = replace_mixed()
            .extend_with_identity(2, Side::Left)
            .apply(&density_from_pure(&PureState::epr()))
            .unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::diag_real(&[0.25; 4])) < 1e-15);
    }

    #[test]
    fn extension_commutes_with_partial_trace() {
        for seed in 0..10 {
            let e = random_channel(2, 3, seed).unwrap();
            let joint = random_density(6, 4, 100 + seed).unwrap();
            let shape = SubsystemShape::bipartite(2, 3).unwrap();
            let lhs = partial_trace(
                &e.extend_with_identity(3, Side::Left).apply_matrix(joint.matrix()),
                &shape,
                &[0],
            )
            .unwrap();
            let rhs = e.apply_matrix(&partial_trace(joint.matrix(), &shape, &[0]).unwrap());
            assert!(lhs.max_abs_diff(&rhs) <= 1e-10);

            let right_shape = SubsystemShape::bipartite(3, 2).unwrap();
            let joint_r = random_density(6, 4, 200 + seed).unwrap();
            let lhs = partial_trace(
                &e.extend_with_identity(3, Side::Right).apply_matrix(joint_r.matrix()),
                &right_shape,
                &[1],
            )
            .unwrap();
            let rhs = e.apply_matrix(&partial_trace(joint_r.matrix(), &right_shape, &[1]).unwrap());
            assert!(lhs.max_abs_diff(&rhs) <= 1e-10);
        }
    }

    #[test]
    fn tensor_product_of_channels() {
        let id = QuantumChannel::identity(2).tensor(&QuantumChannel::identity(3));
        assert_eq!(id, QuantumChannel::identity(6));
        let e = random_channel(2, 3, 1).unwrap();
        let f = random_channel(3, 2, 2).unwrap();
        let ef = e.tensor(&f);
        assert_eq!(ef.kraus().len(), 6);
        assert!(ef.completeness_residual() < 1e-12);
        let rho = random_density(2, 2, 3).unwrap();
        let sigma = random_density(3, 3, 4).unwrap();
        let lhs = ef.apply_matrix(&kron(rho.matrix(), sigma.matrix()));
        let rhs = kron(&e.apply_matrix(rho.matrix()), &f.apply_matrix(sigma.matrix()));
        assert!(lhs.max_abs_diff(&rhs) <= 1e-10);
    }

    #[test]
    fn dilation_of_identity() {
        let rep = stinespring_dilation(&QuantumChannel::identity(3)).unwrap();
        assert_eq!(rep.ancilla_dim(), 1);
        assert_eq!(rep.unitary, ComplexMatrix::identity(3));
    }

    #[test]
    fn dilation_of_e2_round_trips() {
        let e2 = replace_mixed();
        let rep = stinespring_dilation(&e2).unwrap();
        assert_eq!(rep.ancilla_dim(), 4);
        let back = channel_from_unitary_rep(&rep).unwrap();
        let half = ComplexMatrix::diag_real(&[0.5, 0.5]);
        for k in 0..2 {
            let basis = density_from_pure(&PureState::basis(2, k).unwrap());
            assert!(rep.apply_matrix(basis.matrix()).max_abs_diff(&half) < 1e-14);
            assert!(back.apply_matrix(basis.matrix()).max_abs_diff(&half) < 1e-14);
        }
        for unit in unit_inputs(2) {
            assert!(back.apply_matrix(&unit).max_abs_diff(&e2.apply_matrix(&unit)) < 1e-14);
        }
    }

    #[test]
    fn dilation_round_trip_random_channels() {
        for seed in 0..20 {
            let e = random_channel(2 + (seed as usize % 2), 1 + (seed as usize % 4), seed).unwrap();
            let rep = stinespring_dilation(&e).unwrap();
            assert!(rep.unitary.unitary_deviation() < 1e-12);
            let back = channel_from_unitary_rep(&rep).unwrap();
            assert!(back.max_output_deviation(&e) <= 1e-8);
            // the prescribed block reproduces each Kraus operator
            let d = e.dim_in();
            let k = e.kraus().len();
            for (i, a) in e.kraus().iter().enumerate() {
                let block = ComplexMatrix::from_fn(d, d, |t, s| rep.unitary.get(t * k + i, s * k));
                assert!(block.max_abs_diff(a) < 1e-15);
            }
        }
    }

    #[test]
    fn dilation_rejects_non_square() {
        let iso = haar_isometry(3, 2, &mut seeded_rng(1));
        let e = QuantumChannel::new(vec![iso]).unwrap();
        assert!(matches!(stinespring_dilation(&e), Err(Error::NonSquareChannel { .. })));
    }

    #[test]
    fn unitary_rep_of_trivial_ancilla_is_identity() {
        let rep = UnitaryRep::new(ComplexMatrix::identity(2), DensityOperator::maximally_mixed(1), 2).unwrap();
        let e = channel_from_unitary_rep(&rep).unwrap();
        assert!(e.max_output_deviation(&QuantumChannel::identity(2)) < 1e-15);
        let pure_ancilla = density_from_pure(&PureState::basis(2, 0).unwrap());
        let rep = UnitaryRep::new(ComplexMatrix::identity(4), pure_ancilla, 2).unwrap();
        assert!(channel_from_unitary_rep(&rep).unwrap().max_output_deviation(&QuantumChannel::identity(2)) < 1e-15);
    }

    #[test]
    fn swap_with_mixed_ancilla_replaces_state() {
        let swap = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let rep = UnitaryRep::new(swap, DensityOperator::maximally_mixed(2), 2).unwrap();
        let e = channel_from_unitary_rep(&rep).unwrap();
        assert!(e.max_output_deviation(&replace_mixed()) < 1e-15);
        for unit in unit_inputs(2) {
            assert!(rep.apply_matrix(&unit).max_abs_diff(&e.apply_matrix(&unit)) < 1e-15);
        }
    }

    #[test]
    fn unitary_rep_validation() {
        let not_unitary = ComplexMatrix::diag_real(&[1.0, 2.0]);
        assert!(matches!(
            UnitaryRep::new(not_unitary, DensityOperator::maximally_mixed(1), 2),
            Err(Error::NotUnitary { .. })
        ));
        assert!(UnitaryRep::new(ComplexMatrix::identity(3), DensityOperator::maximally_mixed(2), 2).is_err());
    }

    #[test]
    fn standard_channel_examples() {
        let depol0 = standard_channel(&StandardChannel::Depolarizing(0.0), 2).unwrap();
        assert!(depol0.max_output_deviation(&QuantumChannel::identity(2)) < 1e-15);
        let e2 = replace_mixed();
        assert_eq!(e2.kraus().len(), 4);
        for unit in unit_inputs(2) {
            let expected = ComplexMatrix::diag_real(&[0.5, 0.5]).scale(unit.trace());
            assert!(e2.apply_matrix(&unit).max_abs_diff(&expected) < 1e-15);
        }
        let ad = standard_channel(&StandardChannel::AmplitudeDamping(1.0), 2).unwrap();
        let ground = ComplexMatrix::diag_real(&[1.0, 0.0]);
        assert!(ad.apply_matrix(&ground).max_abs_diff(&ground) < 1e-15);
        assert!(ad.apply_matrix(&ComplexMatrix::diag_real(&[0.0, 1.0])).max_abs_diff(&ground) < 1e-15);
    }

    #[test]
    fn depolarizing_matches_mixing_form() {
        for dim in [2, 3, 4] {
            for p in [0.0, 0.3, 1.0] {
                let e = standard_channel(&StandardChannel::Depolarizing(p), dim).unwrap();
                let rho = random_density(dim, dim, 7).unwrap();
                let expected = &rho.matrix().scale_real(1.0 - p)
                    + &ComplexMatrix::identity(dim).scale_real(p / dim as f64);
                assert!(e.apply_matrix(rho.matrix()).max_abs_diff(&expected) < 1e-14);
            }
        }
    }

    #[test]
    fn dephasing_scales_coherences() {
        let e = standard_channel(&StandardChannel::Dephasing(0.25), 3).unwrap();
        let rho = random_density(3, 3, 9).unwrap();
        let out = e.apply_matrix(rho.matrix());
        for i in 0..3 {
            for j in 0..3 {
                let factor = if i == j { 1.0 } else { 0.75 };
                assert!((out.get(i, j) - rho.matrix().get(i, j) * factor).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn standard_channel_parameter_errors() {
        assert!(matches!(
            standard_channel(&StandardChannel::Depolarizing(1.5), 2),
            Err(Error::Parameter { name: "p", .. })
        ));
        assert!(standard_channel(&StandardChannel::Dephasing(-0.1), 2).is_err());
        assert!(standard_channel(&StandardChannel::AmplitudeDamping(0.5), 3).is_err());
    }

    #[test]
    fn random_channel_contract() {
        for seed in 0..100 {
            let e = random_channel(3, 1 + (seed as usize % 4), seed).unwrap();
            assert!(e.completeness_residual() <= 1e-10);
        }
        let u = random_channel(3, 1, 5).unwrap();
        assert!(u.kraus()[0].unitary_deviation() < 1e-12);
        assert_eq!(random_channel(2, 3, 11).unwrap(), random_channel(2, 3, 11).unwrap());
    }
}

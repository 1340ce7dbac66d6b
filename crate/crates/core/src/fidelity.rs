//! Uhlmann fidelity and entanglement fidelity.
//!
//! Fidelities use the squared convention throughout: for pure states
//! `F(|a><a|, |b><b|) = |<a|b>|^2`, not its square root.

use serde::{Deserialize, Serialize};

use crate::channels::{QuantumChannel, Side};
use crate::error::{Error, Result};
use crate::numerics::{herm_eig_unchecked, singular_values, sqrt_from_eig, ComplexMatrix, C64, ZERO};
use crate::states::{canonical_purification, DensityOperator, Purification};

/// Slack for `F_e <= F(rho, E(rho))` in reports.
pub const TOL_INEQUALITY: f64 = 1e-9;
/// Allowed gap between the purification and Kraus-sum routes to `F_e`.
pub const TOL_FORMULA_AGREEMENT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityMethod {
    Uhlmann,
    Purification,
    KrausSum,
    Search,
}

/// A fidelity in `[0, 1]` tagged with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityValue {
    pub value: f64,
    pub method: FidelityMethod,
}

impl FidelityValue {
    fn clamped(value: f64, method: FidelityMethod) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            method,
        }
    }
}

/// `(tr |sqrt(rho1) sqrt(rho2)|)^2`, the maximum squared overlap of purifications.
pub fn uhlmann_fidelity(rho1: &DensityOperator, rho2: &DensityOperator) -> Result<FidelityValue> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            context: "fidelity arguments",
            expected: rho1.dim(),
            found: rho2.dim(),
        });
    }
    Ok(FidelityValue::clamped(
        fidelity_of_matrices(rho1.matrix(), rho2.matrix()),
        FidelityMethod::Uhlmann,
    ))
}

/// Unvalidated, unclamped fidelity of two PSD matrices of equal size.
pub(crate) fn fidelity_of_matrices(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let sa = sqrt_from_eig(&herm_eig_unchecked(a));
    let sb = sqrt_from_eig(&herm_eig_unchecked(b));
    let trace_norm: f64 = singular_values(&(&sa * &sb)).iter().sum();
    trace_norm * trace_norm
}

fn check_channel(rho: &DensityOperator, e: &QuantumChannel) -> Result<()> {
    if !e.is_square() {
        return Err(Error::NonSquareChannel {
            dim_in: e.dim_in(),
            dim_out: e.dim_out(),
        });
    }
    e.check_input(rho.dim())
}

/// `<psi| (E (x) I_P)(|psi><psi|) |psi>` for the canonical purification of `rho`.
pub fn entanglement_fidelity_purification(rho: &DensityOperator, e: &QuantumChannel) -> Result<FidelityValue> {
    check_channel(rho, e)?;
    entanglement_fidelity_with_purification(&canonical_purification(rho), e)
}

/// Same as [`entanglement_fidelity_purification`] but for a caller-supplied
/// purification; the value does not depend on which one.
pub fn entanglement_fidelity_with_purification(
    purification: &Purification,
    e: &QuantumChannel,
) -> Result<FidelityValue> {
    if !e.is_square() {
        return Err(Error::NonSquareChannel {
            dim_in: e.dim_in(),
            dim_out: e.dim_out(),
        });
    }
    e.check_input(purification.system_dim())?;
    let psi = purification.state.amplitudes();
    let joint = ComplexMatrix::outer(psi);
    let evolved = e
        .extend_with_identity(purification.purifier_dim(), Side::Left)
        .apply_matrix(&joint);
    Ok(FidelityValue::clamped(
        evolved.expectation(psi).re,
        FidelityMethod::Purification,
    ))
}

/// `sum_i tr(A_i rho) tr(A_i^dag rho) = sum_i |tr(A_i rho)|^2`.
pub fn entanglement_fidelity_kraus(rho: &DensityOperator, e: &QuantumChannel) -> Result<FidelityValue> {
    check_channel(rho, e)?;
    Ok(FidelityValue::clamped(
        kraus_sum(rho.matrix(), e),
        FidelityMethod::KrausSum,
    ))
}

pub(crate) fn kraus_sum(rho: &ComplexMatrix, e: &QuantumChannel) -> f64 {
    e.kraus()
        .iter()
        .map(|a| {
            let t: C64 = (0..rho.rows())
                .map(|i| (0..rho.rows()).map(|j| a.get(i, j) * rho.get(j, i)).sum::<C64>())
                .fold(ZERO, |acc, x| acc + x);
            t.norm_sqr()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl InequalityCheck {
    /// `lhs <= rhs + slack`.
    pub fn at_most(name: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            pass: lhs <= rhs + slack,
        }
    }
}

/// `F(rho, E(rho))` next to both entanglement-fidelity routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub fe_purification: f64,
    pub fe_kraus: f64,
    pub fe_delta: f64,
    pub inequalities: Vec<InequalityCheck>,
}

impl FidelityReport {
    pub fn all_pass(&self) -> bool {
        self.inequalities.iter().all(|c| c.pass)
    }
}

pub fn fidelity_report(rho: &DensityOperator, e: &QuantumChannel) -> Result<FidelityReport> {
    check_channel(rho, e)?;
    let output = e.apply(rho)?;
    let fidelity = uhlmann_fidelity(rho, &output)?.value;
    let fe_purification = entanglement_fidelity_purification(rho, e)?.value;
    let fe_kraus = entanglement_fidelity_kraus(rho, e)?.value;
    let fe_delta = (fe_purification - fe_kraus).abs();
    let inequalities = vec![
        InequalityCheck::at_most("fe_le_fidelity", fe_kraus, fidelity, TOL_INEQUALITY),
        InequalityCheck::at_most("fe_formula_agreement", fe_delta, TOL_FORMULA_AGREEMENT, 0.0),
    ];
    Ok(FidelityReport {
        fidelity,
        fe_purification,
        fe_kraus,
        fe_delta,
        inequalities,
    })
}

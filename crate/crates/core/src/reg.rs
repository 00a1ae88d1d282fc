//! The four regularizers: value and gradient evaluation, plus the
//! log-determinant Hessian quadratic form.
//!
//! Inverses and spectral functions are computed through [`sym_eig`]
//! (reciprocal or mapped eigenvalues), never via LU, so symmetry is preserved
//! exactly.

use crate::error::{Error, Result};
use crate::matrix::{sym_eig, SymMatrix};

/// Default eigenvalue floor used by the entropic regularizer at singular
/// inputs, with the convention `0·ln 0 = 0` for the value. The floor keeps the
/// gradient entries finite; the feasible sets in scope contain singular
/// matrices, so this case is routinely hit.
pub const DEFAULT_EIGENVALUE_FLOOR: f64 = 1e-12;

/// Tolerance below zero accepted as "PSD" by the entropic regularizer.
const PSD_SLACK: f64 = 1e-10;

/// Regularizer kinds available to the FTRL solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegKind {
    /// `½‖X‖²_Fr` — yields online gradient descent.
    Frobenius,
    /// `Tr(X ln X − X)`, the matrix analogue of the unnormalized entropy.
    Entropic,
    /// `−ln det(X + εE)`.
    LogDet,
    /// `−Σ ln(xᵢ + ε)` on nonnegative vectors; the diagonal restriction of
    /// the log-determinant.
    Burg,
}

impl RegKind {
    pub fn name(self) -> &'static str {
        match self {
            RegKind::Frobenius => "frobenius",
            RegKind::Entropic => "entropic",
            RegKind::LogDet => "logdet",
            RegKind::Burg => "burg",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "frobenius" => Ok(RegKind::Frobenius),
            "entropic" => Ok(RegKind::Entropic),
            "logdet" => Ok(RegKind::LogDet),
            "burg" => Ok(RegKind::Burg),
            other => Err(Error::InvalidParam(format!("unknown regularizer `{other}`"))),
        }
    }
}

/// A regularizer with its shift parameter. `epsilon` is used by `logdet` and
/// `burg` and ignored otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizerSpec {
    pub kind: RegKind,
    pub epsilon: f64,
}

impl RegularizerSpec {
    pub fn new(kind: RegKind, epsilon: f64) -> Result<Self> {
        if matches!(kind, RegKind::LogDet | RegKind::Burg) && !(epsilon > 0.0) {
            return Err(Error::InvalidParam(format!(
                "epsilon must be positive for {}, got {epsilon}",
                kind.name()
            )));
        }
        Ok(Self { kind, epsilon })
    }

    pub fn frobenius() -> Self {
        Self { kind: RegKind::Frobenius, epsilon: 0.0 }
    }

    pub fn entropic() -> Self {
        Self { kind: RegKind::Entropic, epsilon: 0.0 }
    }

    pub fn logdet(epsilon: f64) -> Result<Self> {
        Self::new(RegKind::LogDet, epsilon)
    }

    pub fn burg(epsilon: f64) -> Result<Self> {
        Self::new(RegKind::Burg, epsilon)
    }

    /// Value and gradient at `x`. Burg evaluates on the diagonal and returns a
    /// diagonal gradient, matching its use on diagonal decision sets.
    pub fn value_grad(&self, x: &SymMatrix) -> Result<(f64, SymMatrix)> {
        match self.kind {
            RegKind::Frobenius => Ok(frobenius_reg(x)),
            RegKind::Entropic => entropic_reg(x, DEFAULT_EIGENVALUE_FLOOR),
            RegKind::LogDet => logdet_reg(x, self.epsilon),
            RegKind::Burg => {
                let (v, g) = burg_reg(&x.diag(), self.epsilon)?;
                Ok((v, SymMatrix::from_diag(&g)))
            }
        }
    }
}

/// `½‖x‖²_Fr` with gradient `x`.
pub fn frobenius_reg(x: &SymMatrix) -> (f64, SymMatrix) {
    let sumsq: f64 = x.data().iter().map(|v| v * v).sum();
    (0.5 * sumsq, x.clone())
}

/// `Σ λ̃ᵢ(ln λ̃ᵢ − 1)` with `λ̃ᵢ = max(λᵢ, floor)`; gradient
/// `V·diag(ln λ̃ᵢ)·Vᵀ`. Rejects inputs with `λ_min < −1e-10`.
pub fn entropic_reg(x: &SymMatrix, eigenvalue_floor: f64) -> Result<(f64, SymMatrix)> {
    let eig = sym_eig(x)?;
    if eig.min_value() < -PSD_SLACK {
        return Err(Error::NotPsd(eig.min_value()));
    }
    let value = eig
        .values()
        .iter()
        .map(|&l| {
            let lf = l.max(eigenvalue_floor);
            lf * (lf.ln() - 1.0)
        })
        .sum();
    let grad = eig.apply(|l| l.max(eigenvalue_floor).ln());
    Ok((value, grad))
}

/// `−ln det(x + εE)` with gradient `−(x + εE)⁻¹`. Requires
/// `λ_min(x) > −ε` (up to a small slack).
pub fn logdet_reg(x: &SymMatrix, epsilon: f64) -> Result<(f64, SymMatrix)> {
    let eig = sym_eig(x)?;
    if eig.min_value() <= -epsilon + 1e-12 {
        return Err(Error::SingularShift(eig.min_value(), epsilon));
    }
    let value = -eig.values().iter().map(|&l| (l + epsilon).ln()).sum::<f64>();
    let grad = eig.apply(|l| -1.0 / (l + epsilon));
    Ok((value, grad))
}

/// Quadratic form of the log-determinant Hessian:
/// `vec(w)ᵀ ((x+εE)⁻¹ ⊗ (x+εE)⁻¹) vec(w) = Tr((x+εE)⁻¹ w (x+εE)⁻¹ w)`.
///
/// Evaluated in the eigenbasis of `x`: with `w̃ = Vᵀ w V` and
/// `μᵢ = 1/(λᵢ+ε)`, the form is `Σᵢⱼ w̃ᵢⱼ² μᵢ μⱼ`, which is nonnegative by
/// construction.
pub fn logdet_hessian_quadform(x: &SymMatrix, w: &SymMatrix, epsilon: f64) -> Result<f64> {
    if x.order() != w.order() {
        return Err(Error::DimensionMismatch(x.order(), w.order()));
    }
    let eig = sym_eig(x)?;
    if eig.min_value() <= -epsilon + 1e-12 {
        return Err(Error::SingularShift(eig.min_value(), epsilon));
    }
    let n = x.order();
    let coords = eig.conjugate(w)?;
    let mu: Vec<f64> = eig.values().iter().map(|&l| 1.0 / (l + epsilon)).collect();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let c = coords[i * n + j];
            total += c * c * mu[i] * mu[j];
        }
    }
    Ok(total)
}

/// `−Σ ln(xᵢ + ε)` with gradient `−1/(xᵢ+ε)`; identical to
/// [`logdet_reg`] on `diag(x)`. Rejects entries below `−1e-12`.
pub fn burg_reg(x: &[f64], epsilon: f64) -> Result<(f64, Vec<f64>)> {
    for (k, &xi) in x.iter().enumerate() {
        if xi < -1e-12 {
            return Err(Error::NegativeEntry(xi, k));
        }
    }
    let value = -x.iter().map(|&xi| (xi + epsilon).ln()).sum::<f64>();
    let grad = x.iter().map(|&xi| -1.0 / (xi + epsilon)).collect();
    Ok((value, grad))
}

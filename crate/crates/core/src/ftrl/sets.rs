//! Decision sets with membership tests and Euclidean (Frobenius) projection,
//! and loss spaces with membership tests.
//!
//! Projections onto the spectral sets (trace/spectral/Frobenius balls
//! intersected with the PSD cone) are exact eigenvalue projections. The
//! reduced set (trace cap plus diagonal caps) is handled by Dykstra's
//! alternating projections between two sets with analytic projections:
//! the PSD-and-trace spectral set and the diagonal-cap slab.

use crate::error::{Error, Result};
use crate::matrix::{sym_eig, SymMatrix};

/// Iteration cap for Dykstra's alternating projections.
const DYKSTRA_MAX_CYCLES: usize = 2000;

/// Default tolerance for membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A feasible region of symmetric PSD matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecisionSet {
    /// `{X ⪰ 0 : ‖X‖_Tr ≤ τ}`
    TraceBall { n: usize, tau: f64 },
    /// `{X ⪰ 0 : ‖X‖_Sp ≤ σ}`
    SpectralBall { n: usize, sigma: f64 },
    /// `{X ⪰ 0 : ‖X‖_Fr ≤ ρ}`
    FrobeniusBall { n: usize, rho: f64 },
    /// `{X ⪰ 0 : ‖X‖_Tr ≤ τ, Xᵢᵢ ≤ β}` — the reduced set of the
    /// matrix-prediction embedding.
    Reduced { n: usize, beta: f64, tau: f64 },
    /// Diagonal restriction of `Reduced`: `diag(x), 0 ≤ xᵢ ≤ β, Σxᵢ ≤ τ`.
    DiagReduced { n: usize, beta: f64, tau: f64 },
}

impl DecisionSet {
    pub fn order(&self) -> usize {
        match *self {
            DecisionSet::TraceBall { n, .. }
            | DecisionSet::SpectralBall { n, .. }
            | DecisionSet::FrobeniusBall { n, .. }
            | DecisionSet::Reduced { n, .. }
            | DecisionSet::DiagReduced { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DecisionSet::TraceBall { n, tau } => n > 0 && tau > 0.0,
            DecisionSet::SpectralBall { n, sigma } => n > 0 && sigma > 0.0,
            DecisionSet::FrobeniusBall { n, rho } => n > 0 && rho > 0.0,
            DecisionSet::Reduced { n, beta, tau } | DecisionSet::DiagReduced { n, beta, tau } => {
                n > 0 && beta > 0.0 && tau > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!("invalid decision set {self:?}")))
        }
    }

    /// Whether `x` is PSD within `tol` and satisfies the set's norm and cap
    /// constraints within `tol`.
    pub fn contains(&self, x: &SymMatrix, tol: f64) -> Result<bool> {
        if x.order() != self.order() {
            return Err(Error::DimensionMismatch(x.order(), self.order()));
        }
        let eig = sym_eig(x)?;
        if eig.min_value() < -tol {
            return Ok(false);
        }
        let trace_norm: f64 = eig.values().iter().map(|l| l.abs()).sum();
        Ok(match *self {
            DecisionSet::TraceBall { tau, .. } => trace_norm <= tau + tol,
            DecisionSet::SpectralBall { sigma, .. } => eig.max_value() <= sigma + tol,
            DecisionSet::FrobeniusBall { rho, .. } => x.frobenius_norm() <= rho + tol,
            DecisionSet::Reduced { beta, tau, .. } => {
                trace_norm <= tau + tol && x.max_diag() <= beta + tol
            }
            DecisionSet::DiagReduced { beta, tau, .. } => {
                trace_norm <= tau + tol
                    && x.max_diag() <= beta + tol
                    && x.max_abs_offdiag() <= tol
            }
        })
    }

    /// Frobenius-norm projection of `x` onto the set, accurate to `tol`.
    pub fn project(&self, x: &SymMatrix, tol: f64) -> Result<SymMatrix> {
        self.validate()?;
        if x.order() != self.order() {
            return Err(Error::DimensionMismatch(x.order(), self.order()));
        }
        match *self {
            DecisionSet::TraceBall { tau, .. } => {
                let eig = sym_eig(x)?;
                let mut vals = eig.values().to_vec();
                project_nonneg_sum_cap(&mut vals, tau);
                Ok(eig.apply_values(&vals))
            }
            DecisionSet::SpectralBall { sigma, .. } => {
                let eig = sym_eig(x)?;
                Ok(eig.apply(|l| l.clamp(0.0, sigma)))
            }
            DecisionSet::FrobeniusBall { rho, .. } => {
                let eig = sym_eig(x)?;
                let mut vals: Vec<f64> = eig.values().iter().map(|l| l.max(0.0)).collect();
                let norm = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > rho {
                    let s = rho / norm;
                    for v in &mut vals {
                        *v *= s;
                    }
                }
                Ok(eig.apply_values(&vals))
            }
            DecisionSet::Reduced { beta, tau, .. } => {
                let pa = |m: &SymMatrix| -> Result<SymMatrix> {
                    let eig = sym_eig(m)?;
                    let mut vals = eig.values().to_vec();
                    project_nonneg_sum_cap(&mut vals, tau);
                    Ok(eig.apply_values(&vals))
                };
                let pb = |m: &SymMatrix| -> Result<SymMatrix> {
                    Ok(clamp_diag(m, beta))
                };
                dykstra2(x, pa, pb, tol)
            }
            DecisionSet::DiagReduced { beta, tau, .. } => {
                let mut d = x.diag();
                project_box_sum_cap(&mut d, beta, tau);
                Ok(SymMatrix::from_diag(&d))
            }
        }
    }

    /// Upper bound on the Frobenius diameter, used by optimality
    /// certificates.
    pub fn diameter_bound(&self) -> f64 {
        match *self {
            DecisionSet::TraceBall { tau, .. } => 2.0 * tau,
            DecisionSet::SpectralBall { n, sigma } => 2.0 * sigma * (n as f64).sqrt(),
            DecisionSet::FrobeniusBall { rho, .. } => 2.0 * rho,
            DecisionSet::Reduced { n, beta, tau } | DecisionSet::DiagReduced { n, beta, tau } => {
                2.0 * tau.min(beta * (n as f64).sqrt())
            }
        }
    }

    /// A strictly feasible starting point for iterative solvers.
    pub fn interior_point(&self) -> SymMatrix {
        let n = self.order();
        let c = match *self {
            DecisionSet::TraceBall { tau, .. } => 0.5 * tau / n as f64,
            DecisionSet::SpectralBall { sigma, .. } => 0.5 * sigma,
            DecisionSet::FrobeniusBall { rho, .. } => 0.5 * rho / (n as f64).sqrt(),
            DecisionSet::Reduced { beta, tau, .. } | DecisionSet::DiagReduced { beta, tau, .. } => {
                0.5 * beta.min(tau / n as f64)
            }
        };
        SymMatrix::identity(n).scale(c)
    }
}

/// Projects eigenvalues onto `{v ≥ 0, Σv ≤ τ}` in place: nonnegative clip
/// first; if the sum still exceeds the cap, a uniform shift followed by the
/// clip lands exactly on the cap (waterfilling).
fn project_nonneg_sum_cap(vals: &mut [f64], tau: f64) {
    let clipped_sum: f64 = vals.iter().map(|v| v.max(0.0)).sum();
    if clipped_sum <= tau {
        for v in vals.iter_mut() {
            *v = v.max(0.0);
        }
        return;
    }
    // find theta with Σ max(v−θ, 0) = τ by scanning the sorted values
    let mut sorted = vals.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cum += v;
        let t = (cum - tau) / (k as f64 + 1.0);
        let next = sorted.get(k + 1).copied().unwrap_or(f64::NEG_INFINITY);
        if t >= next {
            theta = t;
            break;
        }
    }
    for v in vals.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Projects a vector onto `{0 ≤ v ≤ β, Σv ≤ τ}` in place, by bisection on the
/// uniform shift θ in `clamp(v−θ, 0, β)`.
fn project_box_sum_cap(vals: &mut [f64], beta: f64, tau: f64) {
    let total = |theta: f64| -> f64 {
        vals.iter().map(|v| (v - theta).clamp(0.0, beta)).sum()
    };
    if total(0.0) <= tau {
        for v in vals.iter_mut() {
            *v = v.clamp(0.0, beta);
        }
        return;
    }
    let mut lo = 0.0;
    let mut hi = vals.iter().fold(0.0_f64, |m, &v| m.max(v));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > tau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    for v in vals.iter_mut() {
        *v = (*v - theta).clamp(0.0, beta);
    }
}

fn clamp_diag(m: &SymMatrix, beta: f64) -> SymMatrix {
    let n = m.order();
    SymMatrix::from_fn(n, |i, j| {
        if i == j {
            m.get(i, i).min(beta)
        } else {
            m.get(i, j)
        }
    })
    .expect("finite entries")
}

/// Dykstra's alternating projections onto the intersection of two convex
/// sets, each given by its exact projection. Converges to the Frobenius
/// projection of `x0`.
fn dykstra2(
    x0: &SymMatrix,
    pa: impl Fn(&SymMatrix) -> Result<SymMatrix>,
    pb: impl Fn(&SymMatrix) -> Result<SymMatrix>,
    tol: f64,
) -> Result<SymMatrix> {
    let n = x0.order();
    let scale = 1.0 + x0.frobenius_norm();
    let mut x = x0.clone();
    let mut p = SymMatrix::zero(n);
    let mut q = SymMatrix::zero(n);
    let mut last_gap = f64::INFINITY;
    for _ in 0..DYKSTRA_MAX_CYCLES {
        let y = pa(&x.add(&p)?)?;
        p = x.add(&p)?.sub(&y)?;
        let z = pb(&y.add(&q)?)?;
        q = y.add(&q)?.sub(&z)?;
        last_gap = y.sub(&z)?.frobenius_norm();
        if last_gap <= tol * scale {
            // y is exact in A (PSD, trace); B's caps hold within tol
            return Ok(y);
        }
        x = z;
    }
    Err(Error::ProjectionNoConvergence(DYKSTRA_MAX_CYCLES, last_gap))
}

/// A loss-matrix membership region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossSpace {
    /// `‖L‖_Fr ≤ γ₂`
    FroBall { gamma2: f64 },
    /// `‖L‖_Sp ≤ γ_∞`
    SpectralBall { gamma_inf: f64 },
    /// `‖L‖_Tr ≤ γ₁`
    TraceBall { gamma1: f64 },
    /// `‖vec(L)‖₁ ≤ g₁`
    VecL1Ball { g1: f64 },
}

impl LossSpace {
    pub fn radius(&self) -> f64 {
        match *self {
            LossSpace::FroBall { gamma2 } => gamma2,
            LossSpace::SpectralBall { gamma_inf } => gamma_inf,
            LossSpace::TraceBall { gamma1 } => gamma1,
            LossSpace::VecL1Ball { g1 } => g1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radius() > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!("loss-space radius must be positive: {self:?}")))
        }
    }

    pub fn contains(&self, l: &SymMatrix, tol: f64) -> Result<bool> {
        Ok(match *self {
            LossSpace::FroBall { gamma2 } => l.frobenius_norm() <= gamma2 + tol,
            LossSpace::SpectralBall { gamma_inf } => {
                let eig = sym_eig(l)?;
                eig.values().iter().fold(0.0_f64, |m, v| m.max(v.abs())) <= gamma_inf + tol
            }
            LossSpace::TraceBall { gamma1 } => {
                let eig = sym_eig(l)?;
                eig.values().iter().map(|v| v.abs()).sum::<f64>() <= gamma1 + tol
            }
            LossSpace::VecL1Ball { g1 } => l.vec_l1_norm() <= g1 + tol,
        })
    }
}

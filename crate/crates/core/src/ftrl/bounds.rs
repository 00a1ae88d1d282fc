//! Theoretical regret bounds and the learning-rate schedule.
//!
//! Each variant names a regularizer/decision-set/loss-space combination and
//! carries the radii entering its bound. `strong_convexity` is the modulus
//! measured against the loss space (the norm-based modulus divided by the
//! squared dual-norm radius, where applicable) and `regularizer_range` is the
//! corresponding bound on `max R − min R` over the decision set, so that
//! `2√(H₀·T/s)` reproduces each named bound up to its rounded constant.

use crate::error::{Error, Result};

/// `η = √(s·H₀/T)`.
pub fn learning_rate(s: f64, h0: f64, horizon: usize) -> f64 {
    (s * h0 / horizon as f64).sqrt()
}

/// Parameters of a bound-conformant run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    /// Strong-convexity modulus with respect to the loss space.
    pub s: f64,
    /// Range bound on the regularizer over the decision set.
    pub h0: f64,
    pub eta: f64,
    pub horizon: usize,
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        if self.s > 0.0
            && self.h0 > 0.0
            && self.eta > 0.0
            && self.horizon > 0
            && self.s.is_finite()
            && self.h0.is_finite()
            && self.eta.is_finite()
        {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!("invalid bound parameters {self:?}")))
        }
    }
}

/// A named regret bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundVariant {
    /// Frobenius regularizer on a Frobenius ball against Frobenius-bounded
    /// losses: `ρ·γ₂·√(2T)`.
    Frobenius { rho: f64, gamma2: f64 },
    /// Entropic regularizer on a trace ball against spectrally bounded
    /// losses: `2·τ·γ_∞·√(T·ln N)`.
    Entropic { tau: f64, gamma_inf: f64, n: usize },
    /// Log-determinant regularizer (ε = σ) on a spectral ball against
    /// trace-norm-bounded losses: `4·σ·γ₁·√(T·N·ln 2)`.
    LogDetGeneral { sigma: f64, gamma1: f64, n: usize },
    /// Entropic regularizer on the reduced set against losses with diagonal
    /// square and `Tr(L²) ≤ γ`: `2·√(β·τ·γ·T·ln N)`.
    EntropicReduced { beta: f64, tau: f64, gamma: f64, n: usize },
    /// Log-determinant regularizer (ε = β) on the reduced set against
    /// entrywise-ℓ₁-bounded losses: `175·g₁·√(β·τ·T)`.
    LogDetMain { g1: f64, beta: f64, tau: f64 },
    /// Diagonal (vector) case of the reduced problem with the Burg
    /// regularizer (ε = β): `4·g₁·√(β·τ·T)`.
    VectorLogDet { g1: f64, beta: f64, tau: f64 },
}

impl BoundVariant {
    pub fn name(&self) -> &'static str {
        match self {
            BoundVariant::Frobenius { .. } => "frobenius",
            BoundVariant::Entropic { .. } => "entropic",
            BoundVariant::LogDetGeneral { .. } => "logdet-general",
            BoundVariant::EntropicReduced { .. } => "entropic-reduced",
            BoundVariant::LogDetMain { .. } => "logdet-main",
            BoundVariant::VectorLogDet { .. } => "vector",
        }
    }

    /// The named bound evaluated at horizon `t`.
    pub fn regret_bound(&self, t: usize) -> f64 {
        let t = t as f64;
        match *self {
            BoundVariant::Frobenius { rho, gamma2 } => rho * gamma2 * (2.0 * t).sqrt(),
            BoundVariant::Entropic { tau, gamma_inf, n } => {
                2.0 * tau * gamma_inf * (t * (n as f64).ln()).sqrt()
            }
            BoundVariant::LogDetGeneral { sigma, gamma1, n } => {
                4.0 * sigma * gamma1 * (t * n as f64 * 2.0_f64.ln()).sqrt()
            }
            BoundVariant::EntropicReduced { beta, tau, gamma, n } => {
                2.0 * (beta * tau * gamma * t * (n as f64).ln()).sqrt()
            }
            BoundVariant::LogDetMain { g1, beta, tau } => 175.0 * g1 * (beta * tau * t).sqrt(),
            BoundVariant::VectorLogDet { g1, beta, tau } => 4.0 * g1 * (beta * tau * t).sqrt(),
        }
    }

    /// Strong-convexity modulus with respect to the loss space.
    pub fn strong_convexity(&self) -> f64 {
        match *self {
            BoundVariant::Frobenius { gamma2, .. } => 1.0 / (gamma2 * gamma2),
            BoundVariant::Entropic { tau, gamma_inf, .. } => {
                1.0 / (tau * gamma_inf * gamma_inf)
            }
            BoundVariant::LogDetGeneral { sigma, gamma1, .. } => {
                1.0 / (4.0 * sigma * sigma * gamma1 * gamma1)
            }
            BoundVariant::EntropicReduced { beta, gamma, .. } => 1.0 / (beta * gamma),
            BoundVariant::LogDetMain { g1, beta, .. } => {
                // ε = β, so β + ε = 2β
                let be = 2.0 * beta;
                1.0 / (1152.0 * std::f64::consts::E.sqrt() * g1 * g1 * be * be)
            }
            BoundVariant::VectorLogDet { g1, beta, .. } => {
                // spectral-norm route restricted to diagonals, ε = β
                1.0 / (4.0 * beta * beta * g1 * g1)
            }
        }
    }

    /// Range bound `H₀` on the regularizer over the decision set.
    pub fn regularizer_range(&self) -> f64 {
        match *self {
            BoundVariant::Frobenius { rho, .. } => 0.5 * rho * rho,
            BoundVariant::Entropic { tau, n, .. } => tau * (n as f64).ln(),
            BoundVariant::LogDetGeneral { n, .. } => n as f64 * 2.0_f64.ln(),
            BoundVariant::EntropicReduced { tau, n, .. } => tau * (n as f64).ln(),
            // ε = β: range is capped by τ/ε
            BoundVariant::LogDetMain { beta, tau, .. } => tau / beta,
            BoundVariant::VectorLogDet { beta, tau, .. } => tau / beta,
        }
    }

    /// `√(s·H₀/T)` for this variant's parameters.
    pub fn auto_eta(&self, horizon: usize) -> f64 {
        learning_rate(self.strong_convexity(), self.regularizer_range(), horizon)
    }

    /// The shift the bound's derivation uses, when the regularizer has one.
    pub fn auto_epsilon(&self) -> Option<f64> {
        match *self {
            BoundVariant::LogDetGeneral { sigma, .. } => Some(sigma),
            BoundVariant::LogDetMain { beta, .. } | BoundVariant::VectorLogDet { beta, .. } => {
                Some(beta)
            }
            _ => None,
        }
    }

    pub fn params(&self, horizon: usize) -> BoundParams {
        BoundParams {
            s: self.strong_convexity(),
            h0: self.regularizer_range(),
            eta: self.auto_eta(horizon),
            horizon,
        }
    }
}

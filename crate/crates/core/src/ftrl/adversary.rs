//! Synthetic loss adversaries for online SDP games: seeded i.i.d. draws from
//! a loss space, and an adaptive opponent that maximizes the round loss
//! against the current decision.

use crate::error::Result;
use crate::ftrl::sets::LossSpace;
use crate::matrix::{norms, SymMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryKind {
    /// Seeded i.i.d. draws scaled to the boundary of the loss space.
    Iid,
    /// Picks `argmax_{L ∈ space} L • X_t` each round.
    Adaptive,
}

impl AdversaryKind {
    pub fn name(&self) -> &'static str {
        match self {
            AdversaryKind::Iid => "iid",
            AdversaryKind::Adaptive => "adaptive",
        }
    }
}

/// Loss generator for a fixed loss space. With `diagonal` set, emitted losses
/// are diagonal matrices (the vector case).
#[derive(Debug, Clone)]
pub struct LossAdversary {
    kind: AdversaryKind,
    space: LossSpace,
    diagonal: bool,
    rng: ChaCha12Rng,
}

impl LossAdversary {
    pub fn new(kind: AdversaryKind, space: LossSpace, diagonal: bool, seed: u64) -> Self {
        Self { kind, space, diagonal, rng: ChaCha12Rng::seed_from_u64(seed) }
    }

    pub fn next_loss(&mut self, x: &SymMatrix) -> Result<SymMatrix> {
        match self.kind {
            AdversaryKind::Iid => self.sample_iid(x.order()),
            AdversaryKind::Adaptive => self.maximize_against(x),
        }
    }

    fn sample_iid(&mut self, n: usize) -> Result<SymMatrix> {
        let raw = if self.diagonal {
            let d: Vec<f64> = (0..n).map(|_| self.rng.sample::<f64, _>(StandardNormal)).collect();
            SymMatrix::from_diag(&d)
        } else {
            SymMatrix::from_fn(n, |_, _| self.rng.sample::<f64, _>(StandardNormal))?
        };
        self.rescale(raw)
    }

    fn rescale(&self, raw: SymMatrix) -> Result<SymMatrix> {
        let scale = match self.space {
            LossSpace::FroBall { gamma2 } => gamma2 / raw.frobenius_norm().max(1e-300),
            LossSpace::VecL1Ball { g1 } => g1 / raw.vec_l1_norm().max(1e-300),
            LossSpace::SpectralBall { gamma_inf } => {
                gamma_inf / norms(&raw)?.spectral.max(1e-300)
            }
            LossSpace::TraceBall { gamma1 } => gamma1 / norms(&raw)?.trace.max(1e-300),
        };
        Ok(raw.scale(scale))
    }

    /// The exact maximizer of `L • X` over the loss space (ties broken
    /// deterministically). For a zero decision any loss is maximal; a fixed
    /// identity-direction fallback keeps runs reproducible.
    fn maximize_against(&mut self, x: &SymMatrix) -> Result<SymMatrix> {
        let n = x.order();
        if x.frobenius_norm() == 0.0 {
            let e = SymMatrix::identity(n);
            return self.rescale(if self.diagonal { e } else { e });
        }
        match self.space {
            LossSpace::FroBall { gamma2 } => {
                let base = if self.diagonal { SymMatrix::from_diag(&x.diag()) } else { x.clone() };
                Ok(base.scale(gamma2 / base.frobenius_norm().max(1e-300)))
            }
            LossSpace::SpectralBall { gamma_inf } => {
                // for PSD decisions the identity attains γ_∞·Tr(X)
                Ok(SymMatrix::identity(n).scale(gamma_inf))
            }
            LossSpace::TraceBall { gamma1 } => {
                if self.diagonal {
                    let d = x.diag();
                    let k = argmax_abs(&d);
                    let mut v = vec![0.0; n];
                    v[k] = gamma1 * d[k].signum();
                    Ok(SymMatrix::from_diag(&v))
                } else {
                    let eig = crate::matrix::sym_eig(x)?;
                    let v = eig.vector(0);
                    Ok(SymMatrix::outer(&v, gamma1))
                }
            }
            LossSpace::VecL1Ball { g1 } => {
                // all mass on the largest-magnitude entry, symmetrized
                let (mut bi, mut bj, mut bv) = (0usize, 0usize, 0.0f64);
                for i in 0..n {
                    for j in 0..n {
                        if self.diagonal && i != j {
                            continue;
                        }
                        let v = x.get(i, j);
                        if v.abs() > bv.abs() {
                            bi = i;
                            bj = j;
                            bv = v;
                        }
                    }
                }
                let mut l = vec![0.0; n * n];
                if bi == bj {
                    l[bi * n + bi] = g1 * bv.signum();
                } else {
                    l[bi * n + bj] = 0.5 * g1 * bv.signum();
                    l[bj * n + bi] = 0.5 * g1 * bv.signum();
                }
                SymMatrix::new(n, l)
            }
        }
    }
}

fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for (k, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = k;
        }
    }
    best
}

//! Embedding of online matrix prediction (OMP) into sparse online SDP:
//! symmetrization, the positive/negative decomposition oracle, prediction
//! extraction, sparse loss construction, and the OMP game loop.
//!
//! An OMP instance over `m×n` targets embeds into decisions of order
//! `N = 2p`, where `p` is the order of the symmetrization (`m+n`, or `n` for
//! symmetric classes). A feasible decision plays the role of the block pair
//! `(P, Q)` of a decomposition witness, and the prediction for entry `(i,j)`
//! is read off as the difference of the two mirrored entries.

use crate::error::{Error, Result};
use crate::ftrl::game::{run_sdp_game_stream, GameTranscript};
use crate::ftrl::sets::{DecisionSet, LossSpace};
use crate::ftrl::solver::SolverOptions;
use crate::matrix::{sym_eig, RectMatrix, SymMatrix};
use crate::problems::RoundEvent;
use crate::reg::RegularizerSpec;

/// An online matrix-prediction problem: target shape, Lipschitz bound of the
/// per-round losses, and the decomposability caps `(β, τ)` of the comparator
/// class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmpProblem {
    pub rows: usize,
    pub cols: usize,
    /// Lipschitz bound `G` of the loss functions on `[−1, 1]`.
    pub lipschitz: f64,
    pub beta: f64,
    pub tau: f64,
    pub symmetric: bool,
}

impl OmpProblem {
    pub fn new(
        rows: usize,
        cols: usize,
        lipschitz: f64,
        beta: f64,
        tau: f64,
        symmetric: bool,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParam("matrix dimensions must be positive".into()));
        }
        if symmetric && rows != cols {
            return Err(Error::DimensionMismatch(rows, cols));
        }
        if !(lipschitz > 0.0 && beta > 0.0 && tau > 0.0) {
            return Err(Error::InvalidParam(format!(
                "G, beta, tau must be positive: {lipschitz}, {beta}, {tau}"
            )));
        }
        Ok(Self { rows, cols, lipschitz, beta, tau, symmetric })
    }

    /// Order `p` of the symmetrization.
    pub fn sym_order(&self) -> usize {
        if self.symmetric {
            self.cols
        } else {
            self.rows + self.cols
        }
    }

    /// Order `N = 2p` of the embedded SDP decisions.
    pub fn sdp_order(&self) -> usize {
        2 * self.sym_order()
    }

    /// The reduced decision set `{X ⪰ 0, ‖X‖_Tr ≤ τ, Xᵢᵢ ≤ β}` of order `N`.
    pub fn decision_set(&self) -> DecisionSet {
        DecisionSet::Reduced { n: self.sdp_order(), beta: self.beta, tau: self.tau }
    }

    /// The sparse losses live in the entrywise-ℓ₁ ball of radius `4G`.
    pub fn loss_space(&self) -> LossSpace {
        LossSpace::VecL1Ball { g1: 4.0 * self.lipschitz }
    }

    /// Position of target entry `(i, j)` inside the symmetrization.
    pub fn sym_position(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        if i >= self.rows || j >= self.cols {
            return Err(Error::IndexOutOfRange(i, j));
        }
        if self.symmetric {
            if i == j {
                // the mirrored 4-entry loss pattern degenerates on the
                // diagonal; protocol streams never query it
                return Err(Error::IndexOutOfRange(i, j));
            }
            Ok((i, j))
        } else {
            Ok((i, self.rows + j))
        }
    }
}

/// `(p, N)` of the embedding.
pub fn embed_dims(problem: &OmpProblem) -> (usize, usize) {
    (problem.sym_order(), problem.sdp_order())
}

/// A decomposition witness `sym(W) = P − Q` with `P, Q ⪰ 0`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub pos: SymMatrix,
    pub neg: SymMatrix,
}

impl Decomposition {
    pub fn order(&self) -> usize {
        self.pos.order()
    }

    /// `Tr(P + Q)`, the trace budget the witness uses.
    pub fn trace_sum(&self) -> f64 {
        self.pos.trace() + self.neg.trace()
    }

    /// Largest diagonal entry across both blocks.
    pub fn max_diag(&self) -> f64 {
        self.pos.max_diag().max(self.neg.max_diag())
    }

    /// Errors if the witness exceeds the declared caps by more than `tol`.
    pub fn check_caps(&self, beta: f64, tau: f64, tol: f64) -> Result<()> {
        if self.trace_sum() > tau + tol || self.max_diag() > beta + tol {
            return Err(Error::DecompositionCapViolation(format!(
                "witness (beta={:.6}, tau={:.6}) vs declared (beta={beta:.6}, tau={tau:.6})",
                self.max_diag(),
                self.trace_sum(),
            )));
        }
        Ok(())
    }
}

/// Builds the symmetrization of a target matrix: the matrix itself for
/// symmetric classes, otherwise the off-diagonal block arrangement
/// `[[0, W], [Wᵀ, 0]]`.
pub fn symmetrize_target(w: &RectMatrix, symmetric: bool) -> Result<SymMatrix> {
    if symmetric {
        if w.rows() != w.cols() {
            return Err(Error::DimensionMismatch(w.rows(), w.cols()));
        }
        SymMatrix::from_fn(w.rows(), |i, j| 0.5 * (w.get(i, j) + w.get(j, i)))
    } else {
        let (m, n) = (w.rows(), w.cols());
        let p = m + n;
        SymMatrix::from_fn(p, |r, c| {
            if r < m && c >= m {
                w.get(r, c - m)
            } else if c < m && r >= m {
                w.get(c, r - m)
            } else {
                0.0
            }
        })
    }
}

/// Splits the symmetrization into its positive and negative eigenparts:
/// `P − Q = sym(W)` with `Tr(P + Q) = ‖sym(W)‖_Tr`.
pub fn decompose_sym(w: &RectMatrix, symmetric: bool) -> Result<Decomposition> {
    let s = symmetrize_target(w, symmetric)?;
    let eig = sym_eig(&s)?;
    let pos = eig.apply(|l| l.max(0.0));
    let neg = eig.apply(|l| (-l).max(0.0));
    Ok(Decomposition { pos, neg })
}

/// Block-diagonal embedding `[[P, 0], [0, Q]]` of a decomposition, the
/// comparator's image in the reduced decision set.
pub fn embed_block_diag(d: &Decomposition) -> SymMatrix {
    let p = d.order();
    SymMatrix::from_fn(2 * p, |i, j| {
        if i < p && j < p {
            d.pos.get(i, j)
        } else if i >= p && j >= p {
            d.neg.get(i - p, j - p)
        } else {
            0.0
        }
    })
    .expect("finite entries")
}

/// Raw prediction `X[r][c] − X[p+r][p+c]` for target entry `(i, j)`.
pub fn extract_prediction_raw(
    x: &SymMatrix,
    pair: (usize, usize),
    problem: &OmpProblem,
) -> Result<f64> {
    let (r, c) = problem.sym_position(pair.0, pair.1)?;
    let p = problem.sym_order();
    if x.order() != 2 * p {
        return Err(Error::DimensionMismatch(x.order(), 2 * p));
    }
    Ok(x.get(r, c) - x.get(p + r, p + c))
}

/// Prediction clamped into the protocol range `[−1, 1]`.
pub fn extract_prediction(
    x: &SymMatrix,
    pair: (usize, usize),
    problem: &OmpProblem,
) -> Result<f64> {
    Ok(extract_prediction_raw(x, pair, problem)?.clamp(-1.0, 1.0))
}

/// A symmetric loss matrix with at most 4 nonzero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLoss {
    pub order: usize,
    /// `(row, col, value)` triples forming a symmetric pattern.
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseLoss {
    pub fn to_dense(&self) -> Result<SymMatrix> {
        let n = self.order;
        let mut data = vec![0.0; n * n];
        for &(i, j, v) in &self.entries {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange(i, j));
            }
            data[i * n + j] = v;
        }
        SymMatrix::new(n, data)
    }

    /// Sparse Frobenius inner product with a dense matrix.
    pub fn inner(&self, x: &SymMatrix) -> Result<f64> {
        if x.order() != self.order {
            return Err(Error::DimensionMismatch(x.order(), self.order));
        }
        Ok(self.entries.iter().map(|&(i, j, v)| v * x.get(i, j)).sum())
    }

    pub fn vec_l1(&self) -> f64 {
        self.entries.iter().map(|&(_, _, v)| v.abs()).sum()
    }

    pub fn nonzeros(&self) -> usize {
        self.entries.iter().filter(|&&(_, _, v)| v != 0.0).count()
    }
}

/// Places subgradient `g` on the mirrored positions of target entry `(i, j)`
/// and `−g` on their shifted copies, so that
/// `L • X = 2g·(X[r][c] − X[p+r][p+c])` for every symmetric `X`.
pub fn build_sparse_loss(
    pair: (usize, usize),
    g: f64,
    problem: &OmpProblem,
) -> Result<SparseLoss> {
    if g.abs() > problem.lipschitz + 1e-12 {
        return Err(Error::SubgradientTooLarge(g.abs(), problem.lipschitz));
    }
    let n = problem.sdp_order();
    if g == 0.0 {
        return Ok(SparseLoss { order: n, entries: vec![] });
    }
    let (r, c) = problem.sym_position(pair.0, pair.1)?;
    let p = problem.sym_order();
    Ok(SparseLoss {
        order: n,
        entries: vec![
            (r, c, g),
            (c, r, g),
            (p + r, p + c, -g),
            (p + c, p + r, -g),
        ],
    })
}

/// Per-round record of the matrix-prediction side of a reduced run.
#[derive(Debug, Clone)]
pub struct OmpTranscript {
    pub problem: OmpProblem,
    /// Unclamped entry differences read from the decisions.
    pub raw_predictions: Vec<f64>,
    /// Predictions clamped into `[−1, 1]`; these incur the losses.
    pub predictions: Vec<f64>,
    pub subgradients: Vec<f64>,
    pub round_losses: Vec<f64>,
    pub cum_losses: Vec<f64>,
}

/// Runs the OMP protocol through the embedded sparse SDP game: each round
/// extracts the prediction from the current decision, evaluates the event's
/// loss at the clamped prediction, and feeds the sparse subgradient loss to
/// the FTRL engine.
pub fn run_omp_game(
    problem: &OmpProblem,
    events: &[RoundEvent],
    reg: &RegularizerSpec,
    eta: f64,
    opts: &SolverOptions,
) -> Result<(OmpTranscript, GameTranscript)> {
    let set = problem.decision_set();
    let space = problem.loss_space();
    let horizon = events.len();
    let mut raw_predictions = Vec::with_capacity(horizon);
    let mut predictions = Vec::with_capacity(horizon);
    let mut subgradients = Vec::with_capacity(horizon);
    let mut round_losses = Vec::with_capacity(horizon);
    let mut cum_losses = Vec::with_capacity(horizon);
    let mut running = 0.0;
    let sdp = run_sdp_game_stream(
        |round, x| {
            let ev = &events[round];
            let raw = extract_prediction_raw(x, (ev.i, ev.j), problem)?;
            let clamped = raw.clamp(-1.0, 1.0);
            let g = ev.subgradient_extended(raw);
            raw_predictions.push(raw);
            predictions.push(clamped);
            subgradients.push(g);
            running += ev.loss_at(clamped);
            round_losses.push(ev.loss_at(clamped));
            cum_losses.push(running);
            build_sparse_loss((ev.i, ev.j), g, problem)?.to_dense()
        },
        horizon,
        reg,
        &set,
        eta,
        &space,
        opts,
    )?;
    Ok((
        OmpTranscript {
            problem: *problem,
            raw_predictions,
            predictions,
            subgradients,
            round_losses,
            cum_losses,
        },
        sdp,
    ))
}

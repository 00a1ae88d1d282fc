//! Adversary streams for the three matrix-prediction applications — online
//! max-cut, online gambling, and online collaborative filtering — plus exact
//! small-scale comparator oracles and ratings-file ingestion.

pub mod ratings;

use crate::error::{Error, Result};
use crate::ftrl::game::GameTranscript;
use crate::ftrl::solver::{best_offline, OfflineSolution};
use crate::matrix::{norms, RectMatrix};
use crate::reduction::{decompose_sym, embed_block_diag, extract_prediction, OmpProblem};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

pub use ratings::{read_ratings, write_ratings};

/// Loss attached to a real-valued rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatingLoss {
    /// `|ŷ − y|`, 1-Lipschitz.
    Absolute,
    /// `(ŷ − y)²`, 4-Lipschitz on `[−1, 1]`.
    Squared,
}

/// The feedback revealed after a prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    /// A ±1 label with the loss `|ŷ − y|/2 = (1 − y·ŷ)/2`.
    Sign(i8),
    /// A rating in `[−1, 1]` with the chosen loss kind.
    Rating { y: f64, kind: RatingLoss },
}

/// One protocol round: a queried index pair and its feedback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundEvent {
    pub i: usize,
    pub j: usize,
    pub outcome: Outcome,
}

impl RoundEvent {
    /// Loss at a prediction in `[−1, 1]`.
    pub fn loss_at(&self, yhat: f64) -> f64 {
        match self.outcome {
            Outcome::Sign(y) => 0.5 * (1.0 - y as f64 * yhat),
            Outcome::Rating { y, kind: RatingLoss::Absolute } => (yhat - y).abs(),
            Outcome::Rating { y, kind: RatingLoss::Squared } => (yhat - y) * (yhat - y),
        }
    }

    /// A subgradient of the loss at a prediction in `[−1, 1]`. Ties of the
    /// absolute loss take 0, which preserves the convexity inequality.
    pub fn subgradient_at(&self, yhat: f64) -> f64 {
        match self.outcome {
            Outcome::Sign(y) => -0.5 * y as f64,
            Outcome::Rating { y, kind: RatingLoss::Absolute } => {
                if yhat == y {
                    0.0
                } else {
                    (yhat - y).signum()
                }
            }
            Outcome::Rating { y, kind: RatingLoss::Squared } => 2.0 * (yhat - y),
        }
    }

    /// Lipschitz bound of this loss on `[−1, 1]`.
    pub fn lipschitz(&self) -> f64 {
        match self.outcome {
            Outcome::Sign(_) => 0.5,
            Outcome::Rating { kind: RatingLoss::Absolute, .. } => 1.0,
            Outcome::Rating { kind: RatingLoss::Squared, .. } => 4.0,
        }
    }

    /// Subgradient of the Lipschitz extension of the loss, evaluated at the
    /// raw (unclamped) prediction. Outside `[−1, 1]` the extension's slope is
    /// `±G`, which keeps the per-round reduction inequality valid when a
    /// feasible decision over-predicts.
    pub fn subgradient_extended(&self, raw: f64) -> f64 {
        let g = self.lipschitz();
        if raw > 1.0 {
            g
        } else if raw < -1.0 {
            -g
        } else {
            self.subgradient_at(raw)
        }
    }
}

/// A generated event sequence with its declared embedding parameters.
#[derive(Debug, Clone)]
pub struct OmpStream {
    pub problem: OmpProblem,
    pub events: Vec<RoundEvent>,
    pub planted: Planted,
}

/// The hidden structure a synthetic stream was generated from.
#[derive(Debug, Clone, PartialEq)]
pub enum Planted {
    /// Membership flags of the planted cut.
    Cut(Vec<bool>),
    /// `position[k]` of element `k` in the planted order.
    Permutation(Vec<usize>),
    /// The planted low-rank target.
    LowRank(RectMatrix),
    None,
}

fn check_noise(noise: f64) -> Result<()> {
    if (0.0..=0.5).contains(&noise) {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("noise rate must be in [0, 1/2], got {noise}")))
    }
}

fn random_distinct_pair(n: usize, rng: &mut ChaCha12Rng) -> (usize, usize) {
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// `+1` when exactly one endpoint is inside the cut, `−1` otherwise.
pub fn cut_label(cut: &[bool], i: usize, j: usize) -> i8 {
    if cut[i] != cut[j] {
        1
    } else {
        -1
    }
}

/// The ±1 target matrix of a cut.
pub fn cut_matrix(cut: &[bool]) -> RectMatrix {
    let n = cut.len();
    let mut w = RectMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            w.set(i, j, cut_label(cut, i, j) as f64);
        }
    }
    w
}

/// `+1` when `i` appears before `j` in the planted order, `−1` otherwise.
pub fn permutation_label(position: &[usize], i: usize, j: usize) -> i8 {
    if position[i] < position[j] {
        1
    } else {
        -1
    }
}

/// The ±1 target matrix of a permutation given by element positions.
pub fn permutation_matrix(position: &[usize]) -> RectMatrix {
    let n = position.len();
    let mut w = RectMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            w.set(i, j, permutation_label(position, i, j) as f64);
        }
    }
    w
}

/// Online max-cut: uniformly random distinct node pairs labelled by a planted
/// cut, flipped with the noise rate. The cut class is `(1, n)`-decomposable,
/// and the loss `|ŷ − y|/2` is (1/2)-Lipschitz.
pub fn maxcut_stream(n: usize, horizon: usize, noise: f64, seed: u64) -> Result<OmpStream> {
    if n < 2 {
        return Err(Error::InvalidParam("max-cut needs at least 2 nodes".into()));
    }
    check_noise(noise)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let cut: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    let events = (0..horizon)
        .map(|_| {
            let (i, j) = random_distinct_pair(n, &mut rng);
            let mut y = cut_label(&cut, i, j);
            if rng.random::<f64>() < noise {
                y = -y;
            }
            RoundEvent { i, j, outcome: Outcome::Sign(y) }
        })
        .collect();
    let problem = OmpProblem::new(n, n, 0.5, 1.0, n as f64, true)?;
    Ok(OmpStream { problem, events, planted: Planted::Cut(cut) })
}

/// Online gambling: random distinct team pairs labelled by a planted total
/// order, flipped with the noise rate. The decomposability caps are only
/// known up to constants; `c1`, `c2` scale the defaults `(ln n, n·ln n)`.
/// The ±1 order matrices flip sign under transposition, so the class embeds
/// through the non-symmetric block construction.
pub fn gambling_stream(
    n: usize,
    horizon: usize,
    noise: f64,
    seed: u64,
    c1: f64,
    c2: f64,
) -> Result<OmpStream> {
    if n < 2 {
        return Err(Error::InvalidParam("gambling needs at least 2 teams".into()));
    }
    check_noise(noise)?;
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::InvalidParam("cap multipliers must be positive".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    // Fisher-Yates over the element order, then invert to positions
    let mut order: Vec<usize> = (0..n).collect();
    for k in (1..n).rev() {
        let swap = rng.random_range(0..=k);
        order.swap(k, swap);
    }
    let mut position = vec![0usize; n];
    for (pos, &elem) in order.iter().enumerate() {
        position[elem] = pos;
    }
    let events = (0..horizon)
        .map(|_| {
            let (i, j) = random_distinct_pair(n, &mut rng);
            let mut y = permutation_label(&position, i, j);
            if rng.random::<f64>() < noise {
                y = -y;
            }
            RoundEvent { i, j, outcome: Outcome::Sign(y) }
        })
        .collect();
    let ln_n = (n as f64).ln();
    let problem = OmpProblem::new(n, n, 0.5, c1 * ln_n, c2 * n as f64 * ln_n, false)?;
    Ok(OmpStream { problem, events, planted: Planted::Permutation(position) })
}

/// Configuration of a synthetic collaborative-filtering stream.
#[derive(Debug, Clone, Copy)]
pub struct CfConfig {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub horizon: usize,
    /// Standard deviation of the additive rating noise; results are clamped
    /// back into `[−1, 1]`.
    pub noise: f64,
    pub seed: u64,
    /// Trace-norm cap `τ` of the target class; the embedding uses `2τ`.
    pub trace_cap: f64,
    pub loss: RatingLoss,
}

/// The embedding parameters of a collaborative-filtering class with
/// trace-norm cap `tau`: `(√(m+n), 2τ)`-decomposable.
pub fn cf_problem(rows: usize, cols: usize, trace_cap: f64, loss: RatingLoss) -> Result<OmpProblem> {
    let g = match loss {
        RatingLoss::Absolute => 1.0,
        RatingLoss::Squared => 4.0,
    };
    OmpProblem::new(rows, cols, g, ((rows + cols) as f64).sqrt(), 2.0 * trace_cap, false)
}

/// Online collaborative filtering: ratings of a planted low-rank target,
/// rescaled into `[−1, 1]` and capped in trace norm, with truncated Gaussian
/// noise.
pub fn cf_stream(cfg: &CfConfig) -> Result<OmpStream> {
    if cfg.rows == 0 || cfg.cols == 0 || cfg.rank == 0 {
        return Err(Error::InvalidParam("cf dimensions and rank must be positive".into()));
    }
    check_noise(cfg.noise)?;
    if !(cfg.trace_cap > 0.0) {
        return Err(Error::InvalidParam("trace cap must be positive".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut target = RectMatrix::zero(cfg.rows, cfg.cols);
    let u: Vec<f64> =
        (0..cfg.rows * cfg.rank).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let v: Vec<f64> =
        (0..cfg.cols * cfg.rank).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    for i in 0..cfg.rows {
        for j in 0..cfg.cols {
            let mut acc = 0.0;
            for k in 0..cfg.rank {
                acc += u[i * cfg.rank + k] * v[j * cfg.rank + k];
            }
            target.set(i, j, acc);
        }
    }
    let peak = target.max_abs_entry();
    if peak > 0.0 {
        target.scale_in_place(1.0 / peak);
    }
    // cap the trace norm; singular values of W are the positive eigenvalues
    // of its symmetrization, so ‖W‖_Tr = ‖sym(W)‖_Tr / 2
    let sym = crate::reduction::symmetrize_target(&target, false)?;
    let trace_norm = 0.5 * norms(&sym)?.trace;
    if trace_norm > cfg.trace_cap {
        target.scale_in_place(cfg.trace_cap / trace_norm);
    }
    let events = (0..cfg.horizon)
        .map(|_| {
            let i = rng.random_range(0..cfg.rows);
            let j = rng.random_range(0..cfg.cols);
            let mut y = target.get(i, j);
            if cfg.noise > 0.0 {
                y += cfg.noise * rng.sample::<f64, _>(StandardNormal);
            }
            RoundEvent {
                i,
                j,
                outcome: Outcome::Rating { y: y.clamp(-1.0, 1.0), kind: cfg.loss },
            }
        })
        .collect();
    let problem = cf_problem(cfg.rows, cfg.cols, cfg.trace_cap, cfg.loss)?;
    Ok(OmpStream { problem, events, planted: Planted::LowRank(target) })
}

/// Exhaustive-comparator caps.
pub const MAXCUT_EXHAUSTIVE_CAP: usize = 14;
pub const GAMBLING_EXHAUSTIVE_CAP: usize = 8;

/// Result of an exhaustive search over a finite comparator class, with the
/// best value and witness of every prefix.
#[derive(Debug, Clone)]
pub struct ExhaustiveComparator {
    /// `min_candidate Σ_{s≤t} ℓ_s(candidate)` for each prefix `t`.
    pub prefix_values: Vec<f64>,
    /// Index of a minimizing candidate per prefix.
    pub prefix_argmin: Vec<usize>,
    pub final_value: f64,
    pub final_argmin: usize,
}

fn exhaustive_prefix(
    events: &[RoundEvent],
    candidates: usize,
    predict: impl Fn(usize, usize, usize) -> f64,
) -> ExhaustiveComparator {
    let mut running = vec![0.0_f64; candidates];
    let mut prefix_values = Vec::with_capacity(events.len());
    let mut prefix_argmin = Vec::with_capacity(events.len());
    for ev in events {
        let mut best = f64::INFINITY;
        let mut best_idx = 0;
        for (c, acc) in running.iter_mut().enumerate() {
            *acc += ev.loss_at(predict(c, ev.i, ev.j));
            if *acc < best {
                best = *acc;
                best_idx = c;
            }
        }
        prefix_values.push(best);
        prefix_argmin.push(best_idx);
    }
    let final_value = prefix_values.last().copied().unwrap_or(0.0);
    let final_argmin = prefix_argmin.last().copied().unwrap_or(0);
    ExhaustiveComparator { prefix_values, prefix_argmin, final_value, final_argmin }
}

/// Cut membership flags encoded by a bitmask candidate index.
pub fn cut_from_index(n: usize, index: usize) -> Vec<bool> {
    (0..n).map(|k| index >> k & 1 == 1).collect()
}

/// Exhaustive minimum over all `2ⁿ` cut predictors. Exact because each round
/// loss is linear in the prediction, so the minimum over the convex hull is
/// attained at a vertex.
pub fn maxcut_comparator(events: &[RoundEvent], n: usize) -> Result<ExhaustiveComparator> {
    if n > MAXCUT_EXHAUSTIVE_CAP {
        return Err(Error::ComparatorSizeCap(n, MAXCUT_EXHAUSTIVE_CAP));
    }
    Ok(exhaustive_prefix(events, 1 << n, |c, i, j| {
        let side_i = c >> i & 1;
        let side_j = c >> j & 1;
        if side_i != side_j {
            1.0
        } else {
            -1.0
        }
    }))
}

/// All permutations of `0..n` as position vectors, in a deterministic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    permute(&mut order, 0, &mut out);
    out
}

fn permute(order: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == order.len() {
        let mut position = vec![0usize; order.len()];
        for (pos, &elem) in order.iter().enumerate() {
            position[elem] = pos;
        }
        out.push(position);
        return;
    }
    for swap in k..order.len() {
        order.swap(k, swap);
        permute(order, k + 1, out);
        order.swap(k, swap);
    }
}

/// Exhaustive minimum over all `n!` permutation predictors.
pub fn gambling_comparator(
    events: &[RoundEvent],
    n: usize,
) -> Result<(ExhaustiveComparator, Vec<Vec<usize>>)> {
    if n > GAMBLING_EXHAUSTIVE_CAP {
        return Err(Error::ComparatorSizeCap(n, GAMBLING_EXHAUSTIVE_CAP));
    }
    let perms = all_permutations(n);
    let cmp = exhaustive_prefix(events, perms.len(), |c, i, j| {
        permutation_label(&perms[c], i, j) as f64
    });
    Ok((cmp, perms))
}

/// Comparator delegated to the convex solver on the embedded problem (the
/// route exact enumeration cannot take, e.g. collaborative filtering): the
/// best offline decision of the reduced SDP game is extracted back into
/// predictions and charged the stream's losses.
#[derive(Debug, Clone)]
pub struct ConvexComparator {
    /// `Σ_{s≤t} ℓ_s(u_s)` for the extracted comparator predictions.
    pub omp_prefix: Vec<f64>,
    pub omp_value: f64,
    pub sdp: OfflineSolution,
}

pub fn convex_comparator(
    problem: &OmpProblem,
    events: &[RoundEvent],
    sdp_game: &GameTranscript,
    tol: f64,
) -> Result<ConvexComparator> {
    let sol = best_offline(&sdp_game.losses, &sdp_game.set, tol)?;
    let mut omp_prefix = Vec::with_capacity(events.len());
    let mut running = 0.0;
    for ev in events {
        let u = extract_prediction(&sol.minimizer, (ev.i, ev.j), problem)?;
        running += ev.loss_at(u);
        omp_prefix.push(running);
    }
    Ok(ConvexComparator {
        omp_value: omp_prefix.last().copied().unwrap_or(0.0),
        omp_prefix,
        sdp: sol,
    })
}

/// Embeds the decomposition of a comparator target into the reduced decision
/// set, reporting a cap violation if its witness exceeds the declared caps by
/// more than `1e-6`.
pub fn embed_comparator(
    target: &RectMatrix,
    problem: &OmpProblem,
) -> Result<crate::matrix::SymMatrix> {
    let d = decompose_sym(target, problem.symmetric)?;
    d.check_caps(problem.beta, problem.tau, 1e-6)?;
    Ok(embed_block_diag(&d))
}

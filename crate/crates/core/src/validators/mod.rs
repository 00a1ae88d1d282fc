//! Numerical verification of the library's underlying inequalities — the
//! executable theory suite. Every check samples seeded random instances,
//! asserts the inequality with an explicit tolerance, and reports the number
//! of violations together with the tightest observed margin, so the slack of
//! the constants can be inspected empirically.

pub mod gaussian;

use crate::error::{Error, Result};
use crate::ftrl::game::{attach_comparator, GameTranscript};
use crate::ftrl::sets::DecisionSet;
use crate::matrix::{frobenius_inner, sym_eig, SymMatrix};
use crate::reg::{logdet_hessian_quadform, logdet_reg, RegKind, RegularizerSpec};
use gaussian::{total_variation, total_variation_qmc, Gaussian};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::fmt;

/// Strong-convexity constant of the log-determinant against entrywise-ℓ₁
/// bounded losses: `s = 1/(1152·√e·g₁²·(β+ε)²)`.
pub fn logdet_loss_strong_convexity(g1: f64, beta: f64, epsilon: f64) -> f64 {
    let be = beta + epsilon;
    1.0 / (1152.0 * std::f64::consts::E.sqrt() * g1 * g1 * be * be)
}

/// Mixture-gap constant of the log-determinant: `δ²/(72·√e)` per unit of
/// `α(1−α)/2`.
fn mixture_gap(delta: f64) -> f64 {
    delta * delta / (72.0 * std::f64::consts::E.sqrt())
}

/// Outcome of one numerical check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// The tightest observed slack; negative values are violations.
    pub worst_margin: f64,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<24} samples={:<8} violations={:<4} worst_margin={:+.6e} tol={:.1e} {}",
            self.name,
            self.samples,
            self.violations,
            self.worst_margin,
            self.tolerance,
            if self.pass() { "PASS" } else { "FAIL" }
        )
    }
}

/// Tracks margins of an inequality family: a margin below `-tolerance`
/// counts as a violation.
struct MarginTracker {
    name: &'static str,
    tolerance: f64,
    samples: usize,
    violations: usize,
    worst: f64,
}

impl MarginTracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, tolerance, samples: 0, violations: 0, worst: f64::INFINITY }
    }

    fn observe(&mut self, margin: f64) {
        self.samples += 1;
        if margin < -self.tolerance {
            self.violations += 1;
        }
        if margin < self.worst {
            self.worst = margin;
        }
    }

    fn into_report(self, samples_label: usize) -> CheckReport {
        CheckReport {
            name: self.name.to_string(),
            samples: samples_label,
            violations: self.violations,
            worst_margin: if self.worst.is_finite() { self.worst } else { 0.0 },
            tolerance: self.tolerance,
        }
    }
}

fn random_sym(n: usize, scale: f64, rng: &mut ChaCha12Rng) -> SymMatrix {
    SymMatrix::from_fn(n, |_, _| rng.random_range(-scale..scale)).expect("finite")
}

/// Wishart-style positive definite sample `AᵀA/n + shift·E`.
fn random_pd(n: usize, shift: f64, rng: &mut ChaCha12Rng) -> SymMatrix {
    let a = random_sym(n, 1.0, rng);
    let sq = SymMatrix::new(n, a.matmul(&a).expect("square")).expect("finite");
    sq.scale(1.0 / n as f64)
        .add(&SymMatrix::identity(n).scale(shift))
        .expect("same order")
}

fn sample_in_set(set: &DecisionSet, scale: f64, rng: &mut ChaCha12Rng) -> Result<SymMatrix> {
    set.project(&random_sym(set.order(), scale, rng), 1e-11)
}

/// The worst-case sparse loss against a decision difference: all ℓ₁ mass on
/// the largest-magnitude entry of `d`, symmetrized.
fn worst_case_l1_loss(d: &SymMatrix, g1: f64) -> SymMatrix {
    let n = d.order();
    let (mut bi, mut bj, mut bv) = (0usize, 0usize, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            if d.get(i, j).abs() > bv.abs() {
                bi = i;
                bj = j;
                bv = d.get(i, j);
            }
        }
    }
    let mut data = vec![0.0; n * n];
    if bi == bj {
        data[bi * n + bi] = g1 * bv.signum();
    } else {
        data[bi * n + bj] = 0.5 * g1 * bv.signum();
        data[bj * n + bi] = 0.5 * g1 * bv.signum();
    }
    SymMatrix::new(n, data).expect("finite")
}

/// Curvature of the log-determinant Hessian: the quadratic form dominates
/// `(σ+ε)⁻²·‖W‖²_Sp` over the spectral ball, the smallest eigenvalue
/// `(λ_max+ε)⁻²` is attained on the top eigenvector, and the shifted
/// determinant stays inside `[ε^N, (2ε)^N]` when `ε = σ`.
pub fn check_hessian(samples: usize, seed: u64) -> Result<CheckReport> {
    let sigma = 1.0;
    let eps = sigma;
    let n = 5;
    let set = DecisionSet::SpectralBall { n, sigma };
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut tracker = MarginTracker::new("hessian", 1e-8);
    for _ in 0..samples {
        let x = sample_in_set(&set, 1.5, &mut rng)?;
        let w = random_sym(n, 1.0, &mut rng);
        let q = logdet_hessian_quadform(&x, &w, eps)?;
        let nw = crate::matrix::norms(&w)?;
        let spectral_x = crate::matrix::norms(&x)?.spectral;
        let lower = nw.spectral * nw.spectral / ((sigma + eps) * (sigma + eps));
        tracker.observe((q - lower) / lower.max(1e-12));
        // the smallest Hessian eigenvalue, hit exactly on the top eigenvector
        let eig = sym_eig(&x)?;
        let rank_one = SymMatrix::outer(&eig.vector(0), 1.0);
        let q_min = logdet_hessian_quadform(&x, &rank_one, eps)?;
        let expected = 1.0 / ((eig.max_value() + eps) * (eig.max_value() + eps));
        tracker.observe(-((q_min - expected).abs() / expected - 1e-8));
        // determinant range of the shifted matrix
        let log_det: f64 = eig.values().iter().map(|&l| (l + eps).ln()).sum();
        tracker.observe(log_det - n as f64 * eps.ln());
        tracker.observe(n as f64 * (2.0 * eps).ln() - log_det + 1e-9);
        let _ = spectral_x;
    }
    Ok(tracker.into_report(samples))
}

/// Mixture inequality of the log-determinant: for positive definite `X`, `Y`
/// whose largest relative entry gap is `δ`,
/// `−ln det(αX+(1−α)Y) ≤ −α·ln det X − (1−α)·ln det Y − (α(1−α)/2)·δ²/(72√e)`.
pub fn check_logdet_strong_convexity(samples: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut tracker = MarginTracker::new("logdet-strong-convexity", 1e-10);
    for k in 0..samples {
        let n = 2 + k % 5;
        let x = random_pd(n, 0.05, &mut rng);
        let y = random_pd(n, 0.05, &mut rng);
        let delta = entry_gap_ratio(&x, &y);
        let alpha = rng.random_range(0.0..1.0);
        let ld = |m: &SymMatrix| -> Result<f64> {
            Ok(sym_eig(m)?.values().iter().map(|l| l.ln()).sum())
        };
        let mix = x.scale(alpha).add(&y.scale(1.0 - alpha))?;
        let lhs = -ld(&mix)?;
        let rhs = -alpha * ld(&x)? - (1.0 - alpha) * ld(&y)?
            - 0.5 * alpha * (1.0 - alpha) * mixture_gap(delta);
        tracker.observe(rhs - lhs);
    }
    Ok(tracker.into_report(samples))
}

/// The largest entry gap of a pair, relative to the four diagonal entries it
/// touches.
pub fn entry_gap_ratio(x: &SymMatrix, y: &SymMatrix) -> f64 {
    let n = x.order();
    let mut delta = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let denom = x.get(i, i) + x.get(j, j) + y.get(i, i) + y.get(j, j);
            if denom > 0.0 {
                delta = delta.max((x.get(i, j) - y.get(i, j)).abs() / denom);
            }
        }
    }
    delta
}

/// Entry-gap bound: for symmetric `X`, `Y` with diagonals at most `β'` and
/// any loss with `‖vec(L)‖₁ ≤ g₁`, some entry pair satisfies
/// `|X_ij − Y_ij| ≥ |L•(X−Y)|/(4g₁β')·(X_ii+X_jj+Y_ii+Y_jj)`.
pub fn check_entry_gap(samples: usize, seed: u64) -> Result<CheckReport> {
    let beta_prime = 1.0;
    let g1 = 1.0;
    let n = 4;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut tracker = MarginTracker::new("entry-gap", 1e-12);
    for _ in 0..samples {
        let with_diag_caps = |rng: &mut ChaCha12Rng| {
            SymMatrix::from_fn(n, |i, j| {
                if i == j {
                    rng.random_range(0.0..beta_prime)
                } else {
                    rng.random_range(-1.0..1.0)
                }
            })
            .expect("finite")
        };
        let x = with_diag_caps(&mut rng);
        let y = with_diag_caps(&mut rng);
        let l = {
            let raw = random_sym(n, 1.0, &mut rng);
            raw.scale(g1 / raw.vec_l1_norm().max(1e-300))
        };
        let d = x.sub(&y)?;
        let factor = frobenius_inner(&l, &d)?.abs() / (4.0 * g1 * beta_prime);
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                let diag_sum = x.get(i, i) + x.get(j, j) + y.get(i, i) + y.get(j, j);
                best = best.max(d.get(i, j).abs() - factor * diag_sum);
            }
        }
        tracker.observe(best);
    }
    Ok(tracker.into_report(samples))
}

/// Strong convexity of the log-determinant with respect to the sparse loss
/// space, in both equivalent forms (mixture and first-order), with the
/// modulus `s = 1/(1152√e·g₁²·(β+ε)²)` at `ε = β`. One quarter of the samples
/// restrict to diagonal pairs (the vector case).
pub fn check_loss_strong_convexity(samples: usize, seed: u64) -> Result<CheckReport> {
    let n = 4;
    let beta = 1.0;
    let tau = 2.0;
    let g1 = 1.0;
    let eps = beta;
    let s = logdet_loss_strong_convexity(g1, beta, eps);
    let set = DecisionSet::Reduced { n, beta, tau };
    let diag_set = DecisionSet::DiagReduced { n, beta, tau };
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut tracker = MarginTracker::new("loss-strong-convexity", 1e-10);
    for k in 0..samples {
        let the_set = if k % 4 == 3 { &diag_set } else { &set };
        let x = sample_in_set(the_set, 1.0, &mut rng)?;
        let y = sample_in_set(the_set, 1.0, &mut rng)?;
        let d = x.sub(&y)?;
        let l = worst_case_l1_loss(&d, g1);
        let coupling = frobenius_inner(&l, &d)?;
        // mixture form
        let alpha = rng.random_range(0.0..1.0);
        let (rx, _) = logdet_reg(&x, eps)?;
        let (ry, gy) = logdet_reg(&y, eps)?;
        let mix = x.scale(alpha).add(&y.scale(1.0 - alpha))?;
        let (rmix, _) = logdet_reg(&mix, eps)?;
        let rhs = alpha * rx + (1.0 - alpha) * ry
            - 0.5 * s * alpha * (1.0 - alpha) * coupling * coupling;
        tracker.observe(rhs - rmix);
        // first-order form
        let rhs = ry + frobenius_inner(&gy, &d)? + 0.5 * s * coupling * coupling;
        tracker.observe(rx - rhs);
    }
    Ok(tracker.into_report(samples))
}

/// The leader-drift regret bound on a finished transcript:
/// `regret ≤ H₀/η + Σ_t L_t•(X_t − X_{t+1}) + 10·tol·T`.
pub fn check_ftl_btl(transcript: &mut GameTranscript) -> Result<CheckReport> {
    let h0 = regularizer_range_bound(&transcript.reg, &transcript.set, 64, 99)?;
    if transcript.comparator.is_none() {
        attach_comparator(transcript, 1e-8)?;
    }
    let regret = transcript.final_regret().expect("comparator attached");
    let mut drift = 0.0;
    for (t, l) in transcript.losses.iter().enumerate() {
        let step = transcript.decisions[t].sub(&transcript.decisions[t + 1])?;
        drift += frobenius_inner(l, &step)?;
    }
    let slack = 10.0 * transcript.solver_tol * transcript.horizon() as f64;
    let rhs = h0 / transcript.eta + drift + slack;
    let mut tracker = MarginTracker::new("ftl-btl", 0.0);
    tracker.observe(rhs - regret);
    Ok(tracker.into_report(1))
}

/// Range bound `max R − min R` over the set: the analytic cap where one is
/// known, otherwise the sampled range.
pub fn regularizer_range_bound(
    reg: &RegularizerSpec,
    set: &DecisionSet,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if let Some(h0) = analytic_range(reg, set) {
        return Ok(h0);
    }
    sampled_range(reg, set, samples, seed)
}

fn analytic_range(reg: &RegularizerSpec, set: &DecisionSet) -> Option<f64> {
    match (reg.kind, set) {
        // trace-capped sets: −ln det varies by at most τ/ε
        (RegKind::LogDet | RegKind::Burg, DecisionSet::TraceBall { tau, .. })
        | (RegKind::LogDet | RegKind::Burg, DecisionSet::Reduced { tau, .. })
        | (RegKind::LogDet | RegKind::Burg, DecisionSet::DiagReduced { tau, .. }) => {
            Some(tau / reg.epsilon)
        }
        (RegKind::LogDet, DecisionSet::SpectralBall { n, sigma }) => {
            Some(*n as f64 * ((sigma + reg.epsilon) / reg.epsilon).ln())
        }
        (RegKind::Frobenius, DecisionSet::FrobeniusBall { rho, .. }) => Some(0.5 * rho * rho),
        (RegKind::Frobenius, DecisionSet::TraceBall { tau, .. }) => Some(0.5 * tau * tau),
        (RegKind::Entropic, DecisionSet::TraceBall { n, tau }) => {
            let hi = (tau * tau.ln() - tau).max(0.0);
            let lo = if *tau >= *n as f64 {
                -(*n as f64)
            } else {
                tau * ((tau / *n as f64).ln() - 1.0)
            };
            Some(hi - lo)
        }
        _ => None,
    }
}

/// Sampled `max R − min R` over projected random points.
pub fn sampled_range(
    reg: &RegularizerSpec,
    set: &DecisionSet,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    let mut eval = |x: &SymMatrix| -> Result<()> {
        let (v, _) = reg.value_grad(x)?;
        hi = hi.max(v);
        lo = lo.min(v);
        Ok(())
    };
    eval(&set.project(&SymMatrix::zero(set.order()), 1e-11)?)?;
    eval(&set.interior_point())?;
    for _ in 0..samples {
        let x = sample_in_set(set, 2.0, &mut rng)?;
        eval(&x)?;
    }
    Ok(hi - lo)
}

/// The scalar tangent inequality
/// `e^{−x/2} − e^{−(1−x)/2} ≥ (e^{−1/4}/2)·(1−2x)` on `[0, ½]`.
pub fn check_elementary_ineq(grid_points: usize) -> Result<CheckReport> {
    if grid_points < 2 {
        return Err(Error::InvalidParam("need at least two grid points".into()));
    }
    let mut tracker = MarginTracker::new("elementary-ineq", 1e-12);
    let slope = (-0.25_f64).exp() / 2.0;
    for k in 0..grid_points {
        let x = 0.5 * k as f64 / (grid_points - 1) as f64;
        let lhs = (-0.5 * x).exp() - (-0.5 * (1.0 - x)).exp();
        tracker.observe(lhs - slope * (1.0 - 2.0 * x));
    }
    Ok(tracker.into_report(grid_points))
}

/// Total-variation lower bound for Gaussian pairs with entry gap `δ`:
/// `TV ≥ δ/(12·e^{1/4})`, plus the characteristic-function bound
/// `max_u |φ_P − φ_Q| ≤ 2·TV` and the closed-form differential entropy
/// against a Monte Carlo estimate.
pub fn check_tv_bound(samples: usize, seed: u64, dim: usize) -> Result<CheckReport> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParam(format!("dimension must be 1..=3, got {dim}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut tracker = MarginTracker::new("tv-bound", 1e-9);
    let entropy_checks = samples.min(32);
    for k in 0..samples {
        let a = Gaussian::new(random_pd(dim, 0.1, &mut rng))?;
        let b = Gaussian::new(random_pd(dim, 0.1, &mut rng))?;
        let pair = GaussianPair::new(a, b)?;
        let tv = match dim {
            1 | 2 => total_variation(&pair.first, &pair.second, 1e-3)?,
            _ => total_variation_qmc(&pair.first, &pair.second, 80_000)?,
        };
        let required = pair.delta / (12.0 * (0.25_f64).exp());
        tracker.observe(tv - required);
        // characteristic functions lower-bound the L1 density distance
        let mut worst_char = 0.0_f64;
        for _ in 0..16 {
            let u: Vec<f64> = (0..dim).map(|_| rng.random_range(-4.0..4.0)).collect();
            worst_char =
                worst_char.max((pair.first.characteristic(&u) - pair.second.characteristic(&u)).abs());
        }
        for u in pair.tight_directions() {
            worst_char = worst_char
                .max((pair.first.characteristic(&u) - pair.second.characteristic(&u)).abs());
        }
        tracker.observe(2.0 * tv - worst_char + 2e-3);
        // closed-form differential entropy vs Monte Carlo
        if k < entropy_checks {
            let draws = 400_000;
            let mc: f64 = (0..draws)
                .map(|_| -pair.first.log_pdf(&pair.first.sample(&mut rng)))
                .sum::<f64>()
                / draws as f64;
            tracker.observe(1e-2 - (mc - pair.first.entropy()).abs());
        }
    }
    Ok(tracker.into_report(samples))
}

/// A Gaussian pair with its relative entry gap.
pub struct GaussianPair {
    pub first: Gaussian,
    pub second: Gaussian,
    pub delta: f64,
}

impl GaussianPair {
    pub fn new(first: Gaussian, second: Gaussian) -> Result<Self> {
        let delta = entry_gap_ratio(first.cov(), second.cov());
        Ok(Self { first, second, delta })
    }

    /// The probe directions from the gap argument: `e_i`, `e_j` and
    /// `e_i + e_j` at the gap position, normalized by the mixture variance.
    fn tight_directions(&self) -> Vec<Vec<f64>> {
        let n = self.first.dim();
        let (mut bi, mut bj, mut best) = (0, 0, -1.0);
        let (s, t) = (self.first.cov(), self.second.cov());
        for i in 0..n {
            for j in 0..n {
                let denom = s.get(i, i) + s.get(j, j) + t.get(i, i) + t.get(j, j);
                if denom > 0.0 {
                    let r = (s.get(i, j) - t.get(i, j)).abs() / denom;
                    if r > best {
                        best = r;
                        bi = i;
                        bj = j;
                    }
                }
            }
        }
        let mut dirs = Vec::new();
        for pattern in [vec![bi], vec![bj], vec![bi, bj]] {
            let mut v = vec![0.0; n];
            for &k in &pattern {
                v[k] = 1.0;
            }
            let quad = |c: &SymMatrix| -> f64 {
                let mut q = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        q += v[i] * c.get(i, j) * v[j];
                    }
                }
                q
            };
            let denom = (quad(s) + quad(t)).sqrt();
            if denom > 0.0 {
                dirs.push(v.iter().map(|x| x / denom).collect());
            }
        }
        dirs
    }
}

/// Strong convexity of the negative entropy with respect to total
/// variation, on discrete distributions: the mixture entropy exceeds the
/// entropy average by the quadratic gap,
/// `H(αP+(1−α)Q) ≥ α·H(P) + (1−α)·H(Q) + α(1−α)·δ²`.
pub fn check_negentropy_convexity(samples: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut tracker = MarginTracker::new("negentropy-convexity", 1e-12);
    for k in 0..samples {
        let atoms = 2 + k % 63;
        let draw = |rng: &mut ChaCha12Rng| -> Vec<f64> {
            let raw: Vec<f64> = (0..atoms).map(|_| -rng.random_range(0.0_f64..1.0).max(1e-12).ln()).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / total).collect()
        };
        let p = draw(&mut rng);
        let q = draw(&mut rng);
        let delta: f64 = 0.5 * p.iter().zip(q.iter()).map(|(a, b)| (a - b).abs()).sum::<f64>();
        let alpha = rng.random_range(0.0..1.0);
        let entropy = |d: &[f64]| -> f64 {
            d.iter().map(|&x| if x > 0.0 { -x * x.ln() } else { 0.0 }).sum()
        };
        let mix: Vec<f64> =
            p.iter().zip(q.iter()).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
        let rhs = alpha * entropy(&p) + (1.0 - alpha) * entropy(&q)
            + alpha * (1.0 - alpha) * delta * delta;
        tracker.observe(entropy(&mix) - rhs);
    }
    Ok(tracker.into_report(samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ftrl::adversary::{AdversaryKind, LossAdversary};
    use crate::ftrl::game::run_sdp_game_stream;
    use crate::ftrl::sets::LossSpace;
    use crate::ftrl::solver::SolverOptions;

    #[test]
    fn hessian_trivial_cases() {
        // X = 0, ε = 1: the quadratic form of the identity is N
        let q = logdet_hessian_quadform(&SymMatrix::zero(5), &SymMatrix::identity(5), 1.0)
            .unwrap();
        assert!((q - 5.0).abs() <= 1e-12);
        // X = σE: the smallest Hessian eigenvalue (2σ)⁻² on a top eigenvector
        let sigma = 1.0;
        let x = SymMatrix::identity(3).scale(sigma);
        let mut v = vec![0.0; 3];
        v[0] = 1.0;
        let q = logdet_hessian_quadform(&x, &SymMatrix::outer(&v, 1.0), sigma).unwrap();
        assert!((q - 1.0 / (4.0 * sigma * sigma)).abs() <= 1e-12);
    }

    #[test]
    fn hessian_check_small_run() {
        let report = check_hessian(200, 17).unwrap();
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn logdet_strong_convexity_equality_cases() {
        // X = Y: both sides equal (δ = 0); α ∈ {0, 1}: equality as well
        let x = SymMatrix::from_diag(&[1.0, 2.0]);
        assert_eq!(entry_gap_ratio(&x, &x), 0.0);
        let report = check_logdet_strong_convexity(300, 3).unwrap();
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn entry_gap_small_run() {
        let report = check_entry_gap(500, 5).unwrap();
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn entry_gap_single_entry_is_tight_up_to_diagonal_factor() {
        // concentrate the difference and the loss on one off-diagonal entry
        let n = 3;
        let mut xd = vec![0.0; 9];
        xd[0 * 3 + 1] = 0.4;
        xd[1 * 3 + 0] = 0.4;
        for k in 0..3 {
            xd[k * 3 + k] = 1.0;
        }
        let x = SymMatrix::new(n, xd).unwrap();
        let y = SymMatrix::identity(n);
        let d = x.sub(&y).unwrap();
        let l = worst_case_l1_loss(&d, 1.0);
        let coupling = frobenius_inner(&l, &d).unwrap().abs();
        // |Δ_01| = 0.4 and the claim's factor uses the four unit diagonals
        let factor = coupling / (4.0 * 1.0 * 1.0);
        assert!((coupling - 0.4).abs() <= 1e-12);
        assert!(d.get(0, 1).abs() >= factor * 4.0 - 1e-12);
    }

    #[test]
    fn loss_strong_convexity_small_run() {
        let report = check_loss_strong_convexity(400, 7).unwrap();
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn elementary_ineq_endpoints() {
        // x = 1/2 gives 0 ≥ 0; x = 0 gives 0.39347 ≥ 0.38940
        let lhs_at_zero = 1.0 - (-0.5_f64).exp();
        let rhs_at_zero = (-0.25_f64).exp() / 2.0;
        assert!((lhs_at_zero - 0.39347).abs() < 1e-5);
        assert!((rhs_at_zero - 0.38940).abs() < 1e-5);
        assert!(lhs_at_zero > rhs_at_zero);
        let report = check_elementary_ineq(10_001).unwrap();
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn negentropy_small_run() {
        let report = check_negentropy_convexity(2_000, 11).unwrap();
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn tv_bound_small_run_dims_1_2() {
        for dim in [1, 2] {
            let report = check_tv_bound(20, 13, dim).unwrap();
            assert!(report.pass(), "{report}");
        }
    }

    #[test]
    fn ftl_btl_on_seeded_logdet_run() {
        let n = 4;
        let set = DecisionSet::Reduced { n, beta: 1.0, tau: 2.0 };
        let reg = RegularizerSpec::logdet(1.0).unwrap();
        let mut adv =
            LossAdversary::new(AdversaryKind::Iid, LossSpace::VecL1Ball { g1: 1.0 }, false, 23);
        let mut tr = run_sdp_game_stream(
            |_, x| adv.next_loss(x),
            64,
            &reg,
            &set,
            0.2,
            &LossSpace::VecL1Ball { g1: 1.0 },
            &SolverOptions::default(),
        )
        .unwrap();
        let report = check_ftl_btl(&mut tr).unwrap();
        assert!(report.pass(), "{report}");
        // zero-loss game: the right side stays nonnegative
        let mut tr = run_sdp_game_stream(
            |_, _| Ok(SymMatrix::zero(n)),
            3,
            &reg,
            &set,
            0.2,
            &LossSpace::VecL1Ball { g1: 1.0 },
            &SolverOptions::default(),
        )
        .unwrap();
        let report = check_ftl_btl(&mut tr).unwrap();
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn sampled_logdet_range_stays_under_analytic_cap() {
        let set = DecisionSet::Reduced { n: 4, beta: 1.0, tau: 2.0 };
        let reg = RegularizerSpec::logdet(1.0).unwrap();
        let sampled = sampled_range(&reg, &set, 200, 31).unwrap();
        let analytic = regularizer_range_bound(&reg, &set, 0, 0).unwrap();
        assert!((analytic - 2.0).abs() <= 1e-12);
        assert!(sampled <= analytic + 1e-9, "sampled {sampled} analytic {analytic}");
    }
}

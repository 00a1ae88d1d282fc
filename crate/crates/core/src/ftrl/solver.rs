//! The per-round FTRL subproblem and the offline comparator.
//!
//! The FTRL objective `F(X) = R(X) + η·C•X` is minimized by projected
//! gradient descent with a backtracking line search (Armijo 0.5/0.5),
//! warm-started from the previous decision. Convergence is certified by the
//! projected-gradient stationarity residual `‖X − P(X − γ∇F(X))‖_Fr`.
//!
//! When the regularizer is entropic and the set is a pure trace ball, the
//! minimizer has the closed form `e^{−μ}·exp(−ηC)` with `μ ≥ 0` picked so the
//! trace constraint holds; the solver takes that path unless disabled.

use crate::error::{Error, Result};
use crate::ftrl::sets::DecisionSet;
use crate::matrix::{frobenius_inner, sym_eig, SymMatrix};
use crate::reg::{RegKind, RegularizerSpec};

/// Options for the projected-gradient solver.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Iteration cap for the outer loop.
    pub max_iter: usize,
    /// Base stationarity tolerance, scaled at runtime by `1 + |F(X)|`.
    pub tol: f64,
    /// Tolerance handed to set projections.
    pub projection_tol: f64,
    /// Use the closed form for entropic regularization on a trace ball.
    pub entropic_fast_path: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            tol: 1e-8,
            projection_tol: 1e-11,
            entropic_fast_path: true,
        }
    }
}

/// Solves `argmin_{X ∈ set} R(X) + η·C•X`, warm-started from `warm` when
/// given. `C` is the cumulative loss matrix of the past rounds.
pub fn ftrl_step(
    cum_loss: &SymMatrix,
    reg: &RegularizerSpec,
    set: &DecisionSet,
    eta: f64,
    opts: &SolverOptions,
    warm: Option<&SymMatrix>,
) -> Result<SymMatrix> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParam(format!("learning rate must be positive, got {eta}")));
    }
    if cum_loss.order() != set.order() {
        return Err(Error::DimensionMismatch(cum_loss.order(), set.order()));
    }
    if opts.entropic_fast_path && reg.kind == RegKind::Entropic {
        if let DecisionSet::TraceBall { tau, .. } = *set {
            return entropic_trace_ball_step(cum_loss, eta, tau);
        }
    }
    let objective = |x: &SymMatrix| -> Result<(f64, SymMatrix)> {
        let (v, g) = reg.value_grad(x)?;
        Ok((
            v + eta * frobenius_inner(cum_loss, x)?,
            g.add_scaled(cum_loss, eta)?,
        ))
    };
    let start = match warm {
        Some(w) => w.clone(),
        None => set.interior_point(),
    };
    pgd_minimize(&objective, set, opts, &start)
}

/// Closed form for the entropic regularizer on `{X ⪰ 0, Tr X ≤ τ}`:
/// `X = exp(−ηC)`, scaled by `e^{−μ} = τ/Tr(exp(−ηC))` when the trace
/// constraint binds.
fn entropic_trace_ball_step(cum_loss: &SymMatrix, eta: f64, tau: f64) -> Result<SymMatrix> {
    let eig = sym_eig(cum_loss)?;
    // exponents are shifted by the max to avoid overflow; the shift is
    // absorbed into the scale factor
    let shift = eig.values().iter().fold(f64::INFINITY, |m, &l| m.min(l));
    let exps: Vec<f64> = eig.values().iter().map(|&l| (-eta * (l - shift)).exp()).collect();
    let total: f64 = exps.iter().sum();
    let unshifted_total = total * (-eta * shift).exp();
    let scale = if unshifted_total <= tau {
        (-eta * shift).exp()
    } else {
        tau / total
    };
    let vals: Vec<f64> = exps.iter().map(|&e| scale * e).collect();
    Ok(eig.apply_values(&vals))
}

/// Projected gradient descent with Armijo backtracking (shrink 0.5, slope
/// fraction 0.5). Returns the first iterate whose stationarity residual at
/// the final step size is below `tol·(1 + |F|)`.
pub fn pgd_minimize(
    objective: &dyn Fn(&SymMatrix) -> Result<(f64, SymMatrix)>,
    set: &DecisionSet,
    opts: &SolverOptions,
    start: &SymMatrix,
) -> Result<SymMatrix> {
    let mut x = set.project(start, opts.projection_tol)?;
    let (mut fx, mut gx) = objective(&x)?;
    let mut gamma = 1.0_f64;
    let mut last_residual = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let mut accepted = None;
        for _ in 0..60 {
            let y = set.project(&x.add_scaled(&gx, -gamma)?, opts.projection_tol)?;
            let d = y.sub(&x)?;
            let dn = d.frobenius_norm();
            let tol_eff = opts.tol * (1.0 + fx.abs());
            // the residual cannot drop below the projection's own noise
            let noise = 10.0 * opts.projection_tol * (1.0 + x.frobenius_norm());
            if dn <= tol_eff * gamma.min(1.0) + noise {
                return Ok(x);
            }
            let (fy, gy) = objective(&y)?;
            if fy <= fx + 0.5 * frobenius_inner(&gx, &d)? {
                last_residual = dn;
                accepted = Some((y, fy, gy));
                break;
            }
            gamma *= 0.5;
            if gamma < 1e-14 {
                // objective differences are at rounding noise; accept the
                // iterate if it is stationary to within the base tolerance
                if dn <= tol_eff.max(10.0 * noise) {
                    return Ok(x);
                }
                return Err(Error::SolverNoConvergence(opts.max_iter, dn));
            }
        }
        match accepted {
            Some((y, fy, gy)) => {
                x = y;
                fx = fy;
                gx = gy;
                gamma = (gamma * 2.0).min(1e6);
            }
            None => return Err(Error::SolverNoConvergence(opts.max_iter, last_residual)),
        }
    }
    Err(Error::SolverNoConvergence(opts.max_iter, last_residual))
}

/// The best offline decision and its cumulative loss.
#[derive(Debug, Clone)]
pub struct OfflineSolution {
    pub minimizer: SymMatrix,
    pub value: f64,
    /// Certified bound on the suboptimality (0 when the linear minimization
    /// has a closed form).
    pub gap_bound: f64,
}

/// Minimizes `ΣL_t • U` over the decision set.
///
/// For the trace, spectral and Frobenius balls (and for diagonal objectives
/// on the reduced sets) the linear minimization is solved in closed form from
/// the eigendecomposition of the summed loss. Otherwise a fixed-point
/// iteration `X ← P(X − γC)` runs until the variational-inequality
/// certificate `‖X − P(X−γC)‖·diam/γ` drops below `tol`.
pub fn best_offline(losses: &[SymMatrix], set: &DecisionSet, tol: f64) -> Result<OfflineSolution> {
    set.validate()?;
    let n = set.order();
    let mut total = SymMatrix::zero(n);
    for l in losses {
        total = total.add(l)?;
    }
    best_offline_total(&total, set, tol)
}

/// Same as [`best_offline`], taking the pre-summed loss matrix.
pub fn best_offline_total(
    total: &SymMatrix,
    set: &DecisionSet,
    tol: f64,
) -> Result<OfflineSolution> {
    if total.order() != set.order() {
        return Err(Error::DimensionMismatch(total.order(), set.order()));
    }
    if let Some(sol) = linear_minimum_closed_form(total, set)? {
        return Ok(sol);
    }
    linear_minimum_fixed_point(total, set, tol)
}

fn linear_minimum_closed_form(
    c: &SymMatrix,
    set: &DecisionSet,
) -> Result<Option<OfflineSolution>> {
    let n = set.order();
    match *set {
        DecisionSet::TraceBall { tau, .. } => {
            let eig = sym_eig(c)?;
            let lmin = eig.min_value();
            let (minimizer, value) = if lmin < 0.0 {
                (SymMatrix::outer(&eig.vector(n - 1), tau), tau * lmin)
            } else {
                (SymMatrix::zero(n), 0.0)
            };
            Ok(Some(OfflineSolution { minimizer, value, gap_bound: 0.0 }))
        }
        DecisionSet::SpectralBall { sigma, .. } => {
            let eig = sym_eig(c)?;
            let minimizer = eig.apply(|l| if l < 0.0 { sigma } else { 0.0 });
            let value = sigma * eig.values().iter().map(|&l| l.min(0.0)).sum::<f64>();
            Ok(Some(OfflineSolution { minimizer, value, gap_bound: 0.0 }))
        }
        DecisionSet::FrobeniusBall { rho, .. } => {
            let eig = sym_eig(c)?;
            let neg_norm = eig
                .values()
                .iter()
                .map(|&l| l.min(0.0) * l.min(0.0))
                .sum::<f64>()
                .sqrt();
            if neg_norm == 0.0 {
                return Ok(Some(OfflineSolution {
                    minimizer: SymMatrix::zero(n),
                    value: 0.0,
                    gap_bound: 0.0,
                }));
            }
            let minimizer = eig.apply(|l| rho * (-l).max(0.0) / neg_norm);
            Ok(Some(OfflineSolution { minimizer, value: -rho * neg_norm, gap_bound: 0.0 }))
        }
        DecisionSet::DiagReduced { beta, tau, .. } => {
            let sol = diag_cap_knapsack(&c.diag(), beta, tau);
            Ok(Some(sol))
        }
        DecisionSet::Reduced { beta, tau, .. } => {
            // diagonal objectives admit a diagonal minimizer on this set
            if c.max_abs_offdiag() == 0.0 {
                return Ok(Some(diag_cap_knapsack(&c.diag(), beta, tau)));
            }
            Ok(None)
        }
    }
}

/// Fractional-knapsack minimum of `Σ cᵢxᵢ` over `0 ≤ x ≤ β, Σx ≤ τ`.
fn diag_cap_knapsack(c: &[f64], beta: f64, tau: f64) -> OfflineSolution {
    let n = c.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| c[a].partial_cmp(&c[b]).expect("finite entries"));
    let mut x = vec![0.0; n];
    let mut budget = tau;
    let mut value = 0.0;
    for &i in &idx {
        if c[i] >= 0.0 || budget <= 0.0 {
            break;
        }
        let take = beta.min(budget);
        x[i] = take;
        value += c[i] * take;
        budget -= take;
    }
    OfflineSolution { minimizer: SymMatrix::from_diag(&x), value, gap_bound: 0.0 }
}

fn linear_minimum_fixed_point(
    c: &SymMatrix,
    set: &DecisionSet,
    tol: f64,
) -> Result<OfflineSolution> {
    const MAX_ITER: usize = 50_000;
    let diam = set.diameter_bound();
    let cnorm = c.frobenius_norm().max(1e-30);
    let mut gamma = (diam / cnorm).max(1.0);
    let mut x = set.project(&c.scale(-gamma), tol.min(1e-11))?;
    let mut gap = f64::INFINITY;
    for iter in 0..MAX_ITER {
        let y = set.project(&x.add_scaled(c, -gamma)?, tol.min(1e-11))?;
        let residual = y.sub(&x)?.frobenius_norm();
        gap = residual * diam / gamma;
        x = y;
        if gap <= tol {
            let value = frobenius_inner(c, &x)?;
            return Ok(OfflineSolution { minimizer: x, value, gap_bound: gap });
        }
        // a larger step improves the certificate once iterates settle
        if iter % 20 == 19 {
            gamma = (gamma * 2.0).min(1e7 * diam / cnorm);
        }
    }
    Err(Error::SolverNoConvergence(MAX_ITER, gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn random_sym(n: usize, rng: &mut ChaCha12Rng) -> SymMatrix {
        SymMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn logdet_step_with_zero_losses_is_identity_under_symmetric_caps() {
        // the log-det maximizer of reduced(β=1, τ=3) at order 3 is the identity
        let set = DecisionSet::Reduced { n: 3, beta: 1.0, tau: 3.0 };
        let reg = RegularizerSpec::logdet(1.0).unwrap();
        let x = ftrl_step(
            &SymMatrix::zero(3),
            &reg,
            &set,
            1.0,
            &SolverOptions::default(),
            None,
        )
        .unwrap();
        assert!(x.max_abs_diff(&SymMatrix::identity(3)) <= 1e-6, "{x:?}");
    }

    #[test]
    fn scalar_logdet_step_matches_clamped_closed_form() {
        // minimizer of ηc·x − ln(x+ε) over [0, β] is clamp(1/(ηc) − ε, 0, β)
        // for positive cumulative loss c
        let beta = 0.8;
        let set = DecisionSet::DiagReduced { n: 1, beta, tau: beta };
        let opts = SolverOptions::default();
        for (c, eta, eps) in [(1.0, 0.5, 0.25), (4.0, 1.0, 0.1), (0.2, 0.3, 2.0)] {
            let reg = RegularizerSpec::logdet(eps).unwrap();
            let cum = SymMatrix::from_diag(&[c]);
            let x = ftrl_step(&cum, &reg, &set, eta, &opts, None).unwrap();
            let expect = (1.0 / (eta * c) - eps).clamp(0.0, beta);
            assert!(
                (x.get(0, 0) - expect).abs() <= 1e-7,
                "c={c} eta={eta} eps={eps}: got {} expect {expect}",
                x.get(0, 0)
            );
        }
    }

    #[test]
    fn entropic_trace_ball_pgd_matches_closed_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let set = DecisionSet::TraceBall { n: 4, tau: 1.5 };
        let reg = RegularizerSpec::entropic();
        let cum = random_sym(4, &mut rng).scale(2.0);
        let eta = 0.7;
        // independent closed-form oracle: scale exp(−ηC) onto the trace ball
        let eig = sym_eig(&cum).unwrap();
        let exps: Vec<f64> = eig.values().iter().map(|&l| (-eta * l).exp()).collect();
        let total: f64 = exps.iter().sum();
        let scale = if total <= 1.5 { 1.0 } else { 1.5 / total };
        let oracle = eig.apply_values(&exps.iter().map(|&e| scale * e).collect::<Vec<_>>());

        let mut opts = SolverOptions::default();
        opts.entropic_fast_path = false;
        let via_pgd = ftrl_step(&cum, &reg, &set, eta, &opts, None).unwrap();
        assert!(
            via_pgd.max_abs_diff(&oracle) <= 1e-6,
            "diff {}",
            via_pgd.max_abs_diff(&oracle)
        );

        opts.entropic_fast_path = true;
        let via_fast = ftrl_step(&cum, &reg, &set, eta, &opts, None).unwrap();
        assert!(via_fast.max_abs_diff(&oracle) <= 1e-9);
    }

    #[test]
    fn frobenius_step_is_projection_of_scaled_losses() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let set = DecisionSet::FrobeniusBall { n: 4, rho: 1.0 };
        let cum = random_sym(4, &mut rng).scale(3.0);
        let eta = 0.25;
        let x = ftrl_step(
            &cum,
            &RegularizerSpec::frobenius(),
            &set,
            eta,
            &SolverOptions::default(),
            None,
        )
        .unwrap();
        // argmin ½‖X‖² + ηC•X = P(−ηC)
        let oracle = set.project(&cum.scale(-eta), 1e-12).unwrap();
        assert!(x.max_abs_diff(&oracle) <= 1e-7);
    }

    #[test]
    fn decisions_are_feasible() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let set = DecisionSet::Reduced { n: 5, beta: 0.7, tau: 2.0 };
        let reg = RegularizerSpec::logdet(0.7).unwrap();
        let opts = SolverOptions::default();
        let mut warm: Option<SymMatrix> = None;
        let mut cum = SymMatrix::zero(5);
        for _ in 0..5 {
            cum = cum.add(&random_sym(5, &mut rng)).unwrap();
            let x = ftrl_step(&cum, &reg, &set, 0.4, &opts, warm.as_ref()).unwrap();
            assert!(set.contains(&x, 1e-8).unwrap());
            warm = Some(x);
        }
    }

    #[test]
    fn best_offline_trace_saturates_on_negative_identity() {
        let set = DecisionSet::Reduced { n: 3, beta: 1.0, tau: 2.0 };
        let losses = [SymMatrix::identity(3).scale(-1.0)];
        let sol = best_offline(&losses, &set, 1e-8).unwrap();
        assert!((sol.value + 2.0).abs() <= 1e-7, "value {}", sol.value);
        assert!(set.contains(&sol.minimizer, 1e-7).unwrap());
    }

    #[test]
    fn best_offline_zero_losses() {
        let set = DecisionSet::TraceBall { n: 3, tau: 1.0 };
        let losses = [SymMatrix::identity(3), SymMatrix::identity(3).scale(-1.0)];
        let sol = best_offline(&losses, &set, 1e-9).unwrap();
        assert_eq!(sol.value, 0.0);
    }

    #[test]
    fn best_offline_diagonal_matches_grid_refinement_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(91);
        let set = DecisionSet::Reduced { n: 3, beta: 0.9, tau: 1.5 };
        let losses: Vec<SymMatrix> = (0..4)
            .map(|_| SymMatrix::from_diag(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]))
            .collect();
        let sol = best_offline(&losses, &set, 1e-9).unwrap();
        // grid refinement over diagonal candidates
        let mut c = [0.0; 3];
        for l in &losses {
            for k in 0..3 {
                c[k] += l.get(k, k);
            }
        }
        let mut best = f64::INFINITY;
        let mut grid_lo = [0.0; 3];
        let mut grid_hi = [0.9; 3];
        for _round in 0..6 {
            let steps = 12;
            let mut best_pt = grid_lo;
            for a in 0..=steps {
                for b in 0..=steps {
                    for d in 0..=steps {
                        let pt = [
                            grid_lo[0] + (grid_hi[0] - grid_lo[0]) * a as f64 / steps as f64,
                            grid_lo[1] + (grid_hi[1] - grid_lo[1]) * b as f64 / steps as f64,
                            grid_lo[2] + (grid_hi[2] - grid_lo[2]) * d as f64 / steps as f64,
                        ];
                        if pt.iter().sum::<f64>() > 1.5 {
                            continue;
                        }
                        let v: f64 = pt.iter().zip(c.iter()).map(|(x, ci)| x * ci).sum();
                        if v < best {
                            best = v;
                            best_pt = pt;
                        }
                    }
                }
            }
            for k in 0..3 {
                let half = (grid_hi[k] - grid_lo[k]) / steps as f64;
                grid_lo[k] = (best_pt[k] - half).max(0.0);
                grid_hi[k] = (best_pt[k] + half).min(0.9);
            }
        }
        assert!((sol.value - best).abs() <= 1e-4, "solver {} oracle {best}", sol.value);
    }

    #[test]
    fn best_offline_reduced_certifies_gap() {
        let mut rng = ChaCha12Rng::seed_from_u64(101);
        let set = DecisionSet::Reduced { n: 4, beta: 0.8, tau: 2.0 };
        let losses: Vec<SymMatrix> = (0..6).map(|_| random_sym(4, &mut rng)).collect();
        let sol = best_offline(&losses, &set, 1e-7).unwrap();
        assert!(sol.gap_bound <= 1e-7);
        assert!(set.contains(&sol.minimizer, 1e-7).unwrap());
        // sampled feasible points cannot beat the certified optimum
        let mut total = SymMatrix::zero(4);
        for l in &losses {
            total = total.add(l).unwrap();
        }
        for _ in 0..50 {
            let z = set.project(&random_sym(4, &mut rng).scale(2.0), 1e-11).unwrap();
            let v = frobenius_inner(&total, &z).unwrap();
            assert!(v >= sol.value - 1e-6, "sampled {v} beats {}", sol.value);
        }
    }
}

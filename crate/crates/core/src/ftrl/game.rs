//! The online SDP game loop and its transcript.
//!
//! A run owns its mutable state and is sequential by contract (round `t+1`
//! depends on round `t`); distinct runs are independent and may execute in
//! parallel.

use crate::error::{Error, Result};
use crate::ftrl::bounds::BoundVariant;
use crate::ftrl::sets::{DecisionSet, LossSpace, MEMBERSHIP_TOL};
use crate::ftrl::solver::{best_offline, ftrl_step, SolverOptions};
use crate::matrix::{frobenius_inner, SymMatrix};
use crate::reg::RegularizerSpec;

/// Best-offline data attached to a transcript.
#[derive(Debug, Clone)]
pub struct ComparatorTrack {
    pub minimizer: SymMatrix,
    /// `Σ_{s≤t} L_s • U` for the horizon comparator `U`.
    pub prefix: Vec<f64>,
    pub final_value: f64,
    pub gap_bound: f64,
}

/// Per-round record of a finished run.
#[derive(Debug, Clone)]
pub struct GameTranscript {
    pub set: DecisionSet,
    pub reg: RegularizerSpec,
    pub eta: f64,
    /// Base solver tolerance used for every round.
    pub solver_tol: f64,
    pub losses: Vec<SymMatrix>,
    /// Decisions `X_1 … X_{T+1}`; the extra final decision is the one the
    /// leader would play after the last loss.
    pub decisions: Vec<SymMatrix>,
    /// `L_t • X_t`.
    pub round_losses: Vec<f64>,
    /// Exact prefix sums of `round_losses`.
    pub cum_losses: Vec<f64>,
    pub comparator: Option<ComparatorTrack>,
}

impl GameTranscript {
    pub fn horizon(&self) -> usize {
        self.losses.len()
    }

    /// `regret[t] = cum_losses[t] − comparator.prefix[t]`, against the
    /// horizon comparator. Requires an attached comparator.
    pub fn regret(&self) -> Option<Vec<f64>> {
        let comp = self.comparator.as_ref()?;
        Some(
            self.cum_losses
                .iter()
                .zip(comp.prefix.iter())
                .map(|(c, p)| c - p)
                .collect(),
        )
    }

    pub fn final_regret(&self) -> Option<f64> {
        let comp = self.comparator.as_ref()?;
        Some(self.cum_losses.last().copied().unwrap_or(0.0) - comp.final_value)
    }

    /// The named bound evaluated at each round's horizon.
    pub fn bound_series(&self, variant: &BoundVariant) -> Vec<f64> {
        (1..=self.horizon()).map(|t| variant.regret_bound(t)).collect()
    }
}

/// Runs the FTRL game against a stream of loss matrices chosen by a callback
/// that may inspect the current decision (an adaptive adversary). Losses are
/// validated against the declared loss space.
pub fn run_sdp_game_stream(
    mut next_loss: impl FnMut(usize, &SymMatrix) -> Result<SymMatrix>,
    horizon: usize,
    reg: &RegularizerSpec,
    set: &DecisionSet,
    eta: f64,
    space: &LossSpace,
    opts: &SolverOptions,
) -> Result<GameTranscript> {
    set.validate()?;
    space.validate()?;
    let n = set.order();
    let mut cum = SymMatrix::zero(n);
    let mut losses = Vec::with_capacity(horizon);
    let mut decisions = Vec::with_capacity(horizon + 1);
    let mut round_losses = Vec::with_capacity(horizon);
    let mut cum_losses = Vec::with_capacity(horizon);
    let mut running = 0.0;
    for round in 0..horizon {
        let warm = decisions.last();
        let x = ftrl_step(&cum, reg, set, eta, opts, warm)?;
        let l = next_loss(round, &x)?;
        if !space.contains(&l, MEMBERSHIP_TOL)? {
            return Err(Error::LossOutOfSpace(round + 1));
        }
        running += frobenius_inner(&l, &x)?;
        round_losses.push(frobenius_inner(&l, &x)?);
        cum_losses.push(running);
        cum = cum.add(&l)?;
        losses.push(l);
        decisions.push(x);
    }
    // the be-the-leader decision after the final loss
    let x_last = ftrl_step(&cum, reg, set, eta, opts, decisions.last())?;
    decisions.push(x_last);
    Ok(GameTranscript {
        set: *set,
        reg: *reg,
        eta,
        solver_tol: opts.tol,
        losses,
        decisions,
        round_losses,
        cum_losses,
        comparator: None,
    })
}

/// Runs the game against a fixed loss sequence.
pub fn run_sdp_game(
    losses: &[SymMatrix],
    reg: &RegularizerSpec,
    set: &DecisionSet,
    eta: f64,
    space: &LossSpace,
    opts: &SolverOptions,
) -> Result<GameTranscript> {
    run_sdp_game_stream(
        |round, _x| Ok(losses[round].clone()),
        losses.len(),
        reg,
        set,
        eta,
        space,
        opts,
    )
}

/// Computes the horizon best-offline comparator and attaches its prefix sums
/// to the transcript.
pub fn attach_comparator(transcript: &mut GameTranscript, tol: f64) -> Result<()> {
    let sol = best_offline(&transcript.losses, &transcript.set, tol)?;
    let mut prefix = Vec::with_capacity(transcript.horizon());
    let mut running = 0.0;
    for l in &transcript.losses {
        running += frobenius_inner(l, &sol.minimizer)?;
        prefix.push(running);
    }
    transcript.comparator = Some(ComparatorTrack {
        minimizer: sol.minimizer,
        prefix,
        final_value: sol.value,
        gap_bound: sol.gap_bound,
    });
    Ok(())
}

/// Which comparator the regret series is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparatorMode {
    /// The horizon-`T` best offline decision (one solve).
    Horizon,
    /// The best offline decision of every prefix (one solve per round).
    PerPrefix,
}

/// Regret at every round. `Horizon` mode requires an attached comparator or
/// computes one; `PerPrefix` re-solves the offline problem per prefix.
pub fn regret_series(
    transcript: &mut GameTranscript,
    mode: ComparatorMode,
    tol: f64,
) -> Result<Vec<f64>> {
    match mode {
        ComparatorMode::Horizon => {
            if transcript.comparator.is_none() {
                attach_comparator(transcript, tol)?;
            }
            Ok(transcript.regret().expect("comparator attached"))
        }
        ComparatorMode::PerPrefix => {
            let mut series = Vec::with_capacity(transcript.horizon());
            for t in 1..=transcript.horizon() {
                let sol = best_offline(&transcript.losses[..t], &transcript.set, tol)?;
                series.push(transcript.cum_losses[t - 1] - sol.value);
            }
            Ok(series)
        }
    }
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
    fn zero_losses_zero_regret() {
        let set = DecisionSet::Reduced { n: 3, beta: 1.0, tau: 2.0 };
        let reg = RegularizerSpec::logdet(1.0).unwrap();
        let losses = vec![SymMatrix::zero(3); 4];
        let mut tr = run_sdp_game(
            &losses,
            &reg,
            &set,
            0.5,
            &LossSpace::VecL1Ball { g1: 1.0 },
            &SolverOptions::default(),
        )
        .unwrap();
        let regret = regret_series(&mut tr, ComparatorMode::Horizon, 1e-8).unwrap();
        for r in regret {
            assert!(r.abs() <= 1e-9);
        }
    }

    #[test]
    fn single_round_regret_is_nonnegative() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let set = DecisionSet::Reduced { n: 3, beta: 1.0, tau: 2.0 };
        let reg = RegularizerSpec::logdet(1.0).unwrap();
        let l = {
            let raw = random_sym(3, &mut rng);
            raw.scale(1.0 / raw.vec_l1_norm())
        };
        let mut tr = run_sdp_game(
            &[l],
            &reg,
            &set,
            0.5,
            &LossSpace::VecL1Ball { g1: 1.0 },
            &SolverOptions::default(),
        )
        .unwrap();
        let regret = regret_series(&mut tr, ComparatorMode::Horizon, 1e-9).unwrap();
        assert_eq!(regret.len(), 1);
        assert!(regret[0] >= -1e-7, "regret {regret:?}");
    }

    #[test]
    fn decisions_pass_membership() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let set = DecisionSet::Reduced { n: 4, beta: 0.8, tau: 2.0 };
        let reg = RegularizerSpec::logdet(0.8).unwrap();
        let losses: Vec<SymMatrix> = (0..10)
            .map(|_| {
                let raw = random_sym(4, &mut rng);
                raw.scale(1.0 / raw.vec_l1_norm())
            })
            .collect();
        let tr = run_sdp_game(
            &losses,
            &reg,
            &set,
            0.3,
            &LossSpace::VecL1Ball { g1: 1.0 },
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(tr.decisions.len(), 11);
        for x in &tr.decisions {
            assert!(set.contains(x, 1e-8).unwrap());
        }
        // cumulative loss is the exact prefix sum
        let mut running = 0.0;
        for (r, c) in tr.round_losses.iter().zip(tr.cum_losses.iter()) {
            running += r;
            assert_eq!(running, *c);
        }
    }

    #[test]
    fn out_of_space_loss_is_rejected() {
        let set = DecisionSet::Reduced { n: 2, beta: 1.0, tau: 1.0 };
        let reg = RegularizerSpec::logdet(1.0).unwrap();
        let losses = vec![SymMatrix::identity(2).scale(5.0)];
        let err = run_sdp_game(
            &losses,
            &reg,
            &set,
            0.5,
            &LossSpace::VecL1Ball { g1: 1.0 },
            &SolverOptions::default(),
        );
        assert!(matches!(err, Err(Error::LossOutOfSpace(1))));
    }

    #[test]
    fn per_prefix_regret_dominates_horizon_regret() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let set = DecisionSet::Reduced { n: 3, beta: 1.0, tau: 1.5 };
        let reg = RegularizerSpec::logdet(1.0).unwrap();
        let losses: Vec<SymMatrix> = (0..6)
            .map(|_| {
                let raw = random_sym(3, &mut rng);
                raw.scale(1.0 / raw.vec_l1_norm())
            })
            .collect();
        let mut tr = run_sdp_game(
            &losses,
            &reg,
            &set,
            0.4,
            &LossSpace::VecL1Ball { g1: 1.0 },
            &SolverOptions::default(),
        )
        .unwrap();
        let horizon = regret_series(&mut tr, ComparatorMode::Horizon, 1e-8).unwrap();
        let prefix = regret_series(&mut tr, ComparatorMode::PerPrefix, 1e-8).unwrap();
        for (h, p) in horizon.iter().zip(prefix.iter()) {
            assert!(p + 1e-6 >= *h, "prefix {p} horizon {h}");
        }
        // direct-summation oracle for the horizon series
        let comp = tr.comparator.as_ref().unwrap();
        let mut acc = 0.0;
        for (t, l) in tr.losses.iter().enumerate() {
            acc += frobenius_inner(l, &comp.minimizer).unwrap();
            assert!((tr.cum_losses[t] - acc - horizon[t]).abs() <= 1e-10);
        }
    }
}

//! Follow-the-regularized-leader over symmetric PSD decision sets: decision
//! sets and projections, the per-round solver, learning-rate schedules and
//! theoretical bounds, the game loop, and offline comparators.

pub mod adversary;
pub mod bounds;
pub mod game;
pub mod sets;
pub mod solver;

pub use adversary::{AdversaryKind, LossAdversary};
pub use bounds::{learning_rate, BoundParams, BoundVariant};
pub use game::{
    attach_comparator, regret_series, run_sdp_game, run_sdp_game_stream, ComparatorMode,
    ComparatorTrack, GameTranscript,
};
pub use sets::{DecisionSet, LossSpace, MEMBERSHIP_TOL};
pub use solver::{best_offline, best_offline_total, ftrl_step, OfflineSolution, SolverOptions};

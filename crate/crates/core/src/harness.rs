//! Run configuration and artifact plumbing shared by the command-line
//! front end, tests and foreign bindings: resolving a run, executing it,
//! and emitting the per-round CSV and the JSON summary.
//!
//! Outputs are deterministic for a fixed `(config, seed)` pair (the summary's
//! wall time excepted). The CSV uses `.` decimals with 17 significant digits.

use crate::error::{Error, Result};
use crate::ftrl::adversary::{AdversaryKind, LossAdversary};
use crate::ftrl::bounds::BoundVariant;
use crate::ftrl::game::{attach_comparator, run_sdp_game_stream};
use crate::ftrl::sets::{DecisionSet, LossSpace};
use crate::ftrl::solver::SolverOptions;
use crate::problems::{
    cf_stream, convex_comparator, gambling_comparator, gambling_stream, maxcut_comparator,
    maxcut_stream, read_ratings, CfConfig, OmpStream, RatingLoss,
};
use crate::reduction::{run_omp_game, OmpProblem};
use crate::reg::{RegKind, RegularizerSpec};
use crate::validators::{
    check_elementary_ineq, check_entry_gap, check_ftl_btl, check_hessian,
    check_logdet_strong_convexity, check_loss_strong_convexity, check_negentropy_convexity,
    check_tv_bound, CheckReport,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// The runnable game families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Log-determinant FTRL on the reduced set against ℓ₁-bounded losses.
    LogDetMain,
    /// Online gradient descent on a Frobenius ball.
    Frobenius,
    /// Entropic FTRL on a trace ball.
    Entropic,
    /// Log-determinant FTRL on a spectral ball against trace-norm losses.
    LogDetGeneral,
    /// The diagonal (vector) case of the reduced problem.
    Vector,
    MaxCut,
    Gambling,
    Cf,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::LogDetMain => "logdet-main",
            ProblemKind::Frobenius => "frobenius",
            ProblemKind::Entropic => "entropic",
            ProblemKind::LogDetGeneral => "logdet-general",
            ProblemKind::Vector => "vector",
            ProblemKind::MaxCut => "maxcut",
            ProblemKind::Gambling => "gambling",
            ProblemKind::Cf => "cf",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "logdet-main" => ProblemKind::LogDetMain,
            "frobenius" => ProblemKind::Frobenius,
            "entropic" => ProblemKind::Entropic,
            "logdet-general" => ProblemKind::LogDetGeneral,
            "vector" => ProblemKind::Vector,
            "maxcut" => ProblemKind::MaxCut,
            "gambling" => ProblemKind::Gambling,
            "cf" => ProblemKind::Cf,
            other => {
                return Err(Error::InvalidParam(format!(
                    "unknown problem `{other}` (expected one of logdet-main, frobenius, \
                     entropic, logdet-general, vector, maxcut, gambling, cf)"
                )))
            }
        })
    }

    fn is_omp(self) -> bool {
        matches!(self, ProblemKind::MaxCut | ProblemKind::Gambling | ProblemKind::Cf)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparatorChoice {
    /// Exhaustive per-prefix comparator (max-cut and gambling only).
    Exact,
    /// Horizon comparator from the convex solver.
    Convex,
    /// Skip comparator computation; the regret column degenerates to the
    /// cumulative loss.
    None,
}

impl ComparatorChoice {
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "exact" => ComparatorChoice::Exact,
            "convex" => ComparatorChoice::Convex,
            "none" => ComparatorChoice::None,
            other => {
                return Err(Error::InvalidParam(format!(
                    "unknown comparator mode `{other}` (expected exact, convex or none)"
                )))
            }
        })
    }
}

/// Raw, partially specified run configuration; unset fields fall back to
/// problem-specific defaults. Deserializable from the optional TOML config
/// file; command-line flags override file values.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Option<String>,
    pub order: Option<usize>,
    pub nodes: Option<usize>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub rank: Option<usize>,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
    pub noise: Option<f64>,
    pub reg: Option<String>,
    /// `"auto"` or an explicit positive value.
    pub eta: Option<String>,
    /// `"auto"` or an explicit positive value.
    pub epsilon: Option<String>,
    pub adversary: Option<String>,
    pub comparator: Option<String>,
    pub beta: Option<f64>,
    pub tau: Option<f64>,
    pub g1: Option<f64>,
    pub rho: Option<f64>,
    pub gamma2: Option<f64>,
    pub gamma_inf: Option<f64>,
    pub gamma1: Option<f64>,
    pub sigma: Option<f64>,
    pub trace_cap: Option<f64>,
    pub loss: Option<String>,
    pub ratings_file: Option<PathBuf>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::InvalidParam(format!("config file: {e}")))
    }

    /// Field-wise merge; values in `over` win.
    pub fn merged_with(mut self, over: RunConfig) -> RunConfig {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if over.$field.is_some() { self.$field = over.$field; })*
            };
        }
        take!(
            problem, order, nodes, rows, cols, rank, horizon, seed, noise, reg, eta, epsilon,
            adversary, comparator, beta, tau, g1, rho, gamma2, gamma_inf, gamma1, sigma,
            trace_cap, loss, ratings_file, c1, c2, out_csv, out_json
        );
        self
    }

    pub fn resolve(&self) -> Result<ResolvedRun> {
        let problem = ProblemKind::from_name(
            self.problem.as_deref().ok_or_else(|| Error::InvalidParam("problem is required".into()))?,
        )?;
        let order = self.order.unwrap_or(8);
        let nodes = self.nodes.unwrap_or(match problem {
            ProblemKind::MaxCut => 6,
            _ => 5,
        });
        let horizon = self.horizon.unwrap_or(128);
        if horizon == 0 {
            return Err(Error::InvalidParam("horizon must be at least 1".into()));
        }
        let parse_auto = |field: &Option<String>, what: &str| -> Result<Option<f64>> {
            match field.as_deref() {
                None | Some("auto") => Ok(None),
                Some(text) => {
                    let v: f64 = text.parse().map_err(|_| {
                        Error::InvalidParam(format!("{what} must be `auto` or a number, got `{text}`"))
                    })?;
                    if v > 0.0 {
                        Ok(Some(v))
                    } else {
                        Err(Error::InvalidParam(format!("{what} must be positive, got {v}")))
                    }
                }
            }
        };
        let reg = match self.reg.as_deref() {
            None => default_reg_kind(problem),
            Some(name) => RegKind::from_name(name)?,
        };
        let comparator = match self.comparator.as_deref() {
            None => ComparatorChoice::Convex,
            Some(name) => ComparatorChoice::from_name(name)?,
        };
        if comparator == ComparatorChoice::Exact
            && !matches!(problem, ProblemKind::MaxCut | ProblemKind::Gambling)
        {
            return Err(Error::InvalidParam(
                "the exact comparator is only available for maxcut and gambling".into(),
            ));
        }
        if reg == RegKind::Burg && problem != ProblemKind::Vector {
            return Err(Error::InvalidParam(
                "the burg regularizer applies to the vector problem only".into(),
            ));
        }
        let loss = match self.loss.as_deref() {
            None | Some("absolute") => RatingLoss::Absolute,
            Some("squared") => RatingLoss::Squared,
            Some(other) => {
                return Err(Error::InvalidParam(format!(
                    "unknown loss kind `{other}` (expected absolute or squared)"
                )))
            }
        };
        Ok(ResolvedRun {
            problem,
            order,
            nodes,
            rows: self.rows.unwrap_or(4),
            cols: self.cols.unwrap_or(4),
            rank: self.rank.unwrap_or(2),
            horizon,
            seed: self.seed.unwrap_or(0),
            noise: self.noise.unwrap_or(0.1),
            reg,
            eta: parse_auto(&self.eta, "eta")?,
            epsilon: parse_auto(&self.epsilon, "epsilon")?,
            adversary: match self.adversary.as_deref() {
                None | Some("iid") => AdversaryKind::Iid,
                Some("adaptive") => AdversaryKind::Adaptive,
                Some(other) => {
                    return Err(Error::InvalidParam(format!(
                        "unknown adversary `{other}` (expected iid or adaptive)"
                    )))
                }
            },
            comparator,
            beta: self.beta.unwrap_or(1.0),
            tau: self.tau.unwrap_or(order as f64 / 2.0),
            g1: self.g1.unwrap_or(1.0),
            rho: self.rho.unwrap_or(1.0),
            gamma2: self.gamma2.unwrap_or(1.0),
            gamma_inf: self.gamma_inf.unwrap_or(1.0),
            gamma1: self.gamma1.unwrap_or(1.0),
            sigma: self.sigma.unwrap_or(1.0),
            trace_cap: self.trace_cap.unwrap_or(2.0),
            loss,
            ratings_file: self.ratings_file.clone(),
            c1: self.c1.unwrap_or(1.0),
            c2: self.c2.unwrap_or(1.0),
            out_csv: self.out_csv.clone(),
            out_json: self.out_json.clone(),
        })
    }
}

/// A fully specified run.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub problem: ProblemKind,
    pub order: usize,
    pub nodes: usize,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub horizon: usize,
    pub seed: u64,
    pub noise: f64,
    pub reg: RegKind,
    pub eta: Option<f64>,
    pub epsilon: Option<f64>,
    pub adversary: AdversaryKind,
    pub comparator: ComparatorChoice,
    pub beta: f64,
    pub tau: f64,
    pub g1: f64,
    pub rho: f64,
    pub gamma2: f64,
    pub gamma_inf: f64,
    pub gamma1: f64,
    pub sigma: f64,
    pub trace_cap: f64,
    pub loss: RatingLoss,
    pub ratings_file: Option<PathBuf>,
    pub c1: f64,
    pub c2: f64,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
}

fn default_reg_kind(problem: ProblemKind) -> RegKind {
    match problem {
        ProblemKind::Frobenius => RegKind::Frobenius,
        ProblemKind::Entropic => RegKind::Entropic,
        ProblemKind::Vector => RegKind::Burg,
        _ => RegKind::LogDet,
    }
}

/// One CSV row of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRow {
    pub round: usize,
    pub loss: f64,
    pub cum_loss: f64,
    pub comparator_cum: f64,
    pub regret: f64,
    pub bound: f64,
}

/// JSON summary of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub final_regret: f64,
    pub bound: f64,
    pub ratio: f64,
    pub eta: f64,
    pub epsilon: Option<f64>,
    pub s: f64,
    pub h0: f64,
    pub seed: u64,
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub rows: Vec<RoundRow>,
    pub summary: RunSummary,
}

impl ResolvedRun {
    /// The named bound variant governing this run's bound column and
    /// automatic learning rate.
    pub fn bound_variant(&self) -> Result<BoundVariant> {
        let n = self.order;
        Ok(match self.problem {
            ProblemKind::Frobenius => BoundVariant::Frobenius { rho: self.rho, gamma2: self.gamma2 },
            ProblemKind::Entropic => {
                BoundVariant::Entropic { tau: self.tau, gamma_inf: self.gamma_inf, n }
            }
            ProblemKind::LogDetGeneral => {
                BoundVariant::LogDetGeneral { sigma: self.sigma, gamma1: self.gamma1, n }
            }
            ProblemKind::Vector => {
                BoundVariant::VectorLogDet { g1: self.g1, beta: self.beta, tau: self.tau }
            }
            ProblemKind::LogDetMain => match self.reg {
                RegKind::Entropic => BoundVariant::EntropicReduced {
                    beta: self.beta,
                    tau: self.tau,
                    gamma: self.g1 * self.g1,
                    n,
                },
                _ => BoundVariant::LogDetMain { g1: self.g1, beta: self.beta, tau: self.tau },
            },
            ProblemKind::MaxCut | ProblemKind::Gambling | ProblemKind::Cf => {
                let problem = self.omp_problem()?;
                let g1 = 4.0 * problem.lipschitz;
                let n = problem.sdp_order();
                match self.reg {
                    RegKind::Entropic => BoundVariant::EntropicReduced {
                        beta: problem.beta,
                        tau: problem.tau,
                        // the reduction's 4-entry losses have Tr(L²) ≤ 4G²
                        gamma: 4.0 * problem.lipschitz * problem.lipschitz,
                        n,
                    },
                    _ => BoundVariant::LogDetMain { g1, beta: problem.beta, tau: problem.tau },
                }
            }
        })
    }

    fn omp_problem(&self) -> Result<OmpProblem> {
        match self.problem {
            ProblemKind::MaxCut => {
                Ok(OmpProblem::new(self.nodes, self.nodes, 0.5, 1.0, self.nodes as f64, true)?)
            }
            ProblemKind::Gambling => {
                let ln_n = (self.nodes as f64).ln();
                Ok(OmpProblem::new(
                    self.nodes,
                    self.nodes,
                    0.5,
                    self.c1 * ln_n,
                    self.c2 * self.nodes as f64 * ln_n,
                    false,
                )?)
            }
            ProblemKind::Cf => crate::problems::cf_problem(self.rows, self.cols, self.trace_cap, self.loss),
            _ => Err(Error::InvalidParam("not a matrix-prediction problem".into())),
        }
    }

    fn omp_stream(&self) -> Result<OmpStream> {
        match self.problem {
            ProblemKind::MaxCut => maxcut_stream(self.nodes, self.horizon, self.noise, self.seed),
            ProblemKind::Gambling => {
                gambling_stream(self.nodes, self.horizon, self.noise, self.seed, self.c1, self.c2)
            }
            ProblemKind::Cf => match &self.ratings_file {
                Some(path) => {
                    let events = read_ratings(path, self.rows, self.cols, self.loss)?;
                    Ok(OmpStream {
                        problem: self.omp_problem()?,
                        events,
                        planted: crate::problems::Planted::None,
                    })
                }
                None => cf_stream(&CfConfig {
                    rows: self.rows,
                    cols: self.cols,
                    rank: self.rank,
                    horizon: self.horizon,
                    noise: self.noise,
                    seed: self.seed,
                    trace_cap: self.trace_cap,
                    loss: self.loss,
                }),
            },
            _ => Err(Error::InvalidParam("not a matrix-prediction problem".into())),
        }
    }

    fn regularizer(&self, variant: &BoundVariant) -> Result<RegularizerSpec> {
        let epsilon = self.epsilon.or(variant.auto_epsilon()).unwrap_or(self.beta);
        match self.reg {
            RegKind::Frobenius => Ok(RegularizerSpec::frobenius()),
            RegKind::Entropic => Ok(RegularizerSpec::entropic()),
            RegKind::LogDet => RegularizerSpec::logdet(epsilon),
            RegKind::Burg => RegularizerSpec::burg(epsilon),
        }
    }
}

/// Executes a resolved run and assembles its artifacts (no file I/O).
pub fn execute_run(cfg: &ResolvedRun) -> Result<RunArtifacts> {
    let start = std::time::Instant::now();
    let variant = cfg.bound_variant()?;
    let eta = cfg.eta.unwrap_or_else(|| variant.auto_eta(cfg.horizon));
    let reg = cfg.regularizer(&variant)?;
    let opts = SolverOptions::default();
    let (rows, final_regret, bound_scale) = if cfg.problem.is_omp() {
        run_omp(cfg, &variant, eta, &reg, &opts)?
    } else {
        run_sdp(cfg, &variant, eta, &reg, &opts)?
    };
    let bound = bound_scale * variant.regret_bound(cfg.horizon);
    let summary = RunSummary {
        final_regret,
        bound,
        ratio: final_regret / bound,
        eta,
        epsilon: match reg.kind {
            RegKind::LogDet | RegKind::Burg => Some(reg.epsilon),
            _ => None,
        },
        s: variant.strong_convexity(),
        h0: variant.regularizer_range(),
        seed: cfg.seed,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok(RunArtifacts { rows, summary })
}

fn run_sdp(
    cfg: &ResolvedRun,
    variant: &BoundVariant,
    eta: f64,
    reg: &RegularizerSpec,
    opts: &SolverOptions,
) -> Result<(Vec<RoundRow>, f64, f64)> {
    let n = cfg.order;
    let (set, space, diagonal) = match cfg.problem {
        ProblemKind::Frobenius => (
            DecisionSet::FrobeniusBall { n, rho: cfg.rho },
            LossSpace::FroBall { gamma2: cfg.gamma2 },
            false,
        ),
        ProblemKind::Entropic => (
            DecisionSet::TraceBall { n, tau: cfg.tau },
            LossSpace::SpectralBall { gamma_inf: cfg.gamma_inf },
            false,
        ),
        ProblemKind::LogDetGeneral => (
            DecisionSet::SpectralBall { n, sigma: cfg.sigma },
            LossSpace::TraceBall { gamma1: cfg.gamma1 },
            false,
        ),
        ProblemKind::LogDetMain => (
            DecisionSet::Reduced { n, beta: cfg.beta, tau: cfg.tau },
            LossSpace::VecL1Ball { g1: cfg.g1 },
            false,
        ),
        ProblemKind::Vector => (
            DecisionSet::DiagReduced { n, beta: cfg.beta, tau: cfg.tau },
            LossSpace::VecL1Ball { g1: cfg.g1 },
            true,
        ),
        _ => unreachable!("OMP problems take the other path"),
    };
    let mut adversary = LossAdversary::new(cfg.adversary, space, diagonal, cfg.seed);
    let mut transcript = run_sdp_game_stream(
        |_, x| adversary.next_loss(x),
        cfg.horizon,
        reg,
        &set,
        eta,
        &space,
        opts,
    )?;
    if cfg.comparator == ComparatorChoice::Convex {
        attach_comparator(&mut transcript, 1e-6)?;
    }
    let comp_prefix: Vec<f64> = match &transcript.comparator {
        Some(c) => c.prefix.clone(),
        None => vec![0.0; cfg.horizon],
    };
    let rows = assemble_rows(
        &transcript.round_losses,
        &transcript.cum_losses,
        &comp_prefix,
        variant,
        1.0,
    );
    let final_regret = rows.last().map(|r| r.regret).unwrap_or(0.0);
    Ok((rows, final_regret, 1.0))
}

fn run_omp(
    cfg: &ResolvedRun,
    variant: &BoundVariant,
    eta: f64,
    reg: &RegularizerSpec,
    opts: &SolverOptions,
) -> Result<(Vec<RoundRow>, f64, f64)> {
    let stream = cfg.omp_stream()?;
    let (omp, sdp) = run_omp_game(&stream.problem, &stream.events, reg, eta, opts)?;
    let comp_prefix: Vec<f64> = match cfg.comparator {
        ComparatorChoice::None => vec![0.0; cfg.horizon],
        ComparatorChoice::Exact => match cfg.problem {
            ProblemKind::MaxCut => maxcut_comparator(&stream.events, cfg.nodes)?.prefix_values,
            ProblemKind::Gambling => {
                gambling_comparator(&stream.events, cfg.nodes)?.0.prefix_values
            }
            _ => unreachable!("validated at resolve time"),
        },
        ComparatorChoice::Convex => {
            convex_comparator(&stream.problem, &stream.events, &sdp, 1e-6)?.omp_prefix
        }
    };
    // the reduction halves the embedded game's bound
    let rows = assemble_rows(&omp.round_losses, &omp.cum_losses, &comp_prefix, variant, 0.5);
    let final_regret = rows.last().map(|r| r.regret).unwrap_or(0.0);
    Ok((rows, final_regret, 0.5))
}

fn assemble_rows(
    losses: &[f64],
    cums: &[f64],
    comp: &[f64],
    variant: &BoundVariant,
    bound_scale: f64,
) -> Vec<RoundRow> {
    (0..losses.len())
        .map(|t| RoundRow {
            round: t + 1,
            loss: losses[t],
            cum_loss: cums[t],
            comparator_cum: comp[t],
            regret: cums[t] - comp[t],
            bound: bound_scale * variant.regret_bound(t + 1),
        })
        .collect()
}

/// One decimal value, `.`-separated, 17 significant digits, locale-free.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{:.16e}", x)
    }
}

pub fn csv_text(rows: &[RoundRow]) -> String {
    let mut out = String::from("round,loss,cum_loss,comparator_cum,regret,bound\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.round,
            format_value(r.loss),
            format_value(r.cum_loss),
            format_value(r.comparator_cum),
            format_value(r.regret),
            format_value(r.bound),
        ));
    }
    out
}

pub fn write_artifacts(cfg: &ResolvedRun, artifacts: &RunArtifacts) -> Result<()> {
    if let Some(path) = &cfg.out_csv {
        std::fs::write(path, csv_text(&artifacts.rows))?;
    }
    if let Some(path) = &cfg.out_json {
        let mut text = serde_json::to_string_pretty(&artifacts.summary)
            .map_err(|e| Error::InvalidParam(format!("summary serialization: {e}")))?;
        text.push('\n');
        std::fs::write(path, text)?;
    }
    Ok(())
}

/// Regret at a list of ascending horizons plus the fitted log-log slope.
#[derive(Debug, Clone)]
pub struct BenchResult {
    /// `(horizon, final_regret, bound, ratio)` per horizon.
    pub rows: Vec<(usize, f64, f64, f64)>,
    /// Least-squares slope of `ln regret` against `ln T`; absent when any
    /// regret is non-positive.
    pub slope: Option<f64>,
}

pub fn execute_bench(cfg: &ResolvedRun, horizons: &[usize]) -> Result<BenchResult> {
    if horizons.is_empty() || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParam("horizons must be a strictly ascending list".into()));
    }
    // independent horizons run in parallel; assembly stays ordered
    let results: Vec<Result<RunArtifacts>> = std::thread::scope(|scope| {
        let handles: Vec<_> = horizons
            .iter()
            .map(|&t| {
                let mut sub = cfg.clone();
                sub.horizon = t;
                sub.out_csv = None;
                sub.out_json = None;
                scope.spawn(move || execute_run(&sub))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
    });
    let mut rows = Vec::with_capacity(horizons.len());
    for (t, result) in horizons.iter().zip(results) {
        let artifacts = result?;
        rows.push((
            *t,
            artifacts.summary.final_regret,
            artifacts.summary.bound,
            artifacts.summary.ratio,
        ));
    }
    Ok(BenchResult { slope: fit_loglog_slope(&rows), rows })
}

fn fit_loglog_slope(rows: &[(usize, f64, f64, f64)]) -> Option<f64> {
    if rows.len() < 2 || rows.iter().any(|&(_, regret, _, _)| regret <= 0.0) {
        return None;
    }
    let pts: Vec<(f64, f64)> =
        rows.iter().map(|&(t, regret, _, _)| ((t as f64).ln(), regret.ln())).collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

pub fn bench_csv_text(result: &BenchResult) -> String {
    let mut out = String::from("horizon,regret,bound,ratio\n");
    for &(t, regret, bound, ratio) in &result.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            t,
            format_value(regret),
            format_value(bound),
            format_value(ratio)
        ));
    }
    out
}

/// The named validation suites.
pub const SUITES: &[&str] = &[
    "hessian",
    "logdet-strong-convexity",
    "entry-gap",
    "loss-strong-convexity",
    "ftl-btl",
    "elementary-ineq",
    "tv-bound",
    "negentropy",
    "all",
];

fn default_samples(suite: &str) -> usize {
    match suite {
        "hessian" => 1_000,
        "logdet-strong-convexity" => 10_000,
        "entry-gap" => 10_000,
        "loss-strong-convexity" => 10_000,
        "ftl-btl" => 256,
        "elementary-ineq" => 1_000_000,
        "tv-bound" => 1_000,
        "negentropy" => 100_000,
        _ => 0,
    }
}

/// Runs one suite (or all of them) with the given sample override.
pub fn run_suite(suite: &str, samples: Option<usize>, seed: u64) -> Result<Vec<CheckReport>> {
    let single = |name: &str| -> Result<CheckReport> {
        let count = samples.unwrap_or_else(|| default_samples(name)).max(2);
        match name {
            "hessian" => check_hessian(count, seed),
            "logdet-strong-convexity" => check_logdet_strong_convexity(count, seed),
            "entry-gap" => check_entry_gap(count, seed),
            "loss-strong-convexity" => check_loss_strong_convexity(count, seed),
            "ftl-btl" => ftl_btl_suite(count, seed),
            "elementary-ineq" => check_elementary_ineq(count),
            "tv-bound" => {
                let half = (count / 2).max(1);
                let mut report = check_tv_bound(half, seed, 1)?;
                let second = check_tv_bound(count - half, seed + 1, 2)?;
                report.samples += second.samples;
                report.violations += second.violations;
                report.worst_margin = report.worst_margin.min(second.worst_margin);
                Ok(report)
            }
            "negentropy" => check_negentropy_convexity(count, seed),
            other => Err(Error::UnknownSuite(other.to_string())),
        }
    };
    match suite {
        "all" => SUITES[..SUITES.len() - 1].iter().map(|name| single(name)).collect(),
        name if SUITES.contains(&name) => Ok(vec![single(name)?]),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

/// The leader-drift check on a fresh seeded log-determinant run.
fn ftl_btl_suite(horizon: usize, seed: u64) -> Result<CheckReport> {
    let n = 4;
    let set = DecisionSet::Reduced { n, beta: 1.0, tau: 2.0 };
    let variant = BoundVariant::LogDetMain { g1: 1.0, beta: 1.0, tau: 2.0 };
    let reg = RegularizerSpec::logdet(1.0)?;
    let space = LossSpace::VecL1Ball { g1: 1.0 };
    let mut adversary = LossAdversary::new(AdversaryKind::Iid, space, false, seed);
    let mut transcript = run_sdp_game_stream(
        |_, x| adversary.next_loss(x),
        horizon,
        &reg,
        &set,
        variant.auto_eta(horizon),
        &space,
        &SolverOptions::default(),
    )?;
    check_ftl_btl(&mut transcript)
}

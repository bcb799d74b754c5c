//! Checks of when mixing two optimal classifiers strictly helps, Rademacher
//! complexity estimation for strategic loss classes, closed-form
//! generalisation bounds, and the excess-risk convergence experiment.

use std::fmt::Write as _;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::response::{admissibility_check, best_response_det, expensive_set, nonsimultaneous_set, ResponseMap};
use crate::risk::{decompose_pair_mixture, hypothesis_errors};
use crate::rng::{self, tags};
use crate::serm::{deterministic_risks, population_optima_on_grid, simplex_grid, GridResponses, SearchSpace};
use crate::world::{CellSampler, Dataset, Hypothesis, HypothesisClass, World};

/// Strategic risks at or below this are treated as zero.
pub const ZERO_RISK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub pair: (usize, usize),
    pub names: (String, String),
    pub e_sym_neg: f64,
    pub e_sym_pos: f64,
    pub n_neg: f64,
    pub n_pos: f64,
    pub conditions_hold: bool,
    pub strict: bool,
    pub admissible: bool,
    pub pair_risk: f64,
    /// `R*_Δ - R_{Δ_Q}(Q)` for `Q = U{f, f'}`.
    pub risk_gap: f64,
    /// Right-hand side of the pair decomposition identity.
    pub identity_rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConditionReason {
    ZeroOptimalRisk,
    SingletonOptimum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub r_star: f64,
    pub f_star: Vec<usize>,
    /// Best risk over the simplex grid used to locate optima.
    pub grid_optimum: f64,
    pub reason: Option<ConditionReason>,
    pub reports: Vec<ConditionReport>,
}

impl Theorem1Report {
    /// Pairs whose conditions hold strictly on an admissible pair.
    pub fn witnesses(&self) -> impl Iterator<Item = &ConditionReport> {
        self.reports.iter().filter(|r| r.conditions_hold && r.strict && r.admissible)
    }
}

/// Evaluates the mass conditions under which the uniform mixture of two
/// optimal classifiers beats both: `P(E ⊕ E', +1) ≤ P(E ⊕ E', -1)` and
/// `P(N, +1) ≤ P(N, -1)`, one of them strict. One report per unordered
/// pair of optimal hypotheses.
pub fn theorem1_check(world: &World, class: &HypothesisClass, k: u32) -> Result<Theorem1Report> {
    let responses = GridResponses::new(world, class, SearchSpace::Grid(k).grid(class.len())?)?;
    let opt = population_optima_on_grid(world, class, &responses)?;
    let mut out = Theorem1Report {
        r_star: opt.r_star,
        f_star: opt.f_star.clone(),
        grid_optimum: opt.mix.objective,
        reason: None,
        reports: Vec::new(),
    };
    if opt.r_star <= ZERO_RISK_TOL {
        out.reason = Some(ConditionReason::ZeroOptimalRisk);
        return Ok(out);
    }
    if opt.f_star.len() < 2 {
        out.reason = Some(ConditionReason::SingletonOptimum);
        return Ok(out);
    }
    let pairs: Vec<(usize, usize)> = opt
        .f_star
        .iter()
        .enumerate()
        .flat_map(|(a, &i)| opt.f_star[a + 1..].iter().map(move |&j| (i, j)))
        .collect();
    out.reports = pairs
        .par_iter()
        .map(|&(i, j)| condition_report(world, class, i, j, opt.r_star))
        .collect::<Result<_>>()?;
    Ok(out)
}

fn condition_report(world: &World, class: &HypothesisClass, i: usize, j: usize, r_star: f64) -> Result<ConditionReport> {
    let (f, g) = (class.get(i), class.get(j));
    let ef = expensive_set(world, f)?.members;
    let eg = expensive_set(world, g)?.members;
    let sym: Vec<bool> = ef.iter().zip(&eg).map(|(a, b)| a ^ b).collect();
    let n = nonsimultaneous_set(world, f, g)?.members;
    let (e_sym_neg, e_sym_pos) = (world.set_mass(&sym, -1), world.set_mass(&sym, 1));
    let (n_neg, n_pos) = (world.set_mass(&n, -1), world.set_mass(&n, 1));
    let conditions_hold = e_sym_pos <= e_sym_neg && n_pos <= n_neg;
    let strict = e_sym_pos < e_sym_neg || n_pos < n_neg;
    let decomposition = decompose_pair_mixture(world, f, g)?;
    let pair_risk = decomposition.terms["R_Q"];
    Ok(ConditionReport {
        pair: (i, j),
        names: (f.name.clone(), g.name.clone()),
        e_sym_neg,
        e_sym_pos,
        n_neg,
        n_pos,
        conditions_hold,
        strict,
        admissible: admissibility_check(world, f, g)?.admissible,
        pair_risk,
        risk_gap: r_star - pair_risk,
        identity_rhs: decomposition.rhs,
    })
}

/// Zero–one loss vectors of a finite loss class on one dataset, packed as
/// bitsets so that `Σ_i σ_i l_i` is an exact integer.
#[derive(Debug, Clone)]
pub struct LossTable {
    n: usize,
    rows: Vec<Vec<u64>>,
    ones: Vec<i64>,
}

impl LossTable {
    /// One row per `(hypothesis, response)` pair.
    pub fn new(dataset: &Dataset, members: &[(&Hypothesis, &ResponseMap)]) -> Self {
        let n = dataset.len();
        let words = n.div_ceil(64);
        let rows: Vec<Vec<u64>> = members
            .iter()
            .map(|(f, delta)| {
                let mut row = vec![0u64; words];
                for (i, &(x, y)) in dataset.items.iter().enumerate() {
                    if f.label(delta.target(x)) != y {
                        row[i / 64] |= 1 << (i % 64);
                    }
                }
                row
            })
            .collect();
        let ones = rows
            .iter()
            .map(|r| r.iter().map(|w| i64::from(w.count_ones())).sum())
            .collect();
        LossTable { n, rows, ones }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `Σ_i σ_i l_{k,i}` for every row, with `σ_i = +1` where bit `i` of
    /// `plus` is set.
    pub fn correlations(&self, plus: &[u64]) -> Vec<i64> {
        self.rows
            .iter()
            .zip(&self.ones)
            .map(|(row, &ones)| {
                let hits: i64 = row.iter().zip(plus).map(|(l, s)| i64::from((l & s).count_ones())).sum();
                2 * hits - ones
            })
            .collect()
    }

    /// Numerator of `sup_k (1/n) Σ_i σ_i l_{k,i}`.
    pub fn sup(&self, plus: &[u64]) -> i64 {
        self.correlations(plus).into_iter().max().expect("loss class is non-empty")
    }

    /// Per-σ supremum with the class augmented by mixtures of its rows,
    /// given as compositions of `resolution`. Returned as the numerator
    /// over `n * resolution`.
    pub fn augmented_sup(&self, plus: &[u64], mixtures: &[Vec<u32>], resolution: u32) -> i64 {
        let s = self.correlations(plus);
        let k = i64::from(resolution);
        let vertices = s.iter().map(|v| k * v).max().expect("loss class is non-empty");
        mixtures
            .iter()
            .map(|c| c.iter().zip(&s).map(|(&c, v)| i64::from(c) * v).sum::<i64>())
            .fold(vertices, i64::max)
    }
}

/// Random sign vector of length `n`, as the bitset of positive signs.
pub fn draw_sigma(rng: &mut impl RngCore, n: usize) -> Vec<u64> {
    let words = n.div_ceil(64);
    let mut plus: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
    if !n.is_multiple_of(64) {
        plus[words - 1] &= (1u64 << (n % 64)) - 1;
    }
    plus
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RademacherEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub sigma_draws: usize,
    pub dataset_draws: usize,
    pub seed: u64,
    /// Whether σ was enumerated exhaustively.
    pub exact: bool,
}

/// How the σ expectation is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    MonteCarlo(usize),
    /// All `2^n` sign vectors; requires `n ≤ EXACT_SIGMA_MAX`.
    Exact,
}

pub const EXACT_SIGMA_MAX: usize = 20;
pub const DEFAULT_SIGMA_DRAWS: usize = 1000;

/// Dataset `d` of the estimator's outer loop.
pub fn rademacher_dataset(world: &World, n: usize, seed: u64, d: usize) -> Dataset {
    let sampler = CellSampler::new(world);
    let mut stream = rng::stream(seed, &[tags::RADEMACHER_DATA, n as u64, d as u64]);
    Dataset {
        items: (0..n).map(|_| sampler.draw(&mut stream)).collect(),
        seed,
    }
}

/// Estimates `E_S E_σ sup_{f ∈ F} (1/n) Σ σ_i l(f(Δ(x_i)), y_i)` for a
/// fixed response map.
pub fn rademacher_estimate(
    world: &World,
    class: &HypothesisClass,
    delta: &ResponseMap,
    n: usize,
    sigma: SigmaMode,
    dataset_draws: usize,
    seed: u64,
) -> Result<RademacherEstimate> {
    let members: Vec<(&Hypothesis, &ResponseMap)> = class.iter().map(|f| (f, delta)).collect();
    rademacher_of(world, &members, n, sigma, dataset_draws, seed)
}

/// Estimator over an arbitrary finite loss class given as
/// `(hypothesis, response)` pairs.
pub fn rademacher_of(
    world: &World,
    members: &[(&Hypothesis, &ResponseMap)],
    n: usize,
    sigma: SigmaMode,
    dataset_draws: usize,
    seed: u64,
) -> Result<RademacherEstimate> {
    if n == 0 || dataset_draws == 0 || members.is_empty() {
        return Err(Error::InvalidArgument(
            "rademacher estimate needs n >= 1, dataset_draws >= 1 and a non-empty class".into(),
        ));
    }
    if let Some((f, d)) = members.iter().find(|(f, d)| f.labels.len() != world.len() || d.len() != world.len()) {
        return Err(Error::InvalidArgument(format!(
            "hypothesis {} or its response does not match the world size {}",
            f.name,
            d.len().max(world.len())
        )));
    }
    let sigma_draws = match sigma {
        SigmaMode::MonteCarlo(0) => {
            return Err(Error::InvalidArgument("sigma_draws must be at least 1".into()));
        }
        SigmaMode::MonteCarlo(s) => s,
        SigmaMode::Exact if n > EXACT_SIGMA_MAX => {
            return Err(Error::InvalidArgument(format!(
                "exact sigma enumeration supports n <= {EXACT_SIGMA_MAX}, got {n}"
            )));
        }
        SigmaMode::Exact => 1usize << n,
    };
    // Per-dataset sums of sup numerators and their squares, accumulated
    // exactly; the exact mode therefore returns exact rationals.
    let per_dataset: Vec<(f64, f64)> = (0..dataset_draws)
        .into_par_iter()
        .map(|d| {
            let data = rademacher_dataset(world, n, seed, d);
            let table = LossTable::new(&data, members);
            let (mut sum, mut sq) = (0i128, 0i128);
            let mut add = |v: i64| {
                sum += i128::from(v);
                sq += i128::from(v) * i128::from(v);
            };
            match sigma {
                SigmaMode::Exact => (0..sigma_draws as u64).for_each(|mask| add(table.sup(&[mask]))),
                SigmaMode::MonteCarlo(_) => {
                    let mut stream = rng::stream(seed, &[tags::RADEMACHER_SIGMA, n as u64, d as u64]);
                    (0..sigma_draws).for_each(|_| add(table.sup(&draw_sigma(&mut stream, n))));
                }
            }
            let (s, nf) = (sigma_draws as f64, n as f64);
            let mean = sum as f64 / (s * nf);
            let var = if sigma_draws < 2 {
                0.0
            } else {
                ((sq as f64 - sum as f64 * sum as f64 / s) / (s - 1.0)).max(0.0) / (nf * nf)
            };
            (mean, var)
        })
        .collect();

    let means: Vec<f64> = per_dataset.iter().map(|p| p.0).collect();
    let (mean, outer_var) = mean_and_var(&means);
    let std_error = if dataset_draws >= 2 {
        (outer_var / dataset_draws as f64).sqrt()
    } else if matches!(sigma, SigmaMode::Exact) {
        0.0
    } else {
        (per_dataset[0].1 / sigma_draws as f64).sqrt()
    };
    Ok(RademacherEstimate {
        mean,
        std_error,
        n,
        sigma_draws,
        dataset_draws,
        seed,
        exact: matches!(sigma, SigmaMode::Exact),
    })
}

/// Sample mean and unbiased variance (0 for a single value).
fn mean_and_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, ss / (n - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupRademacher {
    /// `max_Q 2 R_n(F^l_{Δ_Q})` over the grid.
    pub value: f64,
    /// Standard error of the maximising estimate, doubled.
    pub std_error: f64,
    /// Number of distinct response maps visited.
    pub maps: usize,
}

/// Maximum over the simplex grid of `2 R_n` for the class composed with
/// `Δ_Q`. Distinct response maps are evaluated once each, with common
/// random numbers across maps.
pub fn sup_rademacher(
    world: &World,
    class: &HypothesisClass,
    k: u32,
    n: usize,
    sigma: SigmaMode,
    dataset_draws: usize,
    seed: u64,
) -> Result<SupRademacher> {
    let responses = GridResponses::new(world, class, simplex_grid(class.len(), k)?)?;
    sup_rademacher_on(world, class, &responses.maps, n, sigma, dataset_draws, seed)
}

pub fn sup_rademacher_on(
    world: &World,
    class: &HypothesisClass,
    maps: &[ResponseMap],
    n: usize,
    sigma: SigmaMode,
    dataset_draws: usize,
    seed: u64,
) -> Result<SupRademacher> {
    let estimates: Vec<RademacherEstimate> = maps
        .iter()
        .map(|m| rademacher_estimate(world, class, m, n, sigma, dataset_draws, seed))
        .collect::<Result<_>>()?;
    let best = estimates
        .iter()
        .max_by(|a, b| a.mean.total_cmp(&b.mean))
        .expect("at least one response map");
    Ok(SupRademacher {
        value: 2.0 * best.mean,
        std_error: 2.0 * best.std_error,
        maps: maps.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma3Report {
    pub sigma_draws: usize,
    pub mixtures: usize,
    /// σ draws where the augmented supremum differs from the plain one.
    pub mismatches: usize,
}

/// Compares, per σ draw, the estimator's supremum over the class with the
/// supremum over the class augmented by random grid mixtures of its loss
/// vectors.
pub fn lemma3_check(
    dataset: &Dataset,
    class: &HypothesisClass,
    delta: &ResponseMap,
    sigma_draws: usize,
    mixtures: usize,
    resolution: u32,
    seed: u64,
) -> Result<Lemma3Report> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let grid = simplex_grid(class.len(), resolution)?;
    let mut pick = rng::stream(seed, &[tags::LEMMA_MIXTURES]);
    let chosen: Vec<Vec<u32>> = (0..mixtures)
        .map(|_| grid.composition((pick.next_u64() % grid.len() as u64) as usize).to_vec())
        .collect();
    let members: Vec<(&Hypothesis, &ResponseMap)> = class.iter().map(|f| (f, delta)).collect();
    let table = LossTable::new(dataset, &members);
    let n = table.n();
    let (kn, nf) = ((n as u64 * u64::from(resolution)) as f64, n as f64);
    let mut sigma = rng::stream(seed, &[tags::RADEMACHER_SIGMA, n as u64]);
    let mismatches = (0..sigma_draws)
        .filter(|_| {
            let plus = draw_sigma(&mut sigma, n);
            let plain = table.sup(&plus) as f64 / nf;
            let augmented = table.augmented_sup(&plus, &chosen, resolution) as f64 / kn;
            plain != augmented
        })
        .count();
    Ok(Lemma3Report {
        sigma_draws,
        mixtures,
        mismatches,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundParams {
    pub n: usize,
    pub delta: f64,
    /// VC or strategic VC dimension.
    pub d: f64,
    /// Weight-norm bound.
    pub b: f64,
    /// Feature-norm bound.
    pub x: f64,
    pub u_star: f64,
    pub class_size: usize,
    /// Absolute constant of the strategic VC rate.
    pub c: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            n: 1000,
            delta: 0.05,
            d: 3.0,
            b: 1.0,
            x: 1.0,
            u_star: 1.0,
            class_size: 2,
            c: 1.0,
        }
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidDelta(self.delta));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let positive = [self.d, self.b, self.x, self.c].iter().all(|v| v.is_finite() && *v > 0.0);
        if !positive || !(self.u_star.is_finite() && self.u_star >= 0.0) || self.class_size == 0 {
            return Err(Error::InvalidArgument(
                "d, B, X and C must be positive, u* non-negative and |F| at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub name: &'static str,
    pub value: f64,
    pub note: &'static str,
}

pub fn bound_table(p: &BoundParams) -> Result<Vec<BoundRow>> {
    p.validate()?;
    let n = p.n as f64;
    let log_inv_delta = (1.0 / p.delta).ln();
    Ok(vec![
        BoundRow {
            name: "vc",
            value: (2.0 * p.d * (std::f64::consts::E * n / p.d).ln() / n).sqrt(),
            note: "sqrt(2 d ln(e n / d) / n)",
        },
        BoundRow {
            name: "strategic_vc",
            value: p.c * ((p.d + log_inv_delta) / n).sqrt(),
            note: "shape only: C sqrt((d + ln(1/delta)) / n)",
        },
        BoundRow {
            name: "linear_hinge",
            value: (p.b * (4.0 * p.x + p.u_star) + 3.0 * log_inv_delta.sqrt()) / n.sqrt(),
            note: "(B (4X + u*) + 3 sqrt(ln(1/delta))) / sqrt(n)",
        },
        BoundRow {
            name: "linear_hinge_improved",
            value: (4.0 * p.x * p.b + log_inv_delta.sqrt()) / (2.0 * n.sqrt()),
            note: "(4 X B + sqrt(ln(1/delta))) / (2 sqrt(n))",
        },
        BoundRow {
            name: "massart",
            value: (2.0 * (p.class_size as f64).ln() / n).sqrt(),
            note: "sqrt(2 ln|F| / n)",
        },
    ])
}

pub fn bound_table_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from("bound,value,note\n");
    for r in rows {
        let _ = writeln!(out, "{},{},\"{}\"", r.name, r.value, r.note);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub grid_k: u32,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub delta: f64,
    pub seed: u64,
    /// Learn over hypotheses instead of grid mixtures.
    pub deterministic: bool,
    pub sigma_draws: usize,
    pub dataset_draws: usize,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            grid_k: 10,
            n_list: vec![25, 50, 100, 200, 400, 800],
            trials: 200,
            delta: 0.1,
            seed: 0,
            deterministic: false,
            sigma_draws: 200,
            dataset_draws: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub trials: usize,
    pub mean_excess: f64,
    pub std_error: f64,
    /// Twice the (supremum of the) Rademacher complexity.
    pub rademacher: f64,
    pub rademacher_std_error: f64,
    /// `rademacher + sqrt(ln(1/δ) / (2n))`.
    pub bound: f64,
    pub violation_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub deterministic: bool,
    pub optimum: f64,
    pub delta: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `ln(mean excess)` against `ln(n)` over rows
    /// with positive mean; `None` with fewer than two such rows.
    pub slope: Option<f64>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n,trials,mean_excess,std_error,rademacher,rademacher_std_error,bound,violation_fraction\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.n, r.trials, r.mean_excess, r.std_error, r.rademacher, r.rademacher_std_error, r.bound, r.violation_fraction
            );
        }
        out
    }
}

/// Repeatedly samples datasets, runs strategic ERM and records the exact
/// population excess risk of the learned classifier against the best one
/// available to the learner.
pub fn excess_risk_experiment(world: &World, class: &HypothesisClass, cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    if cfg.n_list.is_empty() || cfg.n_list.contains(&0) {
        return Err(Error::InvalidArgument("n_list must be non-empty with positive sizes".into()));
    }
    if cfg.trials < 2 {
        return Err(Error::InvalidArgument("trials must be at least 2".into()));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::InvalidDelta(cfg.delta));
    }
    crate::world::validate_world(world).into_result()?;
    let sampler = CellSampler::new(world);

    let learner = if cfg.deterministic {
        let det_maps: Vec<ResponseMap> = class.iter().map(|f| best_response_det(world, f)).collect::<Result<_>>()?;
        Learner::Det {
            risks: deterministic_risks(world, class)?,
            maps: det_maps,
        }
    } else {
        let responses = GridResponses::new(world, class, simplex_grid(class.len(), cfg.grid_k)?)?;
        let table = responses.population_table(world, class);
        let risks = responses.population_risks(&table);
        Learner::Grid { responses, risks }
    };
    let optimum = learner.risks().iter().copied().fold(f64::INFINITY, f64::min);

    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let excess: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut stream = rng::stream(cfg.seed, &[tags::TRIAL, n as u64, t as u64]);
                let data = Dataset {
                    items: (0..n).map(|_| sampler.draw(&mut stream)).collect(),
                    seed: cfg.seed,
                };
                (learner.population_risk_of_learned(&data, class) - optimum).max(0.0)
            })
            .collect();
        let (mean_excess, var) = mean_and_var(&excess);
        let sigma = SigmaMode::MonteCarlo(cfg.sigma_draws);
        let sup = match &learner {
            Learner::Grid { responses, .. } => {
                sup_rademacher_on(world, class, &responses.maps, n, sigma, cfg.dataset_draws, cfg.seed)?
            }
            Learner::Det { maps, .. } => {
                let members: Vec<(&Hypothesis, &ResponseMap)> = class.iter().zip(maps).collect();
                let est = rademacher_of(world, &members, n, sigma, cfg.dataset_draws, cfg.seed)?;
                SupRademacher {
                    value: 2.0 * est.mean,
                    std_error: 2.0 * est.std_error,
                    maps: maps.len(),
                }
            }
        };
        let bound = sup.value + ((1.0 / cfg.delta).ln() / (2.0 * n as f64)).sqrt();
        let violations = excess.iter().filter(|&&e| e > bound).count();
        rows.push(ConvergenceRow {
            n,
            trials: cfg.trials,
            mean_excess,
            std_error: (var / cfg.trials as f64).sqrt(),
            rademacher: sup.value,
            rademacher_std_error: sup.std_error,
            bound,
            violation_fraction: violations as f64 / cfg.trials as f64,
        });
    }
    let slope = log_log_slope(&rows);
    Ok(ConvergenceReport {
        deterministic: cfg.deterministic,
        optimum,
        delta: cfg.delta,
        rows,
        slope,
    })
}

enum Learner {
    Grid { responses: GridResponses, risks: Vec<f64> },
    Det { risks: Vec<f64>, maps: Vec<ResponseMap> },
}

impl Learner {
    fn risks(&self) -> &[f64] {
        match self {
            Learner::Grid { risks, .. } | Learner::Det { risks, .. } => risks,
        }
    }

    fn population_risk_of_learned(&self, data: &Dataset, class: &HypothesisClass) -> f64 {
        match self {
            Learner::Grid { responses, risks } => {
                let errors = responses.error_table(data, class);
                risks[responses.empirical_argmin(&errors).0]
            }
            Learner::Det { risks, maps } => {
                let errors: Vec<usize> = class.iter().zip(maps).map(|(f, m)| hypothesis_errors(data, f, m)).collect();
                let best = *errors.iter().min().expect("class is non-empty");
                risks[errors.iter().position(|&e| e == best).unwrap()]
            }
        }
    }
}

fn log_log_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.mean_excess > 0.0)
        .map(|r| ((r.n as f64).ln(), r.mean_excess.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

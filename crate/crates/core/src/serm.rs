//! Strategic empirical risk minimisation by exhaustive search: over the
//! hypotheses themselves, and over a regular grid on the probability
//! simplex for mixtures.
//!
//! Grid mixtures keep their integer compositions so that empirical
//! objectives can be compared exactly: for composition `c` at resolution
//! `k` the empirical risk is `Σ_j c_j e_j / (n k)` with integer error
//! counts `e_j`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::response::{best_response_det, best_response_to_votes, ResponseMap};
use crate::risk::{hypothesis_errors, hypothesis_risk};
use crate::world::{Dataset, HypothesisClass, Mixture, World};

/// Largest grid any search will enumerate.
pub const GRID_CAP: usize = 1_000_000;

/// Default simplex resolution.
pub const DEFAULT_RESOLUTION: u32 = 10;

/// Tolerance for counting co-optimal population solutions.
pub const OPTIMUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexGrid {
    resolution: u32,
    parts: usize,
    compositions: Vec<Vec<u32>>,
}

/// Number of compositions of `k` into `m` non-negative parts, `C(k+m-1, m-1)`.
pub fn grid_size(m: usize, k: u32) -> u128 {
    let (n, r) = (k as u128 + m as u128 - 1, m as u128 - 1);
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// All compositions of `k` into `m` parts, first component descending.
pub fn simplex_grid(m: usize, k: u32) -> Result<SimplexGrid> {
    if m == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "simplex grid needs m >= 1 and k >= 1, got m={m}, k={k}"
        )));
    }
    let size = grid_size(m, k);
    if size > GRID_CAP as u128 {
        return Err(Error::GridTooLarge { size, cap: GRID_CAP });
    }
    let mut compositions = Vec::with_capacity(size as usize);
    let mut current = vec![0u32; m];
    fill(&mut compositions, &mut current, 0, k);
    Ok(SimplexGrid {
        resolution: k,
        parts: m,
        compositions,
    })
}

fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        fill(out, current, pos + 1, remaining - v);
    }
}

impl SimplexGrid {
    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    pub fn len(&self) -> usize {
        self.compositions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.compositions.is_empty()
    }

    pub fn composition(&self, idx: usize) -> &[u32] {
        &self.compositions[idx]
    }

    pub fn compositions(&self) -> &[Vec<u32>] {
        &self.compositions
    }

    pub fn weights(&self, idx: usize) -> Vec<f64> {
        let k = f64::from(self.resolution);
        self.compositions[idx].iter().map(|&c| f64::from(c) / k).collect()
    }

    pub fn mixture(&self, idx: usize) -> Mixture {
        Mixture::new(self.weights(idx)).expect("grid weights are normalised")
    }

    pub fn mixtures(&self) -> Vec<Mixture> {
        (0..self.len()).map(|i| self.mixture(i)).collect()
    }
}

/// Which mixtures a randomised search visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchSpace {
    /// Full simplex grid at the given resolution.
    Grid(u32),
    /// Point masses and uniform pairs `U{f, f'}` only.
    PairsOnly,
}

impl SearchSpace {
    pub fn grid(self, m: usize) -> Result<SimplexGrid> {
        match self {
            SearchSpace::Grid(k) => simplex_grid(m, k),
            SearchSpace::PairsOnly => simplex_grid(m, 2),
        }
    }
}

/// Best responses for every mixture of a grid, deduplicated.
#[derive(Debug, Clone)]
pub struct GridResponses {
    pub grid: SimplexGrid,
    /// `map_of[g]` indexes `maps` for grid point `g`.
    pub map_of: Vec<usize>,
    pub maps: Vec<ResponseMap>,
}

impl GridResponses {
    pub fn new(world: &World, class: &HypothesisClass, grid: SimplexGrid) -> Result<Self> {
        if grid.parts() != class.len() {
            return Err(Error::InvalidArgument(format!(
                "grid has {} parts, class has {} hypotheses",
                grid.parts(),
                class.len()
            )));
        }
        let n = world.len();
        // Votes computed the same way as `response::votes`.
        let vote_vectors: Vec<Vec<f64>> = (0..grid.len())
            .map(|g| {
                let w = grid.weights(g);
                (0..n)
                    .map(|i| {
                        w.iter()
                            .zip(class.iter())
                            .map(|(w, h)| w * f64::from(h.label(i)))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let mut distinct: Vec<&Vec<f64>> = Vec::new();
        let mut key_of: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut vote_of = Vec::with_capacity(grid.len());
        for v in &vote_vectors {
            let key: Vec<u64> = v.iter().map(|x| x.to_bits()).collect();
            let next = distinct.len();
            let id = *key_of.entry(key).or_insert(next);
            if id == next {
                distinct.push(v);
            }
            vote_of.push(id);
        }
        let responses: Vec<ResponseMap> = distinct
            .par_iter()
            .map(|v| best_response_to_votes(world, v))
            .collect::<Result<_>>()?;

        let mut maps: Vec<ResponseMap> = Vec::new();
        let mut map_index: HashMap<&[usize], usize> = HashMap::new();
        let mut response_to_map = Vec::with_capacity(responses.len());
        for r in &responses {
            let next = maps.len();
            let id = *map_index.entry(r.targets()).or_insert(next);
            if id == next {
                maps.push(r.clone());
            }
            response_to_map.push(id);
        }
        let map_of = vote_of.iter().map(|&v| response_to_map[v]).collect();
        Ok(GridResponses { grid, map_of, maps })
    }

    pub fn response(&self, g: usize) -> &ResponseMap {
        &self.maps[self.map_of[g]]
    }

    /// `risks[map][k]`: population risk of hypothesis `k` under each map.
    pub fn population_table(&self, world: &World, class: &HypothesisClass) -> Vec<Vec<f64>> {
        self.maps
            .iter()
            .map(|m| class.iter().map(|f| hypothesis_risk(world, f, m)).collect())
            .collect()
    }

    /// `errors[map][k]`: error count of hypothesis `k` on the dataset.
    pub fn error_table(&self, dataset: &Dataset, class: &HypothesisClass) -> Vec<Vec<u64>> {
        self.maps
            .iter()
            .map(|m| class.iter().map(|f| hypothesis_errors(dataset, f, m) as u64).collect())
            .collect()
    }

    /// Population risk `Σ_k w_k R_{Δ_Q}(f_k)` for every grid point.
    pub fn population_risks(&self, table: &[Vec<f64>]) -> Vec<f64> {
        (0..self.grid.len())
            .map(|g| {
                let w = self.grid.weights(g);
                w.iter().zip(&table[self.map_of[g]]).map(|(w, r)| w * r).sum()
            })
            .collect()
    }

    /// Index of the first grid point minimising the empirical objective,
    /// its integer numerator, and the number of exact co-minimisers.
    pub fn empirical_argmin(&self, errors: &[Vec<u64>]) -> (usize, u64, usize) {
        let numerators: Vec<u64> = (0..self.grid.len())
            .map(|g| {
                self.grid
                    .composition(g)
                    .iter()
                    .zip(&errors[self.map_of[g]])
                    .map(|(&c, &e)| u64::from(c) * e)
                    .sum()
            })
            .collect();
        let best = *numerators.iter().min().expect("grid is non-empty");
        let first = numerators.iter().position(|&v| v == best).unwrap();
        let ties = numerators.iter().filter(|&&v| v == best).count();
        (first, best, ties)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Argmin {
    Hypothesis { index: usize, name: String },
    Mixture { weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SermResult {
    pub argmin: Argmin,
    pub objective: f64,
    pub ties: usize,
    pub provenance: String,
}

impl SermResult {
    pub fn hypothesis_index(&self) -> Option<usize> {
        match self.argmin {
            Argmin::Hypothesis { index, .. } => Some(index),
            Argmin::Mixture { .. } => None,
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match &self.argmin {
            Argmin::Mixture { weights } => Some(weights),
            Argmin::Hypothesis { .. } => None,
        }
    }
}

fn provenance(dataset: &Dataset) -> String {
    format!("dataset seed {} (n = {})", dataset.seed, dataset.len())
}

fn check_dataset(dataset: &Dataset, world: &World) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    dataset.check_world(world)
}

/// `argmin_f r_{Δ_f}(f)` over the class; first minimiser wins.
pub fn serm_deterministic(dataset: &Dataset, world: &World, class: &HypothesisClass) -> Result<SermResult> {
    check_dataset(dataset, world)?;
    let errors: Vec<usize> = class
        .hypotheses()
        .par_iter()
        .map(|f| best_response_det(world, f).map(|d| hypothesis_errors(dataset, f, &d)))
        .collect::<Result<_>>()?;
    let best = *errors.iter().min().expect("class is non-empty");
    let index = errors.iter().position(|&e| e == best).unwrap();
    Ok(SermResult {
        argmin: Argmin::Hypothesis {
            index,
            name: class.get(index).name.clone(),
        },
        objective: best as f64 / dataset.len() as f64,
        ties: errors.iter().filter(|&&e| e == best).count(),
        provenance: provenance(dataset),
    })
}

/// `argmin_Q r_{Δ_Q}(Q)` over a simplex grid.
pub fn serm_randomised(
    dataset: &Dataset,
    world: &World,
    class: &HypothesisClass,
    space: SearchSpace,
) -> Result<SermResult> {
    check_dataset(dataset, world)?;
    let responses = GridResponses::new(world, class, space.grid(class.len())?)?;
    Ok(serm_on_grid(dataset, class, &responses))
}

/// Randomised SERM against precomputed grid responses.
pub fn serm_on_grid(dataset: &Dataset, class: &HypothesisClass, responses: &GridResponses) -> SermResult {
    let errors = responses.error_table(dataset, class);
    let (g, numerator, ties) = responses.empirical_argmin(&errors);
    let denom = dataset.len() as u64 * u64::from(responses.grid.resolution());
    SermResult {
        argmin: Argmin::Mixture {
            weights: responses.grid.weights(g),
        },
        objective: numerator as f64 / denom as f64,
        ties,
        provenance: provenance(dataset),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationOptima {
    pub det: SermResult,
    /// Indices of all strategic-risk-optimal hypotheses.
    pub f_star: Vec<usize>,
    /// Their common strategic risk.
    pub r_star: f64,
    /// Grid-optimal mixture.
    pub mix: SermResult,
    /// Strategic risk of each hypothesis under its own response.
    pub det_risks: Vec<f64>,
}

pub fn deterministic_risks(world: &World, class: &HypothesisClass) -> Result<Vec<f64>> {
    class
        .hypotheses()
        .par_iter()
        .map(|f| best_response_det(world, f).map(|d| hypothesis_risk(world, f, &d)))
        .collect()
}

/// Population optima over the class and over the grid.
pub fn population_optima(world: &World, class: &HypothesisClass, space: SearchSpace) -> Result<PopulationOptima> {
    let grid = space.grid(class.len())?;
    let responses = GridResponses::new(world, class, grid)?;
    population_optima_on_grid(world, class, &responses)
}

pub fn population_optima_on_grid(
    world: &World,
    class: &HypothesisClass,
    responses: &GridResponses,
) -> Result<PopulationOptima> {
    let det_risks = deterministic_risks(world, class)?;
    let r_star = det_risks.iter().copied().fold(f64::INFINITY, f64::min);
    let f_star: Vec<usize> = (0..det_risks.len())
        .filter(|&k| det_risks[k] <= r_star + OPTIMUM_TOL)
        .collect();
    let best_k = det_risks.iter().position(|&r| r == r_star).unwrap();

    let table = responses.population_table(world, class);
    let mix_risks = responses.population_risks(&table);
    let mix_best = mix_risks.iter().copied().fold(f64::INFINITY, f64::min);
    let g = mix_risks.iter().position(|&r| r == mix_best).unwrap();

    Ok(PopulationOptima {
        det: SermResult {
            argmin: Argmin::Hypothesis {
                index: best_k,
                name: class.get(best_k).name.clone(),
            },
            objective: r_star,
            ties: f_star.len(),
            provenance: "population".into(),
        },
        f_star,
        r_star,
        mix: SermResult {
            argmin: Argmin::Mixture {
                weights: responses.grid.weights(g),
            },
            objective: mix_best,
            ties: mix_risks.iter().filter(|&&r| r <= mix_best + OPTIMUM_TOL).count(),
            provenance: "population".into(),
        },
        det_risks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::fixtures::line3;
    use crate::world::Hypothesis;

    #[test]
    fn grid_examples() {
        let g = simplex_grid(2, 2).unwrap();
        assert_eq!(g.compositions(), &[vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(g.weights(1), vec![0.5, 0.5]);
        assert_eq!(simplex_grid(1, 7).unwrap().compositions(), &[vec![7]]);
        assert_eq!(simplex_grid(3, 4).unwrap().len(), 15);
        assert_eq!(grid_size(3, 4), 15);
        assert_eq!(simplex_grid(40, 40).unwrap_err().code(), "GRID_TOO_LARGE");
    }

    fn line3_data() -> Dataset {
        Dataset {
            items: vec![(0, -1), (1, 1), (2, 1)],
            seed: 0,
        }
    }

    #[test]
    fn deterministic_serm_on_line3() {
        let p = line3();
        let r = serm_deterministic(&line3_data(), &p.world, &p.class).unwrap();
        assert_eq!(r.hypothesis_index(), Some(1));
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.ties, 1);
    }

    #[test]
    fn single_hypothesis_class() {
        let p = line3();
        let class = p.class.subset(&[0]).unwrap();
        let r = serm_deterministic(&line3_data(), &p.world, &class).unwrap();
        assert_eq!(r.hypothesis_index(), Some(0));
        assert!((r.objective - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn everything_wrong_gives_one() {
        let p = line3();
        // Under Δ_f1 everything presents as positive; under Δ_f2 x0 stays
        // negative and the rest present as positive.
        let d = Dataset {
            items: vec![(1, -1), (2, -1)],
            seed: 0,
        };
        let r = serm_deterministic(&d, &p.world, &p.class).unwrap();
        assert_eq!(r.objective, 1.0);
    }

    #[test]
    fn randomised_serm_on_line3() {
        let p = line3();
        let r = serm_randomised(&line3_data(), &p.world, &p.class, SearchSpace::Grid(2)).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.weights(), Some(&[0.0, 1.0][..]));
        let det = serm_deterministic(&line3_data(), &p.world, &p.class).unwrap();
        let k1 = serm_randomised(&line3_data(), &p.world, &p.class, SearchSpace::Grid(1)).unwrap();
        assert_eq!(k1.objective, det.objective);
        assert_eq!(k1.weights(), Some(&[0.0, 1.0][..]));
        let empty = Dataset {
            items: vec![],
            seed: 0,
        };
        assert_eq!(
            serm_randomised(&empty, &p.world, &p.class, SearchSpace::Grid(2)).unwrap_err().code(),
            "EMPTY_DATASET"
        );
    }

    #[test]
    fn population_optima_on_line3() {
        let p = line3();
        let opt = population_optima(&p.world, &p.class, SearchSpace::Grid(4)).unwrap();
        assert_eq!(opt.f_star, vec![1]);
        assert_eq!(opt.r_star, 0.0);
        assert_eq!(opt.mix.objective, 0.0);
        // (0.25, 0.75) still leaves x1 able to reach a vote of 0.5 at x2.
        assert_eq!(opt.mix.weights(), Some(&[0.25, 0.75][..]));
        assert!(opt.mix.ties >= 2);
    }

    #[test]
    fn incentive_compatible_zero_risk_hypothesis() {
        let p = line3();
        let h = Hypothesis::new("h", vec![-1, -1, 1]);
        let class = HypothesisClass::new(vec![Hypothesis::new("f1", vec![-1, 1, 1]), h]).unwrap();
        // Under h, x1 games to x2 (positive-labelled), so h has zero strategic risk.
        let opt = population_optima(&p.world, &class, SearchSpace::Grid(10)).unwrap();
        assert_eq!(opt.f_star, vec![1]);
        assert_eq!(opt.mix.objective, 0.0);
    }

    #[test]
    fn pairs_only_space() {
        let g = SearchSpace::PairsOnly.grid(3).unwrap();
        assert_eq!(g.len(), 6);
        assert!(g.compositions().iter().all(|c| c.iter().all(|&x| x <= 2)));
    }
}

//! Scenario generators: the annulus world with a symmetric quadratic pair,
//! the redundant-features world, and random small worlds for property
//! testing.

use std::f64::consts::PI;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::world::{CostMatrix, Hypothesis, HypothesisClass, Label, Point, Problem, World};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnulusConfig {
    pub inner_radius: f64,
    pub gap_radius: f64,
    pub outer_radius: f64,
    pub angular_bins: usize,
    pub radial_bins: usize,
    pub cost_scale: f64,
    pub class_balance: f64,
    /// Curvature `a` of the pair's parabolas.
    pub a: f64,
    /// Offset `b` of the pair's parabolas.
    pub b: f64,
    /// Extra copies of `f` rotated by multiples of `π / (extra_rotations + 1)`.
    pub extra_rotations: usize,
}

impl Default for AnnulusConfig {
    fn default() -> Self {
        AnnulusConfig {
            inner_radius: 2.0,
            gap_radius: 3.0,
            outer_radius: 5.0,
            angular_bins: 64,
            radial_bins: 24,
            cost_scale: 2.0,
            class_balance: 0.5,
            a: 0.5,
            b: 2.0,
            extra_rotations: 0,
        }
    }
}

impl AnnulusConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.inner_radius,
            self.gap_radius,
            self.outer_radius,
            self.cost_scale,
            self.class_balance,
            self.a,
            self.b,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("annulus parameters must be finite".into()));
        }
        if !(0.0 < self.inner_radius && self.inner_radius < self.gap_radius && self.gap_radius < self.outer_radius) {
            return Err(Error::Config(format!(
                "radii must satisfy 0 < inner < gap < outer, got {} / {} / {}",
                self.inner_radius, self.gap_radius, self.outer_radius
            )));
        }
        if self.angular_bins < 4 || self.radial_bins < 4 {
            return Err(Error::Config("angular_bins and radial_bins must be at least 4".into()));
        }
        if !self.angular_bins.is_multiple_of(2) {
            return Err(Error::Config("angular_bins must be even".into()));
        }
        if self.cost_scale <= 0.0 {
            return Err(Error::Config("cost_scale must be positive".into()));
        }
        if !(self.class_balance > 0.0 && self.class_balance < 1.0) {
            return Err(Error::Config("class_balance must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Polar-grid annulus world. Cell `(r, t)` has id `r{r}t{t}`; cells are
/// ordered radius-major. Angular bins are placed symmetrically about the
/// x1 axis and the lower half is mirrored from the upper half, so the
/// world is exactly invariant under `x2 ↦ -x2`.
pub fn gen_annulus(config: &AnnulusConfig) -> Result<Problem> {
    config.validate()?;
    let (na, nr) = (config.angular_bins, config.radial_bins);
    let dr = config.outer_radius / nr as f64;
    let dtheta = 2.0 * PI / na as f64;

    let mut points = Vec::with_capacity(na * nr);
    let mut radius = Vec::with_capacity(na * nr);
    for r in 0..nr {
        let rc = (r as f64 + 0.5) * dr;
        let mut ring = vec![[0.0; 2]; na];
        for t in 0..na / 2 {
            let theta = (t as f64 + 0.5) * dtheta;
            ring[t] = [rc * theta.cos(), rc * theta.sin()];
        }
        for t in na / 2..na {
            let [x, y] = ring[na - 1 - t];
            ring[t] = [x, -y];
        }
        for (t, xy) in ring.into_iter().enumerate() {
            points.push(Point::new(format!("r{r}t{t}"), Some(xy.to_vec())));
            radius.push(rc);
        }
    }

    // Midpoint rule: a cell's area is proportional to its centre radius.
    let pos_area: f64 = radius.iter().filter(|&&r| r <= config.inner_radius).sum();
    let neg_area: f64 = radius
        .iter()
        .filter(|&&r| r >= config.gap_radius && r <= config.outer_radius)
        .sum();
    if pos_area <= 0.0 || neg_area <= 0.0 {
        return Err(Error::Config("grid too coarse: a labelled region contains no cell centre".into()));
    }
    let mass: Vec<[f64; 2]> = radius
        .iter()
        .map(|&r| {
            if r <= config.inner_radius {
                [0.0, config.class_balance * r / pos_area]
            } else if r >= config.gap_radius {
                [(1.0 - config.class_balance) * r / neg_area, 0.0]
            } else {
                [0.0, 0.0]
            }
        })
        .collect();

    let (a, b) = (config.a, config.b);
    let label = |positive: bool| -> Label { if positive { 1 } else { -1 } };
    let xy = |p: &Point| {
        let c = p.coords.as_ref().expect("annulus points have coordinates");
        (c[0], c[1])
    };
    let f = Hypothesis::new(
        "f",
        points.iter().map(|p| { let (x, y) = xy(p); label(y >= a * x * x - b) }).collect(),
    );
    let f_prime = Hypothesis::new(
        "f_prime",
        points.iter().map(|p| { let (x, y) = xy(p); label(y <= -a * x * x + b) }).collect(),
    );
    let mut hypotheses = vec![f, f_prime];
    for j in 1..=config.extra_rotations {
        let phi = j as f64 * PI / (config.extra_rotations + 1) as f64;
        let (s, c) = phi.sin_cos();
        let h = Hypothesis::new(
            format!("f_rot{j}"),
            points
                .iter()
                .map(|p| {
                    let (x, y) = xy(p);
                    // Rotate the point by -phi and test against f.
                    let (u, v) = (c * x + s * y, -s * x + c * y);
                    label(v >= a * u * u - b)
                })
                .collect(),
        );
        if !hypotheses.iter().any(|g| g.labels == h.labels) {
            hypotheses.push(h);
        }
    }

    let world = World::with_metric(points, config.cost_scale, mass)?;
    Problem::new(world, HypothesisClass::new(hypotheses)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RedundantConfig {
    /// Points per axis in each of the two feature blocks.
    pub grid: usize,
    /// Cost per unit step in block A.
    pub cost_scale_a: f64,
    /// Cost per unit step in block B.
    pub cost_scale_b: f64,
    pub class_balance: f64,
}

impl Default for RedundantConfig {
    fn default() -> Self {
        RedundantConfig {
            grid: 4,
            cost_scale_a: 1.5,
            cost_scale_b: 1.5,
            class_balance: 0.5,
        }
    }
}

impl RedundantConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 2 {
            return Err(Error::Config("grid must have at least 2 points per block".into()));
        }
        for s in [self.cost_scale_a, self.cost_scale_b] {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Config("block cost scales must be positive and finite".into()));
            }
        }
        if !(self.class_balance > 0.0 && self.class_balance < 1.0) {
            return Err(Error::Config("class_balance must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Two feature blocks, each a one-dimensional grid `0..grid`, carrying the
/// same signal. Positive mass sits uniformly where both blocks read high
/// (`≥ grid / 2`), negative mass where both read low. `f_A` thresholds
/// block A, `f_B` block B; cost is additive across blocks.
pub fn gen_redundant(config: &RedundantConfig) -> Result<Problem> {
    config.validate()?;
    let g = config.grid;
    let t = g.div_ceil(2);
    let cells: Vec<(usize, usize)> = (0..g).flat_map(|a| (0..g).map(move |b| (a, b))).collect();
    let points: Vec<Point> = cells
        .iter()
        .map(|&(a, b)| Point::new(format!("a{a}b{b}"), Some(vec![a as f64, b as f64])))
        .collect();
    let cost = CostMatrix::from_fn(cells.len(), |i, j| {
        let (a0, b0) = cells[i];
        let (a1, b1) = cells[j];
        config.cost_scale_a * a0.abs_diff(a1) as f64 + config.cost_scale_b * b0.abs_diff(b1) as f64
    });
    let high = (g - t) * (g - t);
    let low = t * t;
    let mass = cells
        .iter()
        .map(|&(a, b)| {
            if a >= t && b >= t {
                [0.0, config.class_balance / high as f64]
            } else if a < t && b < t {
                [(1.0 - config.class_balance) / low as f64, 0.0]
            } else {
                [0.0, 0.0]
            }
        })
        .collect();
    let sign = |on: bool| -> Label { if on { 1 } else { -1 } };
    let f_a = Hypothesis::new("f_A", cells.iter().map(|&(a, _)| sign(a >= t)).collect());
    let f_b = Hypothesis::new("f_B", cells.iter().map(|&(_, b)| sign(b >= t)).collect());
    let world = World::new(points, cost, mass)?;
    Problem::new(world, HypothesisClass::new(vec![f_a, f_b])?)
}

/// Small random world for property tests: up to `max_points` points, up to
/// `max_hypotheses` distinct hypotheses, costs in [0, 3] (a share of them
/// snapped to multiples of 0.5 so thresholds and ties get exercised) and
/// masses with some exact zeros.
pub fn random_world(seed: u64, index: u64, max_points: usize, max_hypotheses: usize) -> Problem {
    let mut rng = rng::stream(seed, &[rng::tags::RANDOM_WORLD, index]);
    let below = |rng: &mut dyn RngCore, n: usize| (rng.next_u64() % n as u64) as usize;
    let n = 2 + below(&mut rng, max_points.max(2) - 1);
    let snap = rng::unit_f64(&mut rng) < 0.3;

    let cost = CostMatrix::from_fn(n, |i, j| {
        if i == j {
            return 0.0;
        }
        let u = rng::unit_f64(&mut rng) * 3.0;
        if snap {
            (u * 2.0).round() / 2.0
        } else {
            u
        }
    });

    let mut mass: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let mut cell = [0.0; 2];
            for c in cell.iter_mut() {
                if rng::unit_f64(&mut rng) >= 0.3 {
                    *c = rng::unit_f64(&mut rng);
                }
            }
            cell
        })
        .collect();
    let total: f64 = mass.iter().flatten().sum();
    if total == 0.0 {
        mass[0][0] = 1.0;
    } else {
        for c in mass.iter_mut().flatten() {
            *c /= total;
        }
    }
    let drift: f64 = 1.0 - mass.iter().flatten().sum::<f64>();
    let largest = mass
        .iter()
        .flatten()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .map(|(k, _)| k)
        .unwrap();
    mass[largest / 2][largest % 2] += drift;

    let m = 1 + below(&mut rng, max_hypotheses.max(1));
    let mut hypotheses: Vec<Hypothesis> = Vec::with_capacity(m);
    let mut attempts = 0;
    while hypotheses.len() < m && attempts < 64 {
        attempts += 1;
        let labels: Vec<Label> = (0..n).map(|_| if rng.next_u64() & 1 == 1 { 1 } else { -1 }).collect();
        if hypotheses.iter().all(|h| h.labels != labels) {
            hypotheses.push(Hypothesis::new(format!("h{}", hypotheses.len()), labels));
        }
    }

    let points = (0..n).map(|i| Point::new(format!("x{i}"), None)).collect();
    let world = World::new(points, cost, mass).expect("random world is valid");
    Problem::new(world, HypothesisClass::new(hypotheses).expect("distinct hypotheses"))
        .expect("hypotheses match world")
}

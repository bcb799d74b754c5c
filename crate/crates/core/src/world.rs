//! Finite strategic-classification worlds: points, agent cost, and the joint
//! distribution over (point, label), together with hypothesis classes,
//! mixtures over them, and sampled datasets.
//!
//! Labels are `i8` values in {-1, +1}. The joint distribution is a dense
//! table `mass[i][slot]` where slot 0 holds y = -1 and slot 1 holds y = +1.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Absolute tolerance used for normalisation checks.
pub const NORMALISATION_TOL: f64 = 1e-12;

pub type Label = i8;

/// Maps a label to its slot in a mass row.
#[inline]
pub fn label_slot(y: Label) -> usize {
    if y > 0 {
        1
    } else {
        0
    }
}

#[inline]
pub fn slot_label(slot: usize) -> Label {
    if slot == 1 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub id: String,
    pub coords: Option<Vec<f64>>,
}

impl Point {
    pub fn new(id: impl Into<String>, coords: Option<Vec<f64>>) -> Self {
        Point {
            id: id.into(),
            coords,
        }
    }
}

/// Dense square cost matrix, row-major. `get(i, j)` is the cost for an
/// agent at point `i` to present as point `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "cost row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(CostMatrix { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CostMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}

/// `cost[i][j] = scale * ||coords_i - coords_j||_2`.
pub fn cost_from_metric(coords: &[Vec<f64>], scale: f64) -> Result<CostMatrix> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "metric scale must be positive, got {scale}"
        )));
    }
    if let Some(first) = coords.first() {
        let dim = first.len();
        if let Some((index, c)) = coords.iter().enumerate().find(|(_, c)| c.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: c.len(),
                index,
            });
        }
    }
    let n = coords.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = coords[i]
                .iter()
                .zip(&coords[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let c = scale * d2.sqrt();
            data[i * n + j] = c;
            data[j * n + i] = c;
        }
    }
    Ok(CostMatrix { n, data })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub code: String,
    pub message: String,
}

/// Every invariant violation found in a world; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub(crate) fn push(&mut self, code: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            code: code.to_string(),
            message: message.into(),
        });
    }

    pub(crate) fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidWorld(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{}: {}", v.code, v.message))
            .collect();
        write!(f, "{}", codes.join("; "))
    }
}

/// A finite feature space with agent costs and a joint distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    points: Vec<Point>,
    cost: CostMatrix,
    mass: Vec<[f64; 2]>,
    metric_scale: Option<f64>,
}

impl World {
    /// Builds and validates a world.
    pub fn new(points: Vec<Point>, cost: CostMatrix, mass: Vec<[f64; 2]>) -> Result<Self> {
        let world = Self::from_parts_unchecked(points, cost, mass);
        validate_world(&world).into_result()?;
        Ok(world)
    }

    /// Builds a world whose cost is `scale` times Euclidean distance.
    pub fn with_metric(points: Vec<Point>, scale: f64, mass: Vec<[f64; 2]>) -> Result<Self> {
        let coords: Vec<Vec<f64>> = points
            .iter()
            .map(|p| p.coords.clone().ok_or(Error::NoCoords))
            .collect::<Result<_>>()?;
        let cost = cost_from_metric(&coords, scale)?;
        let mut world = Self::new(points, cost, mass)?;
        world.metric_scale = Some(scale);
        Ok(world)
    }

    /// Assembles a world without checking invariants. Intended for feeding
    /// [`validate_world`]; every other operation assumes a valid world.
    pub fn from_parts_unchecked(points: Vec<Point>, cost: CostMatrix, mass: Vec<[f64; 2]>) -> Self {
        World {
            points,
            cost,
            mass,
            metric_scale: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn cost(&self) -> &CostMatrix {
        &self.cost
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.cost.get(i, j)
    }

    pub fn mass(&self) -> &[[f64; 2]] {
        &self.mass
    }

    #[inline]
    pub fn mass_of(&self, i: usize, y: Label) -> f64 {
        self.mass[i][label_slot(y)]
    }

    pub fn point_mass(&self, i: usize) -> f64 {
        self.mass[i][0] + self.mass[i][1]
    }

    pub fn metric_scale(&self) -> Option<f64> {
        self.metric_scale
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    pub fn id_index(&self) -> HashMap<&str, usize> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.as_str(), i))
            .collect()
    }

    /// 2-D coordinates of every point, if all points carry them.
    pub fn coords_2d(&self) -> Option<Vec<[f64; 2]>> {
        self.points
            .iter()
            .map(|p| match p.coords.as_deref() {
                Some([x, y]) => Some([*x, *y]),
                _ => None,
            })
            .collect()
    }

    /// Probability of `members × {y}`.
    pub fn set_mass(&self, members: &[bool], y: Label) -> f64 {
        let slot = label_slot(y);
        members
            .iter()
            .zip(&self.mass)
            .filter(|(m, _)| **m)
            .map(|(_, row)| row[slot])
            .sum()
    }
}

/// Checks every world invariant and reports all violations.
pub fn validate_world(world: &World) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = world.points.len();
    if n == 0 {
        report.push("EMPTY_WORLD", "world has no points");
    }

    let mut seen = HashSet::new();
    for p in &world.points {
        if !seen.insert(p.id.as_str()) {
            report.push("DUPLICATE_POINT_ID", format!("point id {:?} repeated", p.id));
        }
    }

    let dims: Vec<Option<usize>> = world
        .points
        .iter()
        .map(|p| p.coords.as_ref().map(Vec::len))
        .collect();
    if let Some(first) = dims.first() {
        if let Some(i) = dims.iter().position(|d| d != first) {
            report.push(
                "COORD_DIMENSION_MISMATCH",
                format!("point {i} coordinates differ in dimension from point 0"),
            );
        }
    }
    if world
        .points
        .iter()
        .flat_map(|p| p.coords.iter().flatten())
        .any(|c| !c.is_finite())
    {
        report.push("NON_FINITE", "non-finite coordinate");
    }

    if world.cost.len() != n {
        report.push(
            "COST_SHAPE",
            format!("cost matrix is {0}x{0}, expected {n}x{n}", world.cost.len()),
        );
    } else {
        let mut bad_self = 0;
        let mut negative = 0;
        let mut non_finite = 0;
        for i in 0..n {
            for j in 0..n {
                let c = world.cost.get(i, j);
                if !c.is_finite() {
                    non_finite += 1;
                } else if c < 0.0 {
                    negative += 1;
                } else if i == j && c != 0.0 {
                    bad_self += 1;
                }
            }
        }
        if bad_self > 0 {
            report.push("NONZERO_SELF_COST", format!("{bad_self} diagonal entries are non-zero"));
        }
        if negative > 0 {
            report.push("NEGATIVE_COST", format!("{negative} cost entries are negative"));
        }
        if non_finite > 0 {
            report.push("NON_FINITE", format!("{non_finite} cost entries are not finite"));
        }
    }

    if world.mass.len() != n {
        report.push(
            "MASS_SHAPE",
            format!("mass table has {} rows, expected {n}", world.mass.len()),
        );
    }
    let flat = world.mass.iter().flatten();
    if flat.clone().any(|m| !m.is_finite()) {
        report.push("NON_FINITE", "non-finite mass entry");
    } else {
        if flat.clone().any(|m| *m < 0.0) {
            report.push("NEGATIVE_MASS", "mass entries must be non-negative");
        }
        let total: f64 = flat.sum();
        if (total - 1.0).abs() > NORMALISATION_TOL {
            report.push("MASS_NOT_NORMALISED", format!("total mass is {total}"));
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub name: String,
    pub labels: Vec<Label>,
}

impl Hypothesis {
    pub fn new(name: impl Into<String>, labels: Vec<Label>) -> Self {
        Hypothesis {
            name: name.into(),
            labels,
        }
    }

    /// Constant classifier over `n` points.
    pub fn constant(name: impl Into<String>, n: usize, y: Label) -> Self {
        Hypothesis::new(name, vec![y; n])
    }

    #[inline]
    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }
}

/// Ordered, non-empty family of distinct hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisClass {
    hypotheses: Vec<Hypothesis>,
}

impl HypothesisClass {
    pub fn new(hypotheses: Vec<Hypothesis>) -> Result<Self> {
        let report = validate_class(&hypotheses, None);
        report.into_result()?;
        Ok(HypothesisClass { hypotheses })
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn get(&self, k: usize) -> &Hypothesis {
        &self.hypotheses[k]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Hypothesis> {
        self.hypotheses.iter()
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.hypotheses.iter().position(|h| h.name == name)
    }

    /// Restricts the class to the given indices, in order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let picked = indices
            .iter()
            .map(|&k| {
                self.hypotheses.get(k).cloned().ok_or(Error::Index {
                    index: k,
                    len: self.hypotheses.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        HypothesisClass::new(picked)
    }
}

fn validate_class(hypotheses: &[Hypothesis], n_points: Option<usize>) -> ValidationReport {
    let mut report = ValidationReport::default();
    if hypotheses.is_empty() {
        report.push("EMPTY_CLASS", "hypothesis class is empty");
    }
    let mut seen: HashMap<&[Label], &str> = HashMap::new();
    for h in hypotheses {
        if let Some(n) = n_points {
            if h.labels.len() != n {
                report.push(
                    "HYPOTHESIS_LENGTH",
                    format!("hypothesis {:?} has {} labels, world has {n} points", h.name, h.labels.len()),
                );
            }
        }
        if h.labels.iter().any(|&y| y != 1 && y != -1) {
            report.push(
                "HYPOTHESIS_LABEL",
                format!("hypothesis {:?} has labels outside {{-1, 1}}", h.name),
            );
        }
        if let Some(prev) = seen.insert(h.labels.as_slice(), h.name.as_str()) {
            report.push(
                "DUPLICATE_HYPOTHESIS",
                format!("hypotheses {prev:?} and {:?} have identical labels", h.name),
            );
        }
    }
    report
}

/// A randomised (Gibbs) classifier: a distribution over a hypothesis class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mixture {
    weights: Vec<f64>,
}

impl Mixture {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidMixture("no weights".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidMixture("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALISATION_TOL {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(Mixture { weights })
    }

    pub fn point_mass(k: usize, m: usize) -> Result<Self> {
        if k >= m {
            return Err(Error::Index { index: k, len: m });
        }
        let mut w = vec![0.0; m];
        w[k] = 1.0;
        Ok(Mixture { weights: w })
    }

    /// Uniform over the listed (distinct) members of a class of size `m`.
    pub fn uniform_over(members: &[usize], m: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidMixture("empty support".into()));
        }
        let mut w = vec![0.0; m];
        let share = 1.0 / members.len() as f64;
        for &k in members {
            if k >= m {
                return Err(Error::Index { index: k, len: m });
            }
            w[k] += share;
        }
        Mixture::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn check_class(&self, class: &HypothesisClass) -> Result<()> {
        if self.weights.len() != class.len() {
            return Err(Error::InvalidMixture(format!(
                "mixture has {} weights, class has {} hypotheses",
                self.weights.len(),
                class.len()
            )));
        }
        Ok(())
    }
}

/// Sampled training set of (point index, label) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub items: Vec<(usize, Label)>,
    pub seed: u64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn check_world(&self, world: &World) -> Result<()> {
        match self.items.iter().find(|(i, _)| *i >= world.len()) {
            Some(&(index, _)) => Err(Error::Index {
                index,
                len: world.len(),
            }),
            None => Ok(()),
        }
    }

    pub fn to_csv(&self, world: &World) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["point", "label"]).map_err(csv_err)?;
        for &(i, y) in &self.items {
            w.write_record([world.points()[i].id.as_str(), &y.to_string()])
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Reads a `point,label` CSV, resolving point ids against `world`.
    /// Unknown ids and bad labels are reported as an invalid world.
    pub fn from_csv(text: &str, world: &World) -> Result<Self> {
        let ids = world.id_index();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader.headers().map_err(csv_err)?.clone();
        if headers.iter().collect::<Vec<_>>() != ["point", "label"] {
            return Err(Error::parse("line 1", "dataset header must be \"point,label\""));
        }
        let mut items = Vec::new();
        let mut report = ValidationReport::default();
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(csv_err)?;
            let line = row + 2;
            let id = record.get(0).unwrap_or_default();
            let label: Label = match record.get(1).unwrap_or_default().trim() {
                "1" | "+1" => 1,
                "-1" => -1,
                other => {
                    report.push("DATASET_LABEL", format!("line {line}: bad label {other:?}"));
                    continue;
                }
            };
            match ids.get(id) {
                Some(&i) => items.push((i, label)),
                None => report.push("UNKNOWN_POINT", format!("line {line}: unknown point id {id:?}")),
            }
        }
        report.into_result()?;
        Ok(Dataset { items, seed: 0 })
    }
}

fn csv_err(e: csv::Error) -> Error {
    let location = e
        .position()
        .map(|p| format!("line {}", p.line()))
        .unwrap_or_else(|| "unknown".into());
    Error::parse(location, e.to_string())
}

/// Draws `n` i.i.d. (point, label) pairs from the world's joint table.
///
/// Cells are enumerated as (point 0, -1), (point 0, +1), (point 1, -1), ...
/// and each draw inverts the cumulative distribution at a uniform taken
/// from a counter-based stream keyed by `seed`; draw `j` depends only on
/// `(seed, j)`.
pub fn sample_dataset(world: &World, n: usize, seed: u64) -> Result<Dataset> {
    validate_world(world).into_result()?;
    let mut stream = rng::stream(seed, &[rng::tags::DATASET]);
    let sampler = CellSampler::new(world);
    let items = (0..n).map(|_| sampler.draw(&mut stream)).collect();
    Ok(Dataset { items, seed })
}

/// Inverse-CDF sampler over the joint mass table.
#[derive(Debug, Clone)]
pub struct CellSampler {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl CellSampler {
    pub fn new(world: &World) -> Self {
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(world.len() * 2);
        let mut last_positive = 0;
        for (cell, m) in world.mass().iter().flatten().enumerate() {
            acc += m;
            cumulative.push(acc);
            if *m > 0.0 {
                last_positive = cell;
            }
        }
        CellSampler {
            cumulative,
            last_positive,
        }
    }

    pub fn draw(&self, rng: &mut impl RngCore) -> (usize, Label) {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let u = rng::unit_f64(rng) * total;
        let cell = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.last_positive);
        (cell / 2, slot_label(cell % 2))
    }
}

/// A world bundled with the hypothesis class declared alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub world: World,
    pub class: HypothesisClass,
}

impl Problem {
    pub fn new(world: World, class: HypothesisClass) -> Result<Self> {
        let report = validate_class(class.hypotheses(), Some(world.len()));
        report.into_result()?;
        Ok(Problem { world, class })
    }

    pub fn hypothesis_index(&self, name: &str) -> Result<usize> {
        self.class
            .index_of(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown hypothesis {name:?}")))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldDoc {
    points: Vec<PointDoc>,
    cost: CostDoc,
    distribution: Vec<MassDoc>,
    #[serde(default)]
    hypotheses: Vec<HypothesisDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum CostDoc {
    Matrix { matrix: Vec<Vec<f64>> },
    ScaledEuclidean { scale: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MassDoc {
    point: String,
    label: i64,
    prob: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypothesisDoc {
    name: String,
    labels: Vec<i64>,
}

/// Parses and validates a world document (JSON).
pub fn parse_world(document: &str) -> Result<Problem> {
    let doc: WorldDoc = serde_json::from_str(document).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;

    let points: Vec<Point> = doc
        .points
        .into_iter()
        .map(|p| Point::new(p.id, p.coords))
        .collect();
    let n = points.len();

    let mut report = ValidationReport::default();
    let (cost, metric_scale) = match doc.cost {
        CostDoc::Matrix { matrix } => {
            if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                report.push("COST_SHAPE", format!("cost matrix must be {n}x{n}"));
                return Err(Error::InvalidWorld(report));
            }
            (CostMatrix::from_rows(matrix)?, None)
        }
        CostDoc::ScaledEuclidean { scale } => {
            let coords: Vec<Vec<f64>> = points
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    p.coords.clone().ok_or_else(|| {
                        Error::parse("cost", format!("scaled_euclidean cost needs coords on point {i}"))
                    })
                })
                .collect::<Result<_>>()?;
            (cost_from_metric(&coords, scale)?, Some(scale))
        }
    };

    let ids: HashMap<&str, usize> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();
    let mut mass = vec![[0.0; 2]; n];
    let mut filled = HashSet::new();
    for entry in &doc.distribution {
        let Some(&i) = ids.get(entry.point.as_str()) else {
            report.push("UNKNOWN_POINT", format!("distribution references {:?}", entry.point));
            continue;
        };
        let y: Label = match entry.label {
            1 => 1,
            -1 => -1,
            other => {
                report.push("BAD_LABEL", format!("distribution label {other} not in {{-1, 1}}"));
                continue;
            }
        };
        if !filled.insert((i, y)) {
            report.push(
                "DUPLICATE_MASS_ENTRY",
                format!("repeated entry for ({:?}, {y})", entry.point),
            );
            continue;
        }
        mass[i][label_slot(y)] = entry.prob;
    }

    let hypotheses: Vec<Hypothesis> = doc
        .hypotheses
        .into_iter()
        .map(|h| {
            let labels = h
                .labels
                .iter()
                .map(|&y| match y {
                    1 => 1,
                    -1 => -1,
                    _ => 0,
                })
                .collect();
            Hypothesis::new(h.name, labels)
        })
        .collect();

    let mut world = World::from_parts_unchecked(points, cost, mass);
    world.metric_scale = metric_scale;
    let world_report = validate_world(&world);
    report.violations.extend(world_report.violations);
    report
        .violations
        .extend(validate_class(&hypotheses, Some(n)).violations);
    report.into_result()?;

    Ok(Problem {
        world,
        class: HypothesisClass { hypotheses },
    })
}

/// Serialises a problem to the world document format. Zero-mass cells are
/// omitted; metric costs are written as `scaled_euclidean`.
pub fn serialize_world(problem: &Problem) -> String {
    let world = &problem.world;
    let cost = match world.metric_scale {
        Some(scale) => CostDoc::ScaledEuclidean { scale },
        None => CostDoc::Matrix {
            matrix: world.cost.to_rows(),
        },
    };
    let mut distribution = Vec::new();
    for (i, row) in world.mass.iter().enumerate() {
        for slot in 0..2 {
            if row[slot] != 0.0 {
                distribution.push(MassDoc {
                    point: world.points[i].id.clone(),
                    label: slot_label(slot) as i64,
                    prob: row[slot],
                });
            }
        }
    }
    let doc = WorldDoc {
        points: world
            .points
            .iter()
            .map(|p| PointDoc {
                id: p.id.clone(),
                coords: p.coords.clone(),
            })
            .collect(),
        cost,
        distribution,
        hypotheses: problem
            .class
            .iter()
            .map(|h| HypothesisDoc {
                name: h.name.clone(),
                labels: h.labels.iter().map(|&y| y as i64).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("world document serialises")
}

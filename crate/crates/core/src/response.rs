//! Agent best responses and the gaming-set constructions.
//!
//! An agent at `x` facing a vote function `v` (a classifier's label, or the
//! expected label under a mixture) weighs each destination `z` by
//! `v(z) - c(x, z)`. It moves only when some destination improves on staying
//! by more than [`TAU`]; among the (near-)maximisers it takes the cheapest,
//! then the lowest index.
//!
//! The set predicates below evaluate the very same utility differences as
//! the best-response routine, so `{x : Δ_f(x) ≠ x}` coincides with the
//! gaming set bit-for-bit.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::world::{Hypothesis, HypothesisClass, Label, Mixture, World};

/// Strict-improvement tolerance for moving.
pub const TAU: f64 = 1e-12;

/// Utility gain of presenting at a point with vote `to_vote` for `cost`,
/// relative to staying put with vote `from_vote`.
#[inline]
pub fn gain(to_vote: f64, cost: f64, from_vote: f64) -> f64 {
    (to_vote - cost) - from_vote
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseMap {
    target: Vec<usize>,
    moved: Vec<bool>,
}

impl ResponseMap {
    pub fn identity(n: usize) -> Self {
        ResponseMap {
            target: (0..n).collect(),
            moved: vec![false; n],
        }
    }

    pub fn from_targets(target: Vec<usize>) -> Result<Self> {
        let n = target.len();
        if let Some(&bad) = target.iter().find(|&&t| t >= n) {
            return Err(Error::Index { index: bad, len: n });
        }
        let moved = target.iter().enumerate().map(|(i, &t)| t != i).collect();
        Ok(ResponseMap { target, moved })
    }

    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    #[inline]
    pub fn target(&self, i: usize) -> usize {
        self.target[i]
    }

    pub fn targets(&self) -> &[usize] {
        &self.target
    }

    pub fn moved(&self) -> &[bool] {
        &self.moved
    }

    pub fn is_identity(&self) -> bool {
        !self.moved.iter().any(|&m| m)
    }

    pub fn to_json(&self, world: &World) -> Value {
        let ids = world.points();
        Value::Array(
            self.target
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    json!({ "point": ids[i].id, "target": ids[t].id, "moved": self.moved[i] })
                })
                .collect(),
        )
    }
}

/// `E_{f~Q}[f(x_point)]`.
pub fn expected_vote(q: &Mixture, class: &HypothesisClass, point: usize) -> Result<f64> {
    q.check_class(class)?;
    let n = class.get(0).labels.len();
    if point >= n {
        return Err(Error::Index { index: point, len: n });
    }
    Ok(vote_at(q, class, point))
}

#[inline]
fn vote_at(q: &Mixture, class: &HypothesisClass, point: usize) -> f64 {
    q.weights()
        .iter()
        .zip(class.iter())
        .map(|(w, h)| w * f64::from(h.label(point)))
        .sum()
}

/// Expected vote at every point.
pub fn votes(q: &Mixture, class: &HypothesisClass) -> Result<Vec<f64>> {
    q.check_class(class)?;
    let n = class.get(0).labels.len();
    Ok((0..n).map(|i| vote_at(q, class, i)).collect())
}

/// Canonical best response to an arbitrary vote function.
pub fn best_response_to_votes(world: &World, votes: &[f64]) -> Result<ResponseMap> {
    let n = world.len();
    if votes.len() != n {
        return Err(Error::InvalidArgument(format!(
            "vote vector has {} entries, world has {n} points",
            votes.len()
        )));
    }
    let top = votes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut target: Vec<usize> = (0..n).collect();
    for (i, t) in target.iter_mut().enumerate() {
        let here = votes[i];
        if here >= top {
            continue;
        }
        let row = world.cost().row(i);
        let best = row
            .iter()
            .zip(votes)
            .map(|(&c, &v)| gain(v, c, here))
            .fold(f64::NEG_INFINITY, f64::max);
        if best <= TAU {
            continue;
        }
        let mut pick = i;
        let mut pick_cost = f64::INFINITY;
        for (z, (&c, &v)) in row.iter().zip(votes).enumerate() {
            if best - gain(v, c, here) <= TAU && c < pick_cost {
                pick = z;
                pick_cost = c;
            }
        }
        *t = pick;
    }
    ResponseMap::from_targets(target)
}

fn labels_as_votes(world: &World, f: &Hypothesis) -> Result<Vec<f64>> {
    if f.labels.len() != world.len() {
        return Err(Error::InvalidArgument(format!(
            "hypothesis {:?} has {} labels, world has {} points",
            f.name,
            f.labels.len(),
            world.len()
        )));
    }
    Ok(f.labels.iter().map(|&y| f64::from(y)).collect())
}

/// Best response `Δ_f` to a deterministic classifier.
pub fn best_response_det(world: &World, f: &Hypothesis) -> Result<ResponseMap> {
    best_response_to_votes(world, &labels_as_votes(world, f)?)
}

/// Best response `Δ_Q` to a randomised classifier.
pub fn best_response_mix(world: &World, class: &HypothesisClass, q: &Mixture) -> Result<ResponseMap> {
    best_response_to_votes(world, &votes(q, class)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SetRole {
    /// Points that would game the classifier.
    G,
    /// Points that can game it for cost below 1.
    C,
    /// Points that can game it, but only expensively.
    E,
    /// Points that can game both classifiers at once.
    GJoint,
    /// Points that can game each classifier but not both at once.
    N,
    /// Points positively classified by exactly one of the pair.
    HHalf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    pub members: Vec<bool>,
    pub role: SetRole,
}

impl PointSet {
    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn indices(&self) -> Vec<usize> {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members[i]
    }

    pub fn ids<'w>(&self, world: &'w World) -> Vec<&'w str> {
        self.indices()
            .into_iter()
            .map(|i| world.points()[i].id.as_str())
            .collect()
    }

    pub fn to_json(&self, world: &World) -> Value {
        json!(self.ids(world))
    }
}

fn check_len(world: &World, f: &Hypothesis) -> Result<()> {
    labels_as_votes(world, f).map(|_| ())
}

/// Whether some destination satisfying `dest` yields a gain above TAU.
fn reaches(world: &World, i: usize, to_vote: f64, from_vote: f64, dest: impl Fn(usize) -> bool) -> bool {
    world
        .cost()
        .row(i)
        .iter()
        .enumerate()
        .any(|(z, &c)| dest(z) && gain(to_vote, c, from_vote) > TAU)
}

fn solo_set(world: &World, f: &Hypothesis, to_vote: f64, role: SetRole) -> Result<PointSet> {
    check_len(world, f)?;
    let members = (0..world.len())
        .map(|i| f.label(i) < 0 && reaches(world, i, to_vote, -1.0, |z| f.label(z) > 0))
        .collect();
    Ok(PointSet { members, role })
}

/// `G_f`: negatively classified points with a positive destination at cost < 2.
pub fn gaming_set(world: &World, f: &Hypothesis) -> Result<PointSet> {
    solo_set(world, f, 1.0, SetRole::G)
}

/// `C_f`: negatively classified points with a positive destination at cost < 1.
pub fn cheap_set(world: &World, f: &Hypothesis) -> Result<PointSet> {
    solo_set(world, f, 0.0, SetRole::C)
}

/// `E_f = G_f ⊕ C_f`.
pub fn expensive_set(world: &World, f: &Hypothesis) -> Result<PointSet> {
    let g = gaming_set(world, f)?;
    let c = cheap_set(world, f)?;
    Ok(PointSet {
        members: g.members.iter().zip(&c.members).map(|(a, b)| a ^ b).collect(),
        role: SetRole::E,
    })
}

#[inline]
fn both(f: &Hypothesis, g: &Hypothesis, i: usize, y: Label) -> bool {
    f.label(i) == y && g.label(i) == y
}

/// `G_{f,f'}`: doubly negative points with a doubly positive destination at cost < 2.
pub fn joint_gaming_set(world: &World, f: &Hypothesis, g: &Hypothesis) -> Result<PointSet> {
    check_len(world, f)?;
    check_len(world, g)?;
    let members = (0..world.len())
        .map(|i| both(f, g, i, -1) && reaches(world, i, 1.0, -1.0, |z| both(f, g, z, 1)))
        .collect();
    Ok(PointSet {
        members,
        role: SetRole::GJoint,
    })
}

/// `N_{f,f'} = (G_f ∩ G_{f'}) \ G_{f,f'}`.
pub fn nonsimultaneous_set(world: &World, f: &Hypothesis, g: &Hypothesis) -> Result<PointSet> {
    let gf = gaming_set(world, f)?;
    let gg = gaming_set(world, g)?;
    let joint = joint_gaming_set(world, f, g)?;
    let members = (0..world.len())
        .map(|i| gf.members[i] && gg.members[i] && !joint.members[i])
        .collect();
    Ok(PointSet {
        members,
        role: SetRole::N,
    })
}

/// Points where exactly one of the pair votes positive.
pub fn half_positive_set(world: &World, f: &Hypothesis, g: &Hypothesis) -> Result<PointSet> {
    check_len(world, f)?;
    check_len(world, g)?;
    Ok(PointSet {
        members: (0..world.len()).map(|i| f.label(i) != g.label(i)).collect(),
        role: SetRole::HHalf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AdmissibilityReason {
    /// Cheaply games the first classifier, can game the second, but not both at once.
    CheapSoloFirst,
    /// Same with the roles swapped.
    CheapSoloSecond,
    /// Positive under one classifier, cheaply gameable for the other, but
    /// no jointly positive destination at cost below 1.
    HalfPositive,
    /// Can reach a jointly positive point, yet a half-positive point is at
    /// least as attractive under the uniform mixture.
    JointNotPreferred,
    /// Cheaply games one classifier and only expensively the other; such
    /// points are counted in `E_f ⊕ E_f'` yet move under every response.
    MixedCheapness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub violating_points: Vec<(usize, AdmissibilityReason)>,
}

/// Checks, on every positive-mass point, the conditions under which the
/// uniform pair mixture moves agents exactly as the pair risk
/// decomposition assumes:
///
/// - (a) `C_f ∩ G_{f'} ⊆ G_{f,f'}` and (b) the same with roles swapped;
/// - (c) a point positive under one classifier and in the cheap set of the
///   other also reaches a jointly positive point at cost below 1;
/// - (d) a doubly negative point in `G_{f,f'}` strictly prefers its best
///   jointly positive destination to every half-positive one;
/// - (e) no point lies in `C_f ∩ E_{f'}` or `E_f ∩ C_{f'}`.
pub fn admissibility_check(world: &World, f: &Hypothesis, g: &Hypothesis) -> Result<AdmissibilityReport> {
    let cf = cheap_set(world, f)?;
    let cg = cheap_set(world, g)?;
    let gf = gaming_set(world, f)?;
    let gg = gaming_set(world, g)?;
    let joint = joint_gaming_set(world, f, g)?;

    let jointly_positive = |z: usize| both(f, g, z, 1);
    let half = |z: usize| f.label(z) != g.label(z);

    let mut violating = Vec::new();
    for i in 0..world.len() {
        if world.point_mass(i) <= 0.0 {
            continue;
        }
        if cf.members[i] && gg.members[i] && !joint.members[i] {
            violating.push((i, AdmissibilityReason::CheapSoloFirst));
        }
        if cg.members[i] && gf.members[i] && !joint.members[i] {
            violating.push((i, AdmissibilityReason::CheapSoloSecond));
        }
        let expensive_f = gf.members[i] && !cf.members[i];
        let expensive_g = gg.members[i] && !cg.members[i];
        if (cf.members[i] && expensive_g) || (expensive_f && cg.members[i]) {
            violating.push((i, AdmissibilityReason::MixedCheapness));
        }
        let half_cheap = (f.label(i) > 0 && cg.members[i]) || (g.label(i) > 0 && cf.members[i]);
        if half_cheap && !reaches(world, i, 1.0, 0.0, jointly_positive) {
            violating.push((i, AdmissibilityReason::HalfPositive));
        }
        if joint.members[i] {
            let row = world.cost().row(i);
            let best = |dest: &dyn Fn(usize) -> bool, to_vote: f64| {
                row.iter()
                    .enumerate()
                    .filter(|(z, _)| dest(*z))
                    .map(|(_, &c)| gain(to_vote, c, -1.0))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let best_joint = best(&jointly_positive, 1.0);
            let best_half = best(&half, 0.0);
            // Both sides may be -inf, giving NaN, which must count as a violation.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(best_joint - best_half > TAU) {
                violating.push((i, AdmissibilityReason::JointNotPreferred));
            }
        }
    }
    Ok(AdmissibilityReport {
        admissible: violating.is_empty(),
        violating_points: violating,
    })
}

//! Brute-force reference computations written directly from the
//! definitions, shared by the integration tests.

#![allow(dead_code)]

use stratlab::world::{Hypothesis, World};

/// `{x : f(x) = -1, ∃ z with f(z) = +1 and c(x, z) < bound}`.
pub fn reach_set(world: &World, f: &Hypothesis, bound: f64) -> Vec<bool> {
    (0..world.len())
        .map(|x| f.label(x) == -1 && (0..world.len()).any(|z| f.label(z) == 1 && world.c(x, z) < bound))
        .collect()
}

pub fn joint_set(world: &World, f: &Hypothesis, g: &Hypothesis) -> Vec<bool> {
    (0..world.len())
        .map(|x| {
            f.label(x) == -1
                && g.label(x) == -1
                && (0..world.len()).any(|z| f.label(z) == 1 && g.label(z) == 1 && world.c(x, z) < 2.0)
        })
        .collect()
}

pub fn mass(world: &World, set: &[bool], y: i8) -> f64 {
    set.iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| world.mass_of(i, y))
        .sum()
}

/// Agent response to a vote vector: maximise `vote(z) - c(x, z)`, moving
/// only for an improvement above 1e-12; near-ties (within 1e-12 of the
/// best) go to the cheapest destination, then the lowest index.
pub fn respond(world: &World, votes: &[f64]) -> Vec<usize> {
    let n = world.len();
    (0..n)
        .map(|x| {
            let gains: Vec<f64> = (0..n).map(|z| (votes[z] - world.c(x, z)) - votes[x]).collect();
            let best = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if best <= 1e-12 {
                return x;
            }
            (0..n)
                .filter(|&z| best - gains[z] <= 1e-12)
                .min_by(|&a, &b| world.c(x, a).total_cmp(&world.c(x, b)).then(a.cmp(&b)))
                .unwrap()
        })
        .collect()
}

/// Expected zero–one loss of a mixture when agents present as `targets`.
pub fn mixture_risk(world: &World, class: &[&Hypothesis], w: &[f64], targets: &[usize]) -> f64 {
    let mut r = 0.0;
    for x in 0..world.len() {
        for y in [-1i8, 1] {
            let p = world.mass_of(x, y);
            if p == 0.0 {
                continue;
            }
            let wrong: f64 = class
                .iter()
                .zip(w)
                .filter(|(h, _)| h.label(targets[x]) != y)
                .map(|(_, w)| w)
                .sum();
            r += p * wrong;
        }
    }
    r
}

pub fn votes(class: &[&Hypothesis], w: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|x| class.iter().zip(w).map(|(h, w)| w * f64::from(h.label(x))).sum())
        .collect()
}

pub fn det_risk(world: &World, f: &Hypothesis) -> f64 {
    let v: Vec<f64> = f.labels.iter().map(|&l| f64::from(l)).collect();
    mixture_risk(world, &[f], &[1.0], &respond(world, &v))
}

//! Zero-one clean and strategic risks, and numerical checks of the risk
//! decompositions for a classifier and for a uniform pair mixture.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::response::{
    admissibility_check, best_response_det, best_response_mix, expensive_set,
    gaming_set, nonsimultaneous_set, ResponseMap,
};
use crate::world::{label_slot, Dataset, Hypothesis, HypothesisClass, Mixture, World};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LossKind {
    ZeroOne,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskReport {
    pub clean_risk: f64,
    pub strategic_risk: f64,
    pub loss_kind: LossKind,
    pub response_provenance: String,
}

fn check_response(world: &World, delta: &ResponseMap) -> Result<()> {
    if delta.len() != world.len() {
        return Err(Error::InvalidArgument(format!(
            "response map covers {} points, world has {}",
            delta.len(),
            world.len()
        )));
    }
    Ok(())
}

/// Population zero-one risk of a single hypothesis when agents present
/// as `delta(x)`.
pub fn hypothesis_risk(world: &World, f: &Hypothesis, delta: &ResponseMap) -> f64 {
    world
        .mass()
        .iter()
        .enumerate()
        .map(|(i, row)| row[label_slot(-f.label(delta.target(i)))])
        .sum()
}

/// `R_Δ(Q) = Σ_k w_k R_Δ(f_k)`.
pub fn strategic_risk(world: &World, class: &HypothesisClass, q: &Mixture, delta: &ResponseMap) -> Result<f64> {
    q.check_class(class)?;
    check_response(world, delta)?;
    Ok(q.weights()
        .iter()
        .zip(class.iter())
        .map(|(w, f)| w * hypothesis_risk(world, f, delta))
        .sum())
}

/// `R(Q)`: risk with no strategic movement.
pub fn clean_risk(world: &World, class: &HypothesisClass, q: &Mixture) -> Result<f64> {
    strategic_risk(world, class, q, &ResponseMap::identity(world.len()))
}

/// Number of dataset items hypothesis `f` gets wrong under `delta`.
pub fn hypothesis_errors(dataset: &Dataset, f: &Hypothesis, delta: &ResponseMap) -> usize {
    dataset
        .items
        .iter()
        .filter(|&&(i, y)| f.label(delta.target(i)) != y)
        .count()
}

/// `r_Δ(Q) = (1/n) Σ_j Σ_k w_k 1[f_k(Δ(x_j)) ≠ y_j]`.
pub fn empirical_strategic_risk(
    dataset: &Dataset,
    class: &HypothesisClass,
    q: &Mixture,
    delta: &ResponseMap,
) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    q.check_class(class)?;
    if let Some(&(index, _)) = dataset.items.iter().find(|(i, _)| *i >= delta.len()) {
        return Err(Error::Index {
            index,
            len: delta.len(),
        });
    }
    let weighted: f64 = q
        .weights()
        .iter()
        .zip(class.iter())
        .map(|(w, f)| w * hypothesis_errors(dataset, f, delta) as f64)
        .sum();
    Ok(weighted / dataset.len() as f64)
}

/// Clean and strategic risk of `q` under its own best response.
pub fn risk_report(world: &World, class: &HypothesisClass, q: &Mixture) -> Result<RiskReport> {
    let delta = best_response_mix(world, class, q)?;
    Ok(RiskReport {
        clean_risk: clean_risk(world, class, q)?,
        strategic_risk: strategic_risk(world, class, q, &delta)?,
        loss_kind: LossKind::ZeroOne,
        response_provenance: format!("best response to mixture {:?}", q.weights()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub simulated: f64,
    pub analytic: f64,
    pub terms: BTreeMap<String, f64>,
    pub residual: f64,
}

/// Compares `R_{Δ_f}(f)` obtained by simulating the best response with
/// `R(f) + P(G_f, y=-1) - P(G_f, y=+1)`.
pub fn decompose_deterministic(world: &World, f: &Hypothesis) -> Result<DecompositionReport> {
    let delta = best_response_det(world, f)?;
    let simulated = hypothesis_risk(world, f, &delta);
    let clean = hypothesis_risk(world, f, &ResponseMap::identity(world.len()));
    let g = gaming_set(world, f)?;
    let g_neg = world.set_mass(&g.members, -1);
    let g_pos = world.set_mass(&g.members, 1);
    let analytic = clean + g_neg - g_pos;
    let terms = BTreeMap::from([
        ("clean".to_string(), clean),
        ("P(G,-1)".to_string(), g_neg),
        ("P(G,+1)".to_string(), g_pos),
    ]);
    Ok(DecompositionReport {
        simulated,
        analytic,
        terms,
        residual: (simulated - analytic).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDecompositionReport {
    /// `R_{Δ_f}(f) + R_{Δ_f'}(f') - 2 R_{Δ_Q}(Q)` by simulation.
    pub lhs: f64,
    /// Set-probability expression over `E_f ⊕ E_f'` and `N_{f,f'}`.
    pub rhs: f64,
    pub residual: f64,
    pub admissible: bool,
    pub terms: BTreeMap<String, f64>,
}

/// Strategic risks of `f`, `g`, and `U{f, g}`, each under its own response.
pub(crate) fn pair_risks(world: &World, f: &Hypothesis, g: &Hypothesis) -> Result<(f64, f64, f64)> {
    let rf = hypothesis_risk(world, f, &best_response_det(world, f)?);
    let rg = hypothesis_risk(world, g, &best_response_det(world, g)?);
    let rq = if f.labels == g.labels {
        rf
    } else {
        let pair = HypothesisClass::new(vec![f.clone(), g.clone()])?;
        let q = Mixture::uniform_over(&[0, 1], 2)?;
        let delta = best_response_mix(world, &pair, &q)?;
        strategic_risk(world, &pair, &q, &delta)?
    };
    Ok((rf, rg, rq))
}

fn xor(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

fn signed_mass(world: &World, members: &[bool]) -> (f64, f64) {
    (world.set_mass(members, -1), world.set_mass(members, 1))
}

/// Checks the identity
/// `R_{Δ_f}(f) + R_{Δ_f'}(f') - 2 R_{Δ_Q}(Q) =
///  P(E_f ⊕ E_f', -1) - P(E_f ⊕ E_f', +1) + 2 P(N, -1) - 2 P(N, +1)`
/// for `Q = U{f, f'}`. The left side is simulated; the residual is only
/// expected to vanish on admissible pairs.
pub fn decompose_pair_mixture(world: &World, f: &Hypothesis, g: &Hypothesis) -> Result<PairDecompositionReport> {
    let (rf, rg, rq) = pair_risks(world, f, g)?;
    let lhs = rf + rg - 2.0 * rq;

    let e_sym = xor(&expensive_set(world, f)?.members, &expensive_set(world, g)?.members);
    let n = nonsimultaneous_set(world, f, g)?;
    let (e_neg, e_pos) = signed_mass(world, &e_sym);
    let (n_neg, n_pos) = signed_mass(world, &n.members);
    let rhs = (e_neg - e_pos) + 2.0 * (n_neg - n_pos);
    let admissible = admissibility_check(world, f, g)?.admissible;

    let terms = BTreeMap::from([
        ("R_f".to_string(), rf),
        ("R_f'".to_string(), rg),
        ("R_Q".to_string(), rq),
        ("P(E_sym,-1)".to_string(), e_neg),
        ("P(E_sym,+1)".to_string(), e_pos),
        ("P(N,-1)".to_string(), n_neg),
        ("P(N,+1)".to_string(), n_pos),
    ]);
    Ok(PairDecompositionReport {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        admissible,
        terms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Report {
    /// `P(E_f \ G_f') + P(E_f' \ G_f)`
    pub lhs: f64,
    /// `P(E_f ⊕ E_f')`
    pub rhs: f64,
    pub residual: f64,
}

pub fn lemma1_check(world: &World, f: &Hypothesis, g: &Hypothesis) -> Result<Lemma1Report> {
    let ef = expensive_set(world, f)?.members;
    let eg = expensive_set(world, g)?.members;
    let gf = gaming_set(world, f)?.members;
    let gg = gaming_set(world, g)?.members;
    let total = |m: &[bool]| -> f64 {
        m.iter()
            .enumerate()
            .filter(|(_, &x)| x)
            .map(|(i, _)| world.point_mass(i))
            .sum()
    };
    let ef_only: Vec<bool> = ef.iter().zip(&gg).map(|(e, g)| *e && !g).collect();
    let eg_only: Vec<bool> = eg.iter().zip(&gf).map(|(e, g)| *e && !g).collect();
    let lhs = total(&ef_only) + total(&eg_only);
    let rhs = total(&xor(&ef, &eg));
    Ok(Lemma1Report {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::fixtures::line3;

    const EPS: f64 = 1e-12;

    #[test]
    fn clean_risks_on_line3() {
        let p = line3();
        let r = |w: Vec<f64>| clean_risk(&p.world, &p.class, &Mixture::new(w).unwrap()).unwrap();
        assert!(r(vec![1.0, 0.0]).abs() < EPS);
        assert!((r(vec![0.0, 1.0]) - 0.4).abs() < EPS);
        assert!((r(vec![0.5, 0.5]) - 0.2).abs() < EPS);
    }

    #[test]
    fn strategic_risks_on_line3() {
        let p = line3();
        for (k, expected) in [(0, 0.3), (1, 0.0)] {
            let q = Mixture::point_mass(k, 2).unwrap();
            let delta = best_response_det(&p.world, p.class.get(k)).unwrap();
            let r = strategic_risk(&p.world, &p.class, &q, &delta).unwrap();
            assert!((r - expected).abs() < EPS, "f{} -> {r}", k + 1);
        }
        let q = Mixture::uniform_over(&[0, 1], 2).unwrap();
        let r = strategic_risk(&p.world, &p.class, &q, &ResponseMap::identity(3)).unwrap();
        assert!((r - 0.2).abs() < EPS);
    }

    #[test]
    fn empirical_risks_on_line3() {
        let p = line3();
        let f1 = Mixture::point_mass(0, 2).unwrap();
        let delta = best_response_det(&p.world, p.class.get(0)).unwrap();
        let d = Dataset {
            items: vec![(0, -1), (1, 1), (1, 1)],
            seed: 0,
        };
        let r = empirical_strategic_risk(&d, &p.class, &f1, &delta).unwrap();
        assert!((r - 1.0 / 3.0).abs() < EPS);

        let q = Mixture::uniform_over(&[0, 1], 2).unwrap();
        let single = Dataset {
            items: vec![(0, -1)],
            seed: 0,
        };
        let id = ResponseMap::identity(3);
        assert_eq!(empirical_strategic_risk(&single, &p.class, &q, &id).unwrap(), 0.0);
        let empty = Dataset {
            items: vec![],
            seed: 0,
        };
        assert_eq!(
            empirical_strategic_risk(&empty, &p.class, &q, &id).unwrap_err().code(),
            "EMPTY_DATASET"
        );
    }

    #[test]
    fn labels_matching_every_hypothesis_give_zero() {
        let p = line3();
        let q = Mixture::uniform_over(&[0, 1], 2).unwrap();
        let d = Dataset {
            items: vec![(0, -1), (2, 1), (2, 1)],
            seed: 0,
        };
        let r = empirical_strategic_risk(&d, &p.class, &q, &ResponseMap::identity(3)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn deterministic_decomposition_on_line3() {
        let p = line3();
        let rep = decompose_deterministic(&p.world, p.class.get(0)).unwrap();
        assert!((rep.simulated - 0.3).abs() < EPS);
        assert!((rep.analytic - 0.3).abs() < EPS);
        assert!(rep.residual < EPS);
        let pos = Hypothesis::constant("pos", 3, 1);
        let rep = decompose_deterministic(&p.world, &pos).unwrap();
        assert_eq!(rep.simulated, rep.terms["clean"]);
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn pair_decomposition_on_line3() {
        let p = line3();
        let rep = decompose_pair_mixture(&p.world, p.class.get(0), p.class.get(1)).unwrap();
        assert!((rep.lhs + 0.1).abs() < EPS, "lhs {}", rep.lhs);
        assert!((rep.rhs + 0.1).abs() < EPS, "rhs {}", rep.rhs);
        assert!(rep.residual < EPS);
        assert!(rep.admissible);
        let same = decompose_pair_mixture(&p.world, p.class.get(0), p.class.get(0)).unwrap();
        assert_eq!(same.lhs, 0.0);
        assert_eq!(same.rhs, 0.0);
    }

    #[test]
    fn lemma1_on_line3() {
        let p = line3();
        let rep = lemma1_check(&p.world, p.class.get(0), p.class.get(1)).unwrap();
        assert!((rep.lhs - 0.7).abs() < EPS);
        assert!((rep.rhs - 0.7).abs() < EPS);
        let same = lemma1_check(&p.world, p.class.get(1), p.class.get(1)).unwrap();
        assert_eq!((same.lhs, same.rhs), (0.0, 0.0));
    }

    #[test]
    fn linearity_in_mixture_weights() {
        let p = line3();
        let delta = best_response_det(&p.world, p.class.get(0)).unwrap();
        let q = Mixture::new(vec![0.3, 0.7]).unwrap();
        let mixed = strategic_risk(&p.world, &p.class, &q, &delta).unwrap();
        let parts: f64 = (0..2)
            .map(|k| {
                q.weights()[k]
                    * strategic_risk(&p.world, &p.class, &Mixture::point_mass(k, 2).unwrap(), &delta).unwrap()
            })
            .sum();
        assert_eq!(mixed, parts);
    }

    #[test]
    fn response_map_length_is_checked() {
        let p = line3();
        let q = Mixture::point_mass(0, 2).unwrap();
        let err = strategic_risk(&p.world, &p.class, &q, &ResponseMap::identity(2)).unwrap_err();
        assert_eq!(err.code(), "INVALID_ARGUMENT");
    }
}

mod common;

use proptest::prelude::*;
use stratlab::response::{
    best_response_det, best_response_mix, cheap_set, expensive_set, gaming_set, joint_gaming_set, nonsimultaneous_set,
    votes,
};
use stratlab::risk::strategic_risk;
use stratlab::scenario::random_world;
use stratlab::world::{parse_world, sample_dataset, serialize_world, Mixture, Problem};

fn world() -> impl Strategy<Value = Problem> {
    (any::<u64>(), 0u64..1000).prop_map(|(seed, k)| random_world(seed, k, 12, 4))
}

fn world_and_weights() -> impl Strategy<Value = (Problem, Vec<f64>)> {
    world().prop_flat_map(|p| {
        let m = p.class.len();
        (Just(p), prop::collection::vec(0u32..20, m))
    })
    .prop_filter_map("zero weights", |(p, raw)| {
        let total: u32 = raw.iter().sum();
        (total > 0).then(|| (p, raw.iter().map(|&r| r as f64 / total as f64).collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn agents_move_exactly_when_cheaply_gameable(p in world()) {
        for f in p.class.iter() {
            let delta = best_response_det(&p.world, f).unwrap();
            let oracle = common::reach_set(&p.world, f, 2.0);
            prop_assert_eq!(delta.moved(), &oracle[..]);
            for x in 0..p.world.len() {
                let z = delta.target(x);
                prop_assert!(f.label(z) == 1 || z == x);
            }
        }
    }

    #[test]
    fn set_algebra(p in world()) {
        for f in p.class.iter() {
            let g = gaming_set(&p.world, f).unwrap().members;
            let c = cheap_set(&p.world, f).unwrap().members;
            let e = expensive_set(&p.world, f).unwrap().members;
            for x in 0..p.world.len() {
                prop_assert!(!c[x] || g[x]);
                prop_assert_eq!(e[x], g[x] && !c[x]);
            }
            prop_assert_eq!(&c, &common::reach_set(&p.world, f, 1.0));
            for h in p.class.iter() {
                let joint = joint_gaming_set(&p.world, f, h).unwrap().members;
                let n = nonsimultaneous_set(&p.world, f, h).unwrap().members;
                let gh = gaming_set(&p.world, h).unwrap().members;
                prop_assert_eq!(&joint, &common::joint_set(&p.world, f, h));
                for x in 0..p.world.len() {
                    prop_assert!(!joint[x] || (g[x] && gh[x]));
                    prop_assert_eq!(n[x], g[x] && gh[x] && !joint[x]);
                }
            }
        }
    }

    #[test]
    fn mixture_response_matches_oracle((p, w) in world_and_weights()) {
        let q = Mixture::new(w.clone()).unwrap();
        let delta = best_response_mix(&p.world, &p.class, &q).unwrap();
        let v = votes(&q, &p.class).unwrap();
        prop_assert_eq!(delta.targets(), &common::respond(&p.world, &v)[..]);
        let members: Vec<_> = p.class.iter().collect();
        let risk = strategic_risk(&p.world, &p.class, &q, &delta).unwrap();
        let oracle = common::mixture_risk(&p.world, &members, &w, delta.targets());
        prop_assert!((risk - oracle).abs() <= 1e-12);
    }

    #[test]
    fn json_round_trip(p in world()) {
        let text = serialize_world(&p);
        let back = parse_world(&text).unwrap();
        prop_assert_eq!(serialize_world(&back), text);
        prop_assert_eq!(back.world.mass(), p.world.mass());
        for i in 0..p.world.len() {
            for j in 0..p.world.len() {
                prop_assert_eq!(back.world.c(i, j), p.world.c(i, j));
            }
        }
    }

    #[test]
    fn costs_are_a_valid_premetric(p in world()) {
        let w = &p.world;
        for i in 0..w.len() {
            prop_assert_eq!(w.c(i, i), 0.0);
            for j in 0..w.len() {
                prop_assert!(w.c(i, j) >= 0.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn sample_marginals_converge(p in world(), seed in any::<u64>()) {
        let n = 20_000;
        let d = sample_dataset(&p.world, n, seed).unwrap();
        let mut counts = vec![[0usize; 2]; p.world.len()];
        for &(x, y) in &d.items {
            counts[x][usize::from(y == 1)] += 1;
        }
        for (x, c) in counts.iter().enumerate() {
            for (slot, &k) in c.iter().enumerate() {
                let prob = p.world.mass()[x][slot];
                let se = (prob * (1.0 - prob) / n as f64).sqrt();
                prop_assert!((k as f64 / n as f64 - prob).abs() <= 5.0 * se + 1e-12);
            }
        }
    }

    #[test]
    fn sampling_is_reproducible(p in world(), seed in any::<u64>()) {
        let a = sample_dataset(&p.world, 100, seed).unwrap();
        let b = sample_dataset(&p.world, 100, seed).unwrap();
        prop_assert_eq!(a.items, b.items);
    }
}

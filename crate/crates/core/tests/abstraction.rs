use std::sync::Arc;

use ecfr::abstraction::{bucketed_cfr, ehs_scalar, kmeans, BucketMap, ClusterConfig, FeatureMode};
use ecfr::best_response::exploitability;
use ecfr::cards::{combinations, mask_of, Card};
use ecfr::hand_strength::{compare, rank_hand, Outcome, StrengthTable};
use ecfr::solver::TabularCfr;
use ecfr::{Game, GameConfig};
use proptest::prelude::*;

fn numeral20() -> Arc<Game> {
    Game::new(GameConfig::numeral20()).unwrap()
}

/// EHS of a final-round hand by direct comparison with every opponent hole.
fn naive_final_ehs(config: &GameConfig, hole: &[Card], board: &[Card]) -> f64 {
    let ns = config.num_suits;
    let used = mask_of(hole, ns) | mask_of(board, ns);
    let rest: Vec<Card> = (0..config.deck_size())
        .map(|i| Card::from_id(i, ns))
        .filter(|c| c.mask(ns) & used == 0)
        .collect();
    let mine: Vec<Card> = hole.iter().chain(board).copied().collect();
    let me = rank_hand(&mine, config).unwrap();
    let (mut score, mut total) = (0.0, 0.0);
    for opp in combinations(&rest, config.num_hole_cards) {
        let theirs: Vec<Card> = opp.iter().chain(board).copied().collect();
        score += match compare(me, rank_hand(&theirs, config).unwrap()) {
            Outcome::Win => 1.0,
            Outcome::Draw => 0.5,
            Outcome::Lose => 0.0,
        };
        total += 1.0;
    }
    score / total
}

#[test]
fn ehs_matches_direct_enumeration_on_final_and_middle_rounds() {
    let game = numeral20();
    let config = &game.config;
    let st = StrengthTable::build(&game.hands);
    for class in [0u32, 17, 400, 1999] {
        let hand = game.hands.class_hand(2, class).rounds();
        let board: Vec<Card> = hand[1..].concat();
        let expect = naive_final_ehs(config, &hand[0], &board);
        assert!((ehs_scalar(&st, 2, class) - expect).abs() < 1e-12, "class {class}");
    }
    // one round earlier the value is the mean over every unseen turn card
    for class in [0u32, 33, 150] {
        let hand = game.hands.class_hand(1, class).rounds();
        let ns = config.num_suits;
        let seen = mask_of(&hand.concat(), ns);
        let mut sum = 0.0;
        let mut count = 0.0;
        for id in 0..config.deck_size() {
            let turn = Card::from_id(id, ns);
            if turn.mask(ns) & seen != 0 {
                continue;
            }
            let board: Vec<Card> = hand[1].iter().copied().chain([turn]).collect();
            sum += naive_final_ehs(config, &hand[0], &board);
            count += 1.0;
        }
        assert!((ehs_scalar(&st, 1, class) - sum / count).abs() < 1e-12, "class {class}");
    }
}

#[test]
fn unbeatable_final_hand_has_strength_one() {
    let game = numeral20();
    let st = StrengthTable::build(&game.hands);
    let best = (0..game.hands.num_classes(2) as u32)
        .map(|c| ehs_scalar(&st, 2, c))
        .fold(0.0, f64::max);
    assert_eq!(best, 1.0);
}

#[test]
fn toy_partition_matches_exhaustive_search() {
    let values = [0.0, 0.1, 0.9, 1.0];
    let pts: Vec<Vec<f64>> = values.iter().map(|v| vec![*v]).collect();
    let c = kmeans(&pts, None, &ClusterConfig::new(2)).unwrap();
    let mut best = (f64::INFINITY, 0u32);
    for mask in 1u32..(1 << values.len()) - 1 {
        let sse = |inside: bool| {
            let group: Vec<f64> = (0..4).filter(|i| (mask >> i & 1 == 1) == inside).map(|i| values[i]).collect();
            let mean = group.iter().sum::<f64>() / group.len() as f64;
            group.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
        };
        let total = sse(true) + sse(false);
        if total < best.0 {
            best = (total, mask);
        }
    }
    assert!((c.inertia - best.0).abs() < 1e-12);
    let same = |i: usize, j: usize| c.assignment[i] == c.assignment[j];
    assert!(same(0, 1) && same(2, 3) && !same(1, 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lloyd_objective_never_increases(
        values in proptest::collection::vec(0.0f64..1.0, 1..60),
        k in 1usize..8,
        seed in 0u64..1000,
    ) {
        let pts: Vec<Vec<f64>> = values.iter().map(|v| vec![*v]).collect();
        let cfg = ClusterConfig { seed, ..ClusterConfig::new(k) };
        let c = kmeans(&pts, None, &cfg).unwrap();
        for w in c.trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        prop_assert_eq!(c.assignment.len(), values.len());
        prop_assert!(c.assignment.iter().all(|&b| (b as usize) < k));
        prop_assert_eq!(kmeans(&pts, None, &cfg).unwrap(), c);
    }
}

#[test]
fn bucket_maps_are_total_and_respect_the_budget() {
    let game = numeral20();
    let st = StrengthTable::build(&game.hands);
    for mode in [FeatureMode::Ehs, FeatureMode::Tensor] {
        let map = BucketMap::cluster(&game, &st, &[None, Some(40), Some(200)], mode, &ClusterConfig::new(0)).unwrap();
        assert!(map.per_round[0].is_none());
        for (r, k) in [(1, 40), (2, 200)] {
            let m = map.per_round[r].as_ref().unwrap();
            assert_eq!(m.len(), game.hands.num_classes(r));
            assert_eq!(map.buckets[r], k);
            let mut used = vec![false; k];
            m.iter().for_each(|&b| used[b as usize] = true);
            assert!(used.iter().all(|u| *u), "round {r} has an empty bucket");
        }
    }
}

#[test]
fn lossless_buckets_are_bit_compatible_with_vanilla() {
    for game in [Game::new(GameConfig::kuhn()).unwrap(), numeral20()] {
        let mut vanilla = TabularCfr::vanilla(game.clone());
        let mut bucketed = bucketed_cfr(game.clone(), &BucketMap::identity(&game));
        for _ in 0..3 {
            vanilla.iterate();
            bucketed.iterate();
            let a = exploitability(&game, &vanilla.average_classes());
            let b = exploitability(&game, &bucketed.average_classes());
            assert_eq!(a, b);
        }
    }
}

#[test]
fn explicit_lossless_map_matches_vanilla_within_tolerance() {
    let game = numeral20();
    let mut map = BucketMap::identity(&game);
    for r in 1..3 {
        map.per_round[r] = Some((0..game.hands.num_classes(r) as u32).collect());
    }
    let mut vanilla = TabularCfr::vanilla(game.clone());
    let mut bucketed = bucketed_cfr(game.clone(), &map);
    for _ in 0..3 {
        vanilla.iterate();
        bucketed.iterate();
    }
    let a = exploitability(&game, &vanilla.average_classes()).epsilon;
    let b = exploitability(&game, &bucketed.average_classes()).epsilon;
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn one_bucket_per_round_shares_a_strategy() {
    let game = numeral20();
    let st = StrengthTable::build(&game.hands);
    let map = BucketMap::cluster(&game, &st, &[None, Some(1), Some(1)], FeatureMode::Ehs, &ClusterConfig::new(0)).unwrap();
    let mut cfr = bucketed_cfr(game.clone(), &map);
    cfr.iterate();
    cfr.iterate();
    let cur = cfr.current_classes();
    for &d in &game.tree.decisions {
        if game.tree.nodes[d].round == 0 {
            continue;
        }
        for c in 1..game.num_classes_at(d) {
            assert_eq!(cur.row(d, c), cur.row(d, 0));
        }
    }
}

use std::sync::Arc;

use ecfr::best_response::{exploitability, expected_value};
use ecfr::cards::{parse_cards, Card};
use ecfr::game::{enumerate_deals, HistoryNode};
use ecfr::solver::checkpoint::{load_table, read_entries, save_table, TABLE_MAGIC};
use ecfr::solver::{
    counterfactual_value, positive_part_square_bound, value_decomposition_residual, regret_matching_vec, traverse, Chance, DealSample, KeyedTable,
    Layout, NoRecord, RowTable, StrategyTable, TabularCfr,
};
use ecfr::{Game, GameConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kuhn() -> Arc<Game> {
    Game::new(GameConfig::kuhn()).unwrap()
}

/// Two suits, four ranks, one hole card, one flop card.
fn toy() -> Arc<Game> {
    Game::new(GameConfig {
        name: "toy".into(),
        num_ranks: 4,
        num_suits: 2,
        num_hole_cards: 1,
        community_per_round: vec![1],
        ante: 1,
        bet_size_per_round: vec![1, 2],
        max_raises_per_round: 2,
        blind_unit: 1,
        rank_chars: String::new(),
    })
    .unwrap()
}

fn uniform(game: &Game) -> RowTable {
    RowTable::uniform(Arc::new(Layout::classes(game)))
}

fn random_profile<R: Rng>(game: &Game, rng: &mut R) -> RowTable {
    let mut t = uniform(game);
    for &d in &game.tree.decisions {
        for c in 0..game.num_classes_at(d) {
            let row = t.row_mut(d, c);
            row.iter_mut().for_each(|x| *x = rng.gen_range(0.0..1.0));
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
    }
    t
}

fn all_keys(game: &Game) -> Vec<ecfr::game::InfoSetKey> {
    let mut out = Vec::new();
    for &d in &game.tree.decisions {
        for c in 0..game.num_classes_at(d) {
            out.push(game.infoset_key(d, c as u32));
        }
    }
    out
}

#[test]
fn regret_matching_examples() {
    assert_eq!(regret_matching_vec(&[2.0, -1.0, 3.0]), vec![0.4, 0.0, 0.6]);
    assert_eq!(regret_matching_vec(&[-1.0, -5.0]), vec![0.5, 0.5]);
    let u = regret_matching_vec(&[0.0, 0.0, 0.0]);
    assert!(u.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
}

proptest! {
    #[test]
    fn regret_matching_gives_a_distribution(r in proptest::collection::vec(-10.0f64..10.0, 1..6)) {
        let s = regret_matching_vec(&r);
        prop_assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(s.iter().all(|&x| x >= 0.0));
        let pos: f64 = r.iter().map(|x| x.max(0.0)).sum();
        if pos > 0.0 {
            for (x, ri) in s.iter().zip(&r) {
                prop_assert!((x - ri.max(0.0) / pos).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn kuhn_king_counterfactual_values_by_hand() {
    let game = kuhn();
    let cfg = &game.config;
    let profile = StrategyTable::from_rows(&game, &uniform(&game));
    let k = HistoryNode::dealt(cfg, &parse_cards("K", cfg).unwrap(), &parse_cards("J", cfg).unwrap())
        .unwrap()
        .infoset_key(0, cfg);
    let cf = counterfactual_value(cfg, &profile, &k).unwrap();
    // two deals of chance weight 1/6 each.
    // bet: P2 folds (+1) or calls and loses (+2), half each.
    // check: P2 checks (+1), or bets and P1 folds (-1) or calls (+2).
    let bet = 2.0 / 6.0 * (0.5 * 1.0 + 0.5 * 2.0);
    let check = 2.0 / 6.0 * (0.5 * 1.0 + 0.5 * (0.5 * -1.0 + 0.5 * 2.0));
    assert!((cf.action_values[0] - check).abs() < 1e-15);
    assert!((cf.action_values[1] - bet).abs() < 1e-15);
    assert!((cf.value - 0.375).abs() < 1e-15);
}

#[test]
fn actions_with_equal_continuations_have_equal_values() {
    // P2 folds to every bet and checks otherwise; P1's king then wins the
    // ante whether it bets or checks
    let game = kuhn();
    let cfg = &game.config;
    let mut rows = uniform(&game);
    for &d in &game.tree.decisions {
        if game.tree.player(d) == Some(1) {
            for c in 0..game.num_classes_at(d) {
                let row = rows.row_mut(d, c);
                row.fill(0.0);
                row[0] = 1.0;
            }
        }
    }
    let profile = StrategyTable::from_rows(&game, &rows);
    let key = HistoryNode::dealt(cfg, &parse_cards("K", cfg).unwrap(), &parse_cards("Q", cfg).unwrap())
        .unwrap()
        .infoset_key(0, cfg);
    let cf = counterfactual_value(cfg, &profile, &key).unwrap();
    assert_eq!(cf.action_values[0], cf.action_values[1]);
    assert!((cf.action_values[1] - 2.0 / 6.0).abs() < 1e-15);
}

#[test]
fn positive_part_square_bound_examples_and_random_pairs() {
    assert!(positive_part_square_bound(1.0, 1.0));
    assert!(positive_part_square_bound(-3.0, 1.0));
    let pos = |x: f64| x.max(0.0);
    assert_eq!(pos(1.0 + 1.0).powi(2), 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..100_000 {
        let a = rng.gen_range(-10.0..10.0);
        let b = rng.gen_range(-10.0..10.0);
        assert!(positive_part_square_bound(a, b), "({a}, {b})");
    }
}

#[test]
fn value_decomposition_residuals_vanish() {
    let game = kuhn();
    let cfg = &game.config;
    let keys = all_keys(&game);
    assert_eq!(keys.len(), 12);
    let uni = StrategyTable::from_rows(&game, &uniform(&game));
    for k in &keys {
        assert!(value_decomposition_residual(cfg, &uni, k).unwrap() < 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let p = StrategyTable::from_rows(&game, &random_profile(&game, &mut rng));
        for k in &keys {
            assert!(value_decomposition_residual(cfg, &p, k).unwrap() < 1e-12);
        }
    }
    // a pure profile leaves a single term on each side
    let mut pure = uniform(&game);
    for &d in &game.tree.decisions {
        for c in 0..game.num_classes_at(d) {
            let row = pure.row_mut(d, c);
            row.fill(0.0);
            *row.last_mut().unwrap() = 1.0;
        }
    }
    let pure = StrategyTable::from_rows(&game, &pure);
    for k in &keys {
        if let Ok(r) = value_decomposition_residual(cfg, &pure, k) {
            assert_eq!(r, 0.0);
        }
    }
}

#[test]
fn missing_infoset_is_named() {
    let game = kuhn();
    let cfg = &game.config;
    let mut table = StrategyTable::from_rows(&game, &uniform(&game));
    let keys = all_keys(&game);
    let gone = keys.last().unwrap().clone();
    table.entries.remove(&gone);
    let err = counterfactual_value(cfg, &table, &keys[0]).unwrap_err().to_string();
    assert!(err.contains(&gone.text(cfg)), "{err}");
}

/// Regrets after one iteration against the explicit enumeration oracle.
fn first_iteration_matches_reference(game: Arc<Game>) {
    let cfg = &game.config;
    let mut cfr = TabularCfr::vanilla(game.clone());
    cfr.iterate();
    let profile = StrategyTable::from_rows(&game, &uniform(&game));
    for &d in &game.tree.decisions {
        for c in 0..game.num_classes_at(d) {
            let key = game.infoset_key(d, c as u32);
            let cf = counterfactual_value(cfg, &profile, &key).unwrap();
            let expect: Vec<f64> = cf.action_values.iter().map(|v| v - cf.value).collect();
            let got = cfr.cumulative_regret(d, c);
            for (g, e) in got.iter().zip(&expect) {
                assert!((g - e).abs() < 1e-12, "{}: {got:?} vs {expect:?}", key.text(cfg));
            }
            // σ² comes from r¹ alone
            assert_eq!(cfr.current().row(d, c), regret_matching_vec(&got).as_slice());
        }
    }
}

#[test]
fn first_iteration_regrets_match_enumeration_on_kuhn() {
    first_iteration_matches_reference(kuhn());
}

#[test]
fn first_iteration_regrets_match_enumeration_with_a_board() {
    first_iteration_matches_reference(toy());
}

#[test]
fn kuhn_converges_to_the_known_value() {
    let game = kuhn();
    let mut cfr = TabularCfr::vanilla(game.clone());
    let mut regrets = Vec::new();
    for t in 1..=10_000u64 {
        cfr.iterate();
        if t >= 100 && (t % 100 == 0) {
            regrets.push((t as f64, cfr.total_positive_regret()));
        }
    }
    let avg = cfr.average_classes();
    let report = exploitability(&game, &avg);
    assert!(report.epsilon_mbg < 5.0, "{report}");
    let value = expected_value(&game, &avg, 0);
    assert!((value + 1.0 / 18.0).abs() < 2e-3, "value {value}");
    assert!(-report.b2 <= -1.0 / 18.0 + 1e-12 && -1.0 / 18.0 <= report.b1 + 1e-12);

    // C fitted on the first decade bounds the rest: R(T) <= C / sqrt(T)
    let c = regrets
        .iter()
        .filter(|(t, _)| *t <= 1000.0)
        .map(|(t, r)| r * t.sqrt())
        .fold(0.0, f64::max);
    assert!(c > 0.0);
    for (t, r) in regrets.iter().filter(|(t, _)| *t > 1000.0) {
        assert!(*r <= c / t.sqrt(), "T = {t}: {r} > {}", c / t.sqrt());
    }
}

#[test]
fn average_is_invariant_to_scaling_the_weights() {
    let game = kuhn();
    let mut cfr = TabularCfr::vanilla(game.clone());
    for _ in 0..25 {
        cfr.iterate();
    }
    let before = cfr.average();
    let mut scaled = cfr.average_numerators().clone();
    scaled.data.iter_mut().for_each(|x| *x *= 7.5);
    let regrets = cfr.regret_sums().clone();
    let t = cfr.iteration();
    cfr.set_state(regrets, scaled, t);
    let after = cfr.average();
    for (a, b) in before.data.iter().zip(&after.data) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn runs_are_bitwise_deterministic() {
    let game = toy();
    let run = || {
        let mut cfr = TabularCfr::vanilla(game.clone());
        for _ in 0..30 {
            cfr.iterate();
        }
        (cfr.regret_sums().data.clone(), cfr.average_numerators().data.clone())
    };
    let (a, b) = run();
    let (c, d) = run();
    assert!(a.iter().zip(&c).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert!(b.iter().zip(&d).all(|(x, y)| x.to_bits() == y.to_bits()));
}

fn all_deals(game: &Game) -> Vec<(u32, u32, usize)> {
    let h = &game.hands;
    enumerate_deals(&game.config)
        .map(|d| {
            let board: Vec<Vec<Card>> = d.board.clone();
            (h.hole_id(&d.hole[0]).unwrap(), h.hole_id(&d.hole[1]).unwrap(), h.board_id(&board).unwrap())
        })
        .collect()
}

#[test]
fn sampling_every_deal_once_equals_exact_chance() {
    for game in [kuhn(), toy()] {
        let deals = all_deals(&game);
        assert_eq!(deals.len() as u64, game.config.deal_count());
        let sample = DealSample::from_deals(&game, deals.len(), &deals);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let profile = random_profile(&game, &mut rng);
        for p in 0..2 {
            for best in [false, true] {
                let exact = traverse(&game, &profile, p, best, Chance::Exact, &mut NoRecord);
                let sampled = traverse(&game, &profile, p, best, Chance::Sampled(&sample), &mut NoRecord);
                assert!((exact - sampled).abs() < 1e-12, "player {p} best {best}: {exact} vs {sampled}");
            }
        }
    }
}

#[test]
fn table_checkpoint_round_trip() {
    let game = kuhn();
    let mut cfr = TabularCfr::vanilla(game.clone());
    for _ in 0..10 {
        cfr.iterate();
    }
    let table = KeyedTable::from_rows(&game, &cfr.average_classes());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("avg.bin");
    save_table(&path, &game, &table).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..8], TABLE_MAGIC);
    let entries = read_entries(&mut bytes.as_slice()).unwrap();
    assert_eq!(entries.len(), 12);
    assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
    assert_eq!(load_table(&path, &game.config).unwrap(), table);
    // same table, same bytes
    save_table(&path, &game, &table).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
    assert!(read_entries(&mut &bytes[..bytes.len() - 4]).is_err());
}

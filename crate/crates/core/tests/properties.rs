use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use wfomc::celltypes::{build_tables, eval_lifted};
use wfomc::engine::{solve, EngineOptions};
use wfomc::formula::{parse_formula, Comparator, Formula, GroundAtom, Problem, Signature, Var};
use wfomc::oracle::{
    for_each_model, interpretation_stats, oracle_count, Interpretation, OracleOptions,
};
use wfomc::weights::{count_distribution, DistributionQuery, StatTable, WeightSpec};

fn sig() -> Signature {
    Signature::new(vec!["A".into(), "B".into()], vec!["R".into()])
}

fn leaf(rng: &mut ChaCha8Rng) -> Formula {
    let (x, y) = (Var::X, Var::Y);
    match rng.gen_range(0..9) {
        0 => Formula::unary("A", x),
        1 => Formula::unary("A", y),
        2 => Formula::unary("B", x),
        3 => Formula::unary("B", y),
        4 => Formula::binary("R", x, y),
        5 => Formula::binary("R", y, x),
        6 => Formula::binary("R", x, x),
        7 => Formula::Eq(x, y),
        _ => Formula::Neq(x, y),
    }
}

fn qf(rng: &mut ChaCha8Rng, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    let a = qf(rng, depth - 1);
    match rng.gen_range(0..4) {
        0 => Formula::not(a),
        1 => Formula::and(a, qf(rng, depth - 1)),
        2 => Formula::or(a, qf(rng, depth - 1)),
        _ => Formula::implies(a, qf(rng, depth - 1)),
    }
}

/// A conjunction of one or two C² sentences in the usual shapes.
fn sentence(rng: &mut ChaCha8Rng) -> Formula {
    let mut parts = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let body = qf(rng, 2);
        let part = match rng.gen_range(0..5) {
            0 => Formula::forall(Var::X, Formula::forall(Var::Y, body)),
            1 => Formula::forall(Var::X, Formula::exists(Var::Y, body)),
            2 => {
                let cmp = [Comparator::Eq, Comparator::Le, Comparator::Ge][rng.gen_range(0..3)];
                Formula::forall(
                    Var::X,
                    Formula::count_exists(cmp, rng.gen_range(0..=1), Var::Y, body),
                )
            }
            3 => Formula::exists(Var::X, Formula::unary("A", Var::X)),
            _ => Formula::exists(Var::X, Formula::forall(Var::Y, body)),
        };
        parts.push(part);
    }
    Formula::conjunction(parts)
}

fn random_interpretation(seed: u64, n: u64) -> Interpretation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = Interpretation::empty(&sig(), n).len();
    let bits = (0..len).map(|_| rng.gen_bool(0.5)).collect();
    Interpretation::from_bits(&sig(), n, bits).unwrap()
}

fn count_with(p: &Problem, threads: usize) -> BigRational {
    let options = EngineOptions {
        threads,
        ..EngineOptions::default()
    };
    solve(p, &[], &options).unwrap().total()
}

fn arb_var() -> impl Strategy<Value = Var> {
    prop_oneof![Just(Var::X), Just(Var::Y)]
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (prop_oneof![Just("A"), Just("B")], arb_var()).prop_map(|(p, v)| Formula::unary(p, v)),
        (arb_var(), arb_var()).prop_map(|(a, b)| Formula::binary("R", a, b)),
        (arb_var(), arb_var()).prop_map(|(a, b)| Formula::Eq(a, b)),
        (arb_var(), arb_var()).prop_map(|(a, b)| Formula::Neq(a, b)),
        Just(Formula::True),
        Just(Formula::False),
    ];
    atom.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (arb_var(), inner.clone()).prop_map(|(v, f)| Formula::forall(v, f)),
            (arb_var(), inner.clone()).prop_map(|(v, f)| Formula::exists(v, f)),
            (0u32..3, arb_var(), inner).prop_map(|(m, v, f)| Formula::count_exists(
                Comparator::Ge,
                m,
                v,
                f
            )),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_oracle_on_random_sentences(seed in any::<u64>(), n in 1u64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Problem::new(sig(), sentence(&mut rng), n);
        let engine = count_with(&p, 1);
        let oracle = oracle_count(&p).unwrap();
        prop_assert_eq!(engine, oracle, "{}", p.sentence);
    }

    #[test]
    fn unweighted_counts_are_integers(seed in any::<u64>(), n in 1u64..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Problem::new(sig(), sentence(&mut rng), n);
        prop_assert!(count_with(&p, 1).is_integer());
    }

    #[test]
    fn thread_count_does_not_change_results(seed in any::<u64>(), n in 1u64..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Problem::new(sig(), sentence(&mut rng), n);
        let mut map = BTreeMap::new();
        map.insert("R".to_string(), (BigRational::new(2.into(), 3.into()), BigRational::one()));
        p.weights = WeightSpec::Symmetric(map);
        let query = vec!["A".to_string(), "R".to_string()];
        let one = solve(&p, &query, &EngineOptions::default()).unwrap();
        let many = solve(&p, &query, &EngineOptions { threads: 4, ..EngineOptions::default() }).unwrap();
        prop_assert_eq!(one.cells, many.cells);
    }

    #[test]
    fn stats_match_direct_atom_counts(seed in any::<u64>(), n in 1u64..=3) {
        let w = random_interpretation(seed, n);
        let stats = interpretation_stats(&w);
        for p in ["A", "B", "R"] {
            let direct = wfomc::formula::ground_atoms(&sig(), n)
                .iter()
                .filter(|a| match a {
                    GroundAtom::Unary(q, _) | GroundAtom::Binary(q, _, _) => q == p,
                })
                .filter(|a| w.get(a))
                .count() as u64;
            prop_assert_eq!(stats.get(p), Some(direct));
        }
    }

    #[test]
    fn tables_are_swap_symmetric(f in arb_formula()) {
        let tables = build_tables(&strip_quantifiers(&f), &sig()).unwrap();
        let order = &tables.order;
        let types = 1usize << order.u();
        for i in 0..types {
            for j in 0..types {
                prop_assert_eq!(tables.n_ij(i, j), tables.n_ij(j, i));
                for v in 0..1u64 << order.b() {
                    prop_assert_eq!(tables.n_ijv(i, j, v), tables.n_ijv(j, i, order.swap_v(v)));
                }
            }
        }
    }

    #[test]
    fn tables_match_lifted_evaluation(f in arb_formula()) {
        let kernel = strip_quantifiers(&f);
        let tables = build_tables(&kernel, &sig()).unwrap();
        let order = &tables.order;
        let types = 1usize << order.u();
        for i in 0..types {
            for j in i..types {
                let mut models = 0u64;
                for v in 0..1u64 << order.b() {
                    let direct = eval_lifted(&kernel, order, i, j, v);
                    prop_assert_eq!(tables.n_ijv(i, j, v), direct);
                    models += direct as u64;
                }
                prop_assert_eq!(tables.n_ij(i, j), models);
            }
        }
    }

    #[test]
    fn formulas_round_trip_through_text(f in arb_formula()) {
        let text = f.to_string();
        let back = parse_formula(&text).unwrap();
        prop_assert_eq!(back, f, "{}", text);
    }

    #[test]
    fn distributions_normalize(seed in any::<u64>(), n in 1u64..=3, w in 1i64..5, wb in 1i64..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Problem::new(sig(), sentence(&mut rng), n);
        let mut map = BTreeMap::new();
        map.insert("A".to_string(), (BigRational::from_integer(w.into()), BigRational::new(wb.into(), 2.into())));
        p.weights = WeightSpec::Symmetric(map);
        if count_with(&p, 1).is_zero() {
            return Ok(());
        }
        let dist = count_distribution(&p, &DistributionQuery::new(["A", "R"])).unwrap();
        let total = dist.values().fold(BigRational::zero(), |a, b| a + b);
        prop_assert!(total.is_one());
    }

    #[test]
    fn all_ones_stat_table_is_unweighted(seed in any::<u64>(), n in 1u64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Problem::new(sig(), sentence(&mut rng), n);
        let mut q = p.clone();
        let table = (0..=n).map(|k| (vec![k], BigRational::one())).collect();
        q.weights = WeightSpec::StatTable(StatTable { preds: vec!["B".into()], table, default: BigRational::one() });
        prop_assert_eq!(count_with(&p, 1), count_with(&q, 1));
    }
}

/// Drops quantifiers, leaving a quantifier-free formula over `x` and `y`.
fn strip_quantifiers(f: &Formula) -> Formula {
    match f {
        Formula::Forall(_, b) | Formula::Exists(_, b) | Formula::CountExists(_, _, _, b) => {
            strip_quantifiers(b)
        }
        Formula::Not(a) => Formula::not(strip_quantifiers(a)),
        Formula::And(a, b) => Formula::and(strip_quantifiers(a), strip_quantifiers(b)),
        Formula::Or(a, b) => Formula::or(strip_quantifiers(a), strip_quantifiers(b)),
        Formula::Implies(a, b) => Formula::implies(strip_quantifiers(a), strip_quantifiers(b)),
        Formula::Iff(a, b) => Formula::iff(strip_quantifiers(a), strip_quantifiers(b)),
        other => other.clone(),
    }
}

#[test]
fn model_cells_partition_the_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = Problem::new(
            sig(),
            Formula::forall(Var::X, Formula::forall(Var::Y, qf(&mut rng, 3))),
            3,
        );
        let mut cells: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
        let models = for_each_model(&p, &OracleOptions::default(), |w| {
            let s = interpretation_stats(w);
            let key = ["A", "B", "R"].iter().map(|q| s.get(q).unwrap()).collect();
            *cells.entry(key).or_default() += 1;
        })
        .unwrap();
        let sum: u64 = cells.values().sum();
        assert_eq!(sum, models);
        assert_eq!(
            BigRational::from_integer(BigInt::from(sum)),
            oracle_count(&p).unwrap()
        );
    }
}

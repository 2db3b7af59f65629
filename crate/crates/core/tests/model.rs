use paras_core::{validate, Configuration, Error, Evaluator, ProblemKind, ProblemSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LO_SHU: [u32; 9] = [2, 7, 6, 9, 5, 1, 4, 3, 8];

fn spec(kind: ProblemKind, n: usize) -> ProblemSpec {
    ProblemSpec::new(kind, n).unwrap()
}

fn config(spec: &ProblemSpec, values: &[u32]) -> Configuration {
    Configuration::new(spec, values.to_vec()).unwrap()
}

fn swapped(values: &[u32], i: usize, j: usize) -> Vec<u32> {
    let mut v = values.to_vec();
    v.swap(i, j);
    v
}

#[test]
fn build_examples() {
    let ms = spec(ProblemKind::MagicSquare, 3);
    assert_eq!((ms.num_vars(), ms.num_constraints(), ms.magic_constant()), (9, 8, 15));
    let costas = spec(ProblemKind::CostasArray, 5);
    assert_eq!((costas.num_vars(), costas.num_constraints()), (5, 3));
    match ProblemSpec::new(ProblemKind::AllInterval, 1) {
        Err(Error::SizeOutOfRange { min: 2, got: 1, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn cost_examples() {
    let ms = spec(ProblemKind::MagicSquare, 3);
    assert_eq!(ms.full_cost(&LO_SHU).unwrap(), 0);
    assert!(ms.is_solution(&config(&ms, &LO_SHU)));
    let ai = spec(ProblemKind::AllInterval, 4);
    assert_eq!(ai.full_cost(&[0, 1, 2, 3]).unwrap(), 2);
    assert!(!ai.is_solution(&config(&ai, &[0, 1, 2, 3])));
    let costas = spec(ProblemKind::CostasArray, 4);
    assert_eq!(costas.full_cost(&[1, 2, 3, 4]).unwrap(), 3);
    assert!(ms.full_cost(&[1, 1, 2, 3, 4, 5, 6, 7, 8]).is_err());
}

#[test]
fn projection_examples() {
    let ms = spec(ProblemKind::MagicSquare, 3);
    let errs = ms.variable_errors(&config(&ms, &[1, 2, 3, 4, 5, 6, 7, 8, 9]));
    assert_eq!((errs[0], errs[4]), (12, 0));
    assert!(ms.variable_errors(&config(&ms, &LO_SHU)).iter().all(|&e| e == 0));
    let costas = spec(ProblemKind::CostasArray, 4);
    let errs = costas.variable_errors(&config(&costas, &[1, 2, 3, 4]));
    assert!(errs.iter().all(|&e| e > 0), "{errs:?}");
    let ai = spec(ProblemKind::AllInterval, 5);
    let errs = ai.variable_errors(&config(&ai, &[0, 1, 2, 4, 3]));
    assert_eq!(errs, vec![0, 1, 1, 1, 1]);
}

#[test]
fn delta_example() {
    let ai = spec(ProblemKind::AllInterval, 4);
    let c = config(&ai, &[0, 1, 2, 3]);
    assert_eq!(ai.delta_cost_swap(&c, 0, 3).unwrap(), -1);
}

/// 10^4 random (configuration, i, j) draws per kind, checked against a full
/// recomputation, both for the stateless model and the incremental evaluator.
#[test]
fn delta_matches_full_recompute() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for kind in ProblemKind::ALL {
        for draw in 0..10_000 {
            let n = rng.gen_range(kind.min_size().max(3)..=12);
            let spec = spec(kind, n);
            let c = Configuration::random(&spec, &mut rng);
            let i = rng.gen_range(0..spec.num_vars());
            let j = (i + rng.gen_range(1..spec.num_vars())) % spec.num_vars();
            let oracle = spec.full_cost(&swapped(c.values(), i, j)).unwrap() as i64 - c.cost() as i64;
            assert_eq!(spec.delta_cost_swap(&c, i, j).unwrap(), oracle, "{kind} draw {draw}");
            let eval = Evaluator::from_configuration(&spec, &c);
            assert_eq!(eval.delta_swap(i, j), oracle, "{kind} draw {draw}");
        }
    }
}

#[test]
fn swap_and_swap_back_cancel() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for kind in ProblemKind::ALL {
        let spec = spec(kind, 9);
        for _ in 0..500 {
            let c = Configuration::random(&spec, &mut rng);
            let (i, j) = (rng.gen_range(0..9), rng.gen_range(0..9));
            if i == j {
                continue;
            }
            let there = spec.delta_cost_swap(&c, i, j).unwrap();
            let other = config(&spec, &swapped(c.values(), i, j));
            assert_eq!(there + spec.delta_cost_swap(&other, i, j).unwrap(), 0);
        }
    }
}

fn permutations(n: u32) -> Vec<Vec<u32>> {
    fn extend(prefix: &mut Vec<u32>, rest: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            prefix.push(x);
            extend(prefix, rest, out);
            prefix.pop();
            rest.insert(k, x);
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut (1..=n).collect(), &mut out);
    out
}

/// A Costas array is a permutation whose displacement vectors between any
/// two dots are distinct; checked here with no shared code.
fn brute_force_costas(p: &[u32]) -> bool {
    let mut vectors = std::collections::HashSet::new();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if !vectors.insert((j - i, p[j] as i64 - p[i] as i64)) {
                return false;
            }
        }
    }
    true
}

#[test]
fn order_five_costas_arrays() {
    let spec = spec(ProblemKind::CostasArray, 5);
    let all = permutations(5);
    assert_eq!(all.len(), 120);
    let arrays: Vec<_> = all.iter().filter(|p| brute_force_costas(p)).collect();
    assert_eq!(arrays.len(), 40);
    for p in &all {
        let c = config(&spec, p);
        assert_eq!(spec.is_solution(&c), brute_force_costas(p), "{p:?}");
        assert_eq!(validate::is_costas_array(p), brute_force_costas(p));
    }
}

#[test]
fn known_solutions_validate() {
    let ai = spec(ProblemKind::AllInterval, 8);
    let series = [0, 7, 1, 6, 2, 5, 3, 4];
    assert!(validate::is_all_interval_series(&series));
    assert_eq!(ai.full_cost(&series).unwrap(), 0);
    assert!(validate::is_magic_square(3, &LO_SHU));
    assert!(!validate::is_magic_square(3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]));
}

fn any_kind() -> impl Strategy<Value = ProblemKind> {
    prop_oneof![
        Just(ProblemKind::MagicSquare),
        Just(ProblemKind::CostasArray),
        Just(ProblemKind::AllInterval),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn swaps_preserve_permutations(
        kind in any_kind(),
        n in 3usize..9,
        seed in any::<u64>(),
        swaps in prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 0..60),
    ) {
        let spec = spec(kind, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut eval = Evaluator::new(&spec, spec.random_values(&mut rng));
        for (a, b) in swaps {
            eval.apply_swap(a.index(spec.num_vars()), b.index(spec.num_vars()));
            prop_assert!(spec.check_permutation(eval.values()).is_ok());
            prop_assert_eq!(eval.cost(), spec.full_cost(eval.values()).unwrap());
        }
    }

    #[test]
    fn projection_bounds_cost(kind in any_kind(), n in 3usize..10, seed in any::<u64>()) {
        let spec = spec(kind, n);
        let c = Configuration::random(&spec, &mut ChaCha8Rng::seed_from_u64(seed));
        let errors = spec.variable_errors(&c);
        prop_assert!(errors.iter().sum::<u64>() >= c.cost());
    }

    #[test]
    fn zero_cost_equivalences(kind in any_kind(), n in 3usize..8, seed in any::<u64>()) {
        let spec = spec(kind, n);
        let c = Configuration::random(&spec, &mut ChaCha8Rng::seed_from_u64(seed));
        let zero_errors = spec.variable_errors(&c).iter().all(|&e| e == 0);
        let valid = validate::is_valid_solution(&spec, c.values());
        prop_assert_eq!(c.cost() == 0, zero_errors);
        prop_assert_eq!(c.cost() == 0, valid);
    }
}

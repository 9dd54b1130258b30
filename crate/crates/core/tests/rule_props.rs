use num_traits::{One, Zero};
use proptest::prelude::*;
use tourney::tournament::pair_count;
use tourney::{evaluate, RuleId, Tournament, Q};

fn with_permutation(max_n: usize) -> impl Strategy<Value = (Tournament, Vec<usize>)> {
    (2..=max_n).prop_flat_map(|n| {
        let t = any::<u128>().prop_map(move |bits| {
            Tournament::from_code(n, bits & ((1u128 << pair_count(n)) - 1)).unwrap()
        });
        (t, Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rules_are_label_equivariant((t, perm) in with_permutation(5)) {
        let relabeled = t.relabel(&perm);
        for rule in RuleId::ALL {
            prop_assert_eq!(
                evaluate(rule, &relabeled).unwrap(),
                evaluate(rule, &t).unwrap().relabel(&perm),
                "{}", rule
            );
        }
    }
}

#[test]
fn distributions_are_exact_and_condorcet_consistent() {
    for n in 1..=5 {
        for t in Tournament::all(n).unwrap() {
            for rule in RuleId::ALL {
                let d = evaluate(rule, &t).unwrap();
                assert!(d.probs().iter().all(|p| *p >= Q::zero()));
                assert_eq!(d.probs().iter().sum::<Q>(), Q::one(), "{rule} {t}");
                if let Some(w) = t.condorcet_winner() {
                    assert!(d.prob(w).is_one(), "{rule} {t}");
                }
            }
        }
    }
}

#[test]
fn dummy_matches_do_not_affect_real_agents() {
    for n in 3..=5 {
        for t in Tournament::all(n).unwrap() {
            let padded = t.pad(8).unwrap();
            let base = evaluate(RuleId::Rseb, &padded).unwrap();
            let reversed = Tournament::from_fn(8, |i, j| {
                if i >= n && j >= n {
                    i > j
                } else {
                    padded.beats(i, j)
                }
            })
            .unwrap();
            let other = evaluate(RuleId::Rseb, &reversed).unwrap();
            assert_eq!(&base.probs()[..n], &other.probs()[..n], "{t}");
        }
    }
}

use tourney::analysis::{manipulation_value, min_lambda, worst_alpha, MinLambda};
use tourney::bounds::{lambda_alpha_tradeoff, rseb_kryptonite_prob, Tradeoff};
use tourney::construct::superman_kryptonite;
use tourney::rational::{q, qi};
use tourney::{evaluate, RuleId};

#[test]
fn constructions_bound_the_exhaustive_optimum() {
    let mut compared = 0;
    for rule in RuleId::ALL {
        for n in [4, 5] {
            let Ok(tradeoff) = lambda_alpha_tradeoff(rule, n, &qi(0)) else {
                continue;
            };
            compared += 1;
            match tradeoff {
                Tradeoff::Lambda(bound) => match min_lambda(rule, n).unwrap().0 {
                    MinLambda::Finite(v) => assert!(v >= bound, "{rule} n={n}: {v} < {bound}"),
                    MinLambda::Infinite => {}
                },
                Tradeoff::Alpha(bound) => {
                    for lambda in [qi(0), qi(1), qi(10)] {
                        let alpha = worst_alpha(rule, n, &lambda).unwrap().0;
                        assert!(alpha >= bound, "{rule} n={n} λ={lambda}: {alpha} < {bound}");
                    }
                }
            }
        }
    }
    assert!(compared >= 8);
}

#[test]
fn death_match_gadget_at_five() {
    let t = superman_kryptonite(5).unwrap();
    let lambda = qi(2);
    let best = (0..5)
        .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
        .map(|(i, j)| {
            manipulation_value(RuleId::Rdm, &t, i, j, &lambda)
                .unwrap()
                .value
        })
        .max()
        .unwrap();
    assert!(best >= q(1, 10), "{best}");
}

#[test]
fn kryptonite_stays_below_one_seventh() {
    for m in 2..=5 {
        assert!(rseb_kryptonite_prob(2, m).unwrap() <= q(1, 7), "m={m}");
    }
}

#[test]
fn kryptonite_matches_bracket_dp() {
    let sk4 = superman_kryptonite(4).unwrap();
    for m in [3, 4] {
        let padded = sk4.pad(1 << m).unwrap();
        assert_eq!(
            rseb_kryptonite_prob(2, m).unwrap(),
            evaluate(RuleId::Rseb, &padded).unwrap().prob(3).clone(),
            "m={m}"
        );
    }
}

use tourney::analysis::{
    check_fairness, check_nm_infinity, check_pnm, check_snm, manipulation_value, worst_alpha,
    worst_alpha_reduced, Property, Witness,
};
use tourney::rational::{q, qi};
use tourney::{evaluate, RuleId};

#[test]
fn worst_alpha_does_not_grow_with_lambda() {
    let lambdas = [qi(0), q(1, 2), qi(1), qi(2)];
    for rule in RuleId::ALL {
        for n in 2..=4 {
            let alphas: Vec<_> = lambdas
                .iter()
                .map(|l| worst_alpha(rule, n, l).unwrap().0)
                .collect();
            assert!(
                alphas.windows(2).all(|w| w[0] >= w[1]),
                "{rule} n={n}: {alphas:?}"
            );
        }
    }
}

#[test]
fn reduced_scan_matches_full_scan() {
    for rule in RuleId::ALL {
        for n in 2..=5 {
            for lambda in [qi(0), qi(1)] {
                assert_eq!(
                    worst_alpha_reduced(rule, n, &lambda).unwrap(),
                    worst_alpha(rule, n, &lambda).unwrap().0,
                    "{rule} n={n} λ={lambda}"
                );
            }
        }
    }
}

#[test]
fn fairness_hierarchy() {
    for rule in RuleId::ALL {
        for n in 1..=5 {
            let holds = |p| check_fairness(rule, n, p).unwrap().holds;
            let (cc, tcc) = (holds(Property::Cc), holds(Property::Tcc));
            if holds(Property::Cover) || holds(Property::Dstc) {
                assert!(tcc, "{rule} n={n}");
            }
            if tcc {
                assert!(cc, "{rule} n={n}");
            }
        }
    }
}

#[test]
fn pnm_matches_nm_infinity() {
    for rule in RuleId::ALL {
        for n in 2..=4 {
            assert_eq!(
                check_pnm(rule, n).unwrap().holds,
                check_nm_infinity(rule, n).unwrap().holds,
                "{rule} n={n}"
            );
        }
    }
}

#[test]
fn failing_witnesses_replay() {
    let mut failures = 0;
    for rule in RuleId::ALL {
        for n in 3..=4 {
            let mut reports = vec![check_pnm(rule, n).unwrap(), check_snm(rule, n).unwrap()];
            for p in [Property::Cover, Property::Dstc, Property::Tcc] {
                reports.push(check_fairness(rule, n, p).unwrap());
            }
            for r in reports.into_iter().filter(|r| !r.holds) {
                failures += 1;
                assert!(r.replay_rule(rule).unwrap(), "{r}");
                match r.witness.as_ref().unwrap() {
                    Witness::Flip(w) => {
                        let again =
                            manipulation_value(rule, &w.tournament, w.i, w.j, &w.lambda).unwrap();
                        assert_eq!(&again, w);
                    }
                    Witness::Agent {
                        tournament,
                        agent,
                        prob,
                    } => assert_eq!(evaluate(rule, tournament).unwrap().prob(*agent), prob),
                    Witness::Restriction { .. } => {}
                }
            }
        }
    }
    assert!(failures > 0);
}

#[test]
fn gadget_failures_do_not_depend_on_the_bottom_four() {
    let gadget = tourney::construct::rseb_dstc_gadget().unwrap();
    let bottom: Vec<(usize, usize)> = (4..8)
        .flat_map(|i| (i + 1..8).map(move |j| (i, j)))
        .collect();
    for mask in 0..1u32 << bottom.len() {
        let t = tourney::Tournament::from_fn(8, |i, j| {
            match bottom.iter().position(|&p| p == (i.min(j), i.max(j))) {
                Some(k) => (mask >> k & 1 == 1) == (i < j),
                None => gadget.beats(i, j),
            }
        })
        .unwrap();
        for p in [Property::Dstc, Property::Cover] {
            let r = tourney::analysis::check_fairness_on(RuleId::Rseb, &[t.clone()], p).unwrap();
            assert!(!r.holds, "{p} {t}");
        }
    }
}

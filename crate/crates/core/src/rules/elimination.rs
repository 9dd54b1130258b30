//! ICR, RKotH, RDM and RVC as memoized counts of equally likely histories.

use super::WinDistribution;
use crate::tournament::{AgentSet, Tournament};

type Counts = Vec<u128>;

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Condorcet winner of `T|_set`.
fn winner_within(t: &Tournament, set: AgentSet) -> Option<usize> {
    set.iter().find(|&a| {
        set.difference(AgentSet::singleton(a))
            .is_subset(t.victims(a))
    })
}

type Step<'s> = dyn Fn(&Tournament, AgentSet, &mut dyn FnMut(AgentSet) -> Counts) -> Counts + 's;

/// Evaluates `step` on the full agent set, memoizing every subset it recurses into.
fn memoized(t: &Tournament, step: &Step<'_>) -> Counts {
    fn go(
        t: &Tournament,
        table: &mut Vec<Option<Counts>>,
        step: &Step<'_>,
        set: AgentSet,
    ) -> Counts {
        if let Some(c) = &table[set.bits() as usize] {
            return c.clone();
        }
        let result = step(t, set, &mut |s| go(t, table, step, s));
        table[set.bits() as usize] = Some(result.clone());
        result
    }
    let mut table = vec![None; 1 << t.n()];
    go(t, &mut table, step, t.agents())
}

/// Iterative Condorcet rule: while no agent is undefeated, remove a uniform
/// random agent. `F(S)` counts removal orders, total `|S|!`.
pub(super) fn icr(t: &Tournament) -> WinDistribution {
    let n = t.n();
    let counts = memoized(t, &move |t, set, rec| {
        if let Some(w) = winner_within(t, set) {
            let mut c = vec![0; n];
            c[w] = factorial(set.len());
            return c;
        }
        let mut acc = vec![0u128; n];
        for a in set.iter() {
            let mut rest = set;
            rest.remove(a);
            add(&mut acc, &rec(rest), 1);
        }
        acc
    });
    WinDistribution::from_counts(&counts)
}

/// Randomized king of the hill: pick a uniform agent, remove her and everyone
/// she beats. `H(S)` is scaled to total `|S|!`.
pub(super) fn rkoth(t: &Tournament) -> WinDistribution {
    let n = t.n();
    let counts = memoized(t, &move |t, set, rec| {
        let size = set.len();
        if let Some(w) = winner_within(t, set) {
            let mut c = vec![0; n];
            c[w] = factorial(size);
            return c;
        }
        let mut acc = vec![0u128; n];
        for a in set.iter() {
            let rest = set
                .difference(t.victims(a))
                .difference(AgentSet::singleton(a));
            let scale = factorial(size - 1) / factorial(rest.len());
            add(&mut acc, &rec(rest), scale);
        }
        acc
    });
    WinDistribution::from_counts(&counts)
}

/// Randomized death match: a uniform pair plays and the loser leaves.
/// `G(S)` counts match sequences, total `prod_{s<=|S|} C(s, 2)`.
pub(super) fn rdm(t: &Tournament) -> WinDistribution {
    let n = t.n();
    let counts = memoized(t, &move |t, set, rec| {
        if set.len() == 1 {
            let mut c = vec![0; n];
            c[set.iter().next().unwrap()] = 1;
            return c;
        }
        let members: Vec<usize> = set.iter().collect();
        let mut acc = vec![0u128; n];
        for (x, &a) in members.iter().enumerate() {
            for &b in &members[x + 1..] {
                let mut rest = set;
                rest.remove(if t.beats(a, b) { b } else { a });
                add(&mut acc, &rec(rest), 1);
            }
        }
        acc
    });
    WinDistribution::from_counts(&counts)
}

/// Randomized voting caterpillar: a uniform permutation; the running
/// champion plays each next agent. `V(c, R)` counts orders of the agents `R`
/// still to play, total `|R|!`.
pub(super) fn rvc(t: &Tournament) -> WinDistribution {
    let n = t.n();
    let mut table: Vec<Option<Counts>> = vec![None; n << n];

    fn go(t: &Tournament, table: &mut Vec<Option<Counts>>, champ: usize, rest: AgentSet) -> Counts {
        let n = t.n();
        let key = (champ << n) | rest.bits() as usize;
        if let Some(c) = &table[key] {
            return c.clone();
        }
        let mut acc = vec![0u128; n];
        if rest.is_empty() {
            acc[champ] = 1;
        } else {
            for x in rest.iter() {
                let mut next = rest;
                next.remove(x);
                let sub = go(t, table, t.winner(champ, x), next);
                add(&mut acc, &sub, 1);
            }
        }
        table[key] = Some(acc.clone());
        acc
    }

    let mut total = vec![0u128; n];
    for first in 0..n {
        let mut rest = t.agents();
        rest.remove(first);
        let sub = go(t, &mut table, first, rest);
        add(&mut total, &sub, 1);
    }
    WinDistribution::from_counts(&total)
}

fn add(acc: &mut [u128], values: &[u128], scale: u128) {
    for (a, v) in acc.iter_mut().zip(values) {
        *a += v * scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn three_cycle() -> Tournament {
        "3:101".parse().unwrap()
    }

    #[test]
    fn uniform_on_three_cycle() {
        let c = three_cycle();
        for d in [icr(&c), rkoth(&c), rdm(&c), rvc(&c)] {
            assert!(d.probs().iter().all(|p| *p == q(1, 3)), "{d}");
        }
    }

    #[test]
    fn winner_within_subsets() {
        let t = Tournament::transitive(4).unwrap();
        assert_eq!(winner_within(&t, AgentSet::from_bits(0b1100)), Some(2));
        assert_eq!(winner_within(&three_cycle(), AgentSet::full(3)), None);
    }
}

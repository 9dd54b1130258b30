//! PageRank on the top cycle, with and without self-loops.
//!
//! Every agent passes its weight in equal shares to the agents that beat it
//! (and to itself when self-loops are on); the rule is the stationary
//! distribution of that walk.

use num_traits::{One, Zero};

use super::WinDistribution;
use crate::error::{Error, Result};
use crate::linalg::solve_unique;
use crate::rational::Q;
use crate::tournament::{AgentSet, Tournament};

pub(super) fn pagerank(t: &Tournament, self_loops: bool) -> Result<WinDistribution> {
    let top = t.top_cycle();
    if top.len() == 1 {
        return Ok(WinDistribution::point(t.n(), top.iter().next().unwrap()));
    }
    solve_stationary(t, top, self_loops)
}

/// Stationary distribution of the walk on `T|_S`, embedded in all `n` agents
/// with zero weight outside `set`.
pub fn solve_stationary(
    t: &Tournament,
    set: AgentSet,
    self_loops: bool,
) -> Result<WinDistribution> {
    if set.is_empty() {
        return Err(Error::Precondition("empty agent set".into()));
    }
    if !t.is_strongly_connected_on(set) {
        return Err(Error::Precondition(format!(
            "tournament restricted to {set} is not strongly connected"
        )));
    }
    let members: Vec<usize> = set.iter().collect();
    let m = members.len();
    let loop_weight = usize::from(self_loops);
    let share: Vec<Q> = members
        .iter()
        .map(|&j| {
            let d = t.conquerors(j).intersection(set).len() + loop_weight;
            if d == 0 {
                Err(Error::Singular(format!(
                    "agent {} has no outgoing weight",
                    j + 1
                )))
            } else {
                Ok(Q::new(1.into(), (d as i64).into()))
            }
        })
        .collect::<Result<_>>()?;

    // Row x: r_x - sum_{y: x beats y or x = y with loops} r_y * share_y = 0.
    let mut rows = Vec::with_capacity(m + 1);
    for (x, &i) in members.iter().enumerate() {
        let mut row = vec![Q::zero(); m + 1];
        row[x] = Q::one();
        for (y, &j) in members.iter().enumerate() {
            if t.beats(i, j) || (self_loops && i == j) {
                row[y] -= &share[y];
            }
        }
        rows.push(row);
    }
    rows.push(vec![Q::one(); m + 1]);

    let x = solve_unique(rows, m)?;
    let mut probs = vec![Q::zero(); t.n()];
    for (k, &a) in members.iter().enumerate() {
        probs[a] = x[k].clone();
    }
    WinDistribution::new(probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{prsl_cycle, superman_kryptonite};
    use crate::rational::q;

    #[test]
    fn three_cycle_is_uniform() {
        let c: Tournament = "3:101".parse().unwrap();
        for loops in [false, true] {
            let d = solve_stationary(&c, c.agents(), loops).unwrap();
            assert!(d.probs().iter().all(|p| *p == q(1, 3)));
        }
    }

    #[test]
    fn superman_kryptonite_without_loops() {
        let t = superman_kryptonite(4).unwrap();
        let d = solve_stationary(&t, t.agents(), false).unwrap();
        assert_eq!(d.to_string(), "4/13 3/13 2/13 4/13");
    }

    #[test]
    fn prsl_cycle_with_loops() {
        let t = prsl_cycle(2).unwrap();
        let d = solve_stationary(&t, t.agents(), true).unwrap();
        assert_eq!(d.to_string(), "3/19 3/19 3/19 6/19 4/19");
    }

    #[test]
    fn rejects_sets_that_are_not_strongly_connected() {
        let t = Tournament::transitive(3).unwrap();
        assert!(matches!(
            solve_stationary(&t, t.agents(), false),
            Err(Error::Precondition(_))
        ));
        // A single agent has nowhere to send weight without a self-loop.
        assert!(matches!(
            solve_stationary(&t, AgentSet::singleton(0), false),
            Err(Error::Singular(_))
        ));
        let d = solve_stationary(&t, AgentSet::singleton(1), true).unwrap();
        assert_eq!(d.prob(1), &q(1, 1));
    }
}

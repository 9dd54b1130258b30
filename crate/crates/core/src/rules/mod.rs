//! Exact winning probabilities for the eight tournament rules.
//!
//! The elimination-style rules count equally likely random histories with
//! `u128` dynamic programs over agent subsets and divide once at the end.
//! PageRank variants solve their stationary system over exact rationals.

mod bracket;
mod elimination;
mod montecarlo;
mod pagerank;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_vec, parse_q, q_u128, Q};
use crate::tournament::{AgentSet, Tournament};

pub use bracket::{bracket_winner, rseb_bracket_size, RSEB_MAX_AGENTS};
pub use montecarlo::monte_carlo;
pub use pagerank::solve_stationary;

/// Largest tournament the subset dynamic programs accept.
pub const ELIMINATION_MAX_AGENTS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    /// Iterative Condorcet rule.
    Icr,
    /// Randomized voting caterpillar.
    Rvc,
    /// Top cycle rule.
    Tcr,
    /// Randomized single elimination bracket.
    Rseb,
    /// Randomized king of the hill.
    Rkoth,
    /// Randomized death match.
    Rdm,
    /// PageRank restricted to the top cycle.
    Pr,
    /// PageRank with self-loops.
    Prsl,
}

impl RuleId {
    pub const ALL: [RuleId; 8] = [
        RuleId::Icr,
        RuleId::Rvc,
        RuleId::Tcr,
        RuleId::Rseb,
        RuleId::Rkoth,
        RuleId::Rdm,
        RuleId::Pr,
        RuleId::Prsl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Icr => "ICR",
            RuleId::Rvc => "RVC",
            RuleId::Tcr => "TCR",
            RuleId::Rseb => "RSEB",
            RuleId::Rkoth => "RKotH",
            RuleId::Rdm => "RDM",
            RuleId::Pr => "PR",
            RuleId::Prsl => "PRSL",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Unknown {
                kind: "rule",
                name: s.to_string(),
            })
    }
}

/// An exact probability distribution over agents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WinDistribution(Vec<Q>);

impl WinDistribution {
    /// Validates nonnegativity and an exact unit sum.
    pub fn new(probs: Vec<Q>) -> Result<Self> {
        if let Some((a, p)) = probs.iter().enumerate().find(|(_, p)| p.is_negative()) {
            return Err(Error::InvalidDistribution(format!(
                "agent {} has negative probability {p}",
                a + 1
            )));
        }
        let total: Q = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}"
            )));
        }
        Ok(WinDistribution(probs))
    }

    /// Builds a distribution from integer weights over a common total.
    pub(crate) fn from_counts(counts: &[u128]) -> Self {
        let total: u128 = counts.iter().sum();
        WinDistribution(counts.iter().map(|&c| q_u128(c, total)).collect())
    }

    pub fn point(n: usize, winner: usize) -> Self {
        let mut probs = vec![Q::zero(); n];
        probs[winner] = Q::one();
        WinDistribution(probs)
    }

    pub fn uniform_on(n: usize, set: AgentSet) -> Self {
        let share = Q::new(1.into(), (set.len() as i64).into());
        WinDistribution(
            (0..n)
                .map(|a| {
                    if set.contains(a) {
                        share.clone()
                    } else {
                        Q::zero()
                    }
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn prob(&self, agent: usize) -> &Q {
        &self.0[agent]
    }

    pub fn probs(&self) -> &[Q] {
        &self.0
    }

    pub fn into_probs(self) -> Vec<Q> {
        self.0
    }

    /// Moves agent `a`'s probability to position `perm[a]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut probs = vec![Q::zero(); self.0.len()];
        for (a, p) in self.0.iter().enumerate() {
            probs[perm[a]] = p.clone();
        }
        WinDistribution(probs)
    }

    /// Support of the distribution.
    pub fn support(&self) -> AgentSet {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(a, _)| a)
            .collect()
    }
}

impl fmt::Display for WinDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_vec(&self.0))
    }
}

impl FromStr for WinDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let probs = s
            .split_whitespace()
            .map(parse_q)
            .collect::<Result<Vec<_>>>()?;
        WinDistribution::new(probs)
    }
}

/// Exact winning distribution of `rule` on `t`.
pub fn evaluate(rule: RuleId, t: &Tournament) -> Result<WinDistribution> {
    let n = t.n();
    if let Some(w) = t.condorcet_winner() {
        return Ok(WinDistribution::point(n, w));
    }
    match rule {
        RuleId::Tcr => Ok(WinDistribution::uniform_on(n, t.top_cycle())),
        RuleId::Rseb => bracket::rseb(t),
        RuleId::Pr | RuleId::Prsl => pagerank::pagerank(t, rule == RuleId::Prsl),
        RuleId::Icr | RuleId::Rvc | RuleId::Rkoth | RuleId::Rdm => {
            if n > ELIMINATION_MAX_AGENTS {
                return Err(Error::Budget(format!(
                    "{rule} supports at most {ELIMINATION_MAX_AGENTS} agents, got {n}"
                )));
            }
            Ok(match rule {
                RuleId::Icr => elimination::icr(t),
                RuleId::Rvc => elimination::rvc(t),
                RuleId::Rkoth => elimination::rkoth(t),
                _ => elimination::rdm(t),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{prsl_cycle, rkoth_gadget, superman_kryptonite};
    use crate::rational::{q, qi};

    fn dist(values: &[(i64, i64)]) -> Vec<Q> {
        values.iter().map(|&(a, b)| q(a, b)).collect()
    }

    #[test]
    fn rule_names_round_trip() {
        for r in RuleId::ALL {
            assert_eq!(r.name().parse::<RuleId>().unwrap(), r);
        }
        assert_eq!("rkoth".parse::<RuleId>().unwrap(), RuleId::Rkoth);
        assert!("XYZ".parse::<RuleId>().is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(WinDistribution::new(dist(&[(1, 2), (9, 16)])).is_err());
        assert!(WinDistribution::new(vec![q(3, 2), q(-1, 2)]).is_err());
        let d: WinDistribution = "4/13 3/13 2/13 4/13".parse().unwrap();
        assert_eq!(d.to_string(), "4/13 3/13 2/13 4/13");
    }

    #[test]
    fn superman_kryptonite_values() {
        let sk = superman_kryptonite(4).unwrap();
        let tcr = evaluate(RuleId::Tcr, &sk).unwrap();
        assert_eq!(tcr.probs(), &dist(&[(1, 4), (1, 4), (1, 4), (1, 4)])[..]);
        let pr = evaluate(RuleId::Pr, &sk).unwrap();
        assert_eq!(pr.probs(), &dist(&[(4, 13), (3, 13), (2, 13), (4, 13)])[..]);
        let icr = evaluate(RuleId::Icr, &sk).unwrap();
        assert_eq!(icr.prob(0), &q(5, 12));
        assert_eq!(icr.prob(3), &q(1, 6));
        let rvc = evaluate(RuleId::Rvc, &sk).unwrap();
        assert_eq!(rvc.prob(0), &q(5, 12));
        assert_eq!(rvc.prob(3), &q(1, 4));
        let rseb = evaluate(RuleId::Rseb, &sk).unwrap();
        assert_eq!(rseb.probs(), &dist(&[(2, 3), (1, 3), (0, 1), (0, 1)])[..]);
        let rdm = evaluate(RuleId::Rdm, &superman_kryptonite(3).unwrap()).unwrap();
        assert_eq!(rdm.prob(0), &q(1, 3));
    }

    #[test]
    fn rkoth_gadget_values() {
        let t = rkoth_gadget().unwrap();
        let d = evaluate(RuleId::Rkoth, &t).unwrap();
        assert_eq!(d.prob(0), &q(2, 5));
        assert_eq!(d.prob(4), &qi(0));
        let flipped = evaluate(RuleId::Rkoth, &t.flip(0, 4).unwrap()).unwrap();
        assert_eq!(flipped.prob(0), &q(1, 2));
    }

    #[test]
    fn prsl_cycle_two_values() {
        let d = evaluate(RuleId::Prsl, &prsl_cycle(2).unwrap()).unwrap();
        assert_eq!(
            d.probs(),
            &dist(&[(3, 19), (3, 19), (3, 19), (6, 19), (4, 19)])[..]
        );
    }

    #[test]
    fn condorcet_winner_gets_everything() {
        for n in 1..=6 {
            let t = Tournament::transitive(n).unwrap();
            for rule in RuleId::ALL {
                assert_eq!(evaluate(rule, &t).unwrap(), WinDistribution::point(n, 0));
            }
        }
    }
}

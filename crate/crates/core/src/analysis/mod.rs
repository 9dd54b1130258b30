//! Exhaustive property scans: fairness, monotonicity and the pairwise
//! non-manipulability notions, with replayable witnesses.

mod fairness;
mod manipulation;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::rules::{evaluate, RuleId, WinDistribution};
use crate::table::RuleTable;
use crate::tournament::{AgentSet, Tournament};

pub use fairness::{
    check_fairness, check_fairness_on, check_fairness_table, check_monotone, check_monotone_table,
};
pub use manipulation::{
    check_nm_infinity, check_nm_infinity_table, check_nm_lambda_table, check_one_sided_nm,
    check_one_sided_nm_table, check_pnm, check_pnm_table, check_snm, dstc_gain_invariance,
    manipulation_value, min_lambda, min_lambda_table, worst_alpha, worst_alpha_reduced,
    worst_alpha_table, ManipulationWitness, MinLambda,
};

/// Largest size scanned exhaustively.
pub const EXHAUSTIVE_MAX_AGENTS: usize = 6;

fn check_budget(n: usize) -> Result<()> {
    if n == 0 || n > EXHAUSTIVE_MAX_AGENTS {
        return Err(Error::Budget(format!(
            "exhaustive scans support 1..={EXHAUSTIVE_MAX_AGENTS} agents, got {n}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    Cc,
    Tcc,
    Cover,
    Dstc,
    Monotone,
    Pnm,
    NmInfinity,
    Snm,
    NmLambda,
    OneSided,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::Cc,
        Property::Tcc,
        Property::Cover,
        Property::Dstc,
        Property::Monotone,
        Property::Pnm,
        Property::NmInfinity,
        Property::Snm,
        Property::NmLambda,
        Property::OneSided,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Cc => "CC",
            Property::Tcc => "TCC",
            Property::Cover => "COVER",
            Property::Dstc => "DSTC",
            Property::Monotone => "MONOTONE",
            Property::Pnm => "PNM",
            Property::NmInfinity => "NM_INF",
            Property::Snm => "SNM",
            Property::NmLambda => "NM_LAMBDA",
            Property::OneSided => "ONE_SIDED",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Property::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| Error::Unknown {
                kind: "property",
                name: s.to_string(),
            })
    }
}

/// Evidence that a property fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `agent` has probability `prob` where the property forbids it.
    Agent {
        tournament: Tournament,
        agent: usize,
        prob: Q,
    },
    /// `agent`'s probability in `T` differs from that in `T|_set`.
    Restriction {
        tournament: Tournament,
        set: AgentSet,
        agent: usize,
        full: Q,
        restricted: Q,
    },
    /// A reversal of the `(i, j)` match.
    Flip(ManipulationWitness),
}

impl Witness {
    pub fn tournament(&self) -> &Tournament {
        match self {
            Witness::Agent { tournament, .. } | Witness::Restriction { tournament, .. } => {
                tournament
            }
            Witness::Flip(w) => &w.tournament,
        }
    }

    pub fn agents(&self) -> Vec<usize> {
        match self {
            Witness::Agent { agent, .. } | Witness::Restriction { agent, .. } => vec![*agent],
            Witness::Flip(w) => vec![w.i, w.j],
        }
    }

    /// The witness values as printed in reports.
    pub fn values(&self) -> String {
        match self {
            Witness::Agent { prob, .. } => format!("prob={prob}"),
            Witness::Restriction {
                set,
                full,
                restricted,
                ..
            } => format!("set={set} full={full} restricted={restricted}"),
            Witness::Flip(w) => format!(
                "gain_i={} gain_j={} joint_gain={} max_loss={} value={}",
                w.gain_i, w.gain_j, w.joint_gain, w.max_loss, w.value
            ),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let agents: Vec<String> = self.agents().iter().map(|a| (a + 1).to_string()).collect();
        write!(
            f,
            "tournament {} agents {} {}",
            self.tournament().to_compact(),
            agents.join(","),
            self.values()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: Property,
    pub rule: Option<RuleId>,
    pub n: usize,
    pub lambda: Option<Q>,
    pub holds: bool,
    /// Worst slack for the manipulation scans.
    pub alpha: Option<Q>,
    pub witness: Option<Witness>,
}

pub const CSV_HEADER: [&str; 9] = [
    "property", "rule", "n", "lambda", "verdict", "alpha", "witness", "pair", "gains",
];

impl PropertyReport {
    fn new(property: Property, rule: Option<RuleId>, n: usize, witness: Option<Witness>) -> Self {
        PropertyReport {
            property,
            rule,
            n,
            lambda: None,
            holds: witness.is_none(),
            alpha: None,
            witness,
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.holds {
            "holds"
        } else {
            "fails"
        }
    }

    pub fn csv_record(&self) -> [String; 9] {
        let opt = |v: &Option<Q>| v.as_ref().map(ToString::to_string).unwrap_or_default();
        let (tournament, pair, gains) = match &self.witness {
            None => Default::default(),
            Some(w) => {
                let agents: Vec<String> = w.agents().iter().map(|a| (a + 1).to_string()).collect();
                (w.tournament().to_compact(), agents.join(" "), w.values())
            }
        };
        [
            self.property.to_string(),
            self.rule
                .map(|r| r.to_string())
                .unwrap_or_else(|| "table".into()),
            self.n.to_string(),
            opt(&self.lambda),
            self.verdict().to_string(),
            opt(&self.alpha),
            tournament,
            pair,
            gains,
        ]
    }

    /// Re-checks the witness against `rule`: true iff it still exhibits a
    /// violation of the reported property.
    pub fn replay_rule(&self, rule: RuleId) -> Result<bool> {
        self.replay(&|t| evaluate(rule, t))
    }

    /// As [`PropertyReport::replay_rule`] for a table; DSTC witnesses need a
    /// rule because they evaluate smaller tournaments.
    pub fn replay_table(&self, table: &RuleTable) -> Result<bool> {
        self.replay(&|t| {
            if t.n() == table.n() {
                Ok(table.get(t).clone())
            } else {
                Err(Error::Table(format!("no entries for {} agents", t.n())))
            }
        })
    }

    fn replay(&self, eval: &dyn Fn(&Tournament) -> Result<WinDistribution>) -> Result<bool> {
        let Some(witness) = &self.witness else {
            return Ok(false);
        };
        Ok(match witness {
            Witness::Agent {
                tournament: t,
                agent,
                prob,
            } => {
                let actual = eval(t)?.prob(*agent).clone();
                actual == *prob
                    && match self.property {
                        Property::Cc => t.condorcet_winner() == Some(*agent) && !prob.is_one(),
                        Property::Tcc => !t.top_cycle().contains(*agent) && prob.is_positive(),
                        Property::Cover => {
                            t.covered_agents().contains(*agent) && prob.is_positive()
                        }
                        _ => false,
                    }
            }
            Witness::Restriction {
                tournament: t,
                set,
                agent,
                full,
                restricted,
            } => {
                let position = set.iter().position(|a| a == *agent);
                match position {
                    Some(k) if self.property == Property::Dstc && t.is_dominant(*set) => {
                        let f = eval(t)?.prob(*agent).clone();
                        let r = eval(&t.restrict(*set))?.prob(k).clone();
                        f == *full && r == *restricted && f != r
                    }
                    _ => false,
                }
            }
            Witness::Flip(w) => {
                let before = eval(&w.tournament)?;
                let after = eval(&w.flipped())?;
                let lambda = w.lambda.clone();
                let fresh = ManipulationWitness::from_distributions(
                    &w.tournament,
                    w.i,
                    w.j,
                    lambda,
                    &before,
                    &after,
                );
                fresh == *w && manipulation::violates(self.property, &fresh)
            }
        })
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = self
            .rule
            .map(|r| r.to_string())
            .unwrap_or_else(|| "table".into());
        write!(f, "{} {} n={}", self.property, rule, self.n)?;
        if let Some(l) = &self.lambda {
            write!(f, " λ={l}")?;
        }
        write!(f, ": {}", self.verdict())?;
        if let Some(a) = &self.alpha {
            write!(f, " alpha = {a}")?;
        }
        if let Some(w) = &self.witness {
            write!(f, "; witness {w}")?;
        }
        Ok(())
    }
}

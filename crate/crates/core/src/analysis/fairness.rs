use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{check_budget, ManipulationWitness, Property, PropertyReport, Witness};
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::rules::{evaluate, RuleId, WinDistribution};
use crate::table::RuleTable;
use crate::tournament::Tournament;

fn fairness_only(property: Property) -> Result<()> {
    match property {
        Property::Cc | Property::Tcc | Property::Cover | Property::Dstc => Ok(()),
        p => Err(Error::Parameter(format!("{p} is not a fairness property"))),
    }
}

/// First agent of `t` violating CC, TCC or COVER under `dist`.
fn consistency_violation(
    property: Property,
    t: &Tournament,
    dist: &WinDistribution,
) -> Option<Witness> {
    let agent = match property {
        Property::Cc => t.condorcet_winner().filter(|&w| !dist.prob(w).is_one()),
        Property::Tcc => {
            let top = t.top_cycle();
            (0..t.n()).find(|&a| !top.contains(a) && !dist.prob(a).is_zero())
        }
        Property::Cover => t.covered_agents().iter().find(|&a| !dist.prob(a).is_zero()),
        _ => unreachable!("not a consistency property"),
    }?;
    Some(Witness::Agent {
        tournament: t.clone(),
        agent,
        prob: dist.prob(agent).clone(),
    })
}

fn dstc_violation(
    t: &Tournament,
    dist: &WinDistribution,
    restricted: &dyn Fn(&Tournament) -> Result<WinDistribution>,
) -> Result<Option<Witness>> {
    for set in t.dominant_subsets() {
        let sub = restricted(&t.restrict(set))?;
        for (k, a) in set.iter().enumerate() {
            if dist.prob(a) != sub.prob(k) {
                return Ok(Some(Witness::Restriction {
                    tournament: t.clone(),
                    set,
                    agent: a,
                    full: dist.prob(a).clone(),
                    restricted: sub.prob(k).clone(),
                }));
            }
        }
    }
    Ok(None)
}

/// Exhaustive fairness scan over every labeled tournament on `n` agents.
pub fn check_fairness(rule: RuleId, n: usize, property: Property) -> Result<PropertyReport> {
    fairness_only(property)?;
    check_budget(n)?;
    let sizes = if property == Property::Dstc {
        1..=n
    } else {
        n..=n
    };
    let tables = sizes
        .map(|k| RuleTable::from_rule(rule, k))
        .collect::<Result<Vec<_>>>()?;
    let full = tables.last().expect("at least one size");
    let smaller = |t: &Tournament| Ok(tables[t.n() - tables[0].n()].get(t).clone());
    let witness = scan(full, property, &smaller)?;
    Ok(PropertyReport::new(property, Some(rule), n, witness))
}

/// CC, TCC or COVER over an explicit table.
pub fn check_fairness_table(table: &RuleTable, property: Property) -> Result<PropertyReport> {
    fairness_only(property)?;
    if property == Property::Dstc {
        return Err(Error::Parameter(
            "DSTC needs the rule on smaller tournaments; check it on a rule".into(),
        ));
    }
    let witness = scan(
        table,
        property,
        &|_: &Tournament| -> Result<WinDistribution> {
            unreachable!("only DSTC looks at smaller tournaments")
        },
    )?;
    Ok(PropertyReport::new(property, None, table.n(), witness))
}

fn scan(
    table: &RuleTable,
    property: Property,
    restricted: &(dyn Fn(&Tournament) -> Result<WinDistribution> + Sync),
) -> Result<Option<Witness>> {
    let n = table.n();
    (0..Tournament::count(n))
        .into_par_iter()
        .map(|code| {
            let t = Tournament::from_code(n, code)?;
            let dist = table.by_code(code);
            if property == Property::Dstc {
                dstc_violation(&t, dist, restricted)
            } else {
                Ok(consistency_violation(property, &t, dist))
            }
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        })
        .unwrap_or(Ok(None))
}

/// Fairness on a chosen list of tournaments, evaluating the rule directly
/// (so sizes beyond the exhaustive budget are fine).
pub fn check_fairness_on(
    rule: RuleId,
    tournaments: &[Tournament],
    property: Property,
) -> Result<PropertyReport> {
    fairness_only(property)?;
    let n = tournaments.first().map_or(0, Tournament::n);
    for t in tournaments {
        let dist = evaluate(rule, t)?;
        let witness = if property == Property::Dstc {
            dstc_violation(t, &dist, &|s| evaluate(rule, s))?
        } else {
            consistency_violation(property, t, &dist)
        };
        if witness.is_some() {
            return Ok(PropertyReport::new(property, Some(rule), t.n(), witness));
        }
    }
    Ok(PropertyReport::new(property, Some(rule), n, None))
}

pub fn check_monotone(rule: RuleId, n: usize) -> Result<PropertyReport> {
    check_budget(n)?;
    let table = RuleTable::from_rule(rule, n)?;
    let mut report = check_monotone_table(&table);
    report.rule = Some(rule);
    Ok(report)
}

/// For every `T` and `i` beating `j`, `r_i(T) >= r_i(T')` after `i` throws the match.
pub fn check_monotone_table(table: &RuleTable) -> PropertyReport {
    let n = table.n();
    let witness = (0..Tournament::count(n))
        .into_par_iter()
        .find_map_first(|code| {
            let t = Tournament::from_code(n, code).expect("valid code");
            for i in 0..n {
                for j in i + 1..n {
                    let (w, l) = if t.beats(i, j) { (i, j) } else { (j, i) };
                    let before = table.by_code(code);
                    let after = table.by_code(super::manipulation::flip_code(n, code, i, j));
                    if after.prob(w) > before.prob(w) {
                        return Some(Witness::Flip(ManipulationWitness::from_distributions(
                            &t,
                            w,
                            l,
                            Q::zero(),
                            before,
                            after,
                        )));
                    }
                }
            }
            None
        });
    PropertyReport::new(Property::Monotone, None, n, witness)
}
